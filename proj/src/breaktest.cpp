#include "breaktest.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace ordpat {

double kolmogorov_cdf(double x, int truncation) {
    if (truncation < 10) throw invalid_input("Kolmogorov CDF truncation must be >= 10");
    if (!std::isfinite(x)) throw invalid_input("Kolmogorov CDF argument must be finite");
    if (x <= 0.0) return 0.0;
    double alt = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= truncation; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        alt += sign * term;
        sign = -sign;
        if (term < 1e-17) break;
    }
    return std::clamp(1.0 - 2.0 * alt, 0.0, 1.0);
}

double kolmogorov_quantile(double p, int truncation) {
    if (!(p > 0.0 && p < 1.0)) throw invalid_input("Kolmogorov quantile needs p in (0,1)");
    double lo = 0.1, hi = 5.0;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_cdf(mid, truncation) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

std::vector<double> signed_partials(std::span<const double> z, double mean,
                                    std::size_t divisor_n, double scale) {
    if (z.empty()) throw invalid_input("empty summand series");
    if (divisor_n == 0) throw invalid_input("divisor n must be positive");
    if (scale == 0.0)
        throw degenerate_error("scale is zero; a constant summand series cannot be normalized");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw invalid_input("scale must be positive");
    if (!std::isfinite(mean)) throw invalid_input("mean must be finite");
    const double denom = std::sqrt(static_cast<double>(divisor_n)) * scale;
    std::vector<double> out(z.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        acc += z[i] - mean;
        out[i] = acc / denom;
    }
    return out;
}

std::string format_raw(double raw) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", raw);
    return buf;
}

// Shared CUSUM machinery; both statistics differ only in their summand
// series, so the discrete-metric identity holds bit for bit.
break_test_result run_cusum(const std::vector<double>& series, std::size_t divisor_n,
                            const kernel_config& cfg, double level, bool one_sided,
                            const char* what) {
    if (!(level > 0.0 && level < 1.0)) throw invalid_input("test level must lie in (0,1)");
    const double n = static_cast<double>(divisor_n);
    double sum = 0.0;
    for (double v : series) sum += v;
    const double mean = sum / n;

    std::vector<double> raw = signed_partials(series, mean, divisor_n, 1.0);
    if (!one_sided)
        for (double& v : raw) v = std::abs(v);
    const auto max_it = std::max_element(raw.begin(), raw.end());
    const std::size_t argmax = static_cast<std::size_t>(max_it - raw.begin());
    const double raw_stat = one_sided ? std::max(0.0, *max_it) : *max_it;

    const bool constant = std::all_of(series.begin(), series.end(),
                                      [&](double v) { return v == series.front(); });
    if (constant)
        throw degenerate_error(std::string(what) + " is constant across all windows; the raw "
                               "statistic is " + format_raw(raw_stat) +
                               " but the long-run variance is degenerate");

    std::vector<double> z(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) z[i] = series[i] - mean;
    const variance_estimate var = longrun_variance(z, divisor_n, cfg);
    if (var.value <= 0.0)
        throw degenerate_error(std::string(what) + " has zero long-run variance; the raw "
                               "statistic is " + format_raw(raw_stat) +
                               " but cannot be studentized");

    break_test_result out;
    out.sigma = std::sqrt(var.value);
    out.variance_clamped = var.clamped;
    out.bandwidth = var.bandwidth;
    out.level = level;
    out.raw_statistic = raw_stat;
    out.trajectory.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out.trajectory[i] = raw[i] / out.sigma;
    out.statistic = one_sided ? std::max(0.0, out.trajectory[argmax]) : out.trajectory[argmax];
    out.argmax_k = argmax + 1;
    out.critical_value = kolmogorov_quantile(1.0 - level);
    out.p_value = 1.0 - kolmogorov_cdf(out.statistic);
    out.reject = out.statistic >= out.critical_value;
    return out;
}

} // namespace

std::vector<double> cusum_trajectory(std::span<const double> z, double mean,
                                     std::size_t divisor_n, double scale) {
    std::vector<double> out = signed_partials(z, mean, divisor_n, scale);
    for (double& v : out) v = std::abs(v);
    return out;
}

break_test_result t_statistic(const paired_series& p, int h, const kernel_config& cfg,
                              double level, bool allow_large_h) {
    const auto ind = coincidence_indicators(p, h, allow_large_h);
    return run_cusum(ind, p.size(), cfg, level, false, "coincidence indicator series");
}

break_test_result w_statistic(const paired_series& p, int h, const pattern_metric& metric,
                              const weight_function& weight, const kernel_config& cfg,
                              double level, bool one_sided, bool allow_large_h) {
    const auto ws = weight_series(p, h, metric, weight, allow_large_h);
    return run_cusum(ws, p.size(), cfg, level, one_sided, "weighted distance series");
}

} // namespace ordpat
