#include "longrun.hpp"

#include "errors.hpp"
#include "pair_cache.hpp"

#include <cmath>
#include <unordered_map>

namespace ordpat {

double bartlett_kernel(double x) {
    const double a = std::abs(x);
    return a >= 1.0 ? 0.0 : 1.0 - a;
}

double kernel_config::bandwidth_for(std::size_t divisor_n) const {
    if (bandwidth > 0.0) {
        if (!std::isfinite(bandwidth)) throw invalid_input("bandwidth must be finite");
        return bandwidth;
    }
    if (bandwidth < 0.0) throw invalid_input("bandwidth must be positive (or 0 for the ln(n) rule)");
    if (divisor_n < 2) throw invalid_input("ln(n) bandwidth rule needs n >= 2");
    return std::log(static_cast<double>(divisor_n));
}

void kernel_config::validate() const {
    if (!kernel) return; // built-in Bartlett
    static constexpr double probes[] = {0.0, 0.17, 0.41, 0.63, 0.89, 0.97, 1.23, 2.5};
    if (std::abs(kernel(0.0) - 1.0) > 1e-12)
        throw invalid_input("kernel must satisfy k(0) = 1");
    for (double x : probes) {
        const double kp = kernel(x), km = kernel(-x);
        if (!std::isfinite(kp) || !std::isfinite(km))
            throw invalid_input("kernel returned a non-finite value at |x| = " + std::to_string(x));
        if (std::abs(kp - km) > 1e-12)
            throw invalid_input("kernel must be symmetric; k differs at +/-" + std::to_string(x));
        if (kp < 0.0 || kp > 1.0)
            throw invalid_input("kernel must map into [0,1]; k(" + std::to_string(x) + ") = " +
                                std::to_string(kp));
    }
}

namespace {

struct band {
    double b = 0.0;
    std::size_t max_lag = 0;
};

band resolve_band(std::size_t m, std::size_t divisor_n, const kernel_config& cfg) {
    if (m == 0) throw invalid_input("empty summand series");
    cfg.validate();
    band out;
    out.b = cfg.bandwidth_for(divisor_n);
    const double lag_cap = std::ceil(out.b);
    out.max_lag = std::min<std::size_t>(m - 1, static_cast<std::size_t>(lag_cap));
    return out;
}

variance_estimate clamp_variance(double raw, double bandwidth) {
    variance_estimate out;
    out.bandwidth = bandwidth;
    if (raw < 0.0) {
        out.value = 0.0;
        out.clamped = true;
    } else {
        out.value = raw;
    }
    return out;
}

void check_matrix_order(int h, bool allow_large_h) {
    if (h < 1) throw invalid_input("pattern order h must be >= 1, got " + std::to_string(h));
    if (h > absolute_max_matrix_h)
        throw invalid_input("matrix-valued long-run estimators are refused for h = " +
                            std::to_string(h) + " (dimension 2(h+1)! is prohibitive beyond h = " +
                            std::to_string(absolute_max_matrix_h) + ")");
    if (h > default_max_matrix_h && !allow_large_h)
        throw invalid_input("matrix-valued long-run estimators cap at h = " +
                            std::to_string(default_max_matrix_h) +
                            " by default; pass the large-h override to allow h = " +
                            std::to_string(absolute_max_matrix_h));
}

} // namespace

variance_estimate longrun_variance(std::span<const double> z, std::size_t divisor_n,
                                   const kernel_config& cfg) {
    const std::size_t m = z.size();
    const band bd = resolve_band(m, divisor_n, cfg);
    double acc = 0.0;
    for (std::size_t lag = 0; lag <= bd.max_lag; ++lag) {
        const double w = cfg.eval(static_cast<double>(lag) / bd.b);
        if (w == 0.0) continue;
        double s = 0.0;
        const double* zi = z.data();
        const double* zj = z.data() + lag;
        for (std::size_t i = 0; i + lag < m; ++i) s += zi[i] * zj[i];
        acc += (lag == 0 ? 1.0 : 2.0) * w * s;
    }
    return clamp_variance(acc / static_cast<double>(divisor_n), bd.b);
}

variance_estimate sigma2_p(const paired_series& p, int h, const kernel_config& cfg,
                           bool allow_large_h) {
    const auto ind = coincidence_indicators(p, h, allow_large_h);
    const double n = static_cast<double>(p.size());
    double sum = 0.0;
    for (double v : ind) sum += v;
    const double p_hat = sum / n;
    std::vector<double> z(ind.size());
    for (std::size_t i = 0; i < ind.size(); ++i) z[i] = ind[i] - p_hat;
    return longrun_variance(z, p.size(), cfg);
}

cov_matrix longrun_cov_matrix(const paired_series& p, int h, const kernel_config& cfg,
                              bool allow_large_h) {
    check_matrix_order(h, allow_large_h);
    const auto sx = pattern_sequence(p.x, h, true);
    const auto sy = pattern_sequence(p.y, h, true);
    const std::size_t m = sx.size();
    const std::size_t f = static_cast<std::size_t>(pattern_space_size(h));
    const std::size_t dim = 2 * f;
    const double n = static_cast<double>(p.size());
    const band bd = resolve_band(m, p.size(), cfg);

    std::vector<double> mu(dim, 0.0);
    for (std::uint32_t a : sx) mu[a] += 1.0 / n;
    for (std::uint32_t b : sy) mu[f + b] += 1.0 / n;

    // Kernel weights per lag within the band.
    std::vector<double> w(bd.max_lag + 1);
    for (std::size_t lag = 0; lag <= bd.max_lag; ++lag)
        w[lag] = cfg.eval(static_cast<double>(lag) / bd.b);

    // A = sum over banded pairs of k_ij e_i e_j', exploiting that each
    // one-hot stack e_i has exactly two unit entries.
    std::vector<double> a_mat(dim * dim, 0.0);
    auto add4 = [&](std::size_t i, std::size_t j, double kw) {
        const std::size_t xi = sx[i], yi = f + sy[i];
        const std::size_t xj = sx[j], yj = f + sy[j];
        a_mat[xi * dim + xj] += kw;
        a_mat[xi * dim + yj] += kw;
        a_mat[yi * dim + xj] += kw;
        a_mat[yi * dim + yj] += kw;
    };
    for (std::size_t lag = 0; lag <= bd.max_lag; ++lag) {
        if (w[lag] == 0.0) continue;
        for (std::size_t i = 0; i + lag < m; ++i) {
            add4(i, i + lag, w[lag]);
            if (lag > 0) add4(i + lag, i, w[lag]);
        }
    }

    // Row kernel masses c_i = sum_{j in band} k_ij, scattered onto the
    // one-hot coordinates, plus their total.
    std::vector<double> u(dim, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double c = w[0];
        for (std::size_t lag = 1; lag <= bd.max_lag; ++lag) {
            if (i + lag < m) c += w[lag];
            if (i >= lag) c += w[lag];
        }
        u[sx[i]] += c;
        u[f + sy[i]] += c;
        total += c;
    }

    cov_matrix out;
    out.dim = dim;
    out.bandwidth = bd.b;
    out.data.assign(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            out.data[i * dim + j] =
                (a_mat[i * dim + j] - u[i] * mu[j] - mu[i] * u[j] + total * mu[i] * mu[j]) / n;
    return out;
}

variance_estimate gamma2_q(const paired_series& p, int h, const kernel_config& cfg,
                           bool allow_large_h) {
    check_matrix_order(h, allow_large_h);
    const auto sx = pattern_sequence(p.x, h, true);
    const auto sy = pattern_sequence(p.y, h, true);
    const std::size_t f = static_cast<std::size_t>(pattern_space_size(h));
    const double n = static_cast<double>(p.size());

    std::vector<double> qx(f, 0.0), qy(f, 0.0);
    for (std::uint32_t a : sx) qx[a] += 1.0 / n;
    for (std::uint32_t b : sy) qy[b] += 1.0 / n;
    double dot = 0.0;
    for (std::size_t i = 0; i < f; ++i) dot += qx[i] * qy[i];

    // Projection of the demeaned one-hot stack onto the gradient (q_Y, q_X).
    std::vector<double> t(sx.size());
    for (std::size_t i = 0; i < sx.size(); ++i) t[i] = qy[sx[i]] + qx[sy[i]] - 2.0 * dot;
    return longrun_variance(t, p.size(), cfg);
}

variance_estimate awopd_a_hat(const paired_series& p, int h, const pattern_metric& metric,
                              const weight_function& weight, const kernel_config& cfg,
                              bool allow_large_h) {
    const auto ws = weight_series(p, h, metric, weight, allow_large_h);
    const double n = static_cast<double>(p.size());
    double sum = 0.0;
    for (double v : ws) sum += v;
    const double mean = sum / n;
    std::vector<double> z(ws.size());
    for (std::size_t i = 0; i < ws.size(); ++i) z[i] = ws[i] - mean;
    return longrun_variance(z, p.size(), cfg);
}

variance_estimate awopd_gamma2(const paired_series& p, int h, const pattern_metric& metric,
                               const weight_function& weight, const kernel_config& cfg,
                               bool allow_large_h) {
    check_matrix_order(h, allow_large_h);
    if (metric.order_h() != h)
        throw invalid_input("metric order " + std::to_string(metric.order_h()) +
                            " does not match h = " + std::to_string(h));
    const auto sx = pattern_sequence(p.x, h, true);
    const auto sy = pattern_sequence(p.y, h, true);
    const std::size_t m = sx.size();
    const double n = static_cast<double>(p.size());

    detail::pair_weight_cache w(h, metric, weight);
    std::vector<double> ws(m);
    double wsum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        ws[i] = w(sx[i], sy[i]);
        wsum += ws[i];
    }
    const double wbar = wsum / n;

    std::unordered_map<std::uint32_t, double> count_x, count_y;
    for (std::uint32_t a : sx) count_x[a] += 1.0;
    for (std::uint32_t b : sy) count_y[b] += 1.0;

    // grad_x(a) = sum_b w(d(a,b)) q_y(b); grad_y(b) = sum_a w(d(a,b)) q_x(a);
    // c = q_x' W q_y. Restricted to patterns with nonzero empirical mass.
    std::unordered_map<std::uint32_t, double> grad_x, grad_y;
    double c = 0.0;
    for (const auto& [a, ca] : count_x) {
        double row = 0.0;
        for (const auto& [b, cb] : count_y) {
            const double v = w(a, b);
            row += v * cb;
            grad_y[b] += v * ca;
        }
        grad_x[a] = row / n;
        c += row * ca;
    }
    for (auto& [b, v] : grad_y) v /= n;
    c /= n * n;

    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i)
        u[i] = (ws[i] - wbar) - grad_x[sx[i]] - grad_y[sy[i]] + 2.0 * c;
    return longrun_variance(u, p.size(), cfg);
}

} // namespace ordpat
