#include "estimators.hpp"

#include "errors.hpp"
#include "pair_cache.hpp"

#include <cmath>
#include <unordered_map>

namespace ordpat {

paired_series::paired_series(std::vector<double> x_vals, std::vector<double> y_vals,
                             std::vector<std::string> stamps)
    : x(std::move(x_vals)), y(std::move(y_vals)), timestamps(std::move(stamps)) {
    if (x.size() != y.size())
        throw data_error("misaligned series lengths: " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
    if (!timestamps.empty() && timestamps.size() != x.size())
        throw data_error("timestamp count " + std::to_string(timestamps.size()) +
                         " does not match series length " + std::to_string(x.size()));
}

paired_series negated_y(const paired_series& p) {
    paired_series out = p;
    for (double& v : out.y) v = -v;
    return out;
}

namespace {

void check_window_count(std::size_t n, int h) {
    if (n <= static_cast<std::size_t>(h))
        throw invalid_input("series length " + std::to_string(n) + " must exceed h = " +
                            std::to_string(h));
}

using detail::pair_weight_cache;

std::unordered_map<std::uint32_t, std::uint64_t> sparse_counts(const std::vector<std::uint32_t>& seq) {
    std::unordered_map<std::uint32_t, std::uint64_t> counts;
    for (std::uint32_t idx : seq) ++counts[idx];
    return counts;
}

} // namespace

std::vector<double> coincidence_indicators(const paired_series& p, int h, bool allow_large_h) {
    check_window_count(p.size(), h);
    const auto sx = pattern_sequence(p.x, h, allow_large_h);
    const auto sy = pattern_sequence(p.y, h, allow_large_h);
    std::vector<double> ind(sx.size());
    for (std::size_t i = 0; i < sx.size(); ++i) ind[i] = sx[i] == sy[i] ? 1.0 : 0.0;
    return ind;
}

double estimate_p(const paired_series& p, int h, bool allow_large_h) {
    check_window_count(p.size(), h);
    const auto sx = pattern_sequence(p.x, h, allow_large_h);
    const auto sy = pattern_sequence(p.y, h, allow_large_h);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < sx.size(); ++i)
        if (sx[i] == sy[i]) ++hits;
    return static_cast<double>(hits) / static_cast<double>(p.size());
}

std::vector<double> estimate_q_marginals(std::span<const double> series, int h,
                                         bool allow_large_h) {
    check_window_count(series.size(), h);
    const auto seq = pattern_sequence(series, h, allow_large_h);
    std::vector<double> q(static_cast<std::size_t>(pattern_space_size(h)), 0.0);
    const double inv_n = 1.0 / static_cast<double>(series.size());
    for (std::uint32_t idx : seq) q[idx] += inv_n;
    return q;
}

double estimate_q(const paired_series& p, int h, bool allow_large_h) {
    check_window_count(p.size(), h);
    const auto cx = sparse_counts(pattern_sequence(p.x, h, allow_large_h));
    const auto cy = sparse_counts(pattern_sequence(p.y, h, allow_large_h));
    // The cross product of the integer pattern counts is exact in double, so
    // a single division reproduces estimate_awopd's cross term bit for bit
    // and the discrete-metric reduction d_hat == p - q holds exactly.
    double cross = 0.0;
    for (const auto& [idx, count_x] : cx) {
        const auto it = cy.find(idx);
        if (it != cy.end())
            cross += static_cast<double>(count_x) * static_cast<double>(it->second);
    }
    const double n = static_cast<double>(p.size());
    return cross / (n * n);
}

double estimate_r(const paired_series& p, int h, bool allow_large_h) {
    return estimate_p(negated_y(p), h, allow_large_h);
}

double estimate_s(const paired_series& p, int h, bool allow_large_h) {
    return estimate_q(negated_y(p), h, allow_large_h);
}

double ord_coefficient(double p, double q, double r, double s) {
    for (double v : {p, q, r, s})
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw invalid_input("ord inputs must lie in [0,1]");
    const double pos = q == 1.0 ? 1.0 : std::max(0.0, (p - q) / (1.0 - q));
    const double neg = s == 1.0 ? 1.0 : std::max(0.0, (r - s) / (1.0 - s));
    return pos - neg;
}

dependence_values estimate_dependence(const paired_series& p, int h, bool allow_large_h) {
    dependence_values out;
    out.h = h;
    out.n = p.size();
    out.p = estimate_p(p, h, allow_large_h);
    out.q = estimate_q(p, h, allow_large_h);
    out.r = estimate_r(p, h, allow_large_h);
    out.s = estimate_s(p, h, allow_large_h);
    out.ord = ord_coefficient(out.p, out.q, out.r, out.s);
    return out;
}

std::vector<double> weight_series(const paired_series& p, int h, const pattern_metric& metric,
                                  const weight_function& weight, bool allow_large_h) {
    check_window_count(p.size(), h);
    if (metric.order_h() != h)
        throw invalid_input("metric order " + std::to_string(metric.order_h()) +
                            " does not match h = " + std::to_string(h));
    const auto sx = pattern_sequence(p.x, h, allow_large_h);
    const auto sy = pattern_sequence(p.y, h, allow_large_h);
    pair_weight_cache w(h, metric, weight);
    std::vector<double> out(sx.size());
    for (std::size_t i = 0; i < sx.size(); ++i) out[i] = w(sx[i], sy[i]);
    return out;
}

awopd_values estimate_awopd(const paired_series& p, int h, const pattern_metric& metric,
                            const weight_function& weight, bool allow_large_h) {
    check_window_count(p.size(), h);
    if (metric.order_h() != h)
        throw invalid_input("metric order " + std::to_string(metric.order_h()) +
                            " does not match h = " + std::to_string(h));
    const auto sx = pattern_sequence(p.x, h, allow_large_h);
    const auto sy = pattern_sequence(p.y, h, allow_large_h);
    const double n = static_cast<double>(p.size());
    const double m = static_cast<double>(sx.size());

    pair_weight_cache w(h, metric, weight);
    awopd_values out;
    out.h = h;
    out.n = p.size();
    for (std::size_t i = 0; i < sx.size(); ++i) {
        out.awopd_value += w(sx[i], sy[i]);
        if (sx[i] == sy[i]) ++out.coincidences;
    }

    // Cross term over pattern pairs with nonzero empirical mass on both sides.
    const auto cx = sparse_counts(sx);
    const auto cy = sparse_counts(sy);
    double cross = 0.0; // sum over pairs of w(d(a,b)) * count_x(a) * count_y(b)
    for (const auto& [a, ca] : cx)
        for (const auto& [b, cb] : cy)
            cross += w(a, b) * static_cast<double>(ca) * static_cast<double>(cb);

    out.d_hat = out.awopd_value / n - cross / (n * n);
    out.comparison_value = cross / m;
    return out;
}

} // namespace ordpat
