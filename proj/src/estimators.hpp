#pragma once

#include "metrics.hpp"
#include "patterns.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ordpat {

// Two series observed on a shared clock. Timestamps are optional; when
// present they are ISO dates, one per observation.
struct paired_series {
    std::vector<double> x, y;
    std::vector<std::string> timestamps;

    paired_series() = default;
    paired_series(std::vector<double> x_vals, std::vector<double> y_vals,
                  std::vector<std::string> stamps = {});
    std::size_t size() const { return x.size(); }
};

// The (X, -Y) channel of a pair.
paired_series negated_y(const paired_series& p);

// Per-window coincidence indicators 1{Pi_x_i == Pi_y_i}, i = 1..n-h; the
// summand series of estimate_p and of the break statistic.
std::vector<double> coincidence_indicators(const paired_series& p, int h,
                                           bool allow_large_h = false);

// Fraction of the n-h windows whose patterns coincide, with divisor n (so
// the n-h summands never average to more than (n-h)/n).
double estimate_p(const paired_series& p, int h, bool allow_large_h = false);

// Empirical pattern distribution of one series, indexed by lexicographic
// pattern rank, divisor n. Sums to (n-h)/n, not 1.
std::vector<double> estimate_q_marginals(std::span<const double> series, int h,
                                         bool allow_large_h = false);

// Plug-in coincidence probability under independence: the inner product of
// the two marginal vectors.
double estimate_q(const paired_series& p, int h, bool allow_large_h = false);

// Coincidence with the reflected patterns of Y; computed by negating Y and
// delegating, so estimate_r(X,Y) == estimate_p(X,-Y) holds exactly.
double estimate_r(const paired_series& p, int h, bool allow_large_h = false);
double estimate_s(const paired_series& p, int h, bool allow_large_h = false);

// Standardized coefficient ((p-q)/(1-q))^+ - ((r-s)/(1-s))^+, with a term
// defined as 1 when its denominator vanishes (q = 1 resp. s = 1).
double ord_coefficient(double p, double q, double r, double s);

struct dependence_values {
    int h = 0;
    std::size_t n = 0;
    double p = 0, q = 0, r = 0, s = 0, ord = 0;
};
dependence_values estimate_dependence(const paired_series& p, int h, bool allow_large_h = false);

// Per-window weighted distances w(d(Pi_x_i, Pi_y_i)), i = 1..n-h. Shared by
// the weighted estimators and the weighted break statistic.
std::vector<double> weight_series(const paired_series& p, int h, const pattern_metric& metric,
                                  const weight_function& weight, bool allow_large_h = false);

struct awopd_values {
    int h = 0;
    std::size_t n = 0;
    double awopd_value = 0;      // un-normalized weighted sum over windows
    double comparison_value = 0; // (n-h) * plug-in value with unit-mass marginals
    double d_hat = 0;            // (1/n) sum - cross term with divisor-n marginals
    std::uint64_t coincidences = 0;
};
awopd_values estimate_awopd(const paired_series& p, int h, const pattern_metric& metric,
                            const weight_function& weight, bool allow_large_h = false);

} // namespace ordpat
