#pragma once

#include "estimators.hpp"
#include "longrun.hpp"
#include "metrics.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ordpat {

// Kolmogorov distribution K(x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2),
// 0 for x <= 0. The series is summed to `truncation` terms (>= 10) with an
// early exit once terms drop below 1e-17; the default is accurate to 1e-12
// over the quantile domain.
double kolmogorov_cdf(double x, int truncation = 100);

// Inverse of the CDF by bisection on [0.1, 5] to 1e-9. p in (0,1).
// The level-alpha critical value is kolmogorov_quantile(1 - alpha).
double kolmogorov_quantile(double p, int truncation = 100);

// Element k (k = 1..m) is |sum_{i<=k} (z_i - mean)| / (sqrt(divisor_n) * scale).
std::vector<double> cusum_trajectory(std::span<const double> z, double mean,
                                     std::size_t divisor_n, double scale);

struct break_test_result {
    double statistic = 0.0;      // studentized trajectory maximum
    double raw_statistic = 0.0;  // un-studentized (scale 1)
    double sigma = 0.0;          // studentizer: sqrt of the long-run variance
    double critical_value = 0.0;
    double p_value = 0.0;
    bool reject = false;
    std::size_t argmax_k = 0;    // 1-based position of the trajectory maximum
    double level = 0.0;
    double bandwidth = 0.0;
    bool variance_clamped = false;
    std::vector<double> trajectory; // studentized, length n-h
};

// CUSUM test on the pattern-coincidence indicators, studentized by the
// long-run standard deviation, compared against Kolmogorov critical values.
// A constant indicator series or a vanishing variance is a degenerate-
// statistics error carrying the raw statistic in its message.
break_test_result t_statistic(const paired_series& p, int h, const kernel_config& cfg = {},
                              double level = 0.05, bool allow_large_h = false);

// Same test on the per-window weighted distances, studentized by sqrt of
// the weight-series long-run variance. With the discrete metric and the
// indicator weight this reproduces t_statistic bit for bit. one_sided drops
// the absolute value (trajectory keeps its sign, the statistic is the
// largest signed excursion, floored at 0).
break_test_result w_statistic(const paired_series& p, int h, const pattern_metric& metric,
                              const weight_function& weight, const kernel_config& cfg = {},
                              double level = 0.05, bool one_sided = false,
                              bool allow_large_h = false);

} // namespace ordpat
