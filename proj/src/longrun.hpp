#pragma once

#include "estimators.hpp"
#include "metrics.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ordpat {

// Matrix-valued estimators allocate dense 2(h+1)! x 2(h+1)! storage; the
// default guard keeps that at 240x240 (h = 4). The override admits h = 5
// (1440x1440, ~17 MB); beyond that the allocation is refused outright.
inline constexpr int default_max_matrix_h = 4;
inline constexpr int absolute_max_matrix_h = 5;

double bartlett_kernel(double x); // (1 - |x|) on [-1, 1], 0 outside

// HAC kernel and bandwidth choice. An empty kernel means Bartlett. A set
// bandwidth must be positive; 0 (the default) selects the ln(n) rule with n
// the divisor sample size, not the number of summands.
struct kernel_config {
    std::function<double(double)> kernel;
    double bandwidth = 0.0;

    std::string name() const { return kernel ? "user" : "bartlett"; }
    double eval(double x) const { return kernel ? kernel(x) : bartlett_kernel(x); }
    double bandwidth_for(std::size_t divisor_n) const;
    // k(0) = 1, symmetry and range [0,1] checked on a probe grid.
    void validate() const;
};

struct variance_estimate {
    double value = 0.0;
    bool clamped = false; // raw quadratic form was negative and was clamped to 0
    double bandwidth = 0.0;
};

// (1/divisor_n) sum_{i,j} k((i-j)/b) z_i z_j for pre-demeaned summands z,
// evaluated over the band |i-j| <= ceil(b) only. Exact for kernels vanishing
// outside [-1, 1]; the Bartlett kernel additionally guarantees a
// nonnegative value up to rounding.
variance_estimate longrun_variance(std::span<const double> z, std::size_t divisor_n,
                                   const kernel_config& cfg = {});

// Long-run variance of the pattern-coincidence indicators demeaned by the
// divisor-n coincidence frequency; the studentizer of the break statistic.
variance_estimate sigma2_p(const paired_series& p, int h, const kernel_config& cfg = {},
                           bool allow_large_h = false);

struct cov_matrix {
    std::size_t dim = 0;
    std::vector<double> data; // row-major dim x dim
    double bandwidth = 0.0;
    double at(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
};

// Kernel-weighted covariance matrix of the demeaned one-hot pattern
// indicators of both series, dimension 2(h+1)!, divisor n. Block order:
// X patterns first, then Y patterns, each indexed by lexicographic rank.
cov_matrix longrun_cov_matrix(const paired_series& p, int h, const kernel_config& cfg = {},
                              bool allow_large_h = false);

// Delta-method long-run variance for the plug-in coincidence probability
// q-hat: the quadratic form of the covariance matrix with the gradient
// (q_Y, q_X). Computed by projecting onto the gradient first, so it costs
// O(m * bandwidth) rather than a matrix build.
variance_estimate gamma2_q(const paired_series& p, int h, const kernel_config& cfg = {},
                           bool allow_large_h = false);

// Long-run variance of the demeaned per-window weighted distances; the
// studentizer of the weighted break statistic.
variance_estimate awopd_a_hat(const paired_series& p, int h, const pattern_metric& metric,
                              const weight_function& weight, const kernel_config& cfg = {},
                              bool allow_large_h = false);

// Delta-method long-run variance for the weighted dependence estimate,
// projecting the stacked series (weighted distances, one-hot X, one-hot Y)
// onto (1, -grad_X, -grad_Y).
variance_estimate awopd_gamma2(const paired_series& p, int h, const pattern_metric& metric,
                               const weight_function& weight, const kernel_config& cfg = {},
                               bool allow_large_h = false);

} // namespace ordpat
