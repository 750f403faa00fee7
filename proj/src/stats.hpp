#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ordpat {

double normal_cdf(double x);
// Inverse standard normal CDF, p in (0,1). Acklam's rational approximation
// with one Halley refinement step; relative error well below 1e-13.
double normal_quantile(double p);

double sample_mean(std::span<const double> v);
double sample_variance(std::span<const double> v); // denominator n-1

struct ks_result {
    double statistic = 0.0; // sup |F_n - F|
    double p_value = 0.0;   // asymptotic, 1 - K(sqrt(n) * D)
};
// One-sample Kolmogorov-Smirnov goodness of fit against a continuous CDF.
ks_result ks_gof(std::vector<double> sample, const std::function<double(double)>& cdf);

} // namespace ordpat
