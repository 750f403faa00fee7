#pragma once

#include "estimators.hpp"
#include "longrun.hpp"
#include "metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ordpat {

enum class innovation_kind { gaussian, student_t, cauchy };
std::string innovation_name(innovation_kind k);
innovation_kind innovation_by_name(const std::string& name);

// AR(1) pair: X_t = phi X_{t-1} + eps_t, Y_t = phi Y_{t-1} + eta_t with
// eta_t = rho eps_t + sqrt(1-rho^2) eps'_t, eps and eps' i.i.d. from the
// innovation law. Both components start at 0 and discard burn_in steps.
struct ar1_config {
    double phi = 0.0;
    double rho = 0.0;
    innovation_kind innovation = innovation_kind::gaussian;
    double t_df = 2.0; // student_t only
    std::size_t burn_in = 1000;

    void validate() const; // |phi| < 1, rho in [0,1], t_df > 0
};

// First observation index (1-based) governed by the post configuration.
// State carries across the change point; only phi and rho may change.
struct break_spec {
    std::size_t change_at = 0;
    ar1_config post;
};

// Deterministic per-stream seed derivation (SplitMix64 scramble of
// master + (stream+1) * golden gamma). Fixed master seed and stream id give
// the same derived seed on every run and thread count.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

paired_series gen_ar1_pair(const ar1_config& cfg, std::size_t n, std::uint64_t seed);
paired_series gen_with_break(const ar1_config& pre, const break_spec& spec, std::size_t n,
                             std::uint64_t seed);

// X plus centered Gaussian noise whose variance equals the sample variance
// of X; Y and timestamps unchanged.
paired_series noise_overlay(const paired_series& p, std::uint64_t seed);

struct calibration_result {
    double rho = 0.0;
    double achieved_p = 0.0;
    double mc_se = 0.0; // long-run standard error of the final evaluation
    std::size_t windows = 0;
    int evaluations = 0;
};

// Monotone bisection for the rho achieving a target coincidence
// probability, evaluated by Monte Carlo on windows_per_eval windows with
// common random numbers across evaluations. Boundary targets resolve to
// rho = 0 or rho = 1; unreachable targets are invalid-input errors naming
// the achievable range.
calibration_result calibrate_rho(const ar1_config& base, int h, double target_p,
                                 std::uint64_t seed, std::size_t windows_per_eval = 1000000,
                                 double tol = 5e-4);

enum class study_kind { null_size, power_curve, power_table, clt_check };
std::string study_kind_name(study_kind k);
study_kind study_kind_by_name(const std::string& name);

struct study_params {
    study_kind kind = study_kind::null_size;
    std::size_t n = 1000;
    int h = 2;
    std::size_t replications = 1000;
    double level = 0.05;
    ar1_config base;
    std::optional<double> target_p;      // calibrate base.rho to this
    std::optional<double> post_rho;      // break alternative, direct
    std::optional<double> post_target_p; // break alternative, calibrated
    std::optional<std::size_t> break_at; // pre-regime length; change point is break_at + 1
    std::vector<std::size_t> n_values;       // power_table; empty: {n}
    std::vector<double> break_fractions;     // power_table; empty: {1/4, 1/3, 1/2}
    std::vector<double> post_p_grid;         // power_curve calibrated targets
    std::vector<double> post_rho_grid;       // power_curve direct alternative
    std::uint64_t seed = 1;
    std::size_t calibration_windows = 1000000;
    double calibration_tol = 5e-4;
    int threads = 0; // 0: ORDPAT_THREADS env var, else hardware concurrency
    kernel_config kernel;
    bool allow_large_h = false;
    // Both set: replications use the weighted statistic instead of the
    // coincidence statistic. Non-owning.
    const pattern_metric* metric = nullptr;
    const weight_function* weight = nullptr;
};

struct study_cell {
    std::size_t n = 0;
    std::size_t break_at = 0; // 0: no break
    double pre_rho = 0.0, post_rho = 0.0;
    double pre_p = 0.0, post_p = 0.0; // calibrated targets where known, else NaN
    std::size_t replications = 0, rejections = 0;
    double rate = 0.0, se = 0.0;
    double runtime_s = 0.0;
};

struct study_report {
    study_kind kind = study_kind::null_size;
    int h = 0;
    double level = 0.0;
    std::uint64_t seed = 0;
    std::string innovation;
    double phi = 0.0;
    std::string statistic; // "t" or "w"
    int threads_used = 1;
    std::vector<study_cell> cells;
    // null_size: studentized statistics; clt_check: sqrt(n)(p-hat - p*)/sigma-hat.
    std::vector<double> sample;
    double ks_statistic = 0.0, ks_p_value = 0.0;
    std::string ks_reference; // "kolmogorov" | "normal" | ""
    double sample_mean = 0.0, sample_sd = 0.0;
    double center_p = 0.0; // clt_check centering value
    double runtime_s = 0.0;
};

study_report run_study(const study_params& params);

int resolve_threads(int requested);

} // namespace ordpat
