#include "simulate.hpp"

#include "breaktest.hpp"
#include "errors.hpp"
#include "stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <random>
#include <thread>

namespace ordpat {

std::string innovation_name(innovation_kind k) {
    switch (k) {
    case innovation_kind::gaussian: return "gaussian";
    case innovation_kind::student_t: return "student_t";
    case innovation_kind::cauchy: return "cauchy";
    }
    return "?";
}

innovation_kind innovation_by_name(const std::string& name) {
    if (name == "gaussian" || name == "normal") return innovation_kind::gaussian;
    if (name == "student_t" || name == "student-t" || name == "t") return innovation_kind::student_t;
    if (name == "cauchy") return innovation_kind::cauchy;
    throw invalid_input("unknown innovation '" + name + "' (expected gaussian, student_t or cauchy)");
}

void ar1_config::validate() const {
    if (!std::isfinite(phi) || std::abs(phi) >= 1.0)
        throw invalid_input("AR coefficient phi must satisfy |phi| < 1, got " + std::to_string(phi));
    if (!std::isfinite(rho) || rho < 0.0 || rho > 1.0)
        throw invalid_input("innovation correlation rho must lie in [0,1], got " + std::to_string(rho));
    if (innovation == innovation_kind::student_t && !(t_df > 0.0))
        throw invalid_input("student_t degrees of freedom must be positive");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

// One generator shared by both innovation streams of one path, so that a
// break spec degenerating to the pre configuration reproduces the unbroken
// path exactly.
class innovation_source {
public:
    innovation_source(std::uint64_t seed, const ar1_config& cfg)
        : eng_(seed), kind_(cfg.innovation), student_(cfg.t_df) {}

    double draw() {
        switch (kind_) {
        case innovation_kind::gaussian: return normal_(eng_);
        case innovation_kind::student_t: return student_(eng_);
        case innovation_kind::cauchy: return cauchy_(eng_);
        }
        return 0.0;
    }

private:
    std::mt19937_64 eng_;
    innovation_kind kind_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::student_t_distribution<double> student_;
    std::cauchy_distribution<double> cauchy_{0.0, 1.0};
};

paired_series generate(const ar1_config& pre, const break_spec* spec, std::size_t n,
                       std::uint64_t seed) {
    pre.validate();
    if (n == 0) throw invalid_input("cannot generate an empty pair");
    if (spec) {
        spec->post.validate();
        if (spec->change_at < 1 || spec->change_at > n)
            throw invalid_input("change point must lie in [1, n], got " +
                                std::to_string(spec->change_at));
        if (spec->post.innovation != pre.innovation ||
            (pre.innovation == innovation_kind::student_t && spec->post.t_df != pre.t_df))
            throw invalid_input("a break may change phi and rho only; the innovation law must match");
    }

    innovation_source src(seed, pre);
    std::vector<double> xs, ys;
    xs.reserve(n);
    ys.reserve(n);
    double x = 0.0, y = 0.0;
    const std::size_t total = pre.burn_in + n;
    for (std::size_t t = 0; t < total; ++t) {
        const bool post = spec && t >= pre.burn_in && (t - pre.burn_in + 1) >= spec->change_at;
        const ar1_config& cfg = post ? spec->post : pre;
        const double e = src.draw();
        const double ep = src.draw();
        const double eta = cfg.rho * e + std::sqrt(1.0 - cfg.rho * cfg.rho) * ep;
        x = cfg.phi * x + e;
        y = cfg.phi * y + eta;
        if (t >= pre.burn_in) {
            xs.push_back(x);
            ys.push_back(y);
        }
    }
    return paired_series(std::move(xs), std::move(ys));
}

} // namespace

paired_series gen_ar1_pair(const ar1_config& cfg, std::size_t n, std::uint64_t seed) {
    return generate(cfg, nullptr, n, seed);
}

paired_series gen_with_break(const ar1_config& pre, const break_spec& spec, std::size_t n,
                             std::uint64_t seed) {
    return generate(pre, &spec, n, seed);
}

paired_series noise_overlay(const paired_series& p, std::uint64_t seed) {
    const double sd = std::sqrt(sample_variance(p.x));
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    paired_series out = p;
    for (double& v : out.x) v += sd * normal(eng);
    return out;
}

calibration_result calibrate_rho(const ar1_config& base, int h, double target_p,
                                 std::uint64_t seed, std::size_t windows_per_eval, double tol) {
    base.validate();
    if (!(target_p > 0.0 && target_p <= 1.0))
        throw invalid_input("calibration target must lie in (0,1], got " + std::to_string(target_p));
    if (windows_per_eval < 100) throw invalid_input("calibration needs at least 100 windows");
    if (!(tol > 0.0)) throw invalid_input("calibration tolerance must be positive");

    const std::size_t len = windows_per_eval + static_cast<std::size_t>(h);
    int evaluations = 0;
    auto eval = [&](double rho) {
        ar1_config cfg = base;
        cfg.rho = rho;
        ++evaluations;
        return estimate_p(gen_ar1_pair(cfg, len, seed), h);
    };

    const double p_lo = eval(0.0);
    const double p_hi = eval(1.0);
    auto finish = [&](double rho, double achieved) {
        calibration_result out;
        out.rho = rho;
        out.achieved_p = achieved;
        out.windows = windows_per_eval;
        out.evaluations = evaluations;
        ar1_config cfg = base;
        cfg.rho = rho;
        const auto pair = gen_ar1_pair(cfg, len, seed);
        const auto ind = coincidence_indicators(pair, h, true);
        const double n = static_cast<double>(pair.size());
        double sum = 0.0;
        for (double v : ind) sum += v;
        std::vector<double> z(ind.size());
        for (std::size_t i = 0; i < ind.size(); ++i) z[i] = ind[i] - sum / n;
        out.mc_se = std::sqrt(longrun_variance(z, pair.size()).value / n);
        return out;
    };

    if (target_p > p_hi + tol || target_p < p_lo - tol)
        throw invalid_input("calibration target " + std::to_string(target_p) +
                            " outside the achievable range [" + std::to_string(p_lo) + ", " +
                            std::to_string(p_hi) + "]");
    if (std::abs(target_p - p_lo) <= tol) return finish(0.0, p_lo);
    if (target_p >= p_hi - tol) return finish(1.0, p_hi);

    double lo = 0.0, hi = 1.0;
    double best_rho = 0.5, best_p = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double pm = eval(mid);
        if (std::abs(pm - target_p) < std::abs(best_p - target_p)) {
            best_rho = mid;
            best_p = pm;
        }
        if (std::abs(pm - target_p) <= tol) return finish(mid, pm);
        if (pm < target_p)
            lo = mid;
        else
            hi = mid;
    }
    return finish(best_rho, best_p);
}

std::string study_kind_name(study_kind k) {
    switch (k) {
    case study_kind::null_size: return "null_size";
    case study_kind::power_curve: return "power_curve";
    case study_kind::power_table: return "power_table";
    case study_kind::clt_check: return "clt_check";
    }
    return "?";
}

study_kind study_kind_by_name(const std::string& name) {
    if (name == "null_size") return study_kind::null_size;
    if (name == "power_curve") return study_kind::power_curve;
    if (name == "power_table") return study_kind::power_table;
    if (name == "clt_check") return study_kind::clt_check;
    throw invalid_input("unknown study kind '" + name +
                        "' (expected null_size, power_curve, power_table or clt_check)");
}

int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 256);
    if (const char* env = std::getenv("ORDPAT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 256) return static_cast<int>(v);
        throw invalid_input("ORDPAT_THREADS must be an integer in [1,256], got '" +
                            std::string(env) + "'");
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 256u));
}

namespace {

// Static partition; each index writes only its own result slot, so the
// outcome is independent of the thread count.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const int t = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (t == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    pool.reserve(static_cast<std::size_t>(t));
    for (int w = 0; w < t; ++w) {
        const std::size_t lo = count * static_cast<std::size_t>(w) / static_cast<std::size_t>(t);
        const std::size_t hi = count * static_cast<std::size_t>(w + 1) / static_cast<std::size_t>(t);
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

constexpr std::uint64_t calibration_stream = 1ULL << 52;
constexpr std::uint64_t aux_stream = 1ULL << 53;

std::uint64_t cell_stream(std::size_t cell, std::size_t rep) {
    return (static_cast<std::uint64_t>(cell) << 32) | static_cast<std::uint64_t>(rep);
}

struct resolved_alternative {
    double rho = 0.0;
    double p = std::numeric_limits<double>::quiet_NaN(); // calibrated target when known
};

double run_statistic(const study_params& params, const paired_series& pair) {
    if (params.metric && params.weight) {
        return w_statistic(pair, params.h, *params.metric, *params.weight, params.kernel,
                           params.level, false, params.allow_large_h)
            .statistic;
    }
    return t_statistic(pair, params.h, params.kernel, params.level, params.allow_large_h).statistic;
}

} // namespace

study_report run_study(const study_params& params) {
    const auto t_start = std::chrono::steady_clock::now();
    params.base.validate();
    if (params.replications == 0) throw invalid_input("study needs at least one replication");
    if (!(params.level > 0.0 && params.level < 1.0)) throw invalid_input("level must lie in (0,1)");
    if (static_cast<bool>(params.metric) != static_cast<bool>(params.weight))
        throw invalid_input("weighted studies need both a metric and a weight");
    const int threads = resolve_threads(params.threads);

    study_report report;
    report.kind = params.kind;
    report.h = params.h;
    report.level = params.level;
    report.seed = params.seed;
    report.innovation = innovation_name(params.base.innovation);
    report.phi = params.base.phi;
    report.statistic = params.metric ? "w" : "t";
    report.threads_used = threads;

    // Pre-break configuration, calibrated when a target is given.
    ar1_config pre = params.base;
    resolved_alternative pre_alt{pre.rho, std::numeric_limits<double>::quiet_NaN()};
    if (params.target_p) {
        const auto cal = calibrate_rho(params.base, params.h, *params.target_p,
                                       derive_seed(params.seed, calibration_stream),
                                       params.calibration_windows, params.calibration_tol);
        pre.rho = cal.rho;
        pre_alt = {cal.rho, cal.achieved_p};
    }

    auto calibrated_post = [&](double target, std::size_t idx) {
        const auto cal = calibrate_rho(params.base, params.h, target,
                                       derive_seed(params.seed, calibration_stream + 1 + idx),
                                       params.calibration_windows, params.calibration_tol);
        return resolved_alternative{cal.rho, cal.achieved_p};
    };

    const double crit = kolmogorov_quantile(1.0 - params.level);

    auto run_cell = [&](std::size_t cell_idx, std::size_t n, std::size_t break_at,
                        const resolved_alternative& post, std::vector<double>* sample_out) {
        const auto c_start = std::chrono::steady_clock::now();
        study_cell cell;
        cell.n = n;
        cell.break_at = break_at;
        cell.pre_rho = pre.rho;
        cell.pre_p = pre_alt.p;
        cell.post_rho = break_at ? post.rho : pre.rho;
        cell.post_p = break_at ? post.p : pre_alt.p;
        cell.replications = params.replications;

        std::vector<double> stats(params.replications);
        parallel_for(params.replications, threads, [&](std::size_t rep) {
            const std::uint64_t seed = derive_seed(params.seed, cell_stream(cell_idx, rep));
            paired_series pair = [&] {
                if (break_at) {
                    break_spec spec;
                    spec.change_at = break_at + 1;
                    spec.post = pre;
                    spec.post.rho = post.rho;
                    return gen_with_break(pre, spec, n, seed);
                }
                return gen_ar1_pair(pre, n, seed);
            }();
            stats[rep] = run_statistic(params, pair);
        });
        for (double s : stats)
            if (s > crit) ++cell.rejections;
        cell.rate = static_cast<double>(cell.rejections) / static_cast<double>(cell.replications);
        cell.se = std::sqrt(cell.rate * (1.0 - cell.rate) / static_cast<double>(cell.replications));
        cell.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - c_start).count();
        if (sample_out) *sample_out = std::move(stats);
        report.cells.push_back(cell);
    };

    switch (params.kind) {
    case study_kind::null_size: {
        run_cell(0, params.n, 0, pre_alt, &report.sample);
        report.ks_reference = "kolmogorov";
        const auto ks = ks_gof(report.sample, [](double x) { return kolmogorov_cdf(x); });
        report.ks_statistic = ks.statistic;
        report.ks_p_value = ks.p_value;
        report.sample_mean = sample_mean(report.sample);
        report.sample_sd = std::sqrt(sample_variance(report.sample));
        break;
    }
    case study_kind::clt_check: {
        double center = pre_alt.p;
        if (!params.target_p) {
            // Direct rho: estimate the centering value by one long evaluation.
            ar1_config cfg = pre;
            const std::size_t len = params.calibration_windows + static_cast<std::size_t>(params.h);
            center = estimate_p(gen_ar1_pair(cfg, len, derive_seed(params.seed, aux_stream)),
                                params.h, params.allow_large_h);
        }
        report.center_p = center;
        const double z_crit = normal_quantile(1.0 - params.level / 2.0);
        std::vector<double> zs(params.replications);
        std::vector<char> misses(params.replications, 0);
        parallel_for(params.replications, threads, [&](std::size_t rep) {
            const std::uint64_t seed = derive_seed(params.seed, cell_stream(0, rep));
            const paired_series pair = gen_ar1_pair(pre, params.n, seed);
            const double p_hat = estimate_p(pair, params.h, params.allow_large_h);
            const auto var = sigma2_p(pair, params.h, params.kernel, params.allow_large_h);
            if (var.value <= 0.0) throw degenerate_error("zero long-run variance in a replication");
            const double z = std::sqrt(static_cast<double>(params.n)) * (p_hat - center) /
                             std::sqrt(var.value);
            zs[rep] = z;
            misses[rep] = std::abs(z) > z_crit ? 1 : 0;
        });
        study_cell cell;
        cell.n = params.n;
        cell.pre_rho = pre.rho;
        cell.pre_p = center;
        cell.post_rho = pre.rho;
        cell.post_p = center;
        cell.replications = params.replications;
        for (char m : misses) cell.rejections += m;
        cell.rate = static_cast<double>(cell.rejections) / static_cast<double>(cell.replications);
        cell.se = std::sqrt(cell.rate * (1.0 - cell.rate) / static_cast<double>(cell.replications));
        report.cells.push_back(cell);
        report.sample = std::move(zs);
        report.ks_reference = "normal";
        const auto ks = ks_gof(report.sample, [](double x) { return normal_cdf(x); });
        report.ks_statistic = ks.statistic;
        report.ks_p_value = ks.p_value;
        report.sample_mean = sample_mean(report.sample);
        report.sample_sd = std::sqrt(sample_variance(report.sample));
        break;
    }
    case study_kind::power_curve: {
        const std::size_t break_at = params.break_at.value_or(params.n / 2);
        if (break_at < 1 || break_at >= params.n)
            throw invalid_input("break position must lie in [1, n)");
        std::vector<resolved_alternative> alts;
        if (!params.post_p_grid.empty()) {
            for (std::size_t i = 0; i < params.post_p_grid.size(); ++i)
                alts.push_back(calibrated_post(params.post_p_grid[i], i));
        } else if (!params.post_rho_grid.empty()) {
            for (double r : params.post_rho_grid)
                alts.push_back({r, std::numeric_limits<double>::quiet_NaN()});
        } else {
            throw invalid_input("power_curve needs post_p_grid or post_rho_grid");
        }
        for (std::size_t i = 0; i < alts.size(); ++i)
            run_cell(i, params.n, break_at, alts[i], nullptr);
        break;
    }
    case study_kind::power_table: {
        resolved_alternative post;
        if (params.post_target_p)
            post = calibrated_post(*params.post_target_p, 0);
        else if (params.post_rho)
            post = {*params.post_rho, std::numeric_limits<double>::quiet_NaN()};
        else
            throw invalid_input("power_table needs post_target_p or post_rho");
        std::vector<std::size_t> ns = params.n_values.empty()
                                          ? std::vector<std::size_t>{params.n}
                                          : params.n_values;
        std::vector<double> fractions = params.break_fractions.empty()
                                            ? std::vector<double>{0.25, 1.0 / 3.0, 0.5}
                                            : params.break_fractions;
        std::size_t cell_idx = 0;
        for (std::size_t n : ns) {
            for (double f : fractions) {
                if (!(f > 0.0 && f < 1.0)) throw invalid_input("break fractions must lie in (0,1)");
                const auto break_at = static_cast<std::size_t>(std::llround(f * static_cast<double>(n)));
                if (break_at < 1 || break_at >= n)
                    throw invalid_input("break fraction " + std::to_string(f) +
                                        " yields an invalid break position for n = " + std::to_string(n));
                run_cell(cell_idx++, n, break_at, post, nullptr);
            }
        }
        break;
    }
    }

    report.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace ordpat
