#include "ordpat.h"

#include "breaktest.hpp"
#include "dataio.hpp"
#include "errors.hpp"
#include "estimators.hpp"
#include "longrun.hpp"
#include "metrics.hpp"
#include "patterns.hpp"
#include "simulate.hpp"
#include "stats.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

using nlohmann::json;

struct ordpat_series {
    ordpat::csv_series s;
};

struct ordpat_pair {
    ordpat::paired_series p;
};

struct ordpat_metric {
    ordpat::pattern_metric m;
};

struct ordpat_weight {
    ordpat::weight_function w;
};

struct ordpat_break_result {
    ordpat::break_test_result r;
};

namespace {

thread_local std::string tl_error;

ordpat_status fail(ordpat_status st, const char* msg) {
    tl_error = msg ? msg : "";
    return st;
}

// Every API entry funnels through here so the exception -> status mapping
// stays in one place.
template <typename Fn>
ordpat_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        tl_error.clear();
        return ORDPAT_OK;
    } catch (const ordpat::invalid_input& e) {
        return fail(ORDPAT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const ordpat::degenerate_error& e) {
        return fail(ORDPAT_ERR_DEGENERATE, e.what());
    } catch (const ordpat::data_error& e) {
        return fail(ORDPAT_ERR_DATA, e.what());
    } catch (const std::bad_alloc&) {
        return fail(ORDPAT_ERR_NOMEM, "out of memory");
    } catch (const std::exception& e) {
        return fail(ORDPAT_ERR_INVALID_ARGUMENT, e.what());
    }
}

void require(bool cond, const std::string& msg) {
    if (!cond) throw ordpat::invalid_input(msg);
}

template <typename T>
void require_out(T* ptr, const char* name) {
    require(ptr != nullptr, std::string("null pointer: ") + name);
}

struct resolved_options {
    int h = 2;
    double level = 0.05;
    bool allow_large_h = false;
    ordpat::kernel_config kernel;
};

resolved_options resolve(const ordpat_options* opt) {
    resolved_options r;
    if (!opt) return r;
    r.h = opt->h;
    r.level = opt->level;
    r.allow_large_h = opt->allow_large_h != 0;
    if (opt->bandwidth > 0) r.kernel.bandwidth = opt->bandwidth;
    if (opt->kernel) {
        ordpat_kernel_fn fn = opt->kernel;
        void* ctx = opt->kernel_ctx;
        r.kernel.kernel = [fn, ctx](double x) { return fn(x, ctx); };
        r.kernel.validate();
    }
    return r;
}

void require_level(double level) {
    require(level > 0 && level < 1, "level must lie in (0,1)");
}

int matrix_cap(bool allow_large_h) {
    return allow_large_h ? ordpat::absolute_max_matrix_h : ordpat::default_max_matrix_h;
}

ordpat::ar1_config convert(const ordpat_ar1_config* cfg) {
    require_out(cfg, "cfg");
    ordpat::ar1_config c;
    c.phi = cfg->phi;
    c.rho = cfg->rho;
    switch (cfg->innovation) {
    case ORDPAT_INNOV_GAUSSIAN: c.innovation = ordpat::innovation_kind::gaussian; break;
    case ORDPAT_INNOV_STUDENT_T: c.innovation = ordpat::innovation_kind::student_t; break;
    case ORDPAT_INNOV_CAUCHY: c.innovation = ordpat::innovation_kind::cauchy; break;
    default: throw ordpat::invalid_input("unknown innovation code " + std::to_string(cfg->innovation));
    }
    c.t_df = cfg->t_df;
    c.burn_in = cfg->burn_in;
    return c;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* ordpat_version(void) { return "1.0.0"; }

const char* ordpat_last_error(void) { return tl_error.c_str(); }

void ordpat_options_init(ordpat_options* opt) {
    if (!opt) return;
    opt->h = 2;
    opt->level = 0.05;
    opt->bandwidth = 0.0;
    opt->allow_large_h = 0;
    opt->kernel = nullptr;
    opt->kernel_ctx = nullptr;
}

/* ------------------------------------------------------ series and pairs */

ordpat_status ordpat_series_load_csv(const char* path, const char* date_column,
                                     const char* value_column, char delimiter, int sort_by_date,
                                     ordpat_series** out) {
    return guarded([&] {
        require_out(out, "out");
        require(path != nullptr, "null pointer: path");
        require(value_column != nullptr, "null pointer: value_column");
        ordpat::csv_options opt;
        if (date_column && *date_column) opt.date_column = date_column;
        opt.value_column = value_column;
        if (delimiter) opt.delimiter = delimiter;
        opt.sort_by_date = sort_by_date != 0;
        *out = new ordpat_series{ordpat::load_csv(path, opt)};
    });
}

void ordpat_series_destroy(ordpat_series* s) { delete s; }

size_t ordpat_series_length(const ordpat_series* s) { return s ? s->s.values.size() : 0; }

ordpat_status ordpat_pair_create(const double* x, const double* y, size_t n, ordpat_pair** out) {
    return guarded([&] {
        require_out(out, "out");
        require(x != nullptr, "null pointer: x");
        require(y != nullptr, "null pointer: y");
        require(n > 0, "empty pair");
        *out = new ordpat_pair{
            ordpat::paired_series(std::vector<double>(x, x + n), std::vector<double>(y, y + n))};
    });
}

ordpat_status ordpat_pair_align(const ordpat_series* x, const ordpat_series* y, ordpat_pair** out,
                                size_t* dropped_x, size_t* dropped_y) {
    return guarded([&] {
        require_out(out, "out");
        require(x != nullptr, "null pointer: x");
        require(y != nullptr, "null pointer: y");
        auto res = ordpat::align_inner(x->s, y->s);
        if (dropped_x) *dropped_x = res.dropped_x;
        if (dropped_y) *dropped_y = res.dropped_y;
        *out = new ordpat_pair{std::move(res.pair)};
    });
}

void ordpat_pair_destroy(ordpat_pair* p) { delete p; }

size_t ordpat_pair_length(const ordpat_pair* p) { return p ? p->p.size() : 0; }

ordpat_status ordpat_pair_negate_y(const ordpat_pair* p, ordpat_pair** out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        *out = new ordpat_pair{ordpat::negated_y(p->p)};
    });
}

ordpat_status ordpat_pair_slice_dates(const ordpat_pair* p, const char* start_date,
                                      const char* end_date, ordpat_pair** out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        *out = new ordpat_pair{ordpat::slice_dates(p->p, start_date ? start_date : "",
                                                   end_date ? end_date : "")};
    });
}

ordpat_status ordpat_pair_slice_count(const ordpat_pair* p, const char* start_date, size_t count,
                                      ordpat_pair** out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        *out = new ordpat_pair{ordpat::slice_count(p->p, start_date ? start_date : "", count)};
    });
}

ordpat_status ordpat_pair_values(const ordpat_pair* p, double* x_out, double* y_out) {
    return guarded([&] {
        require(p != nullptr, "null pointer: pair");
        if (x_out) std::memcpy(x_out, p->p.x.data(), p->p.x.size() * sizeof(double));
        if (y_out) std::memcpy(y_out, p->p.y.data(), p->p.y.size() * sizeof(double));
    });
}

ordpat_status ordpat_pair_date(const ordpat_pair* p, size_t index, char* buf, size_t bufsize) {
    return guarded([&] {
        require(p != nullptr, "null pointer: pair");
        require(buf != nullptr, "null pointer: buf");
        require(!p->p.timestamps.empty(), "pair carries no dates");
        require(index < p->p.timestamps.size(),
                "index " + std::to_string(index) + " out of range for " +
                    std::to_string(p->p.timestamps.size()) + " observations");
        const std::string& d = p->p.timestamps[index];
        require(bufsize > d.size(), "buffer too small for date string");
        std::memcpy(buf, d.c_str(), d.size() + 1);
    });
}

ordpat_status ordpat_pair_write_csv(const ordpat_pair* p, const char* path, const char* x_name,
                                    const char* y_name) {
    return guarded([&] {
        require(p != nullptr, "null pointer: pair");
        require(path != nullptr, "null pointer: path");
        ordpat::write_pair_csv(path, p->p, x_name && *x_name ? x_name : "x",
                               y_name && *y_name ? y_name : "y");
    });
}

ordpat_status ordpat_pair_noise_overlay(const ordpat_pair* p, uint64_t seed, ordpat_pair** out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        *out = new ordpat_pair{ordpat::noise_overlay(p->p, seed)};
    });
}

/* ----------------------------------------------------- pattern utilities */

ordpat_status ordpat_pattern_of(const double* window, int len, int* order_out) {
    return guarded([&] {
        require(window != nullptr, "null pointer: window");
        require_out(order_out, "order_out");
        require(len >= 2, "window length must be at least 2");
        auto pat = ordpat::pattern::of_window(std::span<const double>(window, static_cast<size_t>(len)));
        std::memcpy(order_out, pat.order().data(), pat.order().size() * sizeof(int));
    });
}

ordpat_status ordpat_pattern_rank(const int* order, int len, uint64_t* rank_out) {
    return guarded([&] {
        require(order != nullptr, "null pointer: order");
        require_out(rank_out, "rank_out");
        require(len >= 2, "order length must be at least 2");
        ordpat::pattern pat(std::vector<int>(order, order + len));
        *rank_out = ordpat::pattern_rank(pat);
    });
}

ordpat_status ordpat_pattern_unrank(uint64_t rank, int h, int* order_out) {
    return guarded([&] {
        require_out(order_out, "order_out");
        auto pat = ordpat::pattern_unrank(rank, h);
        std::memcpy(order_out, pat.order().data(), pat.order().size() * sizeof(int));
    });
}

/* ------------------------------------------------------------ estimators */

ordpat_status ordpat_analyze(const ordpat_pair* p, const ordpat_options* opt,
                             ordpat_estimates* out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        const resolved_options ro = resolve(opt);
        require_level(ro.level);

        const auto dv = ordpat::estimate_dependence(p->p, ro.h, ro.allow_large_h);
        const auto s2 = ordpat::sigma2_p(p->p, ro.h, ro.kernel, ro.allow_large_h);

        const double nan = std::numeric_limits<double>::quiet_NaN();
        ordpat_estimates e;
        e.h = dv.h;
        e.n = dv.n;
        e.p_hat = dv.p;
        e.q_hat = dv.q;
        e.r_hat = dv.r;
        e.s_hat = dv.s;
        e.ord_hat = dv.ord;
        e.sigma2 = s2.value;
        e.sigma2_clamped = s2.clamped ? 1 : 0;
        e.gamma2 = nan;
        e.gamma2_clamped = 0;
        e.bandwidth = s2.bandwidth;
        e.level = ro.level;

        const double z = ordpat::normal_quantile(1.0 - ro.level / 2.0);
        const double root_n = std::sqrt(static_cast<double>(dv.n));
        e.se_p = std::sqrt(s2.value) / root_n;
        e.ci_p_lo = dv.p - z * e.se_p;
        e.ci_p_hi = dv.p + z * e.se_p;
        e.se_q = nan;
        e.ci_q_lo = nan;
        e.ci_q_hi = nan;

        if (ro.h <= matrix_cap(ro.allow_large_h)) {
            const auto g2 = ordpat::gamma2_q(p->p, ro.h, ro.kernel, ro.allow_large_h);
            e.gamma2 = g2.value;
            e.gamma2_clamped = g2.clamped ? 1 : 0;
            e.se_q = std::sqrt(g2.value) / root_n;
            e.ci_q_lo = dv.q - z * e.se_q;
            e.ci_q_hi = dv.q + z * e.se_q;
        }
        *out = e;
    });
}

/* --------------------------------------------------- metrics and weights */

ordpat_status ordpat_metric_create(const char* name, int h, ordpat_metric** out) {
    return guarded([&] {
        require_out(out, "out");
        require(name != nullptr, "null pointer: name");
        *out = new ordpat_metric{ordpat::pattern_metric::by_name(name, h)};
    });
}

ordpat_status ordpat_metric_from_json(const char* json_text, ordpat_metric** out) {
    return guarded([&] {
        require_out(out, "out");
        require(json_text != nullptr, "null pointer: json_text");
        auto doc = ordpat::parse_metric_weight_json(json_text);
        if (!doc.metric) throw ordpat::data_error("document has no \"distances\" section");
        *out = new ordpat_metric{std::move(*doc.metric)};
    });
}

void ordpat_metric_destroy(ordpat_metric* m) { delete m; }

ordpat_status ordpat_metric_eval(const ordpat_metric* m, const int* order_a, const int* order_b,
                                 int len, double* out) {
    return guarded([&] {
        require_out(out, "out");
        require(m != nullptr, "null pointer: metric");
        require(order_a != nullptr, "null pointer: order_a");
        require(order_b != nullptr, "null pointer: order_b");
        require(len >= 2, "order length must be at least 2");
        ordpat::pattern a(std::vector<int>(order_a, order_a + len));
        ordpat::pattern b(std::vector<int>(order_b, order_b + len));
        *out = m->m(a, b);
    });
}

ordpat_status ordpat_weight_create(const char* name, ordpat_weight** out) {
    return guarded([&] {
        require_out(out, "out");
        require(name != nullptr, "null pointer: name");
        *out = new ordpat_weight{ordpat::weight_function::preset(name)};
    });
}

ordpat_status ordpat_weight_from_json(const char* json_text, ordpat_weight** out) {
    return guarded([&] {
        require_out(out, "out");
        require(json_text != nullptr, "null pointer: json_text");
        auto doc = ordpat::parse_metric_weight_json(json_text);
        if (!doc.weight) throw ordpat::data_error("document has no \"weights\" section");
        *out = new ordpat_weight{std::move(*doc.weight)};
    });
}

void ordpat_weight_destroy(ordpat_weight* w) { delete w; }

ordpat_status ordpat_weight_eval(const ordpat_weight* w, double distance, double* out) {
    return guarded([&] {
        require_out(out, "out");
        require(w != nullptr, "null pointer: weight");
        *out = w->w(distance);
    });
}

/* ----------------------------------------------------------------- AWOPD */

ordpat_status ordpat_awopd(const ordpat_pair* p, const ordpat_metric* m, const ordpat_weight* w,
                           const ordpat_options* opt, ordpat_awopd_estimates* out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        require(m != nullptr, "null pointer: metric");
        require(w != nullptr, "null pointer: weight");
        const resolved_options ro = resolve(opt);

        const auto av = ordpat::estimate_awopd(p->p, ro.h, m->m, w->w, ro.allow_large_h);
        const auto a2 = ordpat::awopd_a_hat(p->p, ro.h, m->m, w->w, ro.kernel, ro.allow_large_h);

        const double nan = std::numeric_limits<double>::quiet_NaN();
        ordpat_awopd_estimates e;
        e.h = av.h;
        e.n = av.n;
        e.awopd_value = av.awopd_value;
        e.comparison_value = av.comparison_value;
        e.d_hat = av.d_hat;
        e.coincidences = av.coincidences;
        e.a_hat = a2.value;
        e.a_clamped = a2.clamped ? 1 : 0;
        e.gamma2 = nan;
        e.gamma2_clamped = 0;
        e.se_d = nan;
        e.bandwidth = a2.bandwidth;
        if (ro.h <= matrix_cap(ro.allow_large_h)) {
            const auto g2 = ordpat::awopd_gamma2(p->p, ro.h, m->m, w->w, ro.kernel, ro.allow_large_h);
            e.gamma2 = g2.value;
            e.gamma2_clamped = g2.clamped ? 1 : 0;
            e.se_d = std::sqrt(g2.value / static_cast<double>(av.n));
        }
        *out = e;
    });
}

/* ----------------------------------------------------------- break tests */

ordpat_status ordpat_break_test(const ordpat_pair* p, const ordpat_options* opt,
                                ordpat_break_result** out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        const resolved_options ro = resolve(opt);
        *out = new ordpat_break_result{
            ordpat::t_statistic(p->p, ro.h, ro.kernel, ro.level, ro.allow_large_h)};
    });
}

ordpat_status ordpat_awopd_break_test(const ordpat_pair* p, const ordpat_metric* m,
                                      const ordpat_weight* w, const ordpat_options* opt,
                                      int one_sided, ordpat_break_result** out) {
    return guarded([&] {
        require_out(out, "out");
        require(p != nullptr, "null pointer: pair");
        require(m != nullptr, "null pointer: metric");
        require(w != nullptr, "null pointer: weight");
        const resolved_options ro = resolve(opt);
        *out = new ordpat_break_result{ordpat::w_statistic(
            p->p, ro.h, m->m, w->w, ro.kernel, ro.level, one_sided != 0, ro.allow_large_h)};
    });
}

void ordpat_break_result_destroy(ordpat_break_result* r) { delete r; }

double ordpat_break_statistic(const ordpat_break_result* r) { return r->r.statistic; }
double ordpat_break_raw_statistic(const ordpat_break_result* r) { return r->r.raw_statistic; }
double ordpat_break_sigma(const ordpat_break_result* r) { return r->r.sigma; }
double ordpat_break_critical_value(const ordpat_break_result* r) { return r->r.critical_value; }
double ordpat_break_p_value(const ordpat_break_result* r) { return r->r.p_value; }
int ordpat_break_reject(const ordpat_break_result* r) { return r->r.reject ? 1 : 0; }
size_t ordpat_break_argmax(const ordpat_break_result* r) { return r->r.argmax_k; }
double ordpat_break_bandwidth(const ordpat_break_result* r) { return r->r.bandwidth; }

const double* ordpat_break_trajectory(const ordpat_break_result* r, size_t* len) {
    if (!r) {
        if (len) *len = 0;
        return nullptr;
    }
    if (len) *len = r->r.trajectory.size();
    return r->r.trajectory.data();
}

/* ----------------------------------------------------------- distribution */

double ordpat_kolmogorov_cdf(double x) { return ordpat::kolmogorov_cdf(x); }
double ordpat_kolmogorov_quantile(double p) { return ordpat::kolmogorov_quantile(p); }

/* ------------------------------------------------------------- simulation */

void ordpat_ar1_config_init(ordpat_ar1_config* cfg) {
    if (!cfg) return;
    cfg->phi = 0.0;
    cfg->rho = 0.0;
    cfg->innovation = ORDPAT_INNOV_GAUSSIAN;
    cfg->t_df = 2.0;
    cfg->burn_in = 1000;
}

ordpat_status ordpat_gen_ar1(const ordpat_ar1_config* cfg, size_t n, uint64_t seed,
                             ordpat_pair** out) {
    return guarded([&] {
        require_out(out, "out");
        *out = new ordpat_pair{ordpat::gen_ar1_pair(convert(cfg), n, seed)};
    });
}

ordpat_status ordpat_gen_ar1_break(const ordpat_ar1_config* pre, const ordpat_ar1_config* post,
                                   size_t change_at, size_t n, uint64_t seed, ordpat_pair** out) {
    return guarded([&] {
        require_out(out, "out");
        ordpat::break_spec spec;
        spec.change_at = change_at;
        spec.post = convert(post);
        *out = new ordpat_pair{ordpat::gen_with_break(convert(pre), spec, n, seed)};
    });
}

ordpat_status ordpat_calibrate_rho(const ordpat_ar1_config* cfg, int h, double target_p,
                                   uint64_t seed, size_t windows, double tol, double* rho_out,
                                   double* achieved_p, double* mc_se) {
    return guarded([&] {
        auto res = ordpat::calibrate_rho(convert(cfg), h, target_p, seed,
                                         windows ? windows : 1000000, tol > 0 ? tol : 5e-4);
        if (rho_out) *rho_out = res.rho;
        if (achieved_p) *achieved_p = res.achieved_p;
        if (mc_se) *mc_se = res.mc_se;
    });
}

/* ----------------------------------------------------------- study driver */

namespace {

ordpat::study_params parse_study_config(const json& doc, std::string& statistic,
                                        std::optional<ordpat::pattern_metric>& metric,
                                        std::optional<ordpat::weight_function>& weight) {
    using ordpat::data_error;
    static const char* known[] = {"kind",         "n",
                                  "h",            "replications",
                                  "level",        "phi",
                                  "rho",          "innovation",
                                  "t_df",         "burn_in",
                                  "seed",         "target_p",
                                  "post_rho",     "post_target_p",
                                  "break_at",     "n_values",
                                  "break_fractions", "post_p_grid",
                                  "post_rho_grid",   "calibration_windows",
                                  "calibration_tol", "threads",
                                  "bandwidth",    "statistic",
                                  "metric",       "weight",
                                  "allow_large_h"};
    if (!doc.is_object()) throw data_error("study config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw data_error("study config: unknown key \"" + key + "\"");
        (void)value;
    }

    auto number = [&](const char* key, double fallback) {
        if (!doc.contains(key)) return fallback;
        if (!doc[key].is_number()) throw data_error(std::string("study config: \"") + key + "\" must be a number");
        return doc[key].get<double>();
    };
    auto unsigned_of = [&](const char* key, std::size_t fallback) {
        if (!doc.contains(key)) return fallback;
        if (!doc[key].is_number_unsigned())
            throw data_error(std::string("study config: \"") + key + "\" must be a nonnegative integer");
        return doc[key].get<std::size_t>();
    };
    auto string_of = [&](const char* key, const std::string& fallback) {
        if (!doc.contains(key)) return fallback;
        if (!doc[key].is_string()) throw data_error(std::string("study config: \"") + key + "\" must be a string");
        return doc[key].get<std::string>();
    };

    ordpat::study_params sp;
    sp.kind = ordpat::study_kind_by_name(string_of("kind", "null_size"));
    sp.n = unsigned_of("n", sp.n);
    sp.h = static_cast<int>(unsigned_of("h", static_cast<std::size_t>(sp.h)));
    sp.replications = unsigned_of("replications", sp.replications);
    sp.level = number("level", sp.level);
    sp.base.phi = number("phi", 0.0);
    sp.base.rho = number("rho", 0.0);
    sp.base.innovation = ordpat::innovation_by_name(string_of("innovation", "gaussian"));
    sp.base.t_df = number("t_df", sp.base.t_df);
    sp.base.burn_in = unsigned_of("burn_in", sp.base.burn_in);
    sp.seed = static_cast<std::uint64_t>(unsigned_of("seed", sp.seed));
    if (doc.contains("target_p")) sp.target_p = number("target_p", 0.0);
    if (doc.contains("post_rho")) sp.post_rho = number("post_rho", 0.0);
    if (doc.contains("post_target_p")) sp.post_target_p = number("post_target_p", 0.0);
    if (doc.contains("break_at")) sp.break_at = unsigned_of("break_at", 0);

    auto size_list = [&](const char* key) {
        std::vector<std::size_t> v;
        if (!doc.contains(key)) return v;
        if (!doc[key].is_array()) throw data_error(std::string("study config: \"") + key + "\" must be an array");
        for (const auto& e : doc[key]) {
            if (!e.is_number_unsigned())
                throw data_error(std::string("study config: \"") + key + "\" entries must be nonnegative integers");
            v.push_back(e.get<std::size_t>());
        }
        return v;
    };
    auto double_list = [&](const char* key) {
        std::vector<double> v;
        if (!doc.contains(key)) return v;
        if (!doc[key].is_array()) throw data_error(std::string("study config: \"") + key + "\" must be an array");
        for (const auto& e : doc[key]) {
            if (!e.is_number()) throw data_error(std::string("study config: \"") + key + "\" entries must be numbers");
            v.push_back(e.get<double>());
        }
        return v;
    };
    sp.n_values = size_list("n_values");
    sp.break_fractions = double_list("break_fractions");
    sp.post_p_grid = double_list("post_p_grid");
    sp.post_rho_grid = double_list("post_rho_grid");
    sp.calibration_windows = unsigned_of("calibration_windows", sp.calibration_windows);
    sp.calibration_tol = number("calibration_tol", sp.calibration_tol);
    sp.threads = static_cast<int>(unsigned_of("threads", 0));
    const double bw = number("bandwidth", 0.0);
    if (bw > 0) sp.kernel.bandwidth = bw;
    if (doc.contains("allow_large_h")) {
        if (!doc["allow_large_h"].is_boolean())
            throw data_error("study config: \"allow_large_h\" must be a boolean");
        sp.allow_large_h = doc["allow_large_h"].get<bool>();
    }

    statistic = string_of("statistic", "t");
    if (statistic != "t" && statistic != "w")
        throw data_error("study config: \"statistic\" must be \"t\" or \"w\"");
    if (statistic == "t" && (doc.contains("metric") || doc.contains("weight")))
        throw data_error("study config: \"metric\"/\"weight\" require \"statistic\": \"w\"");
    if (statistic == "w") {
        metric = ordpat::pattern_metric::by_name(string_of("metric", "discrete"), sp.h);
        weight = ordpat::weight_function::preset(string_of("weight", "indicator"));
        sp.metric = &*metric;
        sp.weight = &*weight;
    }
    return sp;
}

json report_to_json(const ordpat::study_report& rep) {
    json cells = json::array();
    for (const auto& c : rep.cells) {
        cells.push_back({{"n", c.n},
                         {"break_at", c.break_at},
                         {"pre_rho", c.pre_rho},
                         {"post_rho", c.post_rho},
                         {"pre_p", c.pre_p},
                         {"post_p", c.post_p},
                         {"replications", c.replications},
                         {"rejections", c.rejections},
                         {"rate", c.rate},
                         {"se", c.se},
                         {"runtime_s", c.runtime_s}});
    }
    json out{{"kind", ordpat::study_kind_name(rep.kind)},
             {"h", rep.h},
             {"level", rep.level},
             {"seed", rep.seed},
             {"innovation", rep.innovation},
             {"phi", rep.phi},
             {"statistic", rep.statistic},
             {"threads_used", rep.threads_used},
             {"cells", std::move(cells)},
             {"runtime_s", rep.runtime_s}};
    if (!rep.ks_reference.empty()) {
        out["ks_statistic"] = rep.ks_statistic;
        out["ks_p_value"] = rep.ks_p_value;
        out["ks_reference"] = rep.ks_reference;
        out["sample_mean"] = rep.sample_mean;
        out["sample_sd"] = rep.sample_sd;
        out["sample"] = rep.sample;
    }
    if (rep.kind == ordpat::study_kind::clt_check) out["center_p"] = rep.center_p;
    return out;
}

} // namespace

ordpat_status ordpat_run_study(const char* config_json, char** report_json) {
    return guarded([&] {
        require_out(report_json, "report_json");
        require(config_json != nullptr, "null pointer: config_json");
        json doc;
        try {
            doc = json::parse(config_json);
        } catch (const json::exception& e) {
            throw ordpat::data_error(std::string("study config: ") + e.what());
        }
        std::string statistic;
        std::optional<ordpat::pattern_metric> metric;
        std::optional<ordpat::weight_function> weight;
        const auto params = parse_study_config(doc, statistic, metric, weight);
        const auto rep = ordpat::run_study(params);
        *report_json = dup_string(report_to_json(rep).dump(2));
    });
}

void ordpat_free_string(char* s) { std::free(s); }

} // extern "C"
