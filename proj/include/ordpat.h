/* ordpat: ordinal-pattern dependence between paired time series.
 *
 * C interface over the core library: opaque handles, status codes, and a
 * thread-local error message. Every function returning ordpat_status sets
 * the message retrievable via ordpat_last_error() on failure. Handles are
 * owned by the caller and released with the matching _destroy function.
 */
#ifndef ORDPAT_H
#define ORDPAT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#if defined(ORDPAT_BUILD)
#define ORDPAT_API __declspec(dllexport)
#else
#define ORDPAT_API __declspec(dllimport)
#endif
#else
#define ORDPAT_API __attribute__((visibility("default")))
#endif

typedef enum ordpat_status {
    ORDPAT_OK = 0,
    ORDPAT_ERR_INVALID_ARGUMENT = 1, /* caller misuse: bad parameter or precondition */
    ORDPAT_ERR_DATA = 2,             /* file, parse, schema or alignment problem */
    ORDPAT_ERR_DEGENERATE = 3,       /* statistic exists but cannot be studentized */
    ORDPAT_ERR_NOMEM = 4
} ordpat_status;

ORDPAT_API const char* ordpat_version(void);

/* Message for the most recent failure on the calling thread; valid until
 * the next ordpat call on the same thread. Never NULL. */
ORDPAT_API const char* ordpat_last_error(void);

/* ---------------------------------------------------------------- options */

/* HAC kernel callback; must be symmetric with k(0) = 1 and range [0,1]. */
typedef double (*ordpat_kernel_fn)(double x, void* ctx);

typedef struct ordpat_options {
    int h;                   /* pattern order, >= 1 */
    double level;            /* test level / CI alpha in (0,1) */
    double bandwidth;        /* kernel bandwidth; <= 0 selects the ln(n) rule */
    int allow_large_h;       /* lift the h = 8 pattern cap (to 10) and the
                              * h = 4 matrix cap (to 5) */
    ordpat_kernel_fn kernel; /* NULL: Bartlett */
    void* kernel_ctx;
} ordpat_options;

/* h = 2, level = 0.05, bandwidth = 0 (ln n), Bartlett kernel. */
ORDPAT_API void ordpat_options_init(ordpat_options* opt);

/* ------------------------------------------------------- series and pairs */

typedef struct ordpat_series ordpat_series; /* one dated series */
typedef struct ordpat_pair ordpat_pair;     /* two series on a shared clock */

/* CSV with a header row; dates ISO-8601. sort_by_date != 0 sorts rows by
 * date; duplicate dates are ORDPAT_ERR_DATA either way. */
ORDPAT_API ordpat_status ordpat_series_load_csv(const char* path, const char* date_column,
                                                const char* value_column, char delimiter,
                                                int sort_by_date, ordpat_series** out);
ORDPAT_API void ordpat_series_destroy(ordpat_series* s);
ORDPAT_API size_t ordpat_series_length(const ordpat_series* s);

ORDPAT_API ordpat_status ordpat_pair_create(const double* x, const double* y, size_t n,
                                            ordpat_pair** out);
/* Inner join on dates; the drop counts are optional (may be NULL). */
ORDPAT_API ordpat_status ordpat_pair_align(const ordpat_series* x, const ordpat_series* y,
                                           ordpat_pair** out, size_t* dropped_x,
                                           size_t* dropped_y);
ORDPAT_API void ordpat_pair_destroy(ordpat_pair* p);
ORDPAT_API size_t ordpat_pair_length(const ordpat_pair* p);

/* The (X, -Y) channel. */
ORDPAT_API ordpat_status ordpat_pair_negate_y(const ordpat_pair* p, ordpat_pair** out);

/* Inclusive date range; empty strings leave a side open. Dated pairs only. */
ORDPAT_API ordpat_status ordpat_pair_slice_dates(const ordpat_pair* p, const char* start_date,
                                                 const char* end_date, ordpat_pair** out);
/* Exactly count observations starting at the first date >= start_date. */
ORDPAT_API ordpat_status ordpat_pair_slice_count(const ordpat_pair* p, const char* start_date,
                                                 size_t count, ordpat_pair** out);

/* Copies the values out; each buffer must hold ordpat_pair_length doubles.
 * Either pointer may be NULL to skip that column. */
ORDPAT_API ordpat_status ordpat_pair_values(const ordpat_pair* p, double* x_out, double* y_out);
/* ISO date of one observation; fails with ORDPAT_ERR_INVALID_ARGUMENT for
 * undated pairs or out-of-range indices. */
ORDPAT_API ordpat_status ordpat_pair_date(const ordpat_pair* p, size_t index, char* buf,
                                          size_t bufsize);
ORDPAT_API ordpat_status ordpat_pair_write_csv(const ordpat_pair* p, const char* path,
                                               const char* x_name, const char* y_name);

/* X plus centered Gaussian noise with variance equal to the sample variance
 * of X; Y unchanged. */
ORDPAT_API ordpat_status ordpat_pair_noise_overlay(const ordpat_pair* p, uint64_t seed,
                                                   ordpat_pair** out);

/* ------------------------------------------------------ pattern utilities */

/* order_out must hold len ints; len = h+1 in [2, 11]. */
ORDPAT_API ordpat_status ordpat_pattern_of(const double* window, int len, int* order_out);
ORDPAT_API ordpat_status ordpat_pattern_rank(const int* order, int len, uint64_t* rank_out);
ORDPAT_API ordpat_status ordpat_pattern_unrank(uint64_t rank, int h, int* order_out);

/* ------------------------------------------------------------- estimators */

typedef struct ordpat_estimates {
    int h;
    size_t n;
    double p_hat, q_hat, r_hat, s_hat, ord_hat;
    double sigma2;        /* long-run variance for p_hat */
    double gamma2;        /* long-run variance for q_hat; NaN if h above the matrix cap */
    int sigma2_clamped, gamma2_clamped;
    double se_p, se_q;    /* sigma/sqrt(n), gamma/sqrt(n); NaN when unavailable */
    double ci_p_lo, ci_p_hi; /* p_hat -+ z_{1-level/2} se_p; NaN when unavailable */
    double ci_q_lo, ci_q_hi;
    double bandwidth;
    double level;
} ordpat_estimates;

ORDPAT_API ordpat_status ordpat_analyze(const ordpat_pair* p, const ordpat_options* opt,
                                        ordpat_estimates* out);

/* ---------------------------------------------------- metrics and weights */

typedef struct ordpat_metric ordpat_metric;
typedef struct ordpat_weight ordpat_weight;

/* name: "discrete" | "l1" | "chaos". */
ORDPAT_API ordpat_status ordpat_metric_create(const char* name, int h, ordpat_metric** out);
/* JSON document {"h": int, "distances": [[...], ...]}; axioms are checked. */
ORDPAT_API ordpat_status ordpat_metric_from_json(const char* json_text, ordpat_metric** out);
ORDPAT_API void ordpat_metric_destroy(ordpat_metric* m);
/* Distance between two patterns given as order vectors of length h+1. */
ORDPAT_API ordpat_status ordpat_metric_eval(const ordpat_metric* m, const int* order_a,
                                            const int* order_b, int len, double* out);

/* name: "indicator" | "paper-l1-step". */
ORDPAT_API ordpat_status ordpat_weight_create(const char* name, ordpat_weight** out);
/* JSON document {"weights": {"0": 1.0, "2": 0.75, ...}}. */
ORDPAT_API ordpat_status ordpat_weight_from_json(const char* json_text, ordpat_weight** out);
ORDPAT_API void ordpat_weight_destroy(ordpat_weight* w);
ORDPAT_API ordpat_status ordpat_weight_eval(const ordpat_weight* w, double distance, double* out);

/* ------------------------------------------------------------------ AWOPD */

typedef struct ordpat_awopd_estimates {
    int h;
    size_t n;
    double awopd_value;       /* un-normalized weighted sum over windows */
    double comparison_value;  /* (n-h) x plug-in value with unit-mass marginals */
    double d_hat;             /* normalized dependence estimate */
    uint64_t coincidences;    /* windows with exactly equal patterns */
    double a_hat;             /* long-run variance of the weight series */
    int a_clamped;
    double gamma2;            /* delta-method variance; NaN if h above the matrix cap */
    int gamma2_clamped;
    double se_d;              /* sqrt(gamma2/n); NaN when gamma2 is */
    double bandwidth;
} ordpat_awopd_estimates;

ORDPAT_API ordpat_status ordpat_awopd(const ordpat_pair* p, const ordpat_metric* m,
                                      const ordpat_weight* w, const ordpat_options* opt,
                                      ordpat_awopd_estimates* out);

/* ------------------------------------------------------------ break tests */

typedef struct ordpat_break_result ordpat_break_result;

/* CUSUM test on the pattern-coincidence indicators. Constant indicators or
 * zero long-run variance: ORDPAT_ERR_DEGENERATE. */
ORDPAT_API ordpat_status ordpat_break_test(const ordpat_pair* p, const ordpat_options* opt,
                                           ordpat_break_result** out);
/* Same test on the weighted distance series. one_sided != 0 keeps signed
 * excursions (no absolute value). */
ORDPAT_API ordpat_status ordpat_awopd_break_test(const ordpat_pair* p, const ordpat_metric* m,
                                                 const ordpat_weight* w,
                                                 const ordpat_options* opt, int one_sided,
                                                 ordpat_break_result** out);
ORDPAT_API void ordpat_break_result_destroy(ordpat_break_result* r);

ORDPAT_API double ordpat_break_statistic(const ordpat_break_result* r);
ORDPAT_API double ordpat_break_raw_statistic(const ordpat_break_result* r);
ORDPAT_API double ordpat_break_sigma(const ordpat_break_result* r);
ORDPAT_API double ordpat_break_critical_value(const ordpat_break_result* r);
ORDPAT_API double ordpat_break_p_value(const ordpat_break_result* r);
ORDPAT_API int ordpat_break_reject(const ordpat_break_result* r);
ORDPAT_API size_t ordpat_break_argmax(const ordpat_break_result* r); /* 1-based */
ORDPAT_API double ordpat_break_bandwidth(const ordpat_break_result* r);
/* Studentized trajectory, length written to *len; owned by the handle. */
ORDPAT_API const double* ordpat_break_trajectory(const ordpat_break_result* r, size_t* len);

/* ------------------------------------------------------------ distribution */

ORDPAT_API double ordpat_kolmogorov_cdf(double x);
/* K^{-1}(p), p in (0,1); the level-a critical value is quantile(1-a). */
ORDPAT_API double ordpat_kolmogorov_quantile(double p);

/* -------------------------------------------------------------- simulation */

typedef enum ordpat_innovation {
    ORDPAT_INNOV_GAUSSIAN = 0,
    ORDPAT_INNOV_STUDENT_T = 1,
    ORDPAT_INNOV_CAUCHY = 2
} ordpat_innovation;

typedef struct ordpat_ar1_config {
    double phi;      /* |phi| < 1 */
    double rho;      /* innovation correlation in [0,1] */
    int innovation;  /* ordpat_innovation */
    double t_df;     /* student_t degrees of freedom */
    size_t burn_in;
} ordpat_ar1_config;

/* phi = 0, rho = 0, gaussian, t_df = 2, burn_in = 1000. */
ORDPAT_API void ordpat_ar1_config_init(ordpat_ar1_config* cfg);

ORDPAT_API ordpat_status ordpat_gen_ar1(const ordpat_ar1_config* cfg, size_t n, uint64_t seed,
                                        ordpat_pair** out);
/* change_at is the first 1-based index under the post configuration; state
 * carries across; only phi and rho may change. */
ORDPAT_API ordpat_status ordpat_gen_ar1_break(const ordpat_ar1_config* pre,
                                              const ordpat_ar1_config* post, size_t change_at,
                                              size_t n, uint64_t seed, ordpat_pair** out);

/* Bisection for the rho achieving a target coincidence probability.
 * windows = 0 selects 1e6, tol <= 0 selects 5e-4. Any output pointer may be
 * NULL. */
ORDPAT_API ordpat_status ordpat_calibrate_rho(const ordpat_ar1_config* cfg, int h,
                                              double target_p, uint64_t seed, size_t windows,
                                              double tol, double* rho_out, double* achieved_p,
                                              double* mc_se);

/* Monte Carlo study driver. config_json schema (defaults in parentheses):
 * {
 *   "kind": "null_size" | "power_curve" | "power_table" | "clt_check",
 *   "n": 1000, "h": 2, "replications": 1000, "level": 0.05,
 *   "phi": 0.0, "rho": 0.0, "innovation": "gaussian" ("student_t"|"cauchy"),
 *   "t_df": 2.0, "burn_in": 1000, "seed": 1,
 *   "target_p": ...,          calibrate rho to this instead of "rho"
 *   "post_rho" | "post_target_p": ...,   break alternative
 *   "break_at": ...,          pre-regime length (power_curve; default n/2)
 *   "n_values": [...], "break_fractions": [...],   power_table grid
 *   "post_p_grid": [...] | "post_rho_grid": [...], power_curve grid
 *   "calibration_windows": 1000000, "calibration_tol": 5e-4,
 *   "threads": 0,             0: ORDPAT_THREADS env var, else hardware
 *   "bandwidth": 0,           0: ln(n)
 *   "statistic": "t" ("w"), "metric": "discrete"|"l1"|"chaos",
 *   "weight": "indicator"|"paper-l1-step", "allow_large_h": false
 * }
 * On success *report_json holds the study report; release it with
 * ordpat_free_string. */
ORDPAT_API ordpat_status ordpat_run_study(const char* config_json, char** report_json);
ORDPAT_API void ordpat_free_string(char* s);

#ifdef __cplusplus
}
#endif

#endif /* ORDPAT_H */
