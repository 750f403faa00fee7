// Command-line front end. Everything statistical happens behind ordpat.h;
// this file only parses flags, moves bytes and formats reports.

#include "ordpat.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using nlohmann::json;

namespace {

int exit_code(ordpat_status st) {
    switch (st) {
    case ORDPAT_OK: return 0;
    case ORDPAT_ERR_DATA: return 2;
    case ORDPAT_ERR_DEGENERATE: return 3;
    default: return 1;
    }
}

void check(ordpat_status st) {
    if (st == ORDPAT_OK) return;
    std::fprintf(stderr, "error: %s\n", ordpat_last_error());
    std::exit(exit_code(st));
}

[[noreturn]] void fail_usage(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    std::exit(1);
}

[[noreturn]] void fail_data(const std::string& msg) {
    std::fprintf(stderr, "error: %s\n", msg.c_str());
    std::exit(2);
}

template <typename T, void (*Destroy)(T*)>
class handle {
public:
    handle() = default;
    handle(const handle&) = delete;
    handle& operator=(const handle&) = delete;
    handle(handle&& other) noexcept : ptr_(other.ptr_) { other.ptr_ = nullptr; }
    handle& operator=(handle&& other) noexcept {
        std::swap(ptr_, other.ptr_);
        return *this;
    }
    ~handle() { reset(); }
    void reset() {
        if (ptr_) Destroy(ptr_);
        ptr_ = nullptr;
    }
    T** out() {
        reset();
        return &ptr_;
    }
    T* get() const { return ptr_; }

private:
    T* ptr_ = nullptr;
};

using series_ptr = handle<ordpat_series, ordpat_series_destroy>;
using pair_ptr = handle<ordpat_pair, ordpat_pair_destroy>;
using metric_ptr = handle<ordpat_metric, ordpat_metric_destroy>;
using weight_ptr = handle<ordpat_weight, ordpat_weight_destroy>;
using break_ptr = handle<ordpat_break_result, ordpat_break_result_destroy>;

std::string fmt(double v) {
    if (std::isnan(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// CSV cells carry full precision; NaN becomes an empty cell.
std::string csv_num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void table_row(const std::string& name, const std::string& value) {
    std::printf("%-18s %s\n", name.c_str(), value.c_str());
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) fail_data("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        fail_data("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) fail_data("config file " + path + " must hold a JSON object");
    return j;
}

// Three-way merge per key: an explicit command-line flag wins, otherwise a
// config-file entry, otherwise the built-in default. The winning value is
// written back into both the variable and the echoed config object.
struct cfg_merge {
    CLI::App* cmd;
    json& cfg;

    bool flag_given(const char* flag) const { return cmd->count(flag) > 0; }

    template <typename T, typename Check>
    void apply(const char* flag, const char* key, T& var, Check&& is_type, const char* want) {
        if (flag_given(flag)) {
            cfg[key] = var;
            return;
        }
        if (cfg.contains(key)) {
            if (!is_type(cfg[key])) fail_data(std::string("config key \"") + key + "\" must be " + want);
            var = cfg[key].template get<T>();
            return;
        }
        cfg[key] = var;
    }

    void str(const char* flag, const char* key, std::string& var) {
        apply(flag, key, var, [](const json& v) { return v.is_string(); }, "a string");
    }
    void num(const char* flag, const char* key, double& var) {
        apply(flag, key, var, [](const json& v) { return v.is_number(); }, "a number");
    }
    void uint(const char* flag, const char* key, std::size_t& var) {
        apply(flag, key, var, [](const json& v) { return v.is_number_unsigned(); },
              "a nonnegative integer");
    }
    void u64(const char* flag, const char* key, std::uint64_t& var) {
        apply(flag, key, var, [](const json& v) { return v.is_number_unsigned(); },
              "a nonnegative integer");
    }
    void intval(const char* flag, const char* key, int& var) {
        apply(flag, key, var, [](const json& v) { return v.is_number_integer(); }, "an integer");
    }
    void boolean(const char* flag, const char* key, bool& var) {
        apply(flag, key, var, [](const json& v) { return v.is_boolean(); }, "a boolean");
    }
    // Optional study keys: emitted only when the flag was passed, so absent
    // flags leave the config-file value (or nothing) in place.
    void opt_num(const char* flag, const char* key, double var) {
        if (flag_given(flag)) cfg[key] = var;
    }
    void opt_uint(const char* flag, const char* key, std::size_t var) {
        if (flag_given(flag)) cfg[key] = var;
    }
    void opt_str(const char* flag, const char* key, const std::string& var) {
        if (flag_given(flag)) cfg[key] = var;
    }
    void opt_vec_num(const char* flag, const char* key, const std::vector<double>& var) {
        if (flag_given(flag)) cfg[key] = var;
    }
    void opt_vec_uint(const char* flag, const char* key, const std::vector<std::size_t>& var) {
        if (flag_given(flag)) cfg[key] = var;
    }
};

/* ------------------------------------------------------------- input data */

struct input_opts {
    std::string x_file, y_file, input_file;
    std::string x_column = "Close", y_column = "Close";
    std::string date_column = "Date";
    std::string delimiter = ",";
    std::string start_date, end_date;
    std::size_t count = 0;
    bool negate_y = false;
};

void add_input_flags(CLI::App* cmd, input_opts& in) {
    cmd->add_option("--x", in.x_file, "CSV file holding the X series");
    cmd->add_option("--y", in.y_file, "CSV file holding the Y series");
    cmd->add_option("--input", in.input_file, "single CSV holding both value columns");
    cmd->add_option("--x-column", in.x_column, "value column for X (default Close)");
    cmd->add_option("--y-column", in.y_column, "value column for Y (default Close)");
    cmd->add_option("--date-column", in.date_column, "date column name (default Date)");
    cmd->add_option("--delimiter", in.delimiter, "CSV field delimiter (default ,)");
    cmd->add_option("--start-date", in.start_date, "inclusive ISO start date");
    cmd->add_option("--end-date", in.end_date, "inclusive ISO end date");
    cmd->add_option("--count", in.count, "take exactly this many rows from --start-date on");
    cmd->add_flag("--negate-y", in.negate_y, "analyze (X, -Y) instead of (X, Y)");
}

void merge_input(cfg_merge& m, input_opts& in) {
    m.str("--x", "x", in.x_file);
    m.str("--y", "y", in.y_file);
    m.str("--input", "input", in.input_file);
    m.str("--x-column", "x_column", in.x_column);
    m.str("--y-column", "y_column", in.y_column);
    m.str("--date-column", "date_column", in.date_column);
    m.str("--delimiter", "delimiter", in.delimiter);
    m.str("--start-date", "start_date", in.start_date);
    m.str("--end-date", "end_date", in.end_date);
    m.uint("--count", "count", in.count);
    m.boolean("--negate-y", "negate_y", in.negate_y);
}

pair_ptr load_pair(const input_opts& in, json& meta) {
    const bool single = !in.input_file.empty();
    const bool dual = !in.x_file.empty() || !in.y_file.empty();
    if (single && dual) fail_usage("--input conflicts with --x/--y");
    if (!single && (in.x_file.empty() || in.y_file.empty()))
        fail_usage("provide either --input or both --x and --y");
    if (in.delimiter.size() != 1) fail_usage("--delimiter must be a single character");

    const char* date_col = in.date_column.c_str();
    const char delim = in.delimiter[0];
    series_ptr sx, sy;
    if (single) {
        check(ordpat_series_load_csv(in.input_file.c_str(), date_col, in.x_column.c_str(), delim,
                                     1, sx.out()));
        check(ordpat_series_load_csv(in.input_file.c_str(), date_col, in.y_column.c_str(), delim,
                                     1, sy.out()));
    } else {
        check(ordpat_series_load_csv(in.x_file.c_str(), date_col, in.x_column.c_str(), delim, 1,
                                     sx.out()));
        check(ordpat_series_load_csv(in.y_file.c_str(), date_col, in.y_column.c_str(), delim, 1,
                                     sy.out()));
    }

    pair_ptr p;
    std::size_t dropped_x = 0, dropped_y = 0;
    check(ordpat_pair_align(sx.get(), sy.get(), p.out(), &dropped_x, &dropped_y));
    meta["aligned_n"] = ordpat_pair_length(p.get());
    meta["dropped_x"] = dropped_x;
    meta["dropped_y"] = dropped_y;

    if (in.count > 0) {
        if (in.start_date.empty()) fail_usage("--count requires --start-date");
        if (!in.end_date.empty()) fail_usage("--count conflicts with --end-date");
        pair_ptr sliced;
        check(ordpat_pair_slice_count(p.get(), in.start_date.c_str(), in.count, sliced.out()));
        p = std::move(sliced);
    } else if (!in.start_date.empty() || !in.end_date.empty()) {
        pair_ptr sliced;
        check(ordpat_pair_slice_dates(p.get(), in.start_date.c_str(), in.end_date.c_str(),
                                      sliced.out()));
        p = std::move(sliced);
    }
    if (in.negate_y) {
        pair_ptr neg;
        check(ordpat_pair_negate_y(p.get(), neg.out()));
        p = std::move(neg);
    }
    meta["n"] = ordpat_pair_length(p.get());
    return p;
}

/* --------------------------------------------------------- shared options */

struct common_opts {
    int h = 2;
    double level = 0.05;
    std::string kernel = "bartlett";
    double bandwidth = 0.0;
    bool allow_large_h = false;
    std::uint64_t seed = 1;
    std::string format = "table";
    std::string config_file;
    std::string out_dir;
};

void add_common_flags(CLI::App* cmd, common_opts& o) {
    cmd->add_option("--h", o.h, "pattern order: windows have h+1 points (default 2)");
    cmd->add_option("--level", o.level, "test level / CI alpha (default 0.05)");
    cmd->add_option("--kernel", o.kernel, "HAC kernel; only \"bartlett\" is built in");
    cmd->add_option("--bandwidth", o.bandwidth, "HAC bandwidth; 0 selects the ln(n) rule");
    cmd->add_flag("--allow-large-h", o.allow_large_h, "lift the default pattern order caps");
    cmd->add_option("--seed", o.seed, "master RNG seed (default 1)");
    cmd->add_option("--format", o.format, "table, csv or json (default table)")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    cmd->add_option("--config", o.config_file, "JSON config file; explicit flags win");
    cmd->add_option("--out", o.out_dir, "directory for emitted data files");
}

void merge_common(cfg_merge& m, common_opts& o) {
    m.intval("--h", "h", o.h);
    m.num("--level", "level", o.level);
    m.str("--kernel", "kernel", o.kernel);
    m.num("--bandwidth", "bandwidth", o.bandwidth);
    m.boolean("--allow-large-h", "allow_large_h", o.allow_large_h);
    m.u64("--seed", "seed", o.seed);
    m.str("--format", "format", o.format);
    m.str("--out", "out", o.out_dir);
    if (o.kernel != "bartlett")
        fail_usage("unsupported kernel \"" + o.kernel +
                   "\"; the command line offers bartlett only (custom kernels go through the C API)");
    if (o.format != "table" && o.format != "csv" && o.format != "json")
        fail_usage("format must be table, csv or json");
}

ordpat_options make_options(const common_opts& o) {
    ordpat_options opt;
    ordpat_options_init(&opt);
    opt.h = o.h;
    opt.level = o.level;
    opt.bandwidth = o.bandwidth;
    opt.allow_large_h = o.allow_large_h ? 1 : 0;
    return opt;
}

bool looks_like_file(const std::string& spec) {
    if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") return true;
    return std::filesystem::exists(spec);
}

metric_ptr make_metric(const std::string& spec, int h) {
    metric_ptr m;
    if (looks_like_file(spec))
        check(ordpat_metric_from_json(read_file(spec).c_str(), m.out()));
    else
        check(ordpat_metric_create(spec.c_str(), h, m.out()));
    return m;
}

weight_ptr make_weight(const std::string& spec) {
    weight_ptr w;
    if (looks_like_file(spec))
        check(ordpat_weight_from_json(read_file(spec).c_str(), w.out()));
    else
        check(ordpat_weight_create(spec.c_str(), w.out()));
    return w;
}

/* ----------------------------------------------------------------- output */

void emit_json_doc(const json& config, const json& results) {
    json doc{{"version", ordpat_version()}, {"config", config}, {"results", results}};
    std::printf("%s\n", doc.dump(2).c_str());
}

void print_config_line(const json& config) {
    std::printf("config             %s\n", config.dump().c_str());
}

void emit_csv(const json& config, const std::vector<std::pair<std::string, std::string>>& cells) {
    std::printf("# config: %s\n", config.dump().c_str());
    for (std::size_t i = 0; i < cells.size(); ++i)
        std::printf("%s%s", cells[i].first.c_str(), i + 1 < cells.size() ? "," : "\n");
    for (std::size_t i = 0; i < cells.size(); ++i)
        std::printf("%s%s", cells[i].second.c_str(), i + 1 < cells.size() ? "," : "\n");
}

std::string out_path(const std::string& dir, const char* name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail_data("cannot create output directory " + dir);
    return (std::filesystem::path(dir) / name).string();
}

FILE* open_out(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "w");
    if (!f) fail_data("cannot open " + path + " for writing");
    return f;
}

/* ---------------------------------------------------------------- analyze */

struct analyze_opts {
    input_opts in;
    common_opts common;
};

int run_analyze(CLI::App* cmd, analyze_opts& o) {
    json cfg = load_config_file(o.common.config_file);
    cfg_merge m{cmd, cfg};
    merge_input(m, o.in);
    merge_common(m, o.common);
    cfg["command"] = "analyze";

    json meta;
    pair_ptr pair = load_pair(o.in, meta);
    const ordpat_options opt = make_options(o.common);
    ordpat_estimates est;
    check(ordpat_analyze(pair.get(), &opt, &est));

    json results = meta;
    results["h"] = est.h;
    results["p_hat"] = est.p_hat;
    results["q_hat"] = est.q_hat;
    results["r_hat"] = est.r_hat;
    results["s_hat"] = est.s_hat;
    results["ord_hat"] = est.ord_hat;
    results["sigma2"] = est.sigma2;
    results["sigma2_clamped"] = est.sigma2_clamped != 0;
    results["gamma2"] = est.gamma2;
    results["gamma2_clamped"] = est.gamma2_clamped != 0;
    results["se_p"] = est.se_p;
    results["se_q"] = est.se_q;
    results["ci_p"] = json::array({est.ci_p_lo, est.ci_p_hi});
    results["ci_q"] = json::array({est.ci_q_lo, est.ci_q_hi});
    results["bandwidth"] = est.bandwidth;
    results["level"] = est.level;

    if (o.common.format == "json") {
        emit_json_doc(cfg, results);
    } else if (o.common.format == "csv") {
        emit_csv(cfg, {{"n", std::to_string(est.n)},
                       {"h", std::to_string(est.h)},
                       {"p_hat", csv_num(est.p_hat)},
                       {"q_hat", csv_num(est.q_hat)},
                       {"r_hat", csv_num(est.r_hat)},
                       {"s_hat", csv_num(est.s_hat)},
                       {"ord_hat", csv_num(est.ord_hat)},
                       {"se_p", csv_num(est.se_p)},
                       {"se_q", csv_num(est.se_q)},
                       {"ci_p_lo", csv_num(est.ci_p_lo)},
                       {"ci_p_hi", csv_num(est.ci_p_hi)},
                       {"ci_q_lo", csv_num(est.ci_q_lo)},
                       {"ci_q_hi", csv_num(est.ci_q_hi)},
                       {"sigma2", csv_num(est.sigma2)},
                       {"gamma2", csv_num(est.gamma2)},
                       {"bandwidth", csv_num(est.bandwidth)},
                       {"level", csv_num(est.level)}});
    } else {
        print_config_line(cfg);
        table_row("n", std::to_string(est.n) + " (dropped " + meta["dropped_x"].dump() + " x, " +
                           meta["dropped_y"].dump() + " y)");
        table_row("order h", std::to_string(est.h));
        const std::string ci_pct = fmt(100.0 * (1.0 - est.level));
        table_row("p_hat", fmt(est.p_hat) + "  se " + fmt(est.se_p) + "  " + ci_pct + "% CI [" +
                               fmt(est.ci_p_lo) + ", " + fmt(est.ci_p_hi) + "]");
        table_row("q_hat", fmt(est.q_hat) + "  se " + fmt(est.se_q) + "  " + ci_pct + "% CI [" +
                               fmt(est.ci_q_lo) + ", " + fmt(est.ci_q_hi) + "]");
        table_row("r_hat", fmt(est.r_hat));
        table_row("s_hat", fmt(est.s_hat));
        table_row("ord_hat", fmt(est.ord_hat));
        table_row("sigma2", fmt(est.sigma2) + (est.sigma2_clamped ? " (clamped)" : ""));
        table_row("gamma2", fmt(est.gamma2) + (est.gamma2_clamped ? " (clamped)" : ""));
        table_row("bandwidth", fmt(est.bandwidth));
    }
    return 0;
}

/* -------------------------------------------------------------- breaktest */

struct break_opts {
    input_opts in;
    common_opts common;
    std::string metric, weight;
    bool one_sided = false;
};

// 1-based window k covers observations k-1 .. k-1+h (0-based); the reported
// date is the window's last observation.
std::optional<std::string> window_end_date(const ordpat_pair* p, std::size_t k, int h) {
    char buf[32];
    if (ordpat_pair_date(p, k - 1 + static_cast<std::size_t>(h), buf, sizeof buf) != ORDPAT_OK)
        return std::nullopt;
    return std::string(buf);
}

void write_trajectory_csv(const std::string& path, const ordpat_pair* pair,
                          const ordpat_break_result* res, int h) {
    std::size_t len = 0;
    const double* tr = ordpat_break_trajectory(res, &len);
    const double crit = ordpat_break_critical_value(res);
    const bool dated = window_end_date(pair, 1, h).has_value();
    FILE* f = open_out(path);
    std::fprintf(f, "k%s,statistic,critical_value\n", dated ? ",date" : "");
    for (std::size_t k = 1; k <= len; ++k) {
        if (dated)
            std::fprintf(f, "%zu,%s,%.17g,%.17g\n", k, window_end_date(pair, k, h)->c_str(),
                         tr[k - 1], crit);
        else
            std::fprintf(f, "%zu,%.17g,%.17g\n", k, tr[k - 1], crit);
    }
    if (std::fclose(f) != 0) fail_data("write failed: " + path);
}

int run_breaktest(CLI::App* cmd, break_opts& o) {
    json cfg = load_config_file(o.common.config_file);
    cfg_merge m{cmd, cfg};
    merge_input(m, o.in);
    merge_common(m, o.common);
    m.str("--metric", "metric", o.metric);
    m.str("--weight", "weight", o.weight);
    m.boolean("--one-sided", "one_sided", o.one_sided);
    cfg["command"] = "breaktest";

    json meta;
    pair_ptr pair = load_pair(o.in, meta);
    const ordpat_options opt = make_options(o.common);
    const bool weighted = !o.metric.empty() || !o.weight.empty();
    if (!weighted && o.one_sided)
        fail_usage("--one-sided applies to the weighted statistic; pass --metric/--weight");

    break_ptr res;
    if (weighted) {
        metric_ptr mc = make_metric(o.metric.empty() ? "discrete" : o.metric, o.common.h);
        weight_ptr wt = make_weight(o.weight.empty() ? "indicator" : o.weight);
        check(ordpat_awopd_break_test(pair.get(), mc.get(), wt.get(), &opt,
                                      o.one_sided ? 1 : 0, res.out()));
    } else {
        check(ordpat_break_test(pair.get(), &opt, res.out()));
    }

    const double stat = ordpat_break_statistic(res.get());
    const std::size_t argmax = ordpat_break_argmax(res.get());
    const auto break_date = window_end_date(pair.get(), argmax, o.common.h);
    std::size_t traj_len = 0;
    const double* traj = ordpat_break_trajectory(res.get(), &traj_len);

    json results = meta;
    results["statistic"] = stat;
    results["raw_statistic"] = ordpat_break_raw_statistic(res.get());
    results["sigma"] = ordpat_break_sigma(res.get());
    results["critical_value"] = ordpat_break_critical_value(res.get());
    results["p_value"] = ordpat_break_p_value(res.get());
    results["reject"] = ordpat_break_reject(res.get()) != 0;
    results["argmax_k"] = argmax;
    if (break_date) results["argmax_date"] = *break_date;
    results["bandwidth"] = ordpat_break_bandwidth(res.get());
    results["statistic_kind"] = weighted ? "w" : "t";
    results["trajectory"] = std::vector<double>(traj, traj + traj_len);

    std::string traj_path;
    if (!o.common.out_dir.empty()) {
        traj_path = out_path(o.common.out_dir, "trajectory.csv");
        write_trajectory_csv(traj_path, pair.get(), res.get(), o.common.h);
        results["trajectory_file"] = traj_path;
    }

    if (o.common.format == "json") {
        emit_json_doc(cfg, results);
    } else if (o.common.format == "csv") {
        emit_csv(cfg, {{"n", meta["n"].dump()},
                       {"h", std::to_string(o.common.h)},
                       {"statistic_kind", weighted ? "w" : "t"},
                       {"statistic", csv_num(stat)},
                       {"raw_statistic", csv_num(ordpat_break_raw_statistic(res.get()))},
                       {"sigma", csv_num(ordpat_break_sigma(res.get()))},
                       {"critical_value", csv_num(ordpat_break_critical_value(res.get()))},
                       {"p_value", csv_num(ordpat_break_p_value(res.get()))},
                       {"reject", ordpat_break_reject(res.get()) ? "1" : "0"},
                       {"argmax_k", std::to_string(argmax)},
                       {"argmax_date", break_date.value_or("")},
                       {"bandwidth", csv_num(ordpat_break_bandwidth(res.get()))},
                       {"level", csv_num(o.common.level)}});
    } else {
        print_config_line(cfg);
        table_row("n", meta["n"].dump());
        table_row("order h", std::to_string(o.common.h));
        table_row("statistic", fmt(stat) + (weighted ? "  (weighted)" : ""));
        table_row("raw statistic", fmt(ordpat_break_raw_statistic(res.get())));
        table_row("sigma", fmt(ordpat_break_sigma(res.get())));
        table_row("bandwidth", fmt(ordpat_break_bandwidth(res.get())));
        table_row("critical value",
                  fmt(ordpat_break_critical_value(res.get())) + "  (level " + fmt(o.common.level) + ")");
        table_row("p-value", fmt(ordpat_break_p_value(res.get())));
        table_row("decision", ordpat_break_reject(res.get()) ? "reject: break indicated"
                                                             : "no rejection");
        table_row("argmax window",
                  std::to_string(argmax) + (break_date ? " (ends " + *break_date + ")" : ""));
        if (!traj_path.empty()) table_row("trajectory", traj_path);
    }
    return 0;
}

/* ------------------------------------------------------------------ awopd */

struct awopd_opts {
    input_opts in;
    common_opts common;
    std::string metric = "l1", weight = "paper-l1-step";
    bool one_sided = false;
    std::size_t noise_overlay = 0;
};

struct running_stats {
    std::vector<double> values;
    void add(double v) { values.push_back(v); }
    double mean() const {
        double s = 0;
        for (double v : values) s += v;
        return values.empty() ? 0.0 : s / static_cast<double>(values.size());
    }
    double sd() const {
        if (values.size() < 2) return 0.0;
        const double mu = mean();
        double s = 0;
        for (double v : values) s += (v - mu) * (v - mu);
        return std::sqrt(s / static_cast<double>(values.size() - 1));
    }
};

int run_awopd(CLI::App* cmd, awopd_opts& o) {
    json cfg = load_config_file(o.common.config_file);
    cfg_merge m{cmd, cfg};
    merge_input(m, o.in);
    merge_common(m, o.common);
    m.str("--metric", "metric", o.metric);
    m.str("--weight", "weight", o.weight);
    m.boolean("--one-sided", "one_sided", o.one_sided);
    m.uint("--noise-overlay", "noise_overlay", o.noise_overlay);
    cfg["command"] = "awopd";

    json meta;
    pair_ptr pair = load_pair(o.in, meta);
    const ordpat_options opt = make_options(o.common);
    metric_ptr mc = make_metric(o.metric, o.common.h);
    weight_ptr wt = make_weight(o.weight);

    ordpat_awopd_estimates est;
    check(ordpat_awopd(pair.get(), mc.get(), wt.get(), &opt, &est));

    // Classical benchmark: same windows counted with the discrete metric and
    // the indicator weight, whose comparison value is the expected number of
    // coincident windows under independence.
    metric_ptr dm = make_metric("discrete", o.common.h);
    weight_ptr iw = make_weight("indicator");
    ordpat_awopd_estimates classical;
    check(ordpat_awopd(pair.get(), dm.get(), iw.get(), &opt, &classical));

    json results = meta;
    results["h"] = est.h;
    results["metric"] = o.metric;
    results["weight"] = o.weight;
    results["awopd_value"] = est.awopd_value;
    results["comparison_value"] = est.comparison_value;
    results["d_hat"] = est.d_hat;
    results["coincidences"] = est.coincidences;
    results["a_hat"] = est.a_hat;
    results["gamma2"] = est.gamma2;
    results["se_d"] = est.se_d;
    results["bandwidth"] = est.bandwidth;
    results["classical_comparison"] = classical.comparison_value;

    json break_block;
    json noise_block;
    if (o.noise_overlay == 0) {
        break_ptr res;
        check(ordpat_awopd_break_test(pair.get(), mc.get(), wt.get(), &opt, o.one_sided ? 1 : 0,
                                      res.out()));
        const std::size_t argmax = ordpat_break_argmax(res.get());
        break_block["statistic"] = ordpat_break_statistic(res.get());
        break_block["critical_value"] = ordpat_break_critical_value(res.get());
        break_block["p_value"] = ordpat_break_p_value(res.get());
        break_block["reject"] = ordpat_break_reject(res.get()) != 0;
        break_block["argmax_k"] = argmax;
        if (auto d = window_end_date(pair.get(), argmax, o.common.h)) break_block["argmax_date"] = *d;
        results["break_test"] = break_block;
    } else {
        running_stats awopd_s, comp_s;
        std::size_t zero_coincidence = 0;
        for (std::size_t rep = 0; rep < o.noise_overlay; ++rep) {
            pair_ptr noisy;
            check(ordpat_pair_noise_overlay(pair.get(), o.common.seed + rep, noisy.out()));
            ordpat_awopd_estimates ne;
            check(ordpat_awopd(noisy.get(), mc.get(), wt.get(), &opt, &ne));
            awopd_s.add(ne.awopd_value);
            comp_s.add(ne.comparison_value);
            if (ne.coincidences == 0) ++zero_coincidence;
        }
        noise_block["replications"] = o.noise_overlay;
        noise_block["seed"] = o.common.seed;
        noise_block["awopd_mean"] = awopd_s.mean();
        noise_block["awopd_sd"] = awopd_s.sd();
        noise_block["comparison_mean"] = comp_s.mean();
        noise_block["comparison_sd"] = comp_s.sd();
        noise_block["zero_coincidence_runs"] = zero_coincidence;
        results["noise_study"] = noise_block;
    }

    if (o.common.format == "json") {
        emit_json_doc(cfg, results);
    } else if (o.common.format == "csv") {
        std::vector<std::pair<std::string, std::string>> cells{
            {"n", std::to_string(est.n)},
            {"h", std::to_string(est.h)},
            {"metric", o.metric},
            {"weight", o.weight},
            {"awopd_value", csv_num(est.awopd_value)},
            {"comparison_value", csv_num(est.comparison_value)},
            {"d_hat", csv_num(est.d_hat)},
            {"coincidences", std::to_string(est.coincidences)},
            {"classical_comparison", csv_num(classical.comparison_value)},
            {"a_hat", csv_num(est.a_hat)},
            {"gamma2", csv_num(est.gamma2)},
            {"se_d", csv_num(est.se_d)},
            {"bandwidth", csv_num(est.bandwidth)}};
        if (o.noise_overlay == 0) {
            cells.push_back({"w_statistic", csv_num(break_block["statistic"].get<double>())});
            cells.push_back({"w_p_value", csv_num(break_block["p_value"].get<double>())});
            cells.push_back({"w_reject", break_block["reject"].get<bool>() ? "1" : "0"});
        } else {
            cells.push_back({"noise_replications", std::to_string(o.noise_overlay)});
            cells.push_back({"noise_awopd_mean", csv_num(noise_block["awopd_mean"].get<double>())});
            cells.push_back({"noise_awopd_sd", csv_num(noise_block["awopd_sd"].get<double>())});
            cells.push_back(
                {"noise_comparison_mean", csv_num(noise_block["comparison_mean"].get<double>())});
            cells.push_back(
                {"noise_comparison_sd", csv_num(noise_block["comparison_sd"].get<double>())});
            cells.push_back(
                {"noise_zero_coincidence_runs",
                 std::to_string(noise_block["zero_coincidence_runs"].get<std::size_t>())});
        }
        emit_csv(cfg, cells);
    } else {
        print_config_line(cfg);
        table_row("n", std::to_string(est.n));
        table_row("order h", std::to_string(est.h));
        table_row("metric", o.metric);
        table_row("weight", o.weight);
        table_row("awopd value", fmt(est.awopd_value));
        table_row("comparison value", fmt(est.comparison_value));
        table_row("d_hat", fmt(est.d_hat));
        table_row("coincidences", std::to_string(est.coincidences));
        table_row("classical comp.", fmt(classical.comparison_value));
        table_row("se(d_hat)", fmt(est.se_d));
        table_row("bandwidth", fmt(est.bandwidth));
        if (o.noise_overlay == 0) {
            table_row("w statistic", fmt(break_block["statistic"].get<double>()) + "  p " +
                                         fmt(break_block["p_value"].get<double>()));
            table_row("w decision", break_block["reject"].get<bool>() ? "reject: break indicated"
                                                                      : "no rejection");
        } else {
            table_row("noise reps", std::to_string(o.noise_overlay));
            table_row("awopd mean", fmt(noise_block["awopd_mean"].get<double>()) + "  sd " +
                                        fmt(noise_block["awopd_sd"].get<double>()));
            table_row("comparison mean", fmt(noise_block["comparison_mean"].get<double>()) +
                                             "  sd " +
                                             fmt(noise_block["comparison_sd"].get<double>()));
            table_row("zero-coincidence",
                      noise_block["zero_coincidence_runs"].dump() + " of " +
                          std::to_string(o.noise_overlay) + " runs");
        }
    }
    return 0;
}

/* --------------------------------------------------------- study commands */

struct sim_opts {
    std::string study = "null_size";
    std::size_t n = 1000;
    std::size_t replications = 1000;
    std::size_t burn_in = 1000;
    std::size_t break_at = 0;
    std::size_t calibration_windows = 1000000;
    int threads = 0;
    double phi = 0.0, rho = 0.0, t_df = 2.0, calibration_tol = 5e-4;
    double target_p = 0.0, post_rho = 0.0, post_target_p = 0.0;
    std::string innovation = "gaussian";
    std::string statistic = "t";
    std::string metric, weight;
    std::vector<std::size_t> n_values;
    std::vector<double> break_fractions, post_p_grid, post_rho_grid;
    common_opts common;
};

void add_sim_flags(CLI::App* cmd, sim_opts& o, bool with_kind) {
    if (with_kind)
        cmd->add_option("--study", o.study, "null_size, power_curve, power_table or clt_check")
            ->check(CLI::IsMember({"null_size", "power_curve", "power_table", "clt_check"}));
    cmd->add_option("--n", o.n, "observations per replication (default 1000)");
    cmd->add_option("--replications", o.replications, "Monte Carlo replications (default 1000)");
    cmd->add_option("--phi", o.phi, "AR(1) coefficient (default 0)");
    cmd->add_option("--rho", o.rho, "innovation correlation (default 0)");
    cmd->add_option("--innovation", o.innovation, "gaussian, student_t or cauchy");
    cmd->add_option("--t-df", o.t_df, "student_t degrees of freedom (default 2)");
    cmd->add_option("--burn-in", o.burn_in, "burn-in steps (default 1000)");
    cmd->add_option("--target-p", o.target_p, "calibrate rho to this coincidence probability");
    cmd->add_option("--post-rho", o.post_rho, "post-break innovation correlation");
    cmd->add_option("--post-target-p", o.post_target_p, "post-break calibrated target");
    cmd->add_option("--break-at", o.break_at, "pre-break regime length (default n/2)");
    cmd->add_option("--n-values", o.n_values, "power_table n grid")->delimiter(',');
    cmd->add_option("--break-fractions", o.break_fractions, "power_table break-position fractions")
        ->delimiter(',');
    cmd->add_option("--post-p-grid", o.post_p_grid, "power_curve calibrated target grid")
        ->delimiter(',');
    cmd->add_option("--post-rho-grid", o.post_rho_grid, "power_curve direct rho grid")
        ->delimiter(',');
    cmd->add_option("--calibration-windows", o.calibration_windows,
                    "windows per calibration evaluation (default 1e6)");
    cmd->add_option("--calibration-tol", o.calibration_tol, "calibration tolerance (default 5e-4)");
    cmd->add_option("--threads", o.threads, "worker threads; 0 honors ORDPAT_THREADS, then hardware");
    cmd->add_option("--statistic", o.statistic, "t (coincidence) or w (weighted)")
        ->check(CLI::IsMember({"t", "w"}));
    cmd->add_option("--metric", o.metric, "pattern metric for --statistic w");
    cmd->add_option("--weight", o.weight, "weight function for --statistic w");
    add_common_flags(cmd, o.common);
}

json build_study_config(CLI::App* cmd, sim_opts& o, const char* forced_kind) {
    json cfg = load_config_file(o.common.config_file);
    cfg_merge m{cmd, cfg};
    if (forced_kind)
        cfg["kind"] = forced_kind;
    else
        m.str("--study", "kind", o.study);
    m.uint("--n", "n", o.n);
    m.uint("--replications", "replications", o.replications);
    m.num("--phi", "phi", o.phi);
    m.num("--rho", "rho", o.rho);
    m.str("--innovation", "innovation", o.innovation);
    m.num("--t-df", "t_df", o.t_df);
    m.uint("--burn-in", "burn_in", o.burn_in);
    m.opt_num("--target-p", "target_p", o.target_p);
    m.opt_num("--post-rho", "post_rho", o.post_rho);
    m.opt_num("--post-target-p", "post_target_p", o.post_target_p);
    m.opt_uint("--break-at", "break_at", o.break_at);
    m.opt_vec_uint("--n-values", "n_values", o.n_values);
    m.opt_vec_num("--break-fractions", "break_fractions", o.break_fractions);
    m.opt_vec_num("--post-p-grid", "post_p_grid", o.post_p_grid);
    m.opt_vec_num("--post-rho-grid", "post_rho_grid", o.post_rho_grid);
    m.uint("--calibration-windows", "calibration_windows", o.calibration_windows);
    m.num("--calibration-tol", "calibration_tol", o.calibration_tol);
    m.intval("--threads", "threads", o.threads);
    m.str("--statistic", "statistic", o.statistic);
    m.opt_str("--metric", "metric", o.metric);
    m.opt_str("--weight", "weight", o.weight);

    // Common flags shared with the study schema.
    m.intval("--h", "h", o.common.h);
    m.num("--level", "level", o.common.level);
    m.num("--bandwidth", "bandwidth", o.common.bandwidth);
    m.u64("--seed", "seed", o.common.seed);
    m.boolean("--allow-large-h", "allow_large_h", o.common.allow_large_h);

    // CLI-only keys must not reach the study parser.
    m.str("--kernel", "kernel", o.common.kernel);
    m.str("--format", "format", o.common.format);
    m.str("--out", "out", o.common.out_dir);
    if (o.common.kernel != "bartlett")
        fail_usage("unsupported kernel \"" + o.common.kernel + "\"");
    cfg.erase("kernel");
    cfg.erase("format");
    cfg.erase("out");
    return cfg;
}

void print_cells_csv(FILE* f, const json& report) {
    std::fprintf(f, "n,break_at,pre_rho,post_rho,pre_p,post_p,replications,rejections,rate,se,"
                    "runtime_s\n");
    for (const auto& c : report["cells"]) {
        auto num = [&](const char* key) {
            return c[key].is_number() ? csv_num(c[key].get<double>()) : std::string();
        };
        std::fprintf(f, "%llu,%llu,%s,%s,%s,%s,%llu,%llu,%s,%s,%s\n",
                     static_cast<unsigned long long>(c["n"].get<std::uint64_t>()),
                     static_cast<unsigned long long>(c["break_at"].get<std::uint64_t>()),
                     num("pre_rho").c_str(), num("post_rho").c_str(), num("pre_p").c_str(),
                     num("post_p").c_str(),
                     static_cast<unsigned long long>(c["replications"].get<std::uint64_t>()),
                     static_cast<unsigned long long>(c["rejections"].get<std::uint64_t>()),
                     num("rate").c_str(), num("se").c_str(), num("runtime_s").c_str());
    }
}

int run_simulate(CLI::App* cmd, sim_opts& o, const char* forced_kind) {
    json cfg = build_study_config(cmd, o, forced_kind);

    char* report_text = nullptr;
    check(ordpat_run_study(cfg.dump().c_str(), &report_text));
    json report = json::parse(report_text);
    ordpat_free_string(report_text);

    json config_echo = cfg;
    config_echo["command"] = forced_kind ? "power" : "simulate";
    config_echo["format"] = o.common.format;
    if (!o.common.out_dir.empty()) config_echo["out"] = o.common.out_dir;

    if (!o.common.out_dir.empty()) {
        const std::string report_path = out_path(o.common.out_dir, "report.json");
        FILE* rf = open_out(report_path);
        json doc{{"version", ordpat_version()}, {"config", config_echo}, {"results", report}};
        const std::string text = doc.dump(2);
        std::fwrite(text.data(), 1, text.size(), rf);
        std::fputc('\n', rf);
        if (std::fclose(rf) != 0) fail_data("write failed: " + report_path);

        const std::string cells_path = out_path(o.common.out_dir, "cells.csv");
        FILE* cf = open_out(cells_path);
        print_cells_csv(cf, report);
        if (std::fclose(cf) != 0) fail_data("write failed: " + cells_path);
    }

    if (o.common.format == "json") {
        emit_json_doc(config_echo, report);
    } else if (o.common.format == "csv") {
        std::printf("# config: %s\n", config_echo.dump().c_str());
        if (report.contains("ks_reference"))
            std::printf("# ks: statistic=%s p_value=%s reference=%s\n",
                        csv_num(report["ks_statistic"].get<double>()).c_str(),
                        csv_num(report["ks_p_value"].get<double>()).c_str(),
                        report["ks_reference"].get<std::string>().c_str());
        print_cells_csv(stdout, report);
    } else {
        print_config_line(config_echo);
        table_row("kind", report["kind"].get<std::string>());
        table_row("statistic", report["statistic"].get<std::string>());
        table_row("innovation", report["innovation"].get<std::string>());
        table_row("phi", fmt(report["phi"].get<double>()));
        table_row("h", std::to_string(report["h"].get<int>()));
        table_row("level", fmt(report["level"].get<double>()));
        table_row("seed", report["seed"].dump());
        table_row("threads", std::to_string(report["threads_used"].get<int>()));
        for (const auto& c : report["cells"]) {
            auto cell_num = [&](const char* key) {
                return c[key].is_number() ? fmt(c[key].get<double>()) : std::string("n/a");
            };
            std::printf("cell  n=%-6llu break_at=%-6llu pre_rho=%-8s post_rho=%-8s rate=%s (se %s)\n",
                        static_cast<unsigned long long>(c["n"].get<std::uint64_t>()),
                        static_cast<unsigned long long>(c["break_at"].get<std::uint64_t>()),
                        cell_num("pre_rho").c_str(), cell_num("post_rho").c_str(),
                        cell_num("rate").c_str(), cell_num("se").c_str());
        }
        if (report.contains("ks_reference")) {
            table_row("ks statistic", fmt(report["ks_statistic"].get<double>()));
            table_row("ks p-value", fmt(report["ks_p_value"].get<double>()));
            table_row("ks reference", report["ks_reference"].get<std::string>());
            table_row("sample mean", fmt(report["sample_mean"].get<double>()));
            table_row("sample sd", fmt(report["sample_sd"].get<double>()));
        }
        if (report.contains("center_p")) table_row("center p", fmt(report["center_p"].get<double>()));
        table_row("runtime", fmt(report["runtime_s"].get<double>()) + " s");
    }
    return 0;
}

/* -------------------------------------------------------------- calibrate */

struct cal_opts {
    double phi = 0.0, t_df = 2.0, target_p = 0.0, tol = 5e-4;
    std::string innovation = "gaussian";
    std::size_t burn_in = 1000, windows = 1000000;
    int h = 2;
    std::uint64_t seed = 1;
    std::string format = "table", config_file, table_file;
};

int innovation_code(const std::string& name) {
    if (name == "gaussian" || name == "normal") return ORDPAT_INNOV_GAUSSIAN;
    if (name == "student_t" || name == "student-t" || name == "t") return ORDPAT_INNOV_STUDENT_T;
    if (name == "cauchy") return ORDPAT_INNOV_CAUCHY;
    fail_usage("unknown innovation \"" + name + "\"; use gaussian, student_t or cauchy");
}

void append_calibration_row(const std::string& path, const cal_opts& o, double rho,
                            double achieved, double mc_se) {
    const bool fresh = !std::filesystem::exists(path);
    FILE* f = std::fopen(path.c_str(), "a");
    if (!f) fail_data("cannot open " + path + " for appending");
    if (fresh)
        std::fprintf(f, "phi,innovation,t_df,h,target_p,rho,achieved_p,mc_se,windows,seed\n");
    std::fprintf(f, "%.17g,%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%zu,%" PRIu64 "\n", o.phi,
                 o.innovation.c_str(), o.t_df, o.h, o.target_p, rho, achieved, mc_se, o.windows,
                 o.seed);
    if (std::fclose(f) != 0) fail_data("write failed: " + path);
}

int run_calibrate(CLI::App* cmd, cal_opts& o) {
    json cfg = load_config_file(o.config_file);
    cfg_merge m{cmd, cfg};
    m.num("--phi", "phi", o.phi);
    m.str("--innovation", "innovation", o.innovation);
    m.num("--t-df", "t_df", o.t_df);
    m.uint("--burn-in", "burn_in", o.burn_in);
    m.intval("--h", "h", o.h);
    m.num("--target-p", "target_p", o.target_p);
    m.u64("--seed", "seed", o.seed);
    m.uint("--windows", "windows", o.windows);
    m.num("--tol", "tol", o.tol);
    m.str("--format", "format", o.format);
    m.str("--table", "table", o.table_file);
    cfg["command"] = "calibrate";
    if (o.target_p <= 0) fail_usage("--target-p is required and must be positive");

    ordpat_ar1_config c;
    ordpat_ar1_config_init(&c);
    c.phi = o.phi;
    c.innovation = innovation_code(o.innovation);
    c.t_df = o.t_df;
    c.burn_in = o.burn_in;

    double rho = 0, achieved = 0, mc_se = 0;
    check(ordpat_calibrate_rho(&c, o.h, o.target_p, o.seed, o.windows, o.tol, &rho, &achieved,
                               &mc_se));
    if (!o.table_file.empty()) append_calibration_row(o.table_file, o, rho, achieved, mc_se);

    json results{{"phi", o.phi},       {"innovation", o.innovation},
                 {"t_df", o.t_df},     {"h", o.h},
                 {"target_p", o.target_p}, {"rho", rho},
                 {"achieved_p", achieved}, {"mc_se", mc_se},
                 {"windows", o.windows},   {"seed", o.seed}};
    if (!o.table_file.empty()) results["table"] = o.table_file;

    if (o.format == "json") {
        emit_json_doc(cfg, results);
    } else if (o.format == "csv") {
        emit_csv(cfg, {{"phi", csv_num(o.phi)},
                       {"innovation", o.innovation},
                       {"t_df", csv_num(o.t_df)},
                       {"h", std::to_string(o.h)},
                       {"target_p", csv_num(o.target_p)},
                       {"rho", csv_num(rho)},
                       {"achieved_p", csv_num(achieved)},
                       {"mc_se", csv_num(mc_se)},
                       {"windows", std::to_string(o.windows)},
                       {"seed", std::to_string(o.seed)}});
    } else {
        print_config_line(cfg);
        table_row("phi", fmt(o.phi));
        table_row("innovation", o.innovation);
        table_row("h", std::to_string(o.h));
        table_row("target p", fmt(o.target_p));
        table_row("rho", csv_num(rho));
        table_row("achieved p", fmt(achieved));
        table_row("mc se", fmt(mc_se));
        if (!o.table_file.empty()) table_row("appended to", o.table_file);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ordinal-pattern dependence between paired time series"};
    app.require_subcommand(1);
    // --h is the pattern order, so the help flag keeps only its long form.
    app.set_help_flag("--help", "print this help message and exit");
    app.set_version_flag("--version", ordpat_version());

    analyze_opts ao;
    auto* c_analyze = app.add_subcommand("analyze", "estimate p, q, r, s and the ord coefficient");
    add_input_flags(c_analyze, ao.in);
    add_common_flags(c_analyze, ao.common);

    break_opts bo;
    auto* c_break = app.add_subcommand("breaktest", "CUSUM structural-break test");
    add_input_flags(c_break, bo.in);
    add_common_flags(c_break, bo.common);
    c_break->add_option("--metric", bo.metric, "pattern metric: use the weighted statistic");
    c_break->add_option("--weight", bo.weight, "weight function: use the weighted statistic");
    c_break->add_flag("--one-sided", bo.one_sided, "signed excursions (weighted statistic only)");

    awopd_opts wo;
    auto* c_awopd = app.add_subcommand("awopd", "average weighted ordinal pattern dependence");
    add_input_flags(c_awopd, wo.in);
    add_common_flags(c_awopd, wo.common);
    c_awopd->add_option("--metric", wo.metric, "pattern metric name or JSON file (default l1)");
    c_awopd->add_option("--weight", wo.weight,
                        "weight function name or JSON file (default paper-l1-step)");
    c_awopd->add_flag("--one-sided", wo.one_sided, "signed excursions in the break test");
    c_awopd->add_option("--noise-overlay", wo.noise_overlay,
                        "replications of the Gaussian noise-robustness study");

    sim_opts so;
    auto* c_sim = app.add_subcommand("simulate", "Monte Carlo studies of the break test");
    add_sim_flags(c_sim, so, true);

    sim_opts po;
    auto* c_power = app.add_subcommand("power", "power table over n and break-position grids");
    add_sim_flags(c_power, po, false);

    cal_opts co;
    auto* c_cal = app.add_subcommand("calibrate", "solve for rho achieving a target p");
    c_cal->add_option("--phi", co.phi, "AR(1) coefficient (default 0)");
    c_cal->add_option("--innovation", co.innovation, "gaussian, student_t or cauchy");
    c_cal->add_option("--t-df", co.t_df, "student_t degrees of freedom");
    c_cal->add_option("--burn-in", co.burn_in, "burn-in steps (default 1000)");
    c_cal->add_option("--h", co.h, "pattern order (default 2)");
    c_cal->add_option("--target-p", co.target_p, "target coincidence probability");
    c_cal->add_option("--seed", co.seed, "RNG seed (default 1)");
    c_cal->add_option("--windows", co.windows, "windows per evaluation (default 1e6)");
    c_cal->add_option("--tol", co.tol, "bisection tolerance (default 5e-4)");
    c_cal->add_option("--format", co.format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    c_cal->add_option("--config", co.config_file, "JSON config file; explicit flags win");
    c_cal->add_option("--table", co.table_file, "append the result to this calibration CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (c_analyze->parsed()) return run_analyze(c_analyze, ao);
    if (c_break->parsed()) return run_breaktest(c_break, bo);
    if (c_awopd->parsed()) return run_awopd(c_awopd, wo);
    if (c_sim->parsed()) return run_simulate(c_sim, so, nullptr);
    if (c_power->parsed()) return run_simulate(c_power, po, "power_table");
    if (c_cal->parsed()) return run_calibrate(c_cal, co);
    return 1;
}
