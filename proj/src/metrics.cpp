#include "metrics.hpp"

#include "errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace ordpat {

namespace {

void check_same_order(const pattern& a, const pattern& b) {
    if (a.order_h() != b.order_h())
        throw invalid_input("patterns have different orders: " + std::to_string(a.order_h()) +
                            " vs " + std::to_string(b.order_h()));
}

} // namespace

int l1_distance(const pattern& a, const pattern& b) {
    check_same_order(a, b);
    const auto& pa = a.order();
    const auto& pb = b.order();
    int d = 0;
    for (std::size_t j = 0; j < pa.size(); ++j) d += std::abs(pa[j] - pb[j]);
    return d;
}

int chaos_score(const pattern& p) {
    const auto& ord = p.order();
    const int h = p.order_h();
    int up = 0, down = 0;
    for (int j = 0; j <= h; ++j) {
        up += std::abs(ord[static_cast<std::size_t>(j)] - j);
        down += std::abs(ord[static_cast<std::size_t>(j)] - (h - j));
    }
    return std::min(up, down);
}

pattern_metric pattern_metric::discrete(int h) {
    check_order(h, true);
    return pattern_metric(kind::discrete, h, "discrete");
}

pattern_metric pattern_metric::l1(int h) {
    check_order(h, true);
    return pattern_metric(kind::l1, h, "l1");
}

pattern_metric pattern_metric::chaos(int h) {
    check_order(h, true);
    return pattern_metric(kind::chaos, h, "chaos");
}

pattern_metric pattern_metric::by_name(const std::string& name, int h) {
    if (name == "discrete") return discrete(h);
    if (name == "l1") return l1(h);
    if (name == "chaos") return chaos(h);
    throw invalid_input("unknown metric name '" + name + "' (expected discrete, l1 or chaos)");
}

pattern_metric pattern_metric::from_table(int h, std::vector<double> table) {
    if (h < 1 || h > 4)
        throw invalid_input("user-table metrics support 1 <= h <= 4, got h = " + std::to_string(h));
    const std::size_t m = static_cast<std::size_t>(pattern_space_size(h));
    if (table.size() != m * m)
        throw invalid_input("distance table must have (h+1)!^2 = " + std::to_string(m * m) +
                            " entries, got " + std::to_string(table.size()));
    auto at = [&](std::size_t i, std::size_t j) { return table[i * m + j]; };
    auto pair_name = [](std::size_t i, std::size_t j) {
        return "pattern pair (" + std::to_string(i) + ", " + std::to_string(j) + ")";
    };
    for (std::size_t i = 0; i < m; ++i) {
        if (at(i, i) != 0.0)
            throw invalid_input("axiom d(a,a)=0 violated at " + pair_name(i, i));
        for (std::size_t j = 0; j < m; ++j) {
            const double d = at(i, j);
            if (!std::isfinite(d) || d < 0.0)
                throw invalid_input("axiom nonnegativity violated at " + pair_name(i, j));
            if (d != at(j, i))
                throw invalid_input("axiom symmetry violated at " + pair_name(i, j));
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k)
                if (at(i, k) > at(i, j) + at(j, k))
                    throw invalid_input("axiom triangle inequality violated at " + pair_name(i, k) +
                                        " via " + std::to_string(j));
    pattern_metric pm(kind::table, h, "user-table");
    pm.table_ = std::move(table);
    return pm;
}

double pattern_metric::operator()(const pattern& a, const pattern& b) const {
    check_same_order(a, b);
    if (a.order_h() != h_)
        throw invalid_input("metric is for order h = " + std::to_string(h_) + ", patterns have h = " +
                            std::to_string(a.order_h()));
    switch (kind_) {
    case kind::discrete:
        return a == b ? 0.0 : 1.0;
    case kind::l1:
        return static_cast<double>(l1_distance(a, b));
    case kind::chaos:
        return static_cast<double>(std::abs(chaos_score(a) - chaos_score(b)));
    case kind::table: {
        const std::size_t m = static_cast<std::size_t>(pattern_space_size(h_));
        return table_[static_cast<std::size_t>(pattern_rank(a)) * m +
                      static_cast<std::size_t>(pattern_rank(b))];
    }
    }
    throw invalid_input("corrupt metric kind");
}

weight_function weight_function::indicator() {
    return weight_function(kind::indicator, "indicator");
}

weight_function weight_function::steps(std::vector<std::pair<double, double>> table) {
    if (table.empty()) throw invalid_input("step weight table is empty");
    std::sort(table.begin(), table.end());
    if (table.front().first != 0.0 || table.front().second != 1.0)
        throw invalid_input("step weight table must assign weight 1 to distance 0");
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& [d, w] = table[i];
        if (!std::isfinite(d) || d < 0.0)
            throw invalid_input("step weight distance must be finite and nonnegative, got " +
                                std::to_string(d));
        if (!std::isfinite(w) || w < 0.0 || w > 1.0)
            throw invalid_input("step weight at distance " + std::to_string(d) +
                                " must lie in [0,1], got " + std::to_string(w));
        if (i > 0) {
            if (d == table[i - 1].first)
                throw invalid_input("duplicate step weight distance " + std::to_string(d));
            if (w > table[i - 1].second)
                throw invalid_input("step weights must be non-increasing in distance; violated at " +
                                    std::to_string(d));
        }
    }
    weight_function wf(kind::steps, "step-table");
    wf.steps_ = std::move(table);
    return wf;
}

weight_function weight_function::preset(const std::string& name) {
    if (name == "indicator") return indicator();
    if (name == "paper-l1-step") {
        auto wf = steps({{0.0, 1.0}, {2.0, 0.75}, {4.0, 0.5}, {6.0, 0.25}});
        wf.name_ = "paper-l1-step";
        return wf;
    }
    throw invalid_input("unknown weight preset '" + name + "' (expected indicator or paper-l1-step)");
}

weight_function weight_function::from_callable(std::function<double(double)> fn, std::string name) {
    if (!fn) throw invalid_input("weight callable is empty");
    const double at_zero = fn(0.0);
    if (at_zero != 1.0)
        throw invalid_input("weight callable must satisfy w(0) = 1, got w(0) = " +
                            std::to_string(at_zero));
    weight_function wf(kind::callable, std::move(name));
    wf.fn_ = std::move(fn);
    return wf;
}

double weight_function::operator()(double distance) const {
    if (!std::isfinite(distance) || distance < 0.0)
        throw invalid_input("weight argument must be a nonnegative distance, got " +
                            std::to_string(distance));
    switch (kind_) {
    case kind::indicator:
        return distance == 0.0 ? 1.0 : 0.0;
    case kind::steps: {
        auto it = std::lower_bound(steps_.begin(), steps_.end(), distance,
                                   [](const auto& e, double d) { return e.first < d; });
        if (it != steps_.end() && it->first == distance) return it->second;
        return 0.0;
    }
    case kind::callable: {
        const double w = fn_(distance);
        if (!std::isfinite(w) || w < 0.0 || w > 1.0)
            throw invalid_input("weight callable returned " + std::to_string(w) +
                                " outside [0,1] at distance " + std::to_string(distance));
        return w;
    }
    }
    throw invalid_input("corrupt weight kind");
}

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& key, const std::string& problem) {
    throw data_error("metric/weight document: key \"" + key + "\": " + problem);
}

} // namespace

metric_weight_doc parse_metric_weight_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw data_error(std::string("metric/weight document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw data_error("metric/weight document: top level must be an object");

    metric_weight_doc out;
    if (doc.contains("h")) {
        if (!doc["h"].is_number_integer()) schema_error("h", "must be an integer");
        out.h = doc["h"].get<int>();
    }
    if (doc.contains("distances")) {
        if (!out.h) schema_error("h", "required when \"distances\" is present");
        const int h = *out.h;
        if (h < 1 || h > 4) schema_error("h", "user-table metrics support 1 <= h <= 4");
        const auto& rows = doc["distances"];
        if (!rows.is_array()) schema_error("distances", "must be an array of arrays");
        const std::size_t m = static_cast<std::size_t>(pattern_space_size(h));
        if (rows.size() != m)
            schema_error("distances", "expected " + std::to_string(m) + " rows, got " +
                                          std::to_string(rows.size()));
        std::vector<double> table;
        table.reserve(m * m);
        for (std::size_t i = 0; i < m; ++i) {
            const auto& row = rows[i];
            if (!row.is_array() || row.size() != m)
                schema_error("distances", "row " + std::to_string(i) + " must hold " +
                                              std::to_string(m) + " numbers");
            for (const auto& cell : row) {
                if (!cell.is_number()) schema_error("distances", "row " + std::to_string(i) +
                                                                     " holds a non-number");
                table.push_back(cell.get<double>());
            }
        }
        out.metric = pattern_metric::from_table(h, std::move(table));
    }
    if (doc.contains("weights")) {
        const auto& ws = doc["weights"];
        if (!ws.is_object()) schema_error("weights", "must be an object mapping distance to weight");
        std::vector<std::pair<double, double>> steps;
        for (auto it = ws.begin(); it != ws.end(); ++it) {
            char* end = nullptr;
            const double d = std::strtod(it.key().c_str(), &end);
            if (end == it.key().c_str() || *end != '\0')
                schema_error("weights", "key \"" + it.key() + "\" is not a numeric distance");
            if (!it.value().is_number())
                schema_error("weights", "value at \"" + it.key() + "\" is not a number");
            steps.emplace_back(d, it.value().get<double>());
        }
        out.weight = weight_function::steps(std::move(steps));
    }
    if (!out.metric && !out.weight)
        throw data_error("metric/weight document defines neither \"distances\" nor \"weights\"");
    return out;
}

metric_weight_doc load_metric_weight_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open metric/weight document: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_metric_weight_json(buf.str());
}

} // namespace ordpat
