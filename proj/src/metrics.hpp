#pragma once

#include "patterns.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ordpat {

// l1 distance between two pattern order vectors of equal order h:
// sum_j |pi^(j) - sigma^(j)|. Always even.
int l1_distance(const pattern& a, const pattern& b);

// Distance to the nearer of the two monotone patterns (identity and its
// reversal) in l1 distance. 0 exactly for the monotone patterns.
int chaos_score(const pattern& p);

// Pseudo-metric on the pattern space of one fixed order h. All built-ins
// satisfy the metric axioms except that "chaos" is only a pseudo-metric
// (distinct patterns with equal chaos scores have distance 0).
class pattern_metric {
public:
    static pattern_metric discrete(int h);
    static pattern_metric l1(int h);
    static pattern_metric chaos(int h);
    // name: "discrete" | "l1" | "chaos".
    static pattern_metric by_name(const std::string& name, int h);

    // Dense row-major (h+1)! x (h+1)! table indexed by lexicographic pattern
    // rank. Pseudo-metric axioms (nonnegativity, d(a,a)=0, symmetry,
    // triangle inequality) are verified exhaustively on construction, which
    // bounds user tables to h <= 4.
    static pattern_metric from_table(int h, std::vector<double> table);

    int order_h() const { return h_; }
    const std::string& name() const { return name_; }

    double operator()(const pattern& a, const pattern& b) const;

private:
    enum class kind { discrete, l1, chaos, table };
    pattern_metric(kind k, int h, std::string name) : kind_(k), h_(h), name_(std::move(name)) {}
    kind kind_;
    int h_;
    std::string name_;
    std::vector<double> table_; // kind::table only
};

// Weight applied to pattern distances. Maps into [0,1], w(0) = 1, and is
// non-increasing over its listed distances; checked at construction.
class weight_function {
public:
    static weight_function indicator();
    // steps: (distance, weight) pairs. Must list distance 0 with weight 1;
    // distances strictly increasing, weights non-increasing, all in [0,1].
    // Distances not listed map to weight 0.
    static weight_function steps(std::vector<std::pair<double, double>> table);
    // name: "indicator" | "paper-l1-step" (1 at 0, 0.75 at 2, 0.5 at 4, 0.25 at 6).
    static weight_function preset(const std::string& name);
    // Arbitrary callable; w(0) == 1 checked at construction, range [0,1]
    // checked on every evaluation.
    static weight_function from_callable(std::function<double(double)> fn, std::string name);

    double operator()(double distance) const;
    const std::string& name() const { return name_; }

private:
    enum class kind { indicator, steps, callable };
    weight_function(kind k, std::string name) : kind_(k), name_(std::move(name)) {}
    kind kind_;
    std::string name_;
    std::vector<std::pair<double, double>> steps_;
    std::function<double(double)> fn_;
};

// JSON document with optional "distances" (requires "h") and optional
// "weights" sections:
//   {"h": 2, "distances": [[...], ...], "weights": {"0": 1.0, "2": 0.5}}
// Schema violations raise data errors naming the offending key; axiom
// violations inside a valid schema raise invalid-input errors.
struct metric_weight_doc {
    std::optional<int> h;
    std::optional<pattern_metric> metric;
    std::optional<weight_function> weight;
};
metric_weight_doc parse_metric_weight_json(const std::string& text);
metric_weight_doc load_metric_weight_file(const std::string& path);

} // namespace ordpat
