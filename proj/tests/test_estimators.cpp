#include "estimators.hpp"

#include "errors.hpp"
#include "helpers.hpp"
#include "metrics.hpp"
#include "patterns.hpp"

#include <cmath>
#include <random>
#include <span>
#include <vector>

using namespace ordpat;

namespace {

const paired_series four_point{{1, 2, 3, 2}, {2, 3, 4, 1}};

std::uint32_t window_rank(std::span<const double> s, std::size_t i, int h) {
    return static_cast<std::uint32_t>(
        pattern_rank(pattern::of_window(s.subspan(i, static_cast<std::size_t>(h) + 1))));
}

// Reference estimators, quadratic but obviously correct.
double naive_p(const paired_series& p, int h) {
    const std::size_t m = p.size() - static_cast<std::size_t>(h);
    double c = 0;
    for (std::size_t i = 0; i < m; ++i)
        if (window_rank(p.x, i, h) == window_rank(p.y, i, h)) c += 1;
    return c / static_cast<double>(p.size());
}

double naive_q(const paired_series& p, int h) {
    const std::size_t m = p.size() - static_cast<std::size_t>(h);
    double c = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (window_rank(p.x, i, h) == window_rank(p.y, j, h)) c += 1;
    return c / (static_cast<double>(p.size()) * static_cast<double>(p.size()));
}

paired_series random_pair(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = u(rng);
    for (auto& v : y) v = u(rng);
    return {std::move(x), std::move(y)};
}

} // namespace

TEST_CASE("paired_series validates lengths") {
    check_throws_with<data_error>([] { paired_series({1, 2}, {1, 2, 3}); },
                                  "misaligned series lengths: 2 vs 3");
    check_throws_with<data_error>([] { paired_series({1, 2}, {1, 2}, {"2020-01-01"}); },
                                  "timestamp count 1 does not match series length 2");
    CHECK(paired_series({1, 2}, {3, 4}).size() == 2);
}

TEST_CASE("negated_y flips y only") {
    paired_series p({1, 2}, {3, -4}, {"2020-01-01", "2020-01-02"});
    auto n = negated_y(p);
    CHECK(n.x == std::vector<double>{1, 2});
    CHECK(n.y == std::vector<double>{-3, 4});
    CHECK(n.timestamps == p.timestamps);
}

TEST_CASE("four-point fixture: every estimator pinned") {
    // X and Y rank sequences are both (1, 1, 0): every window coincides.
    CHECK(coincidence_indicators(four_point, 1) == std::vector<double>{1, 1, 1});
    CHECK(estimate_p(four_point, 1) == 0.75);
    CHECK(estimate_q(four_point, 1) == 0.3125);
    CHECK(estimate_r(four_point, 1) == 0.0);
    CHECK(estimate_s(four_point, 1) == 0.25);

    auto dep = estimate_dependence(four_point, 1);
    CHECK(dep.h == 1);
    CHECK(dep.n == 4);
    CHECK(dep.p == 0.75);
    CHECK(dep.q == 0.3125);
    CHECK(dep.r == 0.0);
    CHECK(dep.s == 0.25);
    CHECK(dep.ord == doctest::Approx(7.0 / 11.0).epsilon(1e-14));
}

TEST_CASE("pattern marginals use divisor n") {
    auto qx = estimate_q_marginals(std::vector<double>{1, 2, 3, 2}, 1);
    REQUIRE(qx.size() == 2);
    CHECK(qx[0] == 0.25); // one falling window
    CHECK(qx[1] == 0.5);  // two rising windows

    // Marginals sum to (n-h)/n, not 1.
    auto p = random_pair(157, 5);
    for (int h : {1, 2, 3}) {
        auto q = estimate_q_marginals(p.x, h);
        double s = 0;
        for (double v : q) s += v;
        CHECK(s == doctest::Approx((157.0 - h) / 157.0).epsilon(1e-13));
    }
}

TEST_CASE("estimators match the quadratic reference on random data") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto p = random_pair(200, seed);
        for (int h : {1, 2, 3}) {
            CHECK(estimate_p(p, h) == doctest::Approx(naive_p(p, h)).epsilon(1e-12));
            CHECK(estimate_q(p, h) == doctest::Approx(naive_q(p, h)).epsilon(1e-12));
        }
    }
}

TEST_CASE("r and s delegate to the negated pair exactly") {
    for (std::uint64_t seed : {11u, 12u}) {
        auto p = random_pair(150, seed);
        auto neg = negated_y(p);
        for (int h : {1, 2, 3}) {
            CHECK(estimate_r(p, h) == estimate_p(neg, h));
            CHECK(estimate_s(p, h) == estimate_q(neg, h));
        }
    }
}

TEST_CASE("estimators are invariant under monotone transformations") {
    auto p = random_pair(120, 21);
    paired_series t = p;
    for (auto& v : t.x) v = std::exp(2.0 * v) + 1.0;
    for (auto& v : t.y) v = 5.0 * v - 3.0;
    for (int h : {1, 2}) {
        CHECK(estimate_p(p, h) == estimate_p(t, h));
        CHECK(estimate_q(p, h) == estimate_q(t, h));
        CHECK(estimate_r(p, h) == estimate_r(t, h));
        CHECK(estimate_s(p, h) == estimate_s(t, h));
    }
}

TEST_CASE("ord coefficient") {
    CHECK(ord_coefficient(0.75, 0.3125, 0.0, 0.25) == doctest::Approx(7.0 / 11.0).epsilon(1e-14));
    // Positive part: a negative numerator contributes nothing.
    CHECK(ord_coefficient(0.1, 0.5, 0.1, 0.5) == 0.0);
    CHECK(ord_coefficient(0.9, 0.5, 0.0, 0.0) == doctest::Approx(0.8));
    // Degenerate denominators resolve to 1.
    CHECK(ord_coefficient(1.0, 1.0, 0.0, 0.0) == 1.0);
    CHECK(ord_coefficient(0.0, 0.0, 1.0, 1.0) == -1.0);
    CHECK(ord_coefficient(1.0, 1.0, 1.0, 1.0) == 0.0);
    check_throws_with<invalid_input>([] { ord_coefficient(1.2, 0, 0, 0); },
                                     "ord inputs must lie in [0,1]");
    check_throws_with<invalid_input>([] { ord_coefficient(0.5, -0.1, 0, 0); },
                                     "ord inputs must lie in [0,1]");
}

TEST_CASE("window count validation") {
    paired_series tiny({1, 2, 3}, {3, 2, 1});
    check_throws_with<invalid_input>([&] { estimate_p(tiny, 3); },
                                     "series length 3 must exceed h = 3");
    check_throws_with<invalid_input>([&] { estimate_dependence(tiny, 7); },
                                     "must exceed h = 7");
}

TEST_CASE("weighted dependence on the four-point fixture") {
    auto metric = pattern_metric::discrete(1);
    auto weight = weight_function::indicator();
    auto v = estimate_awopd(four_point, 1, metric, weight);
    CHECK(v.h == 1);
    CHECK(v.n == 4);
    CHECK(v.awopd_value == 3.0);
    CHECK(v.comparison_value == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(v.d_hat == doctest::Approx(0.4375).epsilon(1e-14));
    CHECK(v.coincidences == 3);
}

TEST_CASE("weighted dependence with the l1 metric and a custom step weight") {
    auto metric = pattern_metric::l1(1);
    auto weight = weight_function::steps({{0.0, 1.0}, {2.0, 0.5}});

    // All windows of the fixture coincide, so every weight is 1.
    auto same = estimate_awopd(four_point, 1, metric, weight);
    CHECK(same.awopd_value == 3.0);
    CHECK(same.coincidences == 3);

    // One discordant third window at l1 distance 2 picks up weight 0.5.
    paired_series shifted({1, 2, 3, 2}, {2, 3, 4, 5});
    auto v = estimate_awopd(shifted, 1, metric, weight);
    CHECK(v.awopd_value == 2.5);
    CHECK(v.coincidences == 2);

    // Identical series score one full weight per window for any metric.
    paired_series self({0.3, 1.7, 0.2, 2.4, 2.2, 0.9}, {0.3, 1.7, 0.2, 2.4, 2.2, 0.9});
    for (int h : {1, 2}) {
        auto m2 = pattern_metric::l1(h);
        auto id = estimate_awopd(self, h, m2, weight);
        CHECK(id.awopd_value == static_cast<double>(self.size() - static_cast<std::size_t>(h)));
        CHECK(id.coincidences == self.size() - static_cast<std::size_t>(h));
    }
}

TEST_CASE("weight series agrees with the weighted estimator") {
    auto p = random_pair(140, 33);
    auto metric = pattern_metric::l1(2);
    auto weight = weight_function::preset("paper-l1-step");
    auto ws = weight_series(p, 2, metric, weight);
    REQUIRE(ws.size() == 138);
    double sum = 0;
    for (double w : ws) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
        sum += w;
    }
    auto v = estimate_awopd(p, 2, metric, weight);
    CHECK(v.awopd_value == doctest::Approx(sum).epsilon(1e-12));

    check_throws_with<invalid_input>([&] { weight_series(p, 3, metric, weight); },
                                     "metric order 2 does not match h = 3");
    check_throws_with<invalid_input>([&] { estimate_awopd(p, 1, metric, weight); },
                                     "metric order 2 does not match h = 1");
}

TEST_CASE("weighted estimator reduces to the classical one under discrete/indicator") {
    auto metric = pattern_metric::discrete(2);
    auto weight = weight_function::indicator();
    for (std::uint64_t seed : {41u, 42u}) {
        auto p = random_pair(180, seed);
        auto v = estimate_awopd(p, 2, metric, weight);
        const double n = static_cast<double>(p.size());
        // Both sides divide the same exact integer sums, so the reduction
        // holds bit for bit, not merely within rounding.
        CHECK(v.awopd_value / n == estimate_p(p, 2));
        CHECK(v.d_hat == estimate_p(p, 2) - estimate_q(p, 2));
    }
}
