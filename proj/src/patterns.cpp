#include "patterns.hpp"

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace ordpat {

namespace {

constexpr std::array<std::uint64_t, 21> factorials = [] {
    std::array<std::uint64_t, 21> f{};
    f[0] = 1;
    for (int i = 1; i <= 20; ++i) f[i] = f[i - 1] * static_cast<std::uint64_t>(i);
    return f;
}();

void check_window_values(std::span<const double> w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!std::isfinite(w[i]))
            throw invalid_input("non-finite value at window position " + std::to_string(i));
    }
}

} // namespace

std::uint64_t factorial(int m) {
    if (m < 0 || m > 20) throw invalid_input("factorial argument out of range [0,20]");
    return factorials[static_cast<std::size_t>(m)];
}

std::uint64_t pattern_space_size(int h) {
    check_order(h, true);
    return factorials[static_cast<std::size_t>(h + 1)];
}

void check_order(int h, bool allow_large_h) {
    if (h < 1) throw invalid_input("pattern order h must be >= 1, got " + std::to_string(h));
    if (h > absolute_max_h)
        throw invalid_input("pattern order h = " + std::to_string(h) + " exceeds the hard cap " +
                            std::to_string(absolute_max_h));
    if (h > default_max_h && !allow_large_h)
        throw invalid_input("pattern order h = " + std::to_string(h) + " exceeds the default cap " +
                            std::to_string(default_max_h) + "; pass the large-h override to allow up to " +
                            std::to_string(absolute_max_h));
}

pattern::pattern(std::vector<int> order) : order_(std::move(order)) {
    const int h = static_cast<int>(order_.size()) - 1;
    if (h < 1 || h > absolute_max_h)
        throw invalid_input("pattern order vector must have between 2 and " +
                            std::to_string(absolute_max_h + 1) + " entries");
    std::uint32_t seen = 0;
    for (int v : order_) {
        if (v < 0 || v > h) throw invalid_input("pattern order entry " + std::to_string(v) + " out of range");
        seen |= 1u << v;
    }
    if (seen != (1u << (h + 1)) - 1u)
        throw invalid_input("pattern order vector is not a permutation of {0,...,h}");
}

pattern pattern::of_window(std::span<const double> window) {
    const int h = static_cast<int>(window.size()) - 1;
    if (h < 1 || h > absolute_max_h)
        throw invalid_input("window must have between 2 and " + std::to_string(absolute_max_h + 1) +
                            " values");
    check_window_values(window);
    std::vector<int> order(window.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (window[static_cast<std::size_t>(a)] != window[static_cast<std::size_t>(b)])
            return window[static_cast<std::size_t>(a)] > window[static_cast<std::size_t>(b)];
        return a > b;
    });
    return pattern(unchecked{}, std::move(order));
}

pattern pattern::reflected() const {
    std::vector<int> rev(order_.rbegin(), order_.rend());
    return pattern(unchecked{}, std::move(rev));
}

std::uint64_t pattern_rank(const pattern& p) {
    const auto& ord = p.order();
    const std::size_t len = ord.size();
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i + 1 < len; ++i) {
        unsigned smaller_right = 0;
        for (std::size_t j = i + 1; j < len; ++j)
            if (ord[j] < ord[i]) ++smaller_right;
        rank += smaller_right * factorials[len - 1 - i];
    }
    return rank;
}

pattern pattern_unrank(std::uint64_t index, int h) {
    if (h < 1 || h > absolute_max_h)
        throw invalid_input("pattern order h out of range [1," + std::to_string(absolute_max_h) + "]");
    const std::size_t len = static_cast<std::size_t>(h) + 1;
    if (index >= factorials[len])
        throw invalid_input("pattern index " + std::to_string(index) + " out of range for h = " +
                            std::to_string(h));
    std::vector<int> pool(len);
    for (std::size_t i = 0; i < len; ++i) pool[i] = static_cast<int>(i);
    std::vector<int> order;
    order.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        const std::uint64_t f = factorials[len - 1 - i];
        const std::size_t digit = static_cast<std::size_t>(index / f);
        index %= f;
        order.push_back(pool[digit]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
    return pattern(std::move(order));
}

std::vector<std::uint32_t> pattern_sequence(std::span<const double> series, int h,
                                            bool allow_large_h) {
    check_order(h, allow_large_h);
    const std::size_t n = series.size();
    if (n <= static_cast<std::size_t>(h))
        throw invalid_input("series length " + std::to_string(n) + " must exceed h = " +
                            std::to_string(h));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(series[i]))
            throw invalid_input("non-finite value at index " + std::to_string(i));
    }

    const std::size_t len = static_cast<std::size_t>(h) + 1;
    const std::size_t m = n - static_cast<std::size_t>(h);
    std::vector<std::uint32_t> out(m);

    // ord holds window-relative positions sorted descending by value, ties by
    // descending position. Retained positions keep their relative order when
    // the window slides, so one removal and one insertion per step suffice.
    std::array<int, absolute_max_h + 1> ord{};
    const double* w = series.data();

    int count = 0;
    for (std::size_t p = 0; p < len; ++p) {
        const double v = w[p];
        int ins = 0;
        while (ins < count && w[ord[static_cast<std::size_t>(ins)]] > v) ++ins;
        for (int k = count; k > ins; --k) ord[static_cast<std::size_t>(k)] = ord[static_cast<std::size_t>(k - 1)];
        ord[static_cast<std::size_t>(ins)] = static_cast<int>(p);
        ++count;
    }

    const std::uint64_t* fact = factorials.data();
    for (std::size_t win = 0;; ++win) {
        // Lexicographic rank of the current order vector.
        std::uint64_t rank = 0;
        for (std::size_t i = 0; i + 1 < len; ++i) {
            unsigned smaller = 0;
            const int oi = ord[i];
            for (std::size_t j = i + 1; j < len; ++j)
                if (ord[j] < oi) ++smaller;
            rank += smaller * fact[len - 1 - i];
        }
        out[win] = static_cast<std::uint32_t>(rank);
        if (win + 1 == m) break;

        // Slide: drop relative position 0, shift, append position h.
        std::size_t k = 0;
        for (std::size_t i = 0; i < len; ++i) {
            if (ord[i] != 0) {
                ord[k++] = ord[i] - 1;
            }
        }
        w = series.data() + win + 1;
        const double v = w[len - 1];
        std::size_t ins = 0;
        while (ins < len - 1 && w[ord[ins]] > v) ++ins;
        for (std::size_t j = len - 1; j > ins; --j) ord[j] = ord[j - 1];
        ord[ins] = h;
    }
    return out;
}

} // namespace ordpat
