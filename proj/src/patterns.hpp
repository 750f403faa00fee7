#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ordpat {

// Pattern order caps. Cheap per-pattern operations accept any h up to
// absolute_max_h; operations that allocate or iterate the full pattern space
// ((h+1)! elements) refuse h > default_max_h unless the caller passes an
// explicit override, and never accept h > absolute_max_h.
inline constexpr int default_max_h = 8;
inline constexpr int absolute_max_h = 10;

std::uint64_t factorial(int m); // 0 <= m <= 20

std::uint64_t pattern_space_size(int h); // (h+1)!

// Validates 1 <= h and the cap policy above.
void check_order(int h, bool allow_large_h = false);

// Ordinal pattern of h+1 values: the permutation (r_0,...,r_h) of {0,...,h}
// with x[r_0] >= x[r_1] >= ... >= x[r_h], ties broken so that r_{j-1} > r_j
// whenever x[r_{j-1}] == x[r_j]. Equality is exact floating-point equality.
class pattern {
public:
    // order must be a permutation of {0,...,h}; h within [1, absolute_max_h].
    explicit pattern(std::vector<int> order);

    // Pattern of one window; window.size() == h+1, values finite.
    static pattern of_window(std::span<const double> window);

    int order_h() const { return static_cast<int>(order_.size()) - 1; }
    const std::vector<int>& order() const { return order_; }

    // Reversal of the order vector; equals the pattern of the negated window
    // when the window has pairwise distinct values.
    pattern reflected() const;

    bool operator==(const pattern&) const = default;

private:
    struct unchecked {};
    pattern(unchecked, std::vector<int> order) : order_(std::move(order)) {}
    std::vector<int> order_;
};

// Lexicographic rank of the order vector among all permutations of
// {0,...,h}: (0,1,...,h) -> 0, (h,...,1,0) -> (h+1)!-1. Bijective with
// pattern_unrank for every h.
std::uint64_t pattern_rank(const pattern& p);
pattern pattern_unrank(std::uint64_t index, int h);

// Lexicographic ranks of all n-h sliding windows of length h+1, in window
// order. Maintains the previous window's sorted order, so each step costs
// O(h) for the slide plus the rank computation instead of a full re-sort.
// Requires n > h; all values finite.
std::vector<std::uint32_t> pattern_sequence(std::span<const double> series, int h,
                                            bool allow_large_h = false);

} // namespace ordpat
