#pragma once

#include "metrics.hpp"
#include "patterns.hpp"

#include <cstdint>
#include <unordered_map>

namespace ordpat::detail {

// Memoizing evaluator for w(d(a,b)) keyed by lexicographic pattern-index
// pairs; each index is unranked at most once.
class pair_weight_cache {
public:
    pair_weight_cache(int h, const pattern_metric& metric, const weight_function& weight)
        : h_(h), metric_(metric), weight_(weight) {}

    double operator()(std::uint32_t a, std::uint32_t b) {
        const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const double w = weight_(metric_(unranked(a), unranked(b)));
        cache_.emplace(key, w);
        return w;
    }

private:
    const pattern& unranked(std::uint32_t idx) {
        auto it = patterns_.find(idx);
        if (it == patterns_.end()) it = patterns_.emplace(idx, pattern_unrank(idx, h_)).first;
        return it->second;
    }

    int h_;
    const pattern_metric& metric_;
    const weight_function& weight_;
    std::unordered_map<std::uint64_t, double> cache_;
    std::unordered_map<std::uint32_t, pattern> patterns_;
};

} // namespace ordpat::detail
