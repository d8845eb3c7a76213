#pragma once

// Tie grouping over score arrays. Two scores are tied when they differ by at
// most `tol` relative to the larger magnitude; groups are maximal chains of
// neighbors in descending score order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace skillrank {

inline constexpr double kDefaultTieTolerance = 1e-9;

inline bool scores_tied(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

/// Member indices sorted by descending score, ties broken by ascending index.
inline std::vector<std::size_t> order_by_score(std::span<const double> scores) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

/// Half-open [begin, end) ranges into `order` that form tie groups.
struct TieGroup {
    std::size_t begin;
    std::size_t end;
    std::size_t size() const noexcept { return end - begin; }
};

inline std::vector<TieGroup> tie_groups(std::span<const double> scores, std::span<const std::size_t> order,
                                        double tol) {
    std::vector<TieGroup> groups;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && scores_tied(scores[order[j - 1]], scores[order[j]], tol)) ++j;
        groups.push_back({i, j});
        i = j;
    }
    return groups;
}

}  // namespace skillrank
