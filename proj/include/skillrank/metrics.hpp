#pragma once

// Comparing a plain ranking with a deduced one: rank correlation, tie counts,
// displacement of a spam leader and score histograms.
//
// Scores are grouped into ties with the same relative tolerance everywhere,
// so "tied" means the same thing for positions, correlations and counts.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "skillrank/pagerank.hpp"
#include "skillrank/ties.hpp"

namespace skillrank {

/// A statistic is undefined for the given input (e.g. zero variance).
class MetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Dense integer key per member: equal keys iff tied, larger key = larger
/// score.
inline std::vector<std::int64_t> tie_class_keys(std::span<const double> scores, double tol = kDefaultTieTolerance) {
    auto order = order_by_score(scores);
    auto groups = tie_groups(scores, order, tol);
    std::vector<std::int64_t> keys(scores.size());
    auto key = static_cast<std::int64_t>(groups.size());
    for (const auto& g : groups) {
        for (std::size_t k = g.begin; k < g.end; ++k) keys[order[k]] = key;
        --key;
    }
    return keys;
}

/// Fractional ranks, 1 = lowest score; tied members share their mean rank.
inline std::vector<double> average_ranks(std::span<const double> scores, double tol = kDefaultTieTolerance) {
    auto order = order_by_score(scores);
    auto groups = tie_groups(scores, order, tol);
    const std::size_t n = scores.size();
    std::vector<double> ranks(n);
    for (const auto& g : groups) {
        // Descending positions begin+1..end map to ascending ranks n-end+1..n-begin.
        const double mean = static_cast<double>(2 * n - g.begin - g.end + 1) / 2.0;
        for (std::size_t k = g.begin; k < g.end; ++k) ranks[order[k]] = mean;
    }
    return ranks;
}

/// Spearman's rho: Pearson correlation of the average ranks.
inline double spearman_rho(std::span<const double> a, std::span<const double> b, double tol = kDefaultTieTolerance) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman_rho needs equal-length inputs");
    if (a.size() < 2) throw std::invalid_argument("spearman_rho needs at least two members");
    const auto ra = average_ranks(a, tol);
    const auto rb = average_ranks(b, tol);
    const double n = static_cast<double>(a.size());
    const double mean = (n + 1.0) / 2.0;  // average ranks always sum to n(n+1)/2
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw MetricError("spearman_rho undefined: a ranking is fully tied");
    return sab / std::sqrt(saa * sbb);
}

inline double spearman_rho(const RankVector& a, const RankVector& b, double tol = kDefaultTieTolerance) {
    return spearman_rho(a.scores, b.scores, tol);
}

enum class TauVariant { b, a };

/// Pair counts behind Kendall's tau. `ties_a_only` counts pairs tied in a but
/// not in b, and vice versa; `ties_both` counts pairs tied in both.
struct PairCounts {
    std::int64_t concordant = 0;
    std::int64_t discordant = 0;
    std::int64_t ties_a_only = 0;
    std::int64_t ties_b_only = 0;
    std::int64_t ties_both = 0;
};

namespace detail {

inline std::int64_t tied_pairs(std::int64_t group) { return group * (group - 1) / 2; }

/// Sorts `v` and returns the number of inversions (i < j, v[i] > v[j]).
inline std::int64_t count_inversions(std::vector<std::int64_t>& v) {
    std::vector<std::int64_t> buffer(v.size());
    std::int64_t swaps = 0;
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
            const std::size_t mid = std::min(lo + width, v.size());
            const std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) {
                if (v[j] < v[i]) {
                    swaps += static_cast<std::int64_t>(mid - i);
                    buffer[k++] = v[j++];
                } else {
                    buffer[k++] = v[i++];
                }
            }
            while (i < mid) buffer[k++] = v[i++];
            while (j < hi) buffer[k++] = v[j++];
        }
        v.swap(buffer);
    }
    return swaps;
}

}  // namespace detail

/// Knight's O(n log n) pair counting over integer keys.
inline PairCounts count_pairs(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    if (a.size() != b.size()) throw std::invalid_argument("count_pairs needs equal-length inputs");
    const auto n = static_cast<std::int64_t>(a.size());
    std::vector<std::size_t> idx(a.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) {
        return a[x] != a[y] ? a[x] < a[y] : b[x] < b[y];
    });

    std::int64_t tied_a = 0, tied_joint = 0;
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j < idx.size() && a[idx[j]] == a[idx[i]]) ++j;
        tied_a += detail::tied_pairs(static_cast<std::int64_t>(j - i));
        for (std::size_t p = i; p < j;) {
            std::size_t q = p;
            while (q < j && b[idx[q]] == b[idx[p]]) ++q;
            tied_joint += detail::tied_pairs(static_cast<std::int64_t>(q - p));
            p = q;
        }
        i = j;
    }

    std::vector<std::int64_t> b_in_a_order(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) b_in_a_order[i] = b[idx[i]];
    const std::int64_t discordant = detail::count_inversions(b_in_a_order);

    std::int64_t tied_b = 0;
    for (std::size_t i = 0; i < b_in_a_order.size();) {
        std::size_t j = i;
        while (j < b_in_a_order.size() && b_in_a_order[j] == b_in_a_order[i]) ++j;
        tied_b += detail::tied_pairs(static_cast<std::int64_t>(j - i));
        i = j;
    }

    PairCounts c;
    c.ties_both = tied_joint;
    c.ties_a_only = tied_a - tied_joint;
    c.ties_b_only = tied_b - tied_joint;
    c.discordant = discordant;
    c.concordant = detail::tied_pairs(n) - tied_a - tied_b + tied_joint - discordant;
    return c;
}

/// tau-b = (C - D) / sqrt((C + D + T_b) (C + D + T_a)); tau-a = (C - D) / (n(n-1)/2).
inline double tau_from_counts(const PairCounts& c, TauVariant variant) {
    const std::int64_t diff = c.concordant - c.discordant;
    if (variant == TauVariant::a) {
        const std::int64_t total = c.concordant + c.discordant + c.ties_a_only + c.ties_b_only + c.ties_both;
        if (total == 0) throw MetricError("kendall_tau undefined for fewer than two members");
        return static_cast<double>(diff) / static_cast<double>(total);
    }
    const std::int64_t untied_a = c.concordant + c.discordant + c.ties_b_only;
    const std::int64_t untied_b = c.concordant + c.discordant + c.ties_a_only;
    if (untied_a == 0 || untied_b == 0) throw MetricError("kendall_tau undefined: a ranking is fully tied");
    return static_cast<double>(diff) / std::sqrt(static_cast<double>(untied_a) * static_cast<double>(untied_b));
}

inline double kendall_tau(std::span<const double> a, std::span<const double> b, TauVariant variant = TauVariant::b,
                          double tol = kDefaultTieTolerance) {
    if (a.size() != b.size()) throw std::invalid_argument("kendall_tau needs equal-length inputs");
    if (a.size() < 2) throw std::invalid_argument("kendall_tau needs at least two members");
    const auto ka = tie_class_keys(a, tol);
    const auto kb = tie_class_keys(b, tol);
    return tau_from_counts(count_pairs(ka, kb), variant);
}

inline double kendall_tau(const RankVector& a, const RankVector& b, TauVariant variant = TauVariant::b,
                          double tol = kDefaultTieTolerance) {
    return kendall_tau(a.scores, b.scores, variant, tol);
}

struct TieSummary {
    /// Members sharing their score with at least one other member.
    std::size_t tied_members = 0;
    /// Tie groups of size two or more.
    std::size_t groups = 0;
};

inline TieSummary tie_summary(std::span<const double> scores, double tol = kDefaultTieTolerance) {
    if (tol < 0.0) throw std::invalid_argument("tie tolerance must be non-negative");
    auto order = order_by_score(scores);
    TieSummary s;
    for (const auto& g : tie_groups(scores, order, tol)) {
        if (g.size() > 1) {
            s.tied_members += g.size();
            ++s.groups;
        }
    }
    return s;
}

inline std::size_t count_ties(std::span<const double> scores, double tol = kDefaultTieTolerance) {
    return tie_summary(scores, tol).tied_members;
}

inline std::size_t count_ties(const RankVector& r, double tol = kDefaultTieTolerance) {
    return count_ties(r.scores, tol);
}

/// Integer percent, half away from zero.
inline long percent_of(double part, std::size_t whole) {
    return std::lround(part / static_cast<double>(whole) * 100.0);
}

struct LeaderDisplacement {
    std::size_t position_without = 0;
    std::size_t position_with = 0;
    /// round((with - without) / n * 100)
    long fall_pct = 0;
};

inline LeaderDisplacement leader_displacement(const RankVector& without, const RankVector& with_, MemberId leader,
                                              double tol = kDefaultTieTolerance) {
    if (leader >= without.size() || leader >= with_.size()) throw std::invalid_argument("leader not covered by ranking");
    LeaderDisplacement d;
    d.position_without = rank_positions(without, tol)[leader];
    d.position_with = rank_positions(with_, tol)[leader];
    d.fall_pct = percent_of(static_cast<double>(d.position_with) - static_cast<double>(d.position_without),
                            with_.size());
    return d;
}

struct Histogram {
    double low = 0.0;
    double high = 0.0;
    std::vector<std::size_t> counts;

    double bin_low(std::size_t i) const { return low + (high - low) * static_cast<double>(i) / counts.size(); }
    double bin_high(std::size_t i) const { return low + (high - low) * static_cast<double>(i + 1) / counts.size(); }
    std::size_t nonempty_bins() const {
        return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
    }
};

/// Equal-width bins over [low, high]; the top edge belongs to the last bin.
inline Histogram score_histogram(std::span<const double> scores, std::size_t n_bins, double low, double high) {
    if (n_bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    Histogram h{low, high, std::vector<std::size_t>(n_bins, 0)};
    const double width = high - low;
    for (double s : scores) {
        std::size_t bin = 0;
        if (width > 0.0) {
            const double pos = (s - low) / width * static_cast<double>(n_bins);
            bin = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), n_bins - 1);
        }
        ++h.counts[bin];
    }
    return h;
}

/// Bins spanning the observed [min, max] score range.
inline Histogram score_histogram(std::span<const double> scores, std::size_t n_bins) {
    if (scores.empty()) return score_histogram(scores, n_bins, 0.0, 0.0);
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    return score_histogram(scores, n_bins, *lo, *hi);
}

inline Histogram score_histogram(const RankVector& r, std::size_t n_bins) { return score_histogram(r.scores, n_bins); }

}  // namespace skillrank
