#pragma once

// Standard, weighted and personalized PageRank by power iteration on the
// sparse endorsement digraph.
//
// The Google matrix is never assembled. Each sweep pushes alpha * x_u along
// the normalized out-arcs of u, then spreads the mass held by dangling members
// (zero out-weight) together with the (1 - alpha) restart mass over the
// restart distribution. Rows are visited in ascending member order so results
// are bit-reproducible.

#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "skillrank/graph.hpp"
#include "skillrank/io.hpp"
#include "skillrank/ties.hpp"

namespace skillrank {

struct PageRankParams {
    double alpha = 0.85;
    /// Restart distribution; uniform when empty.
    std::optional<std::vector<double>> personalization;
    double tolerance = 1e-12;
    std::size_t max_iterations = 1000;
};

struct RankVector {
    std::vector<double> scores;
    std::size_t iterations_used = 0;
    /// L1 distance between the last two iterates.
    double residual = 0.0;
    bool converged = true;

    std::size_t size() const noexcept { return scores.size(); }
};

/// Row i of the link matrix: w(i,j) / out_weight_sum(i), or 1/n everywhere when
/// i has no out-arcs.
inline std::vector<double> transition_row(const EndorsementDigraph& d, MemberId i) {
    const std::size_t n = d.size();
    const double total = d.out_weight_sum(i);
    if (total <= 0.0) return std::vector<double>(n, 1.0 / static_cast<double>(n));
    std::vector<double> row(n, 0.0);
    for (const auto& a : d.out_arcs(i)) row[a.target] = a.weight / total;
    return row;
}

namespace detail {

inline void validate(const EndorsementDigraph& d, const PageRankParams& params) {
    if (d.size() == 0) throw std::invalid_argument("pagerank needs at least one member");
    if (!(params.alpha > 0.0 && params.alpha < 1.0)) {
        throw std::invalid_argument("damping factor must lie in (0,1), got " + std::to_string(params.alpha));
    }
    if (params.personalization) {
        const auto& v = *params.personalization;
        if (v.size() != d.size()) throw std::invalid_argument("personalization vector has wrong length");
        double sum = 0.0;
        for (double x : v) {
            if (!(x >= 0.0)) throw std::invalid_argument("personalization entries must be non-negative");
            sum += x;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("personalization vector must sum to 1");
    }
}

template <bool Weighted>
RankVector power_iteration(const EndorsementDigraph& d, const PageRankParams& params) {
    validate(d, params);
    const std::size_t n = d.size();
    const double alpha = params.alpha;
    const double uniform = 1.0 / static_cast<double>(n);
    const std::vector<double>* restart = params.personalization ? &*params.personalization : nullptr;

    std::vector<double> x(n, uniform);
    std::vector<double> next(n);
    RankVector result;
    result.converged = false;

    for (std::size_t iter = 1; iter <= params.max_iterations; ++iter) {
        double dangling = 0.0;
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t u = 0; u < n; ++u) {
            const auto member = static_cast<MemberId>(u);
            const double total = Weighted ? d.out_weight_sum(member) : static_cast<double>(d.out_degree(member));
            if (total <= 0.0) {
                dangling += x[u];
                continue;
            }
            const double share = alpha * x[u] / total;
            for (const auto& a : d.out_arcs(member)) next[a.target] += Weighted ? share * a.weight : share;
        }
        const double spread = alpha * dangling + (1.0 - alpha);
        double sum = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            next[v] += spread * (restart ? (*restart)[v] : uniform);
            sum += next[v];
        }
        double residual = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            next[v] /= sum;
            residual += std::abs(next[v] - x[v]);
        }
        x.swap(next);
        result.iterations_used = iter;
        result.residual = residual;
        if (residual <= params.tolerance) {
            result.converged = true;
            break;
        }
    }
    result.scores = std::move(x);
    return result;
}

}  // namespace detail

/// Weighted PageRank: the surfer follows an arc with probability proportional
/// to its weight.
inline RankVector pagerank(const EndorsementDigraph& d, const PageRankParams& params = {}) {
    return detail::power_iteration<true>(d, params);
}

/// Standard PageRank on the arc structure alone; weights are ignored.
inline RankVector pagerank_unweighted(const EndorsementDigraph& d, const PageRankParams& params = {}) {
    return detail::power_iteration<false>(d, params);
}

/// Competition ranking: position 1 is the best score and tied members share
/// the best position of their group (1, 2, 2, 4).
inline std::vector<std::size_t> rank_positions(const std::vector<double>& scores,
                                               double tie_tolerance = kDefaultTieTolerance) {
    auto order = order_by_score(scores);
    std::vector<std::size_t> positions(scores.size());
    for (const auto& g : tie_groups(scores, order, tie_tolerance)) {
        for (std::size_t k = g.begin; k < g.end; ++k) positions[order[k]] = g.begin + 1;
    }
    return positions;
}

inline std::vector<std::size_t> rank_positions(const RankVector& r, double tie_tolerance = kDefaultTieTolerance) {
    return rank_positions(r.scores, tie_tolerance);
}

/// CSV with header "member_index,score,position".
inline void write_rank_csv(std::ostream& out, const RankVector& r, double tie_tolerance = kDefaultTieTolerance) {
    auto positions = rank_positions(r, tie_tolerance);
    out << "member_index,score,position\n";
    for (std::size_t v = 0; v < r.size(); ++v) {
        out << v << ',' << format_double(r.scores[v]) << ',' << positions[v] << '\n';
    }
}

}  // namespace skillrank
