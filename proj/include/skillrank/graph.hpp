#pragma once

// Member networks and per-skill endorsement digraphs.
//
// Both graphs are immutable once built and keep their adjacency in compressed
// row form sorted by neighbor id, so row scans are contiguous and lookups are
// a binary search.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace skillrank {

using MemberId = std::uint32_t;
using SkillId = std::uint32_t;

/// Raised when a graph would violate one of its structural invariants.
class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Undirected network of contacts over dense member ids 0..n-1.
class MemberGraph {
public:
    using Edge = std::pair<MemberId, MemberId>;

    MemberGraph() = default;

    /// Duplicate and reversed pairs collapse to one edge. Self-loops and
    /// out-of-range endpoints throw GraphError.
    MemberGraph(std::size_t n, std::vector<Edge> edges) : n_(n) {
        for (auto& [u, v] : edges) {
            if (u >= n || v >= n) {
                throw GraphError("edge " + std::to_string(u) + "-" + std::to_string(v) +
                                 " has an endpoint >= n=" + std::to_string(n));
            }
            if (u == v) {
                throw GraphError("self-loop on member " + std::to_string(u));
            }
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        edges_ = std::move(edges);

        offsets_.assign(n_ + 1, 0);
        for (const auto& [u, v] : edges_) {
            ++offsets_[u + 1];
            ++offsets_[v + 1];
        }
        for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        adjacency_.resize(offsets_[n_]);
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto& [u, v] : edges_) {
            adjacency_[fill[u]++] = v;
            adjacency_[fill[v]++] = u;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            std::sort(adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                      adjacency_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }

    /// Edges as (u, v) with u < v, sorted lexicographically.
    const std::vector<Edge>& edges() const noexcept { return edges_; }

    std::span<const MemberId> neighbors(MemberId v) const {
        return {adjacency_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    std::size_t degree(MemberId v) const { return offsets_[v + 1] - offsets_[v]; }

    bool has_edge(MemberId u, MemberId v) const {
        if (u >= n_ || v >= n_) return false;
        auto row = neighbors(u);
        return std::binary_search(row.begin(), row.end(), v);
    }

    friend bool operator==(const MemberGraph& a, const MemberGraph& b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_;
    }

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<MemberId> adjacency_;
};

struct Arc {
    MemberId source;
    MemberId target;
    double weight = 1.0;

    friend bool operator==(const Arc&, const Arc&) = default;
};

struct OutArc {
    MemberId target;
    double weight;
};

/// Weighted endorsement digraph for one skill. An arc (u, v, w) means u
/// endorses v with confidence w in (0, 1]; absent arcs have weight 0 and are
/// never stored.
class EndorsementDigraph {
public:
    explicit EndorsementDigraph(std::size_t n = 0) : n_(n), offsets_(n + 1, 0), out_sums_(n, 0.0) {}

    EndorsementDigraph(std::size_t n, std::vector<Arc> arcs) : n_(n) {
        for (const auto& a : arcs) {
            if (a.source >= n || a.target >= n) {
                throw GraphError("arc " + std::to_string(a.source) + "->" + std::to_string(a.target) +
                                 " has an endpoint >= n=" + std::to_string(n));
            }
            if (a.source == a.target) {
                throw GraphError("self-loop on member " + std::to_string(a.source));
            }
            if (!(a.weight > 0.0) || a.weight > 1.0) {
                throw GraphError("arc " + std::to_string(a.source) + "->" + std::to_string(a.target) +
                                 " has weight outside (0,1]: " + std::to_string(a.weight));
            }
        }
        std::sort(arcs.begin(), arcs.end(), [](const Arc& x, const Arc& y) {
            return std::pair(x.source, x.target) < std::pair(y.source, y.target);
        });
        for (std::size_t i = 1; i < arcs.size(); ++i) {
            if (arcs[i].source == arcs[i - 1].source && arcs[i].target == arcs[i - 1].target) {
                throw GraphError("duplicate arc " + std::to_string(arcs[i].source) + "->" +
                                 std::to_string(arcs[i].target));
            }
        }

        offsets_.assign(n_ + 1, 0);
        out_sums_.assign(n_, 0.0);
        row_.reserve(arcs.size());
        for (const auto& a : arcs) {
            ++offsets_[a.source + 1];
            row_.push_back({a.target, a.weight});
        }
        for (std::size_t i = 0; i < n_; ++i) offsets_[i + 1] += offsets_[i];
        // Ascending target order inside each row fixes the summation order.
        for (std::size_t v = 0; v < n_; ++v) {
            double sum = 0.0;
            for (const auto& oa : out_arcs(static_cast<MemberId>(v))) sum += oa.weight;
            out_sums_[v] = sum;
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t arc_count() const noexcept { return row_.size(); }

    std::span<const OutArc> out_arcs(MemberId v) const {
        return {row_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    std::size_t out_degree(MemberId v) const { return offsets_[v + 1] - offsets_[v]; }

    /// Sum of the weights of arcs leaving v; 0 for members without out-arcs.
    double out_weight_sum(MemberId v) const { return out_sums_[v]; }

    /// Weight of arc (u, v), or 0 when absent.
    double weight(MemberId u, MemberId v) const {
        if (u >= n_ || v >= n_) return 0.0;
        auto row = out_arcs(u);
        auto it = std::lower_bound(row.begin(), row.end(), v,
                                   [](const OutArc& a, MemberId t) { return a.target < t; });
        return (it != row.end() && it->target == v) ? it->weight : 0.0;
    }

    bool has_arc(MemberId u, MemberId v) const { return weight(u, v) > 0.0; }

    bool is_unweighted() const {
        return std::all_of(row_.begin(), row_.end(), [](const OutArc& a) { return a.weight == 1.0; });
    }

    /// Arcs ordered by (source, target).
    std::vector<Arc> arcs() const {
        std::vector<Arc> out;
        out.reserve(row_.size());
        for (std::size_t u = 0; u < n_; ++u) {
            for (const auto& oa : out_arcs(static_cast<MemberId>(u))) {
                out.push_back({static_cast<MemberId>(u), oa.target, oa.weight});
            }
        }
        return out;
    }

    std::vector<std::size_t> in_degrees() const {
        std::vector<std::size_t> deg(n_, 0);
        for (const auto& oa : row_) ++deg[oa.target];
        return deg;
    }

    /// Same arcs over a larger member set; the new members have no arcs.
    EndorsementDigraph enlarged(std::size_t new_n) const {
        if (new_n < n_) throw GraphError("enlarged() cannot shrink a digraph");
        return EndorsementDigraph(new_n, arcs());
    }

    /// Drops members >= keep together with every arc touching them.
    EndorsementDigraph truncated(std::size_t keep) const {
        if (keep > n_) throw GraphError("truncated() cannot grow a digraph");
        std::vector<Arc> kept;
        for (const auto& a : arcs()) {
            if (a.source < keep && a.target < keep) kept.push_back(a);
        }
        return EndorsementDigraph(keep, std::move(kept));
    }

    friend bool operator==(const EndorsementDigraph& a, const EndorsementDigraph& b) {
        return a.n_ == b.n_ && a.arcs() == b.arcs();
    }

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<OutArc> row_;
    std::vector<double> out_sums_;
};

inline double out_weight_sum(const EndorsementDigraph& d, MemberId v) { return d.out_weight_sum(v); }

/// Ordered list of skill names; index 0 of a deduction run is the main skill.
struct SkillSet {
    std::vector<std::string> names;

    std::size_t size() const noexcept { return names.size(); }

    std::optional<SkillId> find(const std::string& name) const {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return std::nullopt;
        return static_cast<SkillId>(it - names.begin());
    }

    friend bool operator==(const SkillSet&, const SkillSet&) = default;
};

}  // namespace skillrank
