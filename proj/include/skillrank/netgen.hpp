#pragma once

// Synthetic endorsement networks.
//
// A base network of contacts grows one member at a time: the newcomer links
// to an existing member picked with probability proportional to degree, then
// closes a triangle with each neighbor of that member with a fixed
// probability. Per-skill endorsement digraphs are then laid over the base
// edges. Members are first given skill sets whose pairwise co-occurrence is
// fitted to a target matrix by simulated annealing; every holder of a skill
// receives one endorsement from a random contact and the remaining arcs go to
// holders with probability proportional to degree^bias.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "skillrank/graph.hpp"
#include "skillrank/random.hpp"

namespace skillrank {

using Matrix = std::vector<std::vector<double>>;

/// Generation could not meet its targets. Carries what was achieved.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, Matrix achieved = {})
        : std::runtime_error(what), achieved_(std::move(achieved)) {}

    const Matrix& achieved() const noexcept { return achieved_; }

private:
    Matrix achieved_;
};

struct GeneratorConfig {
    std::uint64_t seed = 1;
    std::size_t n_target = 1493;
    double triangle_closing_prob = 0.0;
    /// When set, triangle_closing_prob is calibrated so the edge count lands
    /// as close as possible to this value.
    std::optional<std::size_t> edge_target;
    SkillSet skills;
    std::vector<std::size_t> skill_arc_targets;
    /// Row i, column j: fraction of members endorsed for i that are also
    /// endorsed for j. Absent means co-occurrence is left free.
    std::optional<Matrix> cooccurrence_target;
    double cooccurrence_tolerance = 0.05;
    /// Mean endorsements per member endorsed for a skill; fixes how many
    /// members hold each skill.
    double arcs_per_holder = 3.0;
    /// Exponent on degree for picking endorsement targets and skill holders.
    double endorsement_bias = 1.0;
    std::size_t annealing_proposals = 100000;
};

struct SpamAllianceConfig {
    enum class Attach { isolated, linked };

    SkillId skill = 0;
    std::size_t n_assistants = 2;
    Attach attach_mode = Attach::isolated;
    /// Existing member that endorses the leader in linked mode.
    MemberId anchor = 0;
};

struct CooccurrenceMatrix {
    Matrix values;
    /// Rows whose skill nobody is endorsed for; their entries are 0.
    std::vector<bool> empty_rows;
};

/// Entry (i, j) = |endorsed for i and j| / |endorsed for i|, where "endorsed
/// for k" means positive in-degree in digraph k.
inline CooccurrenceMatrix measure_cooccurrence(const std::vector<EndorsementDigraph>& digraphs) {
    const std::size_t s = digraphs.size();
    CooccurrenceMatrix out{Matrix(s, std::vector<double>(s, 0.0)), std::vector<bool>(s, false)};
    if (s == 0) return out;
    const std::size_t n = digraphs.front().size();
    std::vector<std::vector<bool>> endorsed;
    for (const auto& d : digraphs) {
        if (d.size() != n) throw GraphError("digraphs disagree on member count");
        auto deg = d.in_degrees();
        std::vector<bool> e(n);
        for (std::size_t v = 0; v < n; ++v) e[v] = deg[v] > 0;
        endorsed.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < s; ++i) {
        const auto count_i = static_cast<std::size_t>(std::count(endorsed[i].begin(), endorsed[i].end(), true));
        if (count_i == 0) {
            out.empty_rows[i] = true;
            continue;
        }
        for (std::size_t j = 0; j < s; ++j) {
            std::size_t both = 0;
            for (std::size_t v = 0; v < n; ++v) both += (endorsed[i][v] && endorsed[j][v]) ? 1 : 0;
            out.values[i][j] = static_cast<double>(both) / static_cast<double>(count_i);
        }
    }
    return out;
}

namespace detail {

inline MemberGraph grow_base_network(std::size_t n, double closing_prob, std::uint64_t seed) {
    Rng rng(seed, "base");
    std::vector<std::vector<MemberId>> adj(n);
    std::vector<MemberId> endpoints;  // each member repeated degree times
    std::vector<MemberGraph::Edge> edges;
    auto link = [&](MemberId a, MemberId b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
        endpoints.push_back(a);
        endpoints.push_back(b);
        edges.emplace_back(a, b);
    };
    link(0, 1);
    for (MemberId v = 2; v < n; ++v) {
        const MemberId anchor = endpoints[rng.below(endpoints.size())];
        const std::vector<MemberId> candidates = adj[anchor];
        link(v, anchor);
        for (MemberId w : candidates) {
            if (rng.bernoulli(closing_prob)) link(v, w);
        }
    }
    return MemberGraph(n, std::move(edges));
}

}  // namespace detail

struct BaseNetwork {
    MemberGraph graph;
    double closing_prob;
};

/// Grows the base network, calibrating the closing probability by bisection
/// when an edge target is set. Edge count grows with the probability up to
/// sampling noise, so the closest network seen is kept.
inline BaseNetwork generate_base_network_calibrated(const GeneratorConfig& cfg) {
    if (cfg.n_target < 2) throw std::invalid_argument("base network needs at least two members");
    if (!cfg.edge_target) {
        return {detail::grow_base_network(cfg.n_target, cfg.triangle_closing_prob, cfg.seed), cfg.triangle_closing_prob};
    }
    const auto target = static_cast<double>(*cfg.edge_target);
    double lo = 0.0, hi = 1.0;
    std::optional<BaseNetwork> best;
    double best_gap = 0.0;
    for (int step = 0; step < 40; ++step) {
        const double p = 0.5 * (lo + hi);
        auto g = detail::grow_base_network(cfg.n_target, p, cfg.seed);
        const double gap = static_cast<double>(g.edge_count()) - target;
        if (!best || std::abs(gap) < best_gap) {
            best_gap = std::abs(gap);
            best = BaseNetwork{std::move(g), p};
        }
        if (gap == 0.0) break;
        (gap < 0.0 ? lo : hi) = p;
    }
    return std::move(*best);
}

/// Heavy-tailed contact network; connected by construction.
inline MemberGraph generate_base_network(const GeneratorConfig& cfg) {
    return generate_base_network_calibrated(cfg).graph;
}

struct GeneratedEndorsements {
    std::vector<EndorsementDigraph> digraphs;
    /// measure_cooccurrence() of `digraphs`.
    Matrix achieved;
    /// Largest absolute gap to the target; 0 when co-occurrence is free.
    double max_deviation = 0.0;
};

namespace detail {

/// k members drawn without replacement with probability proportional to
/// weight (exponential-key method), returned ascending.
inline std::vector<MemberId> weighted_sample(const std::vector<double>& weight, std::size_t k, Rng& rng) {
    std::vector<std::pair<double, MemberId>> keys;
    for (std::size_t v = 0; v < weight.size(); ++v) {
        if (weight[v] <= 0.0) continue;
        const double u = 1.0 - rng.uniform();  // (0, 1]
        keys.emplace_back(std::log(u) / weight[v], static_cast<MemberId>(v));
    }
    k = std::min(k, keys.size());
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    std::vector<MemberId> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(keys[i].second);
    std::sort(out.begin(), out.end());
    return out;
}

/// Skill-set fitting over a fixed pool of members. Each member's skills are a
/// bitmask; counts of single and joint memberships are kept incrementally.
class CooccurrenceAnnealer {
public:
    CooccurrenceAnnealer(const Matrix& target, std::vector<double> marginals, std::size_t pool_size)
        : s_(target.size()), target_(target), marginals_(std::move(marginals)), masks_(pool_size, 0),
          count_(s_, 0), joint_(s_ * s_, 0) {}

    void set(std::size_t member, std::size_t skill, bool on) {
        const std::uint64_t bit = std::uint64_t{1} << skill;
        if (((masks_[member] & bit) != 0) == on) return;
        const int delta = on ? 1 : -1;
        for (std::size_t t = 0; t < s_; ++t) {
            if (t != skill && (masks_[member] >> t & 1U)) {
                joint_[skill * s_ + t] += delta;
                joint_[t * s_ + skill] += delta;
            }
        }
        count_[skill] += delta;
        masks_[member] ^= bit;
    }

    bool has(std::size_t member, std::size_t skill) const { return masks_[member] >> skill & 1U; }

    double cost() const {
        double c = 0.0;
        for (std::size_t i = 0; i < s_; ++i) {
            const double ci = static_cast<double>(count_[i]);
            c += std::abs(ci - marginals_[i]) / std::max(1.0, marginals_[i]);
            for (std::size_t j = 0; j < s_; ++j) {
                if (i == j) continue;
                const double r = count_[i] > 0 ? static_cast<double>(joint_[i * s_ + j]) / ci : 0.0;
                c += std::abs(r - target_[i][j]);
            }
        }
        return c;
    }

    void anneal(Rng& rng, std::size_t proposals) {
        double current = cost();
        const double t_start = 0.05, t_end = 1e-4;
        const std::size_t pool = masks_.size();
        for (std::size_t step = 0; step < proposals && pool > 0; ++step) {
            const double frac = static_cast<double>(step) / static_cast<double>(proposals);
            const double temperature = t_start * std::pow(t_end / t_start, frac);
            const auto member = static_cast<std::size_t>(rng.below(pool));
            const auto skill = static_cast<std::size_t>(rng.below(s_));
            const bool was = has(member, skill);
            set(member, skill, !was);
            const double proposed = cost();
            const double delta = proposed - current;
            if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
                current = proposed;
            } else {
                set(member, skill, was);
            }
        }
    }

private:
    std::size_t s_;
    const Matrix& target_;
    std::vector<double> marginals_;
    std::vector<std::uint64_t> masks_;
    std::vector<long> count_;
    std::vector<long> joint_;
};

inline double max_abs_gap(const Matrix& a, const Matrix& b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i].size(); ++j) gap = std::max(gap, std::abs(a[i][j] - b[i][j]));
    }
    return gap;
}

}  // namespace detail

/// One unweighted digraph per skill, every arc along a base edge. Throws
/// InfeasibleError when a co-occurrence target cannot be met within tolerance
/// or a skill's holders have too few contacts to absorb its arc target.
inline GeneratedEndorsements generate_endorsements(const MemberGraph& base, const GeneratorConfig& cfg) {
    const std::size_t s = cfg.skills.size();
    const std::size_t n = base.size();
    if (cfg.skill_arc_targets.size() != s) throw std::invalid_argument("one arc target per skill required");
    if (s > 64) throw std::invalid_argument("at most 64 skills supported");
    if (cfg.cooccurrence_target) {
        const auto& t = *cfg.cooccurrence_target;
        if (t.size() != s) throw std::invalid_argument("co-occurrence target must be square over the skills");
        for (std::size_t i = 0; i < s; ++i) {
            if (t[i].size() != s) throw std::invalid_argument("co-occurrence target must be square over the skills");
            if (t[i][i] != 1.0) throw std::invalid_argument("co-occurrence target diagonal must be 1");
        }
    }
    if (!(cfg.arcs_per_holder >= 1.0)) throw std::invalid_argument("arcs_per_holder must be at least 1");

    std::vector<double> attract(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        const auto deg = static_cast<double>(base.degree(static_cast<MemberId>(v)));
        attract[v] = deg > 0.0 ? std::pow(deg, cfg.endorsement_bias) : 0.0;
    }

    std::vector<std::size_t> holders_wanted(s);
    for (std::size_t k = 0; k < s; ++k) {
        const auto arcs = cfg.skill_arc_targets[k];
        auto h = static_cast<std::size_t>(std::llround(static_cast<double>(arcs) / cfg.arcs_per_holder));
        if (arcs > 0) h = std::max<std::size_t>(h, 1);
        holders_wanted[k] = std::min({h, arcs, n});
    }

    // holders[k]: ascending members holding skill k.
    std::vector<std::vector<MemberId>> holders(s);
    Rng skill_rng(cfg.seed, "skills");
    if (cfg.cooccurrence_target) {
        std::size_t pool_size = 0;
        for (auto h : holders_wanted) pool_size += h;
        const auto pool = detail::weighted_sample(attract, pool_size, skill_rng);
        std::vector<double> marginals(holders_wanted.begin(), holders_wanted.end());
        detail::CooccurrenceAnnealer annealer(*cfg.cooccurrence_target, marginals, pool.size());
        for (std::size_t k = 0; k < s; ++k) {
            for (std::size_t i = 0; i < holders_wanted[k] && i < pool.size(); ++i) {
                annealer.set(static_cast<std::size_t>(skill_rng.below(pool.size())), k, true);
            }
        }
        annealer.anneal(skill_rng, cfg.annealing_proposals);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            for (std::size_t k = 0; k < s; ++k) {
                if (annealer.has(i, k)) holders[k].push_back(pool[i]);
            }
        }
    } else {
        for (std::size_t k = 0; k < s; ++k) holders[k] = detail::weighted_sample(attract, holders_wanted[k], skill_rng);
    }

    GeneratedEndorsements out;
    Rng arc_rng(cfg.seed, "endorsements");
    for (std::size_t k = 0; k < s; ++k) {
        const auto& hk = holders[k];
        const std::size_t target_arcs = cfg.skill_arc_targets[k];
        std::vector<Arc> arcs;
        // endorsers_left[i]: contacts of hk[i] that have not endorsed it yet.
        std::vector<std::vector<MemberId>> endorsers_left(hk.size());
        std::vector<double> weight(hk.size());
        double total_weight = 0.0;
        auto take = [&](std::size_t i) {
            auto& left = endorsers_left[i];
            const auto pick = static_cast<std::size_t>(arc_rng.below(left.size()));
            arcs.push_back({left[pick], hk[i], 1.0});
            left.erase(left.begin() + static_cast<std::ptrdiff_t>(pick));
            if (left.empty()) {
                total_weight -= weight[i];
                weight[i] = 0.0;
            }
        };
        for (std::size_t i = 0; i < hk.size(); ++i) {
            auto nb = base.neighbors(hk[i]);
            endorsers_left[i].assign(nb.begin(), nb.end());
            weight[i] = attract[hk[i]];
            total_weight += weight[i];
        }
        for (std::size_t i = 0; i < hk.size() && arcs.size() < target_arcs; ++i) {
            if (!endorsers_left[i].empty()) take(i);
        }
        while (arcs.size() < target_arcs) {
            if (!(total_weight > 1e-9)) {
                throw InfeasibleError("holders of skill '" + cfg.skills.names[k] + "' cannot absorb " +
                                      std::to_string(target_arcs) + " endorsements");
            }
            const std::size_t i = arc_rng.weighted_index(weight, total_weight);
            if (endorsers_left[i].empty()) {
                // Accumulated rounding in total_weight; recompute it.
                total_weight = 0.0;
                for (double w : weight) total_weight += w;
                continue;
            }
            take(i);
        }
        out.digraphs.emplace_back(n, std::move(arcs));
    }

    out.achieved = measure_cooccurrence(out.digraphs).values;
    if (cfg.cooccurrence_target) {
        out.max_deviation = detail::max_abs_gap(out.achieved, *cfg.cooccurrence_target);
        if (out.max_deviation > cfg.cooccurrence_tolerance) {
            throw InfeasibleError("co-occurrence fit missed its target by " + std::to_string(out.max_deviation) +
                                      " (tolerance " + std::to_string(cfg.cooccurrence_tolerance) + ")",
                                  out.achieved);
        }
    }
    return out;
}

struct SpamInjection {
    EndorsementDigraph digraph;
    MemberId leader;
};

/// Appends a leader and `n_assistants` helpers. Every assistant endorses the
/// leader and the leader endorses every assistant back. In linked mode the
/// anchor member also endorses the leader.
inline SpamInjection inject_spam_alliance(const EndorsementDigraph& d, const SpamAllianceConfig& cfg) {
    if (cfg.n_assistants < 1) throw std::invalid_argument("a spam alliance needs at least one assistant");
    const std::size_t n = d.size();
    const auto leader = static_cast<MemberId>(n);
    auto arcs = d.arcs();
    for (std::size_t i = 1; i <= cfg.n_assistants; ++i) {
        const auto assistant = static_cast<MemberId>(n + i);
        arcs.push_back({assistant, leader, 1.0});
        arcs.push_back({leader, assistant, 1.0});
    }
    if (cfg.attach_mode == SpamAllianceConfig::Attach::linked) {
        if (cfg.anchor >= n) throw std::invalid_argument("spam anchor is not an existing member");
        arcs.push_back({cfg.anchor, leader, 1.0});
    }
    return {EndorsementDigraph(n + 1 + cfg.n_assistants, std::move(arcs)), leader};
}

/// Injects the alliance into `digraphs[cfg.skill]` and enlarges every other
/// skill's digraph to the new member count without arcs for the cheaters.
inline std::pair<std::vector<EndorsementDigraph>, MemberId> inject_spam_alliance(
    const std::vector<EndorsementDigraph>& digraphs, const SpamAllianceConfig& cfg) {
    if (cfg.skill >= digraphs.size()) throw std::invalid_argument("spam skill index out of range");
    auto injected = inject_spam_alliance(digraphs[cfg.skill], cfg);
    std::vector<EndorsementDigraph> out;
    out.reserve(digraphs.size());
    for (std::size_t k = 0; k < digraphs.size(); ++k) {
        out.push_back(k == cfg.skill ? injected.digraph : digraphs[k].enlarged(injected.digraph.size()));
    }
    return {std::move(out), injected.leader};
}

}  // namespace skillrank
