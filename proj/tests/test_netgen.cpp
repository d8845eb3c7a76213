#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>

#include "skillrank/config.hpp"
#include "skillrank/netgen.hpp"
#include "skillrank/pagerank.hpp"

using namespace skillrank;

namespace {

std::size_t giant_component(const MemberGraph& g) {
    std::vector<bool> seen(g.size(), false);
    std::size_t best = 0;
    for (MemberId s = 0; s < g.size(); ++s) {
        if (seen[s]) continue;
        std::size_t size = 0;
        std::queue<MemberId> q;
        q.push(s);
        seen[s] = true;
        while (!q.empty()) {
            auto v = q.front();
            q.pop();
            ++size;
            for (auto w : g.neighbors(v)) {
                if (!seen[w]) {
                    seen[w] = true;
                    q.push(w);
                }
            }
        }
        best = std::max(best, size);
    }
    return best;
}

GeneratorConfig sparse_config(std::uint64_t seed) {
    auto cfg = load_experiment_config("table1").generator;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST(Rng, StreamsAreReproducibleAndIndependent) {
    Rng a(42, "base"), b(42, "base"), c(42, "skills"), d(43, "base");
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    EXPECT_NE(x, d.next());
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_LT(a.below(7), 7u);
    }
}

TEST(Rng, WeightedIndexSkipsZeroWeights) {
    Rng r(1, "t");
    std::vector<double> w{0.0, 2.0, 0.0, 1.0};
    std::vector<int> hits(4, 0);
    for (int i = 0; i < 3000; ++i) ++hits[r.weighted_index(w, 3.0)];
    EXPECT_EQ(hits[0], 0);
    EXPECT_EQ(hits[2], 0);
    EXPECT_NEAR(hits[1] / 3000.0, 2.0 / 3.0, 0.05);
}

TEST(BaseNetwork, TwoMembersGiveOneEdge) {
    GeneratorConfig cfg;
    cfg.n_target = 2;
    auto g = generate_base_network(cfg);
    EXPECT_EQ(g.size(), 2u);
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_TRUE(g.has_edge(0, 1));
    cfg.n_target = 1;
    EXPECT_THROW(generate_base_network(cfg), std::invalid_argument);
}

TEST(BaseNetwork, CalibratedEdgeCountNearTarget) {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto cfg = sparse_config(seed);
        auto base = generate_base_network_calibrated(cfg);
        EXPECT_EQ(base.graph.size(), 1493u);
        EXPECT_NEAR(static_cast<double>(base.graph.edge_count()), 2489.0, 248.9);
        EXPECT_GE(giant_component(base.graph), static_cast<std::size_t>(0.9 * 1493));
    }
}

TEST(BaseNetwork, DegreesAreHeavyTailed) {
    auto g = generate_base_network_calibrated(sparse_config(1)).graph;
    std::size_t max_degree = 0;
    for (MemberId v = 0; v < g.size(); ++v) max_degree = std::max(max_degree, g.degree(v));
    const double mean = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.size());
    EXPECT_GT(static_cast<double>(max_degree), 10.0 * mean);
}

TEST(BaseNetwork, IsDeterministic) {
    auto cfg = sparse_config(5);
    EXPECT_EQ(generate_base_network(cfg), generate_base_network(cfg));
    auto other = cfg;
    other.seed = 6;
    EXPECT_FALSE(generate_base_network(cfg) == generate_base_network(other));
}

TEST(Cooccurrence, IdenticalEndorsedSets) {
    std::vector<EndorsementDigraph> d{EndorsementDigraph(4, {{0, 1}, {2, 3}}),
                                      EndorsementDigraph(4, {{0, 3}, {2, 1}})};
    auto m = measure_cooccurrence(d);
    EXPECT_EQ(m.values, (Matrix{{1.0, 1.0}, {1.0, 1.0}}));
}

TEST(Cooccurrence, DisjointEndorsedSets) {
    std::vector<EndorsementDigraph> d{EndorsementDigraph(4, {{0, 1}}), EndorsementDigraph(4, {{0, 2}})};
    EXPECT_EQ(measure_cooccurrence(d).values, (Matrix{{1.0, 0.0}, {0.0, 1.0}}));
}

TEST(Cooccurrence, IsAsymmetric) {
    std::vector<EndorsementDigraph> d{EndorsementDigraph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}),
                                      EndorsementDigraph(6, {{5, 3}, {5, 4}})};
    auto m = measure_cooccurrence(d);
    EXPECT_DOUBLE_EQ(m.values[0][1], 0.5);
    EXPECT_DOUBLE_EQ(m.values[1][0], 1.0);
}

TEST(Cooccurrence, EmptySkillIsFlagged) {
    std::vector<EndorsementDigraph> d{EndorsementDigraph(3, {{0, 1}}), EndorsementDigraph(3)};
    auto m = measure_cooccurrence(d);
    EXPECT_TRUE(m.empty_rows[1]);
    EXPECT_FALSE(m.empty_rows[0]);
    EXPECT_EQ(m.values[1][0], 0.0);
}

TEST(Endorsements, SingleSkillIdentityTarget) {
    GeneratorConfig cfg;
    cfg.n_target = 200;
    cfg.triangle_closing_prob = 0.2;
    cfg.skills = SkillSet{{"only"}};
    cfg.skill_arc_targets = {60};
    cfg.cooccurrence_target = Matrix{{1.0}};
    auto base = generate_base_network(cfg);
    auto out = generate_endorsements(base, cfg);
    ASSERT_EQ(out.digraphs.size(), 1u);
    EXPECT_EQ(out.digraphs[0].arc_count(), 60u);
    EXPECT_EQ(out.max_deviation, 0.0);
}

TEST(Endorsements, SparseTargetsAreMet) {
    for (std::uint64_t seed : {1, 2, 3}) {
        auto cfg = sparse_config(seed);
        auto base = generate_base_network_calibrated(cfg).graph;
        auto out = generate_endorsements(base, cfg);
        ASSERT_EQ(out.digraphs.size(), 5u);
        for (std::size_t k = 0; k < 5; ++k) {
            const double target = static_cast<double>(cfg.skill_arc_targets[k]);
            EXPECT_NEAR(static_cast<double>(out.digraphs[k].arc_count()), target, 0.1 * target);
            EXPECT_TRUE(out.digraphs[k].is_unweighted());
            for (const auto& a : out.digraphs[k].arcs()) ASSERT_TRUE(base.has_edge(a.source, a.target));
        }
        const auto achieved = measure_cooccurrence(out.digraphs).values;
        for (std::size_t i = 0; i < 5; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                EXPECT_NEAR(achieved[i][j], (*cfg.cooccurrence_target)[i][j], cfg.cooccurrence_tolerance);
            }
        }
        EXPECT_LE(out.max_deviation, cfg.cooccurrence_tolerance);
        EXPECT_EQ(out.achieved, achieved);
    }
}

TEST(Endorsements, DenseRegimeReportsAchievedMatrix) {
    auto cfg = load_experiment_config("table2").generator;
    auto base = generate_base_network_calibrated(cfg).graph;
    auto out = generate_endorsements(base, cfg);
    for (std::size_t k = 0; k < 5; ++k) {
        const double target = static_cast<double>(cfg.skill_arc_targets[k]);
        EXPECT_NEAR(static_cast<double>(out.digraphs[k].arc_count()), target, 0.1 * target);
        for (const auto& a : out.digraphs[k].arcs()) ASSERT_TRUE(base.has_edge(a.source, a.target));
    }
    ASSERT_EQ(out.achieved.size(), 5u);
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(out.achieved[k][k], 1.0);
}

TEST(Endorsements, AreDeterministic) {
    auto cfg = sparse_config(9);
    auto base = generate_base_network_calibrated(cfg).graph;
    auto a = generate_endorsements(base, cfg);
    auto b = generate_endorsements(base, cfg);
    EXPECT_EQ(a.digraphs, b.digraphs);
}

TEST(Endorsements, UnreachableTargetsAreInfeasible) {
    GeneratorConfig cfg;
    cfg.n_target = 30;
    cfg.skills = SkillSet{{"a", "b"}};
    cfg.skill_arc_targets = {10, 10};
    cfg.arcs_per_holder = 1.0;
    cfg.cooccurrence_target = Matrix{{1.0, 1.0}, {0.0, 1.0}};
    cfg.cooccurrence_tolerance = 0.01;
    auto base = generate_base_network(cfg);
    try {
        generate_endorsements(base, cfg);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.achieved().size(), 2u);
    }

    GeneratorConfig tiny;
    tiny.n_target = 3;
    tiny.skills = SkillSet{{"a"}};
    tiny.skill_arc_targets = {50};
    tiny.arcs_per_holder = 50.0;
    EXPECT_THROW(generate_endorsements(generate_base_network(tiny), tiny), InfeasibleError);
}

TEST(SpamAlliance, TwoAssistants) {
    EndorsementDigraph host(5, {{0, 1}, {2, 3}});
    auto [d, leader] = inject_spam_alliance(host, SpamAllianceConfig{0, 2});
    EXPECT_EQ(d.size(), 8u);
    EXPECT_EQ(leader, 5u);
    EXPECT_EQ(d.in_degrees()[leader], 2u);
    EXPECT_EQ(d.out_degree(leader), 2u);
    for (MemberId v = 0; v < 5; ++v) {
        EXPECT_FALSE(d.has_arc(v, leader));
        EXPECT_FALSE(d.has_arc(leader, v));
    }
}

TEST(SpamAlliance, EightAssistants) {
    auto [d, leader] = inject_spam_alliance(EndorsementDigraph(5), SpamAllianceConfig{0, 8});
    EXPECT_EQ(d.in_degrees()[leader], 8u);
    EXPECT_EQ(d.size(), 14u);
}

TEST(SpamAlliance, LeaderTopsEmptyHost) {
    auto [d, leader] = inject_spam_alliance(EndorsementDigraph(20), SpamAllianceConfig{0, 2});
    EXPECT_EQ(rank_positions(pagerank(d))[leader], 1u);
}

TEST(SpamAlliance, LinkedModeAddsAnchorArc) {
    SpamAllianceConfig cfg{0, 3, SpamAllianceConfig::Attach::linked, 2};
    auto [d, leader] = inject_spam_alliance(EndorsementDigraph(4, {{0, 1}}), cfg);
    EXPECT_TRUE(d.has_arc(2, leader));
    EXPECT_EQ(d.in_degrees()[leader], 4u);
    cfg.anchor = 9;
    EXPECT_THROW(inject_spam_alliance(EndorsementDigraph(4), cfg), std::invalid_argument);
}

TEST(SpamAlliance, RemovingCheatersRestoresOriginal) {
    auto cfg = sparse_config(4);
    auto base = generate_base_network_calibrated(cfg).graph;
    auto digraphs = generate_endorsements(base, cfg).digraphs;
    for (SkillId k = 0; k < digraphs.size(); ++k) {
        for (std::size_t m : {1, 2, 8}) {
            auto [injected, leader] = inject_spam_alliance(digraphs, SpamAllianceConfig{k, m});
            EXPECT_EQ(leader, base.size());
            for (std::size_t j = 0; j < digraphs.size(); ++j) {
                EXPECT_EQ(injected[j].size(), base.size() + 1 + m);
                EXPECT_EQ(injected[j].truncated(base.size()), digraphs[j]);
                if (j != k) EXPECT_EQ(injected[j].arc_count(), digraphs[j].arc_count());
            }
        }
    }
}

TEST(SpamAlliance, LeaderScoreMatchesClosedForm) {
    // Isolated farm on an arc-free host: the leader collects beta (1 + m alpha) / (1 - alpha^2)
    // where beta is the per-member restart-plus-dangling mass.
    const std::size_t n = 30, m = 4;
    auto [d, leader] = inject_spam_alliance(EndorsementDigraph(n), SpamAllianceConfig{0, m});
    auto r = pagerank(d);
    const double alpha = 0.85;
    const double beta = r.scores[0];
    EXPECT_NEAR(r.scores[leader], beta * (1.0 + m * alpha) / (1.0 - alpha * alpha), 1e-12);
}
