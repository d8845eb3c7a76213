#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "skillrank/graph.hpp"
#include "skillrank/io.hpp"

using namespace skillrank;

namespace {

MemberGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return read_member_graph(in);
}

EndorsementDigraph parse_digraph(const std::string& text, std::optional<std::size_t> n = {}) {
    std::istringstream in(text);
    return read_endorsement_digraph(in, n);
}

}  // namespace

TEST(MemberGraph, LoadsHeaderAndEdges) {
    auto g = parse_graph("3\n0 1\n1 2\n");
    EXPECT_EQ(g.size(), 3u);
    EXPECT_EQ(g.edge_count(), 2u);
    EXPECT_TRUE(g.has_edge(1, 0));
    EXPECT_TRUE(g.has_edge(2, 1));
    EXPECT_FALSE(g.has_edge(0, 2));
    EXPECT_EQ(g.degree(1), 2u);
}

TEST(MemberGraph, ReversedDuplicateCollapses) {
    auto g = parse_graph("2\n0 1\n1 0\n");
    EXPECT_EQ(g.edge_count(), 1u);
}

TEST(MemberGraph, SelfLoopIsRejected) {
    EXPECT_THROW(parse_graph("3\n2 2\n"), ParseError);
    EXPECT_THROW(MemberGraph(3, {{2, 2}}), GraphError);
}

TEST(MemberGraph, ErrorsCarryLineNumbers) {
    try {
        parse_graph("# contacts\n3\n0 1\n\n1 x\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 5u);
    }
    try {
        parse_graph("3\n0 1\n0 3\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(MemberGraph, CommentsAndBlankLinesAreSkipped) {
    auto g = parse_graph("# header\n\n4 # members\n0 1 # first\n# nothing\n2 3\n");
    EXPECT_EQ(g.size(), 4u);
    EXPECT_EQ(g.edge_count(), 2u);
}

TEST(MemberGraph, NeighborsAreSorted) {
    MemberGraph g(5, {{3, 0}, {0, 4}, {1, 0}});
    auto nb = g.neighbors(0);
    EXPECT_EQ(std::vector<MemberId>(nb.begin(), nb.end()), (std::vector<MemberId>{1, 3, 4}));
}

TEST(EndorsementDigraph, LoadsOptionalWeights) {
    auto d = parse_digraph("3\n0 1\n1 2 0.8\n", 3);
    ASSERT_EQ(d.arc_count(), 2u);
    EXPECT_EQ(d.weight(0, 1), 1.0);
    EXPECT_EQ(d.weight(1, 2), 0.8);
    EXPECT_EQ(d.weight(2, 1), 0.0);
    EXPECT_FALSE(d.is_unweighted());
}

TEST(EndorsementDigraph, RejectsBadArcs) {
    EXPECT_THROW(parse_digraph("3\n0 1 0.0\n"), ParseError);
    EXPECT_THROW(parse_digraph("3\n0 1 -0.5\n"), ParseError);
    EXPECT_THROW(parse_digraph("3\n0 1 1.5\n"), ParseError);
    EXPECT_THROW(parse_digraph("3\n0 1\n0 1 0.5\n"), ParseError);
    EXPECT_THROW(parse_digraph("3\n0 3\n"), ParseError);
    EXPECT_THROW(parse_digraph("3\n1 1\n"), ParseError);
    EXPECT_THROW(parse_digraph("3\n0 1\n", 4), ParseError);
    EXPECT_THROW(EndorsementDigraph(3, {{0, 1, 1.0}, {0, 1, 1.0}}), GraphError);
    EXPECT_THROW(EndorsementDigraph(3, {{0, 1, 0.0}}), GraphError);
}

TEST(EndorsementDigraph, DuplicateReportsSecondLine) {
    try {
        parse_digraph("3\n0 1\n1 2\n0 1\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
    }
}

TEST(EndorsementDigraph, EmptyArcSection) {
    auto d = parse_digraph("5\n", 5);
    EXPECT_EQ(d.size(), 5u);
    EXPECT_EQ(d.arc_count(), 0u);
}

TEST(EndorsementDigraph, OutWeightSum) {
    EndorsementDigraph d(3, {{0, 1, 1.0}, {0, 2, 0.8}});
    EXPECT_DOUBLE_EQ(out_weight_sum(d, 0), 1.8);
    EXPECT_EQ(out_weight_sum(d, 1), 0.0);

    EndorsementDigraph u(4, {{0, 1}, {0, 2}, {0, 3}, {2, 1}});
    EXPECT_EQ(out_weight_sum(u, 0), 3.0);
    EXPECT_EQ(u.out_degree(0), 3u);
}

TEST(EndorsementDigraph, UnweightedOutWeightEqualsOutDegree) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 12;
        EndorsementDigraph d(n, oracle::random_arcs(rng, n, 0.3, false));
        for (MemberId v = 0; v < n; ++v) EXPECT_EQ(d.out_weight_sum(v), static_cast<double>(d.out_degree(v)));
    }
}

TEST(EndorsementDigraph, EnlargeAndTruncate) {
    EndorsementDigraph d(3, {{0, 1}, {2, 0, 0.5}});
    auto big = d.enlarged(6);
    EXPECT_EQ(big.size(), 6u);
    EXPECT_EQ(big.arc_count(), 2u);
    EXPECT_EQ(big.truncated(3), d);
    EXPECT_THROW(d.enlarged(2), GraphError);
}

TEST(GraphFiles, RoundTripIsIdentity) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 15;
        EndorsementDigraph d(n, oracle::random_arcs(rng, n, 0.25, trial % 2 == 0));
        std::stringstream buf;
        write_endorsement_digraph(buf, d);
        EXPECT_EQ(read_endorsement_digraph(buf, n), d);

        std::vector<MemberGraph::Edge> edges;
        for (const auto& a : d.arcs()) edges.emplace_back(a.source, a.target);
        MemberGraph g(n, edges);
        std::stringstream gbuf;
        write_member_graph(gbuf, g);
        EXPECT_EQ(read_member_graph(gbuf), g);
    }
}

TEST(GraphFiles, FormatDoubleRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 0.96, 1e-17, 0.8 * 0.8}) {
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
    EXPECT_EQ(format_fixed(0.12345, 3), "0.123");
}

TEST(SkillSet, FindsByName) {
    SkillSet s{{"Programming", "C++"}};
    EXPECT_EQ(s.find("C++"), SkillId{1});
    EXPECT_FALSE(s.find("Java").has_value());
}
