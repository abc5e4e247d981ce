#include "doctest.h"

#include "fpplocal/graph.hpp"
#include "fpplocal/stats.hpp"

#include <cmath>
#include <sstream>

using namespace fpplocal;

TEST_CASE("degree sequences: deterministic laws and the odd-sum fixup") {
    RngStream rng(1);
    auto s1 = sample_degree_sequence(1, DegreeModel::deterministic(2), rng);
    CHECK(s1.degrees == std::vector<std::uint32_t>{2});
    CHECK(s1.fixup_vertex == -1);

    auto s2 = sample_degree_sequence(2, DegreeModel::deterministic(1), rng);
    CHECK(s2.degrees == std::vector<std::uint32_t>{1, 1});
    CHECK(s2.fixup_vertex == -1);

    auto s3 = sample_degree_sequence(3, DegreeModel::deterministic(1), rng);
    CHECK(s3.total() == 4);
    REQUIRE(s3.fixup_vertex >= 0);
    CHECK(s3.degrees[std::size_t(s3.fixup_vertex)] == 2);
    int ones = 0;
    for (auto d : s3.degrees) ones += (d == 1);
    CHECK(ones == 2);
}

TEST_CASE("degree histogram passes a chi-square test at level 0.01") {
    auto d = DegreeModel::from_pmf({{1, 0.2}, {2, 0.3}, {3, 0.5}});
    RngStream rng(21);
    const std::size_t n = 100000;
    auto seq = sample_degree_sequence(n, d, rng);
    std::vector<std::uint64_t> counts(4, 0);
    for (auto k : seq.degrees) counts[k] += 1;
    if (seq.fixup_vertex >= 0) {
        // undo the single perturbed vertex so the test sees i.i.d. draws
        auto k = seq.degrees[std::size_t(seq.fixup_vertex)];
        counts[k] -= 1;
        counts[k - 1] += 1;
    }
    std::vector<double> probs = {0.0, 0.2, 0.3, 0.5};
    double stat = stats::chi_square_statistic(counts, probs);
    CHECK(stat < stats::chi_square_quantile(0.99, 2.0));
}

TEST_CASE("single possible matching for d=(1,1)") {
    DegreeSequence seq{{1, 1}, -1};
    RngStream rng(3);
    auto g = pair_half_edges(seq, rng);
    REQUIRE(g.num_edges() == 1);
    CHECK(g.degree(0) == 1);
    CHECK(g.degree(1) == 1);
    CHECK(((g.edge_u(0) == 0 && g.edge_v(0) == 1) || (g.edge_u(0) == 1 && g.edge_v(0) == 0)));
}

TEST_CASE("d=(3,1) always gives a self-loop at vertex 0 plus one 0-1 edge") {
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        RngStream rng(seed);
        auto g = pair_half_edges(DegreeSequence{{3, 1}, -1}, rng);
        REQUIRE(g.num_edges() == 2);
        int loops = 0, cross = 0;
        for (std::uint32_t e = 0; e < 2; ++e) {
            if (g.edge_u(e) == g.edge_v(e)) {
                CHECK(g.edge_u(e) == 0);
                ++loops;
            } else {
                ++cross;
            }
        }
        CHECK(loops == 1);
        CHECK(cross == 1);
    }
}

TEST_CASE("d=(2,2): double edge with probability 2/3 over 1e5 pairings") {
    const int n = 100000;
    int double_edge = 0, two_loops = 0;
    for (int i = 0; i < n; ++i) {
        RngStream rng(1000 + std::uint64_t(i));
        auto g = pair_half_edges(DegreeSequence{{2, 2}, -1}, rng);
        bool loop = g.edge_u(0) == g.edge_v(0);
        (loop ? two_loops : double_edge) += 1;
    }
    double p = 2.0 / 3.0;
    double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(double_edge / double(n) - p) < 3 * se);
    CHECK(double_edge + two_loops == n);
}

TEST_CASE("half-edge bookkeeping: degree sum equals twice the edge count") {
    RngStream rng(5);
    auto d = DegreeModel::from_pmf({{0, 0.1}, {1, 0.3}, {3, 0.4}, {6, 0.2}});
    for (int rep = 0; rep < 20; ++rep) {
        auto seq = sample_degree_sequence(500, d, rng);
        auto g = pair_half_edges(seq, rng);
        std::uint64_t degsum = 0;
        for (std::uint32_t v = 0; v < g.num_vertices(); ++v) degsum += g.degree(v);
        CHECK(degsum == 2 * std::uint64_t(g.num_edges()));
        CHECK(degsum == seq.total());
        // pairing is a fixed-point-free involution
        for (std::uint32_t h = 0; h < g.num_half_edges(); ++h) {
            CHECK(g.mate(h) != h);
            CHECK(g.mate(g.mate(h)) == h);
        }
    }
}

TEST_CASE("assign_weights draws one positive weight per edge, KS-consistent with the law") {
    RngStream rng(8);
    auto seq = sample_degree_sequence(100000, DegreeModel::deterministic(2), rng);
    auto g = pair_half_edges(seq, rng);
    auto w = WeightModel::exponential(1.6);
    assign_weights(g, w, rng);
    REQUIRE(g.num_edges() == 100000);
    std::vector<double> ws(g.num_edges());
    for (std::uint32_t e = 0; e < g.num_edges(); ++e) {
        REQUIRE(g.weight(e) > 0.0);
        ws[e] = g.weight(e);
    }
    double ksd = stats::ks_statistic(ws, [&](double x) { return w.cdf(x); });
    CHECK(stats::ks_one_sample_pvalue(ksd, ws.size()) > 0.01);
}

TEST_CASE("edge-list dump round-trips bit-exactly") {
    RngStream rng(13);
    auto seq = sample_degree_sequence(200, DegreeModel::from_pmf({{1, 0.4}, {2, 0.3}, {4, 0.3}}), rng);
    auto g = pair_half_edges(seq, rng);
    assign_weights(g, WeightModel::weibull(1.3, 0.7), rng);

    std::ostringstream first;
    dump_edge_list(g, first, 13);

    std::istringstream in(first.str());
    std::uint64_t seed = 0;
    auto h = read_edge_list(in, &seed);
    CHECK(seed == 13);
    CHECK(h.num_vertices() == g.num_vertices());
    CHECK(h.num_edges() == g.num_edges());

    std::ostringstream second;
    dump_edge_list(h, second, seed);
    CHECK(first.str() == second.str());
}

TEST_CASE("from_edges preserves order, loops and parallel edges") {
    auto g = MultiGraph::from_edges(3, {{0, 1, 0.5}, {1, 2, 1.25}, {0, 1, 2.0}, {2, 2, 0.75}});
    CHECK(g.num_edges() == 4);
    CHECK(g.degree(0) == 2);
    CHECK(g.degree(1) == 3);
    CHECK(g.degree(2) == 3); // self-loop counts twice
    CHECK(g.weight(2) == 2.0);
    CHECK(g.edge_u(3) == 2);
    CHECK(g.edge_v(3) == 2);
    CHECK(g.other_end(0, 0) == 1);
    CHECK(g.other_end(0, 1) == 0);
    CHECK_THROWS_AS(MultiGraph::from_edges(2, {{0, 5, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(MultiGraph::from_edges(2, {{0, 1, 0.0}}), std::invalid_argument);
}

TEST_CASE("pairing rejects an odd half-edge total") {
    RngStream rng(2);
    CHECK_THROWS_AS(pair_half_edges(DegreeSequence{{1, 1, 1}, -1}, rng), std::invalid_argument);
}
