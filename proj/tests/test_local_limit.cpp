#include "doctest.h"

#include "fpplocal/local_limit.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

using namespace fpplocal;

namespace {

RootedGraph::Edge edge(std::uint32_t u, std::uint32_t v, double w = 1.0, std::uint8_t colour = 0) {
    return {u, v, w, colour};
}

// deliberately independent check: explicit backtracking search for a
// root-preserving colour-preserving isomorphism (weights ignored)
using PairKey = std::pair<std::uint32_t, std::uint32_t>;

std::map<PairKey, std::vector<std::uint8_t>> edge_multiset(const RootedGraph& g) {
    std::map<PairKey, std::vector<std::uint8_t>> m;
    for (const auto& e : g.edges) {
        auto [i, j] = std::minmax(e.u, e.v);
        m[{i, j}].push_back(e.colour);
    }
    for (auto& [k, v] : m) std::sort(v.begin(), v.end());
    return m;
}

bool brute_force_isomorphic(const RootedGraph& a, const RootedGraph& b) {
    if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
    auto A = edge_multiset(a), B = edge_multiset(b);
    static const std::vector<std::uint8_t> kNoEdges;
    auto bucket = [&](const std::map<PairKey, std::vector<std::uint8_t>>& m, PairKey k)
        -> const std::vector<std::uint8_t>& {
        auto it = m.find(k);
        return it == m.end() ? kNoEdges : it->second;
    };

    std::vector<std::uint32_t> to_b(a.n, std::uint32_t(-1));
    std::vector<std::uint8_t> used(b.n, 0);
    to_b[a.root] = b.root;
    used[b.root] = 1;
    if (bucket(A, {a.root, a.root}) != bucket(B, {b.root, b.root})) return false;

    std::vector<std::uint32_t> order, mapped{a.root};
    for (std::uint32_t v = 0; v < a.n; ++v)
        if (v != a.root) order.push_back(v);

    auto consistent = [&](std::uint32_t v) {
        auto [i, j] = std::minmax(v, v);
        if (bucket(A, {i, j}) != bucket(B, {to_b[v], to_b[v]})) return false;
        for (std::uint32_t w : mapped) {
            auto ka = std::minmax(v, w);
            auto kb = std::minmax(to_b[v], to_b[w]);
            if (bucket(A, {ka.first, ka.second}) != bucket(B, {kb.first, kb.second})) return false;
        }
        return true;
    };

    std::function<bool(std::size_t)> place = [&](std::size_t i) {
        if (i == order.size()) return true;
        std::uint32_t v = order[i];
        for (std::uint32_t u = 0; u < b.n; ++u) {
            if (used[u]) continue;
            to_b[v] = u;
            used[u] = 1;
            bool ok = consistent(v);
            if (ok) {
                mapped.push_back(v);
                if (place(i + 1)) return true;
                mapped.pop_back();
            }
            used[u] = 0;
            to_b[v] = std::uint32_t(-1);
        }
        return false;
    };
    return place(0);
}

RootedGraph random_rooted_graph(RngStream& rng, std::uint32_t n) {
    RootedGraph g;
    g.n = n;
    g.root = 0;
    for (std::uint32_t v = 1; v < n; ++v)
        g.edges.push_back(edge(std::uint32_t(rng.below(v)), v, 1.0, rng.bernoulli(0.3)));
    std::uint64_t extra = rng.below(4); // loops and parallel edges welcome
    for (std::uint64_t k = 0; k < extra; ++k)
        g.edges.push_back(edge(std::uint32_t(rng.below(n)), std::uint32_t(rng.below(n)), 1.0,
                               rng.bernoulli(0.3)));
    return g;
}

RootedGraph relabel(const RootedGraph& g, RngStream& rng) {
    std::vector<std::uint32_t> perm(g.n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::uint32_t i = g.n; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(i)]);
    RootedGraph h;
    h.n = g.n;
    h.root = perm[g.root];
    for (const auto& e : g.edges) {
        auto f = edge(perm[e.u], perm[e.v], e.weight, e.colour);
        if (rng.bernoulli(0.5)) std::swap(f.u, f.v);
        h.edges.push_back(f);
    }
    for (std::uint32_t i = std::uint32_t(h.edges.size()); i > 1; --i)
        std::swap(h.edges[i - 1], h.edges[rng.below(i)]);
    return h;
}

CodeHistogram histogram_of(const std::map<std::string, std::uint64_t>& counts) {
    CodeHistogram h;
    for (const auto& [code, count] : counts)
        for (std::uint64_t k = 0; k < count; ++k) h.add(code);
    return h;
}

} // namespace

TEST_CASE("sibling order never enters a tree code") {
    RootedGraph a{3, 0, {edge(0, 1, 1.0, 1), edge(0, 2, 1.0, 0)}};
    RootedGraph b{3, 0, {edge(0, 2, 1.0, 0), edge(0, 1, 1.0, 1)}};
    auto ca = canonical_code(a);
    CHECK(ca == canonical_code(b));
    CHECK(ca.substr(0, 1) == "T");

    // deeper: permuting children at every level leaves the code unchanged
    RootedGraph t1{6, 0, {edge(0, 1), edge(0, 2), edge(1, 3), edge(1, 4), edge(4, 5)}};
    RootedGraph t2{6, 0, {edge(0, 2), edge(0, 1), edge(1, 4), edge(4, 5), edge(1, 3)}};
    CHECK(canonical_code(t1) == canonical_code(t2));
}

TEST_CASE("colour is part of the code") {
    RootedGraph black{2, 0, {edge(0, 1, 1.0, 0)}};
    RootedGraph red{2, 0, {edge(0, 1, 1.0, 1)}};
    CHECK(canonical_code(black) != canonical_code(red));
    CHECK_FALSE(is_isomorphic(black, red));

    RootedGraph tri0{3, 0, {edge(0, 1), edge(1, 2), edge(2, 0)}};
    RootedGraph tri1{3, 0, {edge(0, 1, 1.0, 1), edge(1, 2), edge(2, 0)}};
    CHECK(canonical_code(tri0) != canonical_code(tri1));
}

TEST_CASE("the connected two-edge rooted multigraphs are pairwise distinguished") {
    RootedGraph double_loop{1, 0, {edge(0, 0), edge(0, 0)}};
    RootedGraph root_loop{2, 0, {edge(0, 0), edge(0, 1)}};
    RootedGraph far_loop{2, 0, {edge(1, 1), edge(0, 1)}};
    RootedGraph double_edge{2, 0, {edge(0, 1), edge(0, 1)}};
    std::vector<std::string> codes = {canonical_code(double_loop), canonical_code(root_loop),
                                      canonical_code(far_loop), canonical_code(double_edge)};
    std::sort(codes.begin(), codes.end());
    CHECK(std::adjacent_find(codes.begin(), codes.end()) == codes.end());
}

TEST_CASE("the root is preserved") {
    RootedGraph end{3, 0, {edge(0, 1), edge(1, 2)}};
    RootedGraph middle{3, 1, {edge(0, 1), edge(1, 2)}};
    CHECK(is_isomorphic(end, end));
    CHECK_FALSE(is_isomorphic(end, middle));

    // non-tree: pendant on a triangle, rooted at the pendant vs on the cycle
    RootedGraph pend{4, 3, {edge(0, 1), edge(1, 2), edge(2, 0), edge(0, 3)}};
    RootedGraph cyc{4, 1, {edge(0, 1), edge(1, 2), edge(2, 0), edge(0, 3)}};
    CHECK_FALSE(is_isomorphic(pend, cyc));
}

TEST_CASE("codes are invariant under relabelling and sensitive to a colour flip") {
    RngStream rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        auto g = random_rooted_graph(rng, 3 + std::uint32_t(rng.below(8)));
        auto h = relabel(g, rng);
        CHECK(canonical_code(g) == canonical_code(h));

        auto flipped = h;
        auto& e = flipped.edges[rng.below(flipped.edges.size())];
        e.colour ^= 1; // changes the red-edge count, so never isomorphic
        CHECK(canonical_code(g) != canonical_code(flipped));
    }
}

TEST_CASE("is_isomorphic agrees with the brute-force search on seeded 8-vertex pairs") {
    RngStream rng(202);
    int isomorphic_seen = 0, distinct_seen = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto g1 = random_rooted_graph(rng, 8);
        RootedGraph g2 = (trial % 2 == 0) ? relabel(g1, rng) : random_rooted_graph(rng, 8);
        bool fast = is_isomorphic(g1, g2);
        bool slow = brute_force_isomorphic(g1, g2);
        REQUIRE(fast == slow);
        (slow ? isomorphic_seen : distinct_seen) += 1;
    }
    // the corpus must exercise both outcomes to mean anything
    CHECK(isomorphic_seen >= 400);
    CHECK(distinct_seen >= 300);
}

TEST_CASE("pendant-heavy non-trees encode without blowing the search budget") {
    // 4-cycle with three interchangeable leaves on every cycle vertex: the
    // kind of symmetry an explored neighbourhood produces in bulk
    RootedGraph g;
    g.n = 20;
    g.root = 0;
    for (std::uint32_t c = 0; c < 4; ++c) g.edges.push_back(edge(c, (c + 1) % 4));
    std::uint32_t next = 4;
    for (std::uint32_t c = 0; c < 4; ++c)
        for (int k = 0; k < 4; ++k) g.edges.push_back(edge(c, next++));
    REQUIRE(next == 20);
    RngStream rng(303);
    auto code = canonical_code(g);
    CHECK(code.substr(0, 1) == "G");
    for (int trial = 0; trial < 20; ++trial) CHECK(canonical_code(relabel(g, rng)) == code);
}

TEST_CASE("weight bins quantize weights into the code") {
    auto w = WeightModel::exponential(1.0); // median log 2
    CodeOptions none;
    CodeOptions two{2, &w};

    RootedGraph light{2, 0, {edge(0, 1, 0.3)}};
    RootedGraph mid{2, 0, {edge(0, 1, 0.5)}};
    RootedGraph heavy{2, 0, {edge(0, 1, 1.5)}};

    CHECK(canonical_code(light, none) == canonical_code(heavy, none));
    CHECK(canonical_code(light, two) == canonical_code(mid, two));   // same bin
    CHECK(canonical_code(light, two) != canonical_code(heavy, two)); // across the median
    CHECK(canonical_code(light, none) != canonical_code(light, two)); // bin count is tagged

    CHECK_THROWS_AS(canonical_code(light, CodeOptions{2, nullptr}), std::invalid_argument);
}

TEST_CASE("oversized and malformed graphs are rejected") {
    RootedGraph big;
    big.n = kCodeVertexCap + 1;
    CHECK_THROWS_AS(canonical_code(big), std::runtime_error);

    CHECK_THROWS_AS(canonical_code(RootedGraph{}), std::invalid_argument);
    CHECK_THROWS_AS(canonical_code(RootedGraph{2, 5, {edge(0, 1)}}), std::invalid_argument);
    CHECK_THROWS_AS(canonical_code(RootedGraph{2, 0, {edge(0, 7)}}), std::invalid_argument);
    // a vertex no path reaches cannot be placed relative to the root
    CHECK_THROWS_AS(canonical_code(RootedGraph{2, 0, {edge(0, 0)}}), std::invalid_argument);
}

TEST_CASE("histograms merge and survive a JSON round trip") {
    RngStream rng(404);
    CodeHistogram h;
    h.R = 2;
    h.source = "graph:n=100";
    h.regime = "explosive";
    h.seed = 99;
    for (int i = 0; i < 50; ++i) h.add(canonical_code(random_rooted_graph(rng, 6)));
    REQUIRE(h.total == 50);

    auto j = h.to_json();
    auto parsed = nlohmann::json::parse(j.dump());
    auto back = CodeHistogram::from_json(parsed);
    CHECK(back.codes == h.codes);
    CHECK(back.total == h.total);
    CHECK(back.R == h.R);
    CHECK(back.source == h.source);
    CHECK(back.regime == h.regime);
    CHECK(back.seed == h.seed);

    auto tampered = h.to_json();
    tampered["meta"]["total"] = 51;
    CHECK_THROWS_AS(CodeHistogram::from_json(tampered), std::invalid_argument);
    auto bad_hex = h.to_json();
    bad_hex["codes"]["zz"] = 1;
    CHECK_THROWS_AS(CodeHistogram::from_json(bad_hex), std::invalid_argument);

    CodeHistogram other;
    other.R = 2;
    other.add("x");
    other.add("x");
    auto merged = h;
    merged.merge(other);
    CHECK(merged.total == 52);
    CHECK(merged.codes.at("x") == 2);

    CodeHistogram wrong_r;
    wrong_r.R = 3;
    wrong_r.add("y");
    CHECK_THROWS_AS(merged.merge(wrong_r), std::invalid_argument);
}

TEST_CASE("tv_distance matches the closed forms") {
    auto a = histogram_of({{"a", 2}, {"b", 2}});
    auto b = histogram_of({{"a", 1}, {"b", 3}});
    auto c = histogram_of({{"c", 5}});
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(tv_distance(a, c) == 1.0);
    CHECK(tv_distance(a, b) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(tv_distance(a, b) == tv_distance(b, a));
    CHECK_THROWS_AS(tv_distance(a, CodeHistogram{}), std::invalid_argument);
}

TEST_CASE("tv_distance is a metric on sampled histograms") {
    RngStream rng(505);
    auto random_hist = [&]() {
        CodeHistogram h;
        const std::string alphabet = "abcdef";
        for (int i = 0; i < 40; ++i) h.add(std::string(1, alphabet[rng.below(6)]));
        return h;
    };
    for (int trial = 0; trial < 50; ++trial) {
        auto h1 = random_hist(), h2 = random_hist(), h3 = random_hist();
        double d12 = tv_distance(h1, h2), d13 = tv_distance(h1, h3), d23 = tv_distance(h2, h3);
        CHECK(d12 >= 0.0);
        CHECK(d12 <= 1.0);
        CHECK(d12 == tv_distance(h2, h1));
        CHECK(d13 <= d12 + d23 + 1e-15);
    }
}

TEST_CASE("independent samples from one law sit at the bootstrap null level") {
    const std::vector<double> probs = {0.3, 0.25, 0.2, 0.1, 0.1, 0.05};
    RngStream rng(606);
    auto draw = [&](int n) {
        CodeHistogram h;
        for (int i = 0; i < n; ++i) {
            double u = rng.next_double(), acc = 0.0;
            std::size_t k = 0;
            while (k + 1 < probs.size() && u >= (acc += probs[k])) ++k;
            h.add(std::string(1, char('a' + k)));
        }
        return h;
    };
    auto h1 = draw(400), h2 = draw(400);
    double tv = tv_distance(h1, h2);
    double null = tv_null_expectation(h1, h2, 500, RngStream(607));
    double se = tv_standard_error(h1, h2, 200, RngStream(608));
    CHECK(null > 0.0); // finite samples never coincide exactly
    CHECK(se > 0.0);
    CHECK(tv < null + 4.0 * se);
    CHECK_THROWS_AS(tv_standard_error(h1, h2, 1, RngStream(1)), std::invalid_argument);
}
