#include "fpplocal/graph.hpp"

#include <charconv>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fpplocal {

std::uint64_t DegreeSequence::total() const {
    return std::accumulate(degrees.begin(), degrees.end(), std::uint64_t(0));
}

DegreeSequence sample_degree_sequence(std::size_t n, const DegreeModel& d, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("need at least one vertex");
    DegreeSequence seq;
    seq.degrees.resize(n);
    for (std::size_t i = 0; i < n; ++i) seq.degrees[i] = d.sample(rng);
    if (seq.total() % 2 != 0) {
        std::uint64_t v = rng.below(n);
        seq.degrees[v] += 1;
        seq.fixup_vertex = std::int64_t(v);
    }
    return seq;
}

void MultiGraph::finish_edges() {
    edge_of_.resize(owner_.size());
    for (std::uint32_t e = 0; e < edges_.size(); ++e) {
        edge_of_[edges_[e].half_a] = e;
        edge_of_[edges_[e].half_b] = e;
    }
}

MultiGraph pair_half_edges(const DegreeSequence& seq, RngStream& rng) {
    std::uint64_t l = seq.total();
    if (l % 2 != 0) throw std::invalid_argument("odd half-edge count; degree sequence invariant violated");

    MultiGraph g;
    g.n_ = std::uint32_t(seq.degrees.size());
    g.offsets_.resize(g.n_ + 1, 0);
    for (std::uint32_t v = 0; v < g.n_; ++v) g.offsets_[v + 1] = g.offsets_[v] + seq.degrees[v];
    g.owner_.resize(l);
    for (std::uint32_t v = 0; v < g.n_; ++v)
        for (std::uint32_t h = g.offsets_[v]; h < g.offsets_[v + 1]; ++h) g.owner_[h] = v;

    // match the first unmatched half-edge with a uniform other unmatched one
    std::vector<std::uint32_t> pool(l);
    std::iota(pool.begin(), pool.end(), 0u);
    g.mate_.resize(l);
    g.edges_.reserve(l / 2);
    for (std::uint64_t i = 0; i < l; i += 2) {
        std::uint64_t j = i + 1 + rng.below(l - i - 1);
        std::swap(pool[i + 1], pool[j]);
        std::uint32_t a = pool[i], b = pool[i + 1];
        g.mate_[a] = b;
        g.mate_[b] = a;
        g.edges_.push_back({a, b, 0.0});
    }
    g.finish_edges();
    return g;
}

void assign_weights(MultiGraph& g, const WeightModel& w, RngStream& rng) {
    for (auto& e : g.edges_) e.weight = w.sample(rng);
    g.weights_assigned_ = true;
}

MultiGraph MultiGraph::from_edges(std::uint32_t n,
                                  const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges) {
    MultiGraph g;
    g.n_ = n;
    std::vector<std::uint32_t> deg(n, 0);
    for (auto [u, v, wt] : edges) {
        if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
        if (!(wt > 0.0)) throw std::invalid_argument("edge weight must be positive");
        ++deg[u];
        ++deg[v];
    }
    g.offsets_.resize(n + 1, 0);
    for (std::uint32_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
    std::uint64_t l = g.offsets_[n];
    g.owner_.resize(l);
    g.mate_.resize(l);
    for (std::uint32_t v = 0; v < n; ++v)
        for (std::uint32_t h = g.offsets_[v]; h < g.offsets_[v + 1]; ++h) g.owner_[h] = v;

    std::vector<std::uint32_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    g.edges_.reserve(edges.size());
    for (auto [u, v, wt] : edges) {
        std::uint32_t ha = cursor[u]++;
        std::uint32_t hb = cursor[v]++;
        g.mate_[ha] = hb;
        g.mate_[hb] = ha;
        g.edges_.push_back({ha, hb, wt});
    }
    g.finish_edges();
    g.weights_assigned_ = true;
    return g;
}

std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void dump_edge_list(const MultiGraph& g, std::ostream& out, std::uint64_t seed) {
    out << g.num_vertices() << ' ' << g.num_edges() << ' ' << seed << '\n';
    for (std::uint32_t e = 0; e < g.num_edges(); ++e)
        out << g.edge_u(e) << ' ' << g.edge_v(e) << ' ' << format_double(g.weight(e)) << '\n';
}

MultiGraph read_edge_list(std::istream& in, std::uint64_t* seed_out) {
    std::uint32_t n = 0, m = 0;
    std::uint64_t seed = 0;
    if (!(in >> n >> m >> seed)) throw std::runtime_error("malformed edge-list header");
    if (seed_out) *seed_out = seed;
    std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;
    edges.reserve(m);
    for (std::uint32_t e = 0; e < m; ++e) {
        std::uint32_t u, v;
        std::string token;
        if (!(in >> u >> v >> token)) throw std::runtime_error("truncated edge list");
        double wt = 0.0;
        auto res = std::from_chars(token.data(), token.data() + token.size(), wt);
        if (res.ec != std::errc() || res.ptr != token.data() + token.size())
            throw std::runtime_error("malformed edge weight: " + token);
        edges.emplace_back(u, v, wt);
    }
    return MultiGraph::from_edges(n, edges);
}

} // namespace fpplocal
