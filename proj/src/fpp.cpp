#include "fpplocal/fpp.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace fpplocal {

void DijkstraWorkspace::run(const MultiGraph& g, std::uint32_t source, std::int64_t target) {
    std::uint32_t n = g.num_vertices();
    if (dist_.size() < n) {
        dist_.resize(n);
        tent_.resize(n);
        pred_.resize(n);
        sepoch_.resize(n, 0);
        tepoch_.resize(n, 0);
    }
    ++epoch_;
    if (epoch_ == 0) { // counter wrapped: stamps are stale, reset them all
        std::fill(sepoch_.begin(), sepoch_.end(), 0);
        std::fill(tepoch_.begin(), tepoch_.end(), 0);
        epoch_ = 1;
    }
    order_.clear();
    heap_.clear();

    auto cmp = std::greater<Item>();
    tent_[source] = 0.0;
    tepoch_[source] = epoch_;
    heap_.push_back({0.0, source, kNoEdge});

    while (!heap_.empty()) {
        Item it = heap_.front();
        std::pop_heap(heap_.begin(), heap_.end(), cmp);
        heap_.pop_back();
        if (sepoch_[it.v] == epoch_) continue; // lazy deletion
        sepoch_[it.v] = epoch_;
        dist_[it.v] = it.d;
        pred_[it.v] = it.e;
        order_.push_back(it.v);
        if (std::int64_t(it.v) == target) return;

        for (std::uint32_t h = g.half_begin(it.v); h < g.half_end(it.v); ++h) {
            std::uint32_t m = g.mate(h);
            std::uint32_t w = g.owner(m);
            if (sepoch_[w] == epoch_) continue;
            std::uint32_t e = g.edge_index(h);
            double nd = it.d + g.weight(e);
            // push on equality too: the (dist, vertex, edge) heap order then
            // picks the smallest edge id deterministically
            if (tepoch_[w] != epoch_ || nd <= tent_[w]) {
                tent_[w] = nd;
                tepoch_[w] = epoch_;
                heap_.push_back({nd, w, e});
                std::push_heap(heap_.begin(), heap_.end(), cmp);
            }
        }
    }
}

ShortestPathResult shortest_path_tree(const MultiGraph& g, std::uint32_t source) {
    if (source >= g.num_vertices()) throw std::invalid_argument("source out of range");
    DijkstraWorkspace ws;
    ws.run(g, source);
    ShortestPathResult r;
    r.source = source;
    r.dist.assign(g.num_vertices(), kInfDist);
    r.pred.assign(g.num_vertices(), kNoEdge);
    for (std::uint32_t v = 0; v < g.num_vertices(); ++v) {
        r.dist[v] = ws.dist(v);
        r.pred[v] = ws.pred_edge(v);
    }
    return r;
}

GeodesicNeighbourhood colour_geodesic(const MultiGraph& g, std::uint32_t o, std::uint32_t u,
                                      DijkstraWorkspace& ws) {
    if (o >= g.num_vertices() || u >= g.num_vertices())
        throw std::invalid_argument("vertex out of range");
    GeodesicNeighbourhood nb;
    nb.graph = &g;
    nb.root = o;
    nb.target = u;
    if (o == u) {
        nb.distance = 0.0;
        return nb; // empty geodesic, all-black
    }
    ws.run(g, o, std::int64_t(u));
    if (!ws.settled(u)) return nb; // different component, all-black
    nb.distance = ws.dist(u);
    std::uint32_t v = u;
    while (v != o) {
        std::uint32_t e = ws.pred_edge(v);
        nb.red_edges.push_back(e);
        v = g.other_end(e, v);
    }
    std::reverse(nb.red_edges.begin(), nb.red_edges.end());
    return nb;
}

GeodesicNeighbourhood colour_geodesic(const MultiGraph& g, std::uint32_t o, std::uint32_t u) {
    DijkstraWorkspace ws;
    return colour_geodesic(g, o, u, ws);
}

TruncatedNeighbourhood truncate(const GeodesicNeighbourhood& nb, std::uint32_t R) {
    const MultiGraph& g = *nb.graph;
    TruncatedNeighbourhood t;
    t.R = R;
    t.origin_root = nb.root;
    t.origin_target = nb.target;
    t.geodesic_distance = nb.distance;
    t.all_black = nb.all_black();

    // hop-distance BFS; relabel retained vertices in discovery order
    std::vector<std::uint32_t> label(g.num_vertices(), std::uint32_t(-1));
    std::vector<std::uint32_t> kept;
    std::queue<std::uint32_t> q;
    label[nb.root] = 0;
    kept.push_back(nb.root);
    t.hop.push_back(0);
    q.push(nb.root);
    while (!q.empty()) {
        std::uint32_t v = q.front();
        q.pop();
        std::uint32_t hv = t.hop[label[v]];
        if (hv == R) continue;
        for (std::uint32_t h = g.half_begin(v); h < g.half_end(v); ++h) {
            std::uint32_t w = g.owner(g.mate(h));
            if (label[w] != std::uint32_t(-1)) continue;
            label[w] = std::uint32_t(kept.size());
            kept.push_back(w);
            t.hop.push_back(hv + 1);
            q.push(w);
        }
    }

    std::vector<std::uint32_t> red(nb.red_edges);
    std::sort(red.begin(), red.end());
    t.graph.n = std::uint32_t(kept.size());
    t.graph.root = 0;
    for (std::uint32_t v : kept) {
        for (std::uint32_t h = g.half_begin(v); h < g.half_end(v); ++h) {
            if (h >= g.mate(h)) continue; // visit each edge from its lower half only
            std::uint32_t w = g.owner(g.mate(h));
            if (label[w] == std::uint32_t(-1)) continue;
            std::uint32_t e = g.edge_index(h);
            std::uint8_t colour = std::binary_search(red.begin(), red.end(), e) ? 1 : 0;
            t.graph.edges.push_back({label[v], label[w], g.weight(e), colour});
        }
    }
    return t;
}

TruncatedNeighbourhood sample_geodesic_neighbourhood(const MultiGraph& g, std::uint32_t R,
                                                     RngStream& rng, DijkstraWorkspace& ws) {
    if (g.num_vertices() == 0) throw std::invalid_argument("empty graph");
    std::uint32_t o = std::uint32_t(rng.below(g.num_vertices()));
    std::uint32_t u = std::uint32_t(rng.below(g.num_vertices()));
    auto nb = colour_geodesic(g, o, u, ws);
    return truncate(nb, R);
}

TruncatedNeighbourhood sample_geodesic_neighbourhood(const MultiGraph& g, std::uint32_t R,
                                                     RngStream& rng) {
    DijkstraWorkspace ws;
    return sample_geodesic_neighbourhood(g, R, rng, ws);
}

} // namespace fpplocal
