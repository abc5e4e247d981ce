#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fpplocal/graph.hpp"
#include "fpplocal/rooted_graph.hpp"

namespace fpplocal {

inline constexpr double kInfDist = std::numeric_limits<double>::infinity();
inline constexpr std::uint32_t kNoEdge = std::uint32_t(-1);

struct ShortestPathResult {
    std::uint32_t source = 0;
    std::vector<double> dist;        // +inf for unreached vertices
    std::vector<std::uint32_t> pred; // incoming edge id, kNoEdge at source/unreached
};

// Reusable single-source Dijkstra scratch. Epoch stamps avoid O(n) clearing
// between queries; heap ties break by (distance, vertex id, edge id) so runs
// are bit-reproducible even under numerically equal weights.
class DijkstraWorkspace {
public:
    static constexpr std::int64_t kFullTree = -1;

    // stops as soon as `target` is settled; kFullTree settles everything reachable
    void run(const MultiGraph& g, std::uint32_t source, std::int64_t target = kFullTree);

    bool settled(std::uint32_t v) const { return sepoch_[v] == epoch_; }
    double dist(std::uint32_t v) const { return settled(v) ? dist_[v] : kInfDist; }
    std::uint32_t pred_edge(std::uint32_t v) const { return settled(v) ? pred_[v] : kNoEdge; }
    const std::vector<std::uint32_t>& settle_order() const { return order_; }

private:
    struct Item {
        double d;
        std::uint32_t v;
        std::uint32_t e;
        bool operator>(const Item& o) const {
            if (d != o.d) return d > o.d;
            if (v != o.v) return v > o.v;
            return e > o.e;
        }
    };

    std::vector<double> dist_;  // settled distance
    std::vector<double> tent_;  // tentative label for push pruning
    std::vector<std::uint32_t> pred_;
    std::vector<std::uint32_t> sepoch_, tepoch_;
    std::vector<std::uint32_t> order_;
    std::vector<Item> heap_;
    std::uint32_t epoch_ = 0;
};

// full single-source tree (dense result; workspace path preferred in loops)
ShortestPathResult shortest_path_tree(const MultiGraph& g, std::uint32_t source);

struct GeodesicNeighbourhood {
    const MultiGraph* graph = nullptr;
    std::uint32_t root = 0;   // o
    std::uint32_t target = 0; // u
    double distance = kInfDist;
    std::vector<std::uint32_t> red_edges; // geodesic edge ids from o towards u; empty = all-black

    bool all_black() const { return red_edges.empty(); }
};

GeodesicNeighbourhood colour_geodesic(const MultiGraph& g, std::uint32_t o, std::uint32_t u);
GeodesicNeighbourhood colour_geodesic(const MultiGraph& g, std::uint32_t o, std::uint32_t u,
                                      DijkstraWorkspace& ws);

struct TruncatedNeighbourhood {
    RootedGraph graph;              // relabelled, root = 0, BFS discovery order
    std::uint32_t R = 0;
    std::vector<std::uint32_t> hop; // hop distance of each retained vertex

    // diagnostics about the untruncated sample
    std::uint32_t origin_root = 0;
    std::uint32_t origin_target = 0;
    double geodesic_distance = kInfDist;
    bool all_black = true;
};

// induced subgraph on vertices within hop distance R of the root, colours kept
TruncatedNeighbourhood truncate(const GeodesicNeighbourhood& nb, std::uint32_t R);

// o, u independent uniform; geodesic coloured red; truncated at R
TruncatedNeighbourhood sample_geodesic_neighbourhood(const MultiGraph& g, std::uint32_t R,
                                                     RngStream& rng);
TruncatedNeighbourhood sample_geodesic_neighbourhood(const MultiGraph& g, std::uint32_t R,
                                                     RngStream& rng, DijkstraWorkspace& ws);

} // namespace fpplocal
