#pragma once

#include <cstdint>
#include <vector>

namespace fpplocal {

// Small rooted coloured weighted multigraph used for truncated neighbourhoods,
// truncated limit trees and explored subgraphs. Vertex labels are 0..n-1 and
// carry no meaning beyond identification; colour 1 marks red (geodesic) edges.
struct RootedGraph {
    struct Edge {
        std::uint32_t u;
        std::uint32_t v;
        double weight;
        std::uint8_t colour;
    };

    std::uint32_t n = 0;
    std::uint32_t root = 0;
    std::vector<Edge> edges;

    bool all_black() const {
        for (const auto& e : edges)
            if (e.colour != 0) return false;
        return true;
    }
    std::uint32_t red_count() const {
        std::uint32_t c = 0;
        for (const auto& e : edges) c += (e.colour != 0);
        return c;
    }
};

} // namespace fpplocal
