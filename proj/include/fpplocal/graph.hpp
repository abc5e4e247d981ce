#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <tuple>
#include <vector>

#include "fpplocal/models.hpp"
#include "fpplocal/rng.hpp"

namespace fpplocal {

struct DegreeSequence {
    std::vector<std::uint32_t> degrees;
    std::int64_t fixup_vertex = -1; // vertex whose degree was bumped to make the sum even

    std::uint64_t total() const;
};

// i.i.d. draws from d; an odd total is repaired by incrementing one uniform vertex
DegreeSequence sample_degree_sequence(std::size_t n, const DegreeModel& d, RngStream& rng);

// Half-edge multigraph. Half-edges are stored contiguously per vertex; the
// pairing is a fixed-point-free involution on half-edge ids. Self-loops and
// multi-edges are kept.
class MultiGraph {
public:
    struct Edge {
        std::uint32_t half_a;
        std::uint32_t half_b;
        double weight;
    };

    static MultiGraph from_edges(std::uint32_t n,
                                 const std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>& edges);

    std::uint32_t num_vertices() const { return n_; }
    std::uint32_t num_edges() const { return std::uint32_t(edges_.size()); }
    std::uint32_t num_half_edges() const { return std::uint32_t(owner_.size()); }

    std::uint32_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
    std::uint32_t half_begin(std::uint32_t v) const { return offsets_[v]; }
    std::uint32_t half_end(std::uint32_t v) const { return offsets_[v + 1]; }

    std::uint32_t owner(std::uint32_t h) const { return owner_[h]; }
    std::uint32_t mate(std::uint32_t h) const { return mate_[h]; }
    std::uint32_t edge_index(std::uint32_t h) const { return edge_of_[h]; }

    const Edge& edge(std::uint32_t e) const { return edges_[e]; }
    double weight(std::uint32_t e) const { return edges_[e].weight; }
    std::uint32_t edge_u(std::uint32_t e) const { return owner_[edges_[e].half_a]; }
    std::uint32_t edge_v(std::uint32_t e) const { return owner_[edges_[e].half_b]; }
    // endpoint of e that is not v (== v again for a self-loop)
    std::uint32_t other_end(std::uint32_t e, std::uint32_t v) const {
        std::uint32_t u = edge_u(e);
        return u == v ? edge_v(e) : u;
    }

    bool has_weights() const { return weights_assigned_; }

    friend MultiGraph pair_half_edges(const DegreeSequence& seq, RngStream& rng);
    friend void assign_weights(MultiGraph& g, const WeightModel& w, RngStream& rng);

private:
    MultiGraph() = default;
    void finish_edges(); // fill edge_of_ from edges_

    std::uint32_t n_ = 0;
    std::vector<std::uint32_t> offsets_; // size n+1
    std::vector<std::uint32_t> owner_;   // half-edge -> vertex
    std::vector<std::uint32_t> mate_;    // pairing involution
    std::vector<std::uint32_t> edge_of_; // half-edge -> edge index
    std::vector<Edge> edges_;
    bool weights_assigned_ = false;
};

// uniform pairing over all (l-1)!! perfect matchings of the half-edges
MultiGraph pair_half_edges(const DegreeSequence& seq, RngStream& rng);

// one independent draw from w per edge (self-loops and parallel edges included)
void assign_weights(MultiGraph& g, const WeightModel& w, RngStream& rng);

// shortest decimal form that parses back to exactly the same double
std::string format_double(double x);

// edge-list text dump: header "n m seed", then one line "u v weight" per edge;
// numbers are printed so that read_edge_list -> dump_edge_list is bit-exact
void dump_edge_list(const MultiGraph& g, std::ostream& out, std::uint64_t seed);
MultiGraph read_edge_list(std::istream& in, std::uint64_t* seed_out = nullptr);

} // namespace fpplocal
