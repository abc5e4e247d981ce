#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fpplocal/models.hpp"
#include "fpplocal/rng.hpp"
#include "fpplocal/rooted_graph.hpp"

namespace fpplocal {

// Weighted Galton-Watson tree grown lazily: the root draws its child count
// from the degree law, every other node from the offspring law, and each
// parent-child edge carries an independent weight. Birth times satisfy
// S_root = 0 and S_child = S_parent + edge weight.
class LimitTree {
public:
    static constexpr std::uint32_t kNone = std::uint32_t(-1);
    static constexpr std::uint32_t kNotDrawn = std::uint32_t(-2);

    LimitTree(const DegreeModel& d, const OffspringModel& off, const WeightModel& w,
              RngStream rng, std::uint64_t node_cap = 10'000'000);

    std::uint32_t num_nodes() const { return std::uint32_t(nodes_.size()); }
    std::uint32_t parent(std::uint32_t v) const { return nodes_[v].parent; }
    double edge_weight(std::uint32_t v) const { return nodes_[v].weight; }
    double birth(std::uint32_t v) const { return nodes_[v].birth; }
    std::uint32_t generation(std::uint32_t v) const { return nodes_[v].gen; }

    // lazily draws the child count (degree law at the root, offspring law elsewhere)
    std::uint32_t child_count(std::uint32_t v);
    // lazily draws the child edge weights and materializes the children;
    // children of v occupy the contiguous id range [children_begin, +child_count)
    std::uint32_t children_begin(std::uint32_t v);
    bool children_realized(std::uint32_t v) const { return nodes_[v].first_child != kNone; }

    // realizes nodes in increasing birth-time order until `budget` births or
    // the frontier empties. Compact mode materializes a node only at its own
    // birth and prunes frontier candidates that provably cannot be born within
    // the remaining budget; it supports only parent-chain queries afterwards.
    void grow_by_birth_order(std::uint64_t budget, bool compact = false);
    std::uint64_t births() const { return births_; }
    std::uint32_t born_at(std::uint64_t k) const; // id of the (k+1)-th born node
    std::uint32_t last_born() const;
    bool finite_so_far() const { return finite_; }
    bool grown() const { return grown_; }

private:
    struct Node {
        std::uint32_t parent;
        std::uint32_t first_child;
        std::uint32_t count;
        std::uint32_t gen;
        double weight;
        double birth;
    };

    void check_cap(std::uint64_t extra) const;

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> birth_order_; // full-mode growth record
    const DegreeModel* degree_;
    const OffspringModel* off_;
    const WeightModel* weight_;
    RngStream rng_;
    std::uint64_t node_cap_;
    std::uint64_t births_ = 0;
    bool finite_ = false;
    bool grown_ = false;
    bool compact_ = false;
};

struct MartingaleEstimate {
    std::uint32_t node;
    std::uint32_t horizon;
    double value;
};

// exact sum over descendants n generations below v of e^{-lambda * d(v, v')},
// realizing the subtree on demand (node cap enforced by the tree)
MartingaleEstimate truncated_martingale(LimitTree& t, std::uint32_t v, double lambda,
                                        std::uint32_t n);

// picks index i with probability scores[i] / sum(scores); at least one score
// must be positive
std::size_t pick_proportional(const std::vector<double>& scores, RngStream& rng);

// Red spine in the Malthusian regime. Walks down from the root for R steps,
// choosing child v' proportional to e^{-lambda w(v,v')} * M_hat(v') where the
// probing horizon shrinks by one per step (total lookahead R + horizon). The
// shrinking horizon realizes the per-vertex ray law consistently: the sum of
// child scores equals the parent's martingale value, so a positive parent
// always has a child to descend into. Returns nullopt when the root's
// martingale value at the full lookahead is zero (tree declared finite).
std::optional<std::vector<std::uint32_t>> sample_spine_malthusian(LimitTree& t, double lambda,
                                                                  std::uint32_t R,
                                                                  std::uint32_t horizon,
                                                                  RngStream& rng);

// Red ray in the explosive regime: the length-R ancestral prefix of the
// N-th-born node of a tree grown in birth order (the approximation to the ray
// to explosion); nullopt if the frontier emptied before N births.
std::optional<std::vector<std::uint32_t>> sample_ray_explosive(LimitTree& t, std::uint64_t n_max,
                                                               std::uint32_t R);

enum class Regime { Malthusian, Explosive };

struct LimitTreeParams {
    double lambda = 0.0;           // Malthusian rate
    std::uint32_t horizon = 12;    // Malthusian martingale probing depth
    std::uint64_t budget = 10'000; // explosive birth budget
    double zeta = 0.0;             // survival probability for the colouring coin
    std::uint64_t node_cap = 10'000'000;
};

struct ColouredLimitTree {
    RootedGraph graph; // tree truncated at R, vertex 0 = root, BFS labels
    Regime regime = Regime::Malthusian;
    bool coin = false;              // I ~ Bernoulli(zeta)
    bool declared_infinite = false; // proxy: martingale > 0 (Malthusian) / budget reached (explosive)
    std::uint32_t red_length = 0;
};

// grows one limit tree, truncates at R and colours the red ray prefix iff the
// coin succeeds and the tree is declared infinite; all-black otherwise
ColouredLimitTree sample_coloured_limit_tree(Regime regime, const DegreeModel& d,
                                             const OffspringModel& off, const WeightModel& w,
                                             std::uint32_t R, const LimitTreeParams& params,
                                             RngStream& rng);

// debug dump, one line "parent child weight colour" per edge
void dump_tree(const RootedGraph& g, std::ostream& out);

} // namespace fpplocal
