#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <vector>

#include "fpplocal/graph.hpp"
#include "fpplocal/limit_tree.hpp"
#include "fpplocal/rng.hpp"
#include "fpplocal/rooted_graph.hpp"

namespace fpplocal {

struct NeighbourRecord {
    std::uint32_t vertex;
    double weight;
    std::uint64_t edge; // stable id used to reveal each edge exactly once
};

// One exploration engine serves both the configuration graph and the lazily
// grown limit tree through this interface. Expansion must be deterministic per
// realized graph: repeated calls agree.
class ExpandableGraph {
public:
    virtual ~ExpandableGraph() = default;
    virtual std::uint32_t root() const = 0;
    // full degree, revealable without revealing where the edges lead
    virtual std::uint32_t degree(std::uint32_t v) = 0;
    virtual void neighbours(std::uint32_t v, std::vector<NeighbourRecord>& out) = 0;
};

class GraphView final : public ExpandableGraph {
public:
    GraphView(const MultiGraph& g, std::uint32_t root) : g_(&g), root_(root) {}
    std::uint32_t root() const override { return root_; }
    std::uint32_t degree(std::uint32_t v) override { return g_->degree(v); }
    void neighbours(std::uint32_t v, std::vector<NeighbourRecord>& out) override;

private:
    const MultiGraph* g_;
    std::uint32_t root_;
};

// Tree edges are identified by their child endpoint. Degree queries draw the
// child count only; weights are drawn when the node is expanded.
class TreeView final : public ExpandableGraph {
public:
    explicit TreeView(LimitTree& t) : t_(&t) {}
    std::uint32_t root() const override { return 0; }
    std::uint32_t degree(std::uint32_t v) override {
        return t_->child_count(v) + (v == 0 ? 0 : 1);
    }
    void neighbours(std::uint32_t v, std::vector<NeighbourRecord>& out) override;

private:
    LimitTree* t_;
};

// Active-set breakdown at the current step: types (i)-(iv) split by branch
// membership (anchor equal to the branch anchor of v*(N)) and by distance
// threshold d(o, v*(N)) + eps; the window set additionally requires
// d(o,v-) < d(o,v*(N)) <= d(o,v) < d(o,v*(N)) + eps.
struct ActiveClassification {
    std::uint32_t R = 0;
    double eps = 0.0;
    std::array<std::uint64_t, 4> type_count{};
    std::array<std::uint64_t, 4> type_stubs{}; // sum of (recorded degree - 1)
    std::uint64_t window_count = 0;
    std::uint64_t window_stubs = 0;
    std::uint64_t off_branch_count = 0; // types (iii) + (iv)
    std::uint64_t off_branch_stubs = 0;
};

// (in-branch window stubs, off-branch stubs)
std::pair<std::uint64_t, std::uint64_t> stub_counts(const ActiveClassification& c);

enum class RunStatus { Exhausted, StepCap, TimeCap };

class Exploration {
public:
    static constexpr std::uint32_t kNoVertex = std::uint32_t(-1);

    // reveals the hop-R ball, activates its boundary with recorded degrees
    Exploration(ExpandableGraph& g, std::uint32_t R, RngStream tie_rng);

    // explores the weighted-distance minimizer; false at the empty-active
    // fixpoint (v*(N) stays the root, state unchanged)
    bool step();
    RunStatus run(std::uint64_t max_steps,
                  double max_seconds = std::numeric_limits<double>::infinity());

    std::uint64_t steps() const { return n_; }
    std::uint32_t last_explored() const { return last_vertex_; }
    std::uint32_t branch_anchor() const { return last_anchor_; } // v*_R(N)
    double last_distance() const { return last_dist_; }
    bool at_fixpoint() const { return last_is_root_; }

    std::uint64_t active_count() const { return slots_.size(); }
    std::uint64_t explored_count() const { return explored_; }
    ActiveClassification classify(double eps) const;

    // everything revealed so far: explored and active vertices (labels in
    // discovery order, root = 0) plus all revealed edges, uncoloured
    RootedGraph explored_graph() const;

    bool is_explored(std::uint32_t v) const { return v < state_.size() && state_[v] == 2; }
    bool is_active(std::uint32_t v) const { return v < state_.size() && state_[v] == 1; }
    double active_distance(std::uint32_t v) const;
    std::uint32_t recorded_degree(std::uint32_t v) const;

private:
    struct Slot {
        double dist;
        double parent_dist;
        std::uint64_t tie;
        std::uint32_t vertex;
        std::uint32_t anchor;
        std::uint32_t degree;
    };
    struct HeapEntry {
        double dist;
        std::uint64_t tie;
        std::uint32_t vertex;
        bool operator>(const HeapEntry& o) const {
            if (dist != o.dist) return dist > o.dist;
            return tie > o.tie;
        }
    };

    void touch(std::uint64_t vertex_id);
    void touch_edge(std::uint64_t edge_id);
    std::uint32_t label(std::uint32_t v) const { return label_[v]; }
    void activate(std::uint32_t v, double dist, double parent_dist, std::uint32_t anchor);
    void remove_slot(std::uint32_t idx);

    ExpandableGraph* g_;
    std::uint32_t R_;
    RngStream tie_rng_;

    std::vector<std::uint8_t> state_;  // 0 unseen, 1 active, 2 explored
    std::vector<std::uint32_t> label_; // discovery label per vertex id
    std::vector<std::uint32_t> slot_of_;
    std::vector<std::uint8_t> edge_seen_;
    std::vector<Slot> slots_;
    std::vector<HeapEntry> heap_;
    std::vector<RootedGraph::Edge> revealed_;
    std::vector<NeighbourRecord> scratch_;

    std::uint32_t next_label_ = 0;
    std::uint64_t n_ = 0;
    std::uint64_t explored_ = 0;
    std::uint32_t last_vertex_;
    std::uint32_t last_anchor_ = kNoVertex;
    double last_dist_ = 0.0;
    bool last_is_root_ = true;
};

void write_trace_header(std::ostream& out);
void append_trace_row(std::ostream& out, const Exploration& ex, const ActiveClassification& c);

} // namespace fpplocal
