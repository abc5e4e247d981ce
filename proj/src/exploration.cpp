#include "fpplocal/exploration.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>

namespace fpplocal {

void GraphView::neighbours(std::uint32_t v, std::vector<NeighbourRecord>& out) {
    out.clear();
    for (std::uint32_t h = g_->half_begin(v); h < g_->half_end(v); ++h) {
        std::uint32_t e = g_->edge_index(h);
        out.push_back({g_->owner(g_->mate(h)), g_->weight(e), e});
    }
}

void TreeView::neighbours(std::uint32_t v, std::vector<NeighbourRecord>& out) {
    out.clear();
    if (v != 0) out.push_back({t_->parent(v), t_->edge_weight(v), v});
    std::uint32_t first = t_->children_begin(v);
    for (std::uint32_t i = 0; i < t_->child_count(v); ++i)
        out.push_back({first + i, t_->edge_weight(first + i), first + i});
}

std::pair<std::uint64_t, std::uint64_t> stub_counts(const ActiveClassification& c) {
    return {c.window_stubs, c.off_branch_stubs};
}

void Exploration::touch(std::uint64_t vertex_id) {
    if (vertex_id >= state_.size()) {
        state_.resize(vertex_id + 1, 0);
        label_.resize(vertex_id + 1, kNoVertex);
        slot_of_.resize(vertex_id + 1, kNoVertex);
    }
}

void Exploration::touch_edge(std::uint64_t edge_id) {
    if (edge_id >= edge_seen_.size()) edge_seen_.resize(edge_id + 1, 0);
}

void Exploration::activate(std::uint32_t v, double dist, double parent_dist, std::uint32_t anchor) {
    touch(v);
    state_[v] = 1;
    if (label_[v] == kNoVertex) label_[v] = next_label_++;
    slot_of_[v] = std::uint32_t(slots_.size());
    slots_.push_back({dist, parent_dist, tie_rng_.next_u64(), v, anchor, g_->degree(v)});
    heap_.push_back({dist, slots_.back().tie, v});
    std::push_heap(heap_.begin(), heap_.end(), std::greater<HeapEntry>());
}

void Exploration::remove_slot(std::uint32_t idx) {
    std::uint32_t v = slots_[idx].vertex;
    slot_of_[v] = kNoVertex;
    if (idx + 1 != slots_.size()) {
        slots_[idx] = slots_.back();
        slot_of_[slots_[idx].vertex] = idx;
    }
    slots_.pop_back();
}

Exploration::Exploration(ExpandableGraph& g, std::uint32_t R, RngStream tie_rng)
    : g_(&g), R_(R), tie_rng_(tie_rng) {
    std::uint32_t root = g_->root();
    touch(root);
    label_[root] = next_label_++;
    last_vertex_ = root;
    last_anchor_ = root;

    // hop-R ball: BFS over revealed neighbourhoods; boundary vertices are
    // expanded only to pick up edges between two boundary vertices
    std::vector<std::uint32_t> ball{root};
    std::vector<std::uint32_t> hop{0};
    struct BallEdge {
        std::uint32_t u, v; // ball labels
        double w;
    };
    std::vector<BallEdge> ball_edges;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        std::uint32_t v = ball[i];
        std::uint32_t hv = hop[i];
        g_->neighbours(v, scratch_);
        for (const auto& rec : scratch_) {
            touch(rec.vertex);
            touch_edge(rec.edge);
            if (edge_seen_[rec.edge]) continue;
            bool known = label_[rec.vertex] != kNoVertex;
            if (!known && hv == R_) continue; // leads outside the ball, reveal later
            if (!known) {
                label_[rec.vertex] = next_label_++;
                ball.push_back(rec.vertex);
                hop.push_back(hv + 1);
            }
            edge_seen_[rec.edge] = 1;
            ball_edges.push_back({label_[v], label_[rec.vertex], rec.weight});
            revealed_.push_back({label_[v], label_[rec.vertex], rec.weight, 0});
        }
    }

    // weighted distances inside the revealed ball
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(ball.size());
    for (const auto& e : ball_edges) {
        adj[e.u].push_back({e.v, e.w});
        adj[e.v].push_back({e.u, e.w});
    }
    std::vector<double> dist(ball.size(), std::numeric_limits<double>::infinity());
    std::vector<double> pdist(ball.size(), -std::numeric_limits<double>::infinity());
    using QE = std::pair<double, std::uint32_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
    dist[0] = 0.0;
    pq.push({0.0, 0});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        for (auto [w, wt] : adj[u])
            if (d + wt < dist[w]) {
                dist[w] = d + wt;
                pdist[w] = d;
                pq.push({dist[w], w});
            }
    }

    // boundary vertices become the initial active set, with full degrees
    for (std::size_t i = 0; i < ball.size(); ++i) {
        std::uint32_t v = ball[i];
        if (hop[i] == R_) {
            state_[v] = 0; // activate() flips it
            activate(v, dist[label_[v]], pdist[label_[v]], v);
        } else {
            state_[v] = 2;
            ++explored_;
        }
    }
}

bool Exploration::step() {
    while (!heap_.empty()) {
        HeapEntry top = heap_.front();
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<HeapEntry>());
        heap_.pop_back();
        std::uint32_t v = top.vertex;
        if (state_[v] != 1) continue;
        std::uint32_t idx = slot_of_[v];
        if (slots_[idx].dist != top.dist || slots_[idx].tie != top.tie) continue; // stale

        Slot s = slots_[idx];
        remove_slot(idx);
        state_[v] = 2;
        ++explored_;
        ++n_;
        last_vertex_ = v;
        last_anchor_ = s.anchor;
        last_dist_ = s.dist;
        last_is_root_ = false;

        g_->neighbours(v, scratch_);
        for (const auto& rec : scratch_) {
            touch(rec.vertex);
            touch_edge(rec.edge);
            if (edge_seen_[rec.edge]) continue;
            edge_seen_[rec.edge] = 1;
            double nd = s.dist + rec.weight;
            switch (state_[rec.vertex]) {
                case 0:
                    activate(rec.vertex, nd, s.dist, s.anchor);
                    break;
                case 1: {
                    Slot& other = slots_[slot_of_[rec.vertex]];
                    if (nd < other.dist) {
                        other.dist = nd;
                        other.parent_dist = s.dist;
                        other.anchor = s.anchor;
                        heap_.push_back({nd, other.tie, rec.vertex});
                        std::push_heap(heap_.begin(), heap_.end(), std::greater<HeapEntry>());
                    }
                    break;
                }
                case 2:
                    break; // closure edge between explored vertices; revealed below
            }
            revealed_.push_back({label_[v], label_[rec.vertex], rec.weight, 0});
        }
        return true;
    }
    last_is_root_ = true;
    last_vertex_ = g_->root();
    last_anchor_ = g_->root();
    return false;
}

RunStatus Exploration::run(std::uint64_t max_steps, double max_seconds) {
    auto start = std::chrono::steady_clock::now();
    for (std::uint64_t k = 0; k < max_steps; ++k) {
        if (!step()) return RunStatus::Exhausted;
        if ((k & 63) == 0 && std::isfinite(max_seconds)) {
            double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (elapsed > max_seconds) return RunStatus::TimeCap;
        }
    }
    return RunStatus::StepCap;
}

ActiveClassification Exploration::classify(double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
    if (n_ == 0 || last_is_root_) throw std::invalid_argument("no reference vertex");
    ActiveClassification c;
    c.R = R_;
    c.eps = eps;
    double threshold = last_dist_ + eps;
    for (const Slot& s : slots_) {
        bool in_branch = s.anchor == last_anchor_;
        bool near = s.dist <= threshold;
        int type = in_branch ? (near ? 0 : 1) : (near ? 2 : 3);
        std::uint64_t stubs = s.degree > 0 ? s.degree - 1 : 0;
        c.type_count[type] += 1;
        c.type_stubs[type] += stubs;
        if (!in_branch) {
            c.off_branch_count += 1;
            c.off_branch_stubs += stubs;
        } else if (near && s.parent_dist < last_dist_ && s.dist >= last_dist_ && s.dist < threshold) {
            c.window_count += 1;
            c.window_stubs += stubs;
        }
    }
    return c;
}

RootedGraph Exploration::explored_graph() const {
    RootedGraph g;
    g.n = next_label_;
    g.root = 0;
    g.edges = revealed_;
    return g;
}

double Exploration::active_distance(std::uint32_t v) const {
    if (!is_active(v)) throw std::invalid_argument("vertex not active");
    return slots_[slot_of_[v]].dist;
}

std::uint32_t Exploration::recorded_degree(std::uint32_t v) const {
    if (!is_active(v)) throw std::invalid_argument("vertex not active");
    return slots_[slot_of_[v]].degree;
}

void write_trace_header(std::ostream& out) {
    out << "N,v_star,dist,active,type_i,type_ii,type_iii,type_iv,"
           "window_count,window_stubs,off_branch_stubs\n";
}

void append_trace_row(std::ostream& out, const Exploration& ex, const ActiveClassification& c) {
    out << ex.steps() << ',' << ex.last_explored() << ',' << format_double(ex.last_distance())
        << ',' << ex.active_count();
    for (int i = 0; i < 4; ++i) out << ',' << c.type_count[i];
    out << ',' << c.window_count << ',' << c.window_stubs << ',' << c.off_branch_stubs << '\n';
}

} // namespace fpplocal
