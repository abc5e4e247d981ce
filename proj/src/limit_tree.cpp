#include "fpplocal/limit_tree.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "fpplocal/graph.hpp" // format helpers share the edge-list conventions

namespace fpplocal {

LimitTree::LimitTree(const DegreeModel& d, const OffspringModel& off, const WeightModel& w,
                     RngStream rng, std::uint64_t node_cap)
    : degree_(&d), off_(&off), weight_(&w), rng_(rng), node_cap_(node_cap) {
    nodes_.push_back({kNone, kNone, kNotDrawn, 0, 0.0, 0.0});
}

void LimitTree::check_cap(std::uint64_t extra) const {
    if (nodes_.size() + extra > node_cap_)
        throw std::runtime_error("martingale horizon too deep for this realization");
}

std::uint32_t LimitTree::child_count(std::uint32_t v) {
    Node& nd = nodes_[v];
    if (nd.count == kNotDrawn)
        nd.count = (v == 0) ? degree_->sample(rng_) : off_->sample(rng_);
    return nd.count;
}

std::uint32_t LimitTree::children_begin(std::uint32_t v) {
    if (compact_) throw std::logic_error("compactly grown tree has no materialized children");
    if (nodes_[v].first_child != kNone) return nodes_[v].first_child;
    std::uint32_t k = child_count(v);
    check_cap(k);
    std::uint32_t first = std::uint32_t(nodes_.size());
    // nodes_[v] may move while appending; copy what we need first
    std::uint32_t gen = nodes_[v].gen + 1;
    double base = nodes_[v].birth;
    for (std::uint32_t i = 0; i < k; ++i) {
        double w = weight_->sample(rng_);
        nodes_.push_back({v, kNone, kNotDrawn, gen, w, base + w});
    }
    nodes_[v].first_child = first;
    return first;
}

void LimitTree::grow_by_birth_order(std::uint64_t budget, bool compact) {
    if (budget < 1) throw std::invalid_argument("birth budget must be positive");
    if (grown_ || nodes_.size() != 1 || nodes_[0].count != kNotDrawn)
        throw std::logic_error("grow_by_birth_order needs a fresh tree");
    grown_ = true;
    compact_ = compact;

    if (!compact) {
        // (birth, id) min-heap over materialized-but-unborn children
        using Entry = std::pair<double, std::uint32_t>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> frontier;
        birth_order_.push_back(0);
        births_ = 1;
        std::uint32_t first = children_begin(0);
        for (std::uint32_t i = 0; i < child_count(0); ++i)
            frontier.push({nodes_[first + i].birth, first + i});
        while (births_ < budget && !frontier.empty()) {
            auto [b, v] = frontier.top();
            frontier.pop();
            birth_order_.push_back(v);
            ++births_;
            std::uint32_t fc = children_begin(v);
            for (std::uint32_t i = 0; i < child_count(v); ++i)
                frontier.push({nodes_[fc + i].birth, fc + i});
        }
        finite_ = frontier.empty() && births_ < budget;
        return;
    }

    // Compact mode: the arena holds born nodes only, in birth order. Frontier
    // entries carry (birth, parent, weight). Whenever the heap exceeds twice
    // the remaining budget it is pruned to the `remaining` smallest entries:
    // a candidate with more than `remaining` smaller competitors cannot be
    // born before the budget runs out, and later arrivals only compete harder.
    struct Entry {
        double birth;
        double weight;
        std::uint32_t parent;
        bool operator>(const Entry& o) const {
            if (birth != o.birth) return birth > o.birth;
            return parent > o.parent;
        }
    };
    std::vector<Entry> heap;
    auto cmp = std::greater<Entry>();

    auto push_children = [&](std::uint32_t v) {
        std::uint32_t k = child_count(v);
        double base = nodes_[v].birth;
        for (std::uint32_t i = 0; i < k; ++i) {
            double w = weight_->sample(rng_);
            heap.push_back({base + w, w, v});
            std::push_heap(heap.begin(), heap.end(), cmp);
        }
    };

    births_ = 1;
    push_children(0);
    while (births_ < budget && !heap.empty()) {
        std::uint64_t remaining = budget - births_;
        if (heap.size() > 2 * remaining) {
            std::nth_element(heap.begin(), heap.begin() + std::ptrdiff_t(remaining) - 1, heap.end(),
                             [](const Entry& a, const Entry& b) { return b > a; });
            heap.resize(remaining);
            std::make_heap(heap.begin(), heap.end(), cmp);
        }
        Entry e = heap.front();
        std::pop_heap(heap.begin(), heap.end(), cmp);
        heap.pop_back();
        check_cap(1);
        std::uint32_t id = std::uint32_t(nodes_.size());
        nodes_.push_back({e.parent, kNone, kNotDrawn, nodes_[e.parent].gen + 1, e.weight, e.birth});
        ++births_;
        push_children(id);
    }
    finite_ = heap.empty() && births_ < budget;
}

std::uint32_t LimitTree::born_at(std::uint64_t k) const {
    if (!grown_ || k >= births_) throw std::out_of_range("birth index beyond realized growth");
    return compact_ ? std::uint32_t(k) : birth_order_[k];
}

std::uint32_t LimitTree::last_born() const { return born_at(births_ - 1); }

namespace {

double martingale_value(LimitTree& t, std::uint32_t v, double lambda, std::uint32_t n) {
    if (n == 0) return 1.0;
    std::uint32_t k = t.child_count(v);
    if (k == 0) return 0.0;
    std::uint32_t first = t.children_begin(v);
    double acc = 0.0;
    for (std::uint32_t i = 0; i < k; ++i)
        acc += std::exp(-lambda * t.edge_weight(first + i)) *
               martingale_value(t, first + i, lambda, n - 1);
    return acc;
}

} // namespace

MartingaleEstimate truncated_martingale(LimitTree& t, std::uint32_t v, double lambda,
                                        std::uint32_t n) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return {v, n, martingale_value(t, v, lambda, n)};
}

std::size_t pick_proportional(const std::vector<double>& scores, RngStream& rng) {
    double total = 0.0;
    for (double s : scores) {
        if (s < 0.0) throw std::invalid_argument("negative score");
        total += s;
    }
    if (!(total > 0.0)) throw std::logic_error("no positive score to pick from");
    double x = rng.next_double() * total;
    double acc = 0.0;
    std::size_t last_pos = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > 0.0) last_pos = i;
        acc += scores[i];
        if (x < acc) return i;
    }
    return last_pos; // x landed on the rounding tail
}

std::optional<std::vector<std::uint32_t>> sample_spine_malthusian(LimitTree& t, double lambda,
                                                                  std::uint32_t R,
                                                                  std::uint32_t horizon,
                                                                  RngStream& rng) {
    if (horizon < 1) throw std::invalid_argument("horizon must be positive");
    std::uint32_t total_lookahead = R + horizon;
    if (truncated_martingale(t, 0, lambda, total_lookahead).value <= 0.0) return std::nullopt;

    std::vector<std::uint32_t> ray;
    std::uint32_t v = 0;
    std::vector<double> scores;
    for (std::uint32_t step = 0; step < R; ++step) {
        std::uint32_t k = t.child_count(v);
        std::uint32_t first = t.children_begin(v);
        scores.assign(k, 0.0);
        for (std::uint32_t i = 0; i < k; ++i)
            scores[i] = std::exp(-lambda * t.edge_weight(first + i)) *
                        martingale_value(t, first + i, lambda, total_lookahead - step - 1);
        v = first + std::uint32_t(pick_proportional(scores, rng));
        ray.push_back(v);
    }
    return ray;
}

std::optional<std::vector<std::uint32_t>> sample_ray_explosive(LimitTree& t, std::uint64_t n_max,
                                                               std::uint32_t R) {
    if (!t.grown()) throw std::logic_error("tree was not grown in birth order");
    if (t.births() < n_max) return std::nullopt; // frontier emptied before the budget
    std::uint32_t v = t.born_at(n_max - 1);
    std::vector<std::uint32_t> chain;
    while (v != 0) {
        chain.push_back(v);
        v = t.parent(v);
    }
    std::reverse(chain.begin(), chain.end());
    if (chain.size() > R) chain.resize(R);
    return chain;
}

ColouredLimitTree sample_coloured_limit_tree(Regime regime, const DegreeModel& d,
                                             const OffspringModel& off, const WeightModel& w,
                                             std::uint32_t R, const LimitTreeParams& params,
                                             RngStream& rng) {
    ColouredLimitTree out;
    out.regime = regime;
    out.coin = rng.bernoulli(params.zeta);
    RngStream tree_rng = rng.substream(0x7101);
    RngStream spine_rng = rng.substream(0x7102);
    LimitTree t(d, off, w, tree_rng, params.node_cap);

    std::vector<std::uint32_t> ray;
    if (regime == Regime::Malthusian) {
        if (out.coin) {
            auto spine = sample_spine_malthusian(t, params.lambda, R, params.horizon, spine_rng);
            out.declared_infinite = spine.has_value();
            if (spine) ray = std::move(*spine);
        }
    } else {
        t.grow_by_birth_order(params.budget, /*compact=*/false);
        out.declared_infinite = !t.finite_so_far();
        if (out.coin && out.declared_infinite) {
            auto prefix = sample_ray_explosive(t, params.budget, R);
            if (prefix) ray = std::move(*prefix);
        }
    }

    // realize the full ball of depth R and export it with BFS labels
    std::vector<std::uint32_t> on_ray_edge(ray.begin(), ray.end()); // child ids of red edges
    std::sort(on_ray_edge.begin(), on_ray_edge.end());
    std::vector<std::pair<std::uint32_t, std::uint32_t>> relabel; // (tree id, label), BFS order
    relabel.push_back({0, 0});
    std::uint32_t next_label = 1;
    RootedGraph& rg = out.graph;
    for (std::size_t i = 0; i < relabel.size(); ++i) {
        auto [v, lab] = relabel[i];
        if (t.generation(v) == R) continue;
        std::uint32_t k = t.child_count(v);
        std::uint32_t first = t.children_begin(v);
        for (std::uint32_t c = 0; c < k; ++c) {
            std::uint32_t child = first + c;
            std::uint8_t colour =
                std::binary_search(on_ray_edge.begin(), on_ray_edge.end(), child) ? 1 : 0;
            rg.edges.push_back({lab, next_label, t.edge_weight(child), colour});
            relabel.push_back({child, next_label});
            ++next_label;
        }
    }
    rg.n = next_label;
    rg.root = 0;
    out.red_length = rg.red_count();
    return out;
}

void dump_tree(const RootedGraph& g, std::ostream& out) {
    for (const auto& e : g.edges)
        out << e.u << ' ' << e.v << ' ' << format_double(e.weight) << ' ' << int(e.colour) << '\n';
}

} // namespace fpplocal
