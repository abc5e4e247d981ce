#include "fpplocal/local_limit.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "fpplocal/stats.hpp"

namespace fpplocal {
namespace {

constexpr std::uint32_t kNoBin = std::uint32_t(-1);

struct Attr {
    std::uint8_t colour;
    std::uint32_t bin;
    auto operator<=>(const Attr&) const = default;
};

struct Incidence {
    std::uint32_t other;
    std::uint32_t edge;
};

std::uint32_t quantize(double w, const CodeOptions& o) {
    double f = std::clamp(o.weights->cdf(w), 0.0, 1.0);
    auto b = std::uint32_t(f * double(o.weight_bins));
    return std::min(b, o.weight_bins - 1);
}

void append_attr(std::string& s, const Attr& a) {
    s.push_back(a.colour ? '1' : '0');
    if (a.bin != kNoBin) {
        s += std::to_string(a.bin);
        s.push_back(';');
    }
}

std::vector<Attr> edge_attrs(const RootedGraph& g, const CodeOptions& o) {
    std::vector<Attr> attrs;
    attrs.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        if (e.u >= g.n || e.v >= g.n) throw std::invalid_argument("edge endpoint out of range");
        attrs.push_back(
            {std::uint8_t(e.colour ? 1 : 0), o.weight_bins ? quantize(e.weight, o) : kNoBin});
    }
    return attrs;
}

std::vector<std::vector<Incidence>> incidence_lists(const RootedGraph& g) {
    std::vector<std::vector<Incidence>> inc(g.n);
    for (std::uint32_t e = 0; e < std::uint32_t(g.edges.size()); ++e) {
        inc[g.edges[e].u].push_back({g.edges[e].v, e});
        inc[g.edges[e].v].push_back({g.edges[e].u, e}); // a loop contributes twice
    }
    return inc;
}

// Bottom-up AHU code of the tree hanging below `start`, walking only vertices
// accepted by `member`. Each child contributes its edge attribute followed by
// its own parenthesized code; tokens are sorted, so sibling order is erased.
std::string ahu_code(std::uint32_t start, const std::vector<Attr>& attrs,
                     const std::vector<std::vector<Incidence>>& inc,
                     const std::vector<std::uint8_t>& member, std::vector<std::uint8_t>& visited) {
    std::vector<std::uint32_t> order{start}, parent(1, start), parent_edge(1, 0);
    visited[start] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (const auto& in : inc[order[i]]) {
            if (!member[in.other] || visited[in.other]) continue;
            visited[in.other] = 1;
            order.push_back(in.other);
            parent.push_back(order[i]);
            parent_edge.push_back(in.edge);
        }
    }
    std::vector<std::vector<std::string>> tokens(order.size());
    std::map<std::uint32_t, std::uint32_t> slot_of;
    for (std::size_t i = 0; i < order.size(); ++i) slot_of[order[i]] = std::uint32_t(i);
    std::string result;
    for (std::size_t i = order.size(); i-- > 0;) {
        auto& kids = tokens[i];
        std::sort(kids.begin(), kids.end());
        std::string code = "(";
        for (const auto& t : kids) code += t;
        code += ')';
        if (i == 0) {
            result = std::move(code);
        } else {
            std::string token;
            append_attr(token, attrs[parent_edge[i]]);
            token += code;
            tokens[slot_of[parent[i]]].push_back(std::move(token));
        }
    }
    return result;
}

// Full-tree fast path; empty result = not a tree rooted at g.root.
std::string tree_code(const RootedGraph& g, const std::vector<Attr>& attrs,
                      const std::vector<std::vector<Incidence>>& inc, std::uint32_t bins) {
    if (g.edges.size() + 1 != g.n) return {};
    std::vector<std::uint8_t> member(g.n, 1), visited(g.n, 0);
    std::string code = ahu_code(g.root, attrs, inc, member, visited);
    if (std::size_t(std::count(visited.begin(), visited.end(), 1)) != g.n)
        return {}; // a cycle or loop left something unreached
    return "T" + std::to_string(bins) + "|" + code;
}

// Canonical ordering search over the core of a non-tree graph. The vertex
// order is pinned down by an ordered partition: the root sits alone in the
// first cell, the remaining core vertices start grouped by their incident
// attribute multisets and hanging-tree codes, and cells are repeatedly split
// by the multiset of (attribute, neighbour cell) pairs until stable.
// Remaining ambiguity is resolved by trying every vertex of the first
// non-singleton cell and keeping the lexicographically smallest encoding,
// which makes the result independent of the input labelling.
class OrderingSearch {
public:
    OrderingSearch(std::uint32_t n_total, std::uint32_t bins, const std::vector<Attr>& attrs)
        : n_total_(n_total), bins_(bins), attrs_(attrs) {}

    // core-local vertices are 0..k-1 with 0 the root-side entry
    void set_core(std::vector<std::vector<Incidence>> core_inc, std::vector<std::string> hang,
                  std::vector<std::pair<std::uint32_t, std::uint32_t>> core_edges) {
        inc_ = std::move(core_inc);
        hang_ = std::move(hang);
        edges_ = std::move(core_edges);
    }

    std::string run() {
        std::vector<std::vector<std::uint32_t>> cells{{0}};
        std::map<std::pair<std::vector<Attr>, std::string>, std::vector<std::uint32_t>> classes;
        for (std::uint32_t v = 1; v < inc_.size(); ++v) {
            std::vector<Attr> sig;
            for (const auto& in : inc_[v]) sig.push_back(attrs_[in.edge]);
            std::sort(sig.begin(), sig.end());
            classes[{std::move(sig), hang_[v]}].push_back(v);
        }
        for (auto& [sig, members] : classes) cells.push_back(std::move(members));
        recurse(std::move(cells));
        return best_;
    }

private:
    using Cells = std::vector<std::vector<std::uint32_t>>;

    void refine(Cells& cells) const {
        std::vector<std::uint32_t> cell_of(inc_.size());
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::uint32_t c = 0; c < cells.size(); ++c)
                for (std::uint32_t v : cells[c]) cell_of[v] = c;
            Cells next;
            next.reserve(cells.size());
            for (auto& cell : cells) {
                if (cell.size() == 1) {
                    next.push_back(std::move(cell));
                    continue;
                }
                std::map<std::vector<std::pair<Attr, std::uint32_t>>, std::vector<std::uint32_t>>
                    split;
                for (std::uint32_t v : cell) {
                    std::vector<std::pair<Attr, std::uint32_t>> sig;
                    for (const auto& in : inc_[v])
                        sig.push_back({attrs_[in.edge], cell_of[in.other]});
                    std::sort(sig.begin(), sig.end());
                    split[std::move(sig)].push_back(v);
                }
                if (split.size() > 1) changed = true;
                for (auto& [sig, members] : split) next.push_back(std::move(members));
            }
            cells = std::move(next);
        }
    }

    void recurse(Cells cells) {
        refine(cells);
        std::size_t target = cells.size();
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (cells[c].size() > 1) {
                target = c;
                break;
            }
        if (target == cells.size()) {
            if (++leaves_ > kLeafBudget)
                throw std::runtime_error("canonical ordering search exceeded its budget");
            std::string enc = encode(cells);
            if (best_.empty() || enc < best_) best_ = std::move(enc);
            return;
        }
        for (std::uint32_t v : cells[target]) {
            Cells child;
            child.reserve(cells.size() + 1);
            for (std::size_t c = 0; c < cells.size(); ++c) {
                if (c != target) {
                    child.push_back(cells[c]);
                    continue;
                }
                child.push_back({v});
                std::vector<std::uint32_t> rest;
                for (std::uint32_t u : cells[c])
                    if (u != v) rest.push_back(u);
                child.push_back(std::move(rest));
            }
            recurse(std::move(child));
        }
    }

    std::string encode(const Cells& cells) const {
        std::vector<std::uint32_t> pos(inc_.size());
        std::vector<std::uint32_t> at(inc_.size());
        std::uint32_t p = 0;
        for (const auto& cell : cells) {
            pos[cell.front()] = p;
            at[p] = cell.front();
            ++p;
        }
        std::vector<std::tuple<std::uint32_t, std::uint32_t, Attr>> entries;
        entries.reserve(edges_.size());
        for (std::uint32_t e = 0; e < edges_.size(); ++e) {
            auto [i, j] = std::minmax(pos[edges_[e].first], pos[edges_[e].second]);
            entries.push_back({i, j, attrs_[core_edge_ids_[e]]});
        }
        std::sort(entries.begin(), entries.end());
        std::string enc = "G" + std::to_string(bins_) + "|" + std::to_string(n_total_) + "|" +
                          std::to_string(inc_.size()) + "|";
        for (const auto& [i, j, a] : entries) {
            enc += std::to_string(i);
            enc += '-';
            enc += std::to_string(j);
            enc += ':';
            append_attr(enc, a);
            enc += '|';
        }
        enc += "H|";
        for (std::uint32_t q = 0; q < inc_.size(); ++q) {
            enc += hang_[at[q]];
            enc += '|';
        }
        return enc;
    }

public:
    std::vector<std::uint32_t> core_edge_ids_; // original edge id per core edge

private:
    static constexpr std::uint64_t kLeafBudget = 100'000;

    std::uint32_t n_total_;
    std::uint32_t bins_;
    const std::vector<Attr>& attrs_;
    std::vector<std::vector<Incidence>> inc_; // core-local
    std::vector<std::string> hang_;           // concatenated sorted hanging-tree tokens
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_; // core-local endpoints
    std::string best_;
    std::uint64_t leaves_ = 0;
};

// Non-tree encoding: peel hanging trees down to the core (the 2-core plus the
// root and its path to it), encode each hanging tree by AHU into an attribute
// of its core vertex, then search for the minimal core ordering. Pendant
// structure — the bulk of a neighbourhood — never enters the backtracking.
std::string general_code(const RootedGraph& g, const std::vector<Attr>& attrs,
                         const std::vector<std::vector<Incidence>>& inc, std::uint32_t bins) {
    std::vector<std::uint32_t> deg(g.n, 0);
    for (std::uint32_t v = 0; v < g.n; ++v) deg[v] = std::uint32_t(inc[v].size());
    std::vector<std::uint8_t> removed(g.n, 0);
    std::vector<std::uint32_t> queue;
    for (std::uint32_t v = 0; v < g.n; ++v)
        if (deg[v] <= 1 && v != g.root) queue.push_back(v);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        std::uint32_t u = queue[i];
        removed[u] = 1;
        for (const auto& in : inc[u]) {
            if (removed[in.other]) continue;
            if (--deg[in.other] <= 1 && in.other != g.root && !removed[in.other])
                queue.push_back(in.other);
        }
    }

    // map the core to local ids, root first
    std::vector<std::uint32_t> core_of(g.n, std::uint32_t(-1));
    std::vector<std::uint32_t> core;
    core.push_back(g.root);
    core_of[g.root] = 0;
    for (std::uint32_t v = 0; v < g.n; ++v)
        if (!removed[v] && v != g.root) {
            core_of[v] = std::uint32_t(core.size());
            core.push_back(v);
        }

    // AHU-encode every hanging tree onto its attachment vertex
    std::vector<std::uint8_t> visited(g.n, 0);
    std::vector<std::string> hang(core.size());
    for (std::uint32_t c = 0; c < core.size(); ++c) {
        std::vector<std::string> tokens;
        for (const auto& in : inc[core[c]]) {
            if (!removed[in.other] || visited[in.other]) continue;
            std::string token;
            append_attr(token, attrs[in.edge]);
            token += ahu_code(in.other, attrs, inc, removed, visited);
            tokens.push_back(std::move(token));
        }
        std::sort(tokens.begin(), tokens.end());
        for (const auto& t : tokens) hang[c] += t;
    }
    std::size_t covered = core.size() + std::size_t(std::count(visited.begin(), visited.end(), 1));
    if (covered != g.n) throw std::invalid_argument("disconnected graph");

    OrderingSearch search(g.n, bins, attrs);
    std::vector<std::vector<Incidence>> core_inc(core.size());
    std::vector<std::pair<std::uint32_t, std::uint32_t>> core_edges;
    for (std::uint32_t e = 0; e < std::uint32_t(g.edges.size()); ++e) {
        std::uint32_t u = g.edges[e].u, v = g.edges[e].v;
        if (removed[u] || removed[v]) continue;
        core_inc[core_of[u]].push_back({core_of[v], e});
        core_inc[core_of[v]].push_back({core_of[u], e});
        core_edges.push_back({core_of[u], core_of[v]});
        search.core_edge_ids_.push_back(e);
    }
    search.set_core(std::move(core_inc), std::move(hang), std::move(core_edges));
    return search.run();
}

std::string hex_encode(const std::string& s) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * s.size());
    for (unsigned char c : s) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    throw std::invalid_argument("malformed hex code");
}

std::string hex_decode(const std::string& h) {
    if (h.size() % 2 != 0) throw std::invalid_argument("malformed hex code");
    std::string out;
    out.reserve(h.size() / 2);
    for (std::size_t i = 0; i < h.size(); i += 2)
        out.push_back(char(hex_value(h[i]) * 16 + hex_value(h[i + 1])));
    return out;
}

// `total` iid draws from h's empirical law; only codes and total are filled
CodeHistogram resample(const CodeHistogram& h, std::uint64_t total, RngStream& rng) {
    std::vector<const std::string*> keys;
    std::vector<std::uint64_t> cum;
    keys.reserve(h.codes.size());
    cum.reserve(h.codes.size());
    std::uint64_t running = 0;
    for (const auto& [code, count] : h.codes) {
        running += count;
        keys.push_back(&code);
        cum.push_back(running);
    }
    CodeHistogram out;
    for (std::uint64_t t = 0; t < total; ++t) {
        std::uint64_t u = rng.below(h.total);
        std::size_t idx = std::size_t(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        out.add(*keys[idx]);
    }
    return out;
}

} // namespace

std::string canonical_code(const RootedGraph& g, const CodeOptions& opts) {
    if (g.n == 0) throw std::invalid_argument("empty graph");
    if (g.root >= g.n) throw std::invalid_argument("root out of range");
    if (g.n > kCodeVertexCap)
        throw std::runtime_error("graph exceeds the 10000-vertex encoding cap");
    if (opts.weight_bins > 0 && opts.weights == nullptr)
        throw std::invalid_argument("weight bins require a weight model");

    auto attrs = edge_attrs(g, opts);
    auto inc = incidence_lists(g);
    if (auto code = tree_code(g, attrs, inc, opts.weight_bins); !code.empty()) return code;
    return general_code(g, attrs, inc, opts.weight_bins);
}

bool is_isomorphic(const RootedGraph& a, const RootedGraph& b, const CodeOptions& opts) {
    if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
    return canonical_code(a, opts) == canonical_code(b, opts);
}

void CodeHistogram::merge(const CodeHistogram& other) {
    if (R != other.R || weight_bins != other.weight_bins)
        throw std::invalid_argument("merging incompatible histograms");
    for (const auto& [code, count] : other.codes) codes[code] += count;
    total += other.total;
}

nlohmann::json CodeHistogram::to_json() const {
    nlohmann::json j;
    j["meta"] = {{"R", R},           {"weight_bins", weight_bins}, {"source", source},
                 {"regime", regime}, {"seed", seed},               {"total", total}};
    auto& out = j["codes"] = nlohmann::json::object();
    for (const auto& [code, count] : codes) out[hex_encode(code)] = count;
    return j;
}

CodeHistogram CodeHistogram::from_json(const nlohmann::json& j) {
    CodeHistogram h;
    const auto& meta = j.at("meta");
    h.R = meta.at("R").get<std::uint32_t>();
    h.weight_bins = meta.at("weight_bins").get<std::uint32_t>();
    h.source = meta.at("source").get<std::string>();
    h.regime = meta.at("regime").get<std::string>();
    h.seed = meta.at("seed").get<std::uint64_t>();
    std::uint64_t declared = meta.at("total").get<std::uint64_t>();
    std::uint64_t sum = 0;
    for (const auto& [hex, count] : j.at("codes").items()) {
        h.codes[hex_decode(hex)] = count.get<std::uint64_t>();
        sum += count.get<std::uint64_t>();
    }
    h.total = sum;
    if (sum != declared) throw std::invalid_argument("histogram counts do not sum to total");
    return h;
}

double tv_distance(const CodeHistogram& a, const CodeHistogram& b) {
    if (a.total == 0 || b.total == 0) throw std::invalid_argument("empty histogram");
    double l1 = 0.0;
    auto ia = a.codes.begin();
    auto ib = b.codes.begin();
    while (ia != a.codes.end() || ib != b.codes.end()) {
        double pa = 0.0, pb = 0.0;
        if (ib == b.codes.end() || (ia != a.codes.end() && ia->first < ib->first)) {
            pa = double(ia->second) / double(a.total);
            ++ia;
        } else if (ia == a.codes.end() || ib->first < ia->first) {
            pb = double(ib->second) / double(b.total);
            ++ib;
        } else {
            pa = double(ia->second) / double(a.total);
            pb = double(ib->second) / double(b.total);
            ++ia;
            ++ib;
        }
        l1 += std::abs(pa - pb);
    }
    return 0.5 * l1;
}

double tv_standard_error(const CodeHistogram& a, const CodeHistogram& b,
                         std::uint32_t replicates, RngStream rng) {
    if (replicates < 2) throw std::invalid_argument("bootstrap needs at least two replicates");
    std::vector<double> tvs;
    tvs.reserve(replicates);
    for (std::uint32_t r = 0; r < replicates; ++r) {
        auto ra = resample(a, a.total, rng);
        auto rb = resample(b, b.total, rng);
        tvs.push_back(tv_distance(ra, rb));
    }
    return stats::sample_sd(tvs);
}

double tv_null_expectation(const CodeHistogram& a, const CodeHistogram& b,
                           std::uint32_t replicates, RngStream rng) {
    if (replicates < 1) throw std::invalid_argument("bootstrap needs at least one replicate");
    if (a.total == 0 || b.total == 0) throw std::invalid_argument("empty histogram");
    CodeHistogram pooled;
    pooled.codes = a.codes;
    pooled.total = a.total;
    for (const auto& [code, count] : b.codes) pooled.codes[code] += count;
    pooled.total += b.total;
    double sum = 0.0;
    for (std::uint32_t r = 0; r < replicates; ++r) {
        auto ra = resample(pooled, a.total, rng);
        auto rb = resample(pooled, b.total, rng);
        sum += tv_distance(ra, rb);
    }
    return sum / double(replicates);
}

} // namespace fpplocal
