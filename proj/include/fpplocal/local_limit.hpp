#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "json.hpp"

#include "fpplocal/models.hpp"
#include "fpplocal/rng.hpp"
#include "fpplocal/rooted_graph.hpp"

namespace fpplocal {

// weight_bins = 0 excludes weights from codes entirely (the default: with
// atomless weights, exact weight-preserving isomorphism between independent
// samples almost surely never occurs, so weights are compared separately by
// distribution). weight_bins = b quantizes each weight into b equiprobable
// bins of the given weight law before it enters the code.
struct CodeOptions {
    std::uint32_t weight_bins = 0;
    const WeightModel* weights = nullptr; // required when weight_bins > 0
};

constexpr std::uint32_t kCodeVertexCap = 10'000;

// Byte string identifying g up to root- and colour-preserving isomorphism
// (and weight-bin-preserving when weight_bins > 0): equal codes iff
// isomorphic, independent of vertex labelling and edge order. Trees use a
// colour-extended AHU encoding; everything else a canonical ordering search
// (root-individualized partition refinement, minimal encoding over the
// backtracking leaves).
std::string canonical_code(const RootedGraph& g, const CodeOptions& opts = {});

bool is_isomorphic(const RootedGraph& a, const RootedGraph& b, const CodeOptions& opts = {});

// Empirical law over canonical codes. Counts stay raw; normalization happens
// only inside tv_distance.
struct CodeHistogram {
    std::map<std::string, std::uint64_t> codes;
    std::uint64_t total = 0;

    // metadata carried into the JSON dump
    std::uint32_t R = 0;
    std::uint32_t weight_bins = 0;
    std::string source; // "graph:n=<n>" or "limit"
    std::string regime;
    std::uint64_t seed = 0;

    void add(const std::string& code) {
        codes[code] += 1;
        total += 1;
    }
    // associative merge of per-worker partials; R and weight_bins must agree
    void merge(const CodeHistogram& other);

    nlohmann::json to_json() const;
    static CodeHistogram from_json(const nlohmann::json& j);
};

// Half the L1 distance between the normalized histograms, over the union of
// their codes. This is the total variation distance between the two
// empirical laws.
double tv_distance(const CodeHistogram& a, const CodeHistogram& b);

// Sampling noise of tv_distance under a parametric bootstrap: each side is
// resampled from its own empirical law, keeping the totals.
double tv_standard_error(const CodeHistogram& a, const CodeHistogram& b,
                         std::uint32_t replicates, RngStream rng);

// Expected tv_distance between two independent empirical histograms of the
// given totals drawn from the pooled law: the level an estimate sits at when
// the underlying laws are equal and only sampling noise separates them.
double tv_null_expectation(const CodeHistogram& a, const CodeHistogram& b,
                           std::uint32_t replicates, RngStream rng);

} // namespace fpplocal
