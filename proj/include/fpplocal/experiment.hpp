#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

#include "fpplocal/exploration.hpp"
#include "fpplocal/fpp.hpp"
#include "fpplocal/limit_tree.hpp"
#include "fpplocal/local_limit.hpp"
#include "fpplocal/models.hpp"
#include "fpplocal/rng.hpp"

namespace fpplocal {

// Experiment description shared by every subcommand. The degree and weight
// entries keep their JSON form verbatim ({"kind": ..., parameters...}) so a
// config survives a parse/serialize round trip byte-for-byte; they are turned
// into models on demand. Structural problems (unknown keys, wrong types)
// throw from from_json; semantic problems are collected by validate().
struct ExperimentConfig {
    nlohmann::json degree;  // {"kind": "deterministic"|"pmf"|"power_law", ...}
    nlohmann::json weights; // {"kind": "exponential"|"uniform"|"weibull", ...}
    std::string regime = "malthusian";
    bool explosive_attested = false; // explicit opt-in for the explosive regime
    std::vector<std::uint64_t> n_grid;
    std::uint32_t R = 1;
    std::uint64_t samples = 1000;
    double eps = 0.1;                  // distance window width for classify()
    std::uint64_t budget = 10'000;     // exploration steps / explosive birth budget
    std::uint32_t horizon = 12;        // Malthusian martingale probing depth
    std::uint32_t weight_bins = 0;     // 0 = weights stay out of the codes
    std::uint64_t seed = 1;
    std::uint32_t workers = 0;         // 0 = take FPP_LOCAL_WORKERS, else 1
    double max_seconds = std::numeric_limits<double>::infinity();
    std::uint64_t node_cap = 10'000'000;
    std::string out_dir = "out";

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    // empty means the config is runnable; order follows the field order above
    std::vector<std::string> validate() const;

    DegreeModel degree_model() const;   // throws invalid_argument on a bad spec
    WeightModel weight_model() const;
    Regime regime_enum() const;
};

DegreeModel build_degree_model(const nlohmann::json& spec);
WeightModel build_weight_model(const nlohmann::json& spec);

// configured value if positive, else FPP_LOCAL_WORKERS, else 1
std::uint32_t resolve_workers(std::uint32_t configured);

// Runs fn(replica) for replica = 0..count-1 on `workers` threads. Replicas
// are claimed from a shared counter, so fn must only touch state owned by its
// replica (or merge commutatively); results are then independent of the
// worker count.
void parallel_replicas(std::uint64_t count, std::uint32_t workers,
                       const std::function<void(std::uint64_t)>& fn);

struct DerivedScalars {
    double nu = 0.0;        // offspring mean of the size-biased law minus one
    double lambda = 0.0;    // Malthusian rate (NaN when undefined)
    double q_star = 0.0;    // extinction probability of the offspring tree
    double zeta_star = 0.0; // survival probability below a size-biased vertex
    double zeta = 0.0;      // survival probability of the rooted tree
};

DerivedScalars derive_scalars(const DegreeModel& d, const WeightModel& w);
void write_derived_scalars(const DerivedScalars& s, std::ostream& out);

// one coloured ball: fresh configuration model on n vertices, two independent
// uniform vertices, geodesic coloured red, truncated at hop radius R
TruncatedNeighbourhood sample_graph_ball(const DegreeModel& d, const WeightModel& w,
                                         std::uint64_t n, std::uint32_t R, RngStream& rng);

LimitTreeParams limit_params(const ExperimentConfig& cfg);

// Paired histograms plus the per-sample weight observations needed for the
// convergence report. Weight vectors are flattened in replica order, so the
// whole struct is byte-reproducible at any worker count.
struct SampleSummary {
    CodeHistogram hist;
    std::vector<double> all_weights; // every edge weight in the balls
    std::vector<double> red_weights; // weights of red edges only
    std::uint64_t all_black = 0;     // samples whose ball carries no red edge
};

SampleSummary summarize_graph_samples(const ExperimentConfig& cfg, std::uint64_t n,
                                      std::uint64_t grid_index);
SampleSummary summarize_limit_samples(const ExperimentConfig& cfg, std::uint64_t grid_index);

struct ConvergenceRow {
    std::uint64_t n = 0;
    std::uint64_t samples = 0;
    double tv = 0.0;
    double tv_se = 0.0;
    double black_frac = 0.0;
    double black_frac_expected = 0.0;
    double ks_weights = 0.0;
};

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg,
                                            const std::filesystem::path& out_dir);
void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out);

void run_derive(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                std::ostream& console);
void run_limit_sample(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
void run_neighbourhood_sample(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Exploration traces on fresh limit trees, one trace_<r>.csv per replica plus
// a summary CSV with the final classification. Returns TimeCap as soon as any
// replica hits the wall-clock cap; hitting the step budget is the normal way
// a run ends and still counts as success.
RunStatus run_explore(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

} // namespace fpplocal
