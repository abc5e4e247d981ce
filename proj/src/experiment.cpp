#include "fpplocal/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fpplocal/graph.hpp"
#include "fpplocal/stats.hpp"

namespace fpplocal {

namespace {

using nlohmann::json;

// substream tags separating the independent random sources of a run
constexpr std::uint64_t kGraphSide = 1;
constexpr std::uint64_t kLimitSide = 2;
constexpr std::uint64_t kBootstrap = 3;
constexpr std::uint64_t kExplore = 4;

// one stream per (grid point, replica) pair; replicas stay below 2^32
std::uint64_t stream_index(std::uint64_t grid_index, std::uint64_t replica) {
    return (grid_index << 32) | replica;
}

void require_keys(const json& spec, const char* what, const std::set<std::string>& allowed) {
    for (const auto& item : spec.items()) {
        if (!allowed.count(item.key()))
            throw std::invalid_argument(std::string(what) + " spec has unknown key '" +
                                        item.key() + "'");
    }
}

double get_number(const json& spec, const char* what, const char* key) {
    if (!spec.contains(key))
        throw std::invalid_argument(std::string(what) + " spec needs '" + key + "'");
    if (!spec.at(key).is_number())
        throw std::invalid_argument(std::string(what) + " spec '" + key + "' must be a number");
    return spec.at(key).get<double>();
}

std::uint32_t get_count(const json& spec, const char* what, const char* key) {
    double x = get_number(spec, what, key);
    if (x < 0 || x != std::floor(x) || x > double(std::numeric_limits<std::uint32_t>::max()))
        throw std::invalid_argument(std::string(what) + " spec '" + key +
                                    "' must be a nonnegative integer");
    return std::uint32_t(x);
}

void check_model_spec(const json& spec, const char* what) {
    if (!spec.is_object())
        throw std::invalid_argument(std::string(what) + " spec must be an object");
    if (!spec.contains("kind") || !spec.at("kind").is_string())
        throw std::invalid_argument(std::string(what) + " spec needs a string 'kind'");
}

void write_histogram(const CodeHistogram& h, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << h.to_json().dump(2) << '\n';
}

std::string status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Exhausted: return "exhausted";
        case RunStatus::StepCap: return "step_cap";
        default: return "time_cap";
    }
}

} // namespace

DegreeModel build_degree_model(const json& spec) {
    check_model_spec(spec, "degree");
    std::string kind = spec.at("kind").get<std::string>();
    if (kind == "deterministic") {
        require_keys(spec, "degree", {"kind", "k"});
        return DegreeModel::deterministic(get_count(spec, "degree", "k"));
    }
    if (kind == "pmf") {
        require_keys(spec, "degree", {"kind", "atoms"});
        if (!spec.contains("atoms") || !spec.at("atoms").is_object())
            throw std::invalid_argument("degree spec needs an 'atoms' object");
        std::map<std::uint32_t, double> atoms;
        for (const auto& item : spec.at("atoms").items()) {
            std::size_t used = 0;
            unsigned long k = 0;
            try {
                k = std::stoul(item.key(), &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != item.key().size())
                throw std::invalid_argument("degree atom key '" + item.key() +
                                            "' is not an integer");
            if (!item.value().is_number())
                throw std::invalid_argument("degree atom '" + item.key() +
                                            "' must map to a number");
            atoms[std::uint32_t(k)] = item.value().get<double>();
        }
        return DegreeModel::from_pmf(atoms);
    }
    if (kind == "power_law") {
        require_keys(spec, "degree", {"kind", "exponent", "k_max"});
        double exponent = get_number(spec, "degree", "exponent");
        std::uint32_t k_max =
            spec.contains("k_max") ? get_count(spec, "degree", "k_max") : 1'000'000;
        return DegreeModel::power_law(exponent, k_max);
    }
    throw std::invalid_argument("unknown degree kind '" + kind + "'");
}

WeightModel build_weight_model(const json& spec) {
    check_model_spec(spec, "weight");
    std::string kind = spec.at("kind").get<std::string>();
    if (kind == "exponential") {
        require_keys(spec, "weight", {"kind", "rate"});
        return WeightModel::exponential(get_number(spec, "weight", "rate"));
    }
    if (kind == "uniform") {
        require_keys(spec, "weight", {"kind", "a", "b"});
        return WeightModel::uniform(get_number(spec, "weight", "a"),
                                    get_number(spec, "weight", "b"));
    }
    if (kind == "weibull") {
        require_keys(spec, "weight", {"kind", "shape", "scale"});
        return WeightModel::weibull(get_number(spec, "weight", "shape"),
                                    get_number(spec, "weight", "scale"));
    }
    throw std::invalid_argument("unknown weight kind '" + kind + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const std::set<std::string> known = {
        "degree",  "weights", "regime",      "explosive_attested", "n_grid",
        "R",       "samples", "eps",         "budget",             "horizon",
        "weight_bins", "seed", "workers",    "max_seconds",        "node_cap",
        "out_dir"};
    for (const auto& item : j.items()) {
        if (!known.count(item.key()))
            throw std::invalid_argument("unknown config key '" + item.key() + "'");
    }
    for (const char* required : {"degree", "weights", "regime"}) {
        if (!j.contains(required))
            throw std::invalid_argument(std::string("config needs '") + required + "'");
    }
    ExperimentConfig cfg;
    try {
        cfg.degree = j.at("degree");
        cfg.weights = j.at("weights");
        cfg.regime = j.at("regime").get<std::string>();
        if (j.contains("explosive_attested"))
            cfg.explosive_attested = j.at("explosive_attested").get<bool>();
        if (j.contains("n_grid"))
            cfg.n_grid = j.at("n_grid").get<std::vector<std::uint64_t>>();
        if (j.contains("R")) cfg.R = j.at("R").get<std::uint32_t>();
        if (j.contains("samples")) cfg.samples = j.at("samples").get<std::uint64_t>();
        if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
        if (j.contains("budget")) cfg.budget = j.at("budget").get<std::uint64_t>();
        if (j.contains("horizon")) cfg.horizon = j.at("horizon").get<std::uint32_t>();
        if (j.contains("weight_bins")) cfg.weight_bins = j.at("weight_bins").get<std::uint32_t>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("workers")) cfg.workers = j.at("workers").get<std::uint32_t>();
        if (j.contains("max_seconds") && !j.at("max_seconds").is_null())
            cfg.max_seconds = j.at("max_seconds").get<double>();
        if (j.contains("node_cap")) cfg.node_cap = j.at("node_cap").get<std::uint64_t>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return cfg;
}

json ExperimentConfig::to_json() const {
    json j;
    j["degree"] = degree;
    j["weights"] = weights;
    j["regime"] = regime;
    j["explosive_attested"] = explosive_attested;
    j["n_grid"] = n_grid;
    j["R"] = R;
    j["samples"] = samples;
    j["eps"] = eps;
    j["budget"] = budget;
    j["horizon"] = horizon;
    j["weight_bins"] = weight_bins;
    j["seed"] = seed;
    j["workers"] = workers;
    if (std::isfinite(max_seconds))
        j["max_seconds"] = max_seconds;
    else
        j["max_seconds"] = nullptr;
    j["node_cap"] = node_cap;
    j["out_dir"] = out_dir;
    return j;
}

std::vector<std::string> ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    bool have_degree = false;
    DegreeModel d = DegreeModel::deterministic(3);
    try {
        d = degree_model();
        have_degree = true;
    } catch (const std::exception& e) {
        bad.emplace_back(e.what());
    }
    try {
        weight_model();
    } catch (const std::exception& e) {
        bad.emplace_back(e.what());
    }
    if (regime != "malthusian" && regime != "explosive") {
        bad.push_back("unknown regime '" + regime + "'");
    } else if (have_degree) {
        if (regime == "malthusian" && offspring_mean(d) <= 1.0) bad.emplace_back("not supercritical");
        if (regime == "explosive" && !explosive_attested)
            bad.emplace_back("explosive regime requires explosive_attested: true");
    }
    if (n_grid.empty()) bad.emplace_back("n_grid must be nonempty");
    for (std::uint64_t n : n_grid) {
        if (n == 0) {
            bad.emplace_back("n_grid entries must be positive");
            break;
        }
    }
    if (R == 0) bad.emplace_back("R must be at least 1");
    if (samples == 0) bad.emplace_back("samples must be positive");
    if (!(eps > 0.0)) bad.emplace_back("eps must be positive");
    if (budget == 0) bad.emplace_back("budget must be positive");
    if (horizon == 0) bad.emplace_back("horizon must be positive");
    if (node_cap == 0) bad.emplace_back("node_cap must be positive");
    if (out_dir.empty()) bad.emplace_back("out_dir must be nonempty");
    return bad;
}

DegreeModel ExperimentConfig::degree_model() const { return build_degree_model(degree); }

WeightModel ExperimentConfig::weight_model() const { return build_weight_model(weights); }

Regime ExperimentConfig::regime_enum() const {
    if (regime == "malthusian") return Regime::Malthusian;
    if (regime == "explosive") return Regime::Explosive;
    throw std::invalid_argument("unknown regime '" + regime + "'");
}

std::uint32_t resolve_workers(std::uint32_t configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("FPP_LOCAL_WORKERS")) {
        char* end = nullptr;
        unsigned long w = std::strtoul(env, &end, 10);
        if (end && *end == '\0' && w > 0 && w <= 4096) return std::uint32_t(w);
    }
    return 1;
}

void parallel_replicas(std::uint64_t count, std::uint32_t workers,
                       const std::function<void(std::uint64_t)>& fn) {
    if (count == 0) return;
    std::uint64_t w = std::min<std::uint64_t>(workers == 0 ? 1 : workers, count);
    if (w <= 1) {
        for (std::uint64_t r = 0; r < count; ++r) fn(r);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::mutex err_lock;
    std::exception_ptr error;
    auto drain = [&] {
        for (;;) {
            std::uint64_t r = next.fetch_add(1);
            if (r >= count) return;
            try {
                fn(r);
            } catch (...) {
                std::lock_guard<std::mutex> guard(err_lock);
                if (!error) error = std::current_exception();
                next.store(count); // stop handing out work
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(w));
    for (std::uint64_t t = 0; t < w; ++t) pool.emplace_back(drain);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

DerivedScalars derive_scalars(const DegreeModel& d, const WeightModel& w) {
    DerivedScalars s;
    OffspringModel off = size_biased(d);
    s.nu = offspring_mean(d);
    SurvivalProbs sp = survival_probs(off, d);
    s.q_star = sp.q_star;
    s.zeta_star = sp.zeta_star;
    s.zeta = sp.zeta;
    try {
        s.lambda = malthusian_lambda(off, w);
    } catch (const std::exception&) {
        s.lambda = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

void write_derived_scalars(const DerivedScalars& s, std::ostream& out) {
    out << "nu = " << format_double(s.nu) << '\n'
        << "lambda = " << format_double(s.lambda) << '\n'
        << "q_star = " << format_double(s.q_star) << '\n'
        << "zeta_star = " << format_double(s.zeta_star) << '\n'
        << "zeta = " << format_double(s.zeta) << '\n';
}

TruncatedNeighbourhood sample_graph_ball(const DegreeModel& d, const WeightModel& w,
                                         std::uint64_t n, std::uint32_t R, RngStream& rng) {
    DegreeSequence seq = sample_degree_sequence(std::size_t(n), d, rng);
    MultiGraph g = pair_half_edges(seq, rng);
    assign_weights(g, w, rng);
    return sample_geodesic_neighbourhood(g, R, rng);
}

LimitTreeParams limit_params(const ExperimentConfig& cfg) {
    DerivedScalars s = derive_scalars(cfg.degree_model(), cfg.weight_model());
    LimitTreeParams p;
    p.horizon = cfg.horizon;
    p.budget = cfg.budget;
    p.zeta = s.zeta;
    p.node_cap = cfg.node_cap;
    if (cfg.regime_enum() == Regime::Malthusian) {
        if (!std::isfinite(s.lambda))
            throw std::invalid_argument("Malthusian rate undefined for this model");
        p.lambda = s.lambda;
    }
    return p;
}

namespace {

// shared scaffolding for the two sample summaries: per-replica slots filled in
// parallel, then reduced in replica order so any worker count produces the
// same bytes
struct ReplicaSlots {
    std::vector<std::string> codes;
    std::vector<std::vector<double>> all_w;
    std::vector<std::vector<double>> red_w;
    std::vector<std::uint8_t> black;

    explicit ReplicaSlots(std::uint64_t n)
        : codes(n), all_w(n), red_w(n), black(n, 0) {}

    void record(std::uint64_t r, const RootedGraph& g, const CodeOptions& opts) {
        codes[r] = canonical_code(g, opts);
        for (const auto& e : g.edges) {
            all_w[r].push_back(e.weight);
            if (e.colour) red_w[r].push_back(e.weight);
        }
        black[r] = g.all_black() ? 1 : 0;
    }

    SampleSummary reduce(const ExperimentConfig& cfg, const std::string& source) const {
        SampleSummary s;
        s.hist.R = cfg.R;
        s.hist.weight_bins = cfg.weight_bins;
        s.hist.source = source;
        s.hist.regime = cfg.regime;
        s.hist.seed = cfg.seed;
        for (std::uint64_t r = 0; r < codes.size(); ++r) {
            s.hist.add(codes[r]);
            s.all_weights.insert(s.all_weights.end(), all_w[r].begin(), all_w[r].end());
            s.red_weights.insert(s.red_weights.end(), red_w[r].begin(), red_w[r].end());
            s.all_black += black[r];
        }
        return s;
    }
};

} // namespace

SampleSummary summarize_graph_samples(const ExperimentConfig& cfg, std::uint64_t n,
                                      std::uint64_t grid_index) {
    DegreeModel d = cfg.degree_model();
    WeightModel w = cfg.weight_model();
    CodeOptions opts{cfg.weight_bins, &w};
    ReplicaSlots slots(cfg.samples);
    parallel_replicas(cfg.samples, resolve_workers(cfg.workers), [&](std::uint64_t r) {
        RngStream rng = RngStream(cfg.seed, stream_index(grid_index, r)).substream(kGraphSide);
        TruncatedNeighbourhood nb = sample_graph_ball(d, w, n, cfg.R, rng);
        slots.record(r, nb.graph, opts);
    });
    return slots.reduce(cfg, "graph");
}

SampleSummary summarize_limit_samples(const ExperimentConfig& cfg, std::uint64_t grid_index) {
    DegreeModel d = cfg.degree_model();
    WeightModel w = cfg.weight_model();
    OffspringModel off = size_biased(d);
    LimitTreeParams params = limit_params(cfg);
    Regime regime = cfg.regime_enum();
    CodeOptions opts{cfg.weight_bins, &w};
    ReplicaSlots slots(cfg.samples);
    parallel_replicas(cfg.samples, resolve_workers(cfg.workers), [&](std::uint64_t r) {
        RngStream rng = RngStream(cfg.seed, stream_index(grid_index, r)).substream(kLimitSide);
        ColouredLimitTree t =
            sample_coloured_limit_tree(regime, d, off, w, cfg.R, params, rng);
        slots.record(r, t.graph, opts);
    });
    return slots.reduce(cfg, "limit");
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg,
                                            const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    DerivedScalars scalars = derive_scalars(cfg.degree_model(), cfg.weight_model());
    std::vector<ConvergenceRow> rows;
    for (std::uint64_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        std::uint64_t n = cfg.n_grid[gi];
        SampleSummary gs = summarize_graph_samples(cfg, n, gi);
        SampleSummary ls = summarize_limit_samples(cfg, gi);
        write_histogram(gs.hist, out_dir / ("graph_n" + std::to_string(n) + ".json"));
        write_histogram(ls.hist, out_dir / ("limit_n" + std::to_string(n) + ".json"));

        ConvergenceRow row;
        row.n = n;
        row.samples = cfg.samples;
        row.tv = tv_distance(gs.hist, ls.hist);
        row.tv_se = tv_standard_error(gs.hist, ls.hist, 200,
                                      RngStream(cfg.seed, gi).substream(kBootstrap));
        row.black_frac = double(gs.all_black) / double(cfg.samples);
        row.black_frac_expected = 1.0 - scalars.zeta * scalars.zeta;
        double ks = std::numeric_limits<double>::quiet_NaN();
        if (!gs.all_weights.empty() && !ls.all_weights.empty())
            ks = stats::ks_two_sample(gs.all_weights, ls.all_weights);
        if (!gs.red_weights.empty() && !ls.red_weights.empty()) {
            double red = stats::ks_two_sample(gs.red_weights, ls.red_weights);
            ks = std::isnan(ks) ? red : std::max(ks, red);
        }
        row.ks_weights = ks;
        rows.push_back(row);
    }
    std::ofstream out(out_dir / "convergence.csv");
    if (!out) throw std::runtime_error("cannot open " + (out_dir / "convergence.csv").string());
    write_convergence_csv(rows, out);
    return rows;
}

void write_convergence_csv(const std::vector<ConvergenceRow>& rows, std::ostream& out) {
    out << "n,samples,tv,tv_se,black_frac,black_frac_expected,ks_weights\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.samples << ',' << format_double(r.tv) << ','
            << format_double(r.tv_se) << ',' << format_double(r.black_frac) << ','
            << format_double(r.black_frac_expected) << ',' << format_double(r.ks_weights)
            << '\n';
    }
}

void run_derive(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                std::ostream& console) {
    DerivedScalars s = derive_scalars(cfg.degree_model(), cfg.weight_model());
    write_derived_scalars(s, console);
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "derived.txt");
    if (!out) throw std::runtime_error("cannot open " + (out_dir / "derived.txt").string());
    write_derived_scalars(s, out);
}

void run_limit_sample(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    DegreeModel d = cfg.degree_model();
    WeightModel w = cfg.weight_model();
    OffspringModel off = size_biased(d);
    LimitTreeParams params = limit_params(cfg);
    Regime regime = cfg.regime_enum();
    CodeOptions opts{cfg.weight_bins, &w};
    ReplicaSlots slots(cfg.samples);
    std::vector<std::string> blocks(cfg.samples);
    parallel_replicas(cfg.samples, resolve_workers(cfg.workers), [&](std::uint64_t r) {
        RngStream rng = RngStream(cfg.seed, stream_index(0, r)).substream(kLimitSide);
        ColouredLimitTree t =
            sample_coloured_limit_tree(regime, d, off, w, cfg.R, params, rng);
        slots.record(r, t.graph, opts);
        std::ostringstream os;
        os << "# sample " << r << " n=" << t.graph.n << " coin=" << int(t.coin)
           << " declared_infinite=" << int(t.declared_infinite)
           << " red_length=" << t.red_length << '\n';
        dump_tree(t.graph, os);
        blocks[r] = os.str();
    });
    std::ofstream trees(out_dir / "limit_trees.txt");
    if (!trees) throw std::runtime_error("cannot open " + (out_dir / "limit_trees.txt").string());
    for (const auto& b : blocks) trees << b;
    write_histogram(slots.reduce(cfg, "limit").hist, out_dir / "limit_histogram.json");
}

void run_neighbourhood_sample(const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    DegreeModel d = cfg.degree_model();
    WeightModel w = cfg.weight_model();
    CodeOptions opts{cfg.weight_bins, &w};
    for (std::uint64_t gi = 0; gi < cfg.n_grid.size(); ++gi) {
        std::uint64_t n = cfg.n_grid[gi];
        ReplicaSlots slots(cfg.samples);
        std::vector<std::string> blocks(cfg.samples);
        parallel_replicas(cfg.samples, resolve_workers(cfg.workers), [&](std::uint64_t r) {
            RngStream rng =
                RngStream(cfg.seed, stream_index(gi, r)).substream(kGraphSide);
            TruncatedNeighbourhood nb = sample_graph_ball(d, w, n, cfg.R, rng);
            slots.record(r, nb.graph, opts);
            std::ostringstream os;
            os << "# sample " << r << " n=" << nb.graph.n
               << " distance=" << format_double(nb.geodesic_distance)
               << " all_black=" << int(nb.graph.all_black()) << '\n';
            dump_tree(nb.graph, os);
            blocks[r] = os.str();
        });
        std::string tag = "_n" + std::to_string(n);
        std::ofstream balls(out_dir / ("neighbourhoods" + tag + ".txt"));
        if (!balls)
            throw std::runtime_error("cannot open " +
                                     (out_dir / ("neighbourhoods" + tag + ".txt")).string());
        for (const auto& b : blocks) balls << b;
        write_histogram(slots.reduce(cfg, "graph").hist,
                        out_dir / ("graph_histogram" + tag + ".json"));
    }
}

RunStatus run_explore(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    DegreeModel d = cfg.degree_model();
    WeightModel w = cfg.weight_model();
    OffspringModel off = size_biased(d);
    std::vector<std::string> traces(cfg.samples);
    std::vector<std::string> summaries(cfg.samples);
    std::vector<RunStatus> status(cfg.samples, RunStatus::Exhausted);
    parallel_replicas(cfg.samples, resolve_workers(cfg.workers), [&](std::uint64_t r) {
        RngStream rng = RngStream(cfg.seed, stream_index(0, r)).substream(kExplore);
        LimitTree tree(d, off, w, rng.substream(1), cfg.node_cap);
        TreeView view(tree);
        Exploration ex(view, cfg.R, rng.substream(2));
        std::ostringstream os;
        write_trace_header(os);
        RunStatus st = RunStatus::StepCap;
        auto t0 = std::chrono::steady_clock::now();
        for (std::uint64_t k = 0; k < cfg.budget; ++k) {
            if ((k & 63) == 0 && std::isfinite(cfg.max_seconds)) {
                std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
                if (elapsed.count() > cfg.max_seconds) {
                    st = RunStatus::TimeCap;
                    break;
                }
            }
            if (!ex.step()) {
                st = RunStatus::Exhausted;
                break;
            }
            append_trace_row(os, ex, ex.classify(cfg.eps));
        }
        status[r] = st;
        traces[r] = os.str();
        std::ostringstream sum;
        sum << r << ',' << status_name(st) << ',' << ex.steps() << ',' << ex.explored_count()
            << ',' << ex.active_count();
        if (ex.steps() > 0 && !ex.at_fixpoint()) {
            ActiveClassification c = ex.classify(cfg.eps);
            sum << ',' << format_double(ex.last_distance());
            for (int t = 0; t < 4; ++t) sum << ',' << c.type_count[t];
            sum << ',' << c.window_count << ',' << c.window_stubs << ',' << c.off_branch_stubs;
        } else {
            sum << ",0,0,0,0,0,0,0,0";
        }
        sum << '\n';
        summaries[r] = sum.str();
    });
    for (std::uint64_t r = 0; r < cfg.samples; ++r) {
        std::filesystem::path p = out_dir / ("trace_" + std::to_string(r) + ".csv");
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot open " + p.string());
        out << traces[r];
    }
    std::ofstream sum(out_dir / "explore_summary.csv");
    if (!sum)
        throw std::runtime_error("cannot open " + (out_dir / "explore_summary.csv").string());
    sum << "replica,status,steps,explored,active,dist_star,type_i,type_ii,type_iii,type_iv,"
           "window_count,window_stubs,off_branch_stubs\n";
    for (const auto& s : summaries) sum << s;
    RunStatus overall = RunStatus::Exhausted;
    for (RunStatus st : status) {
        if (st == RunStatus::TimeCap) return RunStatus::TimeCap;
        if (st == RunStatus::StepCap) overall = RunStatus::StepCap;
    }
    return overall;
}

} // namespace fpplocal
