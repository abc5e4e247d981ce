#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "fpplocal/experiment.hpp"

namespace py = pybind11;
using namespace fpplocal;

namespace {

// plain-data bridges between Python objects and the JSON configs the core
// consumes; only the types a config can contain are supported
nlohmann::json to_json(py::handle h) {
    if (h.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(h)) return h.cast<bool>();
    if (py::isinstance<py::int_>(h)) return h.cast<std::int64_t>();
    if (py::isinstance<py::float_>(h)) return h.cast<double>();
    if (py::isinstance<py::str>(h)) return h.cast<std::string>();
    if (py::isinstance<py::dict>(h)) {
        nlohmann::json j = nlohmann::json::object();
        for (auto item : h.cast<py::dict>())
            j[item.first.cast<std::string>()] = to_json(item.second);
        return j;
    }
    if (py::isinstance<py::sequence>(h)) {
        nlohmann::json j = nlohmann::json::array();
        for (auto item : h.cast<py::sequence>()) j.push_back(to_json(item));
        return j;
    }
    throw py::type_error("unsupported config value type");
}

ExperimentConfig config_from(py::dict d) { return ExperimentConfig::from_json(to_json(d)); }

py::list edges_of(const RootedGraph& g) {
    py::list edges;
    for (const auto& e : g.edges)
        edges.append(py::make_tuple(e.u, e.v, e.weight, int(e.colour)));
    return edges;
}

RootedGraph graph_from(std::uint32_t n, std::uint32_t root, const py::list& edges) {
    RootedGraph g;
    g.n = n;
    g.root = root;
    for (auto item : edges) {
        auto t = item.cast<py::tuple>();
        if (t.size() != 3 && t.size() != 4)
            throw py::value_error("edges must be (u, v, weight[, colour]) tuples");
        RootedGraph::Edge e;
        e.u = t[0].cast<std::uint32_t>();
        e.v = t[1].cast<std::uint32_t>();
        e.weight = t[2].cast<double>();
        e.colour = t.size() == 4 && t[3].cast<int>() != 0 ? 1 : 0;
        g.edges.push_back(e);
    }
    return g;
}

CodeHistogram histogram_from(py::dict counts) {
    CodeHistogram h;
    for (auto item : counts) {
        std::uint64_t c = item.second.cast<std::uint64_t>();
        h.codes[item.first.cast<std::string>()] += c;
        h.total += c;
    }
    return h;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "first passage percolation on the configuration model: samplers, "
              "canonical codes, and local-limit comparison";

    m.def(
        "derive_scalars",
        [](py::dict degree, py::dict weights) {
            DerivedScalars s =
                derive_scalars(build_degree_model(to_json(degree)), build_weight_model(to_json(weights)));
            py::dict out;
            out["nu"] = s.nu;
            out["lambda"] = s.lambda;
            out["q_star"] = s.q_star;
            out["zeta_star"] = s.zeta_star;
            out["zeta"] = s.zeta;
            return out;
        },
        py::arg("degree"), py::arg("weights"),
        "offspring mean, Malthusian rate and survival probabilities of a model pair");

    m.def(
        "validate_config",
        [](py::dict cfg) { return config_from(cfg).validate(); }, py::arg("config"),
        "list of violations; empty means the config is runnable");

    m.def(
        "sample_limit_tree",
        [](py::dict cfg_dict, std::uint64_t replica) {
            ExperimentConfig cfg = config_from(cfg_dict);
            DegreeModel d = cfg.degree_model();
            WeightModel w = cfg.weight_model();
            OffspringModel off = size_biased(d);
            RngStream rng(cfg.seed, replica);
            ColouredLimitTree t = sample_coloured_limit_tree(cfg.regime_enum(), d, off, w,
                                                            cfg.R, limit_params(cfg), rng);
            py::dict out;
            out["n"] = t.graph.n;
            out["edges"] = edges_of(t.graph);
            out["coin"] = t.coin;
            out["declared_infinite"] = t.declared_infinite;
            out["red_length"] = t.red_length;
            out["code"] = canonical_code(t.graph, {cfg.weight_bins, &w});
            return out;
        },
        py::arg("config"), py::arg("replica") = 0,
        "one coloured limit tree ball of radius R, with its canonical code");

    m.def(
        "sample_neighbourhood",
        [](py::dict cfg_dict, std::uint64_t n, std::uint64_t replica) {
            ExperimentConfig cfg = config_from(cfg_dict);
            DegreeModel d = cfg.degree_model();
            WeightModel w = cfg.weight_model();
            RngStream rng(cfg.seed, replica);
            TruncatedNeighbourhood nb = sample_graph_ball(d, w, n, cfg.R, rng);
            py::dict out;
            out["n"] = nb.graph.n;
            out["edges"] = edges_of(nb.graph);
            out["distance"] = nb.geodesic_distance;
            out["all_black"] = nb.graph.all_black();
            out["code"] = canonical_code(nb.graph, {cfg.weight_bins, &w});
            return out;
        },
        py::arg("config"), py::arg("n"), py::arg("replica") = 0,
        "one coloured geodesic ball of a fresh configuration model on n vertices");

    m.def(
        "canonical_code",
        [](std::uint32_t n, std::uint32_t root, py::list edges, std::uint32_t weight_bins,
           std::optional<py::dict> weights) {
            RootedGraph g = graph_from(n, root, edges);
            CodeOptions opts;
            opts.weight_bins = weight_bins;
            WeightModel w = WeightModel::exponential(1.0);
            if (weights) {
                w = build_weight_model(to_json(*weights));
                opts.weights = &w;
            }
            return canonical_code(g, opts);
        },
        py::arg("n"), py::arg("root"), py::arg("edges"), py::arg("weight_bins") = 0,
        py::arg("weights") = py::none(),
        "isomorphism-invariant code of a rooted coloured graph");

    m.def(
        "tv_distance",
        [](py::dict a, py::dict b) { return tv_distance(histogram_from(a), histogram_from(b)); },
        py::arg("a"), py::arg("b"),
        "total-variation distance between two code -> count histograms");

    m.def(
        "run_convergence",
        [](py::dict cfg_dict, const std::string& out_dir) {
            ExperimentConfig cfg = config_from(cfg_dict);
            std::vector<std::string> bad = cfg.validate();
            if (!bad.empty()) {
                std::ostringstream os;
                os << "invalid config:";
                for (const auto& v : bad) os << ' ' << v << ';';
                throw std::invalid_argument(os.str());
            }
            std::vector<ConvergenceRow> rows = run_convergence(cfg, out_dir);
            py::list out;
            for (const auto& r : rows) {
                py::dict row;
                row["n"] = r.n;
                row["samples"] = r.samples;
                row["tv"] = r.tv;
                row["tv_se"] = r.tv_se;
                row["black_frac"] = r.black_frac;
                row["black_frac_expected"] = r.black_frac_expected;
                row["ks_weights"] = r.ks_weights;
                out.append(row);
            }
            return out;
        },
        py::arg("config"), py::arg("out_dir"),
        "graph-vs-limit comparison across n_grid; writes the CSV report and histograms");
}
