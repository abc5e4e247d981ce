#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fpplocal/experiment.hpp"

namespace {

// 0 success, 2 config error, 3 runtime cap / runtime failure
constexpr int kConfigError = 2;
constexpr int kRuntimeCap = 3;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> workers;
    std::optional<std::string> out;
};

void attach_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "override the master seed");
    sub->add_option("--workers", opts.workers,
                    "override the worker count (0 = FPP_LOCAL_WORKERS, else 1)");
    sub->add_option("--out", opts.out, "override the output directory");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"first passage percolation on the configuration model: "
                 "samplers and local-limit verification"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    CommonOptions opts;
    CLI::App* convergence = app.add_subcommand(
        "convergence", "total-variation report between graph balls and limit trees");
    CLI::App* limit_sample =
        app.add_subcommand("limit-sample", "dump coloured limit trees and their code histogram");
    CLI::App* nbhd_sample = app.add_subcommand(
        "neighbourhood-sample", "dump coloured graph neighbourhoods and their code histogram");
    CLI::App* explore =
        app.add_subcommand("explore", "exploration traces on fresh limit trees");
    CLI::App* derive = app.add_subcommand("derive", "print the derived model scalars");
    for (CLI::App* sub : {convergence, limit_sample, nbhd_sample, explore, derive})
        attach_common(sub, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }

    fpplocal::ExperimentConfig cfg;
    try {
        std::ifstream in(opts.config_path);
        if (!in) {
            std::cerr << "config error: cannot open " << opts.config_path << '\n';
            return kConfigError;
        }
        cfg = fpplocal::ExperimentConfig::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.workers) cfg.workers = *opts.workers;
    if (opts.out) cfg.out_dir = *opts.out;

    std::vector<std::string> violations = cfg.validate();
    if (!violations.empty()) {
        for (const auto& v : violations) std::cerr << "config error: " << v << '\n';
        return kConfigError;
    }

    std::filesystem::path out_dir(cfg.out_dir);
    try {
        if (app.got_subcommand(derive)) {
            fpplocal::run_derive(cfg, out_dir, std::cout);
        } else if (app.got_subcommand(convergence)) {
            auto rows = fpplocal::run_convergence(cfg, out_dir);
            fpplocal::write_convergence_csv(rows, std::cout);
        } else if (app.got_subcommand(limit_sample)) {
            fpplocal::run_limit_sample(cfg, out_dir);
            std::cout << "wrote " << (out_dir / "limit_trees.txt").string() << " and "
                      << (out_dir / "limit_histogram.json").string() << '\n';
        } else if (app.got_subcommand(nbhd_sample)) {
            fpplocal::run_neighbourhood_sample(cfg, out_dir);
            std::cout << "wrote neighbourhood dumps and histograms under " << out_dir.string()
                      << '\n';
        } else if (app.got_subcommand(explore)) {
            fpplocal::RunStatus status = fpplocal::run_explore(cfg, out_dir);
            std::cout << "wrote " << cfg.samples << " traces under " << out_dir.string()
                      << '\n';
            if (status == fpplocal::RunStatus::TimeCap) {
                std::cerr << "wall-clock cap exceeded during exploration\n";
                return kRuntimeCap;
            }
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << '\n';
        return kRuntimeCap;
    }
    return 0;
}
