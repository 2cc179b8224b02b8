// Command-line front end: load an experiment config, run one of the
// analysis or simulation commands, write artifacts into --out.
//
// Exit codes: 0 success, 1 bad config or arguments, 2 numeric fault
// during a run, 3 filesystem trouble.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qdob/commands.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir = ".";
    bool quiet = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int grid_points = 0;
};

qdob::ExperimentConfig load_with_overrides(const CliArgs& args) {
    qdob::ExperimentConfig cfg = qdob::load_experiment_config(args.config_path);
    if (args.seed_set) cfg.seed = args.seed;
    if (args.grid_points > 0) cfg.grid_points_per_decade = args.grid_points;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Comb-based disturbance observer toolkit"};
    app.require_subcommand(1);

    CliArgs args;
    app.add_option("-c,--config", args.config_path, "experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("-o,--out", args.out_dir, "output directory")
        ->capture_default_str();
    app.add_flag("-q,--quiet", args.quiet, "suppress progress output");
    app.add_option("--seed", args.seed, "override run.seed")
        ->each([&args](const std::string&) { args.seed_set = true; });
    app.add_option("--grid-points", args.grid_points,
                   "override analysis.grid_points_per_decade");

    auto* bode = app.add_subcommand("bode", "write frequency-response CSVs");
    auto* sweep = app.add_subcommand(
        "sweep", "measure the disturbance-to-position gain empirically");
    auto* simulate = app.add_subcommand(
        "simulate", "run the closed loop and write trace + summary");
    auto* stability =
        app.add_subcommand("stability", "nominal and robust stability report");
    auto* tune = app.add_subcommand("tune-check", "validate and lint the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // bad arguments are validation failures
    }

    try {
        const qdob::ExperimentConfig cfg = load_with_overrides(args);
        if (bode->parsed())
            qdob::cmd_bode(cfg, args.out_dir, std::cout, args.quiet);
        else if (sweep->parsed())
            qdob::cmd_sweep(cfg, args.out_dir, std::cout, args.quiet);
        else if (simulate->parsed())
            qdob::cmd_simulate(cfg, args.out_dir, std::cout, args.quiet);
        else if (stability->parsed())
            qdob::cmd_stability(cfg, args.out_dir, std::cout, args.quiet);
        else if (tune->parsed()) {
            qdob::cmd_tune_check(cfg, std::cout, args.quiet);
        }
        return 0;
    } catch (const qdob::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const qdob::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const qdob::numeric_fault& e) {
        std::cerr << "numeric fault: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
