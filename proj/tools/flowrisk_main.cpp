#include <iostream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "flowrisk/pipeline.hpp"

using namespace flowrisk;

int main(int argc, char** argv) {
    CLI::App app{"Inter-county mobility analytics: OD-flow trends, lagged outbreak correlations "
                 "and the log-linear double-risk model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    int jobs = 0;

    app.add_option("--config", config_path, "run configuration file (JSON)")->required();
    app.add_option("--out", out_override, "override the configured output directory");
    app.add_option("--jobs", jobs, "worker threads (0 = library default)");

    CLI::App* validate = app.add_subcommand("validate", "load and validate the input datasets");
    CLI::App* analyze = app.add_subcommand("analyze", "trend, baseline, percent-change, region "
                                                      "and top-destination outputs");
    CLI::App* correlate = app.add_subcommand("correlate", "daily lagged correlations between "
                                                          "region outflow and case severity");
    CLI::App* fit = app.add_subcommand("fit", "double-risk scenario grid and ER importance");
    CLI::App* synth = app.add_subcommand("synth", "generate a seeded synthetic dataset");
    synth->add_option("--seed", seed_override, "override synth.seed")->each([&](const std::string&) {
        seed_given = true;
    });
    CLI::App* report = app.add_subcommand("report", "run everything and emit manifest.json");

    for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    RunConfig cfg;
    try {
        cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    }
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (seed_given) cfg.synth.seed = seed_override;
    if (jobs > 0) {
        cfg.jobs = jobs;
#ifdef _OPENMP
        omp_set_num_threads(jobs);
#endif
    }

    if (validate->parsed()) return cmd_validate(cfg);
    if (analyze->parsed()) return cmd_analyze(cfg);
    if (correlate->parsed()) return cmd_correlate(cfg);
    if (fit->parsed()) return cmd_fit(cfg);
    if (synth->parsed()) return cmd_synth(cfg);
    if (report->parsed()) return cmd_report(cfg);
    return kExitConfigError;
}
