// asyncavg: analytic and Monte Carlo study of asynchronous distributed
// averaging with bounded random delays.
//
//   asyncavg analyze  <config.json>
//   asyncavg simulate <config.json>
//   asyncavg verify   <config.json>
//   asyncavg report   <report.csv> <ensemble_summary.csv>
//
// Common flags: --output-dir, --seed, --runs, --quiet.

#include "asyncavg/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace asyncavg;

    CLI::App app{"Expected-average-error analysis for asynchronous distributed averaging"};
    app.require_subcommand(1);

    CommandOptions opts;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::size_t runs = 0;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--output-dir", output_dir, "Directory for generated artifacts");
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--runs", runs, "Override the config run count")->check(CLI::PositiveNumber);
        sub->add_flag("--quiet", opts.quiet, "Suppress console summaries");
    };

    std::string config;
    auto* analyze = app.add_subcommand("analyze", "Closed-form expected average and error bound");
    analyze->add_option("config", config, "Experiment config (JSON)")->required();
    add_common(analyze);

    auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo ensemble");
    simulate->add_option("config", config, "Experiment config (JSON)")->required();
    add_common(simulate);

    auto* verify = app.add_subcommand("verify", "Enumerated vs reduced mean matrix and eigenvector checks");
    verify->add_option("config", config, "Experiment config (JSON)")->required();
    add_common(verify);

    std::string analysis_csv;
    std::string ensemble_csv;
    auto* report = app.add_subcommand("report", "Merge analytic and empirical results");
    report->add_option("analysis", analysis_csv, "report.csv from analyze")->required();
    report->add_option("ensemble", ensemble_csv, "ensemble_summary.csv from simulate")->required();
    add_common(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    for (auto* sub : {analyze, simulate, verify, report}) {
        if (!sub->parsed()) continue;
        if (sub->count("--output-dir")) opts.output_dir = output_dir;
        if (sub->count("--seed")) opts.seed = seed;
        if (sub->count("--runs")) opts.runs = runs;
    }

    if (analyze->parsed()) return cmd_analyze(config, opts, std::cout, std::cerr);
    if (simulate->parsed()) return cmd_simulate(config, opts, std::cout, std::cerr);
    if (verify->parsed()) return cmd_verify(config, opts, std::cout, std::cerr);
    return cmd_report(analysis_csv, ensemble_csv, opts, std::cout, std::cerr);
}
