// symbridge run --config <path> [--out <dir>] [--threads k]
// symbridge validate --config <path>
//
// Exit status: 0 all checks pass, 1 a check failed, 2 invalid config or usage.

#include <cstdio>
#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "symbridge/runner/config.hpp"
#include "symbridge/runner/experiments.hpp"

namespace sr = symbridge::runner;

int main(int argc, char** argv) {
    CLI::App app{"symbridge experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    auto* run = app.add_subcommand("run", "run an experiment and write report.json");
    run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory (overrides config.output)");
    run->add_option("--threads", threads, "worker threads (overrides config.threads)")->check(CLI::PositiveNumber);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "check a config file without running it");
    validate->add_option("--config", validate_path, "JSON config file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (*validate) {
        try {
            const sr::ExperimentConfig c = sr::load_config(validate_path);
            std::cout << "valid: experiment=" << c.experiment << " seed=" << c.seed << '\n'
                      << sr::to_json(c).dump(2) << '\n';
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "invalid config: " << e.what() << '\n';
            return 2;
        }
    }

    sr::ExperimentConfig config;
    try {
        config = sr::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 2;
    }
    if (!out_dir.empty()) config.output = out_dir;
    if (threads > 0) config.threads = threads;

    try {
        const sr::RunReport report = sr::run_experiment(config, config.output);
        for (const auto& c : report.checks()) {
            std::printf("%s %-60s value=%-12.6g %s %.6g%s%s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                        c.relation.c_str(), c.tolerance, c.detail.empty() ? "" : "  ", c.detail.c_str());
        }
        std::printf("%s: %zu checks, report at %s/report.json\n", report.passed() ? "PASS" : "FAIL",
                    report.checks().size(), config.output.c_str());
        return report.passed() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return 1;
    }
}
