// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   symbridge_acceptance [--criterion k]... [--out dir] [--seed s] [--threads t]

#include <cstdio>
#include <vector>

#include "CLI11.hpp"
#include "symbridge/runner/acceptance.hpp"
#include "symbridge/runner/report.hpp"

namespace sr = symbridge::runner;

int main(int argc, char** argv) {
    CLI::App app{"symbridge acceptance criteria"};
    std::vector<int> ids;
    sr::AcceptanceOptions opts;
    std::string out = opts.out_dir.string();
    unsigned threads = 1;
    app.add_option("--criterion", ids, "criterion number, repeatable (default: all)")->check(CLI::Range(1, 13));
    app.add_option("--out", out, "directory for data files and acceptance_report.json");
    app.add_option("--seed", opts.seed, "base seed");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    opts.out_dir = out;
    opts.exec.threads = threads;
    if (ids.empty()) {
        for (const auto& c : sr::acceptance_criteria()) ids.push_back(c.id);
    }

    const auto outcomes = sr::run_acceptance(ids, opts, [](const sr::CriterionOutcome& o) {
        std::printf("%s\n", sr::format_outcome(o).c_str());
        std::fflush(stdout);
    });

    sr::RunReport report({{"seed", opts.seed}, {"threads", threads}});
    sr::add_to_report(outcomes, report);
    sr::write_json(opts.out_dir / "acceptance_report.json", report.to_json());

    std::size_t failed = 0;
    for (const auto& o : outcomes) failed += o.pass ? 0 : 1;
    std::printf("%zu/%zu criteria passed\n", outcomes.size() - failed, outcomes.size());
    return failed == 0 ? 0 : 1;
}
