#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "symbridge/common/parallel.hpp"
#include "symbridge/runner/report.hpp"

namespace symbridge::runner {

struct AcceptanceOptions {
    std::filesystem::path out_dir = "acceptance-out";
    std::uint64_t seed = 20240611;
    Exec exec{};
};

struct CriterionInfo {
    int id;
    std::string slug;
    std::string title;
};

struct CriterionOutcome {
    CriterionInfo info;
    bool pass = false;
    double seconds = 0.0;
    std::string summary;
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;  // relative to the options' out_dir
};

const std::vector<CriterionInfo>& acceptance_criteria();

// Runs one criterion, writing its data files under out_dir/<cNN-slug>/.
// Exceptions are caught and reported as failed checks.
CriterionOutcome run_criterion(int id, const AcceptanceOptions& opts);
// Criterion 13 reuses this call's outputs of 1..12 as its first run when they were produced here.
std::vector<CriterionOutcome> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts,
                                             const std::function<void(const CriterionOutcome&)>& on_done = {});

// "PASS  3 eigen-trace-consistency  <summary>  [1.23 s]"
std::string format_outcome(const CriterionOutcome& o);

// Adds each outcome's checks to a report, prefixed with the criterion directory name.
void add_to_report(const std::vector<CriterionOutcome>& outcomes, RunReport& report);

}  // namespace symbridge::runner
