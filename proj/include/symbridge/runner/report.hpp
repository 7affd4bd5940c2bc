#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace symbridge::runner {

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation;  // how value is compared with tolerance, e.g. "<=" or ">="
    bool pass = false;
    std::string detail;
};

CheckResult check_at_most(std::string name, double value, double tolerance, std::string detail = {});
CheckResult check_at_least(std::string name, double value, double tolerance, std::string detail = {});
CheckResult check_flag(std::string name, bool ok, std::string detail = {});
// A failure caught while computing a check.
CheckResult check_error(std::string name, const std::string& what);

// report.json layout:
//   config     object  effective configuration
//   passed     bool    true iff every check passed
//   checks     array   {name, value, tolerance, relation, pass, detail}, sorted by name
//   artifacts  array   file names relative to the output directory, sorted
//   timings    object  seconds per stage
class RunReport {
  public:
    explicit RunReport(nlohmann::json config = nlohmann::json::object()) : config_(std::move(config)) {}

    // Throws std::logic_error if a check with the same name was already added.
    void add(CheckResult c);
    void add_artifact(std::string relative_path);
    void add_timing(std::string stage, double seconds);
    void merge(const RunReport& other);

    bool passed() const;
    const std::vector<CheckResult>& checks() const noexcept { return checks_; }
    const std::vector<std::string>& artifacts() const noexcept { return artifacts_; }
    nlohmann::json to_json() const;
    void write(const std::filesystem::path& dir) const;

  private:
    nlohmann::json config_;
    std::vector<CheckResult> checks_;
    std::vector<std::string> artifacts_;
    std::vector<std::pair<std::string, double>> timings_;
};

// Writes pretty-printed JSON, creating parent directories.
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace symbridge::runner
