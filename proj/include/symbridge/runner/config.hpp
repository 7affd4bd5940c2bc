#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "symbridge/bridge/potential.hpp"
#include "symbridge/measure/grid.hpp"

namespace symbridge::runner {

// Invalid configuration; the message starts with the path to the offending field.
class ConfigError : public std::invalid_argument {
  public:
    ConfigError(const std::string& field, const std::string& message)
        : std::invalid_argument(field.empty() ? message : field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

struct TrapSpec {
    std::string kind;  // hard_wall | quadratic | tabulated
    std::vector<Interval> box;
    std::vector<double> coefficients;
    std::vector<double> center;
    double offset = 0.0;
    std::vector<double> values;
};

struct ExperimentConfig {
    std::string experiment;
    TrapSpec trap;
    std::vector<Interval> domain;
    std::size_t n = 201;
    double beta = 1.0;
    std::size_t N = 12;
    std::size_t M = 32;
    std::size_t n_samples = 10000;
    double dt = 1e-3;
    double T_total = 1e4;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    std::string output = "symbridge-out";
    unsigned threads = 1;
    std::map<std::string, double> tolerances;

    TrapPotential potential() const;
    Grid grid() const;
    double tolerance(const std::string& name) const;
};

const std::vector<std::string>& experiment_names();
// Documented default for every tolerance a config may override.
const std::map<std::string, double>& default_tolerances();

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
// Effective values, including defaults that were not given.
nlohmann::json to_json(const ExperimentConfig& c);

}  // namespace symbridge::runner
