#include "symbridge/runner/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace symbridge::runner {

CheckResult check_at_most(std::string name, double value, double tolerance, std::string detail) {
    return {std::move(name), value, tolerance, "<=", value <= tolerance, std::move(detail)};
}

CheckResult check_at_least(std::string name, double value, double tolerance, std::string detail) {
    return {std::move(name), value, tolerance, ">=", value >= tolerance, std::move(detail)};
}

CheckResult check_flag(std::string name, bool ok, std::string detail) {
    return {std::move(name), ok ? 1.0 : 0.0, 1.0, "==", ok, std::move(detail)};
}

CheckResult check_error(std::string name, const std::string& what) {
    return {std::move(name), std::nan(""), std::nan(""), "error", false, what};
}

void RunReport::add(CheckResult c) {
    for (const auto& existing : checks_) {
        if (existing.name == c.name) throw std::logic_error("duplicate check name: " + c.name);
    }
    checks_.push_back(std::move(c));
}

void RunReport::add_artifact(std::string relative_path) { artifacts_.push_back(std::move(relative_path)); }

void RunReport::add_timing(std::string stage, double seconds) { timings_.emplace_back(std::move(stage), seconds); }

void RunReport::merge(const RunReport& other) {
    for (const auto& c : other.checks_) add(c);
    for (const auto& a : other.artifacts_) add_artifact(a);
    for (const auto& t : other.timings_) timings_.push_back(t);
}

bool RunReport::passed() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const CheckResult& c) { return c.pass; });
}

nlohmann::json RunReport::to_json() const {
    using nlohmann::json;
    std::vector<CheckResult> sorted = checks_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    json checks = json::array();
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); };
    for (const auto& c : sorted) {
        checks.push_back({{"name", c.name},
                          {"value", num(c.value)},
                          {"tolerance", num(c.tolerance)},
                          {"relation", c.relation},
                          {"pass", c.pass},
                          {"detail", c.detail}});
    }
    std::vector<std::string> arts = artifacts_;
    std::sort(arts.begin(), arts.end());
    json timings = json::object();
    for (const auto& [k, v] : timings_) timings[k] = v;
    return {{"config", config_}, {"passed", passed()}, {"checks", checks}, {"artifacts", arts}, {"timings", timings}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

void RunReport::write(const std::filesystem::path& dir) const { write_json(dir / "report.json", to_json()); }

}  // namespace symbridge::runner
