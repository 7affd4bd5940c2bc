#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "symbridge/runner/config.hpp"
#include "symbridge/runner/experiments.hpp"
#include "symbridge/runner/report.hpp"

using namespace symbridge;
using namespace symbridge::runner;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal() {
    return json::parse(R"({"experiment": "spectral", "trap": {"kind": "hard_wall", "box": [0, 3.14]}, "seed": 1})");
}

std::string field_of(const json& j) {
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("symbridge_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("minimal config takes defaults and the box as domain") {
    const auto c = parse_config(minimal());
    CHECK(c.experiment == "spectral");
    CHECK(c.n == 201);
    CHECK(c.domain.size() == 1);
    CHECK(c.domain[0].upper == 3.14);
    CHECK(c.tolerance("spectral.lambda") == 1e-3);
    const json eff = to_json(c);
    CHECK(eff["seed"] == 1);
    CHECK(eff.contains("beta"));
}

TEST_CASE("config errors name the offending field") {
    json j = minimal();
    j.erase("seed");
    CHECK(field_of(j) == "seed");
    try {
        parse_config(j);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("seed required") != std::string::npos);
    }

    j = minimal();
    j["n"] = 1;
    CHECK(field_of(j) == "n");

    j = minimal();
    j["colour"] = "red";
    CHECK(field_of(j) == "colour");

    j = minimal();
    j["trap"]["box"] = json::parse(R"([[0, "pi"]])");
    CHECK(field_of(j) == "trap.box[0][1]");

    j = minimal();
    j["tolerances"] = {{"spectral.lambda", -1.0}};
    CHECK(field_of(j) == "tolerances.spectral.lambda");

    j = minimal();
    j["experiment"] = "nope";
    CHECK(field_of(j) == "experiment");

    j = minimal();
    j["M"] = 3;
    CHECK(field_of(j) == "M");

    j = json::parse(R"({"experiment": "spectral", "trap": {"kind": "quadratic", "coefficients": [1]}, "seed": 1})");
    CHECK(field_of(j) == "domain");
}

TEST_CASE("report checks sort by name and reject duplicates") {
    RunReport r(json{{"seed", 1}});
    r.add(check_at_most("b", 1.0, 2.0));
    r.add(check_at_least("a", 1.0, 2.0));
    r.add_artifact("z.csv");
    r.add_artifact("a.csv");
    CHECK_THROWS_AS(r.add(check_flag("a", true)), std::logic_error);
    CHECK_FALSE(r.passed());
    const json j = r.to_json();
    REQUIRE(j["checks"].size() == 2);
    CHECK(j["checks"][0]["name"] == "a");
    CHECK(j["checks"][0]["pass"] == false);
    CHECK(j["checks"][1]["relation"] == "<=");
    CHECK(j["artifacts"][0] == "a.csv");
    CHECK(j["passed"] == false);
}

TEST_CASE("trace experiment writes a passing report") {
    json j = json::parse(R"({"experiment": "trace", "trap": {"kind": "hard_wall", "box": [0, 3.141592653589793]},
                             "n": 61, "beta": 1.0, "N": 6, "seed": 3})");
    const auto dir = fresh_dir("trace");
    const auto rep = run_experiment(parse_config(j), dir);
    CHECK(rep.passed());
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "free_energy.csv"));
    const json written = json::parse(slurp(dir / "report.json"));
    for (const char* key : {"config", "passed", "checks", "artifacts", "timings"}) CHECK(written.contains(key));
    for (const auto& c : written["checks"])
        for (const char* key : {"name", "value", "tolerance", "relation", "pass", "detail"}) CHECK(c.contains(key));
    fs::remove_all(dir);
}

TEST_CASE("dv-check experiment passes and reruns byte-identically") {
    json j = json::parse(R"({"experiment": "dv-check", "trap": {"kind": "quadratic", "coefficients": [1.0]},
                             "domain": [-4, 4], "n": 41, "seed": 5})");
    const auto cfg = parse_config(j);
    const auto a = fresh_dir("dv_a"), b = fresh_dir("dv_b");
    CHECK(run_experiment(cfg, a).passed());
    run_experiment(cfg, b);
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
        ++compared;
    }
    CHECK(compared > 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("analytic references") {
    CHECK(*analytic_lambda(TrapPotential::quadratic({1.0})) == doctest::Approx(1.0));
    CHECK(*analytic_lambda(TrapPotential::hard_wall({{0.0, 2.0}})) == doctest::Approx(std::pow(std::acos(-1.0) / 2, 2)));
    const Grid g = build_grid({{0.0, 1.0}}, 11);
    const auto f1 = random_smooth_function(g, 9, 0);
    const auto f2 = random_smooth_function(g, 9, 0);
    const auto f3 = random_smooth_function(g, 9, 1);
    CHECK(f1 == f2);
    CHECK(f1 != f3);
}
