#include "symbridge/runner/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace symbridge::runner {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) {
            throw ConfigError(prefix + it.key(), "unknown key '" + it.key() + "'");
        }
    }
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
    return d;
}

double positive(const json& v, const std::string& path) {
    const double d = number(v, path);
    if (!(d > 0.0)) throw ConfigError(path, "must be > 0");
    return d;
}

std::uint64_t integer(const json& v, const std::string& path) {
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) return v.get<std::uint64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(path, "expected a nonnegative integer");
}

std::vector<double> numbers(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<Interval> intervals(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a list of [lower, upper] pairs");
    // A single [lower, upper] pair is accepted as a one-dimensional box.
    if (v.size() == 2 && v[0].is_number()) {
        return {Interval{number(v[0], path + "[0]"), number(v[1], path + "[1]")}};
    }
    std::vector<Interval> out;
    for (std::size_t a = 0; a < v.size(); ++a) {
        const std::string p = path + "[" + std::to_string(a) + "]";
        if (!v[a].is_array() || v[a].size() != 2) throw ConfigError(p, "expected [lower, upper]");
        out.push_back({number(v[a][0], p + "[0]"), number(v[a][1], p + "[1]")});
    }
    return out;
}

TrapSpec parse_trap(const json& j) {
    if (!j.is_object()) throw ConfigError("trap", "expected an object");
    reject_unknown(j, {"kind", "box", "coefficients", "center", "offset", "values"}, "trap.");
    if (!j.contains("kind") || !j["kind"].is_string()) throw ConfigError("trap.kind", "required string");
    TrapSpec t;
    t.kind = j["kind"].get<std::string>();
    if (j.contains("offset")) t.offset = number(j["offset"], "trap.offset");
    if (t.kind == "hard_wall") {
        if (!j.contains("box")) throw ConfigError("trap.box", "required for a hard wall");
        t.box = intervals(j["box"], "trap.box");
    } else if (t.kind == "quadratic") {
        if (!j.contains("coefficients")) throw ConfigError("trap.coefficients", "required for a quadratic trap");
        t.coefficients = numbers(j["coefficients"], "trap.coefficients");
        if (j.contains("center")) t.center = numbers(j["center"], "trap.center");
    } else if (t.kind == "tabulated") {
        if (!j.contains("values")) throw ConfigError("trap.values", "required for a tabulated trap");
        t.values = numbers(j["values"], "trap.values");
    } else {
        throw ConfigError("trap.kind", "expected hard_wall, quadratic or tabulated, got '" + t.kind + "'");
    }
    return t;
}

json intervals_json(const std::vector<Interval>& v) {
    json out = json::array();
    for (const auto& iv : v) out.push_back({iv.lower, iv.upper});
    return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"spectral", "transport", "ensemble", "diffusion",
                                                "dv-check", "trace",     "full-suite"};
    return names;
}

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> t{
        {"spectral.lambda", 1e-3},        {"spectral.phi_sup", 1e-3},        {"trace.free_energy_rel", 0.05},
        {"transport.objective", 1e-6},    {"transport.sinkhorn_tv", 1e-6},   {"transport.factorization", 1e-6},
        {"transport.marginal_tv", 1e-8},  {"transport.eigen_trace_rel", 0.02}, {"ensemble.z_sigma", 3.0},
        {"diffusion.occupation_l1", 0.05}, {"diffusion.martingale_sigma", 3.0}, {"dv.gap", 1e-4},
    };
    return t;
}

TrapPotential ExperimentConfig::potential() const {
    try {
        if (trap.kind == "hard_wall") return TrapPotential::hard_wall(trap.box, trap.offset);
        if (trap.kind == "quadratic") return TrapPotential::quadratic(trap.coefficients, trap.center, trap.offset);
        std::vector<double> v = trap.values;
        for (double& x : v) x += trap.offset;
        return TrapPotential::tabulated(grid(), std::move(v));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError("trap", e.what());
    }
}

Grid ExperimentConfig::grid() const {
    try {
        return build_grid(domain, n);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(n < 2 ? "n" : "domain", e.what());
    }
}

double ExperimentConfig::tolerance(const std::string& name) const {
    if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
    return default_tolerances().at(name);
}

ExperimentConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("", "configuration must be a JSON object");
    reject_unknown(j, {"experiment", "trap", "domain", "n", "beta", "N", "M", "n_samples", "dt", "T_total", "tol",
                       "seed", "output", "threads", "tolerances"},
                   "");
    ExperimentConfig c;
    if (!j.contains("seed")) throw ConfigError("seed", "seed required");
    c.seed = integer(j["seed"], "seed");

    if (!j.contains("experiment") || !j["experiment"].is_string()) throw ConfigError("experiment", "required string");
    c.experiment = j["experiment"].get<std::string>();
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
        throw ConfigError("experiment", "unknown experiment '" + c.experiment + "'");
    }
    if (c.experiment != "full-suite") {
        if (!j.contains("trap")) throw ConfigError("trap", "required");
        c.trap = parse_trap(j["trap"]);
        if (j.contains("domain")) {
            c.domain = intervals(j["domain"], "domain");
        } else if (c.trap.kind == "hard_wall") {
            c.domain = c.trap.box;
        } else {
            throw ConfigError("domain", "required unless the trap is a hard wall");
        }
    }
    if (j.contains("n")) c.n = integer(j["n"], "n");
    if (j.contains("beta")) c.beta = positive(j["beta"], "beta");
    if (j.contains("N")) c.N = integer(j["N"], "N");
    if (j.contains("M")) c.M = integer(j["M"], "M");
    if (j.contains("n_samples")) c.n_samples = integer(j["n_samples"], "n_samples");
    if (j.contains("dt")) c.dt = positive(j["dt"], "dt");
    if (j.contains("T_total")) c.T_total = positive(j["T_total"], "T_total");
    if (j.contains("tol")) c.tol = positive(j["tol"], "tol");
    if (j.contains("threads")) c.threads = static_cast<unsigned>(integer(j["threads"], "threads"));
    if (j.contains("output")) {
        if (!j["output"].is_string()) throw ConfigError("output", "expected a string");
        c.output = j["output"].get<std::string>();
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances", "expected an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (!default_tolerances().count(it.key())) throw ConfigError("tolerances." + it.key(), "unknown key '" + it.key() + "'");
            c.tolerances[it.key()] = positive(it.value(), "tolerances." + it.key());
        }
    }
    if (c.N < 1) throw ConfigError("N", "must be >= 1");
    if (c.M < 2 || c.M % 2 != 0) throw ConfigError("M", "must be an even number >= 2");
    if (c.n_samples < 1) throw ConfigError("n_samples", "must be >= 1");
    if (c.threads < 1) throw ConfigError("threads", "must be >= 1");

    if (c.experiment != "full-suite") {
        const Grid g = c.grid();
        if (c.trap.kind == "tabulated" && c.trap.values.size() != g.size()) {
            throw ConfigError("trap.values", "expected one value per grid node (" + std::to_string(g.size()) + ")");
        }
        const TrapPotential w = c.potential();
        if (w.dim() != g.dim()) throw ConfigError("trap", "dimension differs from the domain");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = c.experiment;
    if (c.experiment != "full-suite") {
        json t;
        t["kind"] = c.trap.kind;
        t["offset"] = c.trap.offset;
        if (c.trap.kind == "hard_wall") t["box"] = intervals_json(c.trap.box);
        if (c.trap.kind == "quadratic") {
            t["coefficients"] = c.trap.coefficients;
            t["center"] = c.trap.center.empty() ? std::vector<double>(c.trap.coefficients.size(), 0.0) : c.trap.center;
        }
        if (c.trap.kind == "tabulated") t["values"] = c.trap.values;
        j["trap"] = t;
        j["domain"] = intervals_json(c.domain);
    }
    j["n"] = c.n;
    j["beta"] = c.beta;
    j["N"] = c.N;
    j["M"] = c.M;
    j["n_samples"] = c.n_samples;
    j["dt"] = c.dt;
    j["T_total"] = c.T_total;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["output"] = c.output;
    j["threads"] = c.threads;
    json tol = json::object();
    for (const auto& [k, v] : default_tolerances()) tol[k] = c.tolerance(k);
    j["tolerances"] = tol;
    return j;
}

}  // namespace symbridge::runner
