#include "symbridge/runner/experiments.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "symbridge/bridge/bridge.hpp"
#include "symbridge/common/rng.hpp"
#include "symbridge/diffusion/drift.hpp"
#include "symbridge/diffusion/girsanov.hpp"
#include "symbridge/diffusion/sde.hpp"
#include "symbridge/ensemble/ensemble.hpp"
#include "symbridge/ensemble/trace.hpp"
#include "symbridge/runner/acceptance.hpp"
#include "symbridge/spectral/dv.hpp"
#include "symbridge/spectral/eigen.hpp"
#include "symbridge/spectral/hamiltonian.hpp"
#include "symbridge/transport/sinkhorn.hpp"
#include "symbridge/transport/t_operator.hpp"

namespace symbridge::runner {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs body; an exception becomes a failed check under `name`.
void guarded(RunReport& report, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report.add(check_error(name, e.what()));
    }
}

csv::Metadata with(csv::Metadata meta, const std::string& key, double v) {
    meta.emplace_back(key, csv::format_double(v));
    return meta;
}

std::string artifact(RunReport& report, const fs::path& dir, const std::string& file) {
    report.add_artifact(file);
    return (dir / file).string();
}

SpectralResult spectrum(const TrapPotential& W, const Grid& g) { return principal_eigenpair(discretize_hamiltonian(W, g)); }

void run_spectral(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
    const TrapPotential W = cfg.potential();
    const Grid g = cfg.grid();
    guarded(report, "spectral.eigenpair", [&] {
        const auto t0 = Clock::now();
        const SpectralResult sp = spectrum(W, g);
        report.add_timing("spectral", seconds_since(t0));
        csv::Metadata meta = with(with({}, "lambda", sp.lambda), "residual", sp.residual);
        write_grid_function(artifact(report, dir, "phi.csv"), g, sp.phi, "phi", meta);
        report.add(check_flag("spectral.converged", std::isfinite(sp.lambda) && sp.residual <= 1e-6,
                              "residual=" + csv::format_double(sp.residual)));
        if (auto la = analytic_lambda(W)) {
            report.add(check_at_most("spectral.lambda_error", std::abs(sp.lambda - *la), cfg.tolerance("spectral.lambda"),
                                     "lambda=" + csv::format_double(sp.lambda) + " analytic=" + csv::format_double(*la)));
        }
        if (auto phi = analytic_ground_state(W, g)) {
            double sup = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) sup = std::max(sup, std::abs(sp.phi[i] - (*phi)[i]));
            report.add(check_at_most("spectral.phi_sup_error", sup, cfg.tolerance("spectral.phi_sup")));
        }
    });
}

void run_trace(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
    const TrapPotential W = cfg.potential();
    const Grid g = cfg.grid();
    guarded(report, "trace.free_energy", [&] {
        const auto t0 = Clock::now();
        const SpectralResult sp = spectrum(W, g);
        const FKKernel K = fk_kernel_grid(W, cfg.beta, g);
        const auto curve = free_energy_curve(K, cfg.N);
        report.add_timing("trace", seconds_since(t0));
        const double target = cfg.beta * sp.lambda;
        std::vector<std::vector<double>> rows;
        std::vector<double> err;
        for (std::size_t N = 1; N <= curve.size(); ++N) {
            err.push_back(std::abs(curve[N - 1] - target) / std::abs(target));
            rows.push_back({static_cast<double>(N), curve[N - 1], target, err.back()});
        }
        csv::write_table(artifact(report, dir, "free_energy.csv"), {"N", "free_energy", "beta_lambda", "rel_error"}, rows,
                         with(with({}, "beta", cfg.beta), "kernel_steps", static_cast<double>(K.steps)));
        report.add(check_at_most("trace.free_energy_rel", err.back(), cfg.tolerance("trace.free_energy_rel")));
        const std::size_t tail = std::min<std::size_t>(6, err.size());
        bool monotone = true;
        for (std::size_t k = err.size() - tail + 1; k < err.size(); ++k) monotone = monotone && err[k] <= err[k - 1];
        report.add(check_flag("trace.error_nonincreasing", monotone, "last " + std::to_string(tail) + " values of N"));
    });
}

void run_transport(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
    const TrapPotential W = cfg.potential();
    const Grid g = cfg.grid();
    guarded(report, "transport.solve", [&] {
        const auto t0 = Clock::now();
        const FKKernel K = fk_kernel_grid(W, cfg.beta, g);
        const DiscreteMeasure m = DiscreteMeasure::lebesgue(g);
        const PairWeight gw = PairWeight::gaussian();
        const SchrodingerSolution sol = solve_symmetric_problem(K, gw, m);
        report.add_timing("transport.eigen", seconds_since(t0));
        const double log_l = std::log(sol.lambda_T);
        const csv::Metadata meta = with(with({}, "beta", cfg.beta), "lambda_T", sol.lambda_T);
        write_grid_function(artifact(report, dir, "phi_T.csv"), g, sol.phi_T, "phi_T", meta);
        csv::write_matrix(artifact(report, dir, "q_star.csv"), sol.q_star.densities(),
                          with(csv::grid_metadata(g), "lambda_T", sol.lambda_T));
        report.add(check_at_most("transport.objective", std::abs(sol.objective + log_l), cfg.tolerance("transport.objective"),
                                 "objective=" + csv::format_double(sol.objective)));

        guarded(report, "transport.eigen_trace_rel", [&] {
            const SpectralResult sp = spectrum(W, g);
            report.add(check_at_most("transport.eigen_trace_rel", std::abs(-log_l / (cfg.beta * sp.lambda) - 1.0),
                                     cfg.tolerance("transport.eigen_trace_rel")));
        });

        std::vector<double> nu_d(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) nu_d[i] = sol.phi_T[i] * sol.phi_T[i];
        const DiscreteMeasure nu = DiscreteMeasure::normalized(g, nu_d);
        const auto [q1, q2] = marginals(sol.q_star);
        report.add(check_at_most("transport.marginal_tv", measure_distance(q1, nu).total_variation,
                                 cfg.tolerance("transport.marginal_tv")));

        guarded(report, "transport.sinkhorn", [&] {
            const auto t1 = Clock::now();
            const linalg::Matrix keff = mass_kernel(effective_kernel(K, gw), m);
            const SchrodingerSolution sk = sinkhorn_bridge(keff, nu, nu, SinkhornOptions{cfg.tol});
            report.add_timing("transport.sinkhorn", seconds_since(t1));
            std::vector<std::vector<double>> rows;
            const auto& hist = sk.potentials->error_history;
            for (std::size_t k = 0; k < hist.size(); ++k) rows.push_back({static_cast<double>(k + 1), hist[k]});
            csv::write_table(artifact(report, dir, "sinkhorn_errors.csv"), {"iteration", "marginal_error"}, rows);
            report.add(check_at_most("transport.sinkhorn_tv", total_variation(sk.q_star, sol.q_star),
                                     cfg.tolerance("transport.sinkhorn_tv")));
            report.add(check_at_most("transport.factorization", factorization_check(sk.q_star, keff, 10000, cfg.seed),
                                     cfg.tolerance("transport.factorization")));
        });
    });
}

void run_ensemble(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
    const TrapPotential W = cfg.potential();
    const Grid g = cfg.grid();
    guarded(report, "ensemble.z", [&] {
        if (cfg.M % 2 != 0) throw std::invalid_argument("M must be even");
        const double beta = cfg.beta;
        const DiscreteMeasure m = DiscreteMeasure::normalized(g, std::vector<double>(g.size(), 1.0));
        LogPairWeight lp = [&](std::size_t i, std::size_t j) { return log_gauss_kernel(g.node(i), g.node(j), beta); };
        const std::vector<double> marks{0.0, beta / 2.0, beta};
        const auto t0 = Clock::now();
        const EnsembleEstimates est =
            simulate_ensemble({m, cfg.N, beta, cfg.M, W, lp}, g, marks, cfg.n_samples, cfg.seed, Exec{cfg.threads});
        report.add_timing("ensemble.simulate", seconds_since(t0));

        // Exact value: symmetrized trace of the kernel against the start measure.
        const FKKernel K = fk_kernel_grid(W, beta, g);
        linalg::Matrix A = K.matrix;
        for (std::size_t i = 0; i < g.size(); ++i)
            for (std::size_t j = 0; j < g.size(); ++j) A(i, j) *= m.mass(i);
        const double z_exact = std::exp(log_sym_traces(A, cfg.N)[cfg.N]);

        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::vector<double> row = g.node(i);
            for (const auto& L : est.L_marginals) row.push_back(L.density(i));
            row.push_back(est.Y_hat.density(i));
            rows.push_back(std::move(row));
        }
        std::vector<std::string> header;
        for (std::size_t a = 0; a < g.dim(); ++a) header.push_back("x" + std::to_string(a));
        for (std::size_t t = 0; t < marks.size(); ++t) header.push_back("L_t" + std::to_string(t));
        header.push_back("Y");
        csv::Metadata meta = with(with(with({}, "Z_hat", est.Z_hat.mean), "Z_std_error", est.Z_hat.std_error), "Z_exact",
                                  z_exact);
        meta = with(with(meta, "effective_sample_size", est.effective_sample_size), "N", static_cast<double>(cfg.N));
        for (std::size_t t = 0; t < marks.size(); ++t) meta = with(meta, "t" + std::to_string(t), marks[t]);
        csv::write_table(artifact(report, dir, "ensemble_marginals.csv"), header, rows, meta);

        const double z = est.Z_hat.std_error > 0.0 ? std::abs(est.Z_hat.mean - z_exact) / est.Z_hat.std_error
                                                   : (est.Z_hat.mean == z_exact ? 0.0 : std::numeric_limits<double>::infinity());
        report.add(check_at_most("ensemble.z_sigma", z, cfg.tolerance("ensemble.z_sigma"),
                                 "Z_hat=" + csv::format_double(est.Z_hat.mean) + " exact=" + csv::format_double(z_exact) +
                                     (K.coarse_warning ? " (kernel grid too coarse for the Trotter step)" : "")));
    });
}

void run_diffusion(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
    const TrapPotential W = cfg.potential();
    const Grid g = cfg.grid();
    guarded(report, "diffusion.setup", [&] {
        const SpectralResult sp = spectrum(W, g);
        const DiscreteMeasure phi2 = sp.density();
        guarded(report, "diffusion.occupation_l1", [&] {
            const auto t0 = Clock::now();
            const SdeResult sde = simulate_ergodic_sde(ground_state_drift(sp, W), phi2, cfg.T_total, cfg.dt, cfg.seed);
            report.add_timing("diffusion.sde", seconds_since(t0));
            std::vector<double> occ(sde.occupation.densities().begin(), sde.occupation.densities().end());
            write_grid_function(artifact(report, dir, "occupation.csv"), g, occ, "occupation",
                                with(with({}, "T_total", cfg.T_total), "dt", cfg.dt));
            std::vector<double> target(phi2.densities().begin(), phi2.densities().end());
            write_grid_function(artifact(report, dir, "phi_squared.csv"), g, target, "phi_squared");
            report.add(check_at_most("diffusion.occupation_l1", l1_distance(sde.occupation, phi2),
                                     cfg.tolerance("diffusion.occupation_l1")));
            report.add(check_flag("diffusion.rejection_rate", !sde.rejection_flag,
                                  "rate=" + csv::format_double(sde.rejection_rate)));
        });
        guarded(report, "diffusion.martingale_sigma", [&] {
            std::size_t start = 0;
            for (std::size_t i = 0; i < g.size(); ++i)
                if (sp.phi[i] > sp.phi[start]) start = i;
            const Point x = g.node(start);
            const auto t0 = Clock::now();
            const McEstimate e =
                martingale_check(x, cfg.beta, sp.lambda, sp, W, cfg.n_samples, cfg.seed, cfg.M, Exec{cfg.threads});
            report.add_timing("diffusion.martingale", seconds_since(t0));
            const double z = std::abs(e.mean - 1.0) / e.std_error;
            report.add(check_at_most("diffusion.martingale_sigma", z, cfg.tolerance("diffusion.martingale_sigma"),
                                     "mean=" + csv::format_double(e.mean) + " se=" + csv::format_double(e.std_error)));
        });
    });
}

void run_dv(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
    const TrapPotential W = cfg.potential();
    const Grid g = cfg.grid();
    std::vector<std::vector<double>> fs_list{std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.7)};
    for (std::uint64_t k = 0; k < 10; ++k) fs_list.push_back(random_smooth_function(g, cfg.seed, k));
    std::vector<std::vector<double>> rows;
    const auto t0 = Clock::now();
    for (std::size_t k = 0; k < fs_list.size(); ++k) {
        char tag[8];
        std::snprintf(tag, sizeof tag, "f%02zu", k);
        guarded(report, std::string("dv.gap.") + tag, [&] {
            const DualityResult r = dv_duality_check(fs_list[k], W, g, DualityOptions{5, cfg.seed + k});
            rows.push_back({static_cast<double>(k), r.lambda_minus, r.sup_value, r.gap, cfg.beta * r.identity_gap,
                            static_cast<double>(r.iterations)});
            report.add(check_at_most(std::string("dv.gap.") + tag, r.gap, cfg.tolerance("dv.gap")));
            report.add(check_at_most(std::string("dv.identity.") + tag, cfg.beta * r.identity_gap, cfg.tolerance("dv.gap"),
                                     "beta-scaled rate at phi_f^2 against spectral value"));
        });
    }
    report.add_timing("dv", seconds_since(t0));
    csv::write_table(artifact(report, dir, "gaps.csv"),
                     {"index", "lambda_minus", "sup_value", "gap", "identity_gap", "iterations"}, rows,
                     with({}, "beta", cfg.beta));
}

void run_full_suite(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
    AcceptanceOptions opts;
    opts.out_dir = dir;
    opts.seed = cfg.seed;
    opts.exec = Exec{cfg.threads};
    std::vector<int> ids;
    for (const auto& c : acceptance_criteria()) ids.push_back(c.id);
    const auto t0 = Clock::now();
    const auto outcomes = run_acceptance(ids, opts);
    report.add_timing("full-suite", seconds_since(t0));
    add_to_report(outcomes, report);
}

}  // namespace

std::optional<double> analytic_lambda(const TrapPotential& W) {
    if (const auto& box = W.hard_wall_box()) {
        double l = W.offset();
        for (const auto& iv : *box) l += std::pow(std::numbers::pi / iv.length(), 2);
        return l;
    }
    if (W.kind() == TrapPotential::Kind::quadratic) {
        double l = W.offset();
        for (double a : W.coefficients()) {
            if (!(a > 0.0)) return std::nullopt;
            l += std::sqrt(a);
        }
        return l;
    }
    return std::nullopt;
}

std::optional<std::vector<double>> analytic_ground_state(const TrapPotential& W, const Grid& grid) {
    if (W.dim() != grid.dim()) return std::nullopt;
    const auto& box = W.hard_wall_box();
    if (!box && !analytic_lambda(W)) return std::nullopt;
    std::vector<double> phi(grid.size(), 1.0);
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            if (box) {
                const Interval& iv = (*box)[a];
                const double L = iv.length();
                const bool inside = x[a] > iv.lower && x[a] < iv.upper;
                phi[i] *= inside ? std::sqrt(2.0 / L) * std::sin(std::numbers::pi * (x[a] - iv.lower) / L) : 0.0;
            } else {
                const double s = std::sqrt(W.coefficients()[a]);
                const double c = W.center().empty() ? 0.0 : W.center()[a];
                phi[i] *= std::pow(s / std::numbers::pi, 0.25) * std::exp(-0.5 * s * (x[a] - c) * (x[a] - c));
            }
        }
    }
    return phi;
}

linalg::Matrix mass_kernel(const linalg::Matrix& k_eff, const DiscreteMeasure& m) {
    linalg::Matrix out = k_eff;
    const auto mass = m.masses();
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= mass[i] * mass[j];
    return out;
}

std::vector<double> random_smooth_function(const Grid& grid, std::uint64_t seed, std::uint64_t index) {
    Rng rng = make_stream(seed, index);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    constexpr std::size_t kModes = 3;
    std::vector<std::array<double, 2 * kModes>> coeff(grid.dim());
    for (auto& c : coeff) {
        for (std::size_t k = 0; k < kModes; ++k) {
            c[2 * k] = amp(rng) / static_cast<double>(k + 1);
            c[2 * k + 1] = phase(rng);
        }
    }
    std::vector<double> f(grid.size(), 0.0);
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.node(i, x);
        for (std::size_t a = 0; a < grid.dim(); ++a) {
            const Interval& iv = grid.bounds()[a];
            const double u = std::numbers::pi * (x[a] - iv.lower) / iv.length();
            for (std::size_t k = 0; k < kModes; ++k)
                f[i] += coeff[a][2 * k] * std::sin(static_cast<double>(k + 1) * u + coeff[a][2 * k + 1]);
        }
    }
    return f;
}

void write_grid_function(const fs::path& path, const Grid& grid, const std::vector<double>& values,
                         const std::string& name, const csv::Metadata& meta) {
    std::vector<std::string> header;
    for (std::size_t a = 0; a < grid.dim(); ++a) header.push_back("x" + std::to_string(a));
    header.push_back(name);
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<double> row = grid.node(i);
        row.push_back(values.at(i));
        rows.push_back(std::move(row));
    }
    csv::Metadata full = csv::grid_metadata(grid);
    full.insert(full.end(), meta.begin(), meta.end());
    csv::write_table(path, header, rows, full);
}

RunReport run_experiment(const ExperimentConfig& config, const fs::path& out_dir) {
    RunReport report(to_json(config));
    fs::create_directories(out_dir);
    const auto t0 = Clock::now();
    const std::string& e = config.experiment;
    if (e == "spectral") {
        run_spectral(config, out_dir, report);
    } else if (e == "trace") {
        run_trace(config, out_dir, report);
    } else if (e == "transport") {
        run_transport(config, out_dir, report);
    } else if (e == "ensemble") {
        run_ensemble(config, out_dir, report);
    } else if (e == "diffusion") {
        run_diffusion(config, out_dir, report);
    } else if (e == "dv-check") {
        run_dv(config, out_dir, report);
    } else if (e == "full-suite") {
        run_full_suite(config, out_dir, report);
    } else {
        throw ConfigError("experiment", "unknown experiment '" + e + "'");
    }
    report.add_timing("total", seconds_since(t0));
    report.write(out_dir);
    return report;
}

}  // namespace symbridge::runner
