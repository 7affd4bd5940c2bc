#include "symbridge/runner/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "symbridge/bridge/bridge.hpp"
#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/common/rng.hpp"
#include "symbridge/diffusion/drift.hpp"
#include "symbridge/diffusion/girsanov.hpp"
#include "symbridge/diffusion/process_sampler.hpp"
#include "symbridge/diffusion/sde.hpp"
#include "symbridge/ensemble/ensemble.hpp"
#include "symbridge/ensemble/permutation.hpp"
#include "symbridge/ensemble/trace.hpp"
#include "symbridge/measure/csv.hpp"
#include "symbridge/runner/experiments.hpp"
#include "symbridge/spectral/dv.hpp"
#include "symbridge/spectral/eigen.hpp"
#include "symbridge/spectral/hamiltonian.hpp"
#include "symbridge/transport/sinkhorn.hpp"
#include "symbridge/transport/t_operator.hpp"

namespace symbridge::runner {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kPi = std::numbers::pi;

// Pinned acceptance tolerances.
constexpr double kLambdaTol = 1e-3;
constexpr double kPhiSupTol = 1e-3;
constexpr double kEigenTraceRel = 0.02;
constexpr double kFreeEnergyRel = 0.05;
constexpr double kRecursionRel = 1e-10;
constexpr double kMinimizerRel = 0.02;
constexpr double kMinimizerInteriorFraction = 0.1;  // of the box length, on each side
constexpr double kCouplingTv = 1e-6;
constexpr double kFactorization = 1e-6;
constexpr double kObjectiveTol = 1e-6;
constexpr std::size_t kProbes = 20;
constexpr double kMartingaleSigma = 3.0;
constexpr double kOccupationL1 = 0.05;
constexpr double kDualityGap = 1e-4;
constexpr double kEnsembleTv = 0.08;

const std::map<int, double>& runtime_budgets() {
    static const std::map<int, double> b{{1, 1.0}, {3, 30.0}, {4, 60.0}, {5, 10.0}, {9, 60.0}, {10, 120.0}, {12, 300.0}};
    return b;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

struct Ctx {
    const AcceptanceOptions& opts;
    fs::path dir;
    std::string prefix;
    std::uint64_t seed;
    CriterionOutcome& out;

    std::string file(const std::string& name) {
        out.artifacts.push_back(prefix + "/" + name);
        return (dir / name).string();
    }
    void add(CheckResult c) { out.checks.push_back(std::move(c)); }
};

csv::Metadata meta_of(std::initializer_list<std::pair<const char*, double>> kv) {
    csv::Metadata m;
    for (const auto& [k, v] : kv) m.emplace_back(k, csv::format_double(v));
    return m;
}

struct Trap {
    std::string name;
    TrapPotential W;
    Grid grid;
};

Trap hard_wall_trap(std::size_t n) {
    return {"hard_wall", TrapPotential::hard_wall({{0.0, kPi}}), Grid({{0.0, kPi}}, n)};
}

Trap harmonic_trap(double half_width, std::size_t n) {
    return {"harmonic", TrapPotential::quadratic({1.0}), Grid({{-half_width, half_width}}, n)};
}

SpectralResult spectrum(const Trap& t) { return principal_eigenpair(discretize_hamiltonian(t.W, t.grid)); }

// ---------------------------------------------------------------- 1, 2

void eigen_criterion(Ctx& ctx, const Trap& trap, const std::function<double(double)>& phi_exact) {
    const SpectralResult sp = spectrum(trap);
    const Grid& g = trap.grid;
    double sup = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        const double ref = phi_exact(x);
        sup = std::max(sup, std::abs(sp.phi[i] - ref));
        rows.push_back({x, sp.phi[i], ref});
    }
    csv::write_table(ctx.file("phi.csv"), {"x", "phi", "phi_exact"}, rows,
                     meta_of({{"lambda", sp.lambda}, {"n", static_cast<double>(g.size())}}));
    ctx.add(check_at_most("lambda_error", std::abs(sp.lambda - 1.0), kLambdaTol, "lambda=" + fmt(sp.lambda, 10)));
    ctx.add(check_at_most("phi_sup_error", sup, kPhiSupTol));
    ctx.out.summary = "lambda=" + fmt(sp.lambda, 8) + " phi_sup=" + fmt(sup, 3);
}

void criterion_1(Ctx& ctx) {
    eigen_criterion(ctx, hard_wall_trap(201), [](double x) { return std::sqrt(2.0 / kPi) * std::sin(x); });
}

void criterion_2(Ctx& ctx) {
    eigen_criterion(ctx, harmonic_trap(8.0, 401),
                    [](double x) { return std::pow(kPi, -0.25) * std::exp(-0.5 * x * x); });
}

// ---------------------------------------------------------------- 3

void criterion_3(Ctx& ctx) {
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    const std::vector<Trap> traps{hard_wall_trap(201), harmonic_trap(6.0, 121)};
    for (std::size_t t = 0; t < traps.size(); ++t) {
        const Trap& trap = traps[t];
        const double lambda = spectrum(trap).lambda;
        const DiscreteMeasure m = DiscreteMeasure::lebesgue(trap.grid);
        for (double beta : {0.5, 1.0, 2.0}) {
            const FKKernel K = fk_kernel_grid(trap.W, beta, trap.grid);
            const TEigenpair ep = t_eigenpair(build_T_operator(K, PairWeight::gaussian(), m), m);
            const double mlog = -std::log(ep.lambda_T);
            const double rel = std::abs(mlog / (beta * lambda) - 1.0);
            worst = std::max(worst, rel);
            rows.push_back({static_cast<double>(t), beta, lambda, mlog, rel});
            ctx.add(check_at_most(trap.name + ".beta_" + fmt(beta, 2) + ".rel_error", rel, kEigenTraceRel,
                                  "-log lambda_T=" + fmt(mlog, 8) + " beta*lambda=" + fmt(beta * lambda, 8)));
        }
    }
    csv::write_table(ctx.file("eigen_trace.csv"), {"trap", "beta", "lambda", "minus_log_lambda_T", "rel_error"}, rows);
    ctx.out.summary = "worst rel=" + fmt(worst, 3);
}

// ---------------------------------------------------------------- 4

void criterion_4(Ctx& ctx) {
    const Trap trap = hard_wall_trap(201);
    const double beta = 1.0;
    const std::size_t n_max = 12;
    const double target = beta * spectrum(trap).lambda;
    const auto curve = free_energy_curve(fk_kernel_grid(trap.W, beta, trap.grid), n_max);
    std::vector<double> err;
    std::vector<std::vector<double>> rows;
    for (std::size_t N = 1; N <= n_max; ++N) {
        err.push_back(std::abs(curve[N - 1] - target) / target);
        rows.push_back({static_cast<double>(N), curve[N - 1], target, err.back()});
    }
    csv::write_table(ctx.file("free_energy.csv"), {"N", "free_energy", "beta_lambda", "rel_error"}, rows,
                     meta_of({{"beta", beta}}));
    ctx.add(check_at_most("final_rel_error", err.back(), kFreeEnergyRel));
    bool monotone = true;
    for (std::size_t k = n_max - 5; k < n_max; ++k) monotone = monotone && err[k] <= err[k - 1];
    ctx.add(check_flag("error_nonincreasing_last_6", monotone));
    ctx.out.summary = "f_12=" + fmt(curve.back(), 6) + " beta*lambda=" + fmt(target, 6) + " rel=" + fmt(err.back(), 3);
}

// ---------------------------------------------------------------- 5

// (1/N!) sum over all permutations of prod over cycles of Tr(T^len).
double brute_force_sym_trace(const linalg::Matrix& T, std::size_t N) {
    std::vector<double> tr(N + 1, 0.0);
    linalg::Matrix P = T;
    for (std::size_t k = 1; k <= N; ++k) {
        tr[k] = P.trace();
        if (k < N) P = linalg::multiply(P, T);
    }
    std::vector<std::size_t> sigma(N);
    std::iota(sigma.begin(), sigma.end(), 0);
    double total = 0.0;
    double count = 0.0;
    do {
        double prod = 1.0;
        std::vector<bool> seen(N, false);
        for (std::size_t s = 0; s < N; ++s) {
            if (seen[s]) continue;
            std::size_t len = 0;
            for (std::size_t j = s; !seen[j]; j = sigma[j]) {
                seen[j] = true;
                ++len;
            }
            prod *= tr[len];
        }
        total += prod;
        count += 1.0;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total / count;
}

void criterion_5(Ctx& ctx) {
    constexpr std::size_t n = 20;
    constexpr std::size_t n_max = 6;
    std::vector<std::pair<std::string, linalg::Matrix>> kernels;
    {
        const Trap hw = hard_wall_trap(n);
        kernels.emplace_back("fk_hard_wall", fk_kernel_grid(hw.W, 1.0, hw.grid).weighted());
        const Trap ho = harmonic_trap(4.0, n);
        kernels.emplace_back("fk_harmonic", fk_kernel_grid(ho.W, 1.0, ho.grid).weighted());
    }
    Rng rng = make_stream(ctx.seed, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    linalg::Matrix sym(n, n), gen(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) sym(i, j) = sym(j, i) = u(rng) / n;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) gen(i, j) = 2.0 * u(rng) / n;
    kernels.emplace_back("random_symmetric", sym);
    kernels.emplace_back("random_nonnegative", gen);

    double worst = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < kernels.size(); ++k) {
        const auto log_h = log_sym_traces(kernels[k].second, n_max);
        for (std::size_t N = 1; N <= n_max; ++N) {
            const double rec = std::exp(log_h[N]);
            const double brute = brute_force_sym_trace(kernels[k].second, N);
            const double rel = std::abs(rec - brute) / std::abs(brute);
            worst = std::max(worst, rel);
            rows.push_back({static_cast<double>(k), static_cast<double>(N), rec, brute, rel});
        }
    }
    csv::write_table(ctx.file("recursion_vs_brute_force.csv"), {"kernel", "N", "recursion", "brute_force", "rel_error"},
                     rows);
    ctx.add(check_at_most("max_rel_error", worst, kRecursionRel, std::to_string(kernels.size()) + " kernels, N<=6"));
    ctx.out.summary = "max rel=" + fmt(worst, 3);
}

// ---------------------------------------------------------------- 6

// Dirichlet heat kernel of the generator Laplacian on [0, L] by its sine series.
double dirichlet_sine_series(double x, double y, double t, double L) {
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double w = k * kPi / L;
        const double e = std::exp(-w * w * t);
        if (e < 1e-300) break;
        s += std::sin(w * x) * std::sin(w * y) * e;
    }
    return 2.0 / L * s;
}

void criterion_6(Ctx& ctx) {
    const Trap trap = hard_wall_trap(101);
    const Grid& g = trap.grid;
    const double beta = 1.0;
    const double L = kPi;
    const FKKernel K = fk_kernel_grid(trap.W, beta, g);
    const DiscreteMeasure leb = DiscreteMeasure::lebesgue(g);
    const PairWeight gw = PairWeight::gaussian();
    const linalg::Matrix keff = mass_kernel(effective_kernel(K, gw), leb);

    const auto inside = interior_mask(g, {{0.0, L}});
    std::vector<double> u(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = inside[i] ? 1.0 : 0.0;
    const DiscreteMeasure uniform = DiscreteMeasure::normalized(g, u);
    const SchrodingerSolution sk = sinkhorn_bridge(keff, uniform, uniform);
    const SchrodingerSolution eig = solve_symmetric_problem(K, gw, leb);

    const double lo = kMinimizerInteriorFraction * L;
    const double hi = L - lo;
    double worst = 0.0;
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double y = g.coordinate(0, j);
            const double qa = dirichlet_sine_series(x, y, beta, L) / L;
            const double qs = sk.q_star.densities()(i, j);
            rows.push_back({x, y, qs, qa, eig.q_star.densities()(i, j)});
            if (x >= lo && x <= hi && y >= lo && y <= hi) worst = std::max(worst, std::abs(qs / qa - 1.0));
        }
    }
    csv::write_table(ctx.file("minimizer.csv"), {"x", "y", "q_sinkhorn", "q_exact", "q_eigen"}, rows,
                     meta_of({{"beta", beta}, {"sinkhorn_iterations", static_cast<double>(sk.potentials->iterations)}}));
    const double tv = total_variation(sk.q_star, eig.q_star);
    ctx.add(check_at_most("interior_rel_error", worst, kMinimizerRel,
                          "nodes with x,y in [" + fmt(lo, 4) + ", " + fmt(hi, 4) + "]"));
    ctx.add(check_at_most("eigen_tv", tv, kCouplingTv));
    ctx.out.summary = "interior rel=" + fmt(worst, 3) + " tv(sinkhorn, q*)=" + fmt(tv, 3);
}

// ---------------------------------------------------------------- 7

void criterion_7(Ctx& ctx) {
    const Trap trap = harmonic_trap(6.0, 121);
    const Grid& g = trap.grid;
    const FKKernel K = fk_kernel_grid(trap.W, 1.0, g);
    const DiscreteMeasure leb = DiscreteMeasure::lebesgue(g);
    const PairWeight gw = PairWeight::gaussian();
    const SchrodingerSolution eig = solve_symmetric_problem(K, gw, leb);
    std::vector<double> nu_d(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) nu_d[i] = eig.phi_T[i] * eig.phi_T[i];
    const DiscreteMeasure nu = DiscreteMeasure::normalized(g, nu_d);
    const linalg::Matrix keff = mass_kernel(effective_kernel(K, gw), leb);
    const SchrodingerSolution sk = sinkhorn_bridge(keff, nu, nu);

    csv::write_matrix(ctx.file("q_star.csv"), eig.q_star.densities(), csv::grid_metadata(g));
    csv::write_matrix(ctx.file("q_sinkhorn.csv"), sk.q_star.densities(), csv::grid_metadata(g));
    const double tv = total_variation(sk.q_star, eig.q_star);
    const double fs = factorization_check(sk.q_star, keff, 10000, ctx.seed);
    const double fe = factorization_check(eig.q_star, keff, 10000, ctx.seed);
    ctx.add(check_at_most("sinkhorn_eigen_tv", tv, kCouplingTv));
    ctx.add(check_at_most("factorization_sinkhorn", fs, kFactorization));
    ctx.add(check_at_most("factorization_eigen", fe, kFactorization));
    ctx.out.summary = "tv=" + fmt(tv, 3) + " factorization=" + fmt(std::max(fs, fe), 3);
}

// ---------------------------------------------------------------- 8

PairMeasure normalized_pair(const Grid& g, linalg::Matrix masses) {
    masses *= 1.0 / masses.sum();
    return PairMeasure::from_masses(g, std::move(masses));
}

void criterion_8(Ctx& ctx) {
    std::vector<std::vector<double>> rows;
    double worst_gap = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    const std::vector<Trap> traps{harmonic_trap(6.0, 121), hard_wall_trap(101)};
    for (std::size_t t = 0; t < traps.size(); ++t) {
        const Trap& trap = traps[t];
        const Grid& g = trap.grid;
        const FKKernel K = fk_kernel_grid(trap.W, 1.0, g);
        const DiscreteMeasure leb = DiscreteMeasure::lebesgue(g);
        const PairWeight gw = PairWeight::gaussian();
        const SchrodingerSolution sol = solve_symmetric_problem(K, gw, leb);
        const double obj_star = schrodinger_objective(sol.q_star, leb, K, gw);
        const double gap = std::abs(obj_star + std::log(sol.lambda_T));
        worst_gap = std::max(worst_gap, gap);
        ctx.add(check_at_most(trap.name + ".objective_error", gap, kObjectiveTol,
                              "objective=" + fmt(obj_star, 12) + " -log lambda_T=" + fmt(-std::log(sol.lambda_T), 12)));

        const linalg::Matrix q_mass = sol.q_star.masses();
        const linalg::Matrix ref = mass_kernel(effective_kernel(K, gw), leb);
        Rng rng = make_stream(ctx.seed, t);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < kProbes; ++k) {
            const double p = 0.05 * static_cast<double>(1 + k / 2);
            linalg::Matrix probe = q_mass;
            if (k % 2 == 0) {
                // multiplicative symmetric noise on the support of q*
                for (std::size_t i = 0; i < g.size(); ++i) {
                    for (std::size_t j = 0; j <= i; ++j) {
                        const double f = std::exp(p * standard_normal(rng));
                        probe(i, j) *= f;
                        if (j != i) probe(j, i) *= f;
                    }
                }
            } else {
                // mixture with the normalized reference kernel
                const double s = ref.sum();
                for (std::size_t i = 0; i < g.size(); ++i)
                    for (std::size_t j = 0; j < g.size(); ++j) probe(i, j) = (1.0 - p) * probe(i, j) + p * ref(i, j) / s;
            }
            const double obj = schrodinger_objective(normalized_pair(g, std::move(probe)), leb, K, gw);
            margin = std::min(margin, obj - obj_star);
            rows.push_back({static_cast<double>(t), static_cast<double>(k), static_cast<double>(k % 2), p, obj, obj_star});
        }
        worst_margin = std::min(worst_margin, margin);
        ctx.add(check_at_least(trap.name + ".probe_margin", margin, 0.0, "min over 20 probes of objective(probe) - objective(q*)"));
    }
    csv::write_table(ctx.file("probes.csv"), {"trap", "probe", "kind", "strength", "objective", "objective_q_star"}, rows);
    ctx.out.summary = "objective error=" + fmt(worst_gap, 3) + " min probe margin=" + fmt(worst_margin, 3);
}

// ---------------------------------------------------------------- 9

void criterion_9(Ctx& ctx) {
    constexpr std::size_t n_samples = 100000;
    constexpr std::size_t M = 200;
    constexpr double beta = 1.0;
    const std::vector<std::pair<Trap, std::vector<double>>> cases{
        {hard_wall_trap(201), {0.5, 1.0, 1.5, 2.0, 2.5}},
        {harmonic_trap(8.0, 401), {-1.0, -0.5, 0.0, 0.5, 1.0}}};
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    std::uint64_t stream = 0;
    for (std::size_t t = 0; t < cases.size(); ++t) {
        const auto& [trap, points] = cases[t];
        const SpectralResult sp = spectrum(trap);
        for (double x0 : points) {
            const Point x{x0};
            const McEstimate e =
                martingale_check(x, beta, sp.lambda, sp, trap.W, n_samples, ctx.seed + stream++, M, ctx.opts.exec);
            const double z = std::abs(e.mean - 1.0) / e.std_error;
            worst = std::max(worst, z);
            rows.push_back({static_cast<double>(t), x0, e.mean, e.std_error, z});
            ctx.add(check_at_most(trap.name + ".x_" + fmt(x0, 3) + ".z", z, kMartingaleSigma,
                                  "mean=" + fmt(e.mean, 6) + " se=" + fmt(e.std_error, 3)));
        }
    }
    csv::write_table(ctx.file("martingale.csv"), {"trap", "x", "mean", "std_error", "z"}, rows,
                     meta_of({{"n_samples", static_cast<double>(n_samples)}, {"M", static_cast<double>(M)}}));
    ctx.out.summary = "max |z|=" + fmt(worst, 3);
}

// ---------------------------------------------------------------- 10

void criterion_10(Ctx& ctx) {
    constexpr double T_total = 1e4;
    constexpr double dt = 1e-3;
    std::string summary;
    const std::vector<Trap> traps{hard_wall_trap(41), harmonic_trap(8.0, 201)};
    for (std::size_t t = 0; t < traps.size(); ++t) {
        const Trap& trap = traps[t];
        const SpectralResult sp = spectrum(trap);
        const DiscreteMeasure phi2 = sp.density();
        const SdeResult sde = simulate_ergodic_sde(ground_state_drift(sp, trap.W), phi2, T_total, dt, ctx.seed + t);
        const double l1 = l1_distance(sde.occupation, phi2);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < trap.grid.size(); ++i)
            rows.push_back({trap.grid.coordinate(0, i), sde.occupation.density(i), phi2.density(i)});
        csv::write_table(ctx.file("occupation_" + trap.name + ".csv"), {"x", "occupation", "phi_squared"}, rows,
                         meta_of({{"T_total", T_total}, {"dt", dt}, {"rejection_rate", sde.rejection_rate}}));
        ctx.add(check_at_most(trap.name + ".l1", l1, kOccupationL1, "rejection_rate=" + fmt(sde.rejection_rate, 3)));
        summary += (t ? " " : "") + trap.name + " L1=" + fmt(l1, 3);
    }
    ctx.out.summary = summary;
}

// ---------------------------------------------------------------- 11

void criterion_11(Ctx& ctx) {
    const Trap trap = harmonic_trap(8.0, 201);
    const Grid& g = trap.grid;
    constexpr double beta = 1.0;
    std::vector<std::vector<double>> fs_list{std::vector<double>(g.size(), 0.0), std::vector<double>(g.size(), 0.7)};
    for (std::uint64_t k = 0; k < 10; ++k) fs_list.push_back(random_smooth_function(g, ctx.seed, k));
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (std::size_t k = 0; k < fs_list.size(); ++k) {
        const DualityResult r = dv_duality_check(fs_list[k], trap.W, g, DualityOptions{5, ctx.seed + k});
        const std::string tag = "f" + std::string(k < 10 ? "0" : "") + std::to_string(k);
        ctx.add(check_at_most(tag + ".gap", r.gap, kDualityGap,
                              "-lambda_minus=" + fmt(-r.lambda_minus, 10) + " sup=" + fmt(r.sup_value, 10)));
        ctx.add(check_at_most(tag + ".identity_gap", beta * r.identity_gap, kDualityGap));
        worst = std::max({worst, r.gap, beta * r.identity_gap});
        rows.push_back({static_cast<double>(k), r.lambda_minus, r.sup_value, r.gap, beta * r.identity_gap,
                        static_cast<double>(r.iterations)});
    }
    csv::write_table(ctx.file("duality.csv"), {"f", "lambda_minus", "sup_value", "gap", "identity_gap", "iterations"},
                     rows, meta_of({{"beta", beta}}));
    ctx.out.summary = "max gap=" + fmt(worst, 3);
}

// ---------------------------------------------------------------- 12

void criterion_12(Ctx& ctx) {
    constexpr double beta = 0.5;
    constexpr std::size_t M = 16;
    constexpr std::size_t n_samples = 10000;
    constexpr std::size_t n_paths = 10000;
    const Trap trap = harmonic_trap(5.0, 101);
    const Grid& g = trap.grid;
    const Grid hist({{-2.5, 2.5}}, 21);

    const FKKernel K = fk_kernel_grid(trap.W, beta, g);
    const SchrodingerSolution sol = solve_symmetric_problem(K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(g));
    const ProcessSample ps = schrodinger_process_sampler(sol.q_star, K, trap.W, beta, M, n_paths, ctx.seed, ctx.opts.exec);
    const DiscreteMeasure mu = path_marginal(ps.paths, hist, M / 2);

    // Starts drawn from r = phi_T^2; the pair weight p_beta / sqrt(r r') makes the
    // weighted ensemble target the reference measure m = Lebesgue.
    std::vector<double> r(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) r[i] = sol.phi_T[i] * sol.phi_T[i];
    const DiscreteMeasure start = DiscreteMeasure::normalized(g, r);
    std::vector<double> log_r(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) log_r[i] = std::log(start.density(i));
    const LogPairWeight lp = [&](std::size_t i, std::size_t j) {
        const double x = g.coordinate(0, i);
        const double y = g.coordinate(0, j);
        return log_gauss_kernel(std::span<const double>(&x, 1), std::span<const double>(&y, 1), beta) -
               0.5 * log_r[i] - 0.5 * log_r[j];
    };

    std::map<std::size_t, double> tv;
    std::map<std::size_t, EnsembleEstimates> est;
    for (std::size_t N : {2, 8}) {
        EnsembleProblem problem{start, N, beta, M, trap.W, lp};
        est.emplace(N, simulate_ensemble(problem, hist, {beta / 2.0}, n_samples, ctx.seed + N, ctx.opts.exec));
        tv[N] = measure_distance(est.at(N).L_marginals[0], mu).total_variation;
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        rows.push_back({hist.coordinate(0, i), est.at(2).L_marginals[0].density(i), est.at(8).L_marginals[0].density(i),
                        mu.density(i)});
    }
    csv::write_table(ctx.file("marginals.csv"), {"x", "ensemble_N2", "ensemble_N8", "process_sampler"}, rows,
                     meta_of({{"beta", beta},
                              {"t", beta / 2.0},
                              {"tv_N2", tv[2]},
                              {"tv_N8", tv[8]},
                              {"ess_N2", est.at(2).effective_sample_size},
                              {"ess_N8", est.at(8).effective_sample_size},
                              {"sampler_ess", ps.effective_sample_size}}));
    ctx.add(check_at_most("tv_N8", tv[8], kEnsembleTv));
    ctx.add(check_flag("tv_decreasing_N2_to_N8", tv[8] < tv[2], "tv_N2=" + fmt(tv[2], 4) + " tv_N8=" + fmt(tv[8], 4)));
    ctx.out.summary = "TV N=2 " + fmt(tv[2], 3) + ", N=8 " + fmt(tv[8], 3);
}

// ---------------------------------------------------------------- 13

std::string criterion_dir(const CriterionInfo& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "c%02d", c.id);
    return std::string(buf) + "-" + c.slug;
}

// Relative paths of all CSV files under root/<criterion dir> for criteria 1..12.
std::vector<std::string> csv_files(const fs::path& root) {
    std::vector<std::string> out;
    for (const auto& c : acceptance_criteria()) {
        if (c.id == 13) continue;
        const fs::path d = root / criterion_dir(c);
        if (!fs::exists(d)) continue;
        for (const auto& e : fs::recursive_directory_iterator(d)) {
            if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), root).string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void compare_runs(Ctx& ctx, const fs::path& a, const fs::path& b) {
    const auto fa = csv_files(a);
    const auto fb = csv_files(b);
    std::size_t mismatched = 0;
    std::string first;
    for (const auto& f : fa) {
        if (!std::binary_search(fb.begin(), fb.end(), f) || slurp(a / f) != slurp(b / f)) {
            if (mismatched++ == 0) first = f;
        }
    }
    ctx.add(check_flag("same_file_set", fa == fb && !fa.empty(), std::to_string(fa.size()) + " vs " + std::to_string(fb.size()) + " CSV files"));
    ctx.add(check_flag("bit_identical_csv", mismatched == 0,
                       mismatched == 0 ? std::to_string(fa.size()) + " files identical"
                                       : std::to_string(mismatched) + " differ, first " + first));
    ctx.out.summary = std::to_string(fa.size()) + " CSV files, " + std::to_string(mismatched) + " differ";
}

std::vector<int> criteria_before_13() {
    std::vector<int> ids;
    for (const auto& c : acceptance_criteria())
        if (c.id != 13) ids.push_back(c.id);
    return ids;
}

// With a reference directory holding this run's criteria 1..12, the suite is
// run once more and compared against it; otherwise it is run twice.
void criterion_13(Ctx& ctx, const std::optional<fs::path>& reference) {
    AcceptanceOptions o = ctx.opts;
    if (reference) {
        o.out_dir = ctx.dir / "rerun";
        run_acceptance(criteria_before_13(), o);
        compare_runs(ctx, *reference, o.out_dir);
    } else {
        o.out_dir = ctx.dir / "run-a";
        run_acceptance(criteria_before_13(), o);
        AcceptanceOptions o2 = o;
        o2.out_dir = ctx.dir / "run-b";
        run_acceptance(criteria_before_13(), o2);
        compare_runs(ctx, o.out_dir, o2.out_dir);
    }
}

CriterionOutcome run_one(int id, const AcceptanceOptions& opts, const std::optional<fs::path>& reference) {
    const auto& all = acceptance_criteria();
    const auto it = std::find_if(all.begin(), all.end(), [id](const CriterionInfo& c) { return c.id == id; });
    if (it == all.end()) throw std::invalid_argument("unknown acceptance criterion " + std::to_string(id));
    CriterionOutcome out;
    out.info = *it;
    const std::string prefix = criterion_dir(*it);
    Ctx ctx{opts, opts.out_dir / prefix, prefix, opts.seed + 1000u * static_cast<std::uint64_t>(id), out};
    fs::create_directories(ctx.dir);
    const auto t0 = Clock::now();
    try {
        switch (id) {
            case 1: criterion_1(ctx); break;
            case 2: criterion_2(ctx); break;
            case 3: criterion_3(ctx); break;
            case 4: criterion_4(ctx); break;
            case 5: criterion_5(ctx); break;
            case 6: criterion_6(ctx); break;
            case 7: criterion_7(ctx); break;
            case 8: criterion_8(ctx); break;
            case 9: criterion_9(ctx); break;
            case 10: criterion_10(ctx); break;
            case 11: criterion_11(ctx); break;
            case 12: criterion_12(ctx); break;
            case 13: criterion_13(ctx, reference); break;
        }
    } catch (const std::exception& e) {
        ctx.add(check_error("exception", e.what()));
        out.summary = std::string("error: ") + e.what();
    }
    out.seconds = seconds_since(t0);
    if (auto b = runtime_budgets().find(id); b != runtime_budgets().end()) {
        ctx.add(check_at_most("runtime_seconds", out.seconds, b->second));
    }
    out.pass = !out.checks.empty() &&
               std::all_of(out.checks.begin(), out.checks.end(), [](const CheckResult& c) { return c.pass; });
    return out;
}

}  // namespace

const std::vector<CriterionInfo>& acceptance_criteria() {
    static const std::vector<CriterionInfo> c{
        {1, "dirichlet-eigenvalue", "Dirichlet eigenvalue"},
        {2, "harmonic-eigenvalue", "Harmonic eigenvalue"},
        {3, "eigen-trace-consistency", "Eigen/trace consistency"},
        {4, "free-energy-limit", "Free-energy limit"},
        {5, "cycle-recursion", "Cycle recursion vs brute force"},
        {6, "hard-wall-minimizer", "Hard-wall minimizer"},
        {7, "soft-wall-bridge", "Soft-wall bridge identity"},
        {8, "objective-optimality", "Objective optimality"},
        {9, "martingale-normalization", "Martingale normalization"},
        {10, "ergodic-stationarity", "Ergodic stationarity"},
        {11, "dv-duality", "DV duality"},
        {12, "ensemble-convergence", "Ensemble-to-diffusion convergence"},
        {13, "reproducibility", "Reproducibility"},
    };
    return c;
}

CriterionOutcome run_criterion(int id, const AcceptanceOptions& opts) { return run_one(id, opts, std::nullopt); }

std::vector<CriterionOutcome> run_acceptance(const std::vector<int>& ids, const AcceptanceOptions& opts,
                                             const std::function<void(const CriterionOutcome&)>& on_done) {
    std::vector<CriterionOutcome> out;
    std::vector<int> done;
    const auto before = criteria_before_13();
    for (int id : ids) {
        std::optional<fs::path> reference;
        if (id == 13 && std::all_of(before.begin(), before.end(), [&](int k) {
                return std::find(done.begin(), done.end(), k) != done.end();
            })) {
            reference = opts.out_dir;
        }
        out.push_back(run_one(id, opts, reference));
        if (on_done) on_done(out.back());
        done.push_back(id);
    }
    return out;
}

std::string format_outcome(const CriterionOutcome& o) {
    char head[96];
    std::snprintf(head, sizeof head, "%s %2d %-26s", o.pass ? "PASS" : "FAIL", o.info.id, o.info.slug.c_str());
    std::string line = head;
    line += " " + o.summary;
    for (const auto& c : o.checks) {
        if (!c.pass) line += " | failed " + c.name + "=" + fmt(c.value, 4) + " (" + c.relation + " " + fmt(c.tolerance, 4) + ")";
    }
    char tail[32];
    std::snprintf(tail, sizeof tail, " [%.2f s]", o.seconds);
    return line + tail;
}

void add_to_report(const std::vector<CriterionOutcome>& outcomes, RunReport& report) {
    for (const auto& o : outcomes) {
        const std::string prefix = criterion_dir(o.info);
        for (CheckResult c : o.checks) {
            c.name = prefix + "." + c.name;
            report.add(std::move(c));
        }
        for (const auto& a : o.artifacts) report.add_artifact(a);
        report.add_timing(prefix, o.seconds);
    }
}

}  // namespace symbridge::runner
