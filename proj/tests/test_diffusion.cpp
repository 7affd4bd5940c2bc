#include <cmath>
#include <numbers>

#include "doctest.h"
#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/diffusion/drift.hpp"
#include "symbridge/diffusion/girsanov.hpp"
#include "symbridge/diffusion/process_sampler.hpp"
#include "symbridge/diffusion/sde.hpp"
#include "symbridge/spectral/eigen.hpp"
#include "symbridge/spectral/hamiltonian.hpp"
#include "symbridge/transport/t_operator.hpp"

using namespace symbridge;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralResult ground(const TrapPotential& W, const Grid& g) { return principal_eigenpair(discretize_hamiltonian(W, g)); }

PathSample constant_path(double x, double beta, std::size_t M) {
    PathSample p;
    p.dim = 1;
    for (std::size_t k = 0; k <= M; ++k) {
        p.times.push_back(beta * static_cast<double>(k) / static_cast<double>(M));
        p.positions.push_back(x);
    }
    return p;
}

// Node masses of a fine-grid measure collected onto the nearest nodes of a coarse grid.
DiscreteMeasure rebin(const DiscreteMeasure& fine, const Grid& coarse) {
    std::vector<double> mass(coarse.size(), 0.0);
    for (std::size_t i = 0; i < fine.grid().size(); ++i) mass[coarse.nearest_node(fine.grid().node(i))] += fine.mass(i);
    return DiscreteMeasure::normalized(coarse, mass);
}

}  // namespace

TEST_CASE("harmonic drift is -2x") {
    const Grid g = build_grid({{-8.0, 8.0}}, 801);
    const auto W = TrapPotential::quadratic({1.0});
    const auto d = ground_state_drift(ground(W, g), W);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        if (std::abs(x) <= 2.0) CHECK(std::abs(d.at_node(i)[0] + 2.0 * x) < 1e-3);
    }
    const double o = 0.0;
    CHECK(std::abs(d({&o, 1})[0]) < 1e-9);
}

TEST_CASE("hard-wall drift is 2 cot x") {
    const Grid g = build_grid({{0.0, kPi}}, 401);
    const auto W = TrapPotential::hard_wall({{0.0, kPi}});
    const auto d = ground_state_drift(ground(W, g), W);
    CHECK(d.hard_wall);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        if (x >= 0.3 && x <= kPi - 0.3) CHECK(std::abs(d.at_node(i)[0] - 2.0 / std::tan(x)) < 1e-2);
    }
}

TEST_CASE("SDE with zero steps returns the initial histogram") {
    const Grid g = build_grid({{-5.0, 5.0}}, 41);
    const auto W = TrapPotential::quadratic({1.0});
    const auto d = ground_state_drift(ground(W, g), W);
    const auto r = simulate_ergodic_sde(d, DiscreteMeasure::point_mass(g, 17), 0.0, 0.01, 1);
    CHECK(r.steps == 0);
    CHECK(r.occupation.mass(17) == doctest::Approx(1.0));
}

TEST_CASE("SDE rejects a step above h^2/4") {
    const Grid g = build_grid({{-5.0, 5.0}}, 41);
    const auto W = TrapPotential::quadratic({1.0});
    const auto d = ground_state_drift(ground(W, g), W);
    CHECK_THROWS_AS(simulate_ergodic_sde(d, DiscreteMeasure::point_mass(g, 20), 1.0, 0.1, 1), std::invalid_argument);
}

TEST_CASE("harmonic SDE occupation approaches phi^2") {
    const Grid g = build_grid({{-5.0, 5.0}}, 41);
    const auto W = TrapPotential::quadratic({1.0});
    const auto phi = ground(W, g);
    const auto d = ground_state_drift(phi, W);
    const double h = g.spacing(0);
    const auto r = simulate_ergodic_sde(d, DiscreteMeasure::point_mass(g, 20), 20000.0, h * h / 4, 7);
    CHECK(l1_distance(r.occupation, phi.density()) < 0.03);
    CHECK_FALSE(r.rejection_flag);
}

TEST_CASE("Girsanov density examples") {
    const Grid g = build_grid({{-5.0, 5.0}}, 101);
    const auto phi = ground(TrapPotential::quadratic({1.0}), g);
    const auto flat = TrapPotential::constant(0.7, 1);
    CHECK(girsanov_density(constant_path(0.3, 1.0, 16), 0.7, phi, flat) == doctest::Approx(1.0).epsilon(1e-14));
    Rng rng = make_stream(2, 0);
    const double x = 0.5;
    for (int t = 0; t < 20; ++t) {
        const auto p = sample_free_path({&x, 1}, 0.5, 32, rng);
        CHECK(girsanov_density(p, 1.0, phi, TrapPotential::quadratic({1.0})) > 0.0);
    }
    const double edge = 0.0;
    const Grid w = build_grid({{0.0, kPi}}, 41);
    const auto wall = TrapPotential::hard_wall({{0.0, kPi}});
    CHECK_THROWS_AS(girsanov_log_density(constant_path(edge, 1.0, 4), 1.0, ground(wall, w), wall), std::domain_error);
}

TEST_CASE("martingale normalization") {
    const Grid g = build_grid({{-6.0, 6.0}}, 241);
    const auto W = TrapPotential::quadratic({1.0});
    const auto phi = ground(W, g);
    const double x = 0.0;
    const auto tiny = martingale_check({&x, 1}, 1e-4, phi.lambda, phi, W, 2000, 3, 10);
    CHECK(std::abs(tiny.mean - 1.0) < 1e-3);
    const auto ok = martingale_check({&x, 1}, 1.0, phi.lambda, phi, W, 20000, 4, 100);
    CHECK(std::abs(ok.mean - 1.0) < 4 * ok.std_error);
    const auto wrong = martingale_check({&x, 1}, 1.0, phi.lambda + 0.5, phi, W, 20000, 4, 100);
    CHECK(std::abs(wrong.mean - 1.0) > 10 * wrong.std_error);
    CHECK(wrong.mean == doctest::Approx(std::exp(0.5) * ok.mean).epsilon(1e-9));
}

TEST_CASE("Schrodinger process sampler") {
    const Grid g = build_grid({{-5.0, 5.0}}, 101);
    const Grid bins = build_grid({{-5.0, 5.0}}, 21);
    const auto W = TrapPotential::quadratic({1.0});
    const double beta = 1.0;
    const std::size_t M = 32;
    const FKKernel K = fk_kernel_grid(W, beta, g);
    const auto sol = solve_symmetric_problem(K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(g));
    const auto s = schrodinger_process_sampler(sol.q_star, K, W, beta, M, 20000, 5);
    REQUIRE(s.paths.size() == 20000);
    CHECK_FALSE(s.low_ess_flag);

    const auto target = rebin(marginals(sol.q_star).first, bins);
    CHECK(measure_distance(path_marginal(s.paths, bins, 0), target).total_variation < 0.05);
    // ground-state diffusion started in phi^2 stays there
    CHECK(measure_distance(path_marginal(s.paths, bins, M / 2), target).total_variation < 0.05);
    CHECK(measure_distance(path_marginal(s.paths, bins, M), target).total_variation < 0.05);

    const auto joint = path_pair_marginal(s.paths, bins, 0, M);
    CHECK(total_variation(joint, joint.transposed()) < 0.05);
}
