#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "symbridge/bridge/potential.hpp"
#include "symbridge/spectral/dv.hpp"
#include "symbridge/spectral/eigen.hpp"
#include "symbridge/spectral/hamiltonian.hpp"

using namespace symbridge;

namespace {

constexpr double kPi = std::numbers::pi;

SpectralResult ground(const TrapPotential& W, const Grid& g) {
    return principal_eigenpair(discretize_hamiltonian(W, g));
}

// Finite-difference Dirichlet eigenvalue of -d^2/dx^2 on [0, pi] with n nodes.
double discrete_sine_lambda(std::size_t n) {
    const double h = kPi / static_cast<double>(n - 1);
    return (2.0 - 2.0 * std::cos(h)) / (h * h);
}

}  // namespace

TEST_CASE("five-point stencil in 1d") {
    const Grid g = build_grid({{0.0, 4.0}}, 5);
    const auto op = discretize_hamiltonian(TrapPotential::quadratic({1.0}, {2.0}), g);
    REQUIRE(op.size() == 3);
    const auto A = op.matrix.dense();
    // W = 1, 0, 1 at x = 1, 2, 3
    CHECK(A(0, 0) == 3.0);
    CHECK(A(1, 1) == 2.0);
    CHECK(A(2, 2) == 3.0);
    CHECK(A(0, 1) == -1.0);
    CHECK(A(1, 2) == -1.0);
    CHECK(A(0, 2) == 0.0);
    CHECK(op.matrix.symmetric());
}

TEST_CASE("2d operator is symmetric with four neighbours") {
    const Grid g = build_grid({{0.0, 1.0}, {0.0, 2.0}}, 6);
    const auto op = discretize_hamiltonian(TrapPotential::quadratic({1.0, 0.5}), g);
    CHECK(op.size() == 16);
    CHECK(op.matrix.symmetric());
    const double hx = 0.2, hy = 0.4;
    const auto A = op.matrix.dense();
    const std::size_t c = op.active_index[g.node_index(std::vector<std::size_t>{2, 2})];
    CHECK(A(c, c) - op.potential[c] == doctest::Approx(2 / (hx * hx) + 2 / (hy * hy)));
}

TEST_CASE("hard wall eigenpair") {
    const Grid g = build_grid({{0.0, kPi}}, 201);
    const auto r = ground(TrapPotential::hard_wall({{0.0, kPi}}), g);
    CHECK(r.lambda == doctest::Approx(discrete_sine_lambda(201)).epsilon(1e-10));
    CHECK(std::abs(r.lambda - 1.0) < 1e-3);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        sup = std::max(sup, std::abs(r.phi[i] - std::sqrt(2.0 / kPi) * std::sin(g.coordinate(0, i))));
    CHECK(sup < 1e-3);
    CHECK(r.residual < 1e-8);
}

TEST_CASE("harmonic eigenpair") {
    const Grid g = build_grid({{-6.0, 6.0}}, 401);
    const auto r = ground(TrapPotential::quadratic({1.0}), g);
    CHECK(std::abs(r.lambda - 1.0) < 1e-3);
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.coordinate(0, i);
        sup = std::max(sup, std::abs(r.phi[i] - std::pow(kPi, -0.25) * std::exp(-x * x / 2)));
    }
    CHECK(sup < 1e-3);
}

TEST_CASE("2d hard wall eigenvalue is additive") {
    const Grid g = build_grid({{0.0, kPi}, {0.0, kPi}}, 41);
    const auto r = ground(TrapPotential::hard_wall({{0.0, kPi}, {0.0, kPi}}), g);
    CHECK(r.lambda == doctest::Approx(2 * discrete_sine_lambda(41)).epsilon(1e-9));
}

TEST_CASE("constant shift moves lambda by c") {
    const Grid g = build_grid({{-5.0, 5.0}}, 101);
    const auto a = ground(TrapPotential::quadratic({1.0}), g);
    const auto b = ground(TrapPotential::quadratic({1.0}, {}, 0.75), g);
    CHECK(b.lambda - a.lambda == doctest::Approx(0.75).epsilon(1e-10));
}

TEST_CASE("lambda is monotone in W") {
    const Grid g = build_grid({{-5.0, 5.0}}, 101);
    double prev = -1.0;
    for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double l = ground(TrapPotential::quadratic({a}), g).lambda;
        CHECK(l > prev);
        prev = l;
    }
}

TEST_CASE("refinement converges at second order") {
    const auto W = TrapPotential::hard_wall({{0.0, kPi}});
    std::vector<double> err;
    for (std::size_t n : {21u, 41u, 81u}) err.push_back(std::abs(ground(W, build_grid({{0.0, kPi}}, n)).lambda - 1.0));
    CHECK(std::log2(err[0] / err[1]) >= 1.8);
    CHECK(std::log2(err[1] / err[2]) >= 1.8);
}

TEST_CASE("ground state has no sign change") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    const Grid g = build_grid({{-3.0, 3.0}}, 61);
    for (int t = 0; t < 5; ++t) {
        std::vector<double> vals(g.size());
        for (auto& v : vals) v = u(rng);
        const auto r = ground(TrapPotential::tabulated(g, vals), g);
        for (std::size_t i = 1; i + 1 < g.size(); ++i) CHECK(r.phi[i] > 0.0);
    }
}

TEST_CASE("dv_rate at the ground state equals lambda") {
    const Grid g = build_grid({{-6.0, 6.0}}, 401);
    const auto W = TrapPotential::quadratic({1.0});
    const auto r = ground(W, g);
    const double rate = dv_rate(r.density(), W, g);
    CHECK(rate == doctest::Approx(r.lambda).epsilon(1e-9));
    CHECK(std::abs(rate - 1.0) < 2e-3);
}

TEST_CASE("dv_rate is infinite on the wall and bounded below by lambda") {
    // faces of the box fall on nodes 10 and 50
    const Grid g = build_grid({{-kPi / 4, 5 * kPi / 4}}, 61);
    const auto W = TrapPotential::hard_wall({{0.0, kPi}});
    CHECK(std::isinf(dv_rate(DiscreteMeasure::point_mass(g, 5), W, g)));
    CHECK(std::isinf(dv_rate(DiscreteMeasure::point_mass(g, 10), W, g)));
    const auto op = discretize_hamiltonian(W, g);
    const double lambda = principal_eigenpair(op).lambda;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> dens(g.size(), 0.0);
        for (std::size_t k : op.active_nodes) dens[k] = u(rng);
        const double rate = dv_rate(DiscreteMeasure::normalized(g, dens), W, g);
        CHECK(std::isfinite(rate));
        CHECK(rate >= lambda * (1 - 1e-12));
    }
}

TEST_CASE("Donsker-Varadhan duality") {
    const Grid g = build_grid({{-4.0, 4.0}}, 41);
    const auto W = TrapPotential::quadratic({1.0});
    const auto zero = dv_duality_check(std::vector<double>(g.size(), 0.0), W, g);
    CHECK(zero.gap < 1e-6);
    CHECK(zero.identity_gap < 1e-6);
    const auto shifted = dv_duality_check(std::vector<double>(g.size(), 0.3), W, g);
    CHECK(shifted.lambda_minus - zero.lambda_minus == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(shifted.sup_value - zero.sup_value == doctest::Approx(0.3).epsilon(1e-6));
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::sin(g.coordinate(0, i));
    const auto s = dv_duality_check(f, W, g);
    CHECK(s.gap < 1e-6);
}
