#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/common/error.hpp"
#include "symbridge/transport/sinkhorn.hpp"
#include "symbridge/transport/t_operator.hpp"

using namespace symbridge;

namespace {

constexpr double kPi = std::numbers::pi;

double sine_series(double x, double y, double t) {
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) s += std::sin(k * x) * std::sin(k * y) * std::exp(-double(k) * k * t);
    return 2.0 / kPi * s;
}

linalg::Matrix mass_weighted(const linalg::Matrix& k, const DiscreteMeasure& m) {
    linalg::Matrix out = k;
    for (std::size_t i = 0; i < k.rows(); ++i)
        for (std::size_t j = 0; j < k.cols(); ++j) out(i, j) *= m.mass(i) * m.mass(j);
    return out;
}

struct Setup {
    Grid grid;
    FKKernel K;
};

Setup harmonic(double beta = 1.0) {
    Grid g = build_grid({{-5.0, 5.0}}, 81);
    FKKernel K = fk_kernel_grid(TrapPotential::quadratic({1.0}), beta, g);
    return {g, std::move(K)};
}

Setup hard_wall(std::size_t n = 101) {
    Grid g = build_grid({{0.0, kPi}}, n);
    FKKernel K = fk_kernel_grid(TrapPotential::hard_wall({{0.0, kPi}}), 1.0, g);
    return {g, std::move(K)};
}

}  // namespace

TEST_CASE("T with Gaussian g and Lebesgue m is K h") {
    const auto s = harmonic();
    const auto T = build_T_operator(s.K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(s.grid));
    CHECK(linalg::max_abs_diff(T, s.K.weighted()) <= 1e-15 * T.max_abs());
}

TEST_CASE("free T has unit row sums away from the edges") {
    // |x| <= 1 sits 7 units from the killing edges
    const Grid g = build_grid({{-8.0, 8.0}}, 321);
    const FKKernel K = fk_kernel_grid(TrapPotential::constant(0.0, 1), 0.5, g);
    const auto T = build_T_operator(K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(g));
    for (std::size_t i = 140; i <= 180; ++i) CHECK(linalg::sum(T.row(i)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("hard-wall T vanishes on wall rows") {
    const auto s = hard_wall(41);
    const auto T = build_T_operator(s.K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(s.grid));
    CHECK(linalg::sum(T.row(0)) == 0.0);
    CHECK(linalg::sum(T.row(40)) == 0.0);
}

TEST_CASE("hard-wall Perron root is e^{-beta}") {
    const auto s = hard_wall();
    const auto sol = solve_symmetric_problem(s.K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(s.grid));
    CHECK(sol.lambda_T == doctest::Approx(std::exp(-1.0)).epsilon(0.01));
    for (std::size_t i = 1; i + 1 < s.grid.size(); ++i) CHECK(sol.phi_T[i] > 0.0);
}

TEST_CASE("scaling m scales lambda_T and leaves q* unchanged") {
    const auto s = harmonic();
    const auto leb = DiscreteMeasure::lebesgue(s.grid);
    const auto scaled = DiscreteMeasure(s.grid, std::vector<double>(s.grid.size(), 3.0), false);
    const auto a = solve_symmetric_problem(s.K, PairWeight::gaussian(), leb);
    const auto b = solve_symmetric_problem(s.K, PairWeight::gaussian(), scaled);
    CHECK(b.lambda_T == doctest::Approx(3.0 * a.lambda_T).epsilon(1e-10));
    CHECK(total_variation(a.q_star, b.q_star) < 1e-10);
    CHECK(b.objective - a.objective == doctest::Approx(-std::log(3.0)).epsilon(1e-9));
}

TEST_CASE("q* is a symmetric probability with equal marginals") {
    const auto s = harmonic();
    const auto sol = solve_symmetric_problem(s.K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(s.grid));
    CHECK(sol.q_star.total_mass() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.q_star.is_symmetric(1e-12));
    const auto [a, b] = marginals(sol.q_star);
    // each marginal is phi_T^2 m
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
        CHECK(a.mass(i) == doctest::Approx(b.mass(i)).epsilon(1e-12).scale(1e-14));
        CHECK(a.mass(i) == doctest::Approx(sol.phi_T[i] * sol.phi_T[i] * s.grid.cell_volume()).epsilon(1e-8).scale(1e-12));
    }
}

TEST_CASE("objective at q* is -log lambda_T") {
    for (const auto& s : {harmonic(), hard_wall(61)}) {
        const auto leb = DiscreteMeasure::lebesgue(s.grid);
        const auto sol = solve_symmetric_problem(s.K, PairWeight::gaussian(), leb);
        CHECK(sol.objective == doctest::Approx(-std::log(sol.lambda_T)).epsilon(1e-9));
        CHECK(schrodinger_objective(sol.q_star, leb, s.K, PairWeight::gaussian()) == sol.objective);
    }
}

TEST_CASE("symmetric probes do not beat q*") {
    const auto s = harmonic();
    const auto leb = DiscreteMeasure::lebesgue(s.grid);
    const auto sol = solve_symmetric_problem(s.K, PairWeight::gaussian(), leb);
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z(0.0, 1.0);
    for (double p : {0.02, 0.1, 0.5}) {
        linalg::Matrix probe = sol.q_star.masses();
        for (std::size_t i = 0; i < s.grid.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const double f = std::exp(p * z(rng));
                probe(i, j) *= f;
                if (i != j) probe(j, i) *= f;
            }
        probe *= 1.0 / probe.sum();
        const auto q = PairMeasure::from_masses(s.grid, probe);
        CHECK(schrodinger_objective(q, leb, s.K, PairWeight::gaussian()) > sol.objective);
    }
}

TEST_CASE("objective is infinite off the reference support") {
    const auto s = hard_wall(21);
    linalg::Matrix q(21, 21);
    q(0, 0) = 1.0;
    CHECK(std::isinf(schrodinger_objective(PairMeasure::from_masses(s.grid, q), DiscreteMeasure::lebesgue(s.grid), s.K,
                                           PairWeight::gaussian())));
}

TEST_CASE("Sinkhorn with a diagonal kernel returns the diagonal coupling") {
    const Grid g = build_grid({{0.0, 1.0}}, 6);
    const auto nu = DiscreteMeasure::normalized(g, {1, 2, 3, 4, 5, 6});
    const auto sol = sinkhorn_bridge(linalg::Matrix::identity(6), nu, nu);
    const auto q = sol.q_star.masses();
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) CHECK(q(i, j) == doctest::Approx(i == j ? nu.mass(i) : 0.0).epsilon(1e-12));
}

TEST_CASE("Sinkhorn matches the eigen route and has monotone IPFP errors") {
    const auto s = harmonic();
    const auto leb = DiscreteMeasure::lebesgue(s.grid);
    const auto eig = solve_symmetric_problem(s.K, PairWeight::gaussian(), leb);
    std::vector<double> d(s.grid.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = eig.phi_T[i] * eig.phi_T[i];
    const auto nu = DiscreteMeasure::normalized(s.grid, d);
    const auto keff = mass_weighted(effective_kernel(s.K, PairWeight::gaussian()), leb);
    const auto sk = sinkhorn_bridge(keff, nu, nu);
    CHECK(total_variation(sk.q_star, eig.q_star) < 1e-6);
    REQUIRE(sk.potentials.has_value());
    CHECK_FALSE(sk.potentials->damped);
    const auto& h = sk.potentials->error_history;
    for (std::size_t k = 1; k < h.size(); ++k) CHECK(h[k] <= h[k - 1] * (1 + 1e-12));
    CHECK(sk.potentials->marginal_error < 1e-10);
}

TEST_CASE("factorization check") {
    const auto s = harmonic();
    const auto leb = DiscreteMeasure::lebesgue(s.grid);
    const auto sol = solve_symmetric_problem(s.K, PairWeight::gaussian(), leb);
    const auto keff = mass_weighted(effective_kernel(s.K, PairWeight::gaussian()), leb);
    CHECK(factorization_check(sol.q_star, keff) < 1e-8);
    linalg::Matrix bad = sol.q_star.masses();
    bad(10, 20) *= 2.0;
    CHECK(factorization_check(PairMeasure::from_masses(s.grid, bad), keff) >= std::log(2.0) - 1e-9);
}

TEST_CASE("T eigenpair residual") {
    const auto s = harmonic();
    const auto leb = DiscreteMeasure::lebesgue(s.grid);
    const auto T = build_T_operator(s.K, PairWeight::gaussian(), leb);
    const auto ep = t_eigenpair(T, leb);
    CHECK(ep.residual < 1e-10);
    const auto Tphi = linalg::apply(T, ep.phi_T);
    for (std::size_t i = 0; i < Tphi.size(); ++i) CHECK(std::abs(Tphi[i] - ep.lambda_T * ep.phi_T[i]) < 1e-10);
    double norm = 0.0;
    for (std::size_t i = 0; i < Tphi.size(); ++i) norm += ep.phi_T[i] * ep.phi_T[i] * leb.mass(i);
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hard-wall q* is proportional to phi K phi") {
    // Oracle: phi_T -> sin and K -> the killed heat kernel by its sine expansion.
    const auto s = hard_wall(101);
    const auto sol = solve_symmetric_problem(s.K, PairWeight::gaussian(), DiscreteMeasure::lebesgue(s.grid));
    const std::size_t n = s.grid.size();
    linalg::Matrix oracle(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = s.grid.coordinate(0, i), y = s.grid.coordinate(0, j);
            oracle(i, j) = std::max(0.0, std::sin(x) * std::sin(y) * sine_series(x, y, 1.0));
        }
    oracle *= 1.0 / oracle.sum();
    CHECK(total_variation(sol.q_star, PairMeasure::from_masses(s.grid, oracle)) < 0.02);
}

TEST_CASE("Sinkhorn reports unreachable mass") {
    const Grid g = build_grid({{0.0, 1.0}}, 4);
    linalg::Matrix k(4, 4, 1.0);
    for (std::size_t j = 0; j < 4; ++j) k(0, j) = 0.0;
    const auto nu = DiscreteMeasure::normalized(g, {1, 1, 1, 1});
    CHECK_THROWS_AS(sinkhorn_bridge(k, nu, nu), SupportError);
}

TEST_CASE("pair weights") {
    const Grid g = build_grid({{0.0, 1.0}}, 3);
    CHECK(PairWeight::constant(2.0).on_grid(g, 1.0)(0, 2) == 2.0);
    CHECK(PairWeight::gaussian().is_gaussian());
    CHECK_THROWS(PairWeight::constant(0.0).on_grid(g, 1.0));
    const auto s = harmonic();
    // constant g = 1 divides the Gaussian out of K
    const auto e = effective_kernel(s.K, PairWeight::constant(1.0));
    const auto p = PairWeight::gaussian().on_grid(s.grid, 1.0);
    CHECK(e(40, 41) == doctest::Approx(s.K.matrix(40, 41) / p(40, 41)).epsilon(1e-14));
}
