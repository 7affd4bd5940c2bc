#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "symbridge/bridge/bridge.hpp"
#include "symbridge/bridge/fk_kernel.hpp"
#include "symbridge/bridge/potential.hpp"
#include "symbridge/common/rng.hpp"

using namespace symbridge;

namespace {

constexpr double kPi = std::numbers::pi;

// Killed heat kernel on [0, pi] by its sine expansion.
double sine_series(double x, double y, double t) {
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) s += std::sin(k * x) * std::sin(k * y) * std::exp(-double(k) * k * t);
    return 2.0 / kPi * s;
}

}  // namespace

TEST_CASE("gauss_kernel values") {
    const double o = 0.0;
    CHECK(gauss_kernel({&o, 1}, {&o, 1}, 1.0) == doctest::Approx(0.28209479177387814).epsilon(1e-14));
    const double a[2] = {0.0, 0.0}, b[2] = {1.0, -1.0};
    // 2d: (4 pi)^-1 e^{-2/4}
    CHECK(gauss_kernel(a, b, 1.0) == doctest::Approx(std::exp(-0.5) / (4 * kPi)).epsilon(1e-14));
    CHECK(log_gauss_kernel(a, b, 1.0) == doctest::Approx(std::log(gauss_kernel(a, b, 1.0))).epsilon(1e-14));
}

TEST_CASE("gauss_kernel integrates to one and decays") {
    const double x = 0.3;
    for (double beta : {0.1, 1.0, 3.0}) {
        double s = 0.0;
        const double h = 1e-3;
        for (double y = -40; y <= 40; y += h) s += gauss_kernel({&x, 1}, {&y, 1}, beta) * h;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
        double prev = gauss_kernel({&x, 1}, {&x, 1}, beta);
        for (double r = 0.5; r < 5; r += 0.5) {
            const double y = x + r;
            const double v = gauss_kernel({&x, 1}, {&y, 1}, beta);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("bridge midpoint has mean 0 and variance beta/2") {
    Rng rng = make_stream(11, 0);
    const double o = 0.0;
    const std::size_t n = 100000;
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = sample_bridge({&o, 1}, {&o, 1}, 1.0, 8, rng);
        const double m = p.position(4)[0];
        s += m;
        s2 += m * m;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    // sd of the mean is sqrt(0.5/n); sd of the sample variance is about 0.5 sqrt(2/n)
    CHECK(std::abs(mean) < 4 * std::sqrt(0.5 / n));
    CHECK(std::abs(var - 0.5) < 4 * 0.5 * std::sqrt(2.0 / n));
}

TEST_CASE("bridge endpoints are pinned") {
    Rng rng = make_stream(12, 0);
    const double x[2] = {0.1, -0.2}, y[2] = {1.5, 2.5};
    for (std::size_t M : {1u, 2u, 17u}) {
        const auto p = sample_bridge(x, y, 0.7, M, rng);
        REQUIRE(p.steps() == M);
        CHECK(p.position(0)[0] == x[0]);
        CHECK(p.position(0)[1] == x[1]);
        CHECK(p.position(M)[0] == y[0]);
        CHECK(p.position(M)[1] == y[1]);
        CHECK(p.times.back() == 0.7);
        CHECK(p.log_weight == 0.0);
    }
}

TEST_CASE("Feynman-Kac weight examples") {
    Rng rng = make_stream(13, 0);
    const double x = 0.5, y = 1.0;
    const auto p = sample_bridge({&x, 1}, {&y, 1}, 2.0, 16, rng);
    CHECK(feynman_kac_weight(p, TrapPotential::constant(0.0, 1)) == 1.0);
    CHECK(feynman_kac_weight(p, TrapPotential::constant(0.3, 1)) == doctest::Approx(std::exp(-0.6)).epsilon(1e-14));

    PathSample out = p;
    out.position(8)[0] = 5.0;
    const auto wall = TrapPotential::hard_wall({{0.0, kPi}});
    CHECK(feynman_kac_weight(out, wall) == 0.0);
    CHECK(std::isinf(wall_survival_log(out, {{0.0, kPi}})));
    PathSample in = p;
    for (std::size_t k = 0; k <= in.steps(); ++k) in.position(k)[0] = 1.5;
    CHECK(feynman_kac_weight(in, wall) == 1.0);
    const double ls = wall_survival_log(in, {{0.0, kPi}});
    // 16 steps of delta = 1/8, each crossing a face with probability exp(-d^2 / delta)
    const double d1 = 1.5, d2 = kPi - 1.5;
    CHECK(ls == doctest::Approx(16 * (std::log1p(-std::exp(-d1 * d1 * 8)) + std::log1p(-std::exp(-d2 * d2 * 8))))
                    .epsilon(1e-12));
}

TEST_CASE("bridge_fk_mc examples") {
    const double x = 0.0, y = 0.5;
    const auto zero = bridge_fk_mc({&x, 1}, {&y, 1}, 1.0, TrapPotential::constant(0.0, 1), 100, 1);
    CHECK(zero.mean == 1.0);
    CHECK(zero.std_error == 0.0);
    CHECK(zero.n == 100);
    const auto c = bridge_fk_mc({&x, 1}, {&y, 1}, 1.5, TrapPotential::constant(2.0, 1), 50, 1);
    CHECK(c.mean == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
    CHECK_THROWS_AS(bridge_fk_mc({&x, 1}, {&y, 1}, 1.0, TrapPotential::constant(0.0, 1), 0, 1), std::invalid_argument);
}

TEST_CASE("bridge_fk_mc does not depend on the thread count") {
    const double x = 0.2, y = -0.4;
    const auto W = TrapPotential::quadratic({1.0});
    const auto a = bridge_fk_mc({&x, 1}, {&y, 1}, 0.5, W, 5000, 9, 32, Exec{1, 512});
    const auto b = bridge_fk_mc({&x, 1}, {&y, 1}, 0.5, W, 5000, 9, 32, Exec{4, 512});
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("grid kernel agrees with Monte Carlo bridges") {
    const Grid g = build_grid({{-4.0, 4.0}}, 161);
    const auto W = TrapPotential::quadratic({1.0});
    const double beta = 0.5;
    const FKKernel K = fk_kernel_grid(W, beta, g);
    Rng pick = make_stream(77, 0);
    std::uniform_int_distribution<std::size_t> node(40, 120);
    for (int t = 0; t < 20; ++t) {
        const std::size_t i = node(pick), j = node(pick);
        const double x = g.coordinate(0, i), y = g.coordinate(0, j);
        const auto mc = bridge_fk_mc({&x, 1}, {&y, 1}, beta, W, 20000, 1000 + t, 64);
        const double p = gauss_kernel({&x, 1}, {&y, 1}, beta);
        CHECK(std::abs(K.matrix(i, j) - p * mc.mean) <= 4 * p * mc.std_error + 0.01 * K.matrix(i, j));
    }
}

TEST_CASE("free kernel reproduces the Gaussian") {
    const Grid g = build_grid({{-5.0, 5.0}}, 201);
    const double beta = 0.5;
    const FKKernel K = fk_kernel_grid(TrapPotential::constant(0.0, 1), beta, g);
    CHECK_FALSE(K.coarse_warning);
    double worst = 0.0;
    for (std::size_t i = 80; i <= 120; ++i)
        for (std::size_t j = 80; j <= 120; ++j) {
            const double x = g.coordinate(0, i), y = g.coordinate(0, j);
            const double p = gauss_kernel({&x, 1}, {&y, 1}, beta);
            worst = std::max(worst, std::abs(K.matrix(i, j) / p - 1.0));
        }
    CHECK(worst < 1e-3);
}

TEST_CASE("hard-wall kernel matches the sine series") {
    const Grid g = build_grid({{0.0, kPi}}, 101);
    const FKKernel K = fk_kernel_grid(TrapPotential::hard_wall({{0.0, kPi}}), 1.0, g, 200);
    double worst = 0.0;
    for (std::size_t i = 10; i <= 90; ++i)
        for (std::size_t j = 10; j <= 90; ++j) {
            const double ref = sine_series(g.coordinate(0, i), g.coordinate(0, j), 1.0);
            worst = std::max(worst, std::abs(K.matrix(i, j) - ref) / ref);
        }
    CHECK(worst < 0.02);
    // sin x sin y e^{-1} dominates; its coefficient at the centre
    CHECK(K.matrix(50, 50) == doctest::Approx(sine_series(kPi / 2, kPi / 2, 1.0)).epsilon(0.02));
    CHECK(sine_series(kPi / 2, kPi / 2, 1.0) == doctest::Approx(2.0 / kPi * std::exp(-1.0)).epsilon(0.02));
    for (std::size_t j = 0; j < g.size(); ++j) {
        CHECK(K.matrix(0, j) == 0.0);
        CHECK(K.matrix(100, j) == 0.0);
    }
}

TEST_CASE("dirichlet_heat_kernel_1d agrees with the sine series") {
    const Interval box{0.0, kPi};
    for (double t : {0.05, 0.3, 1.0, 4.0})
        for (double x : {0.1, 1.0, 2.0, 3.0})
            for (double y : {0.3, 1.5, 2.9}) {
                CHECK(dirichlet_heat_kernel_1d(x, y, t, box) ==
                      doctest::Approx(sine_series(x, y, t)).epsilon(1e-9).scale(1e-3));
            }
    CHECK(dirichlet_heat_kernel_1d(0.0, 1.0, 0.5, box) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("grid kernel is symmetric and dominated by the free kernel") {
    const Grid g = build_grid({{-3.0, 3.0}}, 61);
    const auto W = TrapPotential::quadratic({0.5}, {0.2}, 0.1);
    const FKKernel K = fk_kernel_grid(W, 0.8, g);
    const FKKernel F = fk_kernel_grid(TrapPotential::constant(0.0, 1), 0.8, g, K.steps);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) {
            CHECK(K.matrix(i, j) == K.matrix(j, i));
            CHECK(K.matrix(i, j) >= 0.0);
            CHECK(K.matrix(i, j) <= F.matrix(i, j) * (1 + 1e-12));
        }
}

TEST_CASE("Chapman-Kolmogorov on the grid") {
    const Grid g = build_grid({{-3.0, 3.0}}, 61);
    const auto W = TrapPotential::quadratic({1.0});
    const FKKernel half = fk_kernel_grid(W, 0.5, g, 150);
    const FKKernel full = fk_kernel_grid(W, 1.0, g, 300);
    const auto sq = linalg::multiply(half.weighted(), half.weighted());
    const auto fw = full.weighted();
    CHECK(linalg::max_abs_diff(sq, fw) <= 1e-10 * fw.max_abs());
}

TEST_CASE("default_steps") {
    const Grid g = build_grid({{0.0, 1.0}}, 11);
    CHECK(default_steps(0.5, g) == 100);
    CHECK(default_steps(2.0, g) == 200);
    CHECK(default_steps(1e6, g) == 10000);
}

TEST_CASE("kernel file round trip") {
    const Grid g = build_grid({{0.0, kPi}}, 21);
    const FKKernel K = fk_kernel_grid(TrapPotential::hard_wall({{0.0, kPi}}), 0.3, g);
    const auto path = std::filesystem::temp_directory_path() / "symbridge_kernel_roundtrip.csv";
    write_kernel(path, K);
    const FKKernel back = read_kernel(path);
    std::filesystem::remove(path);
    CHECK(back.grid == K.grid);
    CHECK(back.beta == K.beta);
    CHECK(back.steps == K.steps);
    CHECK(back.matrix == K.matrix);
}

TEST_CASE("potential evaluation") {
    const auto wall = TrapPotential::hard_wall({{0.0, 1.0}}, 0.25);
    double x = 0.5;
    CHECK(wall({&x, 1}) == 0.25);
    x = 1.5;
    CHECK(std::isinf(wall({&x, 1})));
    CHECK(wall.confining());
    CHECK_FALSE(TrapPotential::constant(1.0, 1).confining());
    const auto q = TrapPotential::quadratic({2.0}, {1.0}, 0.5);
    x = 3.0;
    CHECK(q({&x, 1}) == 0.5 + 2.0 * 4.0);
    CHECK(q.shifted(1.0)({&x, 1}) == 9.5);
    CHECK_THROWS(TrapPotential::quadratic({-1.0}));
}
