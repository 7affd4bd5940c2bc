#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "symbridge/measure/csv.hpp"
#include "symbridge/measure/grid.hpp"
#include "symbridge/measure/measure.hpp"

using namespace symbridge;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_weights(std::size_t n, std::mt19937_64& rng, double zero_fraction = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(n);
    for (auto& x : w) x = u(rng) < zero_fraction ? 0.0 : u(rng) + 1e-3;
    return w;
}

PairMeasure random_pair(const Grid& g, std::mt19937_64& rng, bool symmetric) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    linalg::Matrix m(g.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t j = 0; j < g.size(); ++j) m(i, j) = u(rng);
    if (symmetric) m = linalg::symmetrized(m);
    m *= 1.0 / m.sum();
    return PairMeasure::from_masses(g, m);
}

}  // namespace

TEST_CASE("build_grid: five nodes on [0, pi]") {
    const Grid g = build_grid({{0.0, kPi}}, 5);
    REQUIRE(g.size() == 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(g.coordinate(0, k) == doctest::Approx(k * kPi / 4.0).epsilon(1e-15));
    CHECK(g.cell_volume() == doctest::Approx(kPi / 4.0));
}

TEST_CASE("build_grid: [0,1]^2 with n=3 is lexicographic") {
    const Grid g = build_grid({{0.0, 1.0}, {0.0, 1.0}}, 3);
    REQUIRE(g.size() == 9);
    // last axis fastest
    CHECK(g.node(1) == Point{0.0, 0.5});
    CHECK(g.node(3) == Point{0.5, 0.0});
    CHECK(g.node(8) == Point{1.0, 1.0});
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto mi = g.multi_index(i);
        CHECK(g.node_index(std::span<const std::size_t>(mi.data(), 2)) == i);
    }
}

TEST_CASE("build_grid: rejects n=1 and empty intervals") {
    CHECK_THROWS_AS(build_grid({{0.0, 1.0}}, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_grid({{1.0, 1.0}}, 5), std::invalid_argument);
}

TEST_CASE("nearest_node and interpolate") {
    const Grid g = build_grid({{-1.0, 1.0}}, 5);
    const double x = 0.24;
    CHECK(g.nearest_node(std::span<const double>(&x, 1)) == 2);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = 3.0 * g.coordinate(0, i) + 1.0;
    CHECK(interpolate(g, f, std::span<const double>(&x, 1)) == doctest::Approx(3.0 * x + 1.0));
    const double out = 2.0;
    CHECK(interpolate(g, f, std::span<const double>(&out, 1), -7.0) == -7.0);
}

TEST_CASE("relative_entropy examples") {
    const Grid g = build_grid({{0.0, 1.0}}, 2);  // 4 pair nodes
    linalg::Matrix q(2, 2), r(2, 2, 0.25);
    q(0, 0) = 0.5;
    q(1, 1) = 0.5;
    const PairMeasure Q = PairMeasure::from_masses(g, q);
    const PairMeasure R = PairMeasure::from_masses(g, r);
    CHECK(relative_entropy(R, R) == 0.0);
    CHECK(relative_entropy(Q, R) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(relative_entropy(R, Q)));
}

TEST_CASE("relative_entropy is nonnegative and vanishes only on equality") {
    std::mt19937_64 rng(3);
    const Grid g = build_grid({{0.0, 1.0}}, 7);
    for (int t = 0; t < 50; ++t) {
        const auto p = DiscreteMeasure::normalized(g, random_weights(g.size(), rng));
        const auto r = DiscreteMeasure::normalized(g, random_weights(g.size(), rng));
        CHECK(relative_entropy(p, r) > 0.0);
        CHECK(relative_entropy(p, p) == 0.0);
    }
}

TEST_CASE("marginals of a product are its factors") {
    std::mt19937_64 rng(5);
    const Grid g = build_grid({{0.0, 2.0}}, 9);
    const auto m = DiscreteMeasure::normalized(g, random_weights(g.size(), rng));
    const auto [a, b] = marginals(product_measure(m, m));
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(a.density(i) == doctest::Approx(m.density(i)).epsilon(1e-13));
        CHECK(b.density(i) == doctest::Approx(m.density(i)).epsilon(1e-13));
    }
}

TEST_CASE("marginals of symmetric pair measures agree") {
    std::mt19937_64 rng(7);
    for (std::size_t n : {3u, 8u, 25u}) {
        const Grid g = build_grid({{0.0, 1.0}}, n);
        const auto q = random_pair(g, rng, true);
        const auto [a, b] = marginals(q);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(a.density(i) - b.density(i)) <= 1e-12);
    }
}

TEST_CASE("measure_distance examples") {
    const Grid g = build_grid({{0.0, 1.0}}, 11);
    const auto p = DiscreteMeasure::point_mass(g, 4);
    const auto r = DiscreteMeasure::point_mass(g, 5);
    CHECK(measure_distance(p, p).total_variation == 0.0);
    const auto d = measure_distance(p, r);
    CHECK(d.total_variation == doctest::Approx(1.0));
    REQUIRE(d.wasserstein1.has_value());
    CHECK(*d.wasserstein1 == doctest::Approx(g.spacing(0)));
    CHECK_FALSE(measure_distance(DiscreteMeasure::point_mass(build_grid({{0, 1}, {0, 1}}, 3), 0),
                                 DiscreteMeasure::point_mass(build_grid({{0, 1}, {0, 1}}, 3), 1))
                     .wasserstein1.has_value());
}

TEST_CASE("measure_distance is symmetric and satisfies the triangle inequality") {
    std::mt19937_64 rng(9);
    const Grid g = build_grid({{-1.0, 1.0}}, 13);
    for (int t = 0; t < 100; ++t) {
        const auto a = DiscreteMeasure::normalized(g, random_weights(g.size(), rng, 0.3));
        const auto b = DiscreteMeasure::normalized(g, random_weights(g.size(), rng, 0.3));
        const auto c = DiscreteMeasure::normalized(g, random_weights(g.size(), rng, 0.3));
        const auto ab = measure_distance(a, b), ba = measure_distance(b, a);
        const auto bc = measure_distance(b, c), ac = measure_distance(a, c);
        CHECK(ab.total_variation == doctest::Approx(ba.total_variation));
        CHECK(*ab.wasserstein1 == doctest::Approx(*ba.wasserstein1));
        CHECK(ac.total_variation <= ab.total_variation + bc.total_variation + 1e-15);
        CHECK(*ac.wasserstein1 <= *ab.wasserstein1 + *bc.wasserstein1 + 1e-15);
    }
}

TEST_CASE("densities are stored against the volume element") {
    const Grid g = build_grid({{0.0, 1.0}}, 11);
    const auto a = DiscreteMeasure::normalized(g, std::vector<double>(g.size(), 1.0));
    CHECK(a.density(3) == doctest::Approx(1.0 / (11 * 0.1)));
    CHECK(a.mass(3) == doctest::Approx(1.0 / 11));
    CHECK(a.total_mass() == doctest::Approx(1.0));
    const Grid g2 = build_grid({{0.0, 1.0}, {0.0, 2.0}}, 3);
    CHECK(g2.cell_volume() == doctest::Approx(0.5));
}

TEST_CASE("invalid weights are rejected") {
    const Grid g = build_grid({{0.0, 1.0}}, 3);
    CHECK_THROWS_AS(DiscreteMeasure(g, {1.0, -1.0, 0.0}, false), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(g, {1.0, 1.0}, false), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure(g, {1.0, 1.0, 1.0}, true), std::invalid_argument);
    CHECK_THROWS_AS(DiscreteMeasure::normalized(g, {0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("measure CSV round trip is exact") {
    std::mt19937_64 rng(13);
    const Grid g = build_grid({{-2.0, 3.0}, {0.0, 1.0}}, 4);
    const auto m = DiscreteMeasure::normalized(g, random_weights(g.size(), rng));
    std::stringstream ss;
    csv::write_measure(ss, m, {{"note", "x"}});
    const auto back = csv::read_measure(ss);
    CHECK(back.grid() == g);
    CHECK(back.is_probability());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(back.density(i) == m.density(i));
}

TEST_CASE("matrix CSV round trip keeps metadata") {
    linalg::Matrix a(2, 3);
    a(0, 1) = 0.1;
    a(1, 2) = -1e-300;
    std::stringstream ss;
    csv::write_matrix(ss, a, {{"kind", "test"}});
    const auto f = csv::read_matrix(ss);
    CHECK(f.matrix == a);
    CHECK(csv::metadata_value(f.meta, "kind") == "test");
}

TEST_CASE("format_double is shortest round trip") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 123456789.0}) CHECK(csv::parse_double(csv::format_double(v)) == v);
    CHECK(csv::format_double(0.5) == "0.5");
}
