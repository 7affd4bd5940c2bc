#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "symbridge/simd/kernels.hpp"

using namespace symbridge::simd;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

std::vector<Isa> vector_isas() {
    std::vector<Isa> out;
    for (Isa i : {Isa::avx2, Isa::neon})
        if (isa_available(i)) out.push_back(i);
    return out;
}

// Reductions differ only by summation order.
double reduction_tol(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] * (y.empty() ? 1.0 : y[i]));
    return 8.0 * 2.2e-16 * (s + 1.0) * std::sqrt(static_cast<double>(x.size()) + 1.0);
}

}  // namespace

TEST_CASE("scalar table is always available and named") {
    CHECK(isa_available(Isa::scalar));
    CHECK(isa_name(Isa::scalar) == "scalar");
    CHECK(isa_name(Isa::avx2) == "avx2");
    CHECK(isa_name(Isa::neon) == "neon");
}

TEST_CASE("set_isa switches the active table and rejects missing variants") {
    const Isa before = active_isa();
    set_isa(Isa::scalar);
    CHECK(active_isa() == Isa::scalar);
    CHECK(&kernels() == &kernels(Isa::scalar));
    for (Isa i : {Isa::avx2, Isa::neon}) {
        if (!isa_available(i)) CHECK_THROWS_AS(set_isa(i), std::invalid_argument);
    }
    set_isa(before);
}

TEST_CASE("vector variants match the scalar reference") {
    const auto isas = vector_isas();
    if (isas.empty()) {
        MESSAGE("no vector variant on this host");
        return;
    }
    std::mt19937_64 rng(11);
    const KernelTable& ref = kernels(Isa::scalar);
    for (Isa isa : isas) {
        const KernelTable& k = kernels(isa);
        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 67u, 1001u}) {
            CAPTURE(n);
            const auto x = random_vec(n, rng);
            const auto y = random_vec(n, rng);

            CHECK(std::abs(k.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= reduction_tol(x, y));
            CHECK(std::abs(k.sum(x.data(), n) - ref.sum(x.data(), n)) <= reduction_tol(x, {}));
            CHECK(k.max_abs_diff(x.data(), y.data(), n) == ref.max_abs_diff(x.data(), y.data(), n));

            auto ya = y, yb = y;
            k.axpy(0.75, x.data(), ya.data(), n);
            ref.axpy(0.75, x.data(), yb.data(), n);
            // FMA rounds once, the scalar path twice.
            for (std::size_t i = 0; i < n; ++i)
                CHECK(std::abs(ya[i] - yb[i]) <= 4.4e-16 * (std::abs(y[i]) + std::abs(0.75 * x[i])));

            auto sa = x, sb = x;
            k.scale(-1.3, sa.data(), n);
            ref.scale(-1.3, sb.data(), n);
            CHECK(sa == sb);

            std::vector<double> ha(n), hb(n);
            k.hadamard(x.data(), y.data(), ha.data(), n);
            ref.hadamard(x.data(), y.data(), hb.data(), n);
            CHECK(ha == hb);
        }
        // gemv on a non-square matrix
        const std::size_t rows = 13, cols = 29;
        const auto a = random_vec(rows * cols, rng);
        const auto x = random_vec(cols, rng);
        std::vector<double> ya(rows), yb(rows);
        k.gemv(a.data(), rows, cols, x.data(), ya.data());
        ref.gemv(a.data(), rows, cols, x.data(), yb.data());
        for (std::size_t r = 0; r < rows; ++r) CHECK(ya[r] == doctest::Approx(yb[r]).epsilon(1e-13));
    }
}

TEST_CASE("max_abs_diff propagates the largest gap including tails") {
    for (const KernelTable* k : {&kernels(Isa::scalar), &kernels()}) {
        std::vector<double> x(11, 0.0), y(11, 0.0);
        y[10] = -3.5;
        y[2] = 1.0;
        CHECK(k->max_abs_diff(x.data(), y.data(), 11) == 3.5);
    }
}
