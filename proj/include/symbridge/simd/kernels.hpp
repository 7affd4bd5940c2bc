#pragma once

// Data-parallel double-precision kernels with scalar, AVX2 and NEON variants.
// The active variant is chosen once at startup from CPU features and may be
// overridden through SYMBRIDGE_SIMD=scalar|avx2|neon or set_isa().

#include <cstddef>
#include <string_view>

namespace symbridge::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    void (*scale)(double a, double* x, std::size_t n);
    // out[i] = x[i] * y[i]
    void (*hadamard)(const double* x, const double* y, double* out, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*max_abs_diff)(const double* x, const double* y, std::size_t n);
    // y = A x for row-major A (rows x cols)
    void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
};

bool isa_available(Isa isa) noexcept;
Isa active_isa() noexcept;
// Throws std::invalid_argument if the variant is not available on this host.
void set_isa(Isa isa);
std::string_view isa_name(Isa isa) noexcept;

const KernelTable& kernels() noexcept;
const KernelTable& kernels(Isa isa);

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;
}  // namespace detail

}  // namespace symbridge::simd
