#include "symbridge/simd/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>

namespace symbridge::simd::detail {
namespace {

double dot_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale_neon(double a, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void hadamard_neon(const double* x, const double* y, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    for (; i < n; ++i) out[i] = x[i] * y[i];
}

double sum_neon(const double* x, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vaddq_f64(acc0, vld1q_f64(x + i));
        acc1 = vaddq_f64(acc1, vld1q_f64(x + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i];
    return acc;
}

double max_abs_diff_neon(const double* x, const double* y, std::size_t n) {
    float64x2_t m = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(x + i), vld1q_f64(y + i)));
    double out = vmaxvq_f64(m);
    for (; i < n; ++i) out = std::fmax(out, std::fabs(x[i] - y[i]));
    return out;
}

void gemv_neon(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(a + r * cols, x, cols);
}

}  // namespace

const KernelTable* neon_table() noexcept {
    static const KernelTable table{dot_neon, axpy_neon,         scale_neon, hadamard_neon,
                                   sum_neon, max_abs_diff_neon, gemv_neon};
    return &table;
}

}  // namespace symbridge::simd::detail

#else

namespace symbridge::simd::detail {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace symbridge::simd::detail

#endif
