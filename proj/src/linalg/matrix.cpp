#include "symbridge/linalg/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "symbridge/simd/kernels.hpp"

namespace symbridge::linalg {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
}

double Matrix::sum() const { return simd::kernels().sum(data_.data(), data_.size()); }

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::fmax(m, std::fabs(v));
    return m;
}

Matrix& Matrix::operator*=(double a) {
    simd::kernels().scale(a, data_.data(), data_.size());
    return *this;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
    const auto& k = simd::kernels();
    Matrix c(a.rows(), b.cols());
    // i-k-j order streams rows of b through axpy.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out = c.row(i).data();
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double aip = a(i, p);
            if (aip != 0.0) k.axpy(aip, b.row(p).data(), out, b.cols());
        }
    }
    return c;
}

std::vector<double> apply(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw std::invalid_argument("apply: dimension mismatch");
    std::vector<double> y(a.rows());
    simd::kernels().gemv(a.data().data(), a.rows(), a.cols(), x.data(), y.data());
    return y;
}

Matrix power(const Matrix& a, std::size_t k) {
    if (!a.square()) throw std::invalid_argument("power: matrix must be square");
    if (k == 0) return Matrix::identity(a.rows());
    Matrix result;
    bool have_result = false;
    Matrix base = a;
    while (k > 0) {
        if (k & 1u) {
            result = have_result ? multiply(result, base) : base;
            have_result = true;
        }
        k >>= 1u;
        if (k > 0) base = multiply(base, base);
    }
    return result;
}

Matrix symmetrized(const Matrix& a) {
    if (!a.square()) throw std::invalid_argument("symmetrized: matrix must be square");
    Matrix s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("max_abs_diff: shape mismatch");
    return simd::kernels().max_abs_diff(a.data().data(), b.data().data(), a.data().size());
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: length mismatch");
    return simd::kernels().dot(x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) { return simd::kernels().sum(x.data(), x.size()); }

}  // namespace symbridge::linalg
