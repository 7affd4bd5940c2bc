#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace symbridge::linalg {

// Dense row-major matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transposed() const;
    double trace() const;
    double sum() const;
    double max_abs() const;

    Matrix& operator*=(double a);
    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> apply(const Matrix& a, std::span<const double> x);
// a^k by binary exponentiation; k >= 1.
Matrix power(const Matrix& a, std::size_t k);
Matrix symmetrized(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

double dot(std::span<const double> x, std::span<const double> y);
double sum(std::span<const double> x);

}  // namespace symbridge::linalg
