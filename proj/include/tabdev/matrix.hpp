#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tabdev/error.hpp"

namespace tabdev {

/// Dense row-major matrix of doubles.
///
/// Doubles as the sample container: each row is one observation vector,
/// each column one coordinate.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DomainError("matrix data size does not match its shape");
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  /// Copy of rows [first, last).
  Matrix slice_rows(std::size_t first, std::size_t last) const {
    if (first > last || last > rows_) throw DomainError("row slice out of range");
    return Matrix(last - first, cols_,
                  std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                                      data_.begin() + static_cast<std::ptrdiff_t>(last * cols_)));
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// T observations x n coordinates.
using SampleMatrix = Matrix;

inline double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline std::vector<double> column_means(const Matrix& m) {
  std::vector<double> mean(m.cols(), 0.0);
  if (m.rows() == 0) return mean;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += r[j];
  }
  const double inv = 1.0 / static_cast<double>(m.rows());
  for (double& v : mean) v *= inv;
  return mean;
}

/// Returns m with `v` subtracted from every row.
inline Matrix subtract_from_rows(Matrix m, std::span<const double> v) {
  if (v.size() != m.cols()) throw DomainError("reference vector length does not match dimension");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] -= v[j];
  }
  return m;
}

inline bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

/// x' A x for square A.
inline double quadratic_form(std::span<const double> x, const Matrix& a) {
  assert(a.rows() == x.size() && a.cols() == x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) acc += x[i] * dot(a.row(i), x);
  return acc;
}

/// Tr(A B) for symmetric A and B, as the Frobenius inner product sum_ij A_ij B_ij.
inline double trace_of_product(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  return dot(a.data(), b.data());
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("matrix shape mismatch");
  Matrix out = a;
  auto o = out.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return out;
}

/// Entry-wise division by a scalar.
inline Matrix divided(const Matrix& a, double divisor) {
  Matrix out = a;
  for (double& v : out.data()) v /= divisor;
  return out;
}

}  // namespace tabdev
