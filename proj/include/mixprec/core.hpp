#pragma once

// Precision-tagged dense/sparse storage and the level-1/level-2 kernels shared
// by the direct and Krylov solvers. "Low" precision is float, "high" is double.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "mixprec/error.hpp"

namespace mixprec {

using Low = float;
using High = double;

/// Unit roundoff u = eps/2 of a floating-point type (2^-24 for float, 2^-53 for double).
template <std::floating_point T>
constexpr double unit_roundoff() noexcept {
  return static_cast<double>(std::numeric_limits<T>::epsilon()) / 2.0;
}

/// The (eps_s, eps_d) unit-roundoff pair of a mixed algorithm.
class PrecisionPair {
 public:
  PrecisionPair(double eps_low, double eps_high) : eps_s_(eps_low), eps_d_(eps_high) {
    if (!(eps_high > 0.0 && eps_high < eps_low && eps_low < 1.0)) {
      throw InvalidArgument("precision pair requires 0 < eps_d < eps_s < 1");
    }
  }

  static PrecisionPair single_double() noexcept {
    return PrecisionPair(unit_roundoff<float>(), unit_roundoff<double>(), Unchecked{});
  }

  double eps_s() const noexcept { return eps_s_; }
  double eps_d() const noexcept { return eps_d_; }

 private:
  struct Unchecked {};
  PrecisionPair(double s, double d, Unchecked) noexcept : eps_s_(s), eps_d_(d) {}

  double eps_s_;
  double eps_d_;
};

namespace detail {
template <typename It>
void require_finite(It first, It last, const char* what) {
  for (auto it = first; it != last; ++it) {
    if (!std::isfinite(*it)) throw InvariantViolation(std::string(what) + ": non-finite entry");
  }
}
}  // namespace detail

template <std::floating_point T>
class Vector {
 public:
  using value_type = T;

  Vector() = default;
  explicit Vector(std::size_t n, T fill = T{0}) : data_(n, fill) {
    detail::require_finite(&fill, &fill + 1, "Vector");
  }
  explicit Vector(std::vector<T> data) : data_(std::move(data)) {
    detail::require_finite(data_.begin(), data_.end(), "Vector");
  }
  Vector(std::initializer_list<T> init) : Vector(std::vector<T>(init)) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> span() noexcept { return data_; }
  std::span<const T> span() const noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  std::size_t bytes() const noexcept { return data_.size() * sizeof(T); }

  friend bool operator==(const Vector&, const Vector&) = default;

 private:
  std::vector<T> data_;
};

/// Dense column-major matrix.
template <std::floating_point T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> column_major)
      : rows_(rows), cols_(cols), data_(std::move(column_major)) {
    if (data_.size() != rows_ * cols_) {
      throw InvariantViolation("DenseMatrix: data length does not match rows*cols");
    }
    detail::require_finite(data_.begin(), data_.end(), "DenseMatrix");
  }

  /// Row-wise literal, convenient for small fixed matrices.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    std::vector<T> data(m * n);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n) throw InvariantViolation("DenseMatrix: ragged row literal");
      std::size_t j = 0;
      for (T v : row) data[j++ * m + i] = v;
      ++i;
    }
    return DenseMatrix(m, n, std::move(data));
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = T{1};
    return a;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<T> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const T> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  std::size_t bytes() const noexcept { return data_.size() * sizeof(T); }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <std::floating_point T>
struct Triplet {
  std::size_t row;
  std::size_t col;
  T value;
};

/// Compressed sparse row matrix with strictly increasing column indices per row.
template <std::floating_point T>
class CsrMatrix {
 public:
  using value_type = T;

  CsrMatrix() : row_ptr_{0} {}

  /// Validating constructor; throws InvariantViolation on any structural defect.
  CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<T> values);

  /// Builds from unordered coordinates; duplicates are summed.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet<T>> entries);
  static CsrMatrix from_dense(const DenseMatrix<T>& a);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool square() const noexcept { return rows_ == cols_; }

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
  std::span<const T> values() const noexcept { return values_; }

  DenseMatrix<T> to_dense() const;

  std::size_t bytes() const noexcept {
    return values_.size() * sizeof(T) + (col_idx_.size() + row_ptr_.size()) * sizeof(std::size_t);
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<T> values_;
};

/// Row permutation stored as a LAPACK-style sequential pivot list: at step k
/// rows k and pivot[k] were swapped.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> pivot);
  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return pivot_.size(); }
  std::span<const std::size_t> pivots() const noexcept { return pivot_; }
  /// map()[i] is the original row that ends up in position i of P*A.
  std::span<const std::size_t> map() const noexcept { return map_; }

  /// In-place y <- P*y.
  template <std::floating_point T>
  void apply(std::span<T> y) const {
    for (std::size_t k = 0; k < pivot_.size(); ++k) {
      if (pivot_[k] != k) std::swap(y[k], y[pivot_[k]]);
    }
  }

  bool is_identity() const noexcept;

 private:
  std::vector<std::size_t> pivot_;
  std::vector<std::size_t> map_;
};

// Conversion between precisions. demote rounds to nearest and throws
// OverflowOnDemotion when an entry exceeds the float range; promote is exact.
DenseMatrix<Low> demote(const DenseMatrix<High>& a);
CsrMatrix<Low> demote(const CsrMatrix<High>& a);
Vector<Low> demote(const Vector<High>& x);
DenseMatrix<High> promote(const DenseMatrix<Low>& a);
CsrMatrix<High> promote(const CsrMatrix<Low>& a);
Vector<High> promote(const Vector<Low>& x);

template <std::floating_point T>
Vector<T> matvec(const DenseMatrix<T>& a, const Vector<T>& x);
template <std::floating_point T>
Vector<T> matvec(const CsrMatrix<T>& a, const Vector<T>& x);
template <std::floating_point T>
Vector<T> matvec_transpose(const DenseMatrix<T>& a, const Vector<T>& x);
template <std::floating_point T>
Vector<T> matvec_transpose(const CsrMatrix<T>& a, const Vector<T>& x);

/// Euclidean norm with scaled accumulation; always accumulates in double.
template <std::floating_point T>
double norm2(std::span<const T> x);
template <std::floating_point T>
double norm2(const Vector<T>& x) {
  return norm2(x.span());
}

template <std::floating_point T>
T dot(std::span<const T> x, std::span<const T> y);

/// y <- y + alpha*x
template <std::floating_point T>
void axpy(T alpha, std::span<const std::type_identity_t<T>> x, std::span<T> y);

template <std::floating_point T>
void scale(T alpha, std::span<T> x);

template <std::floating_point T>
double norm_inf(const DenseMatrix<T>& a);

/// Power-iteration estimate of ||A||_2 via A^T A products from a seeded random
/// start. Nondecreasing in iters; returns 0 for a zero matrix.
double spectral_norm_estimate(const DenseMatrix<High>& a, std::size_t iters = 50, std::uint64_t seed = 0);
double spectral_norm_estimate(const CsrMatrix<High>& a, std::size_t iters = 50, std::uint64_t seed = 0);

/// Anything the Krylov solvers can multiply by.
template <typename Op>
concept LinearOperator = requires(const Op& a, const Vector<typename Op::value_type>& x) {
  typename Op::value_type;
  { a.rows() } -> std::convertible_to<std::size_t>;
  { a.cols() } -> std::convertible_to<std::size_t>;
  { matvec(a, x) } -> std::same_as<Vector<typename Op::value_type>>;
  { a.bytes() } -> std::convertible_to<std::size_t>;
};

}  // namespace mixprec
