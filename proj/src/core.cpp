#include "mixprec/core.hpp"

#include <random>
#include <string>
#include <utility>

namespace mixprec {

template <std::floating_point T>
CsrMatrix<T>::CsrMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                        std::vector<std::size_t> col_idx, std::vector<T> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1) throw InvariantViolation("CsrMatrix: row_ptr must have rows+1 entries");
  if (row_ptr_.front() != 0) throw InvariantViolation("CsrMatrix: row_ptr[0] must be 0");
  if (col_idx_.size() != values_.size() || row_ptr_.back() != values_.size()) {
    throw InvariantViolation("CsrMatrix: row_ptr[rows], col_idx and values lengths disagree");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_ptr_[i] > row_ptr_[i + 1]) throw InvariantViolation("CsrMatrix: row_ptr decreases at row " + std::to_string(i));
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw InvariantViolation("CsrMatrix: column index out of range in row " + std::to_string(i));
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1]) {
        throw InvariantViolation("CsrMatrix: column indices not strictly increasing in row " + std::to_string(i));
      }
    }
  }
  detail::require_finite(values_.begin(), values_.end(), "CsrMatrix");
}

template <std::floating_point T>
CsrMatrix<T> CsrMatrix<T>::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet<T>> entries) {
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols) throw InvariantViolation("CsrMatrix: triplet index out of range");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet<T>& a, const Triplet<T>& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> row_ptr(rows + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<T> values;
  col_idx.reserve(entries.size());
  values.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    if (k > 0 && e.row == entries[k - 1].row && e.col == entries[k - 1].col) {
      values.back() += e.value;
      continue;
    }
    col_idx.push_back(e.col);
    values.push_back(e.value);
    ++row_ptr[e.row + 1];
  }
  for (std::size_t i = 0; i < rows; ++i) row_ptr[i + 1] += row_ptr[i];
  return CsrMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
}

template <std::floating_point T>
CsrMatrix<T> CsrMatrix<T>::from_dense(const DenseMatrix<T>& a) {
  std::vector<std::size_t> row_ptr(a.rows() + 1, 0);
  std::vector<std::size_t> col_idx;
  std::vector<T> values;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) != T{0}) {
        col_idx.push_back(j);
        values.push_back(a(i, j));
      }
    }
    row_ptr[i + 1] = values.size();
  }
  return CsrMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

template <std::floating_point T>
DenseMatrix<T> CsrMatrix<T>::to_dense() const {
  DenseMatrix<T> a(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) a(i, col_idx_[k]) = values_[k];
  }
  return a;
}

template class CsrMatrix<float>;
template class CsrMatrix<double>;

Permutation::Permutation(std::vector<std::size_t> pivot) : pivot_(std::move(pivot)), map_(pivot_.size()) {
  const std::size_t n = pivot_.size();
  for (std::size_t i = 0; i < n; ++i) map_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    if (pivot_[k] < k || pivot_[k] >= n) throw InvariantViolation("Permutation: pivot out of range");
    std::swap(map_[k], map_[pivot_[k]]);
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> pivot(n);
  for (std::size_t i = 0; i < n; ++i) pivot[i] = i;
  return Permutation(std::move(pivot));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t k = 0; k < pivot_.size(); ++k) {
    if (pivot_[k] != k) return false;
  }
  return true;
}

namespace {

std::vector<float> demote_values(std::span<const double> in) {
  constexpr double max_low = std::numeric_limits<float>::max();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (std::abs(in[i]) > max_low) throw OverflowOnDemotion(i, in[i]);
    out[i] = static_cast<float>(in[i]);
  }
  return out;
}

std::vector<double> promote_values(std::span<const float> in) {
  return std::vector<double>(in.begin(), in.end());
}

template <std::floating_point To, std::floating_point From>
CsrMatrix<To> convert_csr(const CsrMatrix<From>& a, std::vector<To> values) {
  return CsrMatrix<To>(a.rows(), a.cols(), {a.row_ptr().begin(), a.row_ptr().end()},
                       {a.col_idx().begin(), a.col_idx().end()}, std::move(values));
}

template <typename Op>
double power_iteration(const Op& a, std::size_t iters, std::uint64_t seed) {
  if (iters == 0) throw InvalidArgument("spectral_norm_estimate: iters must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> start(a.cols());
  for (auto& v : start) v = gauss(rng);
  Vector<double> v(std::move(start));
  const double nv = norm2(v);
  if (nv == 0.0) return 0.0;
  scale(1.0 / nv, v.span());

  // sigma_k^2 = ||A^T A v_{k-1}|| with v_k the normalized power iterate; this
  // ratio of consecutive Krylov moments never decreases.
  double sigma = 0.0;
  for (std::size_t k = 0; k < iters; ++k) {
    Vector<double> u = matvec_transpose(a, matvec(a, v));
    const double nu = norm2(u);
    if (nu == 0.0) return sigma;
    sigma = std::sqrt(nu);
    scale(1.0 / nu, u.span());
    v = std::move(u);
  }
  return sigma;
}

}  // namespace

DenseMatrix<Low> demote(const DenseMatrix<High>& a) {
  return DenseMatrix<Low>(a.rows(), a.cols(), demote_values(a.data()));
}

CsrMatrix<Low> demote(const CsrMatrix<High>& a) { return convert_csr(a, demote_values(a.values())); }

Vector<Low> demote(const Vector<High>& x) { return Vector<Low>(demote_values(x.span())); }

DenseMatrix<High> promote(const DenseMatrix<Low>& a) {
  return DenseMatrix<High>(a.rows(), a.cols(), promote_values(a.data()));
}

CsrMatrix<High> promote(const CsrMatrix<Low>& a) { return convert_csr(a, promote_values(a.values())); }

Vector<High> promote(const Vector<Low>& x) { return Vector<High>(promote_values(x.span())); }

template <std::floating_point T>
Vector<T> matvec(const DenseMatrix<T>& a, const Vector<T>& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: cols(A) != length(x)");
  Vector<T> y(a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const T xj = x[j];
    if (xj == T{0}) continue;
    axpy(xj, a.col(j), y.span());
  }
  return y;
}

template <std::floating_point T>
Vector<T> matvec(const CsrMatrix<T>& a, const Vector<T>& x) {
  if (a.cols() != x.size()) throw DimensionMismatch("matvec: cols(A) != length(x)");
  Vector<T> y(a.rows());
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T sum{0};
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) sum += va[k] * x[ci[k]];
    y[i] = sum;
  }
  return y;
}

template <std::floating_point T>
Vector<T> matvec_transpose(const DenseMatrix<T>& a, const Vector<T>& x) {
  if (a.rows() != x.size()) throw DimensionMismatch("matvec_transpose: rows(A) != length(x)");
  Vector<T> y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x.span());
  return y;
}

template <std::floating_point T>
Vector<T> matvec_transpose(const CsrMatrix<T>& a, const Vector<T>& x) {
  if (a.rows() != x.size()) throw DimensionMismatch("matvec_transpose: rows(A) != length(x)");
  Vector<T> y(a.cols());
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto va = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) y[ci[k]] += va[k] * x[i];
  }
  return y;
}

template <std::floating_point T>
double norm2(std::span<const T> x) {
  double scale_ = 0.0;
  double ssq = 1.0;
  for (T xi : x) {
    if (xi == T{0}) continue;
    const double a = std::abs(static_cast<double>(xi));
    if (scale_ < a) {
      const double r = scale_ / a;
      ssq = 1.0 + ssq * r * r;
      scale_ = a;
    } else {
      const double r = a / scale_;
      ssq += r * r;
    }
  }
  return scale_ * std::sqrt(ssq);
}

template <std::floating_point T>
T dot(std::span<const T> x, std::span<const T> y) {
  if (x.size() != y.size()) throw DimensionMismatch("dot: length mismatch");
  // four independent partial sums so the loop is not bound by add latency
  const std::size_t n = x.size();
  const std::size_t n4 = n - n % 4;
  T s0{0}, s1{0}, s2{0}, s3{0};
  for (std::size_t i = 0; i < n4; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (std::size_t i = n4; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

template <std::floating_point T>
void axpy(T alpha, std::span<const std::type_identity_t<T>> x, std::span<T> y) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy: length mismatch");
  const std::size_t n = x.size();
  const T* xp = x.data();
  T* yp = y.data();
  for (std::size_t i = 0; i < n; ++i) yp[i] += alpha * xp[i];
}

template <std::floating_point T>
void scale(T alpha, std::span<T> x) {
  for (T& v : x) v *= alpha;
}

template <std::floating_point T>
double norm_inf(const DenseMatrix<T>& a) {
  std::vector<double> row_sums(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) row_sums[i] += std::abs(static_cast<double>(a(i, j)));
  }
  return row_sums.empty() ? 0.0 : *std::max_element(row_sums.begin(), row_sums.end());
}

double spectral_norm_estimate(const DenseMatrix<High>& a, std::size_t iters, std::uint64_t seed) {
  if (iters == 0) throw InvalidArgument("spectral_norm_estimate: iters must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> start(a.cols());
  for (auto& v : start) v = gauss(rng);
  Vector<double> v(std::move(start));
  const double nv = norm2(v);
  if (nv == 0.0) return 0.0;
  scale(1.0 / nv, v.span());

  // Same iteration as power_iteration, but column j of A serves both
  // u_j = a_j . (A v_k) and the next product A v_{k+1} += u_j a_j, so each
  // step streams the matrix once.
  Vector<double> w = matvec(a, v);
  double sigma = 0.0;
  for (std::size_t k = 0; k < iters; ++k) {
    const bool last = k + 1 == iters;
    Vector<double> u(a.cols());
    Vector<double> w_next(a.rows());
    for (std::size_t j = 0; j < a.cols(); ++j) {
      u[j] = dot(a.col(j), std::as_const(w).span());
      if (!last) axpy(u[j], a.col(j), w_next.span());
    }
    const double nu = norm2(u);
    if (nu == 0.0) return sigma;
    sigma = std::sqrt(nu);
    scale(1.0 / nu, w_next.span());
    w = std::move(w_next);
  }
  return sigma;
}

double spectral_norm_estimate(const CsrMatrix<High>& a, std::size_t iters, std::uint64_t seed) {
  return power_iteration(a, iters, seed);
}

#define MIXPREC_INSTANTIATE_CORE(T)                                               \
  template Vector<T> matvec(const DenseMatrix<T>&, const Vector<T>&);            \
  template Vector<T> matvec(const CsrMatrix<T>&, const Vector<T>&);              \
  template Vector<T> matvec_transpose(const DenseMatrix<T>&, const Vector<T>&);  \
  template Vector<T> matvec_transpose(const CsrMatrix<T>&, const Vector<T>&);    \
  template double norm2(std::span<const T>);                                     \
  template T dot(std::span<const T>, std::span<const T>);                        \
  template void axpy(T, std::span<const T>, std::span<T>);                       \
  template void scale(T, std::span<T>);                                          \
  template double norm_inf(const DenseMatrix<T>&);

MIXPREC_INSTANTIATE_CORE(float)
MIXPREC_INSTANTIATE_CORE(double)

#undef MIXPREC_INSTANTIATE_CORE

}  // namespace mixprec
