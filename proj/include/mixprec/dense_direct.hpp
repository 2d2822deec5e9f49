#pragma once

// Unblocked right-looking LU (partial pivoting) and Cholesky kernels with their
// triangular solves. Instantiated for float and double: the mixed solver runs
// them in float, the reference solver in double.

#include "mixprec/core.hpp"

namespace mixprec {

/// L (unit diagonal, implicit) and U packed into one matrix, plus the row pivots.
template <std::floating_point T>
class LuFactors {
 public:
  LuFactors(DenseMatrix<T> packed, Permutation perm) : packed_(std::move(packed)), perm_(std::move(perm)) {}

  std::size_t size() const noexcept { return packed_.rows(); }
  const DenseMatrix<T>& packed() const noexcept { return packed_; }
  const Permutation& perm() const noexcept { return perm_; }

  DenseMatrix<T> unit_lower() const;
  DenseMatrix<T> upper() const;

 private:
  DenseMatrix<T> packed_;
  Permutation perm_;
};

template <std::floating_point T>
class CholeskyFactor {
 public:
  explicit CholeskyFactor(DenseMatrix<T> lower) : lower_(std::move(lower)) {}

  std::size_t size() const noexcept { return lower_.rows(); }
  const DenseMatrix<T>& lower() const noexcept { return lower_; }

 private:
  DenseMatrix<T> lower_;
};

/// Gaussian elimination with partial pivoting, overwriting `a` (pass a copy).
/// The pivot is the largest |entry| on/below the diagonal, ties going to the
/// smallest row index. Throws SingularPivot(k) on an exactly zero pivot.
template <std::floating_point T>
LuFactors<T> lu_factor(DenseMatrix<T> a);

/// Solves A x = b from P A = L U: applies P, then L y = P b, then U x = y.
template <std::floating_point T>
Vector<T> lu_solve(const LuFactors<T>& f, Vector<T> b);

/// Right-looking lower Cholesky. Only the lower triangle of `a` is read.
/// Throws NotPositiveDefinite(k) when the k-th diagonal update is <= 0.
template <std::floating_point T>
CholeskyFactor<T> cholesky_factor(DenseMatrix<T> a);

template <std::floating_point T>
Vector<T> cholesky_solve(const CholeskyFactor<T>& f, Vector<T> b);

}  // namespace mixprec
