#include "mixprec/dense_direct.hpp"

namespace mixprec {

template <std::floating_point T>
DenseMatrix<T> LuFactors<T>::unit_lower() const {
  const std::size_t n = size();
  DenseMatrix<T> l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    l(j, j) = T{1};
    for (std::size_t i = j + 1; i < n; ++i) l(i, j) = packed_(i, j);
  }
  return l;
}

template <std::floating_point T>
DenseMatrix<T> LuFactors<T>::upper() const {
  const std::size_t n = size();
  DenseMatrix<T> u(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i <= j; ++i) u(i, j) = packed_(i, j);
  }
  return u;
}

template <std::floating_point T>
LuFactors<T> lu_factor(DenseMatrix<T> a) {
  if (!a.square() || a.rows() == 0) throw InvalidArgument("lu_factor: matrix must be square with n >= 1");
  const std::size_t n = a.rows();
  std::vector<std::size_t> pivot(n);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    T best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > best) {
        best = std::abs(a(i, k));
        p = i;
      }
    }
    pivot[k] = p;
    if (best == T{0}) throw SingularPivot(k);
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
    }

    const T piv = a(k, k);
    auto colk = a.col(k);
    for (std::size_t i = k + 1; i < n; ++i) colk[i] /= piv;

    const T* lk = colk.data();
    for (std::size_t j = k + 1; j < n; ++j) {
      T* aj = a.col(j).data();
      const T ukj = aj[k];
      if (ukj == T{0}) continue;
      for (std::size_t i = k + 1; i < n; ++i) aj[i] -= lk[i] * ukj;
    }
  }
  return LuFactors<T>(std::move(a), Permutation(std::move(pivot)));
}

template <std::floating_point T>
Vector<T> lu_solve(const LuFactors<T>& f, Vector<T> b) {
  const std::size_t n = f.size();
  if (b.size() != n) throw DimensionMismatch("lu_solve: length(b) != n");
  const auto& lu = f.packed();
  f.perm().apply(b.span());
  T* y = b.span().data();

  for (std::size_t j = 0; j < n; ++j) {
    const T yj = y[j];
    if (yj == T{0}) continue;
    const T* lj = lu.col(j).data();
    for (std::size_t i = j + 1; i < n; ++i) y[i] -= lj[i] * yj;
  }
  for (std::size_t j = n; j-- > 0;) {
    const T* uj = lu.col(j).data();
    y[j] /= uj[j];
    const T yj = y[j];
    if (yj == T{0}) continue;
    for (std::size_t i = 0; i < j; ++i) y[i] -= uj[i] * yj;
  }
  return b;
}

template <std::floating_point T>
CholeskyFactor<T> cholesky_factor(DenseMatrix<T> a) {
  if (!a.square() || a.rows() == 0) throw InvalidArgument("cholesky_factor: matrix must be square with n >= 1");
  const std::size_t n = a.rows();

  for (std::size_t k = 0; k < n; ++k) {
    const T d = a(k, k);
    if (!(d > T{0})) throw NotPositiveDefinite(k);
    const T lkk = std::sqrt(d);
    auto colk = a.col(k);
    colk[k] = lkk;
    for (std::size_t i = k + 1; i < n; ++i) colk[i] /= lkk;

    const T* lk = colk.data();
    for (std::size_t j = k + 1; j < n; ++j) {
      T* aj = a.col(j).data();
      const T ljk = lk[j];
      if (ljk == T{0}) continue;
      for (std::size_t i = j; i < n; ++i) aj[i] -= lk[i] * ljk;
    }
  }
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) a(i, j) = T{0};
  }
  return CholeskyFactor<T>(std::move(a));
}

template <std::floating_point T>
Vector<T> cholesky_solve(const CholeskyFactor<T>& f, Vector<T> b) {
  const std::size_t n = f.size();
  if (b.size() != n) throw DimensionMismatch("cholesky_solve: length(b) != n");
  const auto& l = f.lower();
  T* y = b.span().data();

  for (std::size_t j = 0; j < n; ++j) {
    const T* lj = l.col(j).data();
    y[j] /= lj[j];
    const T yj = y[j];
    if (yj == T{0}) continue;
    for (std::size_t i = j + 1; i < n; ++i) y[i] -= lj[i] * yj;
  }
  for (std::size_t j = n; j-- > 0;) {
    const T* lj = l.col(j).data();
    T sum = y[j];
    for (std::size_t i = j + 1; i < n; ++i) sum -= lj[i] * y[i];
    y[j] = sum / lj[j];
  }
  return b;
}

template class LuFactors<float>;
template class LuFactors<double>;
template LuFactors<float> lu_factor(DenseMatrix<float>);
template LuFactors<double> lu_factor(DenseMatrix<double>);
template Vector<float> lu_solve(const LuFactors<float>&, Vector<float>);
template Vector<double> lu_solve(const LuFactors<double>&, Vector<double>);
template CholeskyFactor<float> cholesky_factor(DenseMatrix<float>);
template CholeskyFactor<double> cholesky_factor(DenseMatrix<double>);
template Vector<float> cholesky_solve(const CholeskyFactor<float>&, Vector<float>);
template Vector<double> cholesky_solve(const CholeskyFactor<double>&, Vector<double>);

}  // namespace mixprec
