#include "mixprec/krylov.hpp"

namespace mixprec {

HessenbergLsqResult hessenberg_lsq(const DenseMatrix<double>& h, double beta) {
  const std::size_t k = h.cols();
  if (k == 0 || h.rows() != k + 1) throw DimensionMismatch("hessenberg_lsq: H must be (k+1) x k with k >= 1");
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = j + 2; i <= k; ++i) {
      if (h(i, j) != 0.0) throw InvalidArgument("hessenberg_lsq: H is not upper Hessenberg");
    }
  }
  HessenbergLsq<double> lsq(beta);
  for (std::size_t j = 0; j < k; ++j) lsq.add_column(h.col(j).first(j + 2));
  return {lsq.solve(), lsq.residual_estimate()};
}

}  // namespace mixprec
