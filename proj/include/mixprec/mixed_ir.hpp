#pragma once

// Mixed-precision iterative refinement for dense systems: factor and solve in
// float, compute residuals and apply corrections in double against the
// original matrix.

#include <cstdint>
#include <optional>

#include "mixprec/core.hpp"
#include "mixprec/report.hpp"

namespace mixprec {

enum class Backend { LU, Cholesky };

/// When to stop refining.
///   BackwardError:  ||b - A x||_2 <= ||x||_2 * ||A||_2 * eps_d * sqrt(n)
///   MatchReference: ||b - A x||_2 <= factor * ||b - A x_ref||_2, where x_ref is
///                   a full double-precision solve computed up front.
struct StopRule {
  enum class Kind { BackwardError, MatchReference };

  Kind kind = Kind::BackwardError;
  double tolerance_factor = 1.0;

  static StopRule backward_error() noexcept { return {}; }
  static StopRule match_reference(double factor) noexcept { return {Kind::MatchReference, factor}; }
};

struct IrConfig {
  std::size_t max_iters = 30;
  StopRule stop = StopRule::backward_error();
  PrecisionPair precision = PrecisionPair::single_double();
  Backend backend = Backend::LU;
  std::size_t norm_iters = 50;  // power iterations for ||A||_2
  std::uint64_t norm_seed = 0;

  /// Throws InvalidArgument when max_iters < 1 or tolerance_factor < 1.
  void validate() const;
};

struct IrResult {
  Vector<High> x;
  SolveReport report;
};

/// r = b - A x, entirely in double.
Vector<High> residual(const DenseMatrix<High>& a, const Vector<High>& x, const Vector<High>& b,
                      PrecisionAudit* audit = nullptr);

/// True iff r_norm <= x_norm * a_norm * eps * sqrt(n).
bool backward_stop(double r_norm, double x_norm, double a_norm, std::size_t n, double eps);

/// Predicted refinement steps ceil(ln eps_high / (ln eps_low + ln kappa)).
/// std::nullopt means divergence (kappa * eps_low >= 1).
std::optional<std::size_t> datta_iterations(double eps_low, double eps_high, double kappa);
inline std::optional<std::size_t> datta_iterations(const PrecisionPair& pp, double kappa) {
  return datta_iterations(pp.eps_s(), pp.eps_d(), kappa);
}

/// Iterative refinement. report.iterations counts applied corrections; a solve
/// that still fails the stop rule after max_iters corrections returns with
/// converged == false. Factorization breakdown or demotion overflow throws
/// FallbackRequired.
IrResult ir_solve(const DenseMatrix<High>& a, const Vector<High>& b, const IrConfig& cfg = {});

/// Same kernels run entirely in double; throws SingularPivot / NotPositiveDefinite.
Vector<High> solve_reference(const DenseMatrix<High>& a, const Vector<High>& b, Backend backend = Backend::LU);

/// solve_reference with timing and memory accounting filled in.
IrResult solve_reference_report(const DenseMatrix<High>& a, const Vector<High>& b, Backend backend = Backend::LU);

/// Factor and solve entirely in float (no refinement), promoted to double.
Vector<High> solve_low(const DenseMatrix<High>& a, const Vector<High>& b, Backend backend = Backend::LU);

/// ir_solve, falling back to solve_reference when the mixed path throws
/// FallbackRequired or does not converge. report.converged describes the mixed
/// attempt; report.fell_back_to_high marks that x came from the double solver.
IrResult ir_solve_or_fallback(const DenseMatrix<High>& a, const Vector<High>& b, const IrConfig& cfg = {});

bool is_symmetric(const DenseMatrix<High>& a);

}  // namespace mixprec
