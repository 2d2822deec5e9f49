#include "mixprec/mixed_ir.hpp"

#include <chrono>
#include <cmath>
#include <variant>

#include "mixprec/dense_direct.hpp"

namespace mixprec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <std::floating_point T>
void tally(PrecisionAudit* audit, std::size_t PrecisionAudit::*high, std::size_t PrecisionAudit::*low,
           std::size_t flops) {
  if (audit == nullptr) return;
  if constexpr (std::is_same_v<T, High>) {
    audit->*high += flops;
  } else {
    audit->*low += flops;
  }
}

template <std::floating_point T>
Vector<T> residual_impl(const DenseMatrix<T>& a, const Vector<T>& x, const Vector<T>& b, PrecisionAudit* audit) {
  if (a.cols() != x.size() || a.rows() != b.size()) throw DimensionMismatch("residual: dimension mismatch");
  Vector<T> r = b;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const T xj = x[j];
    if (xj == T{0}) continue;
    axpy(-xj, a.col(j), r.span());
  }
  tally<T>(audit, &PrecisionAudit::residual_high_flops, &PrecisionAudit::residual_low_flops,
           2 * a.rows() * a.cols());
  return r;
}

template <std::floating_point T>
void update_impl(Vector<T>& x, const Vector<T>& z, PrecisionAudit* audit) {
  axpy(T{1}, z.span(), x.span());
  tally<T>(audit, &PrecisionAudit::update_high_flops, &PrecisionAudit::update_low_flops, x.size());
}

template <std::floating_point T>
using Factors = std::variant<LuFactors<T>, CholeskyFactor<T>>;

template <std::floating_point T>
Factors<T> factor(DenseMatrix<T> a, Backend backend) {
  if (backend == Backend::LU) return lu_factor(std::move(a));
  return cholesky_factor(std::move(a));
}

template <std::floating_point T>
Vector<T> solve_with(const Factors<T>& f, Vector<T> b) {
  return std::visit(
      [&](const auto& fac) -> Vector<T> {
        if constexpr (std::is_same_v<std::decay_t<decltype(fac)>, LuFactors<T>>) {
          return lu_solve(fac, std::move(b));
        } else {
          return cholesky_solve(fac, std::move(b));
        }
      },
      f);
}

template <std::floating_point T>
std::size_t factor_bytes(const Factors<T>& f) {
  return std::visit(
      [](const auto& fac) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(fac)>, LuFactors<T>>) {
          return fac.packed().bytes();
        } else {
          return fac.lower().bytes();
        }
      },
      f);
}

void check_system(const DenseMatrix<High>& a, const Vector<High>& b, Backend backend) {
  if (!a.square() || a.rows() == 0) throw InvalidArgument("solver requires a square matrix with n >= 1");
  if (b.size() != a.rows()) throw DimensionMismatch("length(b) != n");
  if (backend == Backend::Cholesky && !is_symmetric(a)) {
    throw InvalidArgument("Cholesky backend requires a symmetric matrix");
  }
}

}  // namespace

void IrConfig::validate() const {
  if (max_iters < 1) throw InvalidArgument("IrConfig: max_iters must be >= 1");
  if (stop.kind == StopRule::Kind::MatchReference && !(stop.tolerance_factor >= 1.0)) {
    throw InvalidArgument("IrConfig: tolerance_factor must be >= 1");
  }
  if (norm_iters < 1) throw InvalidArgument("IrConfig: norm_iters must be >= 1");
}

bool is_symmetric(const DenseMatrix<High>& a) {
  if (!a.square()) return false;
  double scale_ = 0.0;
  for (double v : a.data()) scale_ = std::max(scale_, std::abs(v));
  const double tol = 4.0 * unit_roundoff<High>() * scale_;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    for (std::size_t i = j + 1; i < a.rows(); ++i) {
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
    }
  }
  return true;
}

Vector<High> residual(const DenseMatrix<High>& a, const Vector<High>& x, const Vector<High>& b,
                      PrecisionAudit* audit) {
  return residual_impl(a, x, b, audit);
}

bool backward_stop(double r_norm, double x_norm, double a_norm, std::size_t n, double eps) {
  return r_norm <= x_norm * a_norm * eps * std::sqrt(static_cast<double>(n));
}

std::optional<std::size_t> datta_iterations(double eps_low, double eps_high, double kappa) {
  if (!(kappa >= 1.0)) throw InvalidArgument("datta_iterations: kappa must be >= 1");
  if (!(eps_low > 0.0 && eps_high > 0.0)) throw InvalidArgument("datta_iterations: unit roundoffs must be positive");
  const double denom = std::log(eps_low) + std::log(kappa);
  if (denom >= 0.0) return std::nullopt;
  return static_cast<std::size_t>(std::ceil(std::log(eps_high) / denom));
}

IrResult ir_solve(const DenseMatrix<High>& a, const Vector<High>& b, const IrConfig& cfg) {
  cfg.validate();
  check_system(a, b, cfg.backend);
  const std::size_t n = a.rows();
  const double eps = cfg.precision.eps_d();

  SolveReport report;
  const auto t_setup = Clock::now();
  double reference_residual = 0.0;
  if (cfg.stop.kind == StopRule::Kind::BackwardError) {
    report.a_norm_estimate = spectral_norm_estimate(a, cfg.norm_iters, cfg.norm_seed);
  } else {
    Vector<High> x_ref;
    try {
      x_ref = solve_reference(a, b, cfg.backend);
    } catch (const Error& e) {
      throw FallbackRequired(std::string("reference solve failed: ") + e.what());
    }
    reference_residual = norm2(residual(a, x_ref, b));
  }
  report.times.setup_seconds = seconds_since(t_setup);

  const auto t_total = Clock::now();
  std::optional<Factors<Low>> factors;
  Vector<High> x;
  try {
    factors.emplace(factor(demote(a), cfg.backend));
    x = promote(solve_with(*factors, demote(b)));
  } catch (const SingularPivot& e) {
    throw FallbackRequired(std::string("low-precision factorization failed: ") + e.what());
  } catch (const NotPositiveDefinite& e) {
    throw FallbackRequired(std::string("low-precision factorization failed: ") + e.what());
  } catch (const OverflowOnDemotion& e) {
    throw FallbackRequired(std::string("demotion failed: ") + e.what());
  } catch (const InvariantViolation& e) {
    throw FallbackRequired(std::string("low-precision solve produced non-finite values: ") + e.what());
  }
  report.times.factor_seconds = seconds_since(t_total);

  report.memory.high_matrix_bytes = a.bytes();
  report.memory.low_matrix_bytes = factor_bytes(*factors);
  report.memory.high_vector_bytes = 2 * n * sizeof(High);  // x, r
  report.memory.low_vector_bytes = n * sizeof(Low);        // demoted rhs / correction

  auto satisfied = [&](double r_norm, const Vector<High>& xk) {
    if (cfg.stop.kind == StopRule::Kind::BackwardError) {
      return backward_stop(r_norm, norm2(xk), report.a_norm_estimate, n, eps);
    }
    return r_norm <= cfg.stop.tolerance_factor * reference_residual;
  };

  for (std::size_t k = 0;; ++k) {
    const auto t_iter = Clock::now();
    const Vector<High> r = residual_impl(a, x, b, &report.audit);
    const double r_norm = norm2(r);
    report.residual_norms.push_back(r_norm);
    if (!std::isfinite(r_norm)) break;
    if (satisfied(r_norm, x)) {
      report.converged = true;
      break;
    }
    if (k == cfg.max_iters) break;

    Vector<Low> r_low;
    try {
      r_low = demote(r);
    } catch (const OverflowOnDemotion&) {
      break;  // diverged beyond the float range
    }
    Vector<High> z;
    try {
      z = promote(solve_with(*factors, std::move(r_low)));
    } catch (const InvariantViolation&) {
      break;
    }
    update_impl(x, z, &report.audit);
    report.iterations = k + 1;
    report.times.iteration_seconds.push_back(seconds_since(t_iter));
  }
  report.times.total_seconds = seconds_since(t_total);
  return {std::move(x), std::move(report)};
}

Vector<High> solve_reference(const DenseMatrix<High>& a, const Vector<High>& b, Backend backend) {
  check_system(a, b, backend);
  return solve_with(factor(a, backend), b);
}

IrResult solve_reference_report(const DenseMatrix<High>& a, const Vector<High>& b, Backend backend) {
  check_system(a, b, backend);
  SolveReport report;
  const auto t0 = Clock::now();
  const auto f = factor(a, backend);
  report.times.factor_seconds = seconds_since(t0);
  Vector<High> x = solve_with(f, b);
  report.times.total_seconds = seconds_since(t0);
  report.memory.high_matrix_bytes = factor_bytes(f);
  report.memory.high_vector_bytes = a.rows() * sizeof(High);
  report.residual_norms.push_back(norm2(residual(a, x, b)));
  report.converged = true;
  return {std::move(x), std::move(report)};
}

Vector<High> solve_low(const DenseMatrix<High>& a, const Vector<High>& b, Backend backend) {
  check_system(a, b, backend);
  return promote(solve_with(factor(demote(a), backend), demote(b)));
}

IrResult ir_solve_or_fallback(const DenseMatrix<High>& a, const Vector<High>& b, const IrConfig& cfg) {
  IrResult result;
  try {
    result = ir_solve(a, b, cfg);
    if (result.report.converged) return result;
  } catch (const FallbackRequired&) {
    result.report = SolveReport{};
  }
  result.x = solve_reference(a, b, cfg.backend);
  result.report.fell_back_to_high = true;
  result.report.residual_norms.push_back(norm2(residual(a, result.x, b)));
  return result;
}

}  // namespace mixprec
