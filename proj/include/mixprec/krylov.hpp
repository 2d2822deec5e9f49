#pragma once

// Restarted GMRES in either precision and the inner-outer FGMRES(m_out) -
// GMRES(m_in) solver: the outer flexible GMRES runs in double, its right
// preconditioner is one (float or double) GMRES cycle started from zero.

#include <chrono>
#include <cmath>
#include <functional>
#include <vector>

#include "mixprec/core.hpp"
#include "mixprec/report.hpp"

namespace mixprec {

/// Restart lengths: inner GMRES (m_in), outer FGMRES (m_out), reference GMRES (m).
struct RestartConfig {
  std::size_t m_in = 20;
  std::size_t m_out = 10;
  std::size_t m = 40;

  /// m defaults to 2*m_out + m_in, which gives both methods the same vector storage.
  static RestartConfig from_inner_outer(std::size_t m_in, std::size_t m_out) {
    RestartConfig c{m_in, m_out, 2 * m_out + m_in};
    c.validate();
    return c;
  }

  void validate() const {
    if (m_in < 1 || m_out < 1 || m < 1) throw InvalidArgument("RestartConfig: restart lengths must be >= 1");
  }

  friend bool operator==(const RestartConfig&, const RestartConfig&) = default;
};

/// Convergence target for the Krylov solvers.
struct KrylovStop {
  enum class Kind { Relative, BackwardError };

  Kind kind = Kind::Relative;
  double value = 1e-10;  // relative tolerance, or eps for the backward-error rule
  double a_norm = 0.0;   // ||A||_2 estimate, backward-error rule only

  /// ||r|| <= tol * ||b||
  static KrylovStop relative(double tol) { return {Kind::Relative, tol, 0.0}; }
  /// ||r|| <= ||x|| * ||A|| * eps * sqrt(n)
  static KrylovStop backward_error(double eps, double a_norm) { return {Kind::BackwardError, eps, a_norm}; }

  double threshold(double b_norm, double x_norm, std::size_t n) const {
    if (kind == Kind::Relative) return value * b_norm;
    return x_norm * a_norm * value * std::sqrt(static_cast<double>(n));
  }
};

/// Progressive Givens QR of a growing (k+1) x k upper-Hessenberg matrix for
/// min ||beta e_1 - H y||_2.
template <std::floating_point T>
class HessenbergLsq {
 public:
  HessenbergLsq() = default;
  explicit HessenbergLsq(T beta) : g_{beta}, estimates_{std::abs(static_cast<double>(beta))} {}

  std::size_t cols() const noexcept { return r_.size(); }

  /// Appends column k (entries h_{0,k} .. h_{k+1,k}); returns the updated
  /// least-squares residual |g_{k+1}|.
  double add_column(std::span<const T> h) {
    const std::size_t k = r_.size();
    if (h.size() != k + 2) throw DimensionMismatch("HessenbergLsq: column k must have k+2 entries");
    std::vector<T> col(h.begin(), h.end());
    for (std::size_t i = 0; i < k; ++i) {
      const T a = col[i];
      const T b = col[i + 1];
      col[i] = cs_[i] * a + sn_[i] * b;
      col[i + 1] = -sn_[i] * a + cs_[i] * b;
    }
    const T a = col[k];
    const T b = col[k + 1];
    const T rho = std::hypot(a, b);
    const T c = rho == T{0} ? T{1} : a / rho;
    const T s = rho == T{0} ? T{0} : b / rho;
    cs_.push_back(c);
    sn_.push_back(s);
    col[k] = rho;
    col.pop_back();
    r_.push_back(std::move(col));
    g_.push_back(-s * g_[k]);
    g_[k] = c * g_[k];
    estimates_.push_back(std::abs(static_cast<double>(g_[k + 1])));
    return estimates_.back();
  }

  /// Residual of the least-squares problem restricted to the first `cols` columns.
  double residual_estimate(std::size_t cols) const { return estimates_.at(cols); }
  double residual_estimate() const { return estimates_.back(); }

  /// Back substitution on the first `cols` columns; throws RankDeficient on an
  /// exactly zero rotated diagonal.
  std::vector<T> solve(std::size_t cols) const {
    if (cols > r_.size()) throw DimensionMismatch("HessenbergLsq: too many columns requested");
    std::vector<T> y(g_.begin(), g_.begin() + static_cast<std::ptrdiff_t>(cols));
    for (std::size_t j = cols; j-- > 0;) {
      if (r_[j][j] == T{0}) throw RankDeficient(j);
      y[j] /= r_[j][j];
      for (std::size_t i = 0; i < j; ++i) y[i] -= r_[j][i] * y[j];
    }
    return y;
  }
  std::vector<T> solve() const { return solve(r_.size()); }

  /// Solves on the longest leading block with a nonzero rotated diagonal.
  /// Returns the number of columns used.
  std::size_t solve_regular(std::vector<T>& y) const {
    std::size_t cols = r_.size();
    for (std::size_t j = 0; j < r_.size(); ++j) {
      if (r_[j][j] == T{0}) {
        cols = j;
        break;
      }
    }
    y = solve(cols);
    return cols;
  }

  std::span<const T> cosines() const noexcept { return cs_; }
  std::span<const T> sines() const noexcept { return sn_; }

 private:
  std::vector<std::vector<T>> r_;  // rotated columns, r_[j] has j+1 entries
  std::vector<T> cs_;
  std::vector<T> sn_;
  std::vector<T> g_;
  std::vector<double> estimates_;
};

struct HessenbergLsqResult {
  std::vector<double> y;
  double residual_estimate = 0.0;
};

/// Minimizes ||beta e_1 - H y||_2 for a (k+1) x k upper-Hessenberg H.
HessenbergLsqResult hessenberg_lsq(const DenseMatrix<double>& h, double beta);

/// State of one Arnoldi cycle, exposed for inspection.
template <std::floating_point T>
struct ArnoldiWorkspace {
  std::vector<Vector<T>> basis;           // orthonormal Krylov basis
  std::vector<std::vector<T>> hessenberg; // column j: h_{0,j} .. h_{j+1,j}
  HessenbergLsq<T> lsq;
  double residual_estimate = 0.0;

  void clear() {
    basis.clear();
    hessenberg.clear();
    lsq = HessenbergLsq<T>();
    residual_estimate = 0.0;
  }
};

/// Modified Gram-Schmidt of w against basis[0..k], with one reorthogonalization
/// pass when the norm drops below 1/sqrt(2) of its incoming value. Returns
/// h_{0,k} .. h_{k+1,k}; w is left orthogonalized but unnormalized.
template <std::floating_point T>
std::vector<T> orthogonalize(const std::vector<Vector<T>>& basis, std::size_t k, Vector<T>& w) {
  std::vector<T> h(k + 2, T{0});
  const double incoming = norm2(w);
  for (std::size_t i = 0; i <= k; ++i) {
    const T c = dot(std::span<const T>(w.span()), basis[i].span());
    h[i] += c;
    axpy(-c, basis[i].span(), w.span());
  }
  double out = norm2(w);
  if (out < incoming / std::sqrt(2.0)) {
    for (std::size_t i = 0; i <= k; ++i) {
      const T c = dot(std::span<const T>(w.span()), basis[i].span());
      h[i] += c;
      axpy(-c, basis[i].span(), w.span());
    }
    out = norm2(w);
  }
  h[k + 1] = static_cast<T>(out);
  return h;
}

template <std::floating_point T>
struct GmresCycleResult {
  Vector<T> x;
  double residual_estimate = 0.0;
  std::size_t iterations = 0;
};

namespace detail {
template <LinearOperator Op>
Vector<typename Op::value_type> residual_of(const Op& a, const Vector<typename Op::value_type>& x,
                                             const Vector<typename Op::value_type>& b) {
  using T = typename Op::value_type;
  Vector<T> r = matvec(a, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
  return r;
}

template <LinearOperator Op>
void check_square(const Op& a, std::size_t b_size, const char* who) {
  if (a.rows() != a.cols()) throw InvalidArgument(std::string(who) + ": operator must be square");
  if (b_size != a.rows()) throw DimensionMismatch(std::string(who) + ": length(b) != n");
}
}  // namespace detail

/// One restart cycle of GMRES(m) in the operator's precision: MGS Arnoldi and
/// progressive Givens least squares. Stops early on happy breakdown or when the
/// recurrence residual estimate is <= tol (absolute).
template <LinearOperator Op>
GmresCycleResult<typename Op::value_type> gmres_cycle(const Op& a, const Vector<typename Op::value_type>& b,
                                                      Vector<typename Op::value_type> x0, std::size_t m, double tol,
                                                      ArnoldiWorkspace<typename Op::value_type>* workspace = nullptr) {
  using T = typename Op::value_type;
  detail::check_square(a, b.size(), "gmres_cycle");
  if (m < 1) throw InvalidArgument("gmres_cycle: m must be >= 1");
  if (x0.empty()) x0 = Vector<T>(a.rows());
  if (x0.size() != a.rows()) throw DimensionMismatch("gmres_cycle: length(x0) != n");

  ArnoldiWorkspace<T> local;
  ArnoldiWorkspace<T>& ws = workspace ? *workspace : local;
  ws.clear();

  Vector<T> r = detail::residual_of(a, x0, b);
  const double beta = norm2(r);
  ws.residual_estimate = beta;
  if (beta == 0.0 || beta <= tol) return {std::move(x0), beta, 0};

  scale(static_cast<T>(1.0 / beta), r.span());
  ws.basis.push_back(std::move(r));
  ws.lsq = HessenbergLsq<T>(static_cast<T>(beta));

  std::size_t k = 0;
  for (std::size_t j = 0; j < m; ++j) {
    Vector<T> w = matvec(a, ws.basis[j]);
    std::vector<T> h = orthogonalize(ws.basis, j, w);
    ws.residual_estimate = ws.lsq.add_column(h);
    const T h_next = h[j + 1];
    ws.hessenberg.push_back(std::move(h));
    k = j + 1;
    if (h_next == T{0}) break;  // happy breakdown: solution lies in the current space
    scale(T{1} / h_next, w.span());
    ws.basis.push_back(std::move(w));
    if (ws.residual_estimate <= tol) break;
  }

  std::vector<T> y;
  const std::size_t used = ws.lsq.solve_regular(y);
  ws.residual_estimate = ws.lsq.residual_estimate(used);
  for (std::size_t j = 0; j < used; ++j) axpy(y[j], ws.basis[j].span(), x0.span());
  return {std::move(x0), ws.residual_estimate, k};
}

struct KrylovResult {
  Vector<High> x;
  SolveReport report;
};

/// Right preconditioner for FGMRES: maps a unit outer basis vector v_k to z_k ~ A^{-1} v_k.
using Preconditioner = std::function<Vector<High>(const Vector<High>&)>;

/// Flexible GMRES(m_out) in double with a variable right preconditioner.
/// Convergence is tested after every outer step through the Givens estimate
/// and confirmed with a true residual. report.iterations counts outer steps;
/// report.converged == false means max_outer was exhausted (x is the last iterate).
template <LinearOperator Op>
  requires std::same_as<typename Op::value_type, High>
KrylovResult fgmres(const Op& a, const Vector<High>& b, const Preconditioner& precond, std::size_t m_out,
                    const KrylovStop& stop, std::size_t max_outer) {
  using Clock = std::chrono::steady_clock;
  detail::check_square(a, b.size(), "fgmres");
  if (m_out < 1) throw InvalidArgument("fgmres: m_out must be >= 1");
  const auto t0 = Clock::now();
  const std::size_t n = a.rows();
  const double b_norm = norm2(b);

  KrylovResult out{Vector<High>(n), {}};
  SolveReport& report = out.report;
  Vector<High>& x = out.x;
  report.a_norm_estimate = stop.a_norm;
  std::size_t outer = 0;
  std::size_t peak_vectors = 0;

  for (;;) {
    Vector<High> r = detail::residual_of(a, x, b);
    const double beta = norm2(r);
    report.residual_norms.push_back(beta);
    const double x_norm = norm2(x);
    if (beta <= stop.threshold(b_norm, x_norm, n)) {
      report.converged = true;
      break;
    }
    if (outer >= max_outer || !std::isfinite(beta)) break;

    std::vector<Vector<High>> v;
    std::vector<Vector<High>> z;
    scale(1.0 / beta, r.span());
    v.push_back(std::move(r));
    HessenbergLsq<High> lsq(beta);

    for (std::size_t k = 0; k < m_out; ++k) {
      z.push_back(precond(v[k]));
      Vector<High> w = matvec(a, z[k]);
      std::vector<High> h = orthogonalize(v, k, w);
      const double estimate = lsq.add_column(h);
      ++outer;
      peak_vectors = std::max(peak_vectors, v.size() + z.size());
      if (h[k + 1] == 0.0) break;
      scale(1.0 / h[k + 1], w.span());
      v.push_back(std::move(w));
      peak_vectors = std::max(peak_vectors, v.size() + z.size());

      double x_est = x_norm;
      if (stop.kind == KrylovStop::Kind::BackwardError && estimate <= stop.threshold(b_norm, x_norm * 2.0, n)) {
        // Cheap enough relative to the orthogonalization: form ||x + Z y|| only
        // when the estimate is near the target.
        std::vector<High> y;
        const std::size_t used = lsq.solve_regular(y);
        Vector<High> trial = x;
        for (std::size_t j = 0; j < used; ++j) axpy(y[j], z[j].span(), trial.span());
        x_est = norm2(trial);
      }
      if (estimate <= stop.threshold(b_norm, x_est, n)) break;
      if (outer >= max_outer) break;
    }

    std::vector<High> y;
    const std::size_t used = lsq.solve_regular(y);
    for (std::size_t j = 0; j < used; ++j) axpy(y[j], z[j].span(), x.span());
  }

  report.iterations = outer;
  report.memory.high_matrix_bytes = a.bytes();
  report.memory.high_vector_bytes = peak_vectors * n * sizeof(High);
  report.times.total_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

/// Which arithmetic the inner GMRES cycle uses.
enum class InnerPrecision { Low, High };

/// Inner cycles stop at this relative estimate or after m_in steps, whichever first.
inline constexpr double kInnerRelativeTolerance = 1e-4;

/// FGMRES(m_out) - GMRES(m_in): each preconditioner application is one GMRES(m_in)
/// cycle on A z = v from z = 0, run on a_low (float) or a_high (double).
template <LinearOperator OpHigh, LinearOperator OpLow>
  requires std::same_as<typename OpHigh::value_type, High> && std::same_as<typename OpLow::value_type, Low>
KrylovResult fgmres_inner_outer(const OpHigh& a_high, const OpLow& a_low, const Vector<High>& b,
                                const RestartConfig& cfg, const KrylovStop& stop, std::size_t max_outer,
                                InnerPrecision inner = InnerPrecision::Low) {
  cfg.validate();
  if (a_low.rows() != a_high.rows() || a_low.cols() != a_high.cols()) {
    throw DimensionMismatch("fgmres: high and low operators differ in shape");
  }
  std::size_t inner_steps = 0;
  std::size_t peak_inner_vectors = 0;
  Preconditioner precond;
  if (inner == InnerPrecision::Low) {
    precond = [&](const Vector<High>& v) {
      Vector<Low> v_low = demote(v);
      ArnoldiWorkspace<Low> ws;
      const double tol = kInnerRelativeTolerance * norm2(v_low);
      auto res = gmres_cycle(a_low, v_low, Vector<Low>(v_low.size()), cfg.m_in, tol, &ws);
      inner_steps += res.iterations;
      peak_inner_vectors = std::max(peak_inner_vectors, ws.basis.size());
      return promote(res.x);
    };
  } else {
    precond = [&](const Vector<High>& v) {
      ArnoldiWorkspace<High> ws;
      const double tol = kInnerRelativeTolerance * norm2(v);
      auto res = gmres_cycle(a_high, v, Vector<High>(v.size()), cfg.m_in, tol, &ws);
      inner_steps += res.iterations;
      peak_inner_vectors = std::max(peak_inner_vectors, ws.basis.size());
      return std::move(res.x);
    };
  }

  KrylovResult out = fgmres(a_high, b, precond, cfg.m_out, stop, max_outer);
  const std::size_t n = a_high.rows();
  out.report.inner_iterations = inner_steps;
  if (inner == InnerPrecision::Low) {
    out.report.memory.low_matrix_bytes = a_low.bytes();
    out.report.memory.low_vector_bytes = peak_inner_vectors * n * sizeof(Low);
  } else {
    out.report.memory.high_vector_bytes += peak_inner_vectors * n * sizeof(High);
  }
  return out;
}

/// The mixed-precision solver: float inner cycles on the demoted operator.
template <LinearOperator OpHigh, LinearOperator OpLow>
KrylovResult fgmres_mixed(const OpHigh& a_high, const OpLow& a_low, const Vector<High>& b, const RestartConfig& cfg,
                          const KrylovStop& stop, std::size_t max_outer) {
  return fgmres_inner_outer(a_high, a_low, b, cfg, stop, max_outer, InnerPrecision::Low);
}

/// Plain restarted GMRES(m) entirely in double. report.iterations counts Arnoldi steps.
template <LinearOperator Op>
  requires std::same_as<typename Op::value_type, High>
KrylovResult gmres_reference(const Op& a, const Vector<High>& b, std::size_t m, const KrylovStop& stop,
                             std::size_t max_restarts) {
  using Clock = std::chrono::steady_clock;
  detail::check_square(a, b.size(), "gmres_reference");
  const auto t0 = Clock::now();
  const std::size_t n = a.rows();
  const double b_norm = norm2(b);
  KrylovResult out{Vector<High>(n), {}};
  out.report.a_norm_estimate = stop.a_norm;
  std::size_t restarts = 0;
  std::size_t peak_vectors = 0;

  for (;;) {
    const Vector<High> r = detail::residual_of(a, out.x, b);
    const double beta = norm2(r);
    out.report.residual_norms.push_back(beta);
    const double threshold = stop.threshold(b_norm, norm2(out.x), n);
    if (beta <= threshold) {
      out.report.converged = true;
      break;
    }
    if (restarts >= max_restarts || !std::isfinite(beta)) break;
    ArnoldiWorkspace<High> ws;
    auto cycle = gmres_cycle(a, b, std::move(out.x), m, threshold, &ws);
    out.x = std::move(cycle.x);
    out.report.iterations += cycle.iterations;
    peak_vectors = std::max(peak_vectors, ws.basis.size());
    ++restarts;
    if (cycle.iterations == 0) break;
  }
  out.report.memory.high_matrix_bytes = a.bytes();
  out.report.memory.high_vector_bytes = peak_vectors * n * sizeof(High);
  out.report.times.total_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

}  // namespace mixprec
