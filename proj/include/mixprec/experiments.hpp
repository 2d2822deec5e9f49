#pragma once

// Reproduction harness: prescribed-condition test matrices, the
// iterations-vs-condition-number sweep, the sparse test-matrix registry with
// its tuned restart values, and the dense timing benchmark.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixprec/core.hpp"
#include "mixprec/krylov.hpp"
#include "mixprec/mixed_ir.hpp"

namespace mixprec {

/// Deterministic 64-bit mix used to derive per-trial seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

/// A = U diag(sigma) V^T with U, V orthogonal factors of seeded Gaussian
/// matrices and sigma log-spaced from 1 down to 1/kappa.
DenseMatrix<High> gen_prescribed_cond(std::size_t n, double kappa, std::uint64_t seed);

/// Symmetric positive definite U diag(sigma) U^T with the same spectrum; the
/// result is exactly symmetric.
DenseMatrix<High> gen_prescribed_cond_spd(std::size_t n, double kappa, std::uint64_t seed);

/// Standard-normal vector from a seed.
Vector<High> gen_gaussian_vector(std::size_t n, std::uint64_t seed);

/// Entries uniform in [-1, 1].
DenseMatrix<High> gen_uniform(std::size_t n, std::uint64_t seed);

/// M^T M + n I with M uniform in [-1, 1]: symmetric positive definite.
DenseMatrix<High> gen_spd(std::size_t n, std::uint64_t seed);

/// tridiag(-1, 2, -1) of order n.
CsrMatrix<High> poisson1d(std::size_t n);
/// Five-point Laplacian on a k-by-k grid (order k^2).
CsrMatrix<High> poisson2d(std::size_t k);
/// Nonsymmetric tridiag(-1 - c, 2, -1 + c), a centered 1D convection-diffusion stencil.
CsrMatrix<High> convection_diffusion1d(std::size_t n, double c);

struct CondSweepSpec {
  std::size_t n = 200;
  std::size_t trials = 200;
  std::vector<double> kappas{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  std::size_t max_iters = 30;
  std::uint64_t seed = 0;
  StopRule stop = StopRule::match_reference(1.0);

  void validate() const;
};

struct CondSweepRow {
  double kappa = 0.0;
  std::size_t n = 0;
  std::size_t trials = 0;
  double mean_iters = 0.0;    // non-converged trials count as max_iters
  double failure_rate = 0.0;
  std::optional<std::size_t> predicted_iters;  // empty when kappa * eps_s >= 1
};

std::vector<CondSweepRow> condition_sweep(const CondSweepSpec& spec);

struct MatrixRegistryEntry {
  int id;
  std::string name;
  std::size_t size;
  std::size_t nonzeroes;
  bool symmetric;
  bool pos_def;
  double cond_magnitude;  // order of magnitude of the condition number
};

/// The six sparse test matrices (metadata only; files are not bundled).
const std::vector<MatrixRegistryEntry>& matrix_registry();
const MatrixRegistryEntry& registry_entry(int matrix_id);

/// Tuned (m_in, m_out, m) restart triple for a registry matrix; throws UnknownMatrixId.
RestartConfig restart_defaults(int matrix_id);

struct BenchRow {
  std::size_t n = 0;
  double dp_seconds = 0.0;
  double sp_seconds = 0.0;
  double mixed_seconds = 0.0;
  std::size_t iterations = 0;

  double speedup_mixed() const noexcept { return dp_seconds / mixed_seconds; }
  double speedup_single() const noexcept { return dp_seconds / sp_seconds; }
};

struct BenchOptions {
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
  Backend backend = Backend::LU;
};

/// Median-of-repeats wall times (one warm-up run discarded) of the double
/// solver, a pure float solve and the mixed solver on the same seeded system.
/// Timings are hardware dependent.
std::vector<BenchRow> timing_bench(const std::vector<std::size_t>& sizes, const BenchOptions& opts = {});

}  // namespace mixprec
