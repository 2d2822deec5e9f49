#pragma once

#include <cstddef>
#include <vector>

namespace mixprec {

/// Bytes held by a solve, split by precision and by matrix vs. vector storage.
struct MemoryAccount {
  std::size_t low_matrix_bytes = 0;
  std::size_t high_matrix_bytes = 0;
  std::size_t low_vector_bytes = 0;
  std::size_t high_vector_bytes = 0;

  std::size_t low_bytes() const noexcept { return low_matrix_bytes + low_vector_bytes; }
  std::size_t high_bytes() const noexcept { return high_matrix_bytes + high_vector_bytes; }
  std::size_t matrix_bytes() const noexcept { return low_matrix_bytes + high_matrix_bytes; }
  std::size_t total_bytes() const noexcept { return low_bytes() + high_bytes(); }
};

struct PhaseTimes {
  double setup_seconds = 0.0;      // norm estimate / reference solve, not part of total
  double factor_seconds = 0.0;     // demotion + factorization + initial solve
  std::vector<double> iteration_seconds;
  double total_seconds = 0.0;
};

/// Flop tallies for the steps that must run in high precision (residual and
/// update). Filled by the iterative-refinement driver for auditing.
struct PrecisionAudit {
  std::size_t residual_high_flops = 0;
  std::size_t residual_low_flops = 0;
  std::size_t update_high_flops = 0;
  std::size_t update_low_flops = 0;
};

/// Per-solve telemetry.
struct SolveReport {
  std::size_t iterations = 0;
  std::vector<double> residual_norms;  // ||b - A x_k||_2, starting with the initial iterate
  bool converged = false;
  bool fell_back_to_high = false;
  double a_norm_estimate = 0.0;
  std::size_t inner_iterations = 0;  // Krylov only: total inner GMRES steps
  MemoryAccount memory;
  PhaseTimes times;
  PrecisionAudit audit;

  double final_residual() const noexcept { return residual_norms.empty() ? 0.0 : residual_norms.back(); }
};

}  // namespace mixprec
