#include <gtest/gtest.h>

#include <cmath>

#include "mixprec/experiments.hpp"
#include "mixprec/mixed_ir.hpp"
#include "support/oracles.hpp"

using namespace mixprec;

namespace {

struct System {
  DenseMatrix<High> a;
  Vector<High> x_true;
  Vector<High> b;
};

System make_system(std::size_t n, double kappa, std::uint64_t seed) {
  DenseMatrix<High> a = gen_prescribed_cond(n, kappa, seed);
  Vector<High> x = gen_gaussian_vector(n, mix_seed(seed, 1));
  Vector<High> b = matvec(a, x);
  return {std::move(a), std::move(x), std::move(b)};
}

double backward_threshold(const DenseMatrix<High>& a, const Vector<High>& x, double a_norm) {
  return norm2(x) * a_norm * unit_roundoff<High>() * std::sqrt(static_cast<double>(a.rows()));
}

}  // namespace

TEST(Residual, ZeroIterateGivesRhs) {
  const auto a = DenseMatrix<double>::from_rows({{2, 1}, {1, 3}});
  EXPECT_EQ(residual(a, Vector<double>(2), Vector<double>{3, 4}), (Vector<double>{3, 4}));
}

TEST(Residual, IdentityExactSolution) {
  const Vector<double> b{1.5, -2, 7};
  EXPECT_EQ(residual(DenseMatrix<double>::identity(3), b, b), Vector<double>(3));
}

TEST(Residual, SubstitutionCheck) {
  const auto a = DenseMatrix<double>::from_rows({{2, 1}, {1, 3}});
  EXPECT_EQ(residual(a, Vector<double>{1, 1}, Vector<double>{3, 4}), Vector<double>(2));
}

TEST(Residual, DimensionMismatch) {
  EXPECT_THROW((void)residual(DenseMatrix<double>::identity(3), Vector<double>(2), Vector<double>(3)),
               DimensionMismatch);
}

TEST(BackwardStop, Cases) {
  const double eps = unit_roundoff<double>();
  EXPECT_TRUE(backward_stop(0.0, 3.0, 7.0, 10, eps));
  const double thr = 3.0 * 7.0 * eps * std::sqrt(10.0);
  EXPECT_FALSE(backward_stop(2 * thr, 3.0, 7.0, 10, eps));
  EXPECT_TRUE(backward_stop(thr, 3.0, 7.0, 10, eps));
}

TEST(DattaIterations, DoubleDoubleSpecialCase) {
  const double e = std::ldexp(1.0, -53);
  EXPECT_EQ(datta_iterations(e, e, 10.0), std::optional<std::size_t>(2));
}

TEST(DattaIterations, SingleDouble) {
  const auto pp = PrecisionPair::single_double();
  EXPECT_EQ(datta_iterations(pp, 1e4), std::optional<std::size_t>(5));
  EXPECT_EQ(datta_iterations(pp, 1e8), std::nullopt);
  EXPECT_EQ(datta_iterations(pp, 1e9), std::nullopt);
}

TEST(DattaIterations, MatchesIndependentEvaluation) {
  // log2-based evaluation: ceil(53 / (24 - log2 kappa))
  const auto pp = PrecisionPair::single_double();
  for (double kappa : {1.0, 3.0, 10.0, 1e2, 1e3, 1e5, 1e6, 1e7, 1.6e7}) {
    const double denom = 24.0 - std::log2(kappa);
    const auto got = datta_iterations(pp, kappa);
    ASSERT_TRUE(got.has_value()) << kappa;
    EXPECT_EQ(*got, static_cast<std::size_t>(std::ceil(53.0 / denom))) << kappa;
  }
  EXPECT_EQ(datta_iterations(pp, std::ldexp(1.0, 24)), std::nullopt);
  EXPECT_THROW((void)datta_iterations(pp, 0.5), InvalidArgument);
}

TEST(IrConfig, Validation) {
  IrConfig cfg;
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.max_iters = 30;
  cfg.stop = StopRule::match_reference(0.5);
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.stop = StopRule::match_reference(1.0);
  EXPECT_NO_THROW(cfg.validate());
}

TEST(IrSolve, IdentityConvergesImmediately) {
  const Vector<double> b{1.0, -2.0, 0.1, 3e5};
  const auto res = ir_solve(DenseMatrix<double>::identity(4), b);
  EXPECT_TRUE(res.report.converged);
  EXPECT_LE(res.report.iterations, 1u);
  EXPECT_LE(res.report.final_residual(), 4 * unit_roundoff<double>() * norm2(b));
}

TEST(IrSolve, DivergentRegimeHitsCap) {
  const System s = make_system(200, 1e9, 17);
  const auto res = ir_solve(s.a, s.b);
  EXPECT_FALSE(res.report.converged);
  EXPECT_EQ(res.report.iterations, 30u);
  EXPECT_EQ(res.report.residual_norms.size(), 31u);
}

TEST(IrSolve, ReportInvariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const System s = make_system(60, std::pow(10.0, 1 + seed % 5), seed);
    IrConfig cfg;
    cfg.max_iters = 10;
    const auto res = ir_solve(s.a, s.b, cfg);
    ASSERT_FALSE(res.report.residual_norms.empty());
    EXPECT_LE(res.report.iterations, cfg.max_iters);
    EXPECT_EQ(res.report.residual_norms.size(), res.report.iterations + 1);
    if (res.report.converged) {
      EXPECT_TRUE(backward_stop(res.report.final_residual(), norm2(res.x), res.report.a_norm_estimate, 60,
                                unit_roundoff<double>()));
    }
  }
}

TEST(IrSolve, ResidualHalvesEachStepInConvergentRegime) {
  for (std::size_t n : {50, 100, 200}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const double kappa = std::pow(10.0, 1 + static_cast<double>(seed % 4));  // kappa * eps_s <= 6e-4
      const System s = make_system(n, kappa, seed + 100 * n);
      const auto res = ir_solve(s.a, s.b);
      ASSERT_TRUE(res.report.converged);
      const auto& r = res.report.residual_norms;
      const double floor = backward_threshold(s.a, res.x, res.report.a_norm_estimate);
      for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        if (r[k + 1] > floor) EXPECT_LE(r[k + 1], 0.5 * r[k]) << "n=" << n << " seed=" << seed << " k=" << k;
      }
    }
  }
}

TEST(IrSolve, MatchReferenceParity) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 50 + 25 * (seed % 3);
    const System s = make_system(n, std::pow(10.0, seed % 4), seed);
    IrConfig cfg;
    cfg.stop = StopRule::match_reference(2.0);
    const auto res = ir_solve(s.a, s.b, cfg);
    ASSERT_TRUE(res.report.converged);
    const auto x_ref = solve_reference(s.a, s.b);
    EXPECT_LE(norm2(residual(s.a, res.x, s.b)), 2.0 * norm2(residual(s.a, x_ref, s.b)));
  }
}

TEST(IrSolve, AgreesWithReferenceSolver) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double kappa = std::pow(10.0, 1 + seed % 3);
    const System s = make_system(80, kappa, seed);
    const auto mixed = ir_solve(s.a, s.b);
    const auto ref = solve_reference(s.a, s.b);
    EXPECT_LE(oracle::rel_error(mixed.x, ref), 10.0 * kappa * unit_roundoff<double>() * 80) << seed;
  }
}

TEST(IrSolve, CholeskyBackend) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto a = gen_spd(40, seed);
    const auto x_true = gen_gaussian_vector(40, seed + 1);
    const auto b = matvec(a, x_true);
    IrConfig cfg;
    cfg.backend = Backend::Cholesky;
    const auto res = ir_solve(a, b, cfg);
    EXPECT_TRUE(res.report.converged);
    EXPECT_LE(oracle::rel_error(res.x, x_true), 1e-13);
  }
}

TEST(IrSolve, CholeskyRejectsNonSymmetric) {
  IrConfig cfg;
  cfg.backend = Backend::Cholesky;
  EXPECT_THROW((void)ir_solve(DenseMatrix<double>::from_rows({{2, 1}, {0, 2}}), Vector<double>{1, 1}, cfg),
               InvalidArgument);
}

TEST(IrSolve, DimensionChecks) {
  EXPECT_THROW((void)ir_solve(DenseMatrix<double>::identity(3), Vector<double>(2)), DimensionMismatch);
  EXPECT_THROW((void)ir_solve(DenseMatrix<double>(2, 3), Vector<double>(2)), InvalidArgument);
}

TEST(IrSolve, LowPrecisionSingularityRequiresFallback) {
  // singular once rounded to float, nonsingular in double
  const auto a = DenseMatrix<double>::from_rows({{1, 1}, {1, 1 + 1e-10}});
  const Vector<double> b{2, 2 + 1e-10};
  EXPECT_THROW((void)ir_solve(a, b), FallbackRequired);
  const auto res = ir_solve_or_fallback(a, b);
  EXPECT_TRUE(res.report.fell_back_to_high);
  EXPECT_FALSE(res.report.converged);
  EXPECT_NEAR(res.x[0], 1.0, 1e-5);
  EXPECT_NEAR(res.x[1], 1.0, 1e-5);
}

TEST(IrSolve, OverflowOnDemotionRequiresFallback) {
  const auto a = DenseMatrix<double>::from_rows({{1e39, 0}, {0, 1}});
  EXPECT_THROW((void)ir_solve(a, Vector<double>{1e39, 1}), FallbackRequired);
  const auto res = ir_solve_or_fallback(a, Vector<double>{1e39, 1});
  EXPECT_TRUE(res.report.fell_back_to_high);
  EXPECT_DOUBLE_EQ(res.x[0], 1.0);
}

TEST(IrSolve, NotPositiveDefiniteRequiresFallback) {
  IrConfig cfg;
  cfg.backend = Backend::Cholesky;
  EXPECT_THROW((void)ir_solve(DenseMatrix<double>::from_rows({{1, 2}, {2, 1}}), Vector<double>{1, 1}, cfg),
               FallbackRequired);
}

TEST(IrSolve, DivergenceFallsBackWhenRequested) {
  const System s = make_system(100, 1e10, 3);
  const auto res = ir_solve_or_fallback(s.a, s.b);
  EXPECT_TRUE(res.report.fell_back_to_high);
  EXPECT_FALSE(res.report.converged);
}

TEST(IrSolve, MemoryIsOneAndAHalfTimesReference) {
  for (std::size_t n : {10, 64, 200}) {
    const System s = make_system(n, 10.0, n);
    const auto mixed = ir_solve(s.a, s.b);
    const auto ref = solve_reference_report(s.a, s.b);
    EXPECT_EQ(mixed.report.memory.high_matrix_bytes, n * n * sizeof(double));
    EXPECT_EQ(mixed.report.memory.low_matrix_bytes, n * n * sizeof(float));
    const double ratio = static_cast<double>(mixed.report.memory.matrix_bytes()) /
                         static_cast<double>(ref.report.memory.matrix_bytes());
    EXPECT_NEAR(ratio, 1.5, 0.075);
  }
}

TEST(IrSolve, ResidualAndUpdateRunInHighPrecision) {
  const System s = make_system(50, 1e3, 5);
  const auto res = ir_solve(s.a, s.b);
  EXPECT_EQ(res.report.audit.residual_low_flops, 0u);
  EXPECT_EQ(res.report.audit.update_low_flops, 0u);
  EXPECT_EQ(res.report.audit.residual_high_flops, res.report.residual_norms.size() * 2 * 50 * 50);
  EXPECT_EQ(res.report.audit.update_high_flops, res.report.iterations * 50);
}

TEST(IrSolve, NormEstimateComputedOnceAndReported) {
  const System s = make_system(30, 1.0, 1);
  const auto res = ir_solve(s.a, s.b);
  EXPECT_NEAR(res.report.a_norm_estimate, 1.0, 1e-10);
}

TEST(IrSolve, Deterministic) {
  const System s = make_system(70, 1e4, 9);
  const auto r1 = ir_solve(s.a, s.b);
  const auto r2 = ir_solve(s.a, s.b);
  EXPECT_EQ(r1.x, r2.x);
  EXPECT_EQ(r1.report.residual_norms, r2.report.residual_norms);
}

TEST(SolveReference, Examples) {
  const Vector<double> b{4, -1, 2};
  EXPECT_EQ(solve_reference(DenseMatrix<double>::identity(3), b), b);
  const auto x = solve_reference(DenseMatrix<double>::from_rows({{2, 1}, {1, 3}}), Vector<double>{3, 4});
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  EXPECT_THROW((void)solve_reference(DenseMatrix<double>::from_rows({{1, 1}, {1, 1}}), Vector<double>{1, 1}),
               SingularPivot);
}

TEST(SolveLow, SinglePrecisionAccuracyOnly) {
  const System s = make_system(100, 1e3, 2);
  const auto x = solve_low(s.a, s.b);
  const double err = oracle::rel_error(x, s.x_true);
  EXPECT_GT(err, 1e-12);
  EXPECT_LT(err, 1e-2);
}
