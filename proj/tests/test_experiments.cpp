#include <gtest/gtest.h>

#include "mixprec/experiments.hpp"
#include "support/oracles.hpp"

using namespace mixprec;

TEST(GenPrescribedCond, UnitKappaIsOrthogonal) {
  const auto a = gen_prescribed_cond(30, 1.0, 4);
  const Eigen::MatrixXd m = oracle::to_eigen(a);
  EXPECT_LE((m.transpose() * m - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(oracle::cond2(a), 1.0, 1e-12);
}

TEST(GenPrescribedCond, MeasuredConditionMatchesTarget) {
  for (double kappa : {1e1, 1e3, 1e6}) {
    const auto a = gen_prescribed_cond(50, kappa, 7);
    EXPECT_NEAR(oracle::cond2(a), kappa, 0.01 * kappa) << kappa;
  }
}

TEST(GenPrescribedCond, SingularValuesAreLogSpaced) {
  const auto s = oracle::singular_values(gen_prescribed_cond(20, 1e4, 1));
  for (Eigen::Index i = 0; i < s.size(); ++i) EXPECT_NEAR(s(i), std::pow(1e4, -static_cast<double>(i) / 19.0), 1e-10);
}

TEST(GenPrescribedCond, DeterministicPerSeed) {
  EXPECT_EQ(gen_prescribed_cond(25, 100.0, 3), gen_prescribed_cond(25, 100.0, 3));
  EXPECT_FALSE(gen_prescribed_cond(25, 100.0, 3) == gen_prescribed_cond(25, 100.0, 4));
}

TEST(GenPrescribedCond, NormEstimateIsOne) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double est = spectral_norm_estimate(gen_prescribed_cond(100, 1e5, seed));
    EXPECT_GE(est, 0.99);
    EXPECT_LE(est, 1.01);
  }
}

TEST(GenPrescribedCond, RejectsBadArguments) {
  EXPECT_THROW((void)gen_prescribed_cond(1, 10.0, 0), InvalidArgument);
  EXPECT_THROW((void)gen_prescribed_cond(10, 0.5, 0), InvalidArgument);
}

TEST(GenPrescribedCondSpd, SymmetricWithTargetCondition) {
  const auto a = gen_prescribed_cond_spd(40, 1e3, 2);
  for (std::size_t j = 0; j < 40; ++j)
    for (std::size_t i = 0; i < 40; ++i) ASSERT_EQ(a(i, j), a(j, i));
  EXPECT_NEAR(oracle::cond2(a), 1e3, 10.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(oracle::to_eigen(a));
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
}

TEST(GenSpd, SymmetricPositiveDefinite) {
  const auto a = gen_spd(30, 5);
  for (std::size_t j = 0; j < 30; ++j)
    for (std::size_t i = 0; i < 30; ++i) ASSERT_EQ(a(i, j), a(j, i));
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(oracle::to_eigen(a));
  EXPECT_GE(eig.eigenvalues().minCoeff(), 30.0 - 1e-10);
}

TEST(Stencils, Poisson1dStructure) {
  const auto a = poisson1d(5).to_dense();
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a(i, i), 2.0);
    if (i > 0) EXPECT_EQ(a(i, i - 1), -1.0);
    if (i + 1 < 5) EXPECT_EQ(a(i, i + 1), -1.0);
  }
  EXPECT_EQ(poisson1d(5).nnz(), 13u);
}

TEST(Stencils, Poisson2dRowSumsAndSymmetry) {
  const auto a = poisson2d(4);
  EXPECT_EQ(a.rows(), 16u);
  EXPECT_EQ(a.nnz(), 16u * 5 - 4 * 4);
  const auto d = a.to_dense();
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) ASSERT_EQ(d(i, j), d(j, i));
  // interior rows sum to zero, corner rows to 2
  const auto s = matvec(a, Vector<double>(16, 1.0));
  EXPECT_EQ(s[5], 0.0);
  EXPECT_EQ(s[0], 2.0);
}

TEST(Stencils, ConvectionDiffusionIsNonsymmetric) {
  const auto d = convection_diffusion1d(4, 0.3).to_dense();
  EXPECT_DOUBLE_EQ(d(1, 0), -1.3);
  EXPECT_DOUBLE_EQ(d(0, 1), -0.7);
}

TEST(CondSweep, SmallSweepShape) {
  CondSweepSpec spec;
  spec.n = 60;
  spec.trials = 8;
  spec.kappas = {1e1, 1e3, 1e5, 1e9};
  const auto rows = condition_sweep(spec);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(rows[i].failure_rate, 0.0) << rows[i].kappa;
    ASSERT_TRUE(rows[i].predicted_iters.has_value());
    EXPECT_LE(rows[i].mean_iters, static_cast<double>(*rows[i].predicted_iters) + 1.0);
    if (i > 0) EXPECT_GE(rows[i].mean_iters, rows[i - 1].mean_iters);
  }
  EXPECT_GE(rows[3].failure_rate, 0.95);
  EXPECT_EQ(rows[3].mean_iters, 30.0);
  EXPECT_FALSE(rows[3].predicted_iters.has_value());
}

TEST(CondSweep, FormulaPredictionsAttached) {
  CondSweepSpec spec;
  spec.n = 20;
  spec.trials = 1;
  spec.kappas = {1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  const auto rows = condition_sweep(spec);
  const std::size_t expected[] = {3, 4, 4, 5, 8, 14};
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].predicted_iters, expected[i]) << rows[i].kappa;
}

TEST(CondSweep, DeterministicPerSeed) {
  CondSweepSpec spec;
  spec.n = 40;
  spec.trials = 5;
  spec.kappas = {1e4, 1e6};
  spec.seed = 11;
  const auto a = condition_sweep(spec);
  const auto b = condition_sweep(spec);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].mean_iters, b[i].mean_iters);
}

TEST(CondSweep, Validation) {
  CondSweepSpec spec;
  spec.trials = 0;
  EXPECT_THROW((void)condition_sweep(spec), InvalidArgument);
  spec.trials = 1;
  spec.kappas = {0.5};
  EXPECT_THROW((void)condition_sweep(spec), InvalidArgument);
}

TEST(Registry, RestartDefaultsGolden) {
  EXPECT_EQ(restart_defaults(1), (RestartConfig{30, 20, 150}));
  EXPECT_EQ(restart_defaults(2), (RestartConfig{20, 10, 40}));
  EXPECT_EQ(restart_defaults(3), (RestartConfig{100, 9, 300}));
  EXPECT_EQ(restart_defaults(4), (RestartConfig{10, 4, 18}));
  EXPECT_EQ(restart_defaults(5), (RestartConfig{20, 20, 300}));
  EXPECT_EQ(restart_defaults(6), (RestartConfig{20, 10, 50}));
  EXPECT_EQ(restart_defaults(4).m, 2 * restart_defaults(4).m_out + restart_defaults(4).m_in);
  EXPECT_GT(restart_defaults(3).m, 2 * restart_defaults(3).m_out + restart_defaults(3).m_in);
}

TEST(Registry, UnknownIds) {
  EXPECT_THROW((void)restart_defaults(0), UnknownMatrixId);
  EXPECT_THROW((void)restart_defaults(7), UnknownMatrixId);
  EXPECT_THROW((void)registry_entry(-1), UnknownMatrixId);
}

TEST(Registry, MetadataGolden) {
  const auto& r = matrix_registry();
  ASSERT_EQ(r.size(), 6u);
  EXPECT_EQ(registry_entry(1).name, "SiO");
  EXPECT_EQ(registry_entry(1).size, 33401u);
  EXPECT_EQ(registry_entry(1).nonzeroes, 1317655u);
  EXPECT_EQ(registry_entry(2).name, "Lin");
  EXPECT_EQ(registry_entry(2).nonzeroes, 1766400u);
  EXPECT_EQ(registry_entry(3).name, "c-71");
  EXPECT_EQ(registry_entry(4).name, "cage-11");
  EXPECT_FALSE(registry_entry(4).symmetric);
  EXPECT_EQ(registry_entry(5).name, "raefsky3");
  EXPECT_EQ(registry_entry(5).size, 21200u);
  EXPECT_EQ(registry_entry(6).name, "poisson3Db");
  EXPECT_EQ(registry_entry(6).size, 85623u);
  EXPECT_EQ(registry_entry(6).nonzeroes, 2374949u);
}

TEST(TimingBench, RowsAreConsistent) {
  const auto rows = timing_bench({64, 128}, BenchOptions{3, 5, Backend::LU});
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_GT(r.dp_seconds, 0.0);
    EXPECT_GT(r.sp_seconds, 0.0);
    EXPECT_GT(r.mixed_seconds, 0.0);
    EXPECT_GE(r.iterations, 1u);
    EXPECT_DOUBLE_EQ(r.speedup_mixed(), r.dp_seconds / r.mixed_seconds);
  }
  const auto again = timing_bench({64, 128}, BenchOptions{3, 5, Backend::LU});
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].iterations, again[i].iterations);
}

TEST(TimingBench, CholeskyBackendAndValidation) {
  const auto rows = timing_bench({50}, BenchOptions{3, 1, Backend::Cholesky});
  EXPECT_GE(rows.at(0).iterations, 1u);
  EXPECT_THROW((void)timing_bench({50}, BenchOptions{2, 1, Backend::LU}), InvalidArgument);
}
