#include "mixprec/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <random>

#include "mixprec/dense_direct.hpp"

namespace mixprec {

namespace {

using Clock = std::chrono::steady_clock;

Eigen::MatrixXd random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // Sign-fix with diag(R) so Q is Haar distributed rather than biased by the
  // Householder sign convention.
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

template <typename F>
double median_seconds(std::size_t repeats, F&& run) {
  run();  // warm-up
  std::vector<double> t;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = Clock::now();
    run();
    t.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
  }
  std::nth_element(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(t.size() / 2), t.end());
  return t[t.size() / 2];
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
  // splitmix64 finalizer over the combined words
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

DenseMatrix<High> gen_prescribed_cond(std::size_t n, double kappa, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("gen_prescribed_cond: n must be >= 2");
  if (!(kappa >= 1.0)) throw InvalidArgument("gen_prescribed_cond: kappa must be >= 1");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd u = random_orthogonal(n, rng);
  const Eigen::MatrixXd v = random_orthogonal(n, rng);
  Eigen::VectorXd sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    sigma(static_cast<Eigen::Index>(i)) = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(n - 1));
  }
  const Eigen::MatrixXd a = u * sigma.asDiagonal() * v.transpose();
  return DenseMatrix<High>(n, n, std::vector<double>(a.data(), a.data() + a.size()));
}

DenseMatrix<High> gen_prescribed_cond_spd(std::size_t n, double kappa, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("gen_prescribed_cond_spd: n must be >= 2");
  if (!(kappa >= 1.0)) throw InvalidArgument("gen_prescribed_cond_spd: kappa must be >= 1");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd u = random_orthogonal(n, rng);
  Eigen::VectorXd sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    sigma(static_cast<Eigen::Index>(i)) = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(n - 1));
  }
  const Eigen::MatrixXd a = u * sigma.asDiagonal() * u.transpose();
  DenseMatrix<High> out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Vector<High> gen_gaussian_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> v(n);
  for (auto& x : v) x = gauss(rng);
  return Vector<High>(std::move(v));
}

DenseMatrix<High> gen_uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> data(n * n);
  for (auto& x : data) x = unif(rng);
  return DenseMatrix<High>(n, n, std::move(data));
}

DenseMatrix<High> gen_spd(std::size_t n, std::uint64_t seed) {
  const DenseMatrix<High> m = gen_uniform(n, seed);
  DenseMatrix<High> a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = j; i < n; ++i) {
      const double v = dot(m.col(i), m.col(j));
      a(i, j) = v;
      a(j, i) = v;
    }
    a(j, j) += static_cast<double>(n);
  }
  return a;
}

CsrMatrix<High> poisson1d(std::size_t n) { return convection_diffusion1d(n, 0.0); }

CsrMatrix<High> convection_diffusion1d(std::size_t n, double c) {
  if (n < 1) throw InvalidArgument("stencil order must be >= 1");
  std::vector<Triplet<double>> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) t.push_back({i, i - 1, -1.0 - c});
    t.push_back({i, i, 2.0});
    if (i + 1 < n) t.push_back({i, i + 1, -1.0 + c});
  }
  return CsrMatrix<High>::from_triplets(n, n, std::move(t));
}

CsrMatrix<High> poisson2d(std::size_t k) {
  if (k < 1) throw InvalidArgument("stencil order must be >= 1");
  const std::size_t n = k * k;
  std::vector<Triplet<double>> t;
  t.reserve(5 * n);
  for (std::size_t gy = 0; gy < k; ++gy) {
    for (std::size_t gx = 0; gx < k; ++gx) {
      const std::size_t i = gy * k + gx;
      if (gy > 0) t.push_back({i, i - k, -1.0});
      if (gx > 0) t.push_back({i, i - 1, -1.0});
      t.push_back({i, i, 4.0});
      if (gx + 1 < k) t.push_back({i, i + 1, -1.0});
      if (gy + 1 < k) t.push_back({i, i + k, -1.0});
    }
  }
  return CsrMatrix<High>::from_triplets(n, n, std::move(t));
}

void CondSweepSpec::validate() const {
  if (n < 2) throw InvalidArgument("CondSweepSpec: n must be >= 2");
  if (trials < 1) throw InvalidArgument("CondSweepSpec: trials must be >= 1");
  if (max_iters < 1) throw InvalidArgument("CondSweepSpec: max_iters must be >= 1");
  for (double k : kappas) {
    if (!(k >= 1.0)) throw InvalidArgument("CondSweepSpec: every kappa must be >= 1");
  }
}

std::vector<CondSweepRow> condition_sweep(const CondSweepSpec& spec) {
  spec.validate();
  IrConfig cfg;
  cfg.max_iters = spec.max_iters;
  cfg.stop = spec.stop;
  cfg.backend = Backend::LU;
  cfg.validate();

  std::vector<CondSweepRow> rows;
  for (std::size_t ik = 0; ik < spec.kappas.size(); ++ik) {
    const double kappa = spec.kappas[ik];
    std::size_t total_iters = 0;
    std::size_t failures = 0;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      const std::uint64_t trial_seed = mix_seed(spec.seed, ik, t);
      const DenseMatrix<High> a = gen_prescribed_cond(spec.n, kappa, trial_seed);
      const Vector<High> b = matvec(a, gen_gaussian_vector(spec.n, mix_seed(trial_seed, 1)));
      bool converged = false;
      std::size_t iters = spec.max_iters;
      try {
        const IrResult res = ir_solve(a, b, cfg);
        converged = res.report.converged;
        if (converged) iters = res.report.iterations;
      } catch (const FallbackRequired&) {
      }
      if (!converged) ++failures;
      total_iters += iters;
    }
    CondSweepRow row;
    row.kappa = kappa;
    row.n = spec.n;
    row.trials = spec.trials;
    row.mean_iters = static_cast<double>(total_iters) / static_cast<double>(spec.trials);
    row.failure_rate = static_cast<double>(failures) / static_cast<double>(spec.trials);
    row.predicted_iters = datta_iterations(PrecisionPair::single_double(), kappa);
    rows.push_back(row);
  }
  return rows;
}

const std::vector<MatrixRegistryEntry>& matrix_registry() {
  static const std::vector<MatrixRegistryEntry> registry{
      {1, "SiO", 33401, 1317655, true, false, 1e3},
      {2, "Lin", 25600, 1766400, true, false, 1e5},
      {3, "c-71", 76638, 859554, true, false, 1e1},
      {4, "cage-11", 39082, 559722, false, false, 1e0},
      {5, "raefsky3", 21200, 1488768, false, false, 1e1},
      {6, "poisson3Db", 85623, 2374949, false, false, 1e3},
  };
  return registry;
}

const MatrixRegistryEntry& registry_entry(int matrix_id) {
  for (const auto& e : matrix_registry()) {
    if (e.id == matrix_id) return e;
  }
  throw UnknownMatrixId(matrix_id);
}

RestartConfig restart_defaults(int matrix_id) {
  switch (matrix_id) {
    case 1: return {30, 20, 150};
    case 2: return {20, 10, 40};
    case 3: return {100, 9, 300};
    case 4: return {10, 4, 18};
    case 5: return {20, 20, 300};
    case 6: return {20, 10, 50};
    default: throw UnknownMatrixId(matrix_id);
  }
}

std::vector<BenchRow> timing_bench(const std::vector<std::size_t>& sizes, const BenchOptions& opts) {
  if (opts.repeats < 3) throw InvalidArgument("timing_bench: repeats must be >= 3");
  std::vector<BenchRow> rows;
  for (std::size_t n : sizes) {
    const std::uint64_t seed = mix_seed(opts.seed, n);
    const DenseMatrix<High> a = opts.backend == Backend::LU ? gen_uniform(n, seed) : gen_spd(n, seed);
    const Vector<High> b = matvec(a, gen_gaussian_vector(n, mix_seed(seed, 1)));
    const DenseMatrix<Low> a_low = demote(a);
    const Vector<Low> b_low = demote(b);

    IrConfig cfg;
    cfg.backend = opts.backend;

    BenchRow row;
    row.n = n;
    row.dp_seconds = median_seconds(opts.repeats, [&] { (void)solve_reference(a, b, opts.backend); });
    row.sp_seconds = median_seconds(opts.repeats, [&] {
      if (opts.backend == Backend::LU) {
        (void)lu_solve(lu_factor(a_low), b_low);
      } else {
        (void)cholesky_solve(cholesky_factor(a_low), b_low);
      }
    });
    std::size_t iterations = 0;
    row.mixed_seconds = median_seconds(opts.repeats, [&] { iterations = ir_solve(a, b, cfg).report.iterations; });
    row.iterations = iterations;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mixprec
