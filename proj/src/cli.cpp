#include "mixprec/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mixprec/csv.hpp"
#include "mixprec/experiments.hpp"
#include "mixprec/krylov.hpp"
#include "mixprec/matrix_market.hpp"
#include "mixprec/mixed_ir.hpp"

namespace mixprec {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;

struct SolveDenseArgs {
  std::string matrix;
  std::size_t random_n = 0;
  double kappa = 100.0;
  std::string backend = "lu";
  std::string mode = "mixed";
  std::size_t max_iters = 30;
  std::string stop = "backward";
  std::uint64_t seed = 0;
  std::string out;
};

struct SolveIterativeArgs {
  std::string matrix;
  std::string stencil;
  std::size_t m_in = 20;
  std::size_t m_out = 10;
  std::size_t m = 40;
  std::string mode = "mixed";
  std::optional<double> tol;
  std::size_t max_iters = 1000;
  std::string out;
};

struct CondSweepArgs {
  std::size_t n = 200;
  std::size_t trials = 200;
  std::vector<double> kappas{1e1, 1e2, 1e3, 1e4, 1e5, 1e6};
  std::size_t max_iters = 30;
  std::string stop = "match-ref";
  std::uint64_t seed = 0;
  std::string out;
};

struct BenchArgs {
  std::vector<std::size_t> sizes{256, 512, 1024};
  std::size_t repeats = 3;
  std::uint64_t seed = 0;
  std::string out;
};

void emit(const std::string& csv, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << csv;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f << csv;
  if (!f) throw Error("failed writing '" + path + "'");
}

StopRule parse_stop(const std::string& s) {
  return s == "match-ref" ? StopRule::match_reference(1.0) : StopRule::backward_error();
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

std::size_t count_nonzeros(const DenseMatrix<High>& a) {
  std::size_t nnz = 0;
  for (double v : a.data()) nnz += v != 0.0;
  return nnz;
}

int run_solve_dense(const SolveDenseArgs& args, std::ostream& out) {
  using Clock = std::chrono::steady_clock;
  const Backend backend = args.backend == "cholesky" ? Backend::Cholesky : Backend::LU;
  DenseMatrix<High> a(0, 0);
  Vector<High> b(0);
  if (!args.matrix.empty()) {
    a = as_dense(read_matrix_market(args.matrix));
    if (!a.square()) throw DimensionMismatch("solve-dense: matrix must be square");
    b = matvec(a, Vector<High>(a.rows(), 1.0));
  } else {
    a = backend == Backend::Cholesky ? gen_prescribed_cond_spd(args.random_n, args.kappa, args.seed)
                                     : gen_prescribed_cond(args.random_n, args.kappa, args.seed);
    b = matvec(a, gen_gaussian_vector(args.random_n, mix_seed(args.seed, 1)));
  }

  CsvRow row{args.mode, as_int(a.rows()), as_int(count_nonzeros(a)), args.backend};
  int code = kExitOk;
  if (args.mode == "mixed") {
    IrConfig cfg;
    cfg.max_iters = args.max_iters;
    cfg.stop = parse_stop(args.stop);
    cfg.backend = backend;
    const IrResult res = ir_solve_or_fallback(a, b, cfg);
    const SolveReport& rep = res.report;
    const bool converged = rep.converged && !rep.fell_back_to_high;
    if (!converged) code = kExitNoConvergence;
    row.insert(row.end(), {as_int(rep.iterations), converged, rep.final_residual(),
                           rep.a_norm_estimate > 0.0 ? CsvCell{rep.a_norm_estimate} : CsvCell{},
                           rep.times.factor_seconds, rep.times.total_seconds});
  } else if (args.mode == "double") {
    const IrResult res = solve_reference_report(a, b, backend);
    const SolveReport& rep = res.report;
    row.insert(row.end(), {as_int(0), true, rep.final_residual(), CsvCell{}, rep.times.factor_seconds,
                           rep.times.total_seconds});
  } else {
    const auto t0 = Clock::now();
    const Vector<High> x = solve_low(a, b, backend);
    const double total = std::chrono::duration<double>(Clock::now() - t0).count();
    row.insert(row.end(), {as_int(0), true, norm2(residual(a, x, b)), CsvCell{}, CsvCell{}, total});
  }
  emit(write_csv({row}, CsvSchema::solve()), args.out, out);
  return code;
}

CsrMatrix<High> build_stencil(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = spec.find(':', start);
    parts.push_back(spec.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  const auto number = [&](std::size_t i) -> double {
    try {
      std::size_t used = 0;
      const double v = std::stod(parts.at(i), &used);
      if (used != parts[i].size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw InvalidArgument("malformed stencil '" + spec + "'");
    }
  };
  const auto order = [&](std::size_t i) -> std::size_t {
    const double v = number(i);
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw InvalidArgument("stencil order must be a positive integer in '" + spec + "'");
    }
    return static_cast<std::size_t>(v);
  };
  if (parts[0] == "poisson1d" && parts.size() == 2) return poisson1d(order(1));
  if (parts[0] == "poisson2d" && parts.size() == 2) return poisson2d(order(1));
  if (parts[0] == "convdiff" && (parts.size() == 2 || parts.size() == 3)) {
    return convection_diffusion1d(order(1), parts.size() == 3 ? number(2) : 0.5);
  }
  throw InvalidArgument("unknown stencil '" + spec + "' (poisson1d:N, poisson2d:K, convdiff:N[:C])");
}

int run_solve_iterative(const SolveIterativeArgs& args, std::ostream& out) {
  const CsrMatrix<High> a = !args.matrix.empty() ? as_csr(read_matrix_market(args.matrix)) : build_stencil(args.stencil);
  if (a.rows() != a.cols()) throw DimensionMismatch("solve-iterative: matrix must be square");
  const Vector<High> b = matvec(a, Vector<High>(a.rows(), 1.0));

  KrylovStop stop;
  CsvCell a_norm_cell;
  if (args.tol) {
    stop = KrylovStop::relative(*args.tol);
  } else {
    const double a_norm = spectral_norm_estimate(a);
    stop = KrylovStop::backward_error(unit_roundoff<High>(), a_norm);
    a_norm_cell = a_norm;
  }

  RestartConfig cfg{args.m_in, args.m_out, args.m};
  cfg.validate();
  const KrylovResult res = [&] {
    if (args.mode == "plain-gmres") return gmres_reference(a, b, cfg.m, stop, args.max_iters);
    const CsrMatrix<Low> a_low = demote(a);
    return fgmres_inner_outer(a, a_low, b, cfg, stop, args.max_iters,
                              args.mode == "mixed" ? InnerPrecision::Low : InnerPrecision::High);
  }();
  const SolveReport& rep = res.report;
  const CsvRow row{args.mode,        as_int(a.rows()),      as_int(a.nnz()),
                   std::string("csr"), as_int(rep.iterations), rep.converged,
                   rep.final_residual(), a_norm_cell,          CsvCell{},
                   rep.times.total_seconds};
  emit(write_csv({row}, CsvSchema::solve()), args.out, out);
  return rep.converged ? kExitOk : kExitNoConvergence;
}

int run_cond_sweep(const CondSweepArgs& args, std::ostream& out) {
  CondSweepSpec spec;
  spec.n = args.n;
  spec.trials = args.trials;
  spec.kappas = args.kappas;
  spec.max_iters = args.max_iters;
  spec.seed = args.seed;
  spec.stop = parse_stop(args.stop);
  const auto rows = condition_sweep(spec);

  std::vector<CsvRow> table;
  bool diverging = false;
  for (const auto& r : rows) {
    table.push_back({r.kappa, as_int(r.n), as_int(r.trials), r.mean_iters, r.failure_rate,
                     r.predicted_iters ? CsvCell{as_int(*r.predicted_iters)} : CsvCell{}});
    diverging = diverging || r.failure_rate >= 0.5;
  }
  emit(write_csv(table, CsvSchema::cond_sweep()), args.out, out);
  return diverging ? kExitNoConvergence : kExitOk;
}

int run_bench(const BenchArgs& args, std::ostream& out) {
  BenchOptions opts;
  opts.repeats = args.repeats;
  opts.seed = args.seed;
  std::vector<CsvRow> table;
  for (const auto& r : timing_bench(args.sizes, opts)) {
    table.push_back({as_int(r.n), r.dp_seconds, r.sp_seconds, r.mixed_seconds, r.speedup_mixed(), as_int(r.iterations)});
  }
  emit(write_csv(table, CsvSchema::bench()), args.out, out);
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-precision iterative refinement and inner-outer Krylov solvers", "mixprec"};
  app.require_subcommand(1);

  SolveDenseArgs dense;
  auto* sd = app.add_subcommand("solve-dense", "Solve a dense system by mixed-precision iterative refinement");
  auto* sd_matrix = sd->add_option("--matrix", dense.matrix, "MatrixMarket file (b = A * ones)");
  auto* sd_random = sd->add_option("--random", dense.random_n, "Random order-N system with prescribed condition")
                        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 16));
  sd_matrix->excludes(sd_random);
  sd_random->excludes(sd_matrix);
  sd->add_option("--kappa", dense.kappa, "2-norm condition number of the random matrix")
      ->check(CLI::Range(1.0, 1e300))
      ->capture_default_str();
  sd->add_option("--backend", dense.backend, "Factorization")
      ->check(CLI::IsMember({"lu", "cholesky"}))
      ->capture_default_str();
  sd->add_option("--mode", dense.mode, "mixed: refinement; double / single: one direct solve")
      ->check(CLI::IsMember({"mixed", "double", "single"}))
      ->capture_default_str();
  sd->add_option("--max-iters", dense.max_iters, "Refinement step cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sd->add_option("--stop", dense.stop, "Stopping rule")
      ->check(CLI::IsMember({"backward", "match-ref"}))
      ->capture_default_str();
  sd->add_option("--seed", dense.seed, "Generator seed")->capture_default_str();
  sd->add_option("--out", dense.out, "CSV output file (default stdout)");

  SolveIterativeArgs iter;
  auto* si = app.add_subcommand("solve-iterative", "Solve a sparse system with inner-outer FGMRES or GMRES(m)");
  auto* si_matrix = si->add_option("--matrix", iter.matrix, "MatrixMarket file (b = A * ones)");
  auto* si_stencil = si->add_option("--stencil", iter.stencil, "poisson1d:N, poisson2d:K or convdiff:N[:C]");
  si_matrix->excludes(si_stencil);
  si_stencil->excludes(si_matrix);
  si->add_option("--m-in", iter.m_in, "Inner GMRES cycle length")->capture_default_str();
  si->add_option("--m-out", iter.m_out, "Outer FGMRES restart length")->capture_default_str();
  si->add_option("--m", iter.m, "Restart length for plain-gmres")->capture_default_str();
  si->add_option("--mode", iter.mode, "Inner precision, or plain GMRES(m) in double")
      ->check(CLI::IsMember({"mixed", "double-inner", "plain-gmres"}))
      ->capture_default_str();
  si->add_option("--tol", iter.tol, "Relative residual tolerance (default: backward-error rule)")
      ->check(CLI::Range(0.0, 1.0));
  si->add_option("--max-iters", iter.max_iters, "Outer step cap (restart cap for plain-gmres)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  si->add_option("--out", iter.out, "CSV output file (default stdout)");

  CondSweepArgs sweep;
  auto* cs = app.add_subcommand("cond-sweep", "Mean refinement steps versus condition number");
  cs->add_option("--n", sweep.n, "Matrix order")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 14))->capture_default_str();
  cs->add_option("--trials", sweep.trials, "Matrices per condition number")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cs->add_option("--kappas", sweep.kappas, "Comma-separated condition numbers")
      ->delimiter(',')
      ->check(CLI::Range(1.0, 1e300));
  cs->add_option("--max-iters", sweep.max_iters, "Refinement step cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cs->add_option("--stop", sweep.stop, "Stopping rule")
      ->check(CLI::IsMember({"backward", "match-ref"}))
      ->capture_default_str();
  cs->add_option("--seed", sweep.seed, "Base seed")->capture_default_str();
  cs->add_option("--out", sweep.out, "CSV output file (default stdout)");

  BenchArgs bench;
  auto* bn = app.add_subcommand("bench", "Wall-clock double, single and mixed dense solves");
  bn->add_option("--sizes", bench.sizes, "Comma-separated matrix orders")
      ->delimiter(',')
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 14));
  bn->add_option("--repeats", bench.repeats, "Timed repeats per size (median reported)")
      ->check(CLI::Range(std::size_t{3}, std::size_t{1000}))
      ->capture_default_str();
  bn->add_option("--seed", bench.seed, "Generator seed")->capture_default_str();
  bn->add_option("--out", bench.out, "CSV output file (default stdout)");

  const auto usage = [&](const std::string& message) {
    err << "error: " << message << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitUsage;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return usage(e.what());
  }

  try {
    if (*sd) {
      if (dense.matrix.empty() && dense.random_n == 0) return usage("solve-dense needs --matrix or --random");
      return run_solve_dense(dense, out);
    }
    if (*si) {
      if (iter.matrix.empty() && iter.stencil.empty()) return usage("solve-iterative needs --matrix or --stencil");
      return run_solve_iterative(iter, out);
    }
    if (*cs) return run_cond_sweep(sweep, out);
    return run_bench(bench, out);
  } catch (const InvalidArgument& e) {
    return usage(e.what());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

int cli_main(int argc, const char* const* argv) { return cli_main(argc, argv, std::cout, std::cerr); }

}  // namespace mixprec
