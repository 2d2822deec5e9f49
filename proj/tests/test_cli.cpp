#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mixprec/cli.hpp"
#include "mixprec/csv.hpp"

using namespace mixprec;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mixprec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Blanks timing columns so reports can be compared byte for byte.
std::string strip_timing(const std::string& text, const CsvSchema& schema) {
  auto rows = parse_csv(text, schema);
  for (auto& row : rows)
    for (std::size_t j = 0; j < schema.columns.size(); ++j)
      if (schema.columns[j].timing) row[j] = std::monostate{};
  return write_csv(rows, schema);
}

}  // namespace

TEST(Cli, SolveDenseRandomWellConditioned) {
  const auto r = run({"solve-dense", "--random", "100", "--kappa", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out, CsvSchema::solve());
  ASSERT_EQ(rows.size(), 1u);
  const auto& s = CsvSchema::solve();
  EXPECT_EQ(std::get<std::string>(rows[0][s.index_of("mode")]), "mixed");
  EXPECT_EQ(std::get<std::int64_t>(rows[0][s.index_of("n")]), 100);
  EXPECT_LE(std::get<std::int64_t>(rows[0][s.index_of("iterations")]), 4);
  EXPECT_TRUE(std::get<bool>(rows[0][s.index_of("converged")]));
}

TEST(Cli, SolveDenseModesAndBackends) {
  for (const char* mode : {"mixed", "double", "single"}) {
    for (const char* backend : {"lu", "cholesky"}) {
      const auto r = run({"solve-dense", "--random", "40", "--mode", mode, "--backend", backend});
      EXPECT_EQ(r.code, 0) << mode << " " << backend << ": " << r.err;
      EXPECT_NO_THROW((void)parse_csv(r.out, CsvSchema::solve()));
    }
  }
}

TEST(Cli, SolveDenseFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "mixprec_cli_test.mtx";
  {
    std::ofstream f(path);
    f << "%%MatrixMarket matrix coordinate real general\n3 3 4\n1 1 4\n2 2 3\n3 3 2\n1 3 1\n";
  }
  const auto r = run({"solve-dense", "--matrix", path.string()});
  std::filesystem::remove(path);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out, CsvSchema::solve());
  EXPECT_EQ(std::get<std::int64_t>(rows.at(0)[CsvSchema::solve().index_of("nnz")]), 4);
}

TEST(Cli, MissingFileIsIoError) {
  const auto r = run({"solve-dense", "--matrix", "/nonexistent/missing.mtx"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, CondSweepIllConditionedExitsTwo) {
  const auto r = run({"cond-sweep", "--kappas", "1e9", "--trials", "5"});
  EXPECT_EQ(r.code, 2);
  const auto rows = parse_csv(r.out, CsvSchema::cond_sweep());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(std::get<double>(rows[0][CsvSchema::cond_sweep().index_of("failure_rate")]), 0.95);
}

TEST(Cli, CondSweepIsByteDeterministic) {
  const std::vector<std::string> args{"cond-sweep", "--n", "30", "--trials", "3", "--kappas", "10,1000", "--seed", "4"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(parse_csv(a.out, CsvSchema::cond_sweep()).size(), 2u);
}

TEST(Cli, SolveDenseDeterministicExceptTiming) {
  const std::vector<std::string> args{"solve-dense", "--random", "60", "--kappa", "1e4", "--seed", "9"};
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(strip_timing(a.out, CsvSchema::solve()), strip_timing(b.out, CsvSchema::solve()));
}

TEST(Cli, SolveIterativeStencils) {
  for (const char* mode : {"mixed", "double-inner", "plain-gmres"}) {
    const auto r = run({"solve-iterative", "--stencil", "poisson2d:12", "--mode", mode});
    ASSERT_EQ(r.code, 0) << mode << ": " << r.err;
    const auto rows = parse_csv(r.out, CsvSchema::solve());
    EXPECT_EQ(std::get<std::string>(rows.at(0)[CsvSchema::solve().index_of("backend")]), "csr");
    EXPECT_TRUE(std::get<bool>(rows.at(0)[CsvSchema::solve().index_of("converged")]));
  }
  EXPECT_EQ(run({"solve-iterative", "--stencil", "convdiff:50", "--tol", "1e-8"}).code, 0);
  EXPECT_EQ(run({"solve-iterative", "--stencil", "poisson1d:40"}).code, 0);
}

TEST(Cli, SolveIterativeNonConvergenceExitsTwo) {
  const auto r = run({"solve-iterative", "--stencil", "poisson1d:2000", "--m-in", "2", "--m-out", "2", "--max-iters",
                      "3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(parse_csv(r.out, CsvSchema::solve()).size(), 1u);
}

TEST(Cli, BenchWritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "mixprec_cli_bench.csv";
  const auto r = run({"bench", "--sizes", "32,64", "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::filesystem::remove(path);
  EXPECT_EQ(parse_csv(text, CsvSchema::bench()).size(), 2u);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"solve-dense"}).code, 1);
  EXPECT_EQ(run({"solve-dense", "--random", "10", "--matrix", "x.mtx"}).code, 1);
  EXPECT_EQ(run({"solve-dense", "--random", "1"}).code, 1);
  EXPECT_EQ(run({"solve-dense", "--random", "10", "--kappa", "0.5"}).code, 1);
  EXPECT_EQ(run({"solve-dense", "--random", "10", "--mode", "quad"}).code, 1);
  EXPECT_EQ(run({"solve-iterative", "--stencil", "poisson3d:4"}).code, 1);
  EXPECT_EQ(run({"solve-iterative", "--stencil", "poisson2d:x"}).code, 1);
  EXPECT_EQ(run({"bench", "--repeats", "2"}).code, 1);
  const auto r = run({"cond-sweep", "--kappas", "abc"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE((r.out + r.err).find("solve-dense"), std::string::npos);
}
