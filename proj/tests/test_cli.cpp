#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlls/bench.hpp"
#include "nlls/cli.hpp"

using namespace nlls;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nlls_cli_" + std::string(::testing::UnitTest::GetInstance()
                                          ->current_test_info()
                                          ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, SolveRosenbrock) {
  const CliRun r = cli({"solve", "--problem", "rosenbrock", "--variant", "v1",
                     "--step", "exact"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("status: converged_gradient\n"), std::string::npos);
  EXPECT_NE(r.out.find("iterations: 33\n"), std::string::npos);
  EXPECT_NE(r.out.find("f_final: "), std::string::npos);
  EXPECT_NE(r.out.find("grad_norm_final: "), std::string::npos);
  // One key: value pair per line.
  std::istringstream lines(r.out);
  for (std::string line; std::getline(lines, line);) {
    EXPECT_NE(line.find(": "), std::string::npos) << line;
  }
}

TEST_F(CliTest, SolveUnknownProblem) {
  const CliRun r = cli({"solve", "--problem", "nosuch", "--variant", "v1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("rosenbrock"), std::string::npos);
  EXPECT_NE(r.err.find("example2"), std::string::npos);
}

TEST_F(CliTest, SolveWritesTrace) {
  const std::string trace = path("t.csv");
  const CliRun r = cli({"solve", "--problem", "example2", "--variant", "v2",
                     "--step", "exact", "--trace", trace});
  EXPECT_EQ(r.code, kExitOk);
  const std::string text = slurp(trace);
  EXPECT_EQ(text.rfind("j,f,grad_norm,F_norm,gamma,mu,mu_bar,rho,success,"
                       "step_norm,cg_iters,pred\n",
                       0),
            0u);
  // Header plus one row per iteration (16 for this run).
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 17);
}

TEST_F(CliTest, SolveFailureStatus) {
  const CliRun r = cli({"solve", "--problem", "rosenbrock", "--max-iter", "2"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.out.find("status: max_iters"), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve"}).code, kExitUsage);
  EXPECT_EQ(cli({"solve", "--problem", "rosenbrock", "--variant", "v9"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"solve", "--problem", "rosenbrock", "--eta", "2"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"solve", "--problem", "rosenbrock", "--n", "4"}).code,
            kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  const std::string cfg = path("c.cfg");
  std::ofstream(cfg) << "# test\nvariant=v2\nmax_iters=2\n";
  CliRun r = cli({"solve", "--problem", "rosenbrock", "--config", cfg});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.out.find("variant: v2"), std::string::npos);
  r = cli({"solve", "--problem", "rosenbrock", "--config", cfg, "--max-iter",
           "10000", "--variant", "v1"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("variant: v1"), std::string::npos);

  std::ofstream(cfg) << "c1=0.5\n";
  r = cli({"solve", "--problem", "rosenbrock", "--config", cfg});
  EXPECT_EQ(r.code, kExitUsage);
}

TEST_F(CliTest, BenchWritesAllRows) {
  const std::string out = path("r.csv");
  const CliRun r = cli({"bench", "--suite", "all", "--variants", "v1,v2,zhao_fan",
                     "--eps", "1e-3,1e-5", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(out);
  const auto rows = read_results_csv(in);
  const std::size_t problems = ProblemRegistry::builtin().list().size();
  EXPECT_EQ(rows.size(), problems * 3 * 2);
  EXPECT_NE(r.out.find("summary["), std::string::npos);
}

TEST_F(CliTest, BenchZeroSuiteAndSummaryTotals) {
  const std::string out = path("z.csv");
  const CliRun r = cli({"bench", "--suite", "zero", "--out", out});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(out);
  const auto rows = read_results_csv(in);
  for (const auto& row : rows) {
    EXPECT_EQ(ProblemRegistry::builtin().spec(row.problem).residual_class,
              ResidualClass::kZero);
  }
  // Each summary line's class counts add up to its converged total.
  std::istringstream lines(r.out);
  int checked = 0;
  for (std::string line; std::getline(lines, line);) {
    if (line.rfind("summary[", 0) != 0) continue;
    int q, s, l, f, c;
    const auto pos = line.find("quadratic=");
    ASSERT_EQ(std::sscanf(line.c_str() + pos,
                          "quadratic=%d superlinear=%d linear_or_worse=%d "
                          "failed=%d converged=%d",
                          &q, &s, &l, &f, &c),
              5);
    EXPECT_EQ(q + s + l, c);
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST_F(CliTest, BenchBadVariantList) {
  EXPECT_EQ(cli({"bench", "--variants", "v1,nope", "--out", path("x.csv")}).code,
            kExitUsage);
}

TEST_F(CliTest, BenchIsByteStable) {
  const std::string a = path("a.csv");
  const std::string b = path("b.csv");
  ASSERT_EQ(cli({"bench", "--out", a, "--threads", "3"}).code, kExitOk);
  ASSERT_EQ(cli({"bench", "--out", b, "--threads", "1"}).code, kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(CliTest, ProfileHandExample) {
  const std::string in = path("hand.csv");
  std::ofstream(in)
      << "problem,n,solver_id,eps,converged,iterations,f_final,"
         "grad_norm_final,eoc,conv_class\n"
         "p1,2,s1,1e-05,1,2,0,0,,linear_or_worse\n"
         "p1,2,s2,1e-05,1,3,0,0,,linear_or_worse\n"
         "p2,2,s1,1e-05,1,4,0,0,,linear_or_worse\n"
         "p2,2,s2,1e-05,1,3,0,0,,linear_or_worse\n";
  const std::string svg = path("p.svg");
  const std::string csv = path("p.csv");
  const CliRun r = cli({"profile", "--in", in, "--eps", "1e-5", "--out", svg,
                     "--csv", csv});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(slurp(csv),
            "solver_id,tau,rho\n"
            "s1,1,0.5\n"
            "s1,1.3333333333333333,1\n"
            "s2,1,0.5\n"
            "s2,1.5,1\n");
  EXPECT_NE(slurp(svg).find("<svg"), std::string::npos);
}

TEST_F(CliTest, ProfileEmptySlice) {
  const std::string in = path("r.csv");
  ASSERT_EQ(cli({"bench", "--suite", "zero", "--out", in}).code, kExitOk);
  EXPECT_EQ(cli({"profile", "--in", in, "--eps", "1e-7", "--out",
                 path("p.svg")})
                .code,
            kExitUsage);
}

TEST_F(CliTest, BenchThenProfile) {
  const std::string in = path("r.csv");
  ASSERT_EQ(cli({"bench", "--out", in}).code, kExitOk);
  const CliRun r = cli({"profile", "--in", in, "--eps", "1e-5", "--out",
                     path("p.svg")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("profile[v1]"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("p.svg")));
}

TEST_F(CliTest, Check) {
  EXPECT_EQ(cli({"check", "--problem", "beale"}).code, kExitOk);
  EXPECT_EQ(cli({"check", "--problem", "beale", "--inject-fault"}).code,
            kExitFailure);
  EXPECT_EQ(cli({"check", "--problem", "extended_rosenbrock", "--n", "20"}).code,
            kExitOk);
  EXPECT_EQ(cli({"check", "--problem", "nosuch"}).code, kExitUsage);
  const CliRun r = cli({"check", "--problem", "wood"});
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
}

TEST_F(CliTest, List) {
  const CliRun r = cli({"list"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("example1: n=4 class=nonzero"), std::string::npos);
}
