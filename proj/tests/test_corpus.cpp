#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlls/corpus.hpp"

using namespace nlls;

namespace {

const ProblemRegistry& reg() { return ProblemRegistry::builtin(); }

}  // namespace

TEST(Registry, Rosenbrock) {
  auto p = reg().get("rosenbrock");
  EXPECT_EQ(p->n(), 2u);
  EXPECT_EQ(p->m(), 2u);
  EXPECT_EQ(p->start_point(), (Vector{-1.2, 1.0}));
  EXPECT_NEAR(objective(*p, p->start_point()), 12.1, 1e-12);
  const Vector f = p->residual(Vector{2, 3});
  EXPECT_EQ(f, (Vector{10 * (3 - 4), 1 - 2}));
}

TEST(Registry, Example2) {
  auto p = reg().get("example2");
  EXPECT_EQ(p->n(), 3u);
  EXPECT_EQ(p->m(), 3u);
  const Vector f = p->residual(Vector{0.3, 0.1, 2});
  EXPECT_NEAR(f[0], std::exp(0.2) - 1, 1e-15);
  EXPECT_EQ(f[1], 1.0);
  EXPECT_EQ(f[2], 3.0);
  const auto ks = p->known_solution();
  ASSERT_TRUE(ks);
  EXPECT_DOUBLE_EQ(ks->f_bar, std::sqrt(2.0));
  EXPECT_EQ(ks->kind, DistanceKind::kClosedForm);
}

TEST(Registry, ExtendedRosenbrock) {
  auto p = reg().get("extended_rosenbrock", 10);
  EXPECT_EQ(p->n(), 10u);
  EXPECT_EQ(p->m(), 10u);
  EXPECT_EQ(reg().get("extended_rosenbrock", 20)->n(), 20u);
  EXPECT_THROW(reg().get("extended_rosenbrock", 7), std::invalid_argument);
}

TEST(Registry, Errors) {
  EXPECT_THROW(reg().get("nosuch"), std::out_of_range);
  EXPECT_THROW(reg().get("rosenbrock", 4), std::invalid_argument);
  EXPECT_FALSE(reg().contains("nosuch"));
  EXPECT_TRUE(reg().contains("wood"));
}

TEST(Registry, ListIsAlphabeticalAndComplete) {
  const auto list = reg().list();
  EXPECT_GE(list.size(), 17u);
  for (std::size_t i = 1; i < list.size(); ++i) {
    EXPECT_LT(list[i - 1].name, list[i].name);
  }
  auto find = [&](const std::string& name) -> const ProblemInfo* {
    for (const auto& info : list) {
      if (info.name == name) return &info;
    }
    return nullptr;
  };
  const ProblemInfo* e1 = find("example1");
  ASSERT_TRUE(e1);
  EXPECT_EQ(e1->residual_class, ResidualClass::kNonzero);
  EXPECT_FALSE(e1->variable_dim);
  const ProblemInfo* ros = find("rosenbrock");
  ASSERT_TRUE(ros);
  EXPECT_EQ(ros->residual_class, ResidualClass::kZero);
  EXPECT_FALSE(ros->variable_dim);

  int mgh_zero = 0, mgh_nonzero = 0;
  for (const auto& info : list) {
    if (info.name.rfind("example", 0) == 0) continue;
    (info.residual_class == ResidualClass::kZero ? mgh_zero : mgh_nonzero)++;
  }
  EXPECT_GE(mgh_zero + mgh_nonzero, 15);
  EXPECT_GT(mgh_zero, 0);
  EXPECT_GT(mgh_nonzero, 0);
}

TEST(Registry, AddRejectsDuplicates) {
  ProblemRegistry r;
  ProblemSpec spec;
  spec.name = "dup";
  spec.default_n = 1;
  spec.make = [](std::size_t) {
    return ProblemRegistry::builtin().get("example2");
  };
  r.add(spec);
  EXPECT_THROW(r.add(spec), std::invalid_argument);
}

TEST(Registry, JacobiansMatchFiniteDifferences) {
  for (const ProblemInfo& info : reg().list()) {
    auto p = reg().get(info.name);
    const Vector x0 = p->start_point();
    EXPECT_TRUE(check_jacobian(*p, x0, 1e-5).pass) << info.name;
    for (const Vector& x : perturbed_points(x0, 10)) {
      const auto rep = check_jacobian(*p, x, 1e-5);
      EXPECT_TRUE(rep.pass) << info.name << " err " << rep.max_rel_error;
    }
  }
}

TEST(Dist, Example2) {
  auto p = reg().get("example2");
  EXPECT_EQ(*dist_to_solution(*p, Vector{1, 1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(*dist_to_solution(*p, Vector{1, 0, 0}), std::sqrt(0.5));
  EXPECT_DOUBLE_EQ(*dist_to_solution(*p, Vector{0, 0, 1}), 1.0);
}

TEST(Dist, AbsentWithoutKnownSolution) {
  auto p = reg().get("kowalik_osborne");
  EXPECT_FALSE(dist_to_solution(*p, p->start_point()).has_value());
}

TEST(Example2, GradientVanishesOnStationarySet) {
  auto p = reg().get("example2");
  for (double t : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
    for (double g : gradient(*p, Vector{t, t, 0})) EXPECT_LE(std::abs(g), 1e-12);
  }
}

TEST(Example1, ReferenceMinimizer) {
  // 40-digit root of (x - 0.1) + (tanh x - y)(1 - tanh^2 x) per coordinate.
  const Vector xbar = example1_reference_minimizer();
  ASSERT_EQ(xbar.size(), 4u);
  EXPECT_NEAR(xbar[0], 0.1249612913648746198, 1e-15);
  EXPECT_NEAR(xbar[1], 0.074974548889026244011, 1e-15);
  EXPECT_NEAR(xbar[2], 0.1249612913648746198, 1e-15);
  EXPECT_NEAR(xbar[3], 0.074974548889026244011, 1e-15);
  auto p = reg().get("example1");
  const auto ks = p->known_solution();
  ASSERT_TRUE(ks);
  EXPECT_EQ(ks->kind, DistanceKind::kReference);
  EXPECT_NEAR(ks->f_bar, 0.071069911604982673731, 1e-15);
  for (double g : gradient(*p, xbar)) EXPECT_LE(std::abs(g), 1e-15);
}

TEST(Example1, ResidualChangeDominatesDistance) {
  auto p = reg().get("example1");
  const Vector xbar = example1_reference_minimizer();
  const Vector fbar = p->residual(xbar);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    Vector x(4);
    for (double& v : x) v = u(rng);
    Vector df = p->residual(x);
    axpy(-1.0, fbar, df);
    EXPECT_GE(norm2(df), *dist_to_solution(*p, x) * (1 - 1e-12));
  }
}

TEST(ZeroResidual, ObjectiveVanishesAtKnownMinimizers) {
  const std::vector<std::pair<std::string, Vector>> cases = {
      {"rosenbrock", {1, 1}},
      {"beale", {3, 0.5}},
      {"helical_valley", {1, 0, 0}},
      {"powell_singular", {0, 0, 0, 0}},
      {"wood", {1, 1, 1, 1}},
      {"brown_badly_scaled", {1e6, 2e-6}},
      {"box_3d", {1, 10, 1}},
      {"biggs_exp6", {1, 10, 1, 5, 4, 3}},
      {"extended_rosenbrock", Vector(10, 1.0)},
      {"example2_zero", {0.4, 0.4, 0}},
  };
  for (const auto& [name, x] : cases) {
    auto p = reg().get(name);
    EXPECT_EQ(reg().spec(name).residual_class, ResidualClass::kZero) << name;
    EXPECT_LE(objective(*p, x), 1e-15) << name;
    if (auto d = dist_to_solution(*p, x)) EXPECT_LE(*d, 1e-12) << name;
  }
}

TEST(LinearFullRank, KnownSolution) {
  auto p = reg().get("linear_full_rank", 5);
  EXPECT_EQ(p->m(), 10u);
  const auto ks = p->known_solution();
  ASSERT_TRUE(ks);
  EXPECT_NEAR(ks->f_bar, std::sqrt(5.0), 1e-12);
  const Vector xs(5, -1.0);
  EXPECT_NEAR(norm2(p->residual(xs)), std::sqrt(5.0), 1e-12);
  EXPECT_LE(*dist_to_solution(*p, xs), 1e-12);
}

TEST(Registry, ProblemsAreStateless) {
  auto p = reg().get("trigonometric");
  const Vector x = p->start_point();
  const Vector f1 = p->residual(x);
  p->residual(Vector(x.size(), 0.3));
  EXPECT_EQ(p->residual(x), f1);
}
