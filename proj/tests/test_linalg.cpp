#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlls/linalg.hpp"

using namespace nlls;

namespace {

DenseMatrix random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  std::normal_distribution<double> d;
  DenseMatrix a(m, n);
  for (double& v : a.data()) v = d(rng);
  return a;
}

double residual_norm(const SpdSystem& sys, const Vector& s, const Vector& b) {
  Vector r = sys.apply(s);
  axpy(-1.0, b, r);
  return norm2(r);
}

}  // namespace

TEST(Norm2, SmallVectors) {
  EXPECT_DOUBLE_EQ(norm2(Vector{3, 4}), 5.0);
  EXPECT_EQ(norm2(Vector{0, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(norm2(Vector{1, 1, 1, 1}), 2.0);
}

TEST(Norm2, AvoidsOverflowAndUnderflow) {
  EXPECT_DOUBLE_EQ(norm2(Vector{3e200, 4e200}), 5e200);
  EXPECT_DOUBLE_EQ(norm2(Vector{3e-200, 4e-200}), 5e-200);
}

TEST(Gram, IdentityJacobian) {
  const SpdSystem sys = gram(DenseMatrix::identity(2), 1.0);
  EXPECT_EQ(sys.matrix(), DenseMatrix::from_rows({{2, 0}, {0, 2}}));
}

TEST(Gram, DiagonalJacobian) {
  const SpdSystem sys = gram(DenseMatrix::from_rows({{2, 0}, {0, 0}}), 0.5);
  EXPECT_EQ(sys.matrix(), DenseMatrix::from_rows({{4.5, 0}, {0, 0.5}}));
  EXPECT_EQ(sys.shift(), 0.5);
}

TEST(Gram, RowVector) {
  const SpdSystem sys = gram(DenseMatrix::from_rows({{1, 1}}), 1.0);
  EXPECT_EQ(sys.matrix(), DenseMatrix::from_rows({{2, 1}, {1, 2}}));
}

TEST(Gram, RejectsNonpositiveShift) {
  EXPECT_THROW(gram(DenseMatrix::identity(2), 0.0), std::invalid_argument);
  EXPECT_THROW(gram(DenseMatrix::identity(2), -1.0), std::invalid_argument);
}

TEST(Gram, BitwiseSymmetric) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const SpdSystem sys = gram(random_matrix(rng, 9, 6), 1e-3);
    const DenseMatrix& a = sys.matrix();
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(a(i, j), a(j, i));
    }
  }
}

TEST(Gram, EigenvaluesAtLeastShift) {
  std::mt19937_64 rng(11);
  const SpdSystem sys = gram(random_matrix(rng, 3, 5), 0.25);
  // J has rank 3 < 5, so the smallest eigenvalue is exactly the shift;
  // check through the Rayleigh quotient of random vectors.
  std::normal_distribution<double> d;
  for (int k = 0; k < 20; ++k) {
    Vector v(5);
    for (double& x : v) x = d(rng);
    EXPECT_GE(dot(v, sys.apply(v)) / dot(v, v), 0.25 * (1 - 1e-12));
  }
}

TEST(Cholesky, DiagonalSystems) {
  auto s = cholesky_solve(gram(DenseMatrix::identity(2), 1.0), Vector{2, 4});
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ((*s)[0], 1.0);
  EXPECT_DOUBLE_EQ((*s)[1], 2.0);

  s = cholesky_solve(gram(DenseMatrix::from_rows({{2, 0}, {0, 0}}), 0.5),
                     Vector{9, 1});
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ((*s)[0], 2.0);
  EXPECT_DOUBLE_EQ((*s)[1], 2.0);
}

TEST(Cholesky, TwoByTwo) {
  const SpdSystem sys = gram(DenseMatrix::from_rows({{1, 1}}), 1.0);
  const auto s = cholesky_solve(sys, Vector{3, 3});
  ASSERT_TRUE(s);
  EXPECT_NEAR((*s)[0], 1.0, 1e-15);
  EXPECT_NEAR((*s)[1], 1.0, 1e-15);
  EXPECT_LE(residual_norm(sys, *s, {3, 3}), 1e-10 * norm2(Vector{3, 3}));
}

TEST(Cholesky, ReportsLostDefiniteness) {
  // A shift far below the rounding level of J^T J leaves a singular matrix.
  const DenseMatrix j = DenseMatrix::from_rows({{1, 1}});
  EXPECT_FALSE(cholesky_solve(gram(j, 1e-300), Vector{1, 2}).has_value());
}

TEST(Cg, ScaledIdentityOneIteration) {
  const SpdSystem sys = gram(DenseMatrix::identity(2), 1.0);
  const CgResult r = cg_solve(sys, Vector{2, 4}, {.rel_tol = 1e-8});
  EXPECT_EQ(r.iterations, 1);
  EXPECT_DOUBLE_EQ(r.solution[0], 1.0);
  EXPECT_DOUBLE_EQ(r.solution[1], 2.0);
}

TEST(Cg, ZeroRightHandSide) {
  const SpdSystem sys = gram(DenseMatrix::identity(3), 1.0);
  const CgResult r = cg_solve(sys, Vector{0, 0, 0}, {});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.solution, (Vector{0, 0, 0}));
}

TEST(Cg, TwoByTwoWithinTwoIterations) {
  const SpdSystem sys = gram(DenseMatrix::from_rows({{1, 1}}), 1.0);
  const CgResult r = cg_solve(sys, Vector{3, 3}, {.rel_tol = 1e-10});
  EXPECT_LE(r.iterations, 2);
  const Vector chol = *cholesky_solve(sys, Vector{3, 3});
  EXPECT_NEAR(r.solution[0], chol[0], 1e-12);
  EXPECT_NEAR(r.solution[1], chol[1], 1e-12);
}

TEST(Cg, FirstIterateIsCauchyPoint) {
  std::mt19937_64 rng(3);
  const SpdSystem sys = gram(random_matrix(rng, 8, 5), 0.1);
  Vector b(5);
  std::normal_distribution<double> d;
  for (double& v : b) v = d(rng);
  const CgResult r = cg_solve(sys, b, {.rel_tol = 1e-14, .max_iters = 1});
  // Cauchy point of q: t b with t = b^T b / b^T A b.
  const double t = dot(b, b) / dot(b, sys.apply(b));
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.solution[i], t * b[i], 1e-12);
}

TEST(Cg, ModelValuesNonincreasing) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SpdSystem sys = gram(random_matrix(rng, 12, 10), 1e-4);
    Vector b(10);
    std::normal_distribution<double> d;
    for (double& v : b) v = d(rng);
    const CgResult r = cg_solve(
        sys, b, {.rel_tol = 1e-12, .max_iters = 40, .record_model = true});
    ASSERT_EQ(r.model_values.size(), static_cast<std::size_t>(r.iterations) + 1);
    EXPECT_EQ(r.model_values.front(), 0.0);
    for (std::size_t k = 1; k < r.model_values.size(); ++k) {
      EXPECT_LE(r.model_values[k],
                r.model_values[k - 1] + 1e-12 * std::abs(r.model_values[k - 1]));
    }
  }
}

TEST(Cg, BudgetExhaustionIsNotAnError) {
  std::mt19937_64 rng(9);
  const SpdSystem sys = gram(random_matrix(rng, 10, 10), 1e-6);
  const Vector b(10, 1.0);
  const CgResult r = cg_solve(sys, b, {.rel_tol = 1e-15, .max_iters = 2});
  EXPECT_EQ(r.iterations, 2);
  EXPECT_GT(r.final_rel_residual, 1e-15);
  EXPECT_TRUE(all_finite(r.solution));
}

TEST(Cg, AgreesWithCholeskyOnRandomSystems) {
  std::mt19937_64 rng(20240517);
  std::uniform_int_distribution<int> dim(1, 20);
  std::uniform_real_distribution<double> log_gamma(-6.0, 3.0);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = dim(rng);
    const std::size_t m = dim(rng);
    const SpdSystem sys =
        gram(random_matrix(rng, m, n), std::pow(10.0, log_gamma(rng)));
    Vector b(n);
    for (double& v : b) v = d(rng);
    const Vector chol = *cholesky_solve(sys, b);
    const CgResult cg = cg_solve(
        sys, b, {.rel_tol = 1e-12, .max_iters = static_cast<int>(4 * n)});
    Vector diff = chol;
    axpy(-1.0, cg.solution, diff);
    // Measured against the solution size: with gamma near 1e-6 the solution
    // is ~1e6 and the rounding floor cond * u * ||s|| of either method
    // exceeds any fixed absolute bound.
    EXPECT_LE(norm2(diff), 1e-6 * std::max(1.0, norm2(chol)))
        << "trial " << trial;
  }
}

TEST(SpectralNorm, KnownMatrices) {
  EXPECT_NEAR(spectral_norm(DenseMatrix::from_rows({{3, 0}, {0, 4}})), 4.0,
              1e-14);
  // [[1,1]] has singular value sqrt(2).
  EXPECT_NEAR(spectral_norm(DenseMatrix::from_rows({{1, 1}})), std::sqrt(2.0),
              1e-14);
  EXPECT_EQ(spectral_norm(DenseMatrix(3, 2)), 0.0);
}

TEST(SpectralNorm, UpperBoundsEveryRayleighQuotient) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> d;
  const DenseMatrix j = random_matrix(rng, 7, 4);
  const double s = spectral_norm(j);
  for (int k = 0; k < 100; ++k) {
    Vector v(4);
    for (double& x : v) x = d(rng);
    EXPECT_LE(norm2(multiply(j, v)), s * norm2(v) * (1 + 1e-12));
  }
}
