#include "nlls/corpus.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nlls {

std::string_view to_string(ResidualClass c) {
  return c == ResidualClass::kZero ? "zero" : "nonzero";
}

namespace {

using std::exp;
using std::numbers::pi;

KnownSolution point_solution(Vector xstar, double f_bar,
                             DistanceKind kind = DistanceKind::kClosedForm) {
  KnownSolution ks;
  ks.f_bar = f_bar;
  ks.kind = kind;
  ks.dist_to_stationary_set = [xstar = std::move(xstar)](
                                  std::span<const double> x) {
    Vector d(x.begin(), x.end());
    axpy(-1.0, xstar, d);
    return norm2(d);
  };
  return ks;
}

std::unique_ptr<ResidualProblem> make_problem(
    std::string name, std::size_t n, std::size_t m, ResidualFn r, JacobianFn j,
    Vector start, std::optional<KnownSolution> known = std::nullopt) {
  return std::make_unique<FunctionProblem>(std::move(name), n, m, std::move(r),
                                           std::move(j), std::move(start),
                                           std::move(known));
}

// --- Moré, Garbow, Hillstrom --------------------------------------------

std::unique_ptr<ResidualProblem> rosenbrock(std::size_t) {
  auto r = [](std::span<const double> x) {
    return Vector{10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]};
  };
  auto j = [](std::span<const double> x) {
    return DenseMatrix::from_rows({{-20.0 * x[0], 10.0}, {-1.0, 0.0}});
  };
  return make_problem("rosenbrock", 2, 2, r, j, {-1.2, 1.0},
                      point_solution({1.0, 1.0}, 0.0));
}

std::unique_ptr<ResidualProblem> freudenstein_roth(std::size_t) {
  auto r = [](std::span<const double> x) {
    return Vector{-13.0 + x[0] + ((5.0 - x[1]) * x[1] - 2.0) * x[1],
                  -29.0 + x[0] + ((x[1] + 1.0) * x[1] - 14.0) * x[1]};
  };
  auto j = [](std::span<const double> x) {
    return DenseMatrix::from_rows(
        {{1.0, 10.0 * x[1] - 3.0 * x[1] * x[1] - 2.0},
         {1.0, 3.0 * x[1] * x[1] + 2.0 * x[1] - 14.0}});
  };
  return make_problem("freudenstein_roth", 2, 2, r, j, {0.5, -2.0});
}

std::unique_ptr<ResidualProblem> powell_badly_scaled(std::size_t) {
  auto r = [](std::span<const double> x) {
    return Vector{1e4 * x[0] * x[1] - 1.0,
                  exp(-x[0]) + exp(-x[1]) - 1.0001};
  };
  auto j = [](std::span<const double> x) {
    return DenseMatrix::from_rows(
        {{1e4 * x[1], 1e4 * x[0]}, {-exp(-x[0]), -exp(-x[1])}});
  };
  return make_problem("powell_badly_scaled", 2, 2, r, j, {0.0, 1.0});
}

std::unique_ptr<ResidualProblem> brown_badly_scaled(std::size_t) {
  auto r = [](std::span<const double> x) {
    return Vector{x[0] - 1e6, x[1] - 2e-6, x[0] * x[1] - 2.0};
  };
  auto j = [](std::span<const double> x) {
    return DenseMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}, {x[1], x[0]}});
  };
  return make_problem("brown_badly_scaled", 2, 3, r, j, {1.0, 1.0},
                      point_solution({1e6, 2e-6}, 0.0));
}

std::unique_ptr<ResidualProblem> beale(std::size_t) {
  static constexpr std::array<double, 3> y = {1.5, 2.25, 2.625};
  auto r = [](std::span<const double> x) {
    Vector f(3);
    for (int i = 0; i < 3; ++i) {
      f[i] = y[i] - x[0] * (1.0 - std::pow(x[1], i + 1));
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix d(3, 2);
    for (int i = 0; i < 3; ++i) {
      d(i, 0) = -(1.0 - std::pow(x[1], i + 1));
      d(i, 1) = x[0] * (i + 1) * std::pow(x[1], i);
    }
    return d;
  };
  return make_problem("beale", 2, 3, r, j, {1.0, 1.0},
                      point_solution({3.0, 0.5}, 0.0));
}

double helical_theta(double x1, double x2) {
  if (x1 > 0.0) return std::atan(x2 / x1) / (2.0 * pi);
  if (x1 < 0.0) return std::atan(x2 / x1) / (2.0 * pi) + 0.5;
  return x2 >= 0.0 ? 0.25 : -0.25;
}

std::unique_ptr<ResidualProblem> helical_valley(std::size_t) {
  auto r = [](std::span<const double> x) {
    const double rad = std::hypot(x[0], x[1]);
    return Vector{10.0 * (x[2] - 10.0 * helical_theta(x[0], x[1])),
                  10.0 * (rad - 1.0), x[2]};
  };
  auto j = [](std::span<const double> x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double rad = std::sqrt(r2);
    const double dt1 = -x[1] / (2.0 * pi * r2);
    const double dt2 = x[0] / (2.0 * pi * r2);
    return DenseMatrix::from_rows({{-100.0 * dt1, -100.0 * dt2, 10.0},
                                   {10.0 * x[0] / rad, 10.0 * x[1] / rad, 0.0},
                                   {0.0, 0.0, 1.0}});
  };
  return make_problem("helical_valley", 3, 3, r, j, {-1.0, 0.0, 0.0},
                      point_solution({1.0, 0.0, 0.0}, 0.0));
}

std::unique_ptr<ResidualProblem> bard(std::size_t) {
  static constexpr std::array<double, 15> y = {
      0.14, 0.18, 0.22, 0.25, 0.29, 0.32, 0.35, 0.39,
      0.37, 0.58, 0.73, 0.96, 1.34, 2.10, 4.39};
  auto r = [](std::span<const double> x) {
    Vector f(15);
    for (int i = 0; i < 15; ++i) {
      const double u = i + 1;
      const double v = 15 - i;
      const double w = std::min(u, v);
      f[i] = y[i] - (x[0] + u / (v * x[1] + w * x[2]));
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix d(15, 3);
    for (int i = 0; i < 15; ++i) {
      const double u = i + 1;
      const double v = 15 - i;
      const double w = std::min(u, v);
      const double den = v * x[1] + w * x[2];
      d(i, 0) = -1.0;
      d(i, 1) = u * v / (den * den);
      d(i, 2) = u * w / (den * den);
    }
    return d;
  };
  return make_problem("bard", 3, 15, r, j, {1.0, 1.0, 1.0});
}

std::unique_ptr<ResidualProblem> gaussian(std::size_t) {
  static constexpr std::array<double, 15> y = {
      0.0009, 0.0044, 0.0175, 0.0540, 0.1295, 0.2420, 0.3521, 0.3989,
      0.3521, 0.2420, 0.1295, 0.0540, 0.0175, 0.0044, 0.0009};
  auto r = [](std::span<const double> x) {
    Vector f(15);
    for (int i = 0; i < 15; ++i) {
      const double t = (7.0 - i) / 2.0;
      const double d = t - x[2];
      f[i] = x[0] * exp(-0.5 * x[1] * d * d) - y[i];
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix m(15, 3);
    for (int i = 0; i < 15; ++i) {
      const double t = (7.0 - i) / 2.0;
      const double d = t - x[2];
      const double e = exp(-0.5 * x[1] * d * d);
      m(i, 0) = e;
      m(i, 1) = -0.5 * x[0] * d * d * e;
      m(i, 2) = x[0] * x[1] * d * e;
    }
    return m;
  };
  return make_problem("gaussian", 3, 15, r, j, {0.4, 1.0, 0.0});
}

std::unique_ptr<ResidualProblem> box_3d(std::size_t) {
  constexpr int m = 10;
  auto r = [](std::span<const double> x) {
    Vector f(m);
    for (int i = 0; i < m; ++i) {
      const double t = 0.1 * (i + 1);
      f[i] = exp(-t * x[0]) - exp(-t * x[1]) - x[2] * (exp(-t) - exp(-10 * t));
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix d(m, 3);
    for (int i = 0; i < m; ++i) {
      const double t = 0.1 * (i + 1);
      d(i, 0) = -t * exp(-t * x[0]);
      d(i, 1) = t * exp(-t * x[1]);
      d(i, 2) = -(exp(-t) - exp(-10 * t));
    }
    return d;
  };
  return make_problem("box_3d", 3, m, r, j, {0.0, 10.0, 20.0});
}

std::unique_ptr<ResidualProblem> powell_singular(std::size_t) {
  const double s5 = std::sqrt(5.0);
  const double s10 = std::sqrt(10.0);
  auto r = [=](std::span<const double> x) {
    const double a = x[1] - 2.0 * x[2];
    const double b = x[0] - x[3];
    return Vector{x[0] + 10.0 * x[1], s5 * (x[2] - x[3]), a * a,
                  s10 * b * b};
  };
  auto j = [=](std::span<const double> x) {
    const double a = x[1] - 2.0 * x[2];
    const double b = x[0] - x[3];
    return DenseMatrix::from_rows({{1.0, 10.0, 0.0, 0.0},
                                   {0.0, 0.0, s5, -s5},
                                   {0.0, 2.0 * a, -4.0 * a, 0.0},
                                   {2.0 * s10 * b, 0.0, 0.0, -2.0 * s10 * b}});
  };
  return make_problem("powell_singular", 4, 4, r, j, {3.0, -1.0, 0.0, 1.0},
                      point_solution({0.0, 0.0, 0.0, 0.0}, 0.0));
}

std::unique_ptr<ResidualProblem> wood(std::size_t) {
  const double s90 = std::sqrt(90.0);
  const double s10 = std::sqrt(10.0);
  auto r = [=](std::span<const double> x) {
    return Vector{10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0],
                  s90 * (x[3] - x[2] * x[2]), 1.0 - x[2],
                  s10 * (x[1] + x[3] - 2.0), (x[1] - x[3]) / s10};
  };
  auto j = [=](std::span<const double> x) {
    return DenseMatrix::from_rows({{-20.0 * x[0], 10.0, 0.0, 0.0},
                                   {-1.0, 0.0, 0.0, 0.0},
                                   {0.0, 0.0, -2.0 * s90 * x[2], s90},
                                   {0.0, 0.0, -1.0, 0.0},
                                   {0.0, s10, 0.0, s10},
                                   {0.0, 1.0 / s10, 0.0, -1.0 / s10}});
  };
  return make_problem("wood", 4, 6, r, j, {-3.0, -1.0, -3.0, -1.0},
                      point_solution({1.0, 1.0, 1.0, 1.0}, 0.0));
}

std::unique_ptr<ResidualProblem> kowalik_osborne(std::size_t) {
  static constexpr std::array<double, 11> y = {
      0.1957, 0.1947, 0.1735, 0.1600, 0.0844, 0.0627,
      0.0456, 0.0342, 0.0323, 0.0235, 0.0246};
  static constexpr std::array<double, 11> u = {
      4.0, 2.0, 1.0, 0.5, 0.25, 0.167, 0.125, 0.1, 0.0833, 0.0714, 0.0625};
  auto r = [](std::span<const double> x) {
    Vector f(11);
    for (int i = 0; i < 11; ++i) {
      const double num = u[i] * u[i] + u[i] * x[1];
      const double den = u[i] * u[i] + u[i] * x[2] + x[3];
      f[i] = y[i] - x[0] * num / den;
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix d(11, 4);
    for (int i = 0; i < 11; ++i) {
      const double num = u[i] * u[i] + u[i] * x[1];
      const double den = u[i] * u[i] + u[i] * x[2] + x[3];
      d(i, 0) = -num / den;
      d(i, 1) = -x[0] * u[i] / den;
      d(i, 2) = x[0] * num * u[i] / (den * den);
      d(i, 3) = x[0] * num / (den * den);
    }
    return d;
  };
  return make_problem("kowalik_osborne", 4, 11, r, j,
                      {0.25, 0.39, 0.415, 0.39});
}

std::unique_ptr<ResidualProblem> brown_dennis(std::size_t) {
  constexpr int m = 20;
  auto r = [](std::span<const double> x) {
    Vector f(m);
    for (int i = 0; i < m; ++i) {
      const double t = (i + 1) / 5.0;
      const double a = x[0] + t * x[1] - exp(t);
      const double b = x[2] + x[3] * std::sin(t) - std::cos(t);
      f[i] = a * a + b * b;
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix d(m, 4);
    for (int i = 0; i < m; ++i) {
      const double t = (i + 1) / 5.0;
      const double a = x[0] + t * x[1] - exp(t);
      const double b = x[2] + x[3] * std::sin(t) - std::cos(t);
      d(i, 0) = 2.0 * a;
      d(i, 1) = 2.0 * a * t;
      d(i, 2) = 2.0 * b;
      d(i, 3) = 2.0 * b * std::sin(t);
    }
    return d;
  };
  return make_problem("brown_dennis", 4, m, r, j, {25.0, 5.0, -5.0, -1.0});
}

std::unique_ptr<ResidualProblem> biggs_exp6(std::size_t) {
  constexpr int m = 13;
  auto r = [](std::span<const double> x) {
    Vector f(m);
    for (int i = 0; i < m; ++i) {
      const double t = 0.1 * (i + 1);
      const double y = exp(-t) - 5.0 * exp(-10.0 * t) + 3.0 * exp(-4.0 * t);
      f[i] = x[2] * exp(-t * x[0]) - x[3] * exp(-t * x[1]) +
             x[5] * exp(-t * x[4]) - y;
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix d(m, 6);
    for (int i = 0; i < m; ++i) {
      const double t = 0.1 * (i + 1);
      d(i, 0) = -t * x[2] * exp(-t * x[0]);
      d(i, 1) = t * x[3] * exp(-t * x[1]);
      d(i, 2) = exp(-t * x[0]);
      d(i, 3) = -exp(-t * x[1]);
      d(i, 4) = -t * x[5] * exp(-t * x[4]);
      d(i, 5) = exp(-t * x[4]);
    }
    return d;
  };
  return make_problem("biggs_exp6", 6, m, r, j,
                      {1.0, 2.0, 1.0, 1.0, 1.0, 1.0});
}

std::unique_ptr<ResidualProblem> extended_rosenbrock(std::size_t n) {
  auto r = [n](std::span<const double> x) {
    Vector f(n);
    for (std::size_t i = 0; i < n; i += 2) {
      f[i] = 10.0 * (x[i + 1] - x[i] * x[i]);
      f[i + 1] = 1.0 - x[i];
    }
    return f;
  };
  auto j = [n](std::span<const double> x) {
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; i += 2) {
      d(i, i) = -20.0 * x[i];
      d(i, i + 1) = 10.0;
      d(i + 1, i) = -1.0;
    }
    return d;
  };
  Vector start(n);
  for (std::size_t i = 0; i < n; ++i) start[i] = i % 2 == 0 ? -1.2 : 1.0;
  return make_problem("extended_rosenbrock", n, n, r, j, start,
                      point_solution(Vector(n, 1.0), 0.0));
}

std::unique_ptr<ResidualProblem> trigonometric(std::size_t n) {
  auto r = [n](std::span<const double> x) {
    double cos_sum = 0.0;
    for (double v : x) cos_sum += std::cos(v);
    Vector f(n);
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = static_cast<double>(n) - cos_sum +
             (i + 1) * (1.0 - std::cos(x[i])) - std::sin(x[i]);
    }
    return f;
  };
  auto j = [n](std::span<const double> x) {
    DenseMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) d(i, k) = std::sin(x[k]);
      d(i, i) += (i + 1) * std::sin(x[i]) - std::cos(x[i]);
    }
    return d;
  };
  return make_problem("trigonometric", n, n, r, j,
                      Vector(n, 1.0 / static_cast<double>(n)));
}

std::unique_ptr<ResidualProblem> linear_full_rank(std::size_t n) {
  const std::size_t m = 2 * n;
  DenseMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      a(i, k) = (i == k ? 1.0 : 0.0) - 2.0 / static_cast<double>(m);
    }
  }
  auto r = [a](std::span<const double> x) {
    Vector f = multiply(a, x);
    for (double& v : f) v -= 1.0;
    return f;
  };
  auto j = [a](std::span<const double>) { return a; };
  return make_problem(
      "linear_full_rank", n, m, r, j, Vector(n, 1.0),
      point_solution(Vector(n, -1.0), std::sqrt(static_cast<double>(m - n))));
}

// --- problems with a known stationary set -------------------------------

constexpr std::size_t kEx1N = 4;
constexpr double kEx1Background = 0.1;
constexpr std::array<double, kEx1N> kEx1Offsets = {0.05, -0.05, 0.05, -0.05};

double ex1_observation(std::size_t i) {
  return std::tanh(kEx1Background) + kEx1Offsets[i];
}

std::unique_ptr<ResidualProblem> example1(std::size_t) {
  auto r = [](std::span<const double> x) {
    Vector f(2 * kEx1N);
    for (std::size_t i = 0; i < kEx1N; ++i) {
      f[i] = x[i] - kEx1Background;
      f[kEx1N + i] = std::tanh(x[i]) - ex1_observation(i);
    }
    return f;
  };
  auto j = [](std::span<const double> x) {
    DenseMatrix d(2 * kEx1N, kEx1N);
    for (std::size_t i = 0; i < kEx1N; ++i) {
      const double c = 1.0 / std::cosh(x[i]);
      d(i, i) = 1.0;
      d(kEx1N + i, i) = c * c;
    }
    return d;
  };
  const Vector xbar = example1_reference_minimizer();
  const double f_bar = norm2(r(xbar));
  return make_problem("example1", kEx1N, 2 * kEx1N, r, j,
                      {1.0, -1.0, 1.0, -1.0},
                      point_solution(xbar, f_bar, DistanceKind::kReference));
}

KnownSolution example2_solution(double f_bar) {
  KnownSolution ks;
  ks.f_bar = f_bar;
  ks.kind = DistanceKind::kClosedForm;
  ks.dist_to_stationary_set = [](std::span<const double> x) {
    const double d = x[0] - x[1];
    return std::sqrt(0.5 * d * d + x[2] * x[2]);
  };
  return ks;
}

std::unique_ptr<ResidualProblem> example2(std::size_t) {
  auto r = [](std::span<const double> x) {
    return Vector{std::expm1(x[0] - x[1]), x[2] - 1.0, x[2] + 1.0};
  };
  auto j = [](std::span<const double> x) {
    const double e = exp(x[0] - x[1]);
    return DenseMatrix::from_rows(
        {{e, -e, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}});
  };
  return make_problem("example2", 3, 3, r, j, {1.0, 0.5, 0.1},
                      example2_solution(std::sqrt(2.0)));
}

// Same exponential block with the constant offsets removed, so the residual
// vanishes on the stationary set.
std::unique_ptr<ResidualProblem> example2_zero(std::size_t) {
  auto r = [](std::span<const double> x) {
    return Vector{std::expm1(x[0] - x[1]), x[2], x[2]};
  };
  auto j = [](std::span<const double> x) {
    const double e = exp(x[0] - x[1]);
    return DenseMatrix::from_rows(
        {{e, -e, 0.0}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}});
  };
  return make_problem("example2_zero", 3, 3, r, j, {1.0, 0.5, 0.1},
                      example2_solution(0.0));
}

ProblemSpec fixed(std::string name, std::size_t n, ResidualClass cls,
                  std::unique_ptr<ResidualProblem> (*make)(std::size_t)) {
  ProblemSpec s;
  s.name = std::move(name);
  s.default_n = n;
  s.variable_dim = false;
  s.residual_class = cls;
  s.make = make;
  return s;
}

ProblemSpec variable(std::string name, std::size_t n, ResidualClass cls,
                     std::unique_ptr<ResidualProblem> (*make)(std::size_t),
                     std::function<bool(std::size_t)> valid) {
  ProblemSpec s = fixed(std::move(name), n, cls, make);
  s.variable_dim = true;
  s.valid_n = std::move(valid);
  return s;
}

ProblemRegistry build_registry() {
  using RC = ResidualClass;
  ProblemRegistry reg;
  reg.add(fixed("rosenbrock", 2, RC::kZero, rosenbrock));
  // The standard start leads to the local minimizer with ||F||^2 ~ 48.98.
  reg.add(fixed("freudenstein_roth", 2, RC::kNonzero, freudenstein_roth));
  reg.add(fixed("powell_badly_scaled", 2, RC::kZero, powell_badly_scaled));
  reg.add(fixed("brown_badly_scaled", 2, RC::kZero, brown_badly_scaled));
  reg.add(fixed("beale", 2, RC::kZero, beale));
  reg.add(fixed("helical_valley", 3, RC::kZero, helical_valley));
  reg.add(fixed("bard", 3, RC::kNonzero, bard));
  reg.add(fixed("gaussian", 3, RC::kNonzero, gaussian));
  reg.add(fixed("box_3d", 3, RC::kZero, box_3d));
  reg.add(fixed("powell_singular", 4, RC::kZero, powell_singular));
  reg.add(fixed("wood", 4, RC::kZero, wood));
  reg.add(fixed("kowalik_osborne", 4, RC::kNonzero, kowalik_osborne));
  reg.add(fixed("brown_dennis", 4, RC::kNonzero, brown_dennis));
  reg.add(fixed("biggs_exp6", 6, RC::kZero, biggs_exp6));
  reg.add(variable("extended_rosenbrock", 10, RC::kZero, extended_rosenbrock,
                   [](std::size_t n) { return n >= 2 && n % 2 == 0; }));
  reg.add(variable("trigonometric", 10, RC::kZero, trigonometric,
                   [](std::size_t n) { return n >= 1; }));
  reg.add(variable("linear_full_rank", 10, RC::kNonzero, linear_full_rank,
                   [](std::size_t n) { return n >= 1; }));
  reg.add(fixed("example1", kEx1N, RC::kNonzero, example1));
  reg.add(fixed("example2", 3, RC::kNonzero, example2));
  reg.add(fixed("example2_zero", 3, RC::kZero, example2_zero));
  return reg;
}

}  // namespace

Vector example1_reference_minimizer() {
  // The objective separates by coordinate:
  //   phi(t) = 0.5 (t - b)^2 + 0.5 (tanh t - y)^2.
  Vector xbar(kEx1N);
  for (std::size_t i = 0; i < kEx1N; ++i) {
    const double y = ex1_observation(i);
    double t = kEx1Background;
    for (int it = 0; it < 100; ++it) {
      const double th = std::tanh(t);
      const double s2 = 1.0 - th * th;
      const double d1 = (t - kEx1Background) + (th - y) * s2;
      const double d2 = 1.0 + s2 * s2 - 2.0 * (th - y) * th * s2;
      const double step = d1 / d2;
      t -= step;
      if (std::abs(step) <= 1e-17 * std::max(1.0, std::abs(t))) break;
    }
    xbar[i] = t;
  }
  return xbar;
}

void ProblemRegistry::add(ProblemSpec spec) {
  const std::string name = spec.name;
  if (!specs_.emplace(name, std::move(spec)).second) {
    throw std::invalid_argument("duplicate problem name: " + name);
  }
}

const ProblemRegistry& ProblemRegistry::builtin() {
  static const ProblemRegistry reg = build_registry();
  return reg;
}

bool ProblemRegistry::contains(const std::string& name) const {
  return specs_.contains(name);
}

const ProblemSpec& ProblemRegistry::spec(const std::string& name) const {
  const auto it = specs_.find(name);
  if (it == specs_.end()) throw std::out_of_range("unknown problem: " + name);
  return it->second;
}

std::unique_ptr<ResidualProblem> ProblemRegistry::get(
    const std::string& name, std::optional<std::size_t> n) const {
  const ProblemSpec& s = spec(name);
  std::size_t dim = s.default_n;
  if (n) {
    if (!s.variable_dim && *n != s.default_n) {
      throw std::invalid_argument(name + " has fixed dimension " +
                                  std::to_string(s.default_n));
    }
    if (s.valid_n && !s.valid_n(*n)) {
      throw std::invalid_argument("invalid dimension " + std::to_string(*n) +
                                  " for " + name);
    }
    dim = *n;
  }
  return s.make(dim);
}

std::vector<ProblemInfo> ProblemRegistry::list() const {
  std::vector<ProblemInfo> out;
  out.reserve(specs_.size());
  for (const auto& [name, s] : specs_) {
    out.push_back({name, s.residual_class, s.variable_dim, s.default_n});
  }
  return out;
}

std::optional<double> dist_to_solution(const ResidualProblem& p,
                                       std::span<const double> x) {
  const auto known = p.known_solution();
  if (!known || !known->dist_to_stationary_set) return std::nullopt;
  return known->dist_to_stationary_set(x);
}

}  // namespace nlls
