#include "nlls/problem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace nlls {

namespace {

void require_dim(const ResidualProblem& p, std::span<const double> x) {
  if (x.size() != p.n()) {
    throw std::invalid_argument(p.name() + ": expected x of length " +
                                std::to_string(p.n()) + ", got " +
                                std::to_string(x.size()));
  }
}

}  // namespace

FunctionProblem::FunctionProblem(std::string name, std::size_t n,
                                 std::size_t m, ResidualFn residual,
                                 JacobianFn jacobian, Vector start,
                                 std::optional<KnownSolution> known)
    : name_(std::move(name)),
      n_(n),
      m_(m),
      residual_(std::move(residual)),
      jacobian_(std::move(jacobian)),
      start_(std::move(start)),
      known_(std::move(known)) {
  if (start_.size() != n_) {
    throw std::invalid_argument(name_ + ": start point has wrong length");
  }
}

Vector FunctionProblem::residual(std::span<const double> x) const {
  require_dim(*this, x);
  Vector f = residual_(x);
  if (f.size() != m_) {
    throw std::logic_error(name_ + ": residual has wrong length");
  }
  return f;
}

DenseMatrix FunctionProblem::jacobian(std::span<const double> x) const {
  require_dim(*this, x);
  DenseMatrix j = jacobian_(x);
  if (j.rows() != m_ || j.cols() != n_) {
    throw std::logic_error(name_ + ": jacobian has wrong shape");
  }
  return j;
}

std::unique_ptr<ResidualProblem> make_linear_problem(std::string name,
                                                     DenseMatrix a, Vector b,
                                                     Vector start) {
  if (a.rows() != b.size()) {
    throw std::invalid_argument("make_linear_problem: A and b disagree");
  }
  const std::size_t n = a.cols();
  const std::size_t m = a.rows();

  // Least-squares minimizer from the normal equations; a vanishing shift is
  // not allowed by gram(), so solve A^T A directly with a tiny one and polish
  // with a few steps of iterative refinement.
  std::optional<KnownSolution> known;
  {
    const SpdSystem sys = gram(a, 1e-300);
    const Vector atb = multiply_transposed(a, b);
    if (auto sol = cholesky_solve(sys, atb)) {
      Vector x = *sol;
      for (int it = 0; it < 3; ++it) {
        Vector r = multiply(a, x);
        axpy(-1.0, b, r);
        const Vector g = multiply_transposed(a, r);
        auto dx = cholesky_solve(sys, g);
        if (!dx) break;
        axpy(-1.0, *dx, x);
      }
      Vector r = multiply(a, x);
      axpy(-1.0, b, r);
      KnownSolution ks;
      ks.f_bar = norm2(r);
      ks.kind = DistanceKind::kClosedForm;
      ks.dist_to_stationary_set = [x](std::span<const double> y) {
        Vector d(y.begin(), y.end());
        axpy(-1.0, x, d);
        return norm2(d);
      };
      known = std::move(ks);
    }
  }

  auto residual = [a, b](std::span<const double> x) {
    Vector r = multiply(a, x);
    axpy(-1.0, b, r);
    return r;
  };
  auto jacobian = [a](std::span<const double>) { return a; };
  return std::make_unique<FunctionProblem>(std::move(name), n, m, residual,
                                           jacobian, std::move(start),
                                           std::move(known));
}

double objective(const ResidualProblem& p, std::span<const double> x) {
  require_dim(p, x);
  const Vector f = p.residual(x);
  const double r = norm2(f);
  return 0.5 * r * r;
}

Vector gradient(const ResidualProblem& p, std::span<const double> x) {
  require_dim(p, x);
  return multiply_transposed(p.jacobian(x), p.residual(x));
}

DenseMatrix fd_jacobian(const ResidualProblem& p, std::span<const double> x,
                        double h) {
  require_dim(p, x);
  if (!(h > 0.0)) throw std::invalid_argument("fd_jacobian: h must be > 0");
  DenseMatrix d(p.m(), p.n());
  Vector xp(x.begin(), x.end());
  for (std::size_t i = 0; i < p.n(); ++i) {
    const double hi = h * std::max(1.0, std::abs(x[i]));
    xp[i] = x[i] + hi;
    const Vector fp = p.residual(xp);
    xp[i] = x[i] - hi;
    const Vector fm = p.residual(xp);
    xp[i] = x[i];
    // Use the step actually represented in floating point.
    const double width = (x[i] + hi) - (x[i] - hi);
    for (std::size_t r = 0; r < p.m(); ++r) d(r, i) = (fp[r] - fm[r]) / width;
  }
  return d;
}

JacobianCheckReport check_jacobian(const ResidualProblem& p,
                                   std::span<const double> x, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("check_jacobian: tol <= 0");
  const DenseMatrix j = p.jacobian(x);
  constexpr std::array<double, 4> kSteps = {1e-6, 1e-5, 1e-4, 1e-3};

  DenseMatrix best(p.m(), p.n(), std::numeric_limits<double>::infinity());
  for (double h : kSteps) {
    const DenseMatrix d = fd_jacobian(p, x, h);
    for (std::size_t r = 0; r < p.m(); ++r) {
      for (std::size_t c = 0; c < p.n(); ++c) {
        double err = std::abs(j(r, c) - d(r, c)) /
                     std::max(1.0, std::abs(j(r, c)));
        if (std::isnan(err)) err = std::numeric_limits<double>::infinity();
        best(r, c) = std::min(best(r, c), err);
      }
    }
  }

  JacobianCheckReport report;
  for (std::size_t r = 0; r < p.m(); ++r) {
    for (std::size_t c = 0; c < p.n(); ++c) {
      if (best(r, c) > report.max_rel_error) {
        report.max_rel_error = best(r, c);
        report.worst_row = r;
        report.worst_col = c;
      }
    }
  }
  report.pass = report.max_rel_error <= tol;
  return report;
}

namespace {

class ScaledJacobianProblem final : public ResidualProblem {
 public:
  ScaledJacobianProblem(std::unique_ptr<ResidualProblem> inner, double factor)
      : inner_(std::move(inner)), factor_(factor) {}

  std::string name() const override { return inner_->name(); }
  std::size_t n() const override { return inner_->n(); }
  std::size_t m() const override { return inner_->m(); }
  Vector residual(std::span<const double> x) const override {
    return inner_->residual(x);
  }
  DenseMatrix jacobian(std::span<const double> x) const override {
    DenseMatrix j = inner_->jacobian(x);
    for (double& v : j.data()) v *= factor_;
    return j;
  }
  Vector start_point() const override { return inner_->start_point(); }
  std::optional<KnownSolution> known_solution() const override {
    return inner_->known_solution();
  }

 private:
  std::unique_ptr<ResidualProblem> inner_;
  double factor_;
};

}  // namespace

std::unique_ptr<ResidualProblem> with_scaled_jacobian(
    std::unique_ptr<ResidualProblem> inner, double factor) {
  return std::make_unique<ScaledJacobianProblem>(std::move(inner), factor);
}

std::vector<Vector> perturbed_points(std::span<const double> x0, int count,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> out;
  for (int k = 0; k < count; ++k) {
    Vector x(x0.begin(), x0.end());
    for (double& v : x) v += 0.1 * (1.0 + std::abs(v)) * u(rng);
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace nlls
