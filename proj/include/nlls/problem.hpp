#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlls/linalg.hpp"

namespace nlls {

enum class DistanceKind {
  kClosedForm,  // exact distance to the stationary set
  kReference,   // distance to a cached high-accuracy minimizer
};

struct KnownSolution {
  // ||F|| on the stationary set.
  double f_bar = 0.0;
  std::function<double(std::span<const double>)> dist_to_stationary_set;
  DistanceKind kind = DistanceKind::kClosedForm;
};

// A residual map F: R^n -> R^m together with its Jacobian. Implementations
// must be stateless: evaluations at different points may run concurrently.
class ResidualProblem {
 public:
  virtual ~ResidualProblem() = default;

  virtual std::string name() const = 0;
  virtual std::size_t n() const = 0;
  virtual std::size_t m() const = 0;
  virtual Vector residual(std::span<const double> x) const = 0;
  virtual DenseMatrix jacobian(std::span<const double> x) const = 0;
  virtual Vector start_point() const = 0;
  virtual std::optional<KnownSolution> known_solution() const {
    return std::nullopt;
  }
};

using ResidualFn = std::function<Vector(std::span<const double>)>;
using JacobianFn = std::function<DenseMatrix(std::span<const double>)>;

// ResidualProblem assembled from callables; the corpus and the tests build
// most problems this way.
class FunctionProblem final : public ResidualProblem {
 public:
  FunctionProblem(std::string name, std::size_t n, std::size_t m,
                  ResidualFn residual, JacobianFn jacobian, Vector start,
                  std::optional<KnownSolution> known = std::nullopt);

  std::string name() const override { return name_; }
  std::size_t n() const override { return n_; }
  std::size_t m() const override { return m_; }
  Vector residual(std::span<const double> x) const override;
  DenseMatrix jacobian(std::span<const double> x) const override;
  Vector start_point() const override { return start_; }
  std::optional<KnownSolution> known_solution() const override {
    return known_;
  }

 private:
  std::string name_;
  std::size_t n_;
  std::size_t m_;
  ResidualFn residual_;
  JacobianFn jacobian_;
  Vector start_;
  std::optional<KnownSolution> known_;
};

// F(x) = A x - b. The known solution carries ||F|| at the least-squares
// minimizer and the exact distance to it (A must have full column rank).
std::unique_ptr<ResidualProblem> make_linear_problem(std::string name,
                                                     DenseMatrix a, Vector b,
                                                     Vector start);

// 0.5 ||F(x)||^2
double objective(const ResidualProblem& p, std::span<const double> x);
// J(x)^T F(x)
Vector gradient(const ResidualProblem& p, std::span<const double> x);

// Central differences with per-coordinate step h * max(1, |x_i|).
DenseMatrix fd_jacobian(const ResidualProblem& p, std::span<const double> x,
                        double h = 1e-6);

struct JacobianCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  bool pass = false;
};

// Compares the analytic Jacobian with central differences entry by entry,
// using |J_ij - D_ij| / max(1, |J_ij|). Each entry is scored with the best of
// a short ladder of difference steps (1e-6 .. 1e-3, relative), which keeps
// badly scaled residuals from failing on cancellation alone.
JacobianCheckReport check_jacobian(const ResidualProblem& p,
                                   std::span<const double> x, double tol);

// Wraps `inner` and multiplies its Jacobian by `factor`; a deliberately
// wrong derivative for exercising the checker.
std::unique_ptr<ResidualProblem> with_scaled_jacobian(
    std::unique_ptr<ResidualProblem> inner, double factor);

// `count` points x0 + 0.1 (1 + |x0_i|) u_i with u_i uniform in [-1, 1],
// drawn from a fixed-seed generator.
std::vector<Vector> perturbed_points(std::span<const double> x0, int count,
                                     std::uint64_t seed = 20240517);

}  // namespace nlls
