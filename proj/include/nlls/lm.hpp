#pragma once

// Levenberg-Marquardt driver with a memory of the last successful damping
// parameter (mu_bar).
//
// Each iteration minimizes, exactly or approximately, the regularized model
//
//   m(s) = 0.5 ||F + J s||^2 + 0.5 gamma ||s||^2,   gamma = mu ||F||^2,
//
// and accepts the step when the actual-to-predicted reduction ratio reaches
// eta. On rejection mu grows by lambda. On acceptance the next mu is picked
// from [max(mu_min, mu_bar / lambda), mu_bar] and mu_bar takes the value of
// the current mu:
//
//   kV1  takes the lower end of the interval,
//   kV2  takes the upper end (mu_next = mu_bar).
//
// mu_next is computed from the old mu_bar before mu_bar is overwritten.
//
// kZhaoFan is the comparison method with gamma = mu ||grad f|| and a
// three-band update of mu driven by ||grad f|| * mu.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlls/linalg.hpp"
#include "nlls/problem.hpp"

namespace nlls {

enum class StepEngine { kExact, kCauchy, kTruncatedCg };
enum class Policy { kV1, kV2, kZhaoFan };

std::string_view to_string(StepEngine e);
std::string_view to_string(Policy p);
// Accepts "exact", "cauchy", "tcg" / "truncated_cg".
std::optional<StepEngine> parse_step_engine(std::string_view s);
// Accepts "v1", "v2", "zhao_fan".
std::optional<Policy> parse_policy(std::string_view s);

struct SolverConfig {
  double eta = 1e-2;
  double lambda = 5.0;
  double mu0 = 1.0;
  double mu_min = 1e-16;
  double eps = 1e-5;
  int max_iters = 10000;
  StepEngine step_engine = StepEngine::kExact;
  Policy policy = Policy::kV1;
  double cg_rel_tol = 1e-4;
  double zf_eta1 = 0.1;
  double zf_eta2 = 0.9;
  double zf_c0 = 5.0;

  // Store every accepted iterate (x_0 first) in SolveResult::iterates.
  bool keep_iterates = false;
  // Fill IterationRecord::diagnostics (costs a symmetric eigensolve per
  // iteration).
  bool diagnostics = false;

  double zf_c1() const { return zf_c0 / (zf_c0 + 1.0); }
  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

// Terminal thresholds of the driver.
inline constexpr double kResidualVanishedTol = 1e-14;
inline constexpr double kMuOverflow = 1e30;

struct IterationDiagnostics {
  double jacobian_norm = 0.0;  // ||J_j||_2
  double step_inner = 0.0;     // s^T (gamma s + grad)
};

struct IterationRecord {
  int j = 0;
  double f = 0.0;
  double grad_norm = 0.0;
  double F_norm = 0.0;
  double gamma = 0.0;
  double mu = 0.0;
  double mu_bar = 0.0;
  // -infinity when the predicted decrease was degenerate or the trial point
  // produced a non-finite residual.
  double rho = 0.0;
  bool success = false;
  double step_norm = 0.0;
  std::optional<int> cg_iters;
  double pred = 0.0;
  std::optional<IterationDiagnostics> diagnostics;
};

enum class SolveStatus {
  kConvergedGradient,
  kResidualVanished,
  kMaxIters,
  kStalled,
  kNonFinite,
};
std::string_view to_string(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::kMaxIters;
  Vector final_x;
  int iterations = 0;
  int successful_iterations = 0;
  std::vector<IterationRecord> trace;
  // Quantities at final_x.
  double final_f = 0.0;
  double final_grad_norm = 0.0;
  double final_F_norm = 0.0;
  std::vector<Vector> iterates;  // only with SolverConfig::keep_iterates
  std::string message;           // diagnostic text for kNonFinite
};

// 0.5 ||F + J s||^2 + 0.5 gamma ||s||^2
double model_value(std::span<const double> F, const DenseMatrix& J,
                   double gamma, std::span<const double> s);

// m(0) - m(s), evaluated as -grad^T s - 0.5 (||J s||^2 + gamma ||s||^2) so
// that it keeps its relative accuracy when the decrease is tiny.
double predicted_reduction(std::span<const double> grad, const DenseMatrix& J,
                           double gamma, std::span<const double> s);

// Minimizer of the model via Cholesky on J^T J + gamma I, falling back to
// conjugate gradients (rel_tol 1e-12) when the factorization breaks down.
Vector exact_step(std::span<const double> F, const DenseMatrix& J,
                  double gamma);

// Model minimizer along -grad.
Vector cauchy_step(std::span<const double> F, const DenseMatrix& J,
                   double gamma, std::span<const double> grad);

struct TcgStep {
  Vector step;
  int cg_iters = 0;
};
// Conjugate gradients on the model from s = 0, at most n iterations.
TcgStep tcg_step(std::span<const double> F, const DenseMatrix& J,
                 double gamma, std::span<const double> grad,
                 double cg_rel_tol);

// Floor below which a predicted reduction is treated as degenerate.
double pred_floor(double f_old);
// (f_old - f_new) / pred, or -infinity when pred <= pred_floor(f_old).
double compute_rho(double f_old, double f_new, double pred);

double gamma_of(Policy policy, double mu, double F_norm, double grad_norm);

struct ParameterUpdate {
  double mu = 0.0;
  double mu_bar = 0.0;
};
ParameterUpdate update_parameters(Policy policy, bool success, double mu,
                                  double mu_bar, double grad_norm,
                                  const SolverConfig& cfg);

// Realized fraction-of-Cauchy-decrease constant
// 2 pred (||J||^2 + gamma) / ||grad||^2. Returns 0 when pred is 0.
double fcd_ratio(double pred, double grad_norm, double J_norm_sq_plus_gamma);

SolveResult lm_solve(const ResidualProblem& p, const SolverConfig& cfg);

// CSV with header
// j,f,grad_norm,F_norm,gamma,mu,mu_bar,rho,success,step_norm,cg_iters,pred
void write_trace_csv(std::ostream& out, const SolveResult& result);

}  // namespace nlls
