#pragma once

// Benchmark harness: runs solver variants over the problem corpus, estimates
// the local order of convergence from the last two gradient norms, builds
// Dolan-Moré performance profiles over iteration counts, and checks the
// worst-case iteration bound on linear problems.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nlls/corpus.hpp"
#include "nlls/lm.hpp"

namespace nlls {

struct SolverVariant {
  Policy policy = Policy::kV1;
  StepEngine engine = StepEngine::kExact;

  // "v1", "v2", "zhao_fan" for exact steps, otherwise "<policy>:<engine>".
  std::string id() const;
  static std::optional<SolverVariant> parse(std::string_view id);
  bool operator==(const SolverVariant&) const = default;
};

enum class ConvClass { kQuadratic, kSuperlinear, kLinearOrWorse, kFailed };
std::string_view to_string(ConvClass c);
std::optional<ConvClass> parse_conv_class(std::string_view s);

struct RunResult {
  std::string problem;
  std::size_t n = 0;
  std::string solver_id;
  double eps = 0.0;
  bool converged = false;
  int iterations = 0;
  double f_final = 0.0;
  double grad_norm_final = 0.0;
  std::optional<double> eoc;
  ConvClass conv_class = ConvClass::kFailed;

  bool operator==(const RunResult&) const = default;
};

// log(g_final / s) / log(g_prev / s) with s = max(1, g0). Absent when either
// ratio is not in (0, 1).
std::optional<double> eoc(double grad_norm_x0, double grad_norm_prev,
                          double grad_norm_final);
// EOC of a finished solve: the last recorded iterate and the final one.
// Absent with fewer than two iterations.
std::optional<double> eoc(const SolveResult& result, double grad_norm_x0);

// >= 1.8 quadratic, [1.1, 1.8) superlinear, otherwise linear_or_worse;
// kFailed when not converged.
ConvClass classify(std::optional<double> eoc, bool converged = true);

// classify() plus the underflow rule: when the final gradient is exactly 0
// the run counts as quadratic if the EOC over the preceding two iterates is
// already >= 1.8.
ConvClass classify_run(const SolveResult& result, double grad_norm_x0,
                       bool converged);

struct ProblemInstance {
  std::string name;
  std::optional<std::size_t> n;
};

enum class SuiteFilter { kAll, kZero, kNonzero };

// One instance per registered problem at its default size, alphabetical.
std::vector<ProblemInstance> suite_instances(const ProblemRegistry& registry,
                                             SuiteFilter filter);

RunResult run_one(const ResidualProblem& problem, const SolverVariant& variant,
                  double eps, const SolverConfig& base);

// Rows ordered by (problem, solver, eps) in input order. Failures of single
// runs (including exceptions) become failed rows.
std::vector<RunResult> run_suite(const ProblemRegistry& registry,
                                 const std::vector<ProblemInstance>& problems,
                                 const std::vector<SolverVariant>& solvers,
                                 const std::vector<double>& eps_list,
                                 const SolverConfig& base,
                                 unsigned threads = 0);

struct ProfileCurve {
  std::string solver_id;
  // Breakpoints (tau, rho(tau)), tau ascending from 1. rho is a
  // right-continuous step function constant between breakpoints.
  std::vector<std::pair<double, double>> points;

  double value_at(double tau) const;
};

// Profiles over iteration counts for the rows of `results` whose eps equals
// `eps`. The cost of a converged run is max(1, iterations); failed runs never
// reach a finite ratio. Throws std::invalid_argument on an empty slice or
// when some (problem, solver) pair is missing.
std::vector<ProfileCurve> performance_profile(
    const std::vector<RunResult>& results, double eps);

struct ComplexityConstants {
  double kappa_J = 0.0;
  double nu = 0.0;
  double theta_fcd = 1.0;
  double a = 0.0;
  double kappa = 0.0;
  std::optional<double> mu_max;
};

ComplexityConstants complexity_constants(double kappa_J, double nu,
                                         double theta_fcd, double eta);
// F(x) = A x - b: kappa_J = ||A||, nu = ||A^T A||, theta_fcd = 1.
ComplexityConstants complexity_constants(const DenseMatrix& a, double eta);

struct ComplexityReport {
  std::optional<int> j_eps;  // first j with the approximate-optimality test
                             // satisfied at x_{j+1}
  double bound = 0.0;        // worst-case value for j_eps
  double mu_max = 0.0;
  bool bound_satisfied = false;
  // Iterations with mu_j > kappa / ||F_j||^2 that were rejected.
  std::vector<int> success_condition_violations;
  // Iterations before j_eps where mu_j exceeded mu_max.
  std::vector<int> mu_max_violations;

  bool ok() const {
    return bound_satisfied && success_condition_violations.empty() &&
           mu_max_violations.empty();
  }
};

// Checks a trace of a linear problem against the worst-case iteration bound
// and the sufficient condition for success. `f_bar` is ||F|| at the
// least-squares solution.
ComplexityReport complexity_monitor(const SolveResult& trace,
                                    const ComplexityConstants& constants,
                                    const SolverConfig& cfg, double eps,
                                    double f_bar);

// problem,n,solver_id,eps,converged,iterations,f_final,grad_norm_final,eoc,
// conv_class
void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows);
std::vector<RunResult> read_results_csv(std::istream& in);
// solver_id,tau,rho
void write_profile_csv(std::ostream& out,
                       const std::vector<ProfileCurve>& curves);
// 800x600 step plot, log2(tau) on [0, 6] horizontally.
void write_profile_svg(std::ostream& out,
                       const std::vector<ProfileCurve>& curves);

// Path wrappers; throw std::runtime_error on I/O failure.
void emit_csv(const std::vector<RunResult>& rows, const std::string& path);
void emit_csv(const std::vector<ProfileCurve>& curves, const std::string& path);
void emit_svg(const std::vector<ProfileCurve>& curves, const std::string& path);

// Convergence-class counts keyed by (solver_id, residual class).
struct ClassCounts {
  int quadratic = 0;
  int superlinear = 0;
  int linear_or_worse = 0;
  int failed = 0;
  int converged() const { return quadratic + superlinear + linear_or_worse; }
};
std::map<std::pair<std::string, ResidualClass>, ClassCounts> summarize(
    const std::vector<RunResult>& rows, const ProblemRegistry& registry,
    double eps);

}  // namespace nlls
