#include "nlls/lm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "nlls/csv.hpp"

namespace nlls {

std::string_view to_string(StepEngine e) {
  switch (e) {
    case StepEngine::kExact: return "exact";
    case StepEngine::kCauchy: return "cauchy";
    case StepEngine::kTruncatedCg: return "tcg";
  }
  return "?";
}

std::string_view to_string(Policy p) {
  switch (p) {
    case Policy::kV1: return "v1";
    case Policy::kV2: return "v2";
    case Policy::kZhaoFan: return "zhao_fan";
  }
  return "?";
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConvergedGradient: return "converged_gradient";
    case SolveStatus::kResidualVanished: return "residual_vanished";
    case SolveStatus::kMaxIters: return "max_iters";
    case SolveStatus::kStalled: return "stalled";
    case SolveStatus::kNonFinite: return "non_finite";
  }
  return "?";
}

std::optional<StepEngine> parse_step_engine(std::string_view s) {
  if (s == "exact") return StepEngine::kExact;
  if (s == "cauchy") return StepEngine::kCauchy;
  if (s == "tcg" || s == "truncated_cg") return StepEngine::kTruncatedCg;
  return std::nullopt;
}

std::optional<Policy> parse_policy(std::string_view s) {
  if (s == "v1") return Policy::kV1;
  if (s == "v2") return Policy::kV2;
  if (s == "zhao_fan") return Policy::kZhaoFan;
  return std::nullopt;
}

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid solver config: " + what);
  };
  if (!(eta > 0.0 && eta < 1.0)) fail("eta must lie in (0, 1)");
  if (!(lambda > 1.0)) fail("lambda must exceed 1");
  if (!(mu_min > 0.0)) fail("mu_min must be positive");
  if (!(mu0 >= mu_min)) fail("mu0 must be at least mu_min");
  if (!(eps > 0.0)) fail("eps must be positive");
  if (max_iters < 0) fail("max_iters must be nonnegative");
  if (!(cg_rel_tol > 0.0 && cg_rel_tol < 1.0)) {
    fail("cg_rel_tol must lie in (0, 1)");
  }
  if (policy == Policy::kZhaoFan) {
    if (!(zf_eta1 > 0.0 && zf_eta1 < zf_eta2 && zf_eta2 < 1.0)) {
      fail("need 0 < zf_eta1 < zf_eta2 < 1");
    }
    if (!(eta < zf_eta1)) fail("need eta < zf_eta1");
    if (!(zf_c0 > 1.0)) fail("zf_c0 must exceed 1");
  }
}

double model_value(std::span<const double> F, const DenseMatrix& J,
                   double gamma, std::span<const double> s) {
  if (J.rows() != F.size() || J.cols() != s.size()) {
    throw std::invalid_argument("model_value: dimension mismatch");
  }
  Vector r = multiply(J, s);
  axpy(1.0, F, r);
  const double rn = norm2(r);
  const double sn = norm2(s);
  return 0.5 * rn * rn + 0.5 * gamma * sn * sn;
}

double predicted_reduction(std::span<const double> grad, const DenseMatrix& J,
                           double gamma, std::span<const double> s) {
  const double js = norm2(multiply(J, s));
  const double sn = norm2(s);
  return -dot(grad, s) - 0.5 * (js * js + gamma * sn * sn);
}

Vector exact_step(std::span<const double> F, const DenseMatrix& J,
                  double gamma) {
  Vector rhs = multiply_transposed(J, F);
  for (double& v : rhs) v = -v;
  if (norm2(rhs) == 0.0) return Vector(J.cols(), 0.0);
  const SpdSystem sys = gram(J, gamma);
  if (auto s = cholesky_solve(sys, rhs)) return *std::move(s);
  CgOptions opts;
  opts.rel_tol = 1e-12;
  opts.max_iters = static_cast<int>(10 * J.cols());
  return cg_solve(sys, rhs, opts).solution;
}

Vector cauchy_step(std::span<const double> F, const DenseMatrix& J,
                   double gamma, std::span<const double> grad) {
  (void)F;
  const double gg = dot(grad, grad);
  if (gg == 0.0) return Vector(grad.size(), 0.0);
  const double jg = norm2(multiply(J, grad));
  const double curvature = jg * jg + gamma * gg;
  const double t = gg / curvature;
  Vector s(grad.begin(), grad.end());
  for (double& v : s) v *= -t;
  return s;
}

TcgStep tcg_step(std::span<const double> F, const DenseMatrix& J,
                 double gamma, std::span<const double> grad,
                 double cg_rel_tol) {
  (void)F;
  Vector rhs(grad.begin(), grad.end());
  for (double& v : rhs) v = -v;
  const SpdSystem sys = gram(J, gamma);
  CgOptions opts;
  opts.rel_tol = cg_rel_tol;
  opts.max_iters = static_cast<int>(J.cols());
  CgResult cg = cg_solve(sys, rhs, opts);
  return {std::move(cg.solution), cg.iterations};
}

double pred_floor(double f_old) { return 1e-30 * std::max(1.0, f_old); }

double compute_rho(double f_old, double f_new, double pred) {
  if (!(pred > pred_floor(f_old))) {
    return -std::numeric_limits<double>::infinity();
  }
  const double rho = (f_old - f_new) / pred;
  if (std::isnan(rho)) return -std::numeric_limits<double>::infinity();
  return rho;
}

double gamma_of(Policy policy, double mu, double F_norm, double grad_norm) {
  if (policy == Policy::kZhaoFan) return mu * grad_norm;
  return mu * F_norm * F_norm;
}

ParameterUpdate update_parameters(Policy policy, bool success, double mu,
                                  double mu_bar, double grad_norm,
                                  const SolverConfig& cfg) {
  ParameterUpdate next{mu, mu_bar};
  switch (policy) {
    case Policy::kV1:
    case Policy::kV2:
      if (!success) {
        next.mu = cfg.lambda * mu;
      } else {
        next.mu = policy == Policy::kV1
                      ? std::max(mu_bar / cfg.lambda, cfg.mu_min)
                      : mu_bar;
        next.mu_bar = mu;
      }
      break;
    case Policy::kZhaoFan: {
      const double band = grad_norm * mu;
      if (!success || band < cfg.zf_eta1) {
        next.mu = cfg.zf_c0 * mu;
      } else if (band > cfg.zf_eta2) {
        next.mu = std::max(cfg.zf_c1() * mu, cfg.mu_min);
      }
      break;
    }
  }
  next.mu = std::max(next.mu, cfg.mu_min);
  return next;
}

double fcd_ratio(double pred, double grad_norm, double J_norm_sq_plus_gamma) {
  if (pred == 0.0) return 0.0;
  return 2.0 * pred * J_norm_sq_plus_gamma / (grad_norm * grad_norm);
}

namespace {

struct PointEval {
  Vector F;
  DenseMatrix J;
  Vector grad;
  double f = 0.0;
  double F_norm = 0.0;
  double grad_norm = 0.0;
};

}  // namespace

SolveResult lm_solve(const ResidualProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  SolveResult out;
  Vector x = p.start_point();

  auto non_finite = [&](const std::string& what) {
    out.status = SolveStatus::kNonFinite;
    out.message = what + " is not finite at iteration " +
                  std::to_string(out.iterations);
    out.final_x = x;
    return out;
  };

  PointEval cur;
  cur.F = p.residual(x);
  if (!all_finite(cur.F)) return non_finite("F(x0)");
  cur.J = p.jacobian(x);
  if (!all_finite(cur.J.data())) return non_finite("J(x0)");
  cur.grad = multiply_transposed(cur.J, cur.F);
  cur.F_norm = norm2(cur.F);
  cur.f = 0.5 * cur.F_norm * cur.F_norm;
  cur.grad_norm = norm2(cur.grad);
  if (!std::isfinite(cur.f) || !all_finite(cur.grad)) {
    return non_finite("f(x0)");
  }

  if (cfg.keep_iterates) out.iterates.push_back(x);

  double mu = cfg.mu0;
  double mu_bar = cfg.mu0;

  for (int j = 0;; ++j) {
    if (cur.grad_norm <= cfg.eps) {
      out.status = SolveStatus::kConvergedGradient;
      break;
    }
    if (cur.F_norm <= kResidualVanishedTol) {
      out.status = SolveStatus::kResidualVanished;
      break;
    }
    if (j >= cfg.max_iters) {
      out.status = SolveStatus::kMaxIters;
      break;
    }

    const double gamma = gamma_of(cfg.policy, mu, cur.F_norm, cur.grad_norm);
    IterationRecord rec;
    rec.j = j;
    rec.f = cur.f;
    rec.grad_norm = cur.grad_norm;
    rec.F_norm = cur.F_norm;
    rec.gamma = gamma;
    rec.mu = mu;
    rec.mu_bar = mu_bar;

    Vector s;
    switch (cfg.step_engine) {
      case StepEngine::kExact:
        s = exact_step(cur.F, cur.J, gamma);
        break;
      case StepEngine::kCauchy:
        s = cauchy_step(cur.F, cur.J, gamma, cur.grad);
        break;
      case StepEngine::kTruncatedCg: {
        TcgStep t = tcg_step(cur.F, cur.J, gamma, cur.grad, cfg.cg_rel_tol);
        s = std::move(t.step);
        rec.cg_iters = t.cg_iters;
        break;
      }
    }
    rec.step_norm = norm2(s);
    rec.pred = all_finite(s) ? predicted_reduction(cur.grad, cur.J, gamma, s)
                             : 0.0;
    if (cfg.diagnostics) {
      IterationDiagnostics d;
      d.jacobian_norm = spectral_norm(cur.J);
      Vector w(cur.grad.begin(), cur.grad.end());
      axpy(gamma, s, w);
      d.step_inner = dot(s, w);
      rec.diagnostics = d;
    }

    Vector x_trial = x;
    axpy(1.0, s, x_trial);
    Vector F_trial = p.residual(x_trial);
    double f_trial = std::numeric_limits<double>::infinity();
    if (all_finite(F_trial)) {
      const double fn = norm2(F_trial);
      f_trial = 0.5 * fn * fn;
    }
    rec.rho = compute_rho(cur.f, f_trial, rec.pred);
    rec.success = rec.rho >= cfg.eta;
    out.trace.push_back(rec);
    ++out.iterations;

    const ParameterUpdate next = update_parameters(
        cfg.policy, rec.success, mu, mu_bar, cur.grad_norm, cfg);
    mu = next.mu;
    mu_bar = next.mu_bar;

    if (rec.success) {
      ++out.successful_iterations;
      x = std::move(x_trial);
      cur.F = std::move(F_trial);
      cur.J = p.jacobian(x);
      if (!all_finite(cur.J.data())) return non_finite("J");
      cur.grad = multiply_transposed(cur.J, cur.F);
      cur.F_norm = norm2(cur.F);
      cur.f = 0.5 * cur.F_norm * cur.F_norm;
      cur.grad_norm = norm2(cur.grad);
      if (!all_finite(cur.grad)) return non_finite("gradient");
      if (cfg.keep_iterates) out.iterates.push_back(x);
    } else if (mu > kMuOverflow) {
      out.status = SolveStatus::kStalled;
      break;
    }
  }

  out.final_x = x;
  out.final_f = cur.f;
  out.final_grad_norm = cur.grad_norm;
  out.final_F_norm = cur.F_norm;
  return out;
}

void write_trace_csv(std::ostream& out, const SolveResult& result) {
  out << "j,f,grad_norm,F_norm,gamma,mu,mu_bar,rho,success,step_norm,"
         "cg_iters,pred\n";
  for (const IterationRecord& r : result.trace) {
    out << r.j << ',' << format_double(r.f) << ','
        << format_double(r.grad_norm) << ',' << format_double(r.F_norm) << ','
        << format_double(r.gamma) << ',' << format_double(r.mu) << ','
        << format_double(r.mu_bar) << ',' << format_double(r.rho) << ','
        << (r.success ? 1 : 0) << ',' << format_double(r.step_norm) << ',';
    if (r.cg_iters) out << *r.cg_iters;
    out << ',' << format_double(r.pred) << '\n';
  }
}

}  // namespace nlls
