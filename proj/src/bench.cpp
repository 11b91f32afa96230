#include "nlls/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "nlls/csv.hpp"

namespace nlls {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kResultsHeader =
    "problem,n,solver_id,eps,converged,iterations,f_final,grad_norm_final,"
    "eoc,conv_class";
constexpr const char* kProfileHeader = "solver_id,tau,rho";
}  // namespace

std::string SolverVariant::id() const {
  std::string out(to_string(policy));
  if (engine != StepEngine::kExact) {
    out += ':';
    out += to_string(engine);
  }
  return out;
}

std::optional<SolverVariant> SolverVariant::parse(std::string_view id) {
  SolverVariant v;
  std::string_view policy = id;
  const auto colon = id.find(':');
  if (colon != std::string_view::npos) {
    policy = id.substr(0, colon);
    const auto engine = parse_step_engine(id.substr(colon + 1));
    if (!engine) return std::nullopt;
    v.engine = *engine;
  }
  const auto p = parse_policy(policy);
  if (!p) return std::nullopt;
  v.policy = *p;
  return v;
}

std::string_view to_string(ConvClass c) {
  switch (c) {
    case ConvClass::kQuadratic: return "quadratic";
    case ConvClass::kSuperlinear: return "superlinear";
    case ConvClass::kLinearOrWorse: return "linear_or_worse";
    case ConvClass::kFailed: return "failed";
  }
  return "?";
}

std::optional<ConvClass> parse_conv_class(std::string_view s) {
  for (ConvClass c : {ConvClass::kQuadratic, ConvClass::kSuperlinear,
                      ConvClass::kLinearOrWorse, ConvClass::kFailed}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

// --- order of convergence -----------------------------------------------

std::optional<double> eoc(double grad_norm_x0, double grad_norm_prev,
                          double grad_norm_final) {
  const double scale = std::max(1.0, grad_norm_x0);
  const double num = grad_norm_final / scale;
  const double den = grad_norm_prev / scale;
  if (!(num > 0.0 && num < 1.0 && den > 0.0 && den < 1.0)) return std::nullopt;
  return std::log(num) / std::log(den);
}

std::optional<double> eoc(const SolveResult& result, double grad_norm_x0) {
  if (result.trace.size() < 2) return std::nullopt;
  return eoc(grad_norm_x0, result.trace.back().grad_norm,
             result.final_grad_norm);
}

ConvClass classify(std::optional<double> e, bool converged) {
  if (!converged) return ConvClass::kFailed;
  if (!e) return ConvClass::kLinearOrWorse;
  if (*e >= 1.8) return ConvClass::kQuadratic;
  if (*e >= 1.1) return ConvClass::kSuperlinear;
  return ConvClass::kLinearOrWorse;
}

ConvClass classify_run(const SolveResult& result, double grad_norm_x0,
                       bool converged) {
  if (!converged) return ConvClass::kFailed;
  const auto e = eoc(result, grad_norm_x0);
  if (e) return classify(e, true);
  const auto& t = result.trace;
  if (result.final_grad_norm == 0.0 && t.size() >= 3) {
    const auto prior =
        eoc(grad_norm_x0, t[t.size() - 2].grad_norm, t.back().grad_norm);
    if (prior && *prior >= 1.8) return ConvClass::kQuadratic;
  }
  return ConvClass::kLinearOrWorse;
}

// --- suite --------------------------------------------------------------

std::vector<ProblemInstance> suite_instances(const ProblemRegistry& registry,
                                             SuiteFilter filter) {
  std::vector<ProblemInstance> out;
  for (const ProblemInfo& info : registry.list()) {
    if (filter == SuiteFilter::kZero &&
        info.residual_class != ResidualClass::kZero) {
      continue;
    }
    if (filter == SuiteFilter::kNonzero &&
        info.residual_class != ResidualClass::kNonzero) {
      continue;
    }
    out.push_back({info.name, std::nullopt});
  }
  return out;
}

RunResult run_one(const ResidualProblem& problem, const SolverVariant& variant,
                  double eps, const SolverConfig& base) {
  RunResult row;
  row.problem = problem.name();
  row.n = problem.n();
  row.solver_id = variant.id();
  row.eps = eps;

  SolverConfig cfg = base;
  cfg.policy = variant.policy;
  cfg.step_engine = variant.engine;
  cfg.eps = eps;
  cfg.keep_iterates = false;
  cfg.diagnostics = false;

  SolveResult res;
  try {
    res = lm_solve(problem, cfg);
  } catch (const std::exception&) {
    row.f_final = std::nan("");
    row.grad_norm_final = std::nan("");
    return row;
  }
  row.iterations = res.iterations;
  row.f_final = res.final_f;
  row.grad_norm_final = res.final_grad_norm;
  row.converged = res.status != SolveStatus::kNonFinite &&
                  res.final_grad_norm <= eps && res.iterations <= cfg.max_iters;
  const double g0 =
      res.trace.empty() ? res.final_grad_norm : res.trace.front().grad_norm;
  if (row.converged) row.eoc = eoc(res, g0);
  row.conv_class = classify_run(res, g0, row.converged);
  return row;
}

std::vector<RunResult> run_suite(const ProblemRegistry& registry,
                                 const std::vector<ProblemInstance>& problems,
                                 const std::vector<SolverVariant>& solvers,
                                 const std::vector<double>& eps_list,
                                 const SolverConfig& base, unsigned threads) {
  if (solvers.empty()) throw std::invalid_argument("run_suite: no solvers");

  struct Task {
    std::size_t problem;
    std::size_t solver;
    std::size_t eps;
  };
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < problems.size(); ++p)
    for (std::size_t s = 0; s < solvers.size(); ++s)
      for (std::size_t e = 0; e < eps_list.size(); ++e)
        tasks.push_back({p, s, e});

  std::vector<std::unique_ptr<ResidualProblem>> instances;
  instances.reserve(problems.size());
  for (const ProblemInstance& pi : problems) {
    instances.push_back(registry.get(pi.name, pi.n));
  }

  // Every task writes its own slot, so the output order does not depend on
  // scheduling.
  std::vector<RunResult> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      rows[i] = run_one(*instances[t.problem], solvers[t.solver],
                        eps_list[t.eps], base);
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(1, tasks.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  return rows;
}

// --- performance profiles -----------------------------------------------

double ProfileCurve::value_at(double tau) const {
  double v = 0.0;
  for (const auto& [t, rho] : points) {
    if (t > tau) break;
    v = rho;
  }
  return v;
}

std::vector<ProfileCurve> performance_profile(
    const std::vector<RunResult>& results, double eps) {
  std::vector<std::string> solvers;
  std::vector<std::pair<std::string, std::size_t>> problems;
  std::map<std::pair<std::size_t, std::size_t>, double> cost;
  std::map<std::string, std::size_t> solver_index;
  std::map<std::pair<std::string, std::size_t>, std::size_t> problem_index;

  for (const RunResult& r : results) {
    if (r.eps != eps) continue;
    auto [sit, snew] = solver_index.try_emplace(r.solver_id, solvers.size());
    if (snew) solvers.push_back(r.solver_id);
    auto [pit, pnew] =
        problem_index.try_emplace({r.problem, r.n}, problems.size());
    if (pnew) problems.emplace_back(r.problem, r.n);
    const double t =
        r.converged ? std::max(1.0, static_cast<double>(r.iterations)) : kInf;
    if (!cost.emplace(std::pair{pit->second, sit->second}, t).second) {
      throw std::invalid_argument("performance_profile: duplicate row for " +
                                  r.problem + "/" + r.solver_id);
    }
  }
  if (problems.empty()) {
    throw std::invalid_argument("performance_profile: no rows at eps " +
                                format_double(eps));
  }
  if (cost.size() != problems.size() * solvers.size()) {
    throw std::invalid_argument(
        "performance_profile: missing (problem, solver) rows");
  }

  const double np = static_cast<double>(problems.size());
  std::vector<std::vector<double>> ratios(solvers.size());
  for (std::size_t p = 0; p < problems.size(); ++p) {
    double best = kInf;
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      best = std::min(best, cost.at({p, s}));
    }
    for (std::size_t s = 0; s < solvers.size(); ++s) {
      const double t = cost.at({p, s});
      ratios[s].push_back(std::isfinite(t) ? t / best : kInf);
    }
  }

  std::vector<ProfileCurve> curves;
  for (std::size_t s = 0; s < solvers.size(); ++s) {
    std::vector<double> r = ratios[s];
    std::sort(r.begin(), r.end());
    ProfileCurve c;
    c.solver_id = solvers[s];
    std::size_t below = 0;
    while (below < r.size() && r[below] <= 1.0) ++below;
    c.points.emplace_back(1.0, below / np);
    for (std::size_t i = below; i < r.size() && std::isfinite(r[i]);) {
      const double tau = r[i];
      while (i < r.size() && r[i] == tau) ++i;
      c.points.emplace_back(tau, i / np);
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

// --- complexity monitor ---------------------------------------------------

ComplexityConstants complexity_constants(double kappa_J, double nu,
                                         double theta_fcd, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw std::invalid_argument("complexity_constants: eta must lie in (0,1)");
  }
  ComplexityConstants c;
  c.kappa_J = kappa_J;
  c.nu = nu;
  c.theta_fcd = theta_fcd;
  c.a = (0.5 * nu + 2.0 * kappa_J * kappa_J) / theta_fcd;
  const double one_minus = 1.0 - eta;
  c.kappa = (c.a + std::sqrt(c.a * c.a +
                             4.0 * c.a * kappa_J * kappa_J * one_minus)) /
            (2.0 * one_minus);
  return c;
}

ComplexityConstants complexity_constants(const DenseMatrix& a, double eta) {
  const double kj = spectral_norm(a);
  return complexity_constants(kj, kj * kj, 1.0, eta);
}

ComplexityReport complexity_monitor(const SolveResult& trace,
                                    const ComplexityConstants& constants,
                                    const SolverConfig& cfg, double eps,
                                    double f_bar) {
  ComplexityReport rep;
  const double threshold = std::max(eps, (1.0 + eps) * f_bar);
  rep.mu_max =
      cfg.lambda * constants.kappa /
      std::max(eps * eps, (1.0 + eps) * (1.0 + eps) * f_bar * f_bar);

  const auto& t = trace.trace;
  const double F0 = t.empty() ? trace.final_F_norm : t.front().F_norm;
  const double f0 = 0.5 * F0 * F0;
  const double big_c =
      2.0 * (constants.kappa_J * constants.kappa_J + rep.mu_max * F0 * F0) *
      f0 / (cfg.eta * constants.theta_fcd);
  const double log_term = std::max(
      0.0, std::log(constants.kappa / (cfg.mu_min * eps * eps)) /
               std::log(cfg.lambda));
  rep.bound = big_c * (1.0 + log_term) / (eps * eps);

  // Norms at x_0 .. x_N; x_N is the final point.
  std::vector<std::pair<double, double>> at;
  for (const IterationRecord& r : t) at.emplace_back(r.grad_norm, r.F_norm);
  at.emplace_back(trace.final_grad_norm, trace.final_F_norm);
  for (std::size_t j = 0; j + 1 < at.size(); ++j) {
    const auto [g, fn] = at[j + 1];
    if (g < eps || fn < threshold) {
      rep.j_eps = static_cast<int>(j);
      break;
    }
  }
  rep.bound_satisfied = rep.j_eps
                            ? static_cast<double>(*rep.j_eps) <= rep.bound
                            : static_cast<double>(trace.iterations) <= rep.bound;

  for (const IterationRecord& r : t) {
    if (r.F_norm > 0.0 && r.mu > constants.kappa / (r.F_norm * r.F_norm) &&
        !r.success) {
      rep.success_condition_violations.push_back(r.j);
    }
    const bool before = !rep.j_eps || r.j <= *rep.j_eps;
    if (before && r.F_norm >= threshold && r.mu > rep.mu_max) {
      rep.mu_max_violations.push_back(r.j);
    }
  }
  return rep;
}

// --- output -------------------------------------------------------------

void write_results_csv(std::ostream& out, const std::vector<RunResult>& rows) {
  out << kResultsHeader << '\n';
  for (const RunResult& r : rows) {
    out << r.problem << ',' << r.n << ',' << r.solver_id << ','
        << format_double(r.eps) << ',' << (r.converged ? 1 : 0) << ','
        << r.iterations << ',' << format_double(r.f_final) << ','
        << format_double(r.grad_norm_final) << ',';
    if (r.eoc) out << format_double(*r.eoc);
    out << ',' << to_string(r.conv_class) << '\n';
  }
}

std::vector<RunResult> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw std::invalid_argument("results csv: bad or missing header");
  }
  std::vector<RunResult> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) {
      throw std::invalid_argument("results csv line " + std::to_string(lineno) +
                                  ": expected 10 fields");
    }
    RunResult r;
    r.problem = f[0];
    r.n = std::stoul(f[1]);
    r.solver_id = f[2];
    r.eps = parse_double(f[3]);
    if (f[4] != "0" && f[4] != "1") {
      throw std::invalid_argument("results csv: converged must be 0 or 1");
    }
    r.converged = f[4] == "1";
    r.iterations = std::stoi(f[5]);
    r.f_final = parse_double(f[6]);
    r.grad_norm_final = parse_double(f[7]);
    if (!f[8].empty()) r.eoc = parse_double(f[8]);
    const auto c = parse_conv_class(f[9]);
    if (!c) throw std::invalid_argument("results csv: bad conv_class " + f[9]);
    r.conv_class = *c;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_profile_csv(std::ostream& out,
                       const std::vector<ProfileCurve>& curves) {
  out << kProfileHeader << '\n';
  for (const ProfileCurve& c : curves) {
    for (const auto& [tau, rho] : c.points) {
      out << c.solver_id << ',' << format_double(tau) << ','
          << format_double(rho) << '\n';
    }
  }
}

namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void write_profile_svg(std::ostream& out,
                       const std::vector<ProfileCurve>& curves) {
  if (curves.empty()) throw std::invalid_argument("profile svg: no curves");
  constexpr double kW = 800, kH = 600;
  constexpr double kLeft = 70, kRight = 30, kTop = 30, kBottom = 60;
  constexpr double kMaxLog = 6.0;
  constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                     "#ff7f0e", "#9467bd", "#8c564b"};
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;
  auto px = [&](double tau) {
    const double l = std::clamp(std::log2(tau), 0.0, kMaxLog);
    return kLeft + l / kMaxLog * pw;
  };
  auto py = [&](double rho) { return kTop + (1.0 - rho) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
         "width=\"800\" height=\"600\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  out << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(py(0))
      << "\" x2=\"" << fixed2(kLeft + pw) << "\" y2=\"" << fixed2(py(0))
      << "\"/>\n";
  out << "<line x1=\"" << fixed2(kLeft) << "\" y1=\"" << fixed2(py(0))
      << "\" x2=\"" << fixed2(kLeft) << "\" y2=\"" << fixed2(py(1))
      << "\"/>\n";
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (int k = 0; k <= 6; ++k) {
    const double x = kLeft + k / kMaxLog * pw;
    out << "<text x=\"" << fixed2(x) << "\" y=\"" << fixed2(py(0) + 18)
        << "\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double rho = k / 4.0;
    out << "<text x=\"" << fixed2(kLeft - 8) << "\" y=\"" << fixed2(py(rho) + 4)
        << "\" text-anchor=\"end\">" << fixed2(rho) << "</text>\n";
  }
  out << "<text x=\"" << fixed2(kLeft + pw / 2) << "\" y=\"" << fixed2(kH - 15)
      << "\" text-anchor=\"middle\">log2(tau)</text>\n";
  out << "<text x=\"15\" y=\"" << fixed2(kTop + ph / 2)
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
      << fixed2(kTop + ph / 2) << ")\">rho(tau)</text>\n";
  out << "</g>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const ProfileCurve& c = curves[i];
    for (const auto& [tau, rho] : c.points) {
      if (!(rho >= 0.0 && rho <= 1.0) || !(tau >= 1.0)) {
        throw std::invalid_argument("profile svg: point outside domain");
      }
    }
    const char* color = kColors[i % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    double prev = 0.0;
    bool first = true;
    for (const auto& [tau, rho] : c.points) {
      if (std::log2(tau) > kMaxLog) break;
      if (!first) out << ' ' << fixed2(px(tau)) << ',' << fixed2(py(prev));
      if (!first) out << ' ';
      out << fixed2(px(tau)) << ',' << fixed2(py(rho));
      prev = rho;
      first = false;
    }
    out << ' ' << fixed2(px(std::exp2(kMaxLog))) << ',' << fixed2(py(prev))
        << "\"/>\n";
    const double ly = kTop + 20 + 20 * static_cast<double>(i);
    out << "<line x1=\"" << fixed2(kLeft + pw - 150) << "\" y1=\""
        << fixed2(ly) << "\" x2=\"" << fixed2(kLeft + pw - 120) << "\" y2=\""
        << fixed2(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fixed2(kLeft + pw - 112) << "\" y=\""
        << fixed2(ly + 4) << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << c.solver_id << "</text>\n";
  }
  out << "</svg>\n";
}

namespace {

template <typename Fn>
void write_file(const std::string& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace

void emit_csv(const std::vector<RunResult>& rows, const std::string& path) {
  write_file(path, [&](std::ostream& o) { write_results_csv(o, rows); });
}

void emit_csv(const std::vector<ProfileCurve>& curves,
              const std::string& path) {
  write_file(path, [&](std::ostream& o) { write_profile_csv(o, curves); });
}

void emit_svg(const std::vector<ProfileCurve>& curves,
              const std::string& path) {
  write_file(path, [&](std::ostream& o) { write_profile_svg(o, curves); });
}

std::map<std::pair<std::string, ResidualClass>, ClassCounts> summarize(
    const std::vector<RunResult>& rows, const ProblemRegistry& registry,
    double eps) {
  std::map<std::pair<std::string, ResidualClass>, ClassCounts> out;
  for (const RunResult& r : rows) {
    if (r.eps != eps || !registry.contains(r.problem)) continue;
    ClassCounts& c =
        out[{r.solver_id, registry.spec(r.problem).residual_class}];
    switch (r.conv_class) {
      case ConvClass::kQuadratic: ++c.quadratic; break;
      case ConvClass::kSuperlinear: ++c.superlinear; break;
      case ConvClass::kLinearOrWorse: ++c.linear_or_worse; break;
      case ConvClass::kFailed: ++c.failed; break;
    }
  }
  return out;
}

}  // namespace nlls
