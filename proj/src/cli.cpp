#include "nlls/cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "nlls/bench.hpp"
#include "nlls/config_file.hpp"
#include "nlls/corpus.hpp"
#include "nlls/csv.hpp"
#include "nlls/lm.hpp"

namespace nlls {

namespace {

// Command-line flags that map one-to-one onto config keys. Values stay as
// text until the config file (if any) has been applied, so that flags win.
struct KeyedFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    options[key] = app->add_option(flag, values[key], help);
  }
  void apply(CliConfig& cfg) const {
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) cfg.set(key, values.at(key));
    }
  }
};

void add_tuning_flags(CLI::App* app, KeyedFlags& flags) {
  flags.add(app, "--eta", "eta", "acceptance threshold for rho (default 1e-2)");
  flags.add(app, "--lambda", "lambda", "mu growth factor (default 5)");
  flags.add(app, "--mu0", "mu0", "initial mu (default 1)");
  flags.add(app, "--mu-min", "mu_min", "lower bound on mu (default 1e-16)");
  flags.add(app, "--max-iter", "max_iters", "iteration cap (default 10000)");
  flags.add(app, "--cg-tol", "cg_rel_tol",
            "relative residual target of truncated CG (default 1e-4)");
  flags.add(app, "--eta1", "zf_eta1", "zhao_fan lower band (default 0.1)");
  flags.add(app, "--eta2", "zf_eta2", "zhao_fan upper band (default 0.9)");
  flags.add(app, "--c0", "zf_c0", "zhao_fan growth factor (default 5)");
}

CliConfig resolve_config(const std::string& config_path,
                         const KeyedFlags& flags) {
  CliConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  flags.apply(cfg);
  cfg.validate();
  return cfg;
}

std::string problem_names() {
  std::string names;
  for (const ProblemInfo& info : ProblemRegistry::builtin().list()) {
    if (!names.empty()) names += ", ";
    names += info.name;
  }
  return names;
}

// Returns nullptr after printing a message when the name or size is bad.
std::unique_ptr<ResidualProblem> lookup_problem(const std::string& name,
                                                int n, std::ostream& err) {
  const ProblemRegistry& reg = ProblemRegistry::builtin();
  if (!reg.contains(name)) {
    err << "error: unknown problem '" << name
        << "'. valid names: " << problem_names() << '\n';
    return nullptr;
  }
  try {
    std::optional<std::size_t> dim;
    if (n > 0) dim = static_cast<std::size_t>(n);
    return reg.get(name, dim);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return nullptr;
  }
}

int cmd_solve(const std::string& problem_name, int n,
              const std::string& trace_path, const CliConfig& cfg,
              std::ostream& out, std::ostream& err) {
  auto problem = lookup_problem(problem_name, n, err);
  if (!problem) return kExitUsage;
  const SolveResult res = lm_solve(*problem, cfg.solver);

  out << "problem: " << problem->name() << '\n';
  out << "n: " << problem->n() << '\n';
  out << "variant: " << to_string(cfg.solver.policy) << '\n';
  out << "step: " << to_string(cfg.solver.step_engine) << '\n';
  out << "status: " << to_string(res.status) << '\n';
  out << "iterations: " << res.iterations << '\n';
  out << "successful_iterations: " << res.successful_iterations << '\n';
  out << "f_final: " << format_double(res.final_f) << '\n';
  out << "grad_norm_final: " << format_double(res.final_grad_norm) << '\n';
  if (auto d = dist_to_solution(*problem, res.final_x)) {
    out << "dist_to_solution: " << format_double(*d) << '\n';
  }
  if (!res.message.empty()) err << "note: " << res.message << '\n';

  if (!trace_path.empty()) {
    std::ofstream f(trace_path, std::ios::binary);
    if (!f) {
      err << "error: cannot write " << trace_path << '\n';
      return kExitFailure;
    }
    write_trace_csv(f, res);
    out << "trace: " << trace_path << '\n';
  }
  const bool ok = res.status == SolveStatus::kConvergedGradient ||
                  res.status == SolveStatus::kResidualVanished;
  return ok ? kExitOk : kExitFailure;
}

int cmd_bench(const std::string& out_path, unsigned threads,
              const CliConfig& cfg, std::ostream& out) {
  std::vector<SolverVariant> solvers;
  for (const std::string& id : cfg.variants) {
    SolverVariant v = *SolverVariant::parse(id);
    if (id.find(':') == std::string::npos) v.engine = cfg.solver.step_engine;
    solvers.push_back(v);
  }
  const ProblemRegistry& reg = ProblemRegistry::builtin();
  const auto problems = suite_instances(reg, cfg.suite);
  const auto rows =
      run_suite(reg, problems, solvers, cfg.eps_list, cfg.solver, threads);
  emit_csv(rows, out_path);

  out << "problems: " << problems.size() << '\n';
  out << "rows: " << rows.size() << '\n';
  out << "results: " << out_path << '\n';
  for (double eps : cfg.eps_list) {
    const auto counts = summarize(rows, reg, eps);
    for (const auto& [key, c] : counts) {
      out << "summary[" << format_double(eps) << ',' << key.first << ','
          << to_string(key.second) << "]: quadratic=" << c.quadratic
          << " superlinear=" << c.superlinear
          << " linear_or_worse=" << c.linear_or_worse
          << " failed=" << c.failed << " converged=" << c.converged() << '\n';
    }
  }
  return kExitOk;
}

int cmd_profile(const std::string& in_path, double eps,
                const std::string& svg_path, const std::string& csv_path,
                std::ostream& out, std::ostream& err) {
  std::ifstream in(in_path);
  if (!in) {
    err << "error: cannot read " << in_path << '\n';
    return kExitUsage;
  }
  std::vector<ProfileCurve> curves;
  try {
    curves = performance_profile(read_results_csv(in), eps);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  emit_svg(curves, svg_path);
  if (!csv_path.empty()) emit_csv(curves, csv_path);
  for (const ProfileCurve& c : curves) {
    out << "profile[" << c.solver_id
        << "]: efficiency=" << format_double(c.value_at(1.0))
        << " robustness=" << format_double(c.points.back().second) << '\n';
  }
  out << "svg: " << svg_path << '\n';
  if (!csv_path.empty()) out << "csv: " << csv_path << '\n';
  return kExitOk;
}

int cmd_check(const std::string& problem_name, int n, double tol,
              bool inject_fault, std::ostream& out, std::ostream& err) {
  auto problem = lookup_problem(problem_name, n, err);
  if (!problem) return kExitUsage;
  if (inject_fault) problem = with_scaled_jacobian(std::move(problem), 2.0);

  const Vector x0 = problem->start_point();
  std::vector<Vector> points = {x0};
  for (Vector& x : perturbed_points(x0, 5)) points.push_back(std::move(x));

  bool all_pass = true;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const JacobianCheckReport rep = check_jacobian(*problem, points[k], tol);
    out << "point[" << k << "]: max_rel_error=" << format_double(rep.max_rel_error)
        << " worst=(" << rep.worst_row << ',' << rep.worst_col << ") "
        << (rep.pass ? "pass" : "FAIL") << '\n';
    all_pass = all_pass && rep.pass;
  }
  out << "check: " << (all_pass ? "pass" : "fail") << '\n';
  return all_pass ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Levenberg-Marquardt least-squares solver and benchmark tools",
               "nlls_cli"};
  app.require_subcommand(1);

  // solve
  CLI::App* solve = app.add_subcommand("solve", "solve one corpus problem");
  std::string s_problem, s_trace, s_config;
  int s_n = 0;
  KeyedFlags s_flags;
  solve->add_option("--problem", s_problem, "problem name")->required();
  solve->add_option("--n", s_n, "dimension (variable-size problems)");
  solve->add_option("--trace", s_trace, "write the iteration trace CSV here");
  solve->add_option("--config", s_config, "key=value config file");
  s_flags.add(solve, "--variant", "variant", "v1 | v2 | zhao_fan");
  s_flags.add(solve, "--step", "step", "exact | cauchy | tcg");
  s_flags.add(solve, "--eps", "eps", "gradient-norm tolerance (default 1e-5)");
  add_tuning_flags(solve, s_flags);

  // bench
  CLI::App* bench = app.add_subcommand("bench", "run the benchmark suite");
  std::string b_out, b_config;
  unsigned b_threads = 0;
  KeyedFlags b_flags;
  bench->add_option("--out", b_out, "results CSV path")->required();
  bench->add_option("--threads", b_threads, "worker threads (0 = auto)");
  bench->add_option("--config", b_config, "key=value config file");
  b_flags.add(bench, "--suite", "suite", "all | zero | nonzero");
  b_flags.add(bench, "--variants", "variants",
              "comma-separated solver ids, e.g. v1,v2,zhao_fan or v1:tcg");
  b_flags.add(bench, "--eps", "eps_list",
              "comma-separated tolerances (default 1e-3,1e-5)");
  b_flags.add(bench, "--step", "step",
              "step engine for ids without an explicit one");
  add_tuning_flags(bench, b_flags);

  // profile
  CLI::App* profile =
      app.add_subcommand("profile", "performance profiles from a results CSV");
  std::string p_in, p_out, p_csv;
  double p_eps = 1e-5;
  profile->add_option("--in", p_in, "results CSV")->required();
  profile->add_option("--eps", p_eps, "tolerance slice to profile");
  profile->add_option("--out", p_out, "SVG output path")->required();
  profile->add_option("--csv", p_csv, "optional profile CSV output");

  // check
  CLI::App* check =
      app.add_subcommand("check", "compare a Jacobian with finite differences");
  std::string c_problem;
  int c_n = 0;
  double c_tol = 1e-5;
  bool c_fault = false;
  check->add_option("--problem", c_problem, "problem name")->required();
  check->add_option("--n", c_n, "dimension (variable-size problems)");
  check->add_option("--tol", c_tol, "relative error tolerance");
  check->add_flag("--inject-fault", c_fault,
                  "double the analytic Jacobian to test the checker itself");

  CLI::App* list = app.add_subcommand("list", "list the problem corpus");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*solve) {
      const CliConfig cfg = resolve_config(s_config, s_flags);
      return cmd_solve(s_problem, s_n, s_trace, cfg, out, err);
    }
    if (*bench) {
      const CliConfig cfg = resolve_config(b_config, b_flags);
      return cmd_bench(b_out, b_threads, cfg, out);
    }
    if (*profile) {
      return cmd_profile(p_in, p_eps, p_out, p_csv, out, err);
    }
    if (*check) {
      return cmd_check(c_problem, c_n, c_tol, c_fault, out, err);
    }
    if (*list) {
      for (const ProblemInfo& info : ProblemRegistry::builtin().list()) {
        out << info.name << ": n=" << info.default_n
            << " class=" << to_string(info.residual_class)
            << " variable_dim=" << (info.variable_dim ? 1 : 0) << '\n';
      }
      return kExitOk;
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace nlls
