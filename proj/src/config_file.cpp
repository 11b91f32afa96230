#include "nlls/config_file.hpp"

#include <fstream>
#include <istream>
#include <stdexcept>

#include "nlls/csv.hpp"

namespace nlls {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int out = 0;
  try {
    out = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) {
    throw std::invalid_argument(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return parse_double(v);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument(key + ": expected a number, got '" + v + "'");
  }
}

}  // namespace

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (const std::string& part : split(s, ',')) {
    const std::string t = trim(part);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const std::string& part : split_list(s)) {
    out.push_back(parse_real("eps", part));
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

void CliConfig::set(const std::string& key, const std::string& value) {
  SolverConfig& c = solver;
  if (key == "eta") {
    c.eta = parse_real(key, value);
  } else if (key == "lambda") {
    c.lambda = parse_real(key, value);
  } else if (key == "mu0") {
    c.mu0 = parse_real(key, value);
  } else if (key == "mu_min") {
    c.mu_min = parse_real(key, value);
  } else if (key == "eps") {
    c.eps = parse_real(key, value);
  } else if (key == "max_iters") {
    c.max_iters = parse_int(key, value);
  } else if (key == "step") {
    const auto e = parse_step_engine(value);
    if (!e) throw std::invalid_argument("step: unknown engine '" + value + "'");
    c.step_engine = *e;
  } else if (key == "variant") {
    const auto p = parse_policy(value);
    if (!p) throw std::invalid_argument("variant: unknown '" + value + "'");
    c.policy = *p;
  } else if (key == "cg_rel_tol") {
    c.cg_rel_tol = parse_real(key, value);
  } else if (key == "zf_eta1") {
    c.zf_eta1 = parse_real(key, value);
  } else if (key == "zf_eta2") {
    c.zf_eta2 = parse_real(key, value);
  } else if (key == "zf_c0") {
    c.zf_c0 = parse_real(key, value);
  } else if (key == "suite") {
    if (value == "all") {
      suite = SuiteFilter::kAll;
    } else if (value == "zero") {
      suite = SuiteFilter::kZero;
    } else if (value == "nonzero") {
      suite = SuiteFilter::kNonzero;
    } else {
      throw std::invalid_argument("suite: expected all, zero or nonzero");
    }
  } else if (key == "variants") {
    std::vector<std::string> v = split_list(value);
    if (v.empty()) throw std::invalid_argument("variants: empty list");
    for (const std::string& id : v) {
      if (!SolverVariant::parse(id)) {
        throw std::invalid_argument("variants: unknown solver '" + id + "'");
      }
    }
    variants = std::move(v);
  } else if (key == "eps_list") {
    eps_list = parse_double_list(value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

void CliConfig::validate() const {
  solver.validate();
  for (const std::string& id : variants) {
    const auto v = SolverVariant::parse(id);
    if (!v) throw std::invalid_argument("unknown solver '" + id + "'");
    SolverConfig c = solver;
    c.policy = v->policy;
    c.validate();
  }
  for (double e : eps_list) {
    if (!(e > 0.0)) throw std::invalid_argument("eps_list: values must be > 0");
  }
}

CliConfig parse_config(std::istream& in, CliConfig base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    }
    try {
      base.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": " + e.what());
    }
  }
  base.validate();
  return base;
}

CliConfig load_config(const std::string& path, CliConfig base) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  return parse_config(in, std::move(base));
}

}  // namespace nlls
