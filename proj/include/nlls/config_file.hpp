#pragma once

// Flat key=value configuration shared by the command-line tools.
//
//   # comment
//   eta=0.01
//   variant=v2
//   eps_list=1e-3,1e-5
//
// Keys: eta lambda mu0 mu_min eps max_iters step variant cg_rel_tol zf_eta1
// zf_eta2 zf_c0 suite variants eps_list. Unknown keys are an error.

#include <iosfwd>
#include <string>
#include <vector>

#include "nlls/bench.hpp"
#include "nlls/lm.hpp"

namespace nlls {

struct CliConfig {
  SolverConfig solver;
  SuiteFilter suite = SuiteFilter::kAll;
  std::vector<std::string> variants = {"v1", "v2", "zhao_fan"};
  std::vector<double> eps_list = {1e-3, 1e-5};

  // Applies one assignment; throws std::invalid_argument on an unknown key or
  // a malformed value.
  void set(const std::string& key, const std::string& value);
  // Checks the solver constants, including the comparison-method ones when
  // any selected variant uses it.
  void validate() const;
};

// Reads assignments from `in` on top of `base` and validates the result.
CliConfig parse_config(std::istream& in, CliConfig base = {});
CliConfig load_config(const std::string& path, CliConfig base = {});

std::vector<std::string> split_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

}  // namespace nlls
