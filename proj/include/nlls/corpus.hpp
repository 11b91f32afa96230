#pragma once

// Test problem registry: a subset of the Moré, Garbow and Hillstrom
// collection with its standard starting points, plus two small problems with
// a known stationary set (a data-assimilation style residual and an
// exponential residual with a line of minimizers).

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlls/problem.hpp"

namespace nlls {

enum class ResidualClass { kZero, kNonzero };
std::string_view to_string(ResidualClass c);

struct ProblemSpec {
  std::string name;
  std::size_t default_n = 0;
  bool variable_dim = false;
  ResidualClass residual_class = ResidualClass::kZero;
  std::function<std::unique_ptr<ResidualProblem>(std::size_t n)> make;
  // Optional dimension constraint for variable-size problems.
  std::function<bool(std::size_t n)> valid_n;
};

struct ProblemInfo {
  std::string name;
  ResidualClass residual_class;
  bool variable_dim;
  std::size_t default_n;
};

class ProblemRegistry {
 public:
  // Registry with every built-in problem.
  static const ProblemRegistry& builtin();

  void add(ProblemSpec spec);
  // Throws std::out_of_range for unknown names and std::invalid_argument when
  // `n` is given for a fixed-size problem or fails the dimension rule.
  std::unique_ptr<ResidualProblem> get(
      const std::string& name, std::optional<std::size_t> n = std::nullopt) const;
  const ProblemSpec& spec(const std::string& name) const;
  bool contains(const std::string& name) const;
  // Alphabetical.
  std::vector<ProblemInfo> list() const;

 private:
  std::map<std::string, ProblemSpec> specs_;
};

// Closed-form or reference-based distance to the stationary set, when the
// problem carries one.
std::optional<double> dist_to_solution(const ResidualProblem& p,
                                       std::span<const double> x);

// The data-assimilation problem builds its reference minimizer with a scalar
// Newton solve per coordinate; exposed for tests.
Vector example1_reference_minimizer();

}  // namespace nlls
