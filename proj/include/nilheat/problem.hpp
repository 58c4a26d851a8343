#ifndef NILHEAT_PROBLEM_HPP
#define NILHEAT_PROBLEM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nilheat/rational.hpp"
#include "nilheat/vector_field.hpp"

namespace nilheat {

// A fully validated problem statement with defaults resolved. Produced by
// load_problem from the line-oriented file format documented in the README:
//
//   # comment
//   dim = 2
//   k = 1
//   [fields]
//   f0 = 0, sin(x1^2)
//   f1 = 1, x1
//   [point]
//   x0 = 0, 0
//   [options]
//   seed = 1
//   ...
struct ProblemSpec {
  int dim = 0;
  int k = 0;
  std::vector<std::string> f0_exprs;               // dim component strings
  std::vector<std::vector<std::string>> f_exprs;   // k lists of dim strings
  std::vector<Rational> x0;

  // Options (defaults resolved by load_problem where value depends on dim).
  int weight_cap = 0;       // default 2*dim + 2
  int taylor_degree = 0;    // default 2*weight_cap
  double rank_tol = 1e-10;
  bool adjust_divergence = false;
  uint64_t seed = 1;
  long long paths = 100000;
  int steps = 400;          // dt = t / steps
  std::vector<double> t_grid;
  std::vector<double> h_schedule;
  double control_bound = 5.0;
  int control_switches = 8;
  int control_rollouts = 4096;
  double scaling_eps = 0.5;

  // Parsed fields f0, f1, ..., fk (after the divergence adjustment when the
  // flag is set); drift is stationary at x0.
  std::vector<VectorField> fields;
};

// Command-line overrides applied before defaults are resolved (the series
// truncation degree feeds expression parsing, so it cannot be changed after
// the fact).
struct ProblemOverrides {
  std::optional<uint64_t> seed;
  std::optional<long long> paths;
  std::optional<int> weight_cap;
  std::optional<int> taylor_degree;
};

// Loads, parses, validates. Throws ValidationError with "line N:" prefixes on
// malformed input; enforces drift stationarity f0(x0) = 0 (after the optional
// divergence adjustment drift + 1/2 sum_i div(f_i) f_i when
// adjust_divergence = true).
ProblemSpec load_problem(const std::string& path, const ProblemOverrides& ov = {});

// Same, from an in-memory string (used by tests); `origin` names the source
// in error messages.
ProblemSpec parse_problem(const std::string& text, const std::string& origin,
                          const ProblemOverrides& ov = {});

}  // namespace nilheat

#endif
