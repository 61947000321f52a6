#pragma once

// Run configuration: plain-text `key = value` lines, `#` comments, dotted
// section prefixes (`solver.N = 64`). Vector values are comma or space
// separated; a single number is broadcast to every coordinate.

#include "delayvar/identity.hpp"
#include "delayvar/problem.hpp"
#include "delayvar/solver.hpp"
#include "delayvar/trajectory.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace delayvar {

/// Raised for unreadable or invalid configurations. The message starts with
/// `<source>:<line>:` when a line is to blame.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct HistorySpec {
  std::string kind = "constant";  // constant | linear | sinusoid | samples
  Vector value, offset, slope, amplitude;
  double frequency = 1.0;
  double phase = 0.0;
  std::filesystem::path file;     // samples: one row of n numbers per line
};

struct RunConfig {
  std::string problem = "classical_quadratic";
  std::map<std::string, double> coefficients;
  Eigen::Index n = 1;
  double r = 0.5;
  double T = 1.0;
  HistorySpec history;
  Vector zeta;
  SolveConfig solver;
  // residual_osc at converged minimizers is a grid-size discretization error
  // (1e-4 at N = 32 on unit-scale data); non-stationary curves give O(1e-1)
  double verify_threshold = 1e-3;
  IdentityOptions identity;
  std::vector<int> levels{32, 64, 128};
  std::filesystem::path output_dir = "out";
};

RunConfig parse_config(std::istream& in, const std::string& source = "config");

/// Relative paths inside the file resolve against the file's directory.
RunConfig load_config(const std::filesystem::path& path);

std::unique_ptr<DelayLagrangian> make_problem(const RunConfig& cfg);

/// Throws ConfigError when a sample file is missing or malformed.
HistoryFunction make_history(const RunConfig& cfg);

}  // namespace delayvar
