#pragma once

// Direct minimization of the discretized criterion over the admissible set.
// Iterates stay admissible because every update is a Perturbation.

#include "delayvar/criterion.hpp"
#include "delayvar/problem.hpp"
#include "delayvar/trajectory.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace delayvar {

/// Pairing used to turn gradient dofs into a descent direction. `L2` uses the
/// raw dofs; `H1` applies the inverse of the Hermite stiffness plus mass
/// Gram matrix, which removes the grid dependence of the conditioning.
enum class Metric { L2, H1 };

struct IterationLog {
  int iteration;
  double J;
  double grad_norm;
  double step;
};

struct SolveConfig {
  int N = 64;
  int max_iters = 500;
  double grad_tol = 1e-8;  // on the sup-norm of the gradient dofs
  double armijo = 1e-4;
  double backtrack = 0.5;
  double initial_step = 1.0;
  std::uint64_t seed = 0;  // the descent is deterministic; kept for restarts
  Metric metric = Metric::H1;
  int subsamples = 4;
  double min_step = 1e-14;
  std::function<void(const IterationLog&)> on_iteration;

  /// Throws std::invalid_argument describing the first bad field.
  void validate() const;
};

struct SolveResult {
  Trajectory trajectory;
  std::vector<double> J_history{};  // J at the start and after every accepted step
  std::vector<double> steps{};    // accepted step lengths
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string diagnostic{};
};

/// Gradient descent with Armijo backtracking from the affine initial guess.
/// A failed line search ends the run with converged == false and a diagnostic.
SolveResult minimize(const DelayLagrangian& p, const HistoryFunction& psi, const Vector& zeta,
                     const SolveConfig& cfg);

/// Gram matrix of the Hermite basis under the given metric (identity for L2).
Eigen::MatrixXd metric_matrix(const PerturbationBasis& basis, Metric metric);

struct LevelRow {
  int N;
  double J;
  double grad_norm;
  double residual_osc;
  double weak_stationarity;
  bool converged;
  int iterations;
  std::string diagnostic;
};

struct ConvergenceTable {
  std::vector<LevelRow> rows;
  bool residual_monotone = false;  // residual_osc strictly decreasing down the rows
};

/// One minimize run per grid level, each followed by the stationarity checks.
/// A level that does not fit the delay gets a non-converged row with NaN
/// metrics and the grid diagnostic.
ConvergenceTable convergence_study(const DelayLagrangian& p, const HistoryFunction& psi, const Vector& zeta,
                                   const SolveConfig& cfg, const std::vector<int>& levels);

}  // namespace delayvar
