#pragma once

#include "delayvar/problem.hpp"
#include "delayvar/quadrature.hpp"
#include "delayvar/trajectory.hpp"

#include <Eigen/Core>
#include <span>
#include <vector>

namespace delayvar {

/// Composite Simpson on the node grid with `subsamples` subintervals per
/// piece. Pieces are node intervals further split at the breakpoints, so no
/// panel straddles a breakpoint.
struct QuadratureRule {
  int subsamples = 4;
  std::vector<double> breakpoints;

  /// Nodes and weights over [0, T] for the given grid.
  std::vector<QuadNode> nodes(const Grid& grid) const;
  /// Nodes and weights over the single node interval [t_j, t_{j+1}].
  std::vector<QuadNode> interval_nodes(const Grid& grid, int j) const;
};

/// Registers every point of (0, T) where integrands built from p along x may
/// lose smoothness: x's kinks shifted by plus or minus each window point
/// (atom locations, 0 and -r) and by their pairwise differences, T + theta_i
/// and T - r.
/// Atom locations within 1e-12 r of a grid multiple are snapped first.
QuadratureRule make_rule(const DelayLagrangian& p, const Trajectory& x, int subsamples = 4);

/// Linearization of F at time t along x.
struct PointLinearization {
  CovectorMeasure d2;
  Covector d3;
};
PointLinearization linearize(const DelayLagrangian& p, const Trajectory& x, double t);

/// Linearizations at each of `nodes`, in order.
std::vector<PointLinearization> linearize_all(const DelayLagrangian& p, const Trajectory& x,
                                              std::span<const QuadNode> nodes);

/// J(x) = int_0^T F(t, x_t, x'(t)) dt.
double evaluate_J(const DelayLagrangian& p, const Trajectory& x, const QuadratureRule& q);

/// DJ(x).h = int_0^T (D2F[t].h_t + D3F[t].h'(t)) dt.
double directional_derivative(const DelayLagrangian& p, const Trajectory& x, const Perturbation& h,
                              const QuadratureRule& q);

/// DJ(x).h from linearizations precomputed at the rule's nodes.
double directional_derivative(const Perturbation& h, std::span<const QuadNode> nodes,
                              std::span<const PointLinearization> lins);

/// Components DJ(x).e_i over the Hermite nodal basis, assembled in one pass
/// over the quadrature nodes by scattering each contribution onto the local
/// basis functions. Agrees with `directional_derivative` per element up to
/// rounding.
Eigen::VectorXd gradient(const DelayLagrangian& p, const Trajectory& x, const PerturbationBasis& basis,
                         const QuadratureRule& q);

/// Components DJ(x).h_i for an arbitrary list of directions.
Eigen::VectorXd gradient(const DelayLagrangian& p, const Trajectory& x, std::span<const Perturbation> directions,
                         const QuadratureRule& q);

}  // namespace delayvar
