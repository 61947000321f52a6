#pragma once

// Integral-form Euler-Lagrange data for delay problems. With
//   p(t) = g(t, 0)                               (total mass of D2F[t])
//   q(t) = D3F[t] - int_t^{min(t+r,T)} g(s, t-s) ds
// where g(s, .) is the cumulative function of D2F[s], a stationary x has
// q(t) - int_0^t p = c for a constant covector c.

#include "delayvar/criterion.hpp"
#include "delayvar/linalg.hpp"
#include "delayvar/problem.hpp"
#include "delayvar/trajectory.hpp"

#include <utility>
#include <vector>

namespace delayvar {

/// int_t^{min(t+r, T)} g(s, t - s) ds, split at every s where t - s crosses an
/// atom or density node and where x_s or x'(s) has a kink. Uses the rule's
/// subsample count per piece. Zero at t = T.
Covector advance_integral(const DelayLagrangian& p, const Trajectory& x, double t, const QuadratureRule& q);

struct ELReport {
  std::vector<double> times{};       // grid nodes
  std::vector<Covector> p{};         // g(t, 0)
  std::vector<Covector> q{};         // D3F[t] - advance
  std::vector<Covector> P{};         // int_0^t p
  std::vector<Covector> advance{};     // advance integral
  Covector c_est{0};                  // grid mean of q - P
  double residual_osc = 0.0;         // max_j |q - P - c_est|_1
  /// (basis index, int_0^T p.h_i + q.h_i') when a basis was supplied.
  std::vector<std::pair<std::size_t, double>> weak_residuals{};

  /// q(t_j) - P(t_j) - c_est.
  Covector residual(std::size_t j) const { return q[j] - P[j] - c_est; }
};

/// Euler-Lagrange data at the grid nodes of x. When `basis` is given, also
/// evaluates the weak form int (p.h + q.h') for every basis element, with p
/// and q computed at every quadrature node.
ELReport el_data(const DelayLagrangian& p, const Trajectory& x, const QuadratureRule& q,
                 const PerturbationBasis* basis = nullptr);

/// max_i |DJ(x).h_i| / norm_X(h_i) over the basis, each DJ(x).h_i computed as
/// its own directional derivative.
double weak_stationarity(const DelayLagrangian& p, const Trajectory& x, const PerturbationBasis& basis,
                         const QuadratureRule& q);

struct FubiniCheck {
  double lhs;  // int_0^T D2F[t].h_t dt
  double rhs;  // int_0^T p(t).h(t) - advance(t).h'(t) dt
};

/// Both sides of the exchange of integration order that turns DJ(x).h into
/// int (p.h + q.h'). The advance term enters with a minus sign, matching q.
FubiniCheck fubini_identity_check(const DelayLagrangian& p, const Trajectory& x, const Perturbation& h,
                                  const QuadratureRule& q);

}  // namespace delayvar
