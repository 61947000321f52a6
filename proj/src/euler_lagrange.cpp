#include "delayvar/euler_lagrange.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delayvar {

namespace {

// Points of (lo, hi) in the theta = t - s variable where s -> g(s, t - s) may
// lose smoothness: atom locations and density nodes, and the s where the
// segment x_s or x'(s) has a kink, i.e. s = k - a for a kink k of x and a
// window point a. Derived points that coincide with an exact location up to
// `tol` are dropped so the exact one stays a piece end.
std::vector<double> advance_breaks(const DelayLagrangian& p, const Trajectory& x, const CovectorMeasure& probe,
                                   double t, double lo, double hi, double tol) {
  const double h = x.grid().step();
  std::vector<double> exact;
  std::vector<double> window{0.0, -x.delay()};
  for (double th : p.atom_locations()) {
    const double n = std::round(th / h);
    const double loc = std::abs(th - n * h) < 1e-12 * p.delay() ? n * h : th;
    window.push_back(loc);
    if (loc > lo && loc < hi) exact.push_back(loc);
  }
  for (int k = 1; k < probe.density_intervals(); ++k) {
    const double loc = probe.density_node(k);
    if (loc > lo && loc < hi) exact.push_back(loc);
  }
  std::vector<double> out = exact;
  auto keep = [&](double th) {
    if (!(th > lo && th < hi)) return;
    for (double e : exact) {
      if (std::abs(th - e) <= tol) return;
    }
    out.push_back(th);
  };
  for (double k : x.kinks()) {
    for (double a : window) keep(t - (k - a));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Covector advance_integral(const DelayLagrangian& p, const Trajectory& x, double t, const QuadratureRule& q) {
  const double T = x.grid().horizon();
  const double r = x.delay();
  const double tol = 1e-12 * T;
  if (t < -tol || t > T + tol) throw std::out_of_range("advance_integral: t outside [0, T]");
  Covector acc(x.dim());
  // s in [t, min(t + r, T)] is theta = t - s in [max(t - T, -r), 0].
  double lo = std::max(t - T, -r);
  if (!(lo < tol)) return acc;
  for (double th : p.atom_locations()) {
    if (std::abs(th - lo) <= tol) lo = th;  // t = T + theta_i up to rounding
  }
  if (!(lo < 0.0)) return acc;

  // The density grid is the same at every s, so one probe is enough.
  const auto probe = linearize(p, x, t).d2;
  const auto pieces = partition(lo, 0.0, advance_breaks(p, x, probe, t, lo, 0.0, tol), tol);

  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const auto nodes = simpson_nodes(pieces[i], pieces[i + 1], q.subsamples);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double theta = nodes[k].x;
      const double s = t - theta;
      if (s < -tol || s > T + tol) throw std::logic_error("advance_integral: node left [0, T]");
      // Limits from inside the piece, so the integrand is smooth on it.
      const Limit side = k == 0 ? Limit::Right : (k + 1 == nodes.size() ? Limit::Left : Limit::Value);
      const auto lin = linearize(p, x, std::clamp(s, 0.0, T));
      acc += nodes[k].w * cumulative(lin.d2, theta, side);
    }
  }
  return acc;
}

ELReport el_data(const DelayLagrangian& p, const Trajectory& x, const QuadratureRule& q,
                 const PerturbationBasis* basis) {
  const Grid& grid = x.grid();
  const int N = grid.intervals();
  const Eigen::Index n = x.dim();
  ELReport rep;
  rep.c_est = Covector(n);

  auto p_at = [&](double t) { return linearize(p, x, t).d2.total_mass(); };

  Covector running(n);
  for (int j = 0; j <= N; ++j) {
    const double t = grid.node(j);
    const auto lin = linearize(p, x, t);
    const Covector adv = advance_integral(p, x, t, q);
    rep.times.push_back(t);
    rep.p.push_back(lin.d2.total_mass());
    rep.advance.push_back(adv);
    rep.q.push_back(lin.d3 - adv);
    rep.P.push_back(running);
    if (j < N) {
      for (const auto& node : q.interval_nodes(grid, j)) running += node.w * p_at(node.x);
    }
  }

  for (int j = 0; j <= N; ++j) rep.c_est += rep.q[j] - rep.P[j];
  rep.c_est *= 1.0 / (N + 1);
  for (int j = 0; j <= N; ++j) rep.residual_osc = std::max(rep.residual_osc, rep.residual(j).dual_norm());

  if (basis != nullptr) {
    if (basis->grid().intervals() != N || basis->dim() != n) {
      throw std::invalid_argument("el_data: basis does not match the trajectory grid");
    }
    Eigen::VectorXd W = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
    for (const auto& node : q.nodes(grid)) {
      const auto lin = linearize(p, x, node.x);
      const Covector pt = lin.d2.total_mass();
      const Covector qt = lin.d3 - advance_integral(p, x, node.x, q);
      const LocalShapes vs = local_shapes(grid, node.x, false);
      const LocalShapes ds = local_shapes(grid, node.x, true);
      for (Eigen::Index k = 0; k < n; ++k) {
        for (int c = 0; c < 4; ++c) {
          const long iv = basis->index_of(k, vs.node[c], vs.kind[c]);
          if (iv >= 0) W[iv] += node.w * pt[k] * vs.shape[c];
          const long id = basis->index_of(k, ds.node[c], ds.kind[c]);
          if (id >= 0) W[id] += node.w * qt[k] * ds.shape[c];
        }
      }
    }
    for (std::size_t i = 0; i < basis->size(); ++i) rep.weak_residuals.emplace_back(i, W[static_cast<Eigen::Index>(i)]);
  }
  return rep;
}

double weak_stationarity(const DelayLagrangian& p, const Trajectory& x, const PerturbationBasis& basis,
                         const QuadratureRule& q) {
  const auto nodes = q.nodes(x.grid());
  const auto lins = linearize_all(p, x, nodes);
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Perturbation h = basis.element(i);
    const double norm = h.norm_X();
    if (norm == 0.0) continue;
    worst = std::max(worst, std::abs(directional_derivative(h, nodes, lins)) / norm);
  }
  return worst;
}

FubiniCheck fubini_identity_check(const DelayLagrangian& p, const Trajectory& x, const Perturbation& h,
                                  const QuadratureRule& q) {
  FubiniCheck out{0.0, 0.0};
  for (const auto& node : q.nodes(x.grid())) {
    const auto lin = linearize(p, x, node.x);
    out.lhs += node.w * pair(lin.d2, h.segment(node.x));
    out.rhs += node.w * (lin.d2.total_mass()(h.value(node.x)) -
                         advance_integral(p, x, node.x, q)(h.derivative(node.x)));
  }
  return out;
}

}  // namespace delayvar
