#include "delayvar/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace delayvar {

namespace {

double merge_tolerance(const Grid& grid) { return 1e-12 * grid.horizon(); }

std::vector<double> snapped_atoms(const DelayLagrangian& p, const Grid& grid) {
  std::vector<double> out;
  const double h = grid.step();
  for (double th : p.atom_locations()) {
    const double q = std::round(th / h);
    out.push_back(std::abs(th - q * h) < 1e-12 * p.delay() ? q * h : th);
  }
  sort_unique(out, 0.0);
  return out;
}

// Adds c * shape onto the dofs of coordinate k, skipping the constrained values.
void scatter(const PerturbationBasis& basis, const LocalShapes& ls, Eigen::Index k, double c, Eigen::VectorXd& g) {
  for (int i = 0; i < 4; ++i) {
    if (ls.shape[i] == 0.0) continue;
    const long idx = basis.index_of(k, ls.node[i], ls.kind[i]);
    if (idx >= 0) g[idx] += c * ls.shape[i];
  }
}

void add_merged(std::vector<QuadNode>& out, const QuadNode& q) {
  if (!out.empty() && out.back().x == q.x) {
    out.back().w += q.w;
  } else {
    out.push_back(q);
  }
}

}  // namespace

std::vector<QuadNode> QuadratureRule::interval_nodes(const Grid& grid, int j) const {
  const double a = grid.node(j);
  const double b = grid.node(j + 1);
  auto lo = std::lower_bound(breakpoints.begin(), breakpoints.end(), a);
  auto hi = std::upper_bound(breakpoints.begin(), breakpoints.end(), b);
  const auto pieces = partition(a, b, std::span<const double>(lo, hi), merge_tolerance(grid));
  std::vector<QuadNode> out;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    for (const auto& q : simpson_nodes(pieces[i], pieces[i + 1], subsamples)) add_merged(out, q);
  }
  return out;
}

std::vector<QuadNode> QuadratureRule::nodes(const Grid& grid) const {
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw std::invalid_argument("QuadratureRule: breakpoints must be sorted");
  }
  std::vector<QuadNode> out;
  for (int j = 0; j < grid.intervals(); ++j) {
    for (const auto& q : interval_nodes(grid, j)) add_merged(out, q);
  }
  return out;
}

QuadratureRule make_rule(const DelayLagrangian& p, const Trajectory& x, int subsamples) {
  if (subsamples < 2 || subsamples % 2 != 0) throw std::invalid_argument("make_rule: subsamples must be even and >= 2");
  const Grid& grid = x.grid();
  const double T = grid.horizon();
  const double r = x.delay();
  const auto atoms = snapped_atoms(p, grid);
  const auto kinks = x.kinks();

  // Piece ends of the segment window: atoms plus both window ends.
  std::vector<double> ends = atoms;
  ends.push_back(0.0);
  ends.push_back(-r);
  sort_unique(ends, 0.0);
  std::vector<double> shifts;
  for (double a : ends) {
    shifts.push_back(a);
    shifts.push_back(-a);
    for (double b : ends) shifts.push_back(b - a);
  }
  sort_unique(shifts, 0.0);

  std::vector<double> pts;
  for (double k : kinks) {
    for (double s : shifts) pts.push_back(k + s);
  }
  for (double a : atoms) pts.push_back(T + a);
  pts.push_back(T - r);

  const double tol = merge_tolerance(grid);
  const double h = grid.step();
  QuadratureRule rule;
  rule.subsamples = subsamples;
  for (double t : pts) {
    if (!(t > tol && t < T - tol)) continue;
    const double nearest = std::round(t / h) * h;
    if (std::abs(t - nearest) <= tol) continue;  // nodes are always piece boundaries
    rule.breakpoints.push_back(t);
  }
  sort_unique(rule.breakpoints, tol);
  return rule;
}

PointLinearization linearize(const DelayLagrangian& p, const Trajectory& x, double t) {
  const SegmentFunction seg = x.segment(t);
  const Vector v = x.derivative(t);
  return {p.d2(t, seg, v).snapped(x.grid().step()), p.d3(t, seg, v)};
}

std::vector<PointLinearization> linearize_all(const DelayLagrangian& p, const Trajectory& x,
                                              std::span<const QuadNode> nodes) {
  std::vector<PointLinearization> out;
  out.reserve(nodes.size());
  for (const auto& node : nodes) out.push_back(linearize(p, x, node.x));
  return out;
}

double evaluate_J(const DelayLagrangian& p, const Trajectory& x, const QuadratureRule& q) {
  double J = 0.0;
  for (const auto& node : q.nodes(x.grid())) {
    J += node.w * p.eval(node.x, x.segment(node.x), x.derivative(node.x));
  }
  return J;
}

double directional_derivative(const DelayLagrangian& p, const Trajectory& x, const Perturbation& h,
                              const QuadratureRule& q) {
  const auto [a, b] = h.support();
  if (a == b) return 0.0;
  const double r = x.delay();
  double D = 0.0;
  for (const auto& node : q.nodes(x.grid())) {
    const double t = node.x;
    if (t < a || t - r > b) continue;  // h_t and h'(t) vanish there
    const auto lin = linearize(p, x, t);
    D += node.w * (pair(lin.d2, h.segment(t)) + lin.d3(h.derivative(t)));
  }
  return D;
}

double directional_derivative(const Perturbation& h, std::span<const QuadNode> nodes,
                              std::span<const PointLinearization> lins) {
  if (nodes.size() != lins.size()) throw std::invalid_argument("directional_derivative: node/linearization mismatch");
  const auto [a, b] = h.support();
  if (a == b) return 0.0;
  const double r = h.delay();
  double D = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double t = nodes[i].x;
    if (t < a || t - r > b) continue;
    D += nodes[i].w * (pair(lins[i].d2, h.segment(t)) + lins[i].d3(h.derivative(t)));
  }
  return D;
}

Eigen::VectorXd gradient(const DelayLagrangian& p, const Trajectory& x, const PerturbationBasis& basis,
                         const QuadratureRule& q) {
  const Grid& grid = x.grid();
  if (basis.grid().intervals() != grid.intervals() || basis.dim() != x.dim()) {
    throw std::invalid_argument("gradient: basis does not match the trajectory grid");
  }
  const Eigen::Index n = x.dim();
  const double r = x.delay();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));

  for (const auto& node : q.nodes(grid)) {
    const double t = node.x;
    const double w = node.w;
    const auto lin = linearize(p, x, t);

    const LocalShapes dshape = local_shapes(grid, t, true);
    for (Eigen::Index k = 0; k < n; ++k) scatter(basis, dshape, k, w * lin.d3[k], g);

    for (const auto& atom : lin.d2.atoms()) {
      const double tau = t + atom.location;
      if (tau < 0.0) continue;
      const LocalShapes shape = local_shapes(grid, tau, false);
      for (Eigen::Index k = 0; k < n; ++k) scatter(basis, shape, k, w * atom.weight[k], g);
    }

    if (lin.d2.has_density()) {
      // same kink set a perturbation segment reports, so the density nodes match `pair`
      const SegmentFunction probe(n, r, nullptr, grid_segment_kinks(grid, r, t));
      for (const auto& qn : density_rule(lin.d2, probe.kinks())) {
        const double tau = t + qn.x;
        if (tau < 0.0) continue;
        const Covector d = lin.d2.density(qn.x);
        const LocalShapes shape = local_shapes(grid, tau, false);
        for (Eigen::Index k = 0; k < n; ++k) scatter(basis, shape, k, w * qn.w * d[k], g);
      }
    }
  }
  return g;
}

Eigen::VectorXd gradient(const DelayLagrangian& p, const Trajectory& x, std::span<const Perturbation> directions,
                         const QuadratureRule& q) {
  Eigen::VectorXd g(static_cast<Eigen::Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    g[static_cast<Eigen::Index>(i)] = directional_derivative(p, x, directions[i], q);
  }
  return g;
}

}  // namespace delayvar
