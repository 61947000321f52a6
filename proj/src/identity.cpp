#include "delayvar/identity.hpp"

#include "delayvar/criterion.hpp"
#include "delayvar/euler_lagrange.hpp"

#include <algorithm>
#include <cmath>

namespace delayvar {

int Random::integer(int lo, int hi) {
  const int k = lo + static_cast<int>(uniform() * (hi - lo + 1));
  return std::min(k, hi);
}

CovectorMeasure random_measure(Random& rng, Eigen::Index dim, double r, int atoms, int density_intervals) {
  std::vector<Atom> list;
  for (int i = 0; i < atoms; ++i) {
    const double u = rng.uniform();
    const double loc = u < 0.15 ? -r : (u < 0.3 ? 0.0 : rng.uniform(-r, 0.0));
    Covector w(dim);
    for (Eigen::Index k = 0; k < dim; ++k) w[k] = rng.uniform(-1.0, 1.0);
    list.push_back({loc, w});
  }
  Eigen::MatrixXd density;
  if (density_intervals > 0) {
    density.resize(dim, density_intervals + 1);
    for (Eigen::Index c = 0; c < density.cols(); ++c) {
      for (Eigen::Index k = 0; k < dim; ++k) density(k, c) = rng.uniform(-1.0, 1.0);
    }
  }
  return CovectorMeasure(dim, r, std::move(list), std::move(density));
}

PiecewiseLinear random_piecewise_linear(Random& rng, Eigen::Index dim, double r, int pieces) {
  std::vector<double> xs{-r, 0.0};
  for (int i = 1; i < pieces; ++i) xs.push_back(rng.uniform(-r, 0.0));
  std::sort(xs.begin(), xs.end());
  Eigen::MatrixXd ys(dim, static_cast<Eigen::Index>(xs.size()));
  for (Eigen::Index c = 0; c < ys.cols(); ++c) {
    for (Eigen::Index k = 0; k < dim; ++k) ys(k, c) = rng.uniform(-1.0, 1.0);
  }
  const Vector sup = ys.cwiseAbs().rowwise().maxCoeff();
  auto eval = [xs, ys](double th) -> Vector {
    auto it = std::upper_bound(xs.begin(), xs.end(), th);
    auto j = static_cast<Eigen::Index>(std::clamp<std::ptrdiff_t>(it - xs.begin(), 1, ys.cols() - 1));
    const double a = xs[j - 1];
    const double b = xs[j];
    const double u = b > a ? (th - a) / (b - a) : 0.0;
    return (1.0 - u) * ys.col(j - 1) + u * ys.col(j);
  };
  std::vector<double> kinks(xs.begin() + 1, xs.end() - 1);
  return {SegmentFunction(dim, r, eval, std::move(kinks)), sup};
}

Vector SmoothCurve::value(double t) const {
  Vector out = offset[0];
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    out += amplitude[i].cwiseProduct((frequency[i] * t + phase[i]).array().sin().matrix());
  }
  return out;
}

Vector SmoothCurve::derivative(double t) const {
  Vector out = Vector::Zero(offset[0].size());
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    out += amplitude[i].cwiseProduct(frequency[i]).cwiseProduct((frequency[i] * t + phase[i]).array().cos().matrix());
  }
  return out;
}

SmoothCurve random_smooth_curve(Random& rng, Eigen::Index dim, int terms) {
  auto draw = [&](double a, double b) {
    Vector v(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = rng.uniform(a, b);
    return v;
  };
  SmoothCurve c;
  c.offset.push_back(draw(-1.0, 1.0));
  for (int i = 0; i < terms; ++i) {
    c.amplitude.push_back(draw(-0.5, 0.5));
    c.frequency.push_back(draw(0.5, 3.0));
    c.phase.push_back(draw(0.0, 6.283185307179586));
  }
  return c;
}

Trajectory random_trajectory(Random& rng, Eigen::Index dim, double r, const Grid& grid) {
  const SmoothCurve c = random_smooth_curve(rng, dim);
  const int N = grid.intervals();
  Eigen::MatrixXd values(dim, N + 1), slopes(dim, N + 1);
  for (int j = 0; j <= N; ++j) {
    values.col(j) = c.value(grid.node(j));
    slopes.col(j) = c.derivative(grid.node(j));
  }
  auto psi = HistoryFunction::closed_form(dim, r, [c](double th) { return c.value(th); });
  return Trajectory(std::move(psi), grid, std::move(values), std::move(slopes));
}

Perturbation random_perturbation(Random& rng, Eigen::Index dim, double r, const Grid& grid) {
  const SmoothCurve c = random_smooth_curve(rng, dim);
  const int N = grid.intervals();
  const double T = grid.horizon();
  const Vector c0 = c.value(0.0);
  const Vector cT = c.value(T);
  Eigen::MatrixXd values(dim, N + 1), slopes(dim, N + 1);
  for (int j = 0; j <= N; ++j) {
    const double u = grid.node(j) / T;
    values.col(j) = c.value(grid.node(j)) - (1.0 - u) * c0 - u * cT;
    slopes.col(j) = c.derivative(grid.node(j)) + (c0 - cT) / T;
  }
  values.col(0).setZero();
  values.col(N).setZero();
  return Perturbation(grid, r, std::move(values), std::move(slopes));
}

std::unique_ptr<DelayLagrangian> modulated_measure_lagrangian(const CovectorMeasure& m, double horizon) {
  const Eigen::Index n = m.dim();
  // Density nodes are piece ends of d2 as well, so they are listed too.
  std::vector<double> locs;
  for (const auto& a : m.atoms()) locs.push_back(a.location);
  for (int k = 1; k < m.density_intervals(); ++k) locs.push_back(m.density_node(k));
  auto zero_eval = [](double, const SegmentFunction&, const Vector&) { return 0.0; };
  auto d2 = [m](double t, const SegmentFunction& phi, const Vector&) {
    const double s = 1.0 + 0.2 * std::sin(2.0 * t) + 0.1 * std::tanh(phi(0.0).sum());
    return m.scaled(s);
  };
  auto d3 = [n](double, const SegmentFunction&, const Vector&) { return Covector(n); };
  return std::make_unique<CustomLagrangian>(n, m.horizon(), horizon, zero_eval, d2, d3, std::move(locs));
}

bool IdentityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
}

namespace {

// x -> sum_i c_i x^i per coordinate, coefficients in [-1, 1].
struct Polynomial {
  Eigen::MatrixXd coef;  // dim x (degree + 1)

  Vector value(double x) const {
    Vector out = Vector::Zero(coef.rows());
    for (Eigen::Index i = coef.cols() - 1; i >= 0; --i) out = out * x + coef.col(i);
    return out;
  }
  Vector derivative(double x) const {
    Vector out = Vector::Zero(coef.rows());
    for (Eigen::Index i = coef.cols() - 1; i >= 1; --i) out = out * x + static_cast<double>(i) * coef.col(i);
    return out;
  }
};

Polynomial random_polynomial(Random& rng, Eigen::Index dim, int degree) {
  Polynomial p{Eigen::MatrixXd(dim, degree + 1)};
  for (Eigen::Index i = 0; i <= degree; ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) p.coef(k, i) = rng.uniform(-1.0, 1.0);
  }
  return p;
}

IdentityCheck fubini_suite(Random& rng, int cases) {
  IdentityCheck out{"fubini", cases, 0.0, 1e-8, true};
  const double T = 1.0;
  const int N = 16;
  const Grid grid(T, N);
  for (int c = 0; c < cases; ++c) {
    const Eigen::Index n = rng.integer(1, 2);
    const double r = rng.integer(1, N - 1) * grid.step();
    const bool atoms = c % 3 != 1;
    const bool density = c % 3 != 0;
    const auto m = random_measure(rng, n, r, atoms ? rng.integer(1, 4) : 0, density ? rng.integer(2, 4) : 0);
    const auto prob = modulated_measure_lagrangian(m, T);
    const Trajectory x = random_trajectory(rng, n, r, grid);
    const Perturbation h = random_perturbation(rng, n, r, grid);
    const QuadratureRule rule = make_rule(*prob, x, 8);
    const auto f = fubini_identity_check(*prob, x, h, rule);
    const double d = std::abs(f.lhs - f.rhs) / (1.0 + std::abs(f.lhs));
    out.max_discrepancy = std::max(out.max_discrepancy, d);
  }
  out.pass = out.max_discrepancy <= out.tolerance;
  return out;
}

std::vector<IdentityCheck> pairing_suite(Random& rng, int cases) {
  IdentityCheck full{"pairing_bound", cases, 0.0, 1e-12, true};
  IdentityCheck coord{"pairing_bound_coordinate", cases, 0.0, 1e-12, true};
  for (int c = 0; c < cases; ++c) {
    const Eigen::Index n = rng.integer(1, 3);
    const double r = rng.uniform(0.1, 2.0);
    const int density = rng.uniform() < 0.5 ? rng.integer(1, 10) : 0;
    const auto m = random_measure(rng, n, r, rng.integer(0, 5), density);
    const auto phi = random_piecewise_linear(rng, n, r, rng.integer(1, 6));

    const double bound = static_cast<double>(n) * total_variation(m) * phi.sup.maxCoeff();
    const double value = std::abs(pair(m, phi.f));
    if (bound > 0.0) {
      full.max_discrepancy = std::max(full.max_discrepancy, (value - bound) / bound);
    } else if (value > 0.0) {
      full.max_discrepancy = std::max(full.max_discrepancy, 1.0);
    }

    const Vector comps = pair_components(m, phi.f);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double b = total_variation(m, k) * phi.sup[k];
      const double v = std::abs(comps[k]);
      if (b > 0.0) {
        coord.max_discrepancy = std::max(coord.max_discrepancy, (v - b) / b);
      } else if (v > 0.0) {
        coord.max_discrepancy = std::max(coord.max_discrepancy, 1.0);
      }
    }
  }
  full.pass = full.max_discrepancy <= full.tolerance;
  coord.pass = coord.max_discrepancy <= coord.tolerance;
  return {full, coord};
}

std::vector<IdentityCheck> ibp_suite(Random& rng, int cases) {
  IdentityCheck atoms{"ibp_atoms", cases, 0.0, 1e-12, true};
  IdentityCheck density{"ibp_density", cases, 0.0, 1e-10, true};
  for (int c = 0; c < cases; ++c) {
    const Eigen::Index n = rng.integer(1, 3);
    const double r = rng.uniform(0.1, 1.0);
    const double t = rng.uniform(0.0, 1.0);
    {
      const auto m = random_measure(rng, n, r, rng.integer(1, 5), 0);
      const auto poly = random_polynomial(rng, n, 4);
      const auto res = integrate_by_parts_check(
          m, [&](double s) { return poly.value(s); }, [&](double s) { return poly.derivative(s); }, t);
      atoms.max_discrepancy = std::max(atoms.max_discrepancy, std::abs(res.lhs - res.rhs));
    }
    {
      const auto m = random_measure(rng, n, r, rng.integer(0, 3), rng.integer(1, 8));
      const auto poly = random_polynomial(rng, n, 2);
      const auto res = integrate_by_parts_check(
          m, [&](double s) { return poly.value(s); }, [&](double s) { return poly.derivative(s); }, t);
      density.max_discrepancy = std::max(density.max_discrepancy, std::abs(res.lhs - res.rhs));
    }
  }
  atoms.pass = atoms.max_discrepancy <= atoms.tolerance;
  density.pass = density.max_discrepancy <= density.tolerance;
  return {atoms, density};
}

// Every quantity must vanish exactly for the zero measure.
IdentityCheck zero_suite(Random& rng) {
  IdentityCheck out{"zero_measure", 0, 0.0, 0.0, true};
  const double T = 1.0;
  const Grid grid(T, 8);
  for (Eigen::Index n = 1; n <= 3; ++n) {
    const double r = 0.5;
    const CovectorMeasure zero(n, r);
    const auto phi = random_piecewise_linear(rng, n, r, 3);
    const auto poly = random_polynomial(rng, n, 3);
    const auto ibp = integrate_by_parts_check(
        zero, [&](double s) { return poly.value(s); }, [&](double s) { return poly.derivative(s); }, 0.7);
    const auto prob = modulated_measure_lagrangian(zero, T);
    const Trajectory x = random_trajectory(rng, n, r, grid);
    const Perturbation h = random_perturbation(rng, n, r, grid);
    const auto f = fubini_identity_check(*prob, x, h, make_rule(*prob, x));
    for (double v : {pair(zero, phi.f), total_variation(zero), ibp.lhs, ibp.rhs, f.lhs, f.rhs,
                     cumulative(zero, -0.2).dual_norm()}) {
      out.max_discrepancy = std::max(out.max_discrepancy, std::abs(v));
    }
    ++out.cases;
  }
  out.pass = out.max_discrepancy == 0.0;
  return out;
}

}  // namespace

IdentityReport run_identity_suites(const IdentityOptions& opts) {
  // Independent streams so the suites do not shift when a case count changes.
  Random fubini_rng(opts.seed);
  Random pairing_rng(opts.seed + 1);
  Random ibp_rng(opts.seed + 2);
  Random zero_rng(opts.seed + 3);

  IdentityReport rep;
  rep.checks.push_back(fubini_suite(fubini_rng, opts.fubini_cases));
  for (auto& c : pairing_suite(pairing_rng, opts.pairing_cases)) rep.checks.push_back(c);
  for (auto& c : ibp_suite(ibp_rng, opts.ibp_cases)) rep.checks.push_back(c);
  rep.checks.push_back(zero_suite(zero_rng));
  return rep;
}

}  // namespace delayvar
