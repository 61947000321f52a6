#include "delayvar/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace delayvar {

namespace {

double snap_tolerance(double r) { return 1e-12 * r; }

// Integral of |a + (b - a) u| over a unit-parameter interval of length len.
double abs_linear_integral(double a, double b, double len) {
  if ((a >= 0.0 && b >= 0.0) || (a <= 0.0 && b <= 0.0)) return 0.5 * len * (std::abs(a) + std::abs(b));
  return 0.5 * len * (a * a + b * b) / (std::abs(a) + std::abs(b));
}

}  // namespace

// SegmentFunction

SegmentFunction::SegmentFunction(Eigen::Index dim, double horizon, Eval f, std::vector<double> kinks)
    : dim_(dim), r_(horizon), f_(std::move(f)), kinks_(std::move(kinks)) {
  if (dim < 1) throw std::invalid_argument("SegmentFunction: dimension must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("SegmentFunction: horizon must be positive");
  std::erase_if(kinks_, [this](double k) { return !(k > -r_ && k < 0.0); });
  sort_unique(kinks_, snap_tolerance(r_));
}

SegmentFunction SegmentFunction::zero(Eigen::Index dim, double horizon) {
  return SegmentFunction(dim, horizon, [dim](double) { return Vector::Zero(dim).eval(); });
}

SegmentFunction SegmentFunction::constant(const Vector& c, double horizon) {
  return SegmentFunction(c.size(), horizon, [c](double) { return c; });
}

SegmentFunction combine(double a, const SegmentFunction& f, double b, const SegmentFunction& g) {
  if (f.dim() != g.dim()) throw std::invalid_argument("combine: dimension mismatch");
  std::vector<double> kinks(f.kinks().begin(), f.kinks().end());
  kinks.insert(kinks.end(), g.kinks().begin(), g.kinks().end());
  return SegmentFunction(
      f.dim(), f.horizon(), [a, b, f, g](double th) { return (a * f(th) + b * g(th)).eval(); },
      std::move(kinks));
}

// CovectorMeasure

CovectorMeasure::CovectorMeasure(Eigen::Index dim, double horizon)
    : CovectorMeasure(dim, horizon, {}, Eigen::MatrixXd()) {}

CovectorMeasure::CovectorMeasure(Eigen::Index dim, double horizon, std::vector<Atom> atoms,
                                 Eigen::MatrixXd density)
    : dim_(dim), r_(horizon), density_(std::move(density)) {
  if (dim < 1) throw std::invalid_argument("CovectorMeasure: dimension must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("CovectorMeasure: horizon must be positive and finite");
  }
  const double tol = snap_tolerance(r_);
  for (auto& a : atoms) {
    if (a.weight.dim() != dim) throw std::invalid_argument("CovectorMeasure: atom weight dimension mismatch");
    if (!std::isfinite(a.location) || a.location < -r_ - tol || a.location > tol) {
      throw std::invalid_argument("CovectorMeasure: atom location " + std::to_string(a.location) +
                                  " outside [-r, 0]");
    }
    a.location = std::clamp(a.location, -r_, 0.0);
  }
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& x, const Atom& y) { return x.location < y.location; });
  for (auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().location == a.location) {
      atoms_.back().weight += a.weight;
    } else {
      atoms_.push_back(std::move(a));
    }
  }

  if (density_.size() > 0) {
    if (density_.rows() != dim || density_.cols() < 2) {
      throw std::invalid_argument("CovectorMeasure: density must be dim x (M+1) with M >= 1");
    }
    if (!density_.allFinite()) throw std::invalid_argument("CovectorMeasure: density must be finite");
    const int m = density_intervals();
    const double step = r_ / m;
    density_prefix_ = Eigen::MatrixXd::Zero(dim, m + 1);
    for (int k = 0; k < m; ++k) {
      density_prefix_.col(k + 1) =
          density_prefix_.col(k) + 0.5 * step * (density_.col(k) + density_.col(k + 1));
    }
  } else {
    density_.resize(0, 0);
  }
}

double CovectorMeasure::density_node(int k) const {
  const int m = density_intervals();
  if (k == m) return 0.0;
  return -r_ + k * (r_ / m);
}

Covector CovectorMeasure::density(double theta) const {
  if (!has_density()) return Covector(dim_);
  const int m = density_intervals();
  const double step = r_ / m;
  const int k = std::clamp(static_cast<int>(std::floor((theta + r_) / step)), 0, m - 1);
  const double u = (theta - density_node(k)) / step;
  return Covector(((1.0 - u) * density_.col(k) + u * density_.col(k + 1)).eval());
}

Covector CovectorMeasure::density_integral_to(double theta) const {
  if (!has_density()) return Covector(dim_);
  const int m = density_intervals();
  if (theta >= 0.0) return Covector(density_prefix_.col(m).eval());
  const double step = r_ / m;
  const int k = std::clamp(static_cast<int>(std::floor((theta + r_) / step)), 0, m - 1);
  const double u = (theta - density_node(k)) / step;
  const Eigen::VectorXd a = density_.col(k);
  const Eigen::VectorXd b = density_.col(k + 1);
  return Covector((density_prefix_.col(k) + step * (a * u + 0.5 * (b - a) * u * u)).eval());
}

Covector CovectorMeasure::total_mass() const {
  // same summation order as cumulative(m, 0), so the two agree bit for bit
  Covector total = density_integral_to(0.0);
  for (const auto& a : atoms_) total += a.weight;
  return total;
}

CovectorMeasure CovectorMeasure::scaled(double a) const {
  std::vector<Atom> atoms = atoms_;
  for (auto& at : atoms) at.weight *= a;
  return CovectorMeasure(dim_, r_, std::move(atoms), (density_ * a).eval());
}

CovectorMeasure CovectorMeasure::snapped(double step) const {
  std::vector<Atom> atoms = atoms_;
  for (auto& at : atoms) {
    const double q = std::round(at.location / step);
    if (std::abs(at.location - q * step) < snap_tolerance(r_)) at.location = q * step;
  }
  return CovectorMeasure(dim_, r_, std::move(atoms), density_);
}

CovectorMeasure operator+(const CovectorMeasure& a, const CovectorMeasure& b) {
  if (a.dim() != b.dim() || a.horizon() != b.horizon()) {
    throw std::invalid_argument("CovectorMeasure sum: dimension or horizon mismatch");
  }
  std::vector<Atom> atoms = a.atoms();
  atoms.insert(atoms.end(), b.atoms().begin(), b.atoms().end());
  Eigen::MatrixXd density;
  if (a.has_density() && b.has_density()) {
    if (a.density_intervals() != b.density_intervals()) {
      throw std::invalid_argument("CovectorMeasure sum: density grids differ");
    }
    density = a.density_samples() + b.density_samples();
  } else if (a.has_density()) {
    density = a.density_samples();
  } else if (b.has_density()) {
    density = b.density_samples();
  }
  return CovectorMeasure(a.dim(), a.horizon(), std::move(atoms), std::move(density));
}

// Operations

double total_variation(const CovectorMeasure& m, Eigen::Index k) {
  double tv = 0.0;
  for (const auto& a : m.atoms()) tv += std::abs(a.weight[k]);
  if (m.has_density()) {
    const int n = m.density_intervals();
    const double step = m.horizon() / n;
    const auto& d = m.density_samples();
    for (int j = 0; j < n; ++j) tv += abs_linear_integral(d(k, j), d(k, j + 1), step);
  }
  return tv;
}

double total_variation(const CovectorMeasure& m) {
  double tv = 0.0;
  for (Eigen::Index k = 0; k < m.dim(); ++k) tv += total_variation(m, k);
  return tv;
}

std::vector<QuadNode> density_rule(const CovectorMeasure& m, std::span<const double> kinks) {
  std::vector<QuadNode> out;
  if (!m.has_density()) return out;
  const int n = m.density_intervals();
  const double tol = snap_tolerance(m.horizon());
  std::vector<double> sorted(kinks.begin(), kinks.end());
  std::sort(sorted.begin(), sorted.end());
  out.reserve(static_cast<std::size_t>(2 * kDensityPanels) * (n + sorted.size()) + 1);

  auto add = [&out](double x, double w) {
    if (!out.empty() && out.back().x == x) {
      out.back().w += w;
    } else {
      out.push_back({x, w});
    }
  };
  for (int j = 0; j < n; ++j) {
    const double a = m.density_node(j);
    const double b = m.density_node(j + 1);
    auto lo = std::upper_bound(sorted.begin(), sorted.end(), a + tol);
    auto hi = std::lower_bound(sorted.begin(), sorted.end(), b - tol);
    std::vector<double> pts;
    pts.push_back(a);
    for (auto it = lo; it < hi; ++it) {
      if (*it - pts.back() > tol) pts.push_back(*it);
    }
    pts.push_back(b);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      for (const auto& q : simpson_nodes(pts[i], pts[i + 1], 2 * kDensityPanels)) add(q.x, q.w);
    }
  }
  return out;
}

Vector pair_components(const CovectorMeasure& m, const SegmentFunction& phi) {
  if (phi.dim() != m.dim()) throw std::invalid_argument("pair: dimension mismatch");
  Vector out = Vector::Zero(m.dim());
  for (const auto& a : m.atoms()) out += a.weight.components().cwiseProduct(phi(a.location));
  for (const auto& q : density_rule(m, phi.kinks())) {
    out += q.w * m.density(q.x).components().cwiseProduct(phi(q.x));
  }
  return out;
}

double pair(const CovectorMeasure& m, const SegmentFunction& phi) { return pair_components(m, phi).sum(); }

Covector cumulative(const CovectorMeasure& m, double theta, Limit side) {
  const double r = m.horizon();
  const double tol = snap_tolerance(r);
  if (!(theta >= -r - tol && theta <= tol)) {
    throw std::out_of_range("cumulative: theta = " + std::to_string(theta) + " outside [-r, 0]");
  }
  theta = std::clamp(theta, -r, 0.0);
  if (side == Limit::Value) {
    if (theta == -r) return Covector(m.dim());
    side = (theta == 0.0) ? Limit::Right : Limit::Left;
  }
  Covector g = m.density_integral_to(theta);
  for (const auto& a : m.atoms()) {
    if (a.location < theta || (side == Limit::Right && a.location == theta)) g += a.weight;
  }
  return g;
}

IntegrationByParts integrate_by_parts_check(const CovectorMeasure& m,
                                            const std::function<Vector(double)>& h,
                                            const std::function<Vector(double)>& dh, double t,
                                            std::span<const double> h_kinks, int intervals_per_piece) {
  const double r = m.horizon();
  std::vector<double> seg_kinks;
  for (double k : h_kinks) seg_kinks.push_back(k - t);
  const SegmentFunction shifted(
      m.dim(), r, [&h, t](double th) { return h(t + th); }, seg_kinks);
  const double lhs = pair(m, shifted);

  // Partition in theta so atom locations are piece ends exactly.
  std::vector<double> breaks;
  for (double k : h_kinks) breaks.push_back(k - t);
  for (const auto& a : m.atoms()) breaks.push_back(a.location);
  for (int j = 0; j <= m.density_intervals() && m.has_density(); ++j) breaks.push_back(m.density_node(j));
  const auto pieces = partition(-r, 0.0, breaks, snap_tolerance(r));

  double tail = 0.0;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const auto nodes = simpson_nodes(pieces[i], pieces[i + 1], intervals_per_piece);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const Limit side = (q == 0) ? Limit::Right : (q + 1 == nodes.size() ? Limit::Left : Limit::Value);
      tail += nodes[q].w * cumulative(m, nodes[q].x, side)(dh(t + nodes[q].x));
    }
  }
  const double rhs = cumulative(m, 0.0)(h(t)) - tail;
  return {lhs, rhs};
}

}  // namespace delayvar
