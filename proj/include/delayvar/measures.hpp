#pragma once

// Covector-valued measures on [-r, 0]: finite atoms plus a piecewise-linear
// density. A measure represents a continuous linear functional on
// C0([-r,0], R^n) through Stieltjes pairing with its cumulative NBV function.

#include "delayvar/linalg.hpp"
#include "delayvar/quadrature.hpp"

#include <Eigen/Core>
#include <functional>
#include <span>
#include <vector>

namespace delayvar {

/// A continuous function [-r, 0] -> R^n together with the interior points
/// where it may fail to be smooth. Quadratures split their panels there.
class SegmentFunction {
 public:
  using Eval = std::function<Vector(double)>;

  SegmentFunction(Eigen::Index dim, double horizon, Eval f, std::vector<double> kinks = {});

  static SegmentFunction zero(Eigen::Index dim, double horizon);
  static SegmentFunction constant(const Vector& c, double horizon);

  Vector operator()(double theta) const { return f_(theta); }

  Eigen::Index dim() const { return dim_; }
  double horizon() const { return r_; }
  std::span<const double> kinks() const { return kinks_; }

  /// a*f + b*g, with the union of both kink sets.
  friend SegmentFunction combine(double a, const SegmentFunction& f, double b,
                                 const SegmentFunction& g);

 private:
  Eigen::Index dim_;
  double r_;
  Eval f_;
  std::vector<double> kinks_;
};

struct Atom {
  double location;
  Covector weight;
};

/// Which one-sided value of the cumulative function to report at a point.
/// `Value` follows the NBV convention: left-continuous inside (-r, 0),
/// zero at -r, total mass at 0.
enum class Limit { Value, Left, Right };

class CovectorMeasure {
 public:
  /// Zero measure.
  CovectorMeasure(Eigen::Index dim, double horizon);

  /// Atoms are sorted by location; atoms sharing a location are merged.
  /// `density` is either empty or a dim x (M+1) matrix of samples on the
  /// uniform grid theta_k = -r + k*r/M, linearly interpolated in between.
  CovectorMeasure(Eigen::Index dim, double horizon, std::vector<Atom> atoms,
                  Eigen::MatrixXd density = Eigen::MatrixXd());

  Eigen::Index dim() const { return dim_; }
  double horizon() const { return r_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  bool has_density() const { return density_.cols() > 0; }
  int density_intervals() const { return has_density() ? static_cast<int>(density_.cols()) - 1 : 0; }
  const Eigen::MatrixXd& density_samples() const { return density_; }
  double density_node(int k) const;
  /// Interpolated density; zero when there is none.
  Covector density(double theta) const;

  /// Sum of all atom weights plus the integral of the density.
  Covector total_mass() const;

  CovectorMeasure scaled(double a) const;

  /// Moves atoms lying within 1e-12*r of a multiple of `step` (measured
  /// from 0) exactly onto that multiple.
  CovectorMeasure snapped(double step) const;

  /// Atom lists are merged; densities must share the same grid unless one
  /// of them is absent.
  friend CovectorMeasure operator+(const CovectorMeasure& a, const CovectorMeasure& b);

 private:
  friend Covector cumulative(const CovectorMeasure& m, double theta, Limit side);

  Covector density_integral_to(double theta) const;

  Eigen::Index dim_;
  double r_;
  std::vector<Atom> atoms_;
  Eigen::MatrixXd density_;
  Eigen::MatrixXd density_prefix_;  // exact integral of the density up to each grid node
};

/// Total variation of the cumulative function under the l1 dual norm; exact
/// for the stored representation.
double total_variation(const CovectorMeasure& m);

/// Total variation of the k-th coordinate measure.
double total_variation(const CovectorMeasure& m, Eigen::Index k);

/// Simpson panels per smooth piece of a density pairing.
inline constexpr int kDensityPanels = 4;

/// Quadrature nodes for the density part of a pairing: each density interval
/// is split at `kinks`, and each resulting piece gets kDensityPanels Simpson
/// panels.
std::vector<QuadNode> density_rule(const CovectorMeasure& m, std::span<const double> kinks);

/// Stieltjes pairing <m, phi> = sum_i w_i . phi(theta_i) + int d(theta) . phi(theta) dtheta.
double pair(const CovectorMeasure& m, const SegmentFunction& phi);

/// Coordinatewise pairing: component k is <m_k, phi^k>. Sums to `pair`.
Vector pair_components(const CovectorMeasure& m, const SegmentFunction& phi);

/// Cumulative NBV function g(theta); throws std::out_of_range outside [-r, 0].
Covector cumulative(const CovectorMeasure& m, double theta, Limit side = Limit::Value);

struct IntegrationByParts {
  double lhs;
  double rhs;
};

/// Both sides of  <m, h(t + .)> = g(0).h(t) - int_{t-r}^{t} g(xi - t).h'(xi) dxi.
/// `h_kinks` lists non-smooth points of h in the xi variable.
IntegrationByParts integrate_by_parts_check(const CovectorMeasure& m,
                                            const std::function<Vector(double)>& h,
                                            const std::function<Vector(double)>& dh, double t,
                                            std::span<const double> h_kinks = {},
                                            int intervals_per_piece = 4);

}  // namespace delayvar
