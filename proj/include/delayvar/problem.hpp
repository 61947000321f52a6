#pragma once

// Integrands F(t, phi, v) of delay variational problems, their partial
// differentials, and finite-difference validation of those differentials.
//
// The partial differential with respect to the segment is supplied as a
// CovectorMeasure, never reconstructed from F. Implementations must be pure:
// eval, d2 and d3 may be called concurrently and in any order.

#include "delayvar/linalg.hpp"
#include "delayvar/measures.hpp"

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace delayvar {

class DelayLagrangian {
 public:
  DelayLagrangian(Eigen::Index dim, double delay, double horizon);
  virtual ~DelayLagrangian() = default;

  Eigen::Index dim() const { return n_; }
  double delay() const { return r_; }
  double horizon() const { return T_; }

  virtual std::string name() const { return "custom"; }

  /// F(t, phi, v).
  virtual double eval(double t, const SegmentFunction& phi, const Vector& v) const = 0;
  /// The measure representing D2F(t, phi, v).
  virtual CovectorMeasure d2(double t, const SegmentFunction& phi, const Vector& v) const = 0;
  /// D3F(t, phi, v).
  virtual Covector d3(double t, const SegmentFunction& phi, const Vector& v) const = 0;
  /// Every location where d2 may place an atom. Used to register quadrature
  /// breakpoints; listing extra locations is harmless.
  virtual std::vector<double> atom_locations() const = 0;

 private:
  Eigen::Index n_;
  double r_;
  double T_;
};

/// A Lagrangian assembled from callables.
class CustomLagrangian final : public DelayLagrangian {
 public:
  using EvalFn = std::function<double(double, const SegmentFunction&, const Vector&)>;
  using D2Fn = std::function<CovectorMeasure(double, const SegmentFunction&, const Vector&)>;
  using D3Fn = std::function<Covector(double, const SegmentFunction&, const Vector&)>;

  CustomLagrangian(Eigen::Index dim, double delay, double horizon, EvalFn eval, D2Fn d2, D3Fn d3,
                   std::vector<double> atom_locations);

  double eval(double t, const SegmentFunction& phi, const Vector& v) const override { return eval_(t, phi, v); }
  CovectorMeasure d2(double t, const SegmentFunction& phi, const Vector& v) const override {
    return d2_(t, phi, v);
  }
  Covector d3(double t, const SegmentFunction& phi, const Vector& v) const override { return d3_(t, phi, v); }
  std::vector<double> atom_locations() const override { return atoms_; }

 private:
  EvalFn eval_;
  D2Fn d2_;
  D3Fn d3_;
  std::vector<double> atoms_;
};

/// Smooth core L(t, a, b, v) with a = phi(0) and b = phi(-r) or b = int k*phi.
struct CoreFunctions {
  using Scalar = std::function<double(double, const Vector&, const Vector&, const Vector&)>;
  using Partial = std::function<Vector(double, const Vector&, const Vector&, const Vector&)>;
  Scalar L;
  Partial dLda;
  Partial dLdb;
  Partial dLdv;
};

/// F(t, phi, v) = L(t, phi(0), phi(-r), v). D2F = dL/da delta_0 + dL/db delta_{-r}.
/// With `uses_delay` false, b is still passed but the atom at -r is dropped.
class PointDelayLagrangian final : public DelayLagrangian {
 public:
  PointDelayLagrangian(Eigen::Index dim, double delay, double horizon, CoreFunctions core,
                       bool uses_delay = true, std::string name = "point_delay");

  std::string name() const override { return name_; }
  double eval(double t, const SegmentFunction& phi, const Vector& v) const override;
  CovectorMeasure d2(double t, const SegmentFunction& phi, const Vector& v) const override;
  Covector d3(double t, const SegmentFunction& phi, const Vector& v) const override;
  std::vector<double> atom_locations() const override;

 private:
  CoreFunctions core_;
  bool uses_delay_;
  std::string name_;
};

/// F(t, phi, v) = L(t, phi(0), w, v) with w^k = int_{-r}^0 k(theta) phi^k(theta) dtheta.
/// The kernel is sampled on `kernel_intervals` uniform intervals; w is computed
/// with the same quadrature that pairs the density part of d2, so d2 is the
/// exact differential of the discretized F.
class DistributedDelayLagrangian final : public DelayLagrangian {
 public:
  DistributedDelayLagrangian(Eigen::Index dim, double delay, double horizon, CoreFunctions core,
                             std::function<double(double)> kernel, int kernel_intervals = 64,
                             std::string name = "distributed_delay");

  std::string name() const override { return name_; }
  double eval(double t, const SegmentFunction& phi, const Vector& v) const override;
  CovectorMeasure d2(double t, const SegmentFunction& phi, const Vector& v) const override;
  Covector d3(double t, const SegmentFunction& phi, const Vector& v) const override;
  std::vector<double> atom_locations() const override { return {0.0}; }

  /// The kernel moment w for a segment.
  Vector moment(const SegmentFunction& phi) const;
  const CovectorMeasure& kernel_measure() const { return kernel_; }

 private:
  CoreFunctions core_;
  CovectorMeasure kernel_;
  std::string name_;
};

/// Coefficients of the built-in quadratic families. With b = phi(-r) for
/// point_delay_quadratic and b = w for distributed_delay_quadratic:
///   F = kv/2 |v|^2 + ka/2 |a|^2 + kb/2 |b|^2 + cab a.b + cbv b.v
///       + quartic/4 sum b_k^4 + forcing sin(2 pi t / T) sum a_k
/// classical_quadratic has no b; its quartic term acts on a.
/// The kernel of distributed_delay_quadratic is k(theta) = k0 + k1 theta.
struct QuadraticCoefficients {
  double kv = 1.0;
  double ka = 0.0;
  double kb = 0.0;
  double cab = 0.0;
  double cbv = 0.0;
  double quartic = 0.0;
  double forcing = 0.0;
  double k0 = 1.0;
  double k1 = 0.0;
  int kernel_intervals = 64;
};

/// Names accepted by `make_builtin`.
std::vector<std::string> builtin_names();

/// Coefficient keys accepted by a built-in family.
std::vector<std::string> builtin_coefficient_keys(const std::string& name);

/// Throws std::invalid_argument for an unknown name or a key the family does
/// not accept.
QuadraticCoefficients coefficients_from_map(const std::string& name, const std::map<std::string, double>& entries);

std::unique_ptr<DelayLagrangian> make_builtin(const std::string& name, Eigen::Index dim, double delay,
                                              double horizon, const QuadraticCoefficients& c);

/// |a - b| / max(|a|, |b|, 1e-8): relative for ordinary magnitudes, absolute
/// below the floor.
double relative_error(double a, double b);

/// Worst relative error between pair(d2, dphi) and the central difference of
/// eval along each direction.
double validate_d2(const DelayLagrangian& p, double t, const SegmentFunction& phi, const Vector& v,
                   std::span<const SegmentFunction> directions, double eps = 1e-5);

/// Worst relative error between d3 and central differences along coordinate
/// directions of v.
double validate_d3(const DelayLagrangian& p, double t, const SegmentFunction& phi, const Vector& v,
                   double eps = 1e-5);

}  // namespace delayvar
