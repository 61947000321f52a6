#pragma once

// Elements of the space of curves that are continuous on [-r, T] and C1 on
// [0, T]: a history function on [-r, 0] glued to a cubic Hermite spline on a
// uniform, delay-commensurate grid over [0, T].

#include "delayvar/linalg.hpp"
#include "delayvar/measures.hpp"

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace delayvar {

/// Uniform node grid 0 = t_0 < ... < t_N = T.
class Grid {
 public:
  Grid(double horizon, int intervals);

  double horizon() const { return T_; }
  int intervals() const { return N_; }
  double step() const { return h_; }
  /// t_j; t_N is exactly T.
  double node(int j) const { return j == N_ ? T_ : j * h_; }
  /// Index j of the interval [t_j, t_{j+1}] containing t (clamped to the grid).
  int interval_of(double t) const;

  /// The integer m with r == m * step() exactly in binary floating point.
  /// Throws std::invalid_argument naming r, T and N when no such m >= 1 exists.
  int delay_steps(double r) const;

 private:
  double T_;
  int N_;
  double h_;
};

class HistoryFunction {
 public:
  static HistoryFunction closed_form(Eigen::Index dim, double r, std::function<Vector(double)> f);
  static HistoryFunction constant(const Vector& c, double r);
  /// offset + slope * theta.
  static HistoryFunction linear(const Vector& offset, const Vector& slope, double r);
  /// offset + amplitude * sin(frequency * theta + phase), componentwise.
  static HistoryFunction sinusoid(const Vector& offset, const Vector& amplitude, double frequency,
                                  double phase, double r);
  /// Samples (dim x (K+1), K >= 1) on the uniform grid over [-r, 0], joined by
  /// cubic Hermite pieces with finite-difference slopes.
  static HistoryFunction sampled(double r, Eigen::MatrixXd samples);

  Vector operator()(double theta) const { return f_(theta); }
  Eigen::Index dim() const { return dim_; }
  double horizon() const { return r_; }
  /// Interior points of (-r, 0) where the function may not be smooth.
  std::span<const double> kinks() const { return kinks_; }

 private:
  HistoryFunction(Eigen::Index dim, double r, std::function<Vector(double)> f, std::vector<double> kinks);

  Eigen::Index dim_;
  double r_;
  std::function<Vector(double)> f_;
  std::vector<double> kinks_;
};

/// Piecewise cubic Hermite data on a grid: values and derivatives at nodes.
struct HermiteData {
  Grid grid;
  Eigen::MatrixXd values;  // dim x (N+1)
  Eigen::MatrixXd slopes;  // dim x (N+1)

  Vector value(double t) const;
  Vector derivative(double t) const;
};

/// Hermite basis on the reference interval: weights of (y_j, y'_j, y_{j+1}, y'_{j+1}).
void hermite_shape(double u, double h, double out[4]);
void hermite_shape_derivative(double u, double h, double out[4]);

class Perturbation;

class Trajectory {
 public:
  /// values.col(0) must match history(0) to within 1e-12 (relative); it is
  /// then set to history(0) exactly.
  Trajectory(HistoryFunction history, Grid grid, Eigen::MatrixXd values, Eigen::MatrixXd slopes);

  Eigen::Index dim() const { return data_->history.dim(); }
  double delay() const { return data_->history.horizon(); }
  const Grid& grid() const { return data_->spline.grid; }
  int delay_steps() const { return data_->m; }
  const HistoryFunction& history() const { return data_->history; }
  const Eigen::MatrixXd& values() const { return data_->spline.values; }
  const Eigen::MatrixXd& slopes() const { return data_->spline.slopes; }

  /// x(t) for t in [-r, T].
  Vector value(double t) const;
  /// x'(t) for t in [0, T]; the Hermite derivative.
  Vector derivative(double t) const;
  /// The delay segment theta -> x(t + theta) on [-r, 0], for t in [0, T].
  SegmentFunction segment(double t) const;
  /// Points of [-r, T] where x may fail to be smooth: history kinks, 0, nodes.
  std::vector<double> kinks() const;

  /// sup |x| over [-r, T] plus sup |x'| over [0, T], both by sampling eight
  /// points per grid interval. A lower bound within interpolation error.
  double norm_X() const;

  /// x + alpha * h. History and endpoint are untouched because h vanishes there.
  Trajectory plus(const Perturbation& h, double alpha) const;
  Trajectory scaled(double a) const;

 private:
  struct Data {
    HistoryFunction history;
    HermiteData spline;
    int m;
  };
  std::shared_ptr<const Data> data_;
};

/// An element of the tangent space: zero on [-r, 0] and zero at T.
class Perturbation {
 public:
  /// Throws std::invalid_argument unless values.col(0) and values.col(N) are zero.
  Perturbation(Grid grid, double r, Eigen::MatrixXd values, Eigen::MatrixXd slopes);

  Eigen::Index dim() const { return curve_.dim(); }
  const Grid& grid() const { return curve_.grid(); }
  double delay() const { return curve_.delay(); }
  const Eigen::MatrixXd& values() const { return curve_.values(); }
  const Eigen::MatrixXd& slopes() const { return curve_.slopes(); }

  Vector value(double t) const { return curve_.value(t); }
  Vector derivative(double t) const { return curve_.derivative(t); }
  SegmentFunction segment(double t) const { return curve_.segment(t); }
  double norm_X() const { return curve_.norm_X(); }

  /// Smallest [a, b] in [0, T] outside which h and h' vanish identically.
  std::pair<double, double> support() const;

  friend Perturbation operator+(const Perturbation& a, const Perturbation& b);
  friend Perturbation operator*(double s, const Perturbation& a);

 private:
  Trajectory curve_;
};

struct Dof {
  enum class Kind { Value, Slope };
  Eigen::Index coord;
  int node;
  Kind kind;
};

/// Hermite nodal basis of the discrete tangent space. Per coordinate: value
/// dofs at t_1..t_{N-1}, then slope dofs at t_0..t_N.
class PerturbationBasis {
 public:
  PerturbationBasis(Grid grid, Eigen::Index dim, double r);

  std::size_t size() const { return dofs_.size(); }
  const Grid& grid() const { return grid_; }
  Eigen::Index dim() const { return dim_; }
  double delay() const { return r_; }
  const Dof& dof(std::size_t i) const { return dofs_[i]; }
  const std::vector<Dof>& dofs() const { return dofs_; }

  /// Index of the dof, or -1 for the constrained values at t_0 and t_N.
  long index_of(Eigen::Index coord, int node, Dof::Kind kind) const;

  Perturbation element(std::size_t i) const;
  std::vector<Perturbation> elements() const;

  /// sum_i c_i * element(i).
  Perturbation combine(const Eigen::VectorXd& coefficients) const;

 private:
  Grid grid_;
  Eigen::Index dim_;
  double r_;
  std::vector<Dof> dofs_;
};

/// Interior points of the segment window at time t where a spline on `grid`
/// may fail to be smooth: the nodes seen through the window and the junction.
std::vector<double> grid_segment_kinks(const Grid& grid, double r, double t);

/// Local Hermite basis at time t in [0, T]: for c = 0..3 the basis function
/// attached to (node[c], kind[c]) has value (or derivative) shape[c] at t.
/// Matches the evaluation used by HermiteData exactly.
struct LocalShapes {
  int node[4];
  Dof::Kind kind[4];
  double shape[4];
};
LocalShapes local_shapes(const Grid& grid, double t, bool derivative);

/// Straight line from psi(0) to zeta glued to the history: a member of the
/// admissible set. Throws std::invalid_argument for a non-commensurate grid.
Trajectory affine_initial_guess(const HistoryFunction& psi, const Vector& zeta, double T, int N);

/// The basis as a list, as spanned by `PerturbationBasis`.
std::vector<Perturbation> basis_perturbations(const Grid& grid, Eigen::Index dim, double r);

}  // namespace delayvar
