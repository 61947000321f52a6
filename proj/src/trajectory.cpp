#include "delayvar/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace delayvar {

namespace {

constexpr int kNormSamplesPerInterval = 8;

double node_tolerance(double T) { return 1e-12 * T; }

}  // namespace

// Grid

Grid::Grid(double horizon, int intervals) : T_(horizon), N_(intervals), h_(horizon / intervals) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("Grid: T must be positive");
  if (intervals < 1) throw std::invalid_argument("Grid: N must be >= 1");
}

int Grid::interval_of(double t) const {
  const int j = static_cast<int>(std::floor(t / h_));
  return std::clamp(j, 0, N_ - 1);
}

int Grid::delay_steps(double r) const {
  const double m = std::round(r / h_);
  if (m >= 1.0 && m <= N_ && m * h_ == r) return static_cast<int>(m);
  std::ostringstream msg;
  msg.precision(17);
  msg << "grid is not commensurate with the delay: r = " << r << ", T = " << T_ << ", N = " << N_
      << " gives step h = T/N = " << h_ << " and r/h = " << r / h_
      << "; r must equal m*h exactly in binary floating point for an integer m >= 1"
      << " (choose N so that T/N is exactly representable and divides r, e.g. powers of two"
      << " for dyadic r and T)";
  throw std::invalid_argument(msg.str());
}

// Hermite basis

void hermite_shape(double u, double h, double out[4]) {
  const double u2 = u * u;
  const double u3 = u2 * u;
  out[0] = 2.0 * u3 - 3.0 * u2 + 1.0;
  out[1] = h * (u3 - 2.0 * u2 + u);
  out[2] = -2.0 * u3 + 3.0 * u2;
  out[3] = h * (u3 - u2);
}

void hermite_shape_derivative(double u, double h, double out[4]) {
  const double u2 = u * u;
  out[0] = (6.0 * u2 - 6.0 * u) / h;
  out[1] = 3.0 * u2 - 4.0 * u + 1.0;
  out[2] = (-6.0 * u2 + 6.0 * u) / h;
  out[3] = 3.0 * u2 - 2.0 * u;
}

Vector HermiteData::value(double t) const {
  const int N = grid.intervals();
  if (t >= grid.horizon()) return values.col(N);
  const int j = grid.interval_of(t);
  const double h = grid.step();
  double w[4];
  hermite_shape((t - grid.node(j)) / h, h, w);
  return w[0] * values.col(j) + w[1] * slopes.col(j) + w[2] * values.col(j + 1) + w[3] * slopes.col(j + 1);
}

Vector HermiteData::derivative(double t) const {
  const int N = grid.intervals();
  if (t >= grid.horizon()) return slopes.col(N);
  const int j = grid.interval_of(t);
  const double h = grid.step();
  double w[4];
  hermite_shape_derivative((t - grid.node(j)) / h, h, w);
  return w[0] * values.col(j) + w[1] * slopes.col(j) + w[2] * values.col(j + 1) + w[3] * slopes.col(j + 1);
}

// HistoryFunction

HistoryFunction::HistoryFunction(Eigen::Index dim, double r, std::function<Vector(double)> f,
                                 std::vector<double> kinks)
    : dim_(dim), r_(r), f_(std::move(f)), kinks_(std::move(kinks)) {
  if (dim < 1) throw std::invalid_argument("HistoryFunction: dimension must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("HistoryFunction: r must be positive");
}

HistoryFunction HistoryFunction::closed_form(Eigen::Index dim, double r, std::function<Vector(double)> f) {
  return HistoryFunction(dim, r, std::move(f), {});
}

HistoryFunction HistoryFunction::constant(const Vector& c, double r) {
  return HistoryFunction(c.size(), r, [c](double) { return c; }, {});
}

HistoryFunction HistoryFunction::linear(const Vector& offset, const Vector& slope, double r) {
  if (offset.size() != slope.size()) throw std::invalid_argument("HistoryFunction::linear: dimension mismatch");
  return HistoryFunction(
      offset.size(), r, [offset, slope](double th) { return (offset + th * slope).eval(); }, {});
}

HistoryFunction HistoryFunction::sinusoid(const Vector& offset, const Vector& amplitude, double frequency,
                                          double phase, double r) {
  if (offset.size() != amplitude.size()) {
    throw std::invalid_argument("HistoryFunction::sinusoid: dimension mismatch");
  }
  return HistoryFunction(
      offset.size(), r,
      [offset, amplitude, frequency, phase](double th) {
        return (offset + std::sin(frequency * th + phase) * amplitude).eval();
      },
      {});
}

HistoryFunction HistoryFunction::sampled(double r, Eigen::MatrixXd samples) {
  const Eigen::Index K = samples.cols() - 1;
  if (samples.rows() < 1 || K < 1) throw std::invalid_argument("HistoryFunction::sampled: need >= 2 samples");
  const double step = r / K;
  Eigen::MatrixXd slopes(samples.rows(), K + 1);
  slopes.col(0) = (samples.col(1) - samples.col(0)) / step;
  slopes.col(K) = (samples.col(K) - samples.col(K - 1)) / step;
  for (Eigen::Index k = 1; k < K; ++k) slopes.col(k) = (samples.col(k + 1) - samples.col(k - 1)) / (2.0 * step);

  std::vector<double> kinks;
  for (Eigen::Index k = 1; k < K; ++k) kinks.push_back(-r + k * step);
  auto data = std::make_shared<const HermiteData>(HermiteData{Grid(r, static_cast<int>(K)), samples, slopes});
  return HistoryFunction(
      samples.rows(), r,
      [data, r](double th) {
        if (th >= 0.0) return Vector(data->values.col(data->values.cols() - 1));
        return data->value(th + r);
      },
      std::move(kinks));
}

// Trajectory

Trajectory::Trajectory(HistoryFunction history, Grid grid, Eigen::MatrixXd values, Eigen::MatrixXd slopes) {
  const Eigen::Index n = history.dim();
  const int N = grid.intervals();
  if (values.rows() != n || values.cols() != N + 1 || slopes.rows() != n || slopes.cols() != N + 1) {
    throw std::invalid_argument("Trajectory: node data must be dim x (N+1)");
  }
  if (!values.allFinite() || !slopes.allFinite()) throw std::invalid_argument("Trajectory: non-finite node data");
  const int m = grid.delay_steps(history.horizon());
  const Vector psi0 = history(0.0);
  if (max_norm(values.col(0) - psi0) > 1e-12 * std::max(1.0, max_norm(psi0))) {
    throw std::invalid_argument("Trajectory: x(0) must equal psi(0)");
  }
  values.col(0) = psi0;
  data_ = std::make_shared<const Data>(
      Data{std::move(history), HermiteData{grid, std::move(values), std::move(slopes)}, m});
}

Vector Trajectory::value(double t) const {
  const double r = delay();
  const double T = grid().horizon();
  const double tol = node_tolerance(T);
  if (!(t >= -r - tol && t <= T + tol)) throw std::out_of_range("Trajectory::value: t outside [-r, T]");
  if (t < 0.0) return data_->history(std::max(t, -r));
  return data_->spline.value(t);
}

Vector Trajectory::derivative(double t) const {
  const double T = grid().horizon();
  const double tol = node_tolerance(T);
  if (!(t >= -tol && t <= T + tol)) throw std::out_of_range("Trajectory::derivative: t outside [0, T]");
  return data_->spline.derivative(std::clamp(t, 0.0, T));
}

SegmentFunction Trajectory::segment(double t) const {
  const double r = delay();
  const double T = grid().horizon();
  const double tol = node_tolerance(T);
  if (!(t >= -tol && t <= T + tol)) throw std::out_of_range("Trajectory::segment: t outside [0, T]");
  t = std::clamp(t, 0.0, T);

  std::vector<double> kinks = grid_segment_kinks(grid(), r, t);
  for (double s : data_->history.kinks()) kinks.push_back(s - t);

  auto data = data_;
  return SegmentFunction(
      dim(), r,
      [data, t, r](double th) {
        const double tau = t + th;
        if (tau < 0.0) return data->history(std::max(tau, -r));
        return data->spline.value(tau);
      },
      std::move(kinks));
}

std::vector<double> Trajectory::kinks() const {
  std::vector<double> out(data_->history.kinks().begin(), data_->history.kinks().end());
  for (int j = 0; j <= grid().intervals(); ++j) out.push_back(grid().node(j));
  return out;
}

double Trajectory::norm_X() const {
  const double r = delay();
  const int N = grid().intervals();
  const double h = grid().step();
  const int hist_samples = kNormSamplesPerInterval * data_->m;
  double sup_x = 0.0;
  for (int k = 0; k <= hist_samples; ++k) {
    sup_x = std::max(sup_x, max_norm(data_->history(-r + k * (r / hist_samples))));
  }
  double sup_dx = 0.0;
  for (int j = 0; j < N; ++j) {
    for (int k = 0; k < kNormSamplesPerInterval; ++k) {
      const double t = grid().node(j) + k * (h / kNormSamplesPerInterval);
      sup_x = std::max(sup_x, max_norm(data_->spline.value(t)));
      sup_dx = std::max(sup_dx, max_norm(data_->spline.derivative(t)));
    }
  }
  sup_x = std::max(sup_x, max_norm(data_->spline.values.col(N)));
  sup_dx = std::max(sup_dx, max_norm(data_->spline.slopes.col(N)));
  return sup_x + sup_dx;
}

Trajectory Trajectory::plus(const Perturbation& h, double alpha) const {
  if (h.dim() != dim() || h.grid().intervals() != grid().intervals() || h.grid().horizon() != grid().horizon()) {
    throw std::invalid_argument("Trajectory::plus: perturbation grid or dimension mismatch");
  }
  return Trajectory(data_->history, grid(), values() + alpha * h.values(), slopes() + alpha * h.slopes());
}

Trajectory Trajectory::scaled(double a) const {
  const HistoryFunction& psi = data_->history;
  auto scaled_history = HistoryFunction::closed_form(dim(), delay(), [psi, a](double th) { return (a * psi(th)).eval(); });
  return Trajectory(scaled_history, grid(), a * values(), a * slopes());
}

// Perturbation

namespace {

Trajectory zero_history_curve(Grid grid, double r, Eigen::MatrixXd values, Eigen::MatrixXd slopes) {
  const Eigen::Index n = values.rows();
  const int N = grid.intervals();
  if (values.cols() != N + 1) throw std::invalid_argument("Perturbation: node data must be dim x (N+1)");
  if (!values.col(0).isZero(0.0) || !values.col(N).isZero(0.0)) {
    throw std::invalid_argument("Perturbation: h(0) and h(T) must be exactly zero");
  }
  return Trajectory(HistoryFunction::constant(Vector::Zero(n), r), grid, std::move(values), std::move(slopes));
}

}  // namespace

Perturbation::Perturbation(Grid grid, double r, Eigen::MatrixXd values, Eigen::MatrixXd slopes)
    : curve_(zero_history_curve(grid, r, std::move(values), std::move(slopes))) {}

std::pair<double, double> Perturbation::support() const {
  const int N = grid().intervals();
  int first = -1;
  int last = -1;
  for (int j = 0; j <= N; ++j) {
    if (!values().col(j).isZero(0.0) || !slopes().col(j).isZero(0.0)) {
      if (first < 0) first = j;
      last = j;
    }
  }
  if (first < 0) return {0.0, 0.0};
  return {grid().node(std::max(first - 1, 0)), grid().node(std::min(last + 1, N))};
}

Perturbation operator+(const Perturbation& a, const Perturbation& b) {
  return Perturbation(a.grid(), a.delay(), a.values() + b.values(), a.slopes() + b.slopes());
}

Perturbation operator*(double s, const Perturbation& a) {
  return Perturbation(a.grid(), a.delay(), s * a.values(), s * a.slopes());
}

// PerturbationBasis

PerturbationBasis::PerturbationBasis(Grid grid, Eigen::Index dim, double r) : grid_(grid), dim_(dim), r_(r) {
  const int N = grid.intervals();
  if (N < 2) throw std::invalid_argument("PerturbationBasis: N must be >= 2");
  grid.delay_steps(r);
  for (Eigen::Index k = 0; k < dim; ++k) {
    for (int j = 1; j < N; ++j) dofs_.push_back({k, j, Dof::Kind::Value});
    for (int j = 0; j <= N; ++j) dofs_.push_back({k, j, Dof::Kind::Slope});
  }
}

long PerturbationBasis::index_of(Eigen::Index coord, int node, Dof::Kind kind) const {
  const int N = grid_.intervals();
  const long base = static_cast<long>(coord) * 2 * N;
  if (kind == Dof::Kind::Value) {
    if (node <= 0 || node >= N) return -1;
    return base + node - 1;
  }
  return base + (N - 1) + node;
}

Perturbation PerturbationBasis::element(std::size_t i) const {
  const Dof& d = dofs_.at(i);
  const int N = grid_.intervals();
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(dim_, N + 1);
  Eigen::MatrixXd slopes = Eigen::MatrixXd::Zero(dim_, N + 1);
  (d.kind == Dof::Kind::Value ? values : slopes)(d.coord, d.node) = 1.0;
  return Perturbation(grid_, r_, std::move(values), std::move(slopes));
}

std::vector<Perturbation> PerturbationBasis::elements() const {
  std::vector<Perturbation> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(element(i));
  return out;
}

Perturbation PerturbationBasis::combine(const Eigen::VectorXd& c) const {
  if (static_cast<std::size_t>(c.size()) != size()) throw std::invalid_argument("combine: coefficient count mismatch");
  const int N = grid_.intervals();
  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(dim_, N + 1);
  Eigen::MatrixXd slopes = Eigen::MatrixXd::Zero(dim_, N + 1);
  for (std::size_t i = 0; i < size(); ++i) {
    const Dof& d = dofs_[i];
    (d.kind == Dof::Kind::Value ? values : slopes)(d.coord, d.node) = c[static_cast<Eigen::Index>(i)];
  }
  return Perturbation(grid_, r_, std::move(values), std::move(slopes));
}

// Free functions

std::vector<double> grid_segment_kinks(const Grid& grid, double r, double t) {
  const double h = grid.step();
  std::vector<double> kinks;
  const int jlo = std::max(0, static_cast<int>(std::ceil((t - r) / h)));
  const int jhi = std::min(grid.intervals(), static_cast<int>(std::floor(t / h)));
  for (int j = jlo; j <= jhi; ++j) kinks.push_back(grid.node(j) - t);
  kinks.push_back(-t);
  return kinks;
}

LocalShapes local_shapes(const Grid& grid, double t, bool derivative) {
  const int N = grid.intervals();
  LocalShapes out{};
  if (t >= grid.horizon()) {
    out.node[0] = out.node[1] = out.node[2] = out.node[3] = N;
    out.kind[0] = out.kind[2] = Dof::Kind::Value;
    out.kind[1] = out.kind[3] = Dof::Kind::Slope;
    // value(T) is y_N, derivative(T) is y'_N
    out.shape[0] = derivative ? 0.0 : 1.0;
    out.shape[1] = derivative ? 1.0 : 0.0;
    out.shape[2] = out.shape[3] = 0.0;
    return out;
  }
  const int j = grid.interval_of(t);
  const double h = grid.step();
  const double u = (t - grid.node(j)) / h;
  if (derivative) {
    hermite_shape_derivative(u, h, out.shape);
  } else {
    hermite_shape(u, h, out.shape);
  }
  out.node[0] = out.node[1] = j;
  out.node[2] = out.node[3] = j + 1;
  out.kind[0] = out.kind[2] = Dof::Kind::Value;
  out.kind[1] = out.kind[3] = Dof::Kind::Slope;
  return out;
}

Trajectory affine_initial_guess(const HistoryFunction& psi, const Vector& zeta, double T, int N) {
  if (zeta.size() != psi.dim()) throw std::invalid_argument("affine_initial_guess: zeta dimension mismatch");
  Grid grid(T, N);
  grid.delay_steps(psi.horizon());
  const Vector psi0 = psi(0.0);
  const Vector rise = zeta - psi0;
  Eigen::MatrixXd values(psi.dim(), N + 1);
  Eigen::MatrixXd slopes(psi.dim(), N + 1);
  for (int j = 0; j <= N; ++j) {
    values.col(j) = (grid.node(j) / T) * rise + psi0;
    slopes.col(j) = rise / T;
  }
  values.col(0) = psi0;
  values.col(N) = zeta;
  return Trajectory(psi, grid, std::move(values), std::move(slopes));
}

std::vector<Perturbation> basis_perturbations(const Grid& grid, Eigen::Index dim, double r) {
  return PerturbationBasis(grid, dim, r).elements();
}

}  // namespace delayvar
