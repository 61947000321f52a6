#include "delayvar/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace delayvar {

DelayLagrangian::DelayLagrangian(Eigen::Index dim, double delay, double horizon)
    : n_(dim), r_(delay), T_(horizon) {
  if (dim < 1) throw std::invalid_argument("DelayLagrangian: dimension must be >= 1");
  if (!(delay > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("DelayLagrangian: r and T must be positive");
}

CustomLagrangian::CustomLagrangian(Eigen::Index dim, double delay, double horizon, EvalFn eval, D2Fn d2, D3Fn d3,
                                   std::vector<double> atom_locations)
    : DelayLagrangian(dim, delay, horizon),
      eval_(std::move(eval)),
      d2_(std::move(d2)),
      d3_(std::move(d3)),
      atoms_(std::move(atom_locations)) {}

// PointDelayLagrangian

PointDelayLagrangian::PointDelayLagrangian(Eigen::Index dim, double delay, double horizon, CoreFunctions core,
                                           bool uses_delay, std::string name)
    : DelayLagrangian(dim, delay, horizon), core_(std::move(core)), uses_delay_(uses_delay), name_(std::move(name)) {}

double PointDelayLagrangian::eval(double t, const SegmentFunction& phi, const Vector& v) const {
  return core_.L(t, phi(0.0), phi(-delay()), v);
}

CovectorMeasure PointDelayLagrangian::d2(double t, const SegmentFunction& phi, const Vector& v) const {
  const Vector a = phi(0.0);
  const Vector b = phi(-delay());
  std::vector<Atom> atoms;
  atoms.push_back({0.0, Covector(core_.dLda(t, a, b, v))});
  if (uses_delay_) atoms.push_back({-delay(), Covector(core_.dLdb(t, a, b, v))});
  return CovectorMeasure(dim(), delay(), std::move(atoms));
}

Covector PointDelayLagrangian::d3(double t, const SegmentFunction& phi, const Vector& v) const {
  return Covector(core_.dLdv(t, phi(0.0), phi(-delay()), v));
}

std::vector<double> PointDelayLagrangian::atom_locations() const {
  if (uses_delay_) return {-delay(), 0.0};
  return {0.0};
}

// DistributedDelayLagrangian

namespace {

CovectorMeasure sample_kernel(Eigen::Index dim, double r, const std::function<double(double)>& k, int intervals) {
  if (intervals < 1) throw std::invalid_argument("kernel_intervals must be >= 1");
  Eigen::MatrixXd samples(dim, intervals + 1);
  for (int j = 0; j <= intervals; ++j) {
    const double th = (j == intervals) ? 0.0 : -r + j * (r / intervals);
    samples.col(j).setConstant(k(th));
  }
  return CovectorMeasure(dim, r, {}, std::move(samples));
}

}  // namespace

DistributedDelayLagrangian::DistributedDelayLagrangian(Eigen::Index dim, double delay, double horizon,
                                                       CoreFunctions core, std::function<double(double)> kernel,
                                                       int kernel_intervals, std::string name)
    : DelayLagrangian(dim, delay, horizon),
      core_(std::move(core)),
      kernel_(sample_kernel(dim, delay, kernel, kernel_intervals)),
      name_(std::move(name)) {}

Vector DistributedDelayLagrangian::moment(const SegmentFunction& phi) const { return pair_components(kernel_, phi); }

double DistributedDelayLagrangian::eval(double t, const SegmentFunction& phi, const Vector& v) const {
  return core_.L(t, phi(0.0), moment(phi), v);
}

CovectorMeasure DistributedDelayLagrangian::d2(double t, const SegmentFunction& phi, const Vector& v) const {
  const Vector a = phi(0.0);
  const Vector w = moment(phi);
  const Vector dw = core_.dLdb(t, a, w, v);
  Eigen::MatrixXd density = dw.asDiagonal() * kernel_.density_samples();
  std::vector<Atom> atoms{{0.0, Covector(core_.dLda(t, a, w, v))}};
  return CovectorMeasure(dim(), delay(), std::move(atoms), std::move(density));
}

Covector DistributedDelayLagrangian::d3(double t, const SegmentFunction& phi, const Vector& v) const {
  return Covector(core_.dLdv(t, phi(0.0), moment(phi), v));
}

// Built-in families

namespace {

const std::vector<std::string> kClassicalKeys{"kv", "ka", "quartic", "forcing"};
const std::vector<std::string> kPointKeys{"kv", "ka", "kb", "cab", "cbv", "quartic", "forcing"};
const std::vector<std::string> kDistributedKeys{"kv",      "ka",      "kb", "cab", "cbv",
                                                "quartic", "forcing", "k0", "k1",  "kernel_intervals"};

CoreFunctions quadratic_core(const QuadraticCoefficients& c, double T, bool classical) {
  const double omega = 2.0 * std::numbers::pi / T;
  CoreFunctions core;
  if (classical) {
    core.L = [c, omega](double t, const Vector& a, const Vector&, const Vector& v) {
      return 0.5 * c.kv * v.squaredNorm() + 0.5 * c.ka * a.squaredNorm() + 0.25 * c.quartic * a.array().pow(4).sum() +
             c.forcing * std::sin(omega * t) * a.sum();
    };
    core.dLda = [c, omega](double t, const Vector& a, const Vector&, const Vector&) {
      return (c.ka * a + c.quartic * a.array().cube().matrix() +
              Vector::Constant(a.size(), c.forcing * std::sin(omega * t)))
          .eval();
    };
    core.dLdb = [](double, const Vector& a, const Vector&, const Vector&) { return Vector::Zero(a.size()).eval(); };
    core.dLdv = [c](double, const Vector&, const Vector&, const Vector& v) { return (c.kv * v).eval(); };
    return core;
  }
  core.L = [c, omega](double t, const Vector& a, const Vector& b, const Vector& v) {
    return 0.5 * c.kv * v.squaredNorm() + 0.5 * c.ka * a.squaredNorm() + 0.5 * c.kb * b.squaredNorm() +
           c.cab * a.dot(b) + c.cbv * b.dot(v) + 0.25 * c.quartic * b.array().pow(4).sum() +
           c.forcing * std::sin(omega * t) * a.sum();
  };
  core.dLda = [c, omega](double t, const Vector& a, const Vector& b, const Vector&) {
    return (c.ka * a + c.cab * b + Vector::Constant(a.size(), c.forcing * std::sin(omega * t))).eval();
  };
  core.dLdb = [c](double, const Vector& a, const Vector& b, const Vector& v) {
    return (c.kb * b + c.cab * a + c.cbv * v + c.quartic * b.array().cube().matrix()).eval();
  };
  core.dLdv = [c](double, const Vector&, const Vector& b, const Vector& v) { return (c.kv * v + c.cbv * b).eval(); };
  return core;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"classical_quadratic", "point_delay_quadratic", "distributed_delay_quadratic"};
}

std::vector<std::string> builtin_coefficient_keys(const std::string& name) {
  if (name == "classical_quadratic") return kClassicalKeys;
  if (name == "point_delay_quadratic") return kPointKeys;
  if (name == "distributed_delay_quadratic") return kDistributedKeys;
  throw std::invalid_argument("unknown problem '" + name +
                              "' (expected classical_quadratic, point_delay_quadratic or distributed_delay_quadratic)");
}

QuadraticCoefficients coefficients_from_map(const std::string& name, const std::map<std::string, double>& entries) {
  const auto keys = builtin_coefficient_keys(name);
  QuadraticCoefficients c;
  for (const auto& [key, value] : entries) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("problem '" + name + "' does not accept coefficient '" + key + "'");
    }
    if (key == "kv") c.kv = value;
    else if (key == "ka") c.ka = value;
    else if (key == "kb") c.kb = value;
    else if (key == "cab") c.cab = value;
    else if (key == "cbv") c.cbv = value;
    else if (key == "quartic") c.quartic = value;
    else if (key == "forcing") c.forcing = value;
    else if (key == "k0") c.k0 = value;
    else if (key == "k1") c.k1 = value;
    else if (key == "kernel_intervals") {
      if (value < 1 || value != std::floor(value)) throw std::invalid_argument("kernel_intervals must be a positive integer");
      c.kernel_intervals = static_cast<int>(value);
    }
  }
  return c;
}

std::unique_ptr<DelayLagrangian> make_builtin(const std::string& name, Eigen::Index dim, double delay, double horizon,
                                              const QuadraticCoefficients& c) {
  if (name == "classical_quadratic") {
    return std::make_unique<PointDelayLagrangian>(dim, delay, horizon, quadratic_core(c, horizon, true), false, name);
  }
  if (name == "point_delay_quadratic") {
    return std::make_unique<PointDelayLagrangian>(dim, delay, horizon, quadratic_core(c, horizon, false), true, name);
  }
  if (name == "distributed_delay_quadratic") {
    const double k0 = c.k0;
    const double k1 = c.k1;
    return std::make_unique<DistributedDelayLagrangian>(
        dim, delay, horizon, quadratic_core(c, horizon, false), [k0, k1](double th) { return k0 + k1 * th; },
        c.kernel_intervals, name);
  }
  builtin_coefficient_keys(name);  // throws with the list of known names
  return nullptr;
}

// Validation

double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / scale;
}

double validate_d2(const DelayLagrangian& p, double t, const SegmentFunction& phi, const Vector& v,
                   std::span<const SegmentFunction> directions, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("validate_d2: eps must be positive");
  const CovectorMeasure m = p.d2(t, phi, v);
  double worst = 0.0;
  for (const auto& dir : directions) {
    const double analytic = pair(m, dir);
    const double fp = p.eval(t, combine(1.0, phi, eps, dir), v);
    const double fm = p.eval(t, combine(1.0, phi, -eps, dir), v);
    worst = std::max(worst, relative_error(analytic, (fp - fm) / (2.0 * eps)));
  }
  return worst;
}

double validate_d3(const DelayLagrangian& p, double t, const SegmentFunction& phi, const Vector& v, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("validate_d3: eps must be positive");
  const Covector d = p.d3(t, phi, v);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    Vector vp = v;
    Vector vm = v;
    vp[k] += eps;
    vm[k] -= eps;
    const double fd = (p.eval(t, phi, vp) - p.eval(t, phi, vm)) / (2.0 * eps);
    worst = std::max(worst, relative_error(d[k], fd));
  }
  return worst;
}

}  // namespace delayvar
