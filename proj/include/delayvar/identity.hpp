#pragma once

// Randomized property suites for the measure identities: the exchange of
// integration order behind the Euler-Lagrange equation, the total-variation
// bound on pairings, and integration by parts against a segment.

#include "delayvar/measures.hpp"
#include "delayvar/problem.hpp"
#include "delayvar/trajectory.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace delayvar {

/// mt19937_64 with a fixed, library-independent mapping to doubles, so a seed
/// gives the same stream on every platform.
class Random {
 public:
  explicit Random(std::uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  /// Uniform on {lo, ..., hi}.
  int integer(int lo, int hi);

 private:
  std::mt19937_64 gen_;
};

/// Atoms at random locations (occasionally exactly at -r or 0) with weights in
/// [-1, 1]^n, plus a density on `density_intervals` intervals when positive.
CovectorMeasure random_measure(Random& rng, Eigen::Index dim, double r, int atoms, int density_intervals);

/// Continuous piecewise-linear test function with vertex values in [-1, 1].
struct PiecewiseLinear {
  SegmentFunction f;
  Vector sup;  // exact sup norm of each coordinate
};
PiecewiseLinear random_piecewise_linear(Random& rng, Eigen::Index dim, double r, int pieces);

/// Smooth random curve c0 + sum of a few low-frequency sines, componentwise.
struct SmoothCurve {
  std::vector<Vector> offset, amplitude, frequency, phase;
  Vector value(double t) const;
  Vector derivative(double t) const;
};
SmoothCurve random_smooth_curve(Random& rng, Eigen::Index dim, int terms = 3);

/// Hermite interpolant of a smooth random curve, glued to a smooth history.
Trajectory random_trajectory(Random& rng, Eigen::Index dim, double r, const Grid& grid);

/// Hermite interpolant of a smooth random curve, zeroed at t_0 and t_N.
Perturbation random_perturbation(Random& rng, Eigen::Index dim, double r, const Grid& grid);

/// A Lagrangian whose differential is d2[t] = s(t, x(t)) * m for a fixed
/// measure m and a smooth positive modulation s. eval and d3 vanish. The
/// interior density nodes are reported with the atom locations.
std::unique_ptr<DelayLagrangian> modulated_measure_lagrangian(const CovectorMeasure& m, double horizon);

struct IdentityCheck {
  std::string name;
  int cases = 0;
  double max_discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct IdentityOptions {
  std::uint64_t seed = 20240601;
  int fubini_cases = 100;
  int pairing_cases = 1000;
  int ibp_cases = 200;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_pass() const;
};

/// Runs every suite. Discrepancies are relative to 1 + |lhs| for the
/// exchange identity, relative to the bound for pairings (any positive value
/// is a violation) and absolute for integration by parts.
IdentityReport run_identity_suites(const IdentityOptions& opts);

}  // namespace delayvar
