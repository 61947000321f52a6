#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "delayvar/identity.hpp"
#include "delayvar/trajectory.hpp"
#include "helpers.hpp"

#include <cmath>
#include <string>

using namespace delayvar;
using testing::sample_trajectory;
using testing::scalar;
using testing::vec;

namespace {

Trajectory parabola(double r, const Grid& grid) {
  // t^2 on [0, T] glued to a history that matches at 0 only in value
  const auto psi = HistoryFunction::closed_form(1, r, [](double th) { return scalar(std::sin(th)); });
  return sample_trajectory(
      psi, grid, [](double t) { return scalar(t * t); }, [](double t) { return scalar(2.0 * t); });
}

}  // namespace

TEST_CASE("grid commensurability") {
  const Grid g(1.0, 8);
  CHECK(g.delay_steps(0.5) == 4);
  CHECK(g.delay_steps(0.125) == 1);
  CHECK_THROWS_AS(g.delay_steps(0.3), std::invalid_argument);
  CHECK_THROWS_AS(g.delay_steps(0.0625), std::invalid_argument);
  try {
    Grid(1.0, 10).delay_steps(0.3);
    FAIL("expected a commensurability error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("r = 0.29999999999999999") != std::string::npos);
    CHECK(msg.find("T = 1") != std::string::npos);
    CHECK(msg.find("N = 10") != std::string::npos);
  }
}

TEST_CASE("segment at 0 is the history and at r lies on the spline") {
  const double r = 0.25;
  const Grid grid(1.0, 16);
  const auto x = parabola(r, grid);
  const auto s0 = x.segment(0.0);
  for (double th : {-0.25, -0.1, -0.01}) CHECK(s0(th)[0] == std::sin(th));
  const auto sr = x.segment(r);
  for (double th : {-0.25, -0.2, -0.07, 0.0}) {
    CHECK(sr(th)[0] == doctest::Approx((r + th) * (r + th)).epsilon(1e-15));
  }
}

TEST_CASE("constant trajectories have constant segments") {
  const double r = 0.5;
  const Grid grid(2.0, 8);
  const Vector c = vec({1.5, -2.0});
  const auto x = sample_trajectory(
      HistoryFunction::constant(c, r), grid, [&](double) { return c; }, [](double) { return Vector::Zero(2); });
  for (double t : {0.0, 0.3, 1.0, 2.0}) {
    const auto s = x.segment(t);
    for (double th : {-0.5, -0.31, 0.0}) CHECK(s(th) == c);
  }
}

TEST_CASE("derivative of Hermite interpolants") {
  const Grid grid(1.0, 8);
  const double r = 0.125;
  const auto lin = sample_trajectory(
      HistoryFunction::linear(vec({2.0}), vec({-3.0}), r), grid, [](double t) { return scalar(2.0 - 3.0 * t); },
      [](double) { return scalar(-3.0); });
  for (double t : {0.0, 0.1, 0.5, 0.77, 1.0}) CHECK(lin.derivative(t)[0] == doctest::Approx(-3.0).epsilon(1e-14));

  const auto x = parabola(r, grid);
  for (int j = 0; j <= 8; ++j) CHECK(x.derivative(grid.node(j))[0] == 2.0 * grid.node(j));
  for (double t : {0.03, 0.41, 0.999}) {
    CHECK(x.derivative(t)[0] == doctest::Approx(2.0 * t).epsilon(1e-14));
    CHECK(x.value(t)[0] == doctest::Approx(t * t).epsilon(1e-14));
  }

  // cubics are reproduced exactly
  const auto cubic = sample_trajectory(
      HistoryFunction::constant(vec({0.0}), r), grid, [](double t) { return scalar(t * t * t - t); },
      [](double t) { return scalar(3.0 * t * t - 1.0); });
  for (double t : {0.05, 0.33, 0.9}) {
    CHECK(cubic.value(t)[0] == doctest::Approx(t * t * t - t).epsilon(1e-14));
    CHECK(cubic.derivative(t)[0] == doctest::Approx(3.0 * t * t - 1.0).epsilon(1e-13));
  }
}

TEST_CASE("one-sided derivatives agree at interior nodes") {
  Random rng(2);
  const Grid grid(1.0, 16);
  const auto x = random_trajectory(rng, 2, 0.25, grid);
  const double eps = 1e-9;
  for (int j = 1; j < 16; ++j) {
    const double t = grid.node(j);
    const Vector left = (x.value(t) - x.value(t - eps)) / eps;
    const Vector right = (x.value(t + eps) - x.value(t)) / eps;
    CHECK((left - right).lpNorm<Eigen::Infinity>() < 1e-5);
    CHECK(x.derivative(t) == x.slopes().col(j));
  }
}

TEST_CASE("segment consistency with the spline and the history") {
  Random rng(4);
  const double r = 0.375;
  const Grid grid(1.5, 12);
  const auto x = random_trajectory(rng, 2, r, grid);
  for (double t : {0.0, 0.2, 0.375, 0.9, 1.5}) {
    const auto s = x.segment(t);
    for (double th : {-0.375, -0.3, -0.1, 0.0}) {
      const double tau = t + th;
      const Vector expected = tau >= 0 ? x.value(tau) : x.history()(tau);
      CHECK((s(th) - expected).lpNorm<Eigen::Infinity>() == 0.0);
    }
  }
  CHECK((x.value(0.0) - x.history()(0.0)).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((x.value(-1e-13) - x.value(1e-13)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("linear trajectories shift exactly") {
  const double r = 0.5;
  const Grid grid(1.0, 4);
  const auto x = sample_trajectory(
      HistoryFunction::linear(vec({1.0}), vec({2.0}), r), grid, [](double t) { return scalar(1.0 + 2.0 * t); },
      [](double) { return scalar(2.0); });
  for (double t : {0.0, 0.25, 0.5, 1.0}) {
    const auto s = x.segment(t);
    for (double th : {-0.5, -0.25, 0.0}) CHECK(s(th)[0] == x.value(t)[0] + 2.0 * th);
  }
}

TEST_CASE("norm examples") {
  const Grid grid(1.0, 4);
  const double r = 0.25;
  const auto zero = sample_trajectory(
      HistoryFunction::constant(vec({0.0}), r), grid, [](double) { return scalar(0.0); },
      [](double) { return scalar(0.0); });
  CHECK(zero.norm_X() == 0.0);

  const auto line = sample_trajectory(
      HistoryFunction::constant(vec({0.0}), r), grid, [](double t) { return scalar(t); },
      [](double) { return scalar(1.0); });
  CHECK(line.norm_X() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(line.scaled(2.0).norm_X() == doctest::Approx(2.0 * line.norm_X()).epsilon(1e-15));
}

TEST_CASE("norm dominates sampled sup norms") {
  Random rng(9);
  const Grid grid(1.0, 8);
  const auto x = random_trajectory(rng, 2, 0.5, grid);
  double sx = 0.0;
  double sd = 0.0;
  for (int k = 0; k <= 96; ++k) {
    const double t = -0.5 + k * (1.5 / 96);
    sx = std::max(sx, max_norm(x.value(t)));
    if (t >= 0) sd = std::max(sd, max_norm(x.derivative(t)));
  }
  CHECK(x.norm_X() >= sx);
  CHECK(x.norm_X() >= sd);
}

TEST_CASE("affine initial guess") {
  const auto zero = affine_initial_guess(HistoryFunction::constant(vec({0.0}), 0.5), vec({0.0}), 1.0, 4);
  CHECK(zero.values().isZero(0.0));
  CHECK(zero.slopes().isZero(0.0));

  const auto y = affine_initial_guess(HistoryFunction::constant(vec({1.0}), 0.5), vec({3.0}), 2.0, 8);
  for (double t : {0.0, 0.3, 1.0, 1.7, 2.0}) {
    CHECK(y.value(t)[0] == doctest::Approx(1.0 + t).epsilon(1e-15));
    CHECK(y.derivative(t)[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(y.value(2.0)[0] == 3.0);

  const Vector zeta = vec({0.1, -0.7});
  const auto z = affine_initial_guess(HistoryFunction::constant(vec({0.3, 0.9}), 0.25), zeta, 1.0, 16);
  CHECK(z.value(1.0) == zeta);

  CHECK_THROWS_AS(affine_initial_guess(HistoryFunction::constant(vec({0.0}), 0.3), vec({1.0}), 1.0, 10),
                  std::invalid_argument);
}

TEST_CASE("basis perturbations") {
  const Grid grid(1.0, 8);
  const double r = 0.25;
  const auto basis = basis_perturbations(grid, 2, r);
  CHECK(basis.size() == 2u * ((8 - 1) + (8 + 1)));
  for (const auto& h : basis) {
    for (double th : {-0.25, -0.1, 0.0}) CHECK(h.value(th).isZero(0.0));
    CHECK(h.value(1.0).isZero(0.0));
  }

  const PerturbationBasis b(grid, 2, r);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Dof& d = b.dof(i);
    const auto h = b.element(i);
    for (int j = 0; j <= 8; ++j) {
      for (Eigen::Index k = 0; k < 2; ++k) {
        const bool hit = j == d.node && k == d.coord;
        const double v = h.values()(k, j);
        const double s = h.slopes()(k, j);
        if (d.kind == Dof::Kind::Value) {
          CHECK(v == (hit ? 1.0 : 0.0));
          CHECK(s == 0.0);
        } else {
          CHECK(s == (hit ? 1.0 : 0.0));
          CHECK(v == 0.0);
        }
      }
    }
    CHECK(b.index_of(d.coord, d.node, d.kind) == static_cast<long>(i));
  }
  CHECK(b.index_of(0, 0, Dof::Kind::Value) == -1);
  CHECK(b.index_of(1, 8, Dof::Kind::Value) == -1);
}

TEST_CASE("perturbations keep the admissible set") {
  Random rng(13);
  const double r = 0.5;
  const Grid grid(1.0, 8);
  const auto psi = HistoryFunction::sinusoid(vec({1.0}), vec({0.5}), 2.0, 0.3, r);
  const Vector zeta = vec({-1.0});
  const auto x = affine_initial_guess(psi, zeta, 1.0, 8);
  const auto h = random_perturbation(rng, 1, r, grid);
  const auto y = x.plus(h, 0.37);
  CHECK(y.value(1.0) == zeta);
  for (double th : {-0.5, -0.2, 0.0}) CHECK(y.value(th) == psi(th));
  CHECK_THROWS_AS(Perturbation(grid, r, Eigen::MatrixXd::Ones(1, 9), Eigen::MatrixXd::Zero(1, 9)),
                  std::invalid_argument);
}

TEST_CASE("local shapes reproduce the spline") {
  Random rng(21);
  const Grid grid(1.0, 8);
  const auto x = random_trajectory(rng, 1, 0.25, grid);
  for (double t : {0.0, 0.07, 0.5, 0.93, 1.0}) {
    for (bool deriv : {false, true}) {
      const LocalShapes ls = local_shapes(grid, t, deriv);
      double v = 0.0;
      for (int c = 0; c < 4; ++c) {
        const auto& m = ls.kind[c] == Dof::Kind::Value ? x.values() : x.slopes();
        v += ls.shape[c] * m(0, ls.node[c]);
      }
      CHECK(v == doctest::Approx(deriv ? x.derivative(t)[0] : x.value(t)[0]).epsilon(1e-14));
    }
  }
}

TEST_CASE("sampled histories interpolate their samples") {
  Eigen::MatrixXd samples(1, 5);
  samples << 0.0, 1.0, 4.0, 9.0, 16.0;
  const auto psi = HistoryFunction::sampled(1.0, samples);
  for (int k = 0; k <= 4; ++k) CHECK(psi(-1.0 + 0.25 * k)[0] == doctest::Approx(samples(0, k)).epsilon(1e-15));
  CHECK_THROWS_AS(HistoryFunction::sampled(1.0, Eigen::MatrixXd::Zero(1, 1)), std::invalid_argument);
}
