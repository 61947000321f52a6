#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "delayvar/identity.hpp"
#include "delayvar/problem.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace delayvar;
using testing::cov;
using testing::scalar;
using testing::scalar_segment;
using testing::vec;

namespace {

std::vector<SegmentFunction> scalar_directions(double r) {
  return {scalar_segment(r, [](double) { return 1.0; }), scalar_segment(r, [](double th) { return th; }),
          scalar_segment(r, [](double th) { return std::cos(3.0 * th); })};
}

CustomLagrangian bilinear_head(double r) {
  // F = phi(0) v
  return CustomLagrangian(
      1, r, 1.0, [](double, const SegmentFunction& phi, const Vector& v) { return phi(0.0)[0] * v[0]; },
      [r](double, const SegmentFunction&, const Vector& v) { return CovectorMeasure(1, r, {{0.0, Covector(v)}}); },
      [](double, const SegmentFunction& phi, const Vector&) { return Covector(phi(0.0)); }, {0.0});
}

CustomLagrangian bilinear_tail(double r) {
  // F = phi(-r) v
  return CustomLagrangian(
      1, r, 1.0, [r](double, const SegmentFunction& phi, const Vector& v) { return phi(-r)[0] * v[0]; },
      [r](double, const SegmentFunction&, const Vector& v) { return CovectorMeasure(1, r, {{-r, Covector(v)}}); },
      [r](double, const SegmentFunction& phi, const Vector&) { return Covector(phi(-r)); }, {-r});
}

}  // namespace

TEST_CASE("validate_d2 examples") {
  const double r = 0.5;
  const auto phi = scalar_segment(r, [](double th) { return 1.0 + th * th; });
  const auto dirs = scalar_directions(r);
  CHECK(validate_d2(bilinear_head(r), 0.3, phi, scalar(2.0), dirs) <= 1e-10);

  const CustomLagrangian speed(
      1, r, 1.0, [](double, const SegmentFunction&, const Vector& v) { return 0.5 * v.squaredNorm(); },
      [r](double, const SegmentFunction&, const Vector&) { return CovectorMeasure(1, r); },
      [](double, const SegmentFunction&, const Vector& v) { return Covector(v); }, {});
  CHECK(pair(speed.d2(0.0, phi, scalar(1.0)), dirs[2]) == 0.0);
  CHECK(validate_d2(speed, 0.0, phi, scalar(1.0), dirs) == 0.0);

  CoreFunctions square;
  square.L = [](double, const Vector&, const Vector& w, const Vector&) { return w.squaredNorm(); };
  square.dLda = [](double, const Vector& a, const Vector&, const Vector&) { return Vector::Zero(a.size()).eval(); };
  square.dLdb = [](double, const Vector&, const Vector& w, const Vector&) { return (2.0 * w).eval(); };
  square.dLdv = [](double, const Vector&, const Vector&, const Vector& v) { return Vector::Zero(v.size()).eval(); };
  const DistributedDelayLagrangian dist(1, 1.0, 2.0, square, [](double) { return 1.0; }, 8);
  const auto ones = SegmentFunction::constant(vec({1.0}), 1.0);
  CHECK(dist.moment(ones)[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pair(dist.d2(0.0, ones, scalar(0.0)), ones) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(validate_d2(dist, 0.0, ones, scalar(0.0), scalar_directions(1.0)) <= 1e-9);
}

TEST_CASE("validate_d3 examples") {
  const double r = 0.5;
  const auto phi = scalar_segment(r, [](double th) { return 2.0 - th; });
  const auto speed = make_builtin("classical_quadratic", 2, r, 1.0, QuadraticCoefficients{});
  const auto phi2 = SegmentFunction::constant(vec({0.1, 0.2}), r);
  CHECK(validate_d3(*speed, 0.1, phi2, vec({1.3, -0.4})) <= 1e-9);
  CHECK(speed->d3(0.1, phi2, vec({1.3, -0.4})) == cov({1.3, -0.4}));

  const CustomLagrangian no_v(
      1, r, 1.0, [](double, const SegmentFunction& p, const Vector&) { return p(0.0)[0]; },
      [r](double, const SegmentFunction&, const Vector&) { return CovectorMeasure(1, r, {{0.0, cov({1.0})}}); },
      [](double, const SegmentFunction&, const Vector&) { return Covector(1); }, {0.0});
  CHECK(no_v.d3(0.0, phi, scalar(5.0)).dual_norm() == 0.0);
  CHECK(validate_d3(no_v, 0.0, phi, scalar(5.0)) == 0.0);

  const auto tail = bilinear_tail(r);
  CHECK(tail.d3(0.0, phi, scalar(3.0))[0] == 2.5);
  CHECK(validate_d3(tail, 0.0, phi, scalar(3.0)) <= 1e-10);
  CHECK(validate_d2(tail, 0.0, phi, scalar(3.0), scalar_directions(r)) <= 1e-8);
}

TEST_CASE("point delay pairing is exact on atoms") {
  QuadraticCoefficients c;
  c.ka = 0.7;
  c.kb = 1.3;
  c.cab = -0.4;
  c.cbv = 0.25;
  c.quartic = 0.5;
  c.forcing = 0.2;
  const double r = 0.5;
  const auto p = make_builtin("point_delay_quadratic", 2, r, 1.0, c);
  Random rng(17);
  for (int i = 0; i < 20; ++i) {
    const auto phi = random_piecewise_linear(rng, 2, r, 4).f;
    const auto dphi = random_piecewise_linear(rng, 2, r, 3).f;
    const Vector v = Vector::Random(2);
    const double t = rng.uniform(0.0, 1.0);
    const Vector a = phi(0.0);
    const Vector b = phi(-r);
    const Vector dLda = c.ka * a + c.cab * b + Vector::Constant(2, c.forcing * std::sin(2.0 * M_PI * t));
    const Vector dLdb = c.kb * b + c.cab * a + c.cbv * v + c.quartic * b.array().cube().matrix();
    const double expected = dLda.dot(dphi(0.0)) + dLdb.dot(dphi(-r));
    CHECK(pair(p->d2(t, phi, v), dphi) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(p->d3(t, phi, v).components().isApprox(c.kv * v + c.cbv * b, 1e-14));
  }
}

TEST_CASE("distributed kernel pairing converges at fourth order in the kernel grid") {
  // L = w^2/2, k(theta) = 1 + 2 theta, dphi = exp(theta): int k e^theta over [-1, 0] = 3/e - 1
  QuadraticCoefficients c;
  c.kv = 0.0;
  c.kb = 1.0;
  c.k0 = 1.0;
  c.k1 = 2.0;
  const double r = 1.0;
  const auto phi = scalar_segment(r, [](double) { return 1.0; });
  const auto dphi = scalar_segment(r, [](double th) { return std::exp(th); });
  double prev = 0.0;
  for (int M : {2, 4, 8, 16}) {
    c.kernel_intervals = M;
    const auto p = make_builtin("distributed_delay_quadratic", 1, r, 2.0, c);
    const double w = 0.0;  // int k * 1 = 1 - 1 = 0 for this kernel
    CHECK(std::abs(dynamic_cast<const DistributedDelayLagrangian&>(*p).moment(phi)[0] - w) < 1e-15);
    const auto phi2 = scalar_segment(r, [](double th) { return th; });
    const double w2 = dynamic_cast<const DistributedDelayLagrangian&>(*p).moment(phi2)[0];
    const double exact = w2 * (3.0 / std::exp(1.0) - 1.0);
    const double err = std::abs(pair(p->d2(0.0, phi2, scalar(0.0)), dphi) - exact);
    if (M > 2 && prev > 1e-13) CHECK(err <= prev / 12.0);
    prev = err;
  }
  CHECK(prev < 1e-8);
}

TEST_CASE("central differences shrink at second order") {
  QuadraticCoefficients c;
  c.kb = 0.5;
  c.quartic = 1.0;
  c.cbv = 0.3;
  const double r = 0.5;
  const auto p = make_builtin("point_delay_quadratic", 1, r, 1.0, c);
  const auto phi = scalar_segment(r, [](double th) { return 1.2 + th; });
  const std::vector<SegmentFunction> dirs{scalar_segment(r, [](double th) { return 1.0 - th; })};
  const double e1 = validate_d2(*p, 0.2, phi, scalar(0.4), dirs, 1e-1);
  const double e2 = validate_d2(*p, 0.2, phi, scalar(0.4), dirs, 1e-2);
  const double e3 = validate_d2(*p, 0.2, phi, scalar(0.4), dirs, 1e-3);
  CHECK(e1 / e2 == doctest::Approx(100.0).epsilon(0.05));
  CHECK(e2 / e3 == doctest::Approx(100.0).epsilon(0.05));
}

TEST_CASE("built-in families and coefficients") {
  const auto names = builtin_names();
  CHECK(names == std::vector<std::string>{"classical_quadratic", "point_delay_quadratic", "distributed_delay_quadratic"});
  CHECK_THROWS_AS(make_builtin("no_such_problem", 1, 0.5, 1.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(coefficients_from_map("classical_quadratic", {{"kb", 1.0}}), std::invalid_argument);
  const auto c = coefficients_from_map("distributed_delay_quadratic", {{"k1", 2.0}, {"kernel_intervals", 16}});
  CHECK(c.k1 == 2.0);
  CHECK(c.kernel_intervals == 16);
  CHECK_THROWS_AS(coefficients_from_map("distributed_delay_quadratic", {{"kernel_intervals", 2.5}}),
                  std::invalid_argument);

  Random rng(23);
  for (const auto& name : names) {
    QuadraticCoefficients k;
    k.ka = 0.3;
    k.kb = 0.8;
    k.cab = 0.2;
    k.cbv = -0.1;
    k.quartic = 0.4;
    k.forcing = 0.5;
    k.k1 = 1.5;
    const auto p = make_builtin(name, 2, 0.5, 1.0, k);
    CHECK(p->name() == name);
    for (int i = 0; i < 10; ++i) {
      const auto phi = random_piecewise_linear(rng, 2, 0.5, 3).f;
      std::vector<SegmentFunction> dirs{random_piecewise_linear(rng, 2, 0.5, 2).f};
      const Vector v = Vector::Random(2);
      const double t = rng.uniform(0.0, 1.0);
      CHECK(validate_d2(*p, t, phi, v, dirs) <= 1e-8);
      CHECK(validate_d3(*p, t, phi, v) <= 1e-8);
    }
  }
}

TEST_CASE("relative error floor") {
  CHECK(relative_error(1.0, 1.0) == 0.0);
  CHECK(relative_error(2.0, 1.0) == 0.5);
  CHECK(relative_error(1e-12, 0.0) == doctest::Approx(1e-4));
}
