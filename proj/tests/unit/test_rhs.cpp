#include <doctest.h>

#include "mixedsolve/errors.hpp"
#include "mixedsolve/rhs.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace mixedsolve;

namespace {
const double kPi = std::numbers::pi;

// F0 for f = y(1-y) from the sine expansion of the trace kernel.
double F0_parabola_series(double x) {
  double s = 0.0;
  for (int k = 1; k < 400; k += 2) {
    const double kp = k * kPi;
    s += 8.0 / (kp * kp * kp * kp) * (1.0 - std::exp(-kp * kp * x));
  }
  return s;
}

// F0 for f = 1; sum over odd k of 4/(k pi)^2 is 1/2.
double F0_one_series(double x) {
  double s = 0.5;
  for (int k = 1; k < 2001; k += 2) {
    const double kp = k * kPi;
    s -= 4.0 / (kp * kp) * std::exp(-kp * kp * x);
  }
  return s;
}

GluingParams default_params(double a, double b) {
  return {a, b,
          Field2D([](double x, double t) { return 1.0 + 0.5 * x * t; },
                  [](double, double t) { return 0.5 * t; })};
}
}  // namespace

TEST_CASE("F0 matches the eigenfunction series") {
  ForcingField f([](double, double y) { return y * (1.0 - y); });
  const Grid1D g = Grid1D::uniform(256);
  const auto F0 = compute_F0(f, g);
  CHECK(F0.values[0] == 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(F0.values[i] - F0_parabola_series(g[i])));
  CHECK(err < 1e-9);

  ForcingField fx([](double x, double y) { return x * std::sin(kPi * y); });
  for (double x : {0.1, 0.5, 1.0}) {
    const double expect = kPi * (x / (kPi * kPi) - (1.0 - std::exp(-kPi * kPi * x)) / std::pow(kPi, 4));
    CHECK(F0_at(fx, x) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("F0 is linear in f and vanishes for f = 0") {
  ForcingField f([](double x, double y) { return x * y + y * y; });
  ForcingField h([](double x, double y) { return std::sin(x) * std::cos(y) - std::sin(x); });
  const double a = 2.5, b = -0.7;
  const ForcingField c = f.combine(a, h, b);
  for (double x : {0.2, 0.9}) {
    CHECK(F0_at(c, x) == doctest::Approx(a * F0_at(f, x) + b * F0_at(h, x)).epsilon(1e-13));
  }
  const auto z = compute_F0(ForcingField::zero(), Grid1D::uniform(8));
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("F1 with the characteristic curve and f = 1") {
  ForcingField one([](double, double) { return 1.0; }, Smoothness::L2only, "one");
  const auto curve = CharCurve::degenerate();
  const Grid1D g = Grid1D::uniform(64);
  const auto params = default_params(1.0, 0.0);
  const auto F1 = compute_F1(one, compute_F0(one, g), params, curve);
  CHECK(F1.variant == RhsVariant::F1);
  for (std::size_t i = 8; i < g.size(); i += 8) {
    CHECK(F1.values[i] == doctest::Approx(F0_one_series(g[i]) + g[i] / 2).epsilon(1e-9));
  }
  CHECK_THROWS_AS(compute_F1(one, compute_F0(one, g), default_params(0.0, 1.0), curve), ConfigError);
}

TEST_CASE("F1 memory term against nested adaptive quadrature") {
  ForcingField f([](double x, double y) { return x * x + 0.3 * y * x; });
  const auto curve = CharCurve::linear(0.75);
  const auto params = default_params(2.0, 1.0);
  const Grid1D g = Grid1D::uniform(16);
  const auto F1 = compute_F1(f, compute_F0(f, g), params, curve);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double x = g[12];
  auto S = [&](double t) {
    // lambda(t) = t/2 for this curve
    return GK::integrate([&](double xi) { return f.f1(xi, t); }, t / 2, t, 5, 1e-13);
  };
  const double mem = GK::integrate([&](double t) { return params.Q(x, t) * S(t); }, 0.0, x, 5, 1e-13);
  const double expect = F0_at(f, x) / 2.0 + 2.0 * S(x) + 2.0 * 1.0 / 2.0 * mem;
  CHECK(F1.values[12] == doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("F2 of a purely hyperbolic unit forcing") {
  // f = 1 below the type line only, Q = 1, lambda = 0:
  // g = 2 beta int_0^x t/4 dt = beta x^2 / 4 and sqrt(pi) A^{-1}[x^2] = (8/(3 sqrt(pi))) x^{3/2}
  ForcingField f([](double, double y) { return y < 0.0 ? 1.0 : 0.0; }, Smoothness::L2only, "lower");
  GluingParams p{0.0, 1.0, Field2D([](double, double) { return 1.0; })};
  const Grid1D g = Grid1D::uniform(256);
  const auto F2 = compute_F2(f, p, CharCurve::degenerate(), g);
  CHECK(F2.variant == RhsVariant::F2);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    err = std::max(err, std::abs(F2.values[i] - 2.0 / (3.0 * std::sqrt(kPi)) * std::pow(g[i], 1.5)));
  }
  CHECK(err < 1e-4);
}

TEST_CASE("F dispatch") {
  ForcingField f([](double x, double y) { return x * y; });
  const auto curve = CharCurve::linear(0.75);
  const Grid1D g = Grid1D::uniform(16);
  CHECK(compute_F_dispatch(f, default_params(1.0, 0.0), curve, g).variant == RhsVariant::F1);
  const auto F2 = compute_F_dispatch(f, default_params(0.0, 1.0), curve, g);
  CHECK(F2.variant == RhsVariant::F2);
  CHECK(std::abs(F2.values[0]) < 1e-8);
  CHECK_THROWS_AS(compute_F_dispatch(f, default_params(0.0, 0.0), curve, g), ConfigError);
}

TEST_CASE("origin check for C1 forcing") {
  ForcingField bad([](double, double) { return 1.0; });
  CHECK_THROWS_AS(bad.check_origin(), ConfigError);
  ForcingField l2([](double, double) { return 1.0; }, Smoothness::L2only);
  CHECK_NOTHROW(l2.check_origin());
  CHECK(bad.f1(0.4, 0.2) == doctest::Approx(0.25));
}
