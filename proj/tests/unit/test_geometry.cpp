#include <doctest.h>

#include "mixedsolve/errors.hpp"
#include "mixedsolve/geometry.hpp"

#include <cmath>

using namespace mixedsolve;

TEST_CASE("characteristic coordinates round-trip") {
  const auto c = to_characteristic(0.3, -0.1);
  CHECK(c.xi == doctest::Approx(0.2));
  CHECK(c.eta == doctest::Approx(0.4));
  const auto p = from_characteristic(c.xi, c.eta);
  CHECK(p.x == doctest::Approx(0.3));
  CHECK(p.y == doctest::Approx(-0.1));
}

TEST_CASE("lambda for the linear curve") {
  const auto curve = CharCurve::linear(0.75);
  // x + x/3 = eta  =>  x = 3 eta / 4, lambda = x - x/3 = eta / 2
  for (double eta : {0.0, 0.1, 0.5, 0.8, 1.0}) {
    CHECK(lambda_of_eta(curve, eta) == doctest::Approx(eta / 2).epsilon(1e-13));
  }
  CHECK(lambda_of_eta(curve, 0.8) == doctest::Approx(0.4));
  CHECK_THROWS_AS(lambda_of_eta(curve, 1.2), DomainError);
  CHECK(curve.lambda_table().size() == static_cast<std::size_t>(lambda_table_size));
}

TEST_CASE("lambda for a power curve solves x + gamma(x) = eta") {
  const auto curve = CharCurve::power(0.7, 2.0);
  for (double eta : {0.05, 0.3, 0.9}) {
    const double lam = lambda_of_eta(curve, eta);
    const double x = 0.5 * (eta + lam);  // x* = (eta + lambda)/2
    CHECK(x + curve.gamma(x) == doctest::Approx(eta).epsilon(1e-12));
  }
  CHECK(validate_curve(curve).ok());
}

TEST_CASE("point classification") {
  const auto curve = CharCurve::linear(0.75);
  CHECK(classify_point(curve, 0.5, 0.5) == RegionTag::Parabolic);
  CHECK(classify_point(curve, 0.5, 0.0) == RegionTag::TypeLine);
  CHECK(classify_point(curve, 0.6, -0.2) == RegionTag::Hyperbolic);
  CHECK(classify_point(curve, 0.5, -0.1) == RegionTag::Hyperbolic);
  CHECK(classify_point(curve, 0.1, -0.2) == RegionTag::Outside);
  CHECK(classify_point(curve, 0.9, -0.2) == RegionTag::Outside);
  CHECK(classify_point(curve, 1.5, 0.5) == RegionTag::Outside);
}

TEST_CASE("curve validation") {
  CHECK(validate_curve(CharCurve::linear(0.75)).ok());
  CHECK(validate_curve(CharCurve::degenerate()).ok());
  CHECK_THROWS_AS(CharCurve::linear(0.4), ConfigError);
  CHECK_THROWS_AS(CharCurve::power(0.75, 0.5), ConfigError);

  // table gamma = x/3 on [0, 0.75]
  std::vector<double> xs, gs;
  for (int k = 0; k <= 6; ++k) {
    xs.push_back(0.125 * k);
    gs.push_back(0.125 * k / 3.0);
  }
  const auto tab = CharCurve::table(xs, gs);
  CHECK(validate_curve(tab).ok());
  CHECK(lambda_of_eta(tab, 0.6) == doctest::Approx(0.3).epsilon(1e-10));

  // x + gamma not monotone
  const auto bad = check_sum_monotone({0.0, 0.2, 0.4}, {0.0, 0.3, 0.05});
  CHECK_FALSE(bad.passed);
  CHECK(bad.defect == doctest::Approx(0.05));

  // l + gamma(l) != 1
  std::vector<double> g2 = gs;
  g2.back() = 0.3;
  CHECK_FALSE(validate_curve(CharCurve::table(xs, g2)).ok());
}
