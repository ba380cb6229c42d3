#include <doctest.h>

#include "mixedsolve/errors.hpp"
#include "mixedsolve/integral_engine.hpp"

#include <cmath>
#include <numbers>

using namespace mixedsolve;

namespace {
const double kPi = std::numbers::pi;
}

TEST_CASE("cell weights integrate constants and linears exactly") {
  const double a = 0.3, b = 0.5, x = 0.7;
  auto [wa, wb] = cell_weights_right_singular(a, b, x);
  const double m0 = 2.0 * (std::sqrt(x - a) - std::sqrt(x - b));
  // int_a^b t (x-t)^(-1/2) dt
  auto F = [&](double t) { return -2.0 * x * std::sqrt(x - t) + (2.0 / 3.0) * std::pow(x - t, 1.5); };
  CHECK(wa + wb == doctest::Approx(m0).epsilon(1e-14));
  CHECK(wa * a + wb * b == doctest::Approx(F(b) - F(a)).epsilon(1e-13));

  auto [la, lb] = cell_weights_left_singular(a, b, 0.1);
  CHECK(la + lb == doctest::Approx(2.0 * (std::sqrt(0.4) - std::sqrt(0.2))).epsilon(1e-14));

  // two-sided, whole interval: int_s^x dz / sqrt((x-z)(z-s)) = pi
  auto [ta, tb] = cell_weights_two_sided(0.2, 0.9, 0.2, 0.9);
  CHECK(ta + tb == doctest::Approx(kPi).epsilon(1e-14));
  // int_s^x z / sqrt(...) = pi (s + x) / 2
  CHECK(ta * 0.2 + tb * 0.9 == doctest::Approx(kPi * 0.55).epsilon(1e-13));
}

TEST_CASE("constant kernel Volterra equation reproduces exp(-x)") {
  const Grid1D g = Grid1D::uniform(256);
  const auto K = build_kernel_matrix([](double, double) { return 1.0; }, g,
                                     SingularityClass::Regular);
  std::vector<double> rhs(g.size(), 1.0);
  const auto phi = solve_volterra2(K, rhs);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(phi[i] - std::exp(-g[i])));
  CHECK(err < 1e-5);
}

TEST_CASE("weakly singular second-kind equation matches erfc solution") {
  // phi + int (x-t)^(-1/2) phi = 1  =>  phi = exp(pi x) erfc(sqrt(pi x))
  double prev = 1.0;
  for (int n : {64, 128, 256}) {
    const Grid1D g = Grid1D::uniform(n);
    const auto K = build_kernel_matrix([](double, double) { return 1.0; }, g,
                                       SingularityClass::InverseSqrt);
    std::vector<double> rhs(g.size(), 1.0);
    const auto phi = solve_volterra2(K, rhs);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double ex = std::exp(kPi * g[i]) * std::erfc(std::sqrt(kPi * g[i]));
      err = std::max(err, std::abs(phi[i] - ex));
    }
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("Abel inversion") {
  const Grid1D g = Grid1D::uniform(512);
  std::vector<double> rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = 2.0 * std::sqrt(g[i]);
  auto phi = abel_invert(rhs, g);
  for (double v : phi) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));

  // phi = t: g = (4/3) x^{3/2}
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = (4.0 / 3.0) * std::pow(g[i], 1.5);
  phi = abel_invert(rhs, g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(phi[i] == doctest::Approx(g[i]).epsilon(1e-9));

  rhs[0] = 0.5;
  CHECK_THROWS_AS(abel_invert(rhs, g), DataError);
}

TEST_CASE("forward and inverse Abel are consistent for smooth data") {
  const Grid1D g = Grid1D::uniform(128);
  std::vector<double> phi(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) phi[i] = std::cos(3.0 * g[i]);
  const auto back = abel_invert(forward_abel(phi, g), g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(back[i] - phi[i]) < 5e-4);  // O(h^2) start-up error
}

TEST_CASE("resolvent of the constant kernel") {
  const double c = 1.7;
  const Grid1D g = Grid1D::uniform(256);
  const auto K = build_kernel_matrix([c](double, double) { return c; }, g,
                                     SingularityClass::Regular);
  const auto R = resolvent(K);
  double err = 0.0, err1 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      err = std::max(err, std::abs(R.gamma(K, i, j) + c * std::exp(-c * (g[i] - g[j]))));
      err1 = std::max(err1, std::abs(R.gamma1(i, j) - std::exp(-c * (g[i] - g[j]))));
    }
  CHECK(err < 1e-4);
  CHECK(err1 < 1e-4);
  CHECK(R.terms_used < kMaxNeumannTerms);
}

TEST_CASE("resolvent of the Abel kernel agrees with marching") {
  const Grid1D g = Grid1D::uniform(128);
  const auto K = build_kernel_matrix([](double, double) { return 0.5; }, g,
                                     SingularityClass::InverseSqrt);
  const auto R = resolvent(K);
  std::vector<double> F(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) F[i] = 1.0 + g[i] * g[i];
  const auto a = apply_resolvent(R, K, F);
  const auto b = solve_volterra2(K, F);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(5e-3));
  // Gamma_1(x, 0) is the solution with F = 1
  std::vector<double> one(g.size(), 1.0);
  const auto s = solve_volterra2(K, one);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(R.gamma1(i, 0) == doctest::Approx(s[i]).epsilon(5e-3));
}

TEST_CASE("mixed singular and bounded kernel") {
  // phi + int [r (x-t)^(-1/2) + c(x,t)] phi dt = F with phi = t chosen in advance.
  const double r = 0.8;
  auto c = [](double x, double t) { return 1.0 + x * t; };
  auto errors = [&](int n) {
    const Grid1D g = Grid1D::uniform(n);
    const auto K = build_kernel_matrix([r](double, double) { return r; }, c, g);
    REQUIRE(K.has_regular());
    std::vector<double> F(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g[i];
      F[i] = x + r * (4.0 / 3.0) * std::pow(x, 1.5) + x * x / 2.0 + x * x * x * x / 3.0;
    }
    const auto phi = solve_volterra2(K, F);
    const auto psi = apply_resolvent(resolvent(K), K, F);
    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      e1 = std::max(e1, std::abs(phi[i] - g[i]));
      e2 = std::max(e2, std::abs(psi[i] - g[i]));
    }
    return std::pair{e1, e2};
  };
  const auto [m64, r64] = errors(64);
  const auto [m128, r128] = errors(128);
  CHECK(m128 < 1e-5);
  CHECK(m128 / m64 < 0.3);
  // resolvent iterates carry sqrt(x - t) near the diagonal: h^1.5
  CHECK(r128 < 1e-3);
  CHECK(r128 / r64 < 0.4);
}

TEST_CASE("unbounded cofactor is reported") {
  const Grid1D g = Grid1D::uniform(16);
  CHECK_THROWS_AS(build_kernel_matrix([](double x, double t) { return 1.0 / (x - t); }, g,
                                      SingularityClass::InverseSqrt),
                  SingularityError);
}

TEST_CASE("grid helpers") {
  const Grid1D g = Grid1D::uniform(4);
  CHECK(g.size() == 5);
  CHECK(g.cell_of(1.0) == 3);
  CHECK(g.cell_of(0.3) == 1);
  std::vector<double> v{0, 1, 2, 3, 4};
  CHECK(interpolate_linear(v, g, 0.375) == doctest::Approx(1.5));
  const auto c = cumulative_trapezoid(v, g);
  CHECK(c.back() == doctest::Approx(2.0));
  CHECK_THROWS_AS(Grid1D::uniform(0), ConfigError);
}
