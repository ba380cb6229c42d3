#include <doctest.h>

#include "mixedsolve/potentials.hpp"

#include <cmath>
#include <numbers>

using namespace mixedsolve;

namespace {
const double kPi = std::numbers::pi;

// Heat solutions on the strip with u(x,0) = x^m, u(x,1) = 0, u(0,y) = 0,
// split into a polynomial part and a fast-decaying sine series.
double trace_power_exact(double x, double y, int m) {
  const double phi = y * y * y / 6 - y * y / 2 + y / 3;
  if (m == 1) {
    double s = x * (1 - y) - phi;
    for (int k = 1; k < 200; ++k) {
      const double kp = k * kPi;
      s += 2.0 / (kp * kp * kp) * std::exp(-kp * kp * x) * std::sin(kp * y);
    }
    return s;
  }
  const double psi = -(std::pow(y, 5) / 60 - std::pow(y, 4) / 12 + y * y * y / 9) + 2.0 * y / 45;
  double s = x * x * (1 - y) - 2 * x * phi + psi;
  for (int k = 1; k < 200; ++k) {
    const double kp = k * kPi;
    s -= 4.0 / std::pow(kp, 5) * std::exp(-kp * kp * x) * std::sin(kp * y);
  }
  return s;
}
}  // namespace

TEST_CASE("volume potential against the separable solution") {
  ForcingField f([](double, double y) { return std::sin(kPi * y); }, Smoothness::C1, "sin");
  for (double x : {0.05, 0.4, 1.0}) {
    for (double y : {0.01, 0.3, 0.77, 0.999}) {
      const double expect = (1.0 - std::exp(-kPi * kPi * x)) * std::sin(kPi * y) / (kPi * kPi);
      CHECK(volume_potential(f, x, y) == doctest::Approx(expect).epsilon(1e-10));
    }
    CHECK(std::abs(volume_potential(f, x, 0.0)) < 1e-15);
    CHECK(std::abs(volume_potential(f, x, 1.0)) < 1e-15);
  }
}

TEST_CASE("volume potential with x-dependence") {
  // f = x sin(2 pi y): u = sin(2 pi y) (x/c - (1 - e^{-c x})/c^2), c = 4 pi^2
  ForcingField f([](double x, double y) { return x * std::sin(2 * kPi * y); });
  const double c = 4 * kPi * kPi;
  for (double x : {0.3, 0.9}) {
    const double y = 0.2;
    const double expect = std::sin(2 * kPi * y) * (x / c - (1.0 - std::exp(-c * x)) / (c * c));
    CHECK(volume_potential(f, x, y) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("trace potentials reproduce polynomial data") {
  const Grid1D g = Grid1D::uniform(32);
  std::vector<double> tau_prime(g.size()), tau(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    tau_prime[i] = 2.0 * g[i];
    tau[i] = g[i];
  }
  for (double x : {0.25, 0.6875, 1.0}) {
    for (double y : {0.05, 0.5}) {
      CHECK(trace_potential(tau_prime, g, x, y) ==
            doctest::Approx(trace_power_exact(x, y, 2)).epsilon(1e-9));
      CHECK(trace_potential_linear(tau, g, x, y) ==
            doctest::Approx(trace_power_exact(x, y, 1)).epsilon(1e-9));
    }
  }
  // y -> 0+ recovers tau
  CHECK(trace_potential(tau_prime, g, 0.5, 1e-4) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(integrate_linear(tau_prime, g, 0.3) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("hyperbolic source term for unit forcing") {
  ForcingField one([](double, double) { return 1.0; }, Smoothness::L2only);
  const auto curve = CharCurve::linear(0.75);  // lambda = eta / 2
  for (auto [xi, eta] : {std::pair{0.3, 0.5}, std::pair{0.45, 0.9}, std::pair{0.5, 1.0}}) {
    const double expect = (xi * (eta - xi) - (eta * eta - xi * xi) / 4.0) / 4.0;
    CHECK(hyperbolic_source_term(one, curve, xi, eta) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(hyperbolic_source_term(one, curve, 0.4, 0.4) == 0.0);
}
