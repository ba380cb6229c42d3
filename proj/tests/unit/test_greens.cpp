#include <doctest.h>

#include "mixedsolve/errors.hpp"
#include "mixedsolve/greens.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>

using namespace mixedsolve;

namespace {
const double kPi = std::numbers::pi;

// Eigenfunction expansion of the strip Green's function, independent of the
// image series.
double green_modal(double x, double y, double y1) {
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) {
    s += 2.0 * std::exp(-k * k * kPi * kPi * x) * std::sin(k * kPi * y) * std::sin(k * kPi * y1);
  }
  return s;
}
}  // namespace

TEST_CASE("image series agrees with eigenfunction expansion") {
  for (double x : {0.05, 0.3, 1.0}) {
    CHECK(green_G(x, 0.3, 0.6) == doctest::Approx(green_modal(x, 0.3, 0.6)).epsilon(1e-10));
  }
  // dG/dy at y = 0 by the modal series
  const double x = 0.2, y1 = 0.4;
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) s += 2.0 * k * kPi * std::exp(-k * k * kPi * kPi * x) * std::sin(k * kPi * y1);
  CHECK(green_Gy_trace(x, y1) == doctest::Approx(s).epsilon(1e-10));
  CHECK(green_Gy1_trace(x, y1) == doctest::Approx(s).epsilon(1e-10));
  CHECK_THROWS_AS(green_G(0.0, 0.3, 0.4), DomainError);
}

TEST_CASE("trace kernel integrates to one at small y") {
  // int_0^1 dG/dy1(s, y)|_{y1=0} ds -> 1 as y -> 0+
  const double y = 1e-3;
  boost::math::quadrature::tanh_sinh<double> ts;
  const double val = ts.integrate([&](double s) { return s <= 0 ? 0.0 : green_Gy1_trace(s, y); }, 0.0, 1.0);
  CHECK(val == doctest::Approx(green_trace_integral(1.0, y)).epsilon(1e-8));
  CHECK(std::abs(val - 1.0) < 2e-3);
}

TEST_CASE("closed-form trace moments agree with quadrature") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (double y : {0.1, 0.5, 0.9}) {
    for (double t : {0.01, 0.2, 0.8}) {
      const double i0 = GK::integrate([&](double s) { return s <= 0 ? 0.0 : green_Gy1_trace(s, y); }, 0.0, t, 15, 1e-13);
      const double i1 = GK::integrate([&](double s) { return s <= 0 ? 0.0 : s * green_Gy1_trace(s, y); }, 0.0, t, 15, 1e-13);
      CHECK(green_trace_integral(t, y) == doctest::Approx(i0).epsilon(1e-9));
      CHECK(green_trace_moment1(t, y) == doctest::Approx(i1).epsilon(1e-9));
    }
  }
}

TEST_CASE("kernel k and its regular part") {
  // k(x) = (1/sqrt(pi x)) (1 + 2 sum e^{-n^2/x})
  const double x = 0.7;
  double s = 1.0;
  for (int n = 1; n < 30; ++n) s += 2.0 * std::exp(-n * n / x);
  CHECK(kernel_k(x) == doctest::Approx(s / std::sqrt(kPi * x)).epsilon(1e-13));
  CHECK(kernel_k(x) - kernel_ktilde(x) == doctest::Approx(1.0 / std::sqrt(kPi * x)));
  const double h = 1e-5;
  CHECK(kernel_ktilde_prime(x) ==
        doctest::Approx((kernel_ktilde(x + h) - kernel_ktilde(x - h)) / (2 * h)).epsilon(1e-7));
  CHECK(kernel_ktilde(1e-3) < 1e-100);
}

TEST_CASE("k1 cofactor is continuous at the diagonal") {
  GluingParams p{2.0, 1.0, Field2D([](double x, double t) { return 1.0 + 0.5 * x * t; })};
  CHECK(kernel_k1_cofactor(0.5, 0.5, p) == doctest::Approx(0.5 / std::sqrt(kPi)));
  CHECK(kernel_k1_cofactor(0.5, 0.5 - 1e-9, p) == doctest::Approx(0.5 / std::sqrt(kPi)).epsilon(1e-4));
  const double x = 0.8, t = 0.3;
  CHECK(kernel_k1(x, t, p) * std::sqrt(x - t) == doctest::Approx(kernel_k1_cofactor(x, t, p)));
  GluingParams z{0.0, 1.0, p.Q};
  CHECK_THROWS_AS(kernel_k1(x, t, z), ConfigError);
}

TEST_CASE("K0 reproduces the Abel inversion of the first-kind kernel") {
  // K0(x,z) = (1/sqrt pi)[ beta Q(z,z)/sqrt(x-z) + int_z^x (x-t)^{-1/2} d/dt m(t,z) dt ]
  // with m(t,z) = ktilde(t-z) + beta Q(t,z). Oracle: tanh-sinh on the singular integral.
  GluingParams p{0.0, 1.0,
                 Field2D([](double x, double t) { return 1.0 + 0.5 * x * t; },
                         [](double, double t) { return 0.5 * t; })};
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  for (auto [x, z] : {std::pair{0.9, 0.1}, std::pair{0.5, 0.45}, std::pair{1.0, 0.0}}) {
    auto v = [&](double t) {
      const double d = t - z;
      return 0.5 * z + (d > 0 ? kernel_ktilde_prime(d) : 0.0);
    };
    // subtract the endpoint value to leave an integrable (x-t)^{1/2}-type integrand
    const double vx = v(x);
    const double tail =
        GK::integrate([&](double t) { return t >= x ? 0.0 : (v(t) - vx) / std::sqrt(x - t); },
                      z, x, 20, 1e-14) +
        2.0 * vx * std::sqrt(x - z);
    const double expect = (p.Q(z, z) / std::sqrt(x - z) + tail) / std::sqrt(kPi);
    CHECK(kernel_K0(x, z, p) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("gluing parameter validation") {
  GluingParams p{0.0, 0.0, Field2D()};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  GluingParams q{0.0, 1.0, Field2D()};
  CHECK_NOTHROW(q.validate());
}
