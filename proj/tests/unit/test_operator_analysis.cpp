#include <doctest.h>

#include "mixedsolve/errors.hpp"
#include "mixedsolve/library.hpp"
#include "mixedsolve/operator_analysis.hpp"

#include <cmath>
#include <numbers>

using namespace mixedsolve;

namespace {
const double kPi = std::numbers::pi;

// m x m cell centres of the unit square, all parabolic
std::vector<SamplePoint> square_points(int m) {
  const double h = 1.0 / m;
  std::vector<SamplePoint> p;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) p.push_back({(i + 0.5) * h, (j + 0.5) * h, h * h, false, i});
  return p;
}

double abel(double x, double, double x1, double) { return x > x1 ? 1.0 / std::sqrt(x - x1) : 0.0; }
}  // namespace

TEST_CASE("zero kernel iterates to zero") {
  auto st = sample_kernel(square_points(8), 1.0 / 8,
                          [](double, double, double, double) { return 0.0; });
  iterate_kernels(st, 4);
  REQUIRE(st.K.size() == 4);
  double worst = 0.0;
  for (const auto& k : st.K)
    for (double v : k) worst = std::max(worst, std::abs(v));
  CHECK(worst == 0.0);
  CHECK(check_iterated_bound(st).passed());
}

TEST_CASE("Abel kernel iterates to beta integrals") {
  // K_2 = B(1/2, 1/2) = pi, K_3 = 2 pi sqrt(d)
  double prev = 1.0;
  for (int m : {16, 32}) {
    auto st = sample_kernel(square_points(m), 1.0 / m, abel);
    CHECK(st.M == doctest::Approx(1.0).epsilon(1e-12));
    iterate_kernels(st, 3);
    const std::size_t a = static_cast<std::size_t>(0.9 * m) * m;
    const std::size_t b = static_cast<std::size_t>(0.1 * m) * m;
    const double d = st.points[a].x - st.points[b].x;
    const double e2 = std::abs(st.at(2, a, b) - kPi);
    const double e3 = std::abs(st.at(3, a, b) / (2.0 * kPi * std::sqrt(d)) - 1.0);
    CHECK(e2 < 0.15);
    CHECK(e3 < 0.12);
    CHECK(e2 < prev);
    prev = e2;
    const IteratedBoundReport rep = check_iterated_bound(st);
    CHECK(rep.passed());
    // anti-causal entries stay zero
    CHECK(st.at(3, b, a) == 0.0);
  }
}

TEST_CASE("bound curve values") {
  CHECK(bound_curve(1.0, 40) == doctest::Approx(0.03986).epsilon(1e-3));
  CHECK(bound_curve(1.0, 56) > 1e-6);
  CHECK(bound_curve(1.0, 57) < 1e-6);
  CHECK(bound_curve(0.0, 3) == 0.0);
  // iterated kernel bound at n = 2 is independent of d
  CHECK(iterated_kernel_bound(1.0, 2, 0.1) == doctest::Approx(iterated_kernel_bound(1.0, 2, 0.7)));
  CHECK(iterated_kernel_bound(1.0, 2, 0.5) == doctest::Approx(1.5 * kPi));
}

TEST_CASE("leading block norm matches the sine series") {
  const double exact = leading_block_norm2_exact();
  CHECK(exact == doctest::Approx(0.0805555556).epsilon(1e-8));
  CHECK(leading_block_norm2() == doctest::Approx(exact).epsilon(1e-6));
  CHECK(exact < 1.0 / std::sqrt(kPi));
}

TEST_CASE("iterated closed kernel obeys the bound") {
  const ClosedKernel K(default_spec(1.0, 0.0, forcing_by_name("mixed_trig"), 64));
  IteratedKernelStack st = sample_closed_kernel(K, 8);
  CHECK(st.M > 0.0);
  CHECK(st.M >= st.M_coarse);
  iterate_kernels(st, 5);
  const IteratedBoundReport rep = check_iterated_bound(st);
  CHECK(rep.passed());
  CHECK(rep.rows[0].min_slack == doctest::Approx(1.0));
  const NormReport nr = quasinilpotency_trend(st);
  REQUIRE(nr.roots.size() == 5);
  CHECK(nr.eventually_decreasing());
  CHECK(nr.below_bound());
}

TEST_CASE("spectral solve") {
  const ProblemSpec spec = default_spec(1.0, 0.0, forcing_by_name("mixed_trig"), 64);
  const ClosedKernel K(spec);
  const SpectralOperator op(K, 8);
  REQUIRE(op.points().size() == 128);

  SUBCASE("lambda = 0 reproduces the direct pipeline") {
    const SpectralResult r = solve_spectral(op, 0.0, spec.forcing);
    CHECK(r.method == SpectralMethod::Neumann);
    CHECK(r.residual < 0.06);
  }
  SUBCASE("Neumann and dense agree") {
    for (double lam : {1.0, -1.0, 10.0}) {
      SpectralOptions o;
      o.compute_residual = false;
      o.method = SpectralMethod::Neumann;
      const SpectralResult a = solve_spectral(op, lam, spec.forcing, o);
      o.method = SpectralMethod::DenseSolve;
      const SpectralResult b = solve_spectral(op, lam, spec.forcing, o);
      CHECK(a.neumann_converged);
      double d = 0.0, s = 0.0;
      for (std::size_t i = 0; i < a.u.size(); ++i) {
        d = std::max(d, std::abs(a.u[i] - b.u[i]));
        s = std::max(s, std::abs(b.u[i]));
      }
      CHECK(d <= 1e-8 * s);
    }
  }
  SUBCASE("iteration budget") {
    SpectralOptions o;
    o.method = SpectralMethod::Neumann;
    o.max_iterations = 3;
    o.compute_residual = false;
    CHECK_THROWS_AS(solve_spectral(op, 10.0, spec.forcing, o), IterationBudgetError);
    o.method = SpectralMethod::Auto;
    const SpectralResult r = solve_spectral(op, 10.0, spec.forcing, o);
    CHECK(r.method == SpectralMethod::DenseSolve);
    CHECK(r.algebraic_residual < 1e-12);
  }
  SUBCASE("complex lambda") {
    const SpectralResult r = solve_spectral(op, {0.0, 10.0}, spec.forcing);
    CHECK(r.algebraic_residual < 1e-8);
    CHECK(r.residual < 0.06);
  }
}
