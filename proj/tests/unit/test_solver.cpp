#include <doctest.h>

#include "mixedsolve/errors.hpp"
#include "mixedsolve/library.hpp"
#include "mixedsolve/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace mixedsolve;

namespace {
const double kPi = std::numbers::pi;

ForcingField smooth_f() { return forcing_by_name("mixed_trig"); }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}
}  // namespace

TEST_CASE("zero forcing gives zero traces and field") {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {2.0, 1.0}, {0.0, 1.0}}) {
    ProblemSpec spec = default_spec(a, b, ForcingField::zero(), 64);
    spec.nx = spec.ny = 8;
    const DirectSolution sol = solve_direct(spec);
    CHECK(max_abs(sol.traces.tau) == 0.0);
    CHECK(max_abs(sol.traces.nu0) == 0.0);
    CHECK(max_abs(sol.traces.nu1) == 0.0);
    CHECK(sol.field.max_abs() <= 1e-14);
  }
}

TEST_CASE("problem validation") {
  ProblemSpec spec = default_spec(0.0, 0.0, smooth_f(), 32);
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = default_spec(1.0, 0.0, ForcingField([](double, double) { return 1.0; }), 32);
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("trace invariants") {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {2.0, 1.0}, {0.0, 1.0}}) {
    const ProblemSpec spec = default_spec(a, b, smooth_f(), 128);
    const TraceFunctions tr = solve_trace(spec);
    CHECK(tr.tau[0] == 0.0);
    const auto run = cumulative_trapezoid(tr.tau_prime, tr.grid);
    for (std::size_t i = 0; i < tr.tau.size(); ++i) CHECK(std::abs(run[i] - tr.tau[i]) < 1e-3);
    CHECK(tr.gluing_residual < 1e-4);
  }
}

TEST_CASE("alpha enters the trace equation") {
  // alpha = 2 against alpha = 1 with the forcing doubled
  const TraceFunctions t1 = solve_trace(default_spec(1.0, 0.0, smooth_f(), 128));
  const ForcingField f2 = smooth_f().combine(2.0, ForcingField::zero(), 0.0);
  const TraceFunctions t2 = solve_trace(default_spec(2.0, 0.0, f2, 128));
  double diff = 0.0;
  for (std::size_t i = 0; i < t1.tau.size(); ++i)
    diff = std::max(diff, std::abs(t1.tau[i] - t2.tau[i]));
  CHECK(diff > 1e-3);
  // regression value extrapolated from n = 128 and 256 runs
  CHECK(t1.tau.back() == doctest::Approx(0.2270336).epsilon(2e-5));
}

TEST_CASE("hyperbolic reconstruction agrees with the Cauchy form") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto& lib = forcing_library();
  ForcingField f = lib[0];
  for (std::size_t k = 1; k < lib.size(); ++k) f = f.combine(1.0, lib[k], coef(rng));
  const ProblemSpec spec = default_spec(1.0, 0.0, f, 256);
  const TraceFunctions tr = solve_trace(spec);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 40; ++k) {
    const double eta = unit(rng);
    const double lam = lambda_of_eta(spec.curve, eta);
    const double xi = lam + unit(rng) * (eta - lam);
    worst = std::max(worst, std::abs(hyperbolic_value(spec, tr, xi, eta) -
                                     hyperbolic_value_cauchy(spec, tr, xi, eta)));
  }
  CHECK(worst <= 1e-6);
  // on AB the double integral is empty
  for (double x : {0.1, 0.5, 0.9})
    CHECK(hyperbolic_value(spec, tr, x, x) == doctest::Approx(integrate_linear(tr.tau_prime, tr.grid, x)));
}

TEST_CASE("parabolic reconstruction with zero trace") {
  ProblemSpec spec = default_spec(1.0, 0.0,
                                  ForcingField([](double, double y) { return std::sin(kPi * y); }),
                                  64);
  TraceFunctions tr;
  tr.grid = spec.grid;
  tr.tau.assign(spec.grid.size(), 0.0);
  tr.tau_prime.assign(spec.grid.size(), 0.0);
  for (double x : {0.1, 0.5, 1.0})
    for (double y : {0.2, 0.5, 0.8}) {
      const double u = (1.0 - std::exp(-kPi * kPi * x)) * std::sin(kPi * y) / (kPi * kPi);
      CHECK(std::abs(parabolic_value(spec, tr, x, y) - u) < 1e-4);
    }
}

TEST_CASE("parabolic limit at the type line is tau") {
  const ProblemSpec spec = default_spec(1.0, 0.0, smooth_f(), 128);
  const TraceFunctions tr = solve_trace(spec);
  for (double x : {0.25, 0.5, 0.75}) {
    const double tau = integrate_linear(tr.tau_prime, tr.grid, x);
    CHECK(std::abs(parabolic_value(spec, tr, x, 1e-6) - tau) < spec.grid.h());
  }
}

TEST_CASE("points outside the domain are rejected") {
  const ProblemSpec spec = default_spec(1.0, 0.0, smooth_f(), 32);
  const TraceFunctions tr = solve_trace(spec);
  CHECK_THROWS_AS(evaluate_direct(spec, tr, 0.9, -0.2), GeometryError);
  CHECK_THROWS_AS(evaluate_direct(spec, tr, 0.5, 1.5), GeometryError);
}

TEST_CASE("closed kernel block structure") {
  const ClosedKernel K(default_spec(1.0, 0.0, smooth_f(), 64));
  // theta(x - x1) kills the parabolic-parabolic block
  CHECK(K(0.3, 0.5, 0.6, 0.4) == 0.0);
  CHECK(K(0.3, 0.5, 0.3001, 0.5) == 0.0);
  // pure-wave block: xi < eta1 < eta and xi1 < xi
  // output (xi, eta) = (0.5, 0.9), source (xi1, eta1) = (0.35, 0.6)
  const CartPoint p = from_characteristic(0.5, 0.9);
  const CartPoint q = from_characteristic(0.35, 0.6);
  CHECK(K(p.x, p.y, q.x, q.y) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(K(0.9, -0.2, 0.5, 0.5), GeometryError);
}

TEST_CASE("kernel pipeline agrees with the direct pipeline") {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {0.0, 1.0}}) {
    ProblemSpec spec = default_spec(a, b, smooth_f(), 64);
    spec.nx = spec.ny = 6;
    const DirectSolution direct = solve_direct(spec);
    const ClosedKernel K(spec);
    const SolutionField kf = apply_Linv_kernel(K, spec.forcing);
    CHECK(kf.method == MethodTag::KernelForm);
    double gap = 0.0;
    for (std::size_t i = 0; i < kf.parabolic.size(); ++i)
      gap = std::max(gap, std::abs(kf.parabolic[i] - direct.field.parabolic[i]));
    for (std::size_t i = 0; i < kf.hyperbolic.size(); ++i)
      gap = std::max(gap, std::abs(kf.hyperbolic[i] - direct.field.hyperbolic[i]));
    CHECK(gap < 0.1 * spec.grid.h());
  }
}

TEST_CASE("kernel pipeline is linear in f") {
  ProblemSpec spec = default_spec(2.0, 1.0, smooth_f(), 32);
  spec.nx = spec.ny = 4;
  const ClosedKernel K(spec);
  const ForcingField g = forcing_by_name("xy");
  const SolutionField a = apply_Linv_kernel(K, spec.forcing);
  const SolutionField b = apply_Linv_kernel(K, g);
  const SolutionField c = apply_Linv_kernel(K, spec.forcing.combine(2.0, g, -3.0));
  for (std::size_t i = 0; i < a.parabolic.size(); ++i)
    CHECK(std::abs(c.parabolic[i] - (2.0 * a.parabolic[i] - 3.0 * b.parabolic[i])) < 1e-12);
  for (std::size_t i = 0; i < a.hyperbolic.size(); ++i)
    CHECK(std::abs(c.hyperbolic[i] - (2.0 * a.hyperbolic[i] - 3.0 * b.hyperbolic[i])) < 1e-12);
  const SolutionField z = apply_Linv_kernel(K, ForcingField::zero());
  CHECK(z.max_abs() == 0.0);
}
