#include <doctest.h>

#include "mixedsolve/errors.hpp"
#include "mixedsolve/library.hpp"
#include "mixedsolve/verification.hpp"

#include <cmath>
#include <limits>

using namespace mixedsolve;

TEST_CASE("zero forcing gives zero residuals") {
  ProblemSpec spec = default_spec(2.0, 1.0, ForcingField::zero(), 64);
  spec.nx = spec.ny = 8;
  const DirectSolution sol = solve_direct(spec);
  const ResidualReport probe = residuals(spec, sol.traces);
  CHECK(probe.max_sup() <= 1e-10);
  CHECK(probe.conditions.size() == residual_condition_names().size());
  const ResidualReport nodes = residuals(spec, sol.field);
  CHECK(nodes.max_sup() <= 1e-10);
}

TEST_CASE("node residual sees a single corrupted value") {
  ProblemSpec spec = default_spec(1.0, 0.0, forcing_by_name("mixed_trig"), 64);
  spec.nx = spec.ny = 8;
  const DirectSolution sol = solve_direct(spec);
  const ResidualReport base = residuals(spec, sol.field);
  SolutionField bad = sol.field;
  bad.parabolic[4 * (spec.ny + 1) + 4] += 0.01;
  const ResidualReport hit = residuals(spec, bad);
  const auto& a = base.get("heat");
  const auto& b = hit.get("heat");
  double change = 0.0;
  for (std::size_t i = 0; i < a.value.size(); ++i)
    change = std::max(change, std::abs(a.value[i] - b.value[i]));
  // centred second difference in y: 2 * 0.01 / h^2
  CHECK(change == doctest::Approx(2.0 * 0.01 * 64).epsilon(1e-9));
}

TEST_CASE("probe residuals shrink under refinement") {
  for (auto [a, b] : {std::pair{1.0, 0.0}, {0.0, 1.0}}) {
    const ProblemSpec s64 = default_spec(a, b, forcing_by_name("mixed_trig"), 64);
    const ProblemSpec s128 = default_spec(a, b, forcing_by_name("mixed_trig"), 128);
    const ResidualReport r64 = residuals(s64, solve_trace(s64));
    const ResidualReport r128 = residuals(s128, solve_trace(s128));
    for (const auto& name : residual_condition_names()) {
      if (name == "dirichlet") {
        CHECK(r128.sup(name) <= 1e-12);
        continue;
      }
      CAPTURE(name);
      CHECK(r128.sup(name) < 0.5 * r64.sup(name));
    }
  }
}

TEST_CASE("stencils that do not fit are rejected") {
  const ProblemSpec spec = default_spec(1.0, 0.0, forcing_by_name("mixed_trig"), 16);
  const TraceFunctions tr = solve_trace(spec);
  CHECK_THROWS_AS(residuals(spec, tr), ResolutionError);
  ProblemSpec small = spec;
  small.nx = small.ny = 3;
  const DirectSolution sol = solve_direct(small);
  CHECK_THROWS_AS(residuals(small, sol.field), ResolutionError);
}

TEST_CASE("report refuses non-finite samples") {
  ResidualReport rep;
  rep.conditions.push_back({"heat", {0.5}, {0.5}, {std::numeric_limits<double>::quiet_NaN()}});
  CHECK_THROWS_AS(rep.summarize(), DataError);
  CHECK_THROWS_AS(rep.get("nothing"), ConfigError);
}

TEST_CASE("manufactured pair") {
  const ProblemSpec tmpl = default_spec(1.0, 0.0, ForcingField::zero(), 64);
  const ManufacturedSolution exact(tmpl);
  // side conditions hold by construction
  CHECK(exact.u(0.0, 0.4) == 0.0);
  CHECK(exact.u(0.3, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(exact.u(0.6, 0.0) == doctest::Approx(exact.tau(0.6)));
  CHECK(exact.forcing()(0.0, 0.0) == 0.0);

  const ManufacturedResult r64 = manufactured_check(exact, 64);
  const ManufacturedResult r128 = manufactured_check(exact, 128);
  CHECK(r64.exact_residuals.max_sup() < 1e-5);
  CHECK(r64.error < 1e-4);
  CHECK(r128.error < 0.3 * r64.error);

  SUBCASE("alpha perturbed to 1.1 departs from the pair") {
    GluingParams p = tmpl.params;
    p.alpha = 1.1;
    const ManufacturedResult off = manufactured_check(exact, 64, p);
    CHECK(off.error > 100.0 * r64.error);
  }
  SUBCASE("zero amplitude") {
    const ManufacturedResult z = manufactured_check(ManufacturedSolution(tmpl, 0.0), 64);
    CHECK(z.error == 0.0);
  }
  SUBCASE("construction tolerance") {
    CHECK_THROWS_AS(manufactured_check(exact, 64, {}, 1e-16), ConstructionError);
  }
}

TEST_CASE("manufactured pair with memory term") {
  const ManufacturedSolution exact(default_spec(0.0, 1.0, ForcingField::zero(), 64));
  // nu0 = int_0^x (1 + x t / 2) t dt = x^2/2 + x^4/6
  CHECK(exact.nu0(0.8) == doctest::Approx(0.32 + std::pow(0.8, 4) / 6.0).epsilon(1e-13));
  const ManufacturedResult r = manufactured_check(exact, 64);
  CHECK(r.exact_residuals.max_sup() < 1e-5);
  CHECK(r.error < 2e-4);
}

TEST_CASE("order fitting") {
  const std::vector<int> grids{64, 128, 256, 512};
  std::vector<double> sq, flat, zero;
  for (int n : grids) {
    sq.push_back(3.0 / (double(n) * n));
    flat.push_back(1e-3);
    zero.push_back(1e-14);
  }
  const ConvergenceStudy st = fit_orders(grids, {"sq", "flat", "zero"}, {sq, flat, zero});
  CHECK(st.order[0] == doctest::Approx(2.0));
  CHECK(st.spread[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(st.order[1] == doctest::Approx(0.0));
  CHECK(std::isnan(st.order[2]));
  const auto bad = st.failing(1.0, {"sq", "flat", "zero"});
  REQUIRE(bad.size() == 1);
  CHECK(bad[0] == "flat");
  CHECK_THROWS_AS(fit_orders({64, 128}, {"a"}, {{1.0, 0.5}}), ConfigError);
}
