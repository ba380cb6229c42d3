#include "mixedsolve/solver.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/parallel.hpp"
#include "mixedsolve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixedsolve {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
}

void ProblemSpec::validate() const {
  params.validate();
  const CurveReport rep = validate_curve(curve);
  if (!rep.ok()) throw ConfigError("curve rejected:\n" + rep.summary());
  if (grid.size() < 3) throw ConfigError("type-line grid needs at least 2 cells");
  if (nx < 2 || ny < 2) throw ConfigError("field resolution must be at least 2 x 2");
  forcing.check_origin();
}

Field2D default_Q() {
  return Field2D([](double x, double t) { return 1.0 + 0.5 * x * t; },
                 [](double, double t) { return 0.5 * t; }, "default");
}

ProblemSpec default_spec(double alpha, double beta, ForcingField f, int n) {
  ProblemSpec spec;
  spec.params = {alpha, beta, default_Q()};
  spec.curve = CharCurve::linear(0.75);
  spec.forcing = std::move(f);
  spec.grid = Grid1D::uniform(n);
  return spec;
}

const char* to_string(MethodTag m) {
  return m == MethodTag::Direct ? "Direct" : "KernelForm";
}

double SolutionField::max_abs() const {
  double m = 0.0;
  for (double v : parabolic) m = std::max(m, std::abs(v));
  for (double v : hyperbolic) m = std::max(m, std::abs(v));
  return m;
}

KernelMatrix trace_kernel(const ProblemSpec& spec) {
  const GluingParams& p = spec.params;
  const SeriesTruncation trunc = spec.trunc;
  if (p.alpha != 0.0) {
    const double head = 1.0 / (p.alpha * kSqrtPi);
    return build_kernel_matrix(
        [head](double, double) { return head; },
        [&p, trunc](double x, double t) { return kernel_k1_regular(x, t, p, trunc); },
        spec.grid);
  }
  // sqrt(x - z) K0 = beta Q(z,z)/sqrt(pi) + (x - z) T(x, z) with T smooth, so the
  // whole kernel goes into the cofactor; a split leaves a sqrt(x - z) term in g
  return build_kernel_matrix(
      [&p, trunc](double x, double z) { return kernel_K0_cofactor(x, z, p, trunc); }, spec.grid,
      SingularityClass::InverseSqrt);
}

TraceFunctions solve_trace(const ProblemSpec& spec) {
  spec.validate();
  const RhsProfile F0 = compute_F0(spec.forcing, spec.grid, spec.trunc);
  const RhsProfile F = spec.params.alpha != 0.0
                           ? compute_F1(spec.forcing, F0, spec.params, spec.curve)
                           : compute_F2(spec.forcing, F0, spec.params, spec.curve);
  return solve_trace_with_rhs(spec, F, F0.values,
                              strip_profile(spec.forcing, spec.curve, spec.grid));
}

TraceFunctions solve_trace_with_rhs(const ProblemSpec& spec, const RhsProfile& F,
                                    std::vector<double> F0, std::vector<double> strip,
                                    bool self_check) {
  const Grid1D& grid = spec.grid;
  const std::size_t n = grid.size();
  TraceFunctions tr;
  tr.grid = grid;
  tr.F = F;
  tr.F0 = std::move(F0);
  tr.strip = std::move(strip);

  const KernelMatrix K = trace_kernel(spec);
  tr.tau_prime = solve_volterra2(K, F.values);
  tr.tau = cumulative_trapezoid(tr.tau_prime, grid);

  tr.nu1.resize(n);
  for (std::size_t i = 0; i < n; ++i) tr.nu1[i] = tr.tau_prime[i] - 2.0 * tr.strip[i];

  // nu0 = -int_0^x k(x - t) tau'(t) dt + F0
  const SeriesTruncation trunc = spec.trunc;
  const KernelMatrix Kk = build_kernel_matrix(
      [](double, double) { return 1.0 / kSqrtPi; },
      [trunc](double x, double t) { return x > t ? kernel_ktilde(x - t, trunc) : 0.0; }, grid);
  tr.nu0.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = Kk.weights.row(i);
    double acc = tr.F0[i];
    for (std::size_t j = 0; j <= i; ++j) acc -= row[j] * tr.tau_prime[j];
    tr.nu0[i] = acc;
  }

  const GluingParams& p = spec.params;
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mem = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      mem += 0.5 * (grid[j + 1] - grid[j]) *
             (p.Q(grid[i], grid[j]) * tr.nu1[j] + p.Q(grid[i], grid[j + 1]) * tr.nu1[j + 1]);
    }
    const double r = tr.nu0[i] - p.alpha * tr.nu1[i] - p.beta * mem;
    tr.gluing_residual = std::max(tr.gluing_residual, std::abs(r));
    scale = std::max({scale, std::abs(tr.nu0[i]), std::abs(tr.nu1[i])});
  }
  // the discrete relation holds to O(h^{1/2}) near x = 0 for the alpha = 0 path
  const double bound = 10.0 * std::sqrt(grid.h()) * scale;
  if (self_check && tr.gluing_residual > bound) {
    throw GluingResidualError("trace gluing residual " + std::to_string(tr.gluing_residual) +
                              " exceeds " + std::to_string(bound));
  }
  return tr;
}

double parabolic_value(const ProblemSpec& spec, const TraceFunctions& tr, double x, double y,
                       const PotentialQuadrature& q) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return integrate_linear(tr.tau_prime, tr.grid, x);
  if (y >= 1.0) return 0.0;
  return volume_potential(spec.forcing, x, y, spec.trunc, q) +
         trace_potential(tr.tau_prime, tr.grid, x, y, spec.trunc, q);
}

double hyperbolic_value(const ProblemSpec& spec, const TraceFunctions& tr, double xi,
                        double eta) {
  return integrate_linear(tr.tau_prime, tr.grid, xi) +
         hyperbolic_source_term(spec.forcing, spec.curve, xi, eta);
}

double hyperbolic_value_cauchy(const ProblemSpec& spec, const TraceFunctions& tr, double xi,
                               double eta) {
  const double tx = integrate_linear(tr.tau_prime, tr.grid, xi);
  const double te = integrate_linear(tr.tau_prime, tr.grid, eta);
  const double nu_int =
      integrate_linear(tr.nu1, tr.grid, eta) - integrate_linear(tr.nu1, tr.grid, xi);
  double tri = 0.0;
  if (eta > xi && !spec.forcing.is_zero()) {
    tri = quad::composite<16>(
        [&](double s) {
          return quad::gauss_legendre<16>([&](double r) { return spec.forcing.f1(r, s); }, xi, s);
        },
        xi, eta, 2);
  }
  return 0.5 * (tx + te) - 0.5 * nu_int - tri;
}

double evaluate_direct(const ProblemSpec& spec, const TraceFunctions& tr, double x, double y,
                       const PotentialQuadrature& q) {
  switch (classify_point(spec.curve, x, y)) {
    case RegionTag::Parabolic:
    case RegionTag::TypeLine:
      return parabolic_value(spec, tr, x, y, q);
    case RegionTag::Hyperbolic: {
      const CharPoint c = to_characteristic(x, y);
      return hyperbolic_value(spec, tr, c.xi, c.eta);
    }
    case RegionTag::Outside:
      break;
  }
  // closed boundary of the parabolic rectangle
  if (y > 0.0 && x >= 0.0 && x <= 1.0 && y <= 1.0) return parabolic_value(spec, tr, x, y, q);
  throw GeometryError("point (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") lies outside the domain");
}

CartPoint hyperbolic_chart_point(const CharCurve& curve, int nx, int ny, int k, int j) {
  const double eta = static_cast<double>(k) / nx;
  const double lam = lambda_of_eta(curve, eta);
  const double s = static_cast<double>(j) / ny;
  const double xi = lam + s * (eta - lam);
  return from_characteristic(xi, eta);
}

void reconstruct_parabolic(const ProblemSpec& spec, const TraceFunctions& tr,
                           SolutionField& field, const PotentialQuadrature& q) {
  field.nx = spec.nx;
  field.ny = spec.ny;
  const int nx = spec.nx, ny = spec.ny;
  field.parabolic.assign(static_cast<std::size_t>((nx + 1) * (ny + 1)), 0.0);
  parallel_for(static_cast<std::size_t>((nx + 1) * (ny + 1)), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / (ny + 1);
    const int j = static_cast<int>(idx) % (ny + 1);
    field.parabolic[idx] =
        parabolic_value(spec, tr, static_cast<double>(i) / nx, static_cast<double>(j) / ny, q);
  });
}

void reconstruct_hyperbolic(const ProblemSpec& spec, const TraceFunctions& tr,
                            SolutionField& field) {
  field.nx = spec.nx;
  field.ny = spec.ny;
  const int nx = spec.nx, ny = spec.ny;
  const std::size_t count = static_cast<std::size_t>((nx + 1) * (ny + 1));
  field.hyperbolic.assign(count, 0.0);
  field.hyp_x.assign(count, 0.0);
  field.hyp_y.assign(count, 0.0);
  parallel_for(count, [&](std::size_t idx) {
    const int k = static_cast<int>(idx) / (ny + 1);
    const int j = static_cast<int>(idx) % (ny + 1);
    const CartPoint p = hyperbolic_chart_point(spec.curve, nx, ny, k, j);
    const CharPoint c = to_characteristic(p.x, p.y);
    field.hyp_x[idx] = p.x;
    field.hyp_y[idx] = p.y;
    field.hyperbolic[idx] = hyperbolic_value(spec, tr, c.xi, c.eta);
  });
}

DirectSolution solve_direct(const ProblemSpec& spec) {
  DirectSolution out;
  out.traces = solve_trace(spec);
  out.field.method = MethodTag::Direct;
  reconstruct_parabolic(spec, out.traces, out.field);
  reconstruct_hyperbolic(spec, out.traces, out.field);
  return out;
}

}  // namespace mixedsolve
