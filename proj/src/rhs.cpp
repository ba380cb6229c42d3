#include "mixedsolve/rhs.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/parallel.hpp"
#include "mixedsolve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mixedsolve {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
// Gaussian tails beyond |z| = 6.5 are below 1e-18 and dropped.
constexpr double kZClip = 6.5;
}  // namespace

ForcingField::ForcingField()
    : f_([](double, double) { return 0.0; }), name_("zero"), zero_(true) {}

ForcingField::ForcingField(Fn f, Smoothness smoothness, std::string name)
    : f_(std::move(f)), smoothness_(smoothness), name_(std::move(name)) {}

ForcingField ForcingField::zero() { return ForcingField(); }

void ForcingField::check_origin(double tol) const {
  if (smoothness_ != Smoothness::C1) return;
  const double v = f_(0.0, 0.0);
  if (std::abs(v) > tol) {
    throw ConfigError("forcing '" + name_ + "' must vanish at the origin (f(0,0) = " +
                      std::to_string(v) + ")");
  }
}

ForcingField ForcingField::combine(double a, const ForcingField& other, double b) const {
  Fn f = f_, g = other.f_;
  const Smoothness s = (smoothness_ == Smoothness::C1 && other.smoothness_ == Smoothness::C1)
                           ? Smoothness::C1
                           : Smoothness::L2only;
  return ForcingField([f, g, a, b](double x, double y) { return a * f(x, y) + b * g(x, y); },
                      s, name_ + "+" + other.name_);
}

const char* to_string(RhsVariant v) {
  switch (v) {
    case RhsVariant::F0: return "F0";
    case RhsVariant::F1: return "F1";
    case RhsVariant::F2: return "F2";
  }
  return "?";
}

double strip_integral(const ForcingField& f, const CharCurve& curve, double eta) {
  if (f.is_zero() || eta <= 0.0) return 0.0;
  const double lo = lambda_of_eta(curve, eta);
  return quad::composite<16>([&](double xi) { return f.f1(xi, eta); }, lo, eta, 2);
}

std::vector<double> strip_profile(const ForcingField& f, const CharCurve& curve,
                                  const Grid1D& grid) {
  std::vector<double> out(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = strip_integral(f, curve, grid[i]); });
  return out;
}

double memory_strip_term(const ForcingField& f, const GluingParams& params,
                         const CharCurve& curve, double x) {
  if (f.is_zero() || x <= 0.0) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(8.0 * x)));
  return quad::composite<16>(
      [&](double t) { return params.Q(x, t) * strip_integral(f, curve, t); }, 0.0, x, panels);
}

double F0_at(const ForcingField& f, double x, const SeriesTruncation& trunc) {
  if (f.is_zero() || x <= 0.0) return 0.0;
  // t = s^2 and, per image, y1 = 2 s z - 2n turn the trace kernel into
  // (4/sqrt(pi)) z exp(-z^2), so the integrand is bounded and smooth in s.
  auto at_s = [&](double s) {
    if (s <= 0.0) return 0.0;
    double sum = 0.0;
    for (int n = -trunc.n_max; n <= trunc.n_max; ++n) {
      const double lo = std::max(n / s, -kZClip);
      const double hi = std::min((n + 0.5) / s, kZClip);
      if (!(hi > lo)) continue;
      sum += quad::gauss_legendre<24>(
          [&](double z) { return z * std::exp(-z * z) * f(x - s * s, 2.0 * s * z - 2.0 * n); },
          lo, hi);
    }
    return sum;
  };
  return 4.0 / kSqrtPi * quad::composite<16>(at_s, 0.0, std::sqrt(x), 8);
}

RhsProfile compute_F0(const ForcingField& f, const Grid1D& grid, const SeriesTruncation& trunc) {
  RhsProfile out{grid, std::vector<double>(grid.size(), 0.0), RhsVariant::F0};
  parallel_for(grid.size(), [&](std::size_t i) { out.values[i] = F0_at(f, grid[i], trunc); });
  for (double v : out.values) {
    if (!std::isfinite(v)) throw QuadratureError("F0 quadrature produced a non-finite value");
  }
  return out;
}

RhsProfile compute_F1(const ForcingField& f, const RhsProfile& F0, const GluingParams& params,
                      const CharCurve& curve) {
  if (params.alpha == 0.0) throw ConfigError("F1 requires alpha != 0");
  const Grid1D& grid = F0.grid;
  RhsProfile out{grid, std::vector<double>(grid.size(), 0.0), RhsVariant::F1};
  parallel_for(grid.size(), [&](std::size_t i) {
    const double x = grid[i];
    double v = F0.values[i] / params.alpha + 2.0 * strip_integral(f, curve, x);
    if (params.beta != 0.0) {
      v += 2.0 * params.beta / params.alpha * memory_strip_term(f, params, curve, x);
    }
    out.values[i] = v;
  });
  return out;
}

RhsProfile compute_F2(const ForcingField& f, const RhsProfile& F0, const GluingParams& params,
                      const CharCurve& curve) {
  if (params.alpha != 0.0) throw ConfigError("F2 is defined for alpha = 0");
  if (params.beta == 0.0) throw ConfigError("F2 requires beta != 0");
  const Grid1D& grid = F0.grid;
  std::vector<double> g(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t i) {
    g[i] = F0.values[i] + 2.0 * params.beta * memory_strip_term(f, params, curve, grid[i]);
  });
  // a C1 forcing vanishing at the origin gives F2(0) = 0
  std::optional<double> phi0;
  if (f.smoothness() == Smoothness::C1) phi0 = 0.0;
  auto phi = abel_invert(g, grid, 1e-9, phi0);
  for (double& v : phi) v *= kSqrtPi;
  return {grid, std::move(phi), RhsVariant::F2};
}

RhsProfile compute_F2(const ForcingField& f, const GluingParams& params, const CharCurve& curve,
                      const Grid1D& grid, const SeriesTruncation& trunc) {
  if (params.alpha != 0.0) throw ConfigError("F2 is defined for alpha = 0");
  if (params.beta == 0.0) throw ConfigError("F2 requires beta != 0");
  return compute_F2(f, compute_F0(f, grid, trunc), params, curve);
}

RhsProfile compute_F_dispatch(const ForcingField& f, const GluingParams& params,
                              const CharCurve& curve, const Grid1D& grid,
                              const SeriesTruncation& trunc) {
  params.validate();
  if (params.alpha != 0.0) return compute_F1(f, compute_F0(f, grid, trunc), params, curve);
  return compute_F2(f, params, curve, grid, trunc);
}

}  // namespace mixedsolve
