#include "mixedsolve/potentials.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace mixedsolve {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kZClip = 6.5;

inline double gauss_segment(const ForcingField& f, double xt, double offset, double scale,
                            double lo, double hi) {
  lo = std::max(lo, -kZClip);
  hi = std::min(hi, kZClip);
  if (!(hi > lo)) return 0.0;
  return quad::gauss_legendre<32>(
      [&](double z) { return std::exp(-z * z) * f(xt, offset + scale * z); }, lo, hi);
}
}  // namespace

double volume_potential(const ForcingField& f, double x, double y,
                        const SeriesTruncation& trunc, const PotentialQuadrature& q) {
  if (f.is_zero() || x <= 0.0) return 0.0;
  auto at_t = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double r = 2.0 * std::sqrt(t);
    const double xt = x - t;
    double sum = 0.0;
    for (int n = -trunc.n_max; n <= trunc.n_max; ++n) {
      // y1 = y + 2n + r z  and  y1 = -y - 2n + r z
      sum += gauss_segment(f, xt, y + 2.0 * n, r, (-y - 2.0 * n) / r, (1.0 - y - 2.0 * n) / r);
      sum -= gauss_segment(f, xt, -y - 2.0 * n, r, (y + 2.0 * n) / r, (1.0 + y + 2.0 * n) / r);
    }
    return sum;
  };
  return quad::graded_toward_left<8>(at_t, 0.0, x, q.t_levels) / kSqrtPi;
}

double trace_potential(std::span<const double> tau_prime, const Grid1D& grid, double x,
                       double y, const SeriesTruncation& trunc, const PotentialQuadrature& q) {
  if (x <= 0.0) return 0.0;
  std::size_t last = grid.cell_of(x);
  if (last > 0 && grid[last] >= x) --last;
  double sum = 0.0;
  for (std::size_t c = 0; c <= last; ++c) {
    const double a = grid[c];
    const double b = std::min(grid[c + 1], x);
    const double w = grid[c + 1] - a;
    const double ta = tau_prime[c], tb = tau_prime[c + 1];
    auto integrand = [&](double s) {
      const double lin = ta + (tb - ta) * (s - a) / w;
      return green_trace_integral(x - s, y, trunc) * lin;
    };
    if (c == last) {
      sum += quad::graded_toward_right<8>(integrand, a, b, q.s_levels);
    } else {
      sum += quad::gauss_legendre<8>(integrand, a, b);
    }
  }
  return sum;
}

double trace_potential_linear(std::span<const double> tau, const Grid1D& grid, double x,
                              double y, const SeriesTruncation& trunc) {
  if (x <= 0.0) return 0.0;
  const std::size_t last = grid.cell_of(x);
  double sum = 0.0;
  // u = x - s; on a cell, tau = ta + slope (s - a) = ta + slope (x - a - u)
  for (std::size_t c = 0; c <= last; ++c) {
    const double a = grid[c];
    const double b = std::min(grid[c + 1], x);
    if (!(b > a)) continue;
    const double slope = (tau[c + 1] - tau[c]) / (grid[c + 1] - a);
    const double ua = x - a, ub = x - b;
    const double m0 = green_trace_integral(ua, y, trunc) - green_trace_integral(ub, y, trunc);
    const double m1 = green_trace_moment1(ua, y, trunc) - green_trace_moment1(ub, y, trunc);
    sum += (tau[c] + slope * (x - a)) * m0 - slope * m1;
  }
  return sum;
}

double integrate_linear(std::span<const double> tau_prime, const Grid1D& grid, double xi) {
  if (xi <= 0.0) return 0.0;
  const std::size_t c = grid.cell_of(xi);
  double acc = 0.0;
  for (std::size_t k = 0; k < c; ++k) {
    acc += 0.5 * (grid[k + 1] - grid[k]) * (tau_prime[k] + tau_prime[k + 1]);
  }
  const double a = grid[c];
  const double w = grid[c + 1] - a;
  const double d = std::min(xi, grid[c + 1]) - a;
  const double slope = (tau_prime[c + 1] - tau_prime[c]) / w;
  return acc + tau_prime[c] * d + 0.5 * slope * d * d;
}

double hyperbolic_source_term(const ForcingField& f, const CharCurve& curve, double xi,
                              double eta) {
  if (f.is_zero() || !(eta > xi)) return 0.0;
  auto inner = [&](double eta1) {
    const double lo = lambda_of_eta(curve, eta1);
    if (!(xi > lo)) return 0.0;
    return quad::gauss_legendre<16>([&](double xi1) { return f.f1(xi1, eta1); }, lo, xi);
  };
  return quad::composite<16>(inner, xi, eta, 2);
}

}  // namespace mixedsolve
