#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <array>
#include <cmath>
#include <cstddef>

namespace mixedsolve::quad {

/// Fixed-order Gauss-Legendre on [a, b]. Nodes are affine images of the
/// reference nodes, so the rule moves smoothly with its endpoints.
template <unsigned N, class F>
double gauss_legendre(F&& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  // boost stores the non-negative half of a symmetric rule
  std::size_t start = 0;
  if (N % 2 == 1) {
    sum += w[0] * f(mid);
    start = 1;
  }
  for (std::size_t k = start; k < x.size(); ++k) {
    sum += w[k] * (f(mid + half * x[k]) + f(mid - half * x[k]));
  }
  return half * sum;
}

/// Composite Gauss-Legendre with `panels` equal panels.
template <unsigned N, class F>
double composite(F&& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    sum += gauss_legendre<N>(f, a + p * h, a + (p + 1) * h);
  }
  return sum;
}

/// Gauss-Legendre on panels [a, a+(b-a)/2^levels], ..., [mid, b], i.e.
/// geometrically refined toward a.
template <unsigned N, class F>
double graded_toward_left(F&& f, double a, double b, int levels) {
  double sum = 0.0;
  double right = b;
  for (int k = 0; k < levels; ++k) {
    const double left = a + 0.5 * (right - a);
    sum += gauss_legendre<N>(f, left, right);
    right = left;
  }
  sum += gauss_legendre<N>(f, a, right);
  return sum;
}

/// Same grading, refined toward b.
template <unsigned N, class F>
double graded_toward_right(F&& f, double a, double b, int levels) {
  double sum = 0.0;
  double left = a;
  for (int k = 0; k < levels; ++k) {
    const double right = b - 0.5 * (b - left);
    sum += gauss_legendre<N>(f, left, right);
    left = right;
  }
  sum += gauss_legendre<N>(f, left, b);
  return sum;
}

}  // namespace mixedsolve::quad
