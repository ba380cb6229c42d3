#include "mixedsolve/greens.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mixedsolve {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kExpCutoff = 700.0;

void require_positive(double x, const char* what) {
  if (!(x > 0.0)) throw DomainError(std::string(what) + " requires x > 0");
}

// exp(-arg) with the underflow guard used by all series.
inline double gauss_term(double arg) { return arg > kExpCutoff ? 0.0 : std::exp(-arg); }

}  // namespace

SeriesTruncation SeriesTruncation::automatic(double x, double tail_tol) {
  const double span = std::sqrt(4.0 * std::max(x, 0.0) * std::log(1.0 / tail_tol));
  int n = 1 + static_cast<int>(std::ceil(span)) / 2;
  n = std::clamp(n, 3, 50);
  return {n, tail_tol};
}

void GluingParams::validate() const {
  if (!(alpha * alpha + beta * beta > 0.0)) {
    throw ConfigError("gluing parameters must satisfy alpha^2 + beta^2 > 0");
  }
}

double green_G(double x, double y, double y1, const SeriesTruncation& trunc) {
  require_positive(x, "green_G");
  const double inv4x = 1.0 / (4.0 * x);
  double sum = 0.0;
  for (int n = -trunc.n_max; n <= trunc.n_max; ++n) {
    const double a = y - y1 + 2.0 * n;
    const double b = y + y1 + 2.0 * n;
    sum += gauss_term(a * a * inv4x) - gauss_term(b * b * inv4x);
  }
  return sum / (2.0 * std::sqrt(kPi * x));
}

double green_Gy1_trace(double x, double y, const SeriesTruncation& trunc) {
  require_positive(x, "green_Gy1_trace");
  const double inv4x = 1.0 / (4.0 * x);
  double sum = 0.0;
  for (int n = -trunc.n_max; n <= trunc.n_max; ++n) {
    const double a = y + 2.0 * n;
    sum += a * gauss_term(a * a * inv4x);
  }
  if (sum == 0.0) return 0.0;
  return sum / (2.0 * kSqrtPi * x * std::sqrt(x));
}

double green_Gy_trace(double x, double y1, const SeriesTruncation& trunc) {
  require_positive(x, "green_Gy_trace");
  return green_Gy1_trace(x, y1, trunc);
}

double green_trace_integral(double t, double y, const SeriesTruncation& trunc) {
  if (t <= 0.0) return 0.0;
  const double inv = 1.0 / (2.0 * std::sqrt(t));
  double sum = 0.0;
  for (int n = -trunc.n_max; n <= trunc.n_max; ++n) {
    const double a = y + 2.0 * n;
    if (a == 0.0) {
      sum += 1.0;  // limit y -> 0+ of erfc(y / 2 sqrt(t))
    } else {
      sum += std::copysign(std::erfc(std::abs(a) * inv), a);
    }
  }
  return sum;
}

double green_trace_moment1(double t, double y, const SeriesTruncation& trunc) {
  if (t <= 0.0) return 0.0;
  const double st = std::sqrt(t);
  const double inv4t = 1.0 / (4.0 * t);
  double sum = 0.0;
  for (int n = -trunc.n_max; n <= trunc.n_max; ++n) {
    const double a = y + 2.0 * n;
    if (a == 0.0) continue;
    const double abs_a = std::abs(a);
    const double inner =
        2.0 * st * gauss_term(a * a * inv4t) - abs_a * kSqrtPi * std::erfc(abs_a / (2.0 * st));
    sum += a * inner;
  }
  return sum / (2.0 * kSqrtPi);
}

double kernel_ktilde(double x, const SeriesTruncation& trunc) {
  require_positive(x, "kernel_ktilde");
  double sum = 0.0;
  for (int n = 1; n <= trunc.n_max; ++n) {
    const double term = gauss_term(static_cast<double>(n) * n / x);
    if (term == 0.0) break;
    sum += term;
  }
  return 2.0 * sum / std::sqrt(kPi * x);
}

double kernel_k(double x, const SeriesTruncation& trunc) {
  require_positive(x, "kernel_k");
  return 1.0 / std::sqrt(kPi * x) + kernel_ktilde(x, trunc);
}

double kernel_ktilde_prime(double x, const SeriesTruncation& trunc) {
  require_positive(x, "kernel_ktilde_prime");
  double sum = 0.0;
  for (int n = 1; n <= trunc.n_max; ++n) {
    const double n2 = static_cast<double>(n) * n;
    const double term = gauss_term(n2 / x);
    if (term == 0.0) break;
    sum += term * (n2 / (x * x) - 0.5 / x);
  }
  return 2.0 * sum / std::sqrt(kPi * x);
}

double kernel_k1(double x, double t, const GluingParams& params,
                 const SeriesTruncation& trunc) {
  if (params.alpha == 0.0) throw ConfigError("kernel_k1 requires alpha != 0");
  if (!(t < x)) throw DomainError("kernel_k1 requires t < x");
  return (kernel_k(x - t, trunc) + params.beta * params.Q(x, t)) / params.alpha;
}

double kernel_k1_cofactor(double x, double t, const GluingParams& params,
                          const SeriesTruncation& trunc) {
  if (params.alpha == 0.0) throw ConfigError("kernel_k1 requires alpha != 0");
  const double d = x - t;
  double regular = 0.0;
  if (d > 0.0) {
    regular = std::sqrt(d) * (kernel_ktilde(d, trunc) + params.beta * params.Q(x, t));
  }
  return (1.0 / kSqrtPi + regular) / params.alpha;
}

double kernel_k1_regular(double x, double t, const GluingParams& params,
                         const SeriesTruncation& trunc) {
  if (params.alpha == 0.0) throw ConfigError("kernel_k1 requires alpha != 0");
  const double d = x - t;
  if (d < 0.0) throw DomainError("kernel_k1 requires t <= x");
  const double kt = d > 0.0 ? kernel_ktilde(d, trunc) : 0.0;
  return (kt + params.beta * params.Q(x, t)) / params.alpha;
}

double kernel_K0_regular(double x, double z, const GluingParams& params,
                         const SeriesTruncation& trunc) {
  if (params.beta == 0.0) throw ConfigError("kernel_K0 requires beta != 0");
  const double d = x - z;
  if (d < 0.0) throw DomainError("kernel_K0 requires z <= x");
  if (d == 0.0) return 0.0;
  // int_0^d v'(r) (d - r)^(-1/2) dr with r = d - s^2 becomes a smooth integral.
  auto integrand = [&](double s) {
    const double r = d - s * s;
    double v = params.beta * params.Q.d_first(z + r, z);
    if (r > 0.0) v += kernel_ktilde_prime(r, trunc);
    return v;
  };
  return 2.0 * quad::composite<20>(integrand, 0.0, std::sqrt(d), 8) / kSqrtPi;
}

double kernel_K0_cofactor(double x, double z, const GluingParams& params,
                          const SeriesTruncation& trunc) {
  if (params.beta == 0.0) throw ConfigError("kernel_K0 requires beta != 0");
  const double d = x - z;
  if (d < 0.0) throw DomainError("kernel_K0 requires z <= x");
  const double head = params.beta * params.Q(z, z) / kSqrtPi;
  if (d == 0.0) return head;
  return head + std::sqrt(d) * kernel_K0_regular(x, z, params, trunc);
}

double kernel_K0(double x, double z, const GluingParams& params,
                 const SeriesTruncation& trunc) {
  if (params.beta == 0.0) throw ConfigError("kernel_K0 requires beta != 0");
  if (!(z < x)) throw DomainError("kernel_K0 requires z < x");
  return kernel_K0_cofactor(x, z, params, trunc) / std::sqrt(x - z);
}

}  // namespace mixedsolve
