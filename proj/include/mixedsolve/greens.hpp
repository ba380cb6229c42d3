#pragma once

#include "mixedsolve/field.hpp"

namespace mixedsolve {

/// Image-series truncation: terms n = -n_max..n_max are summed.
struct SeriesTruncation {
  int n_max = 8;
  double tail_tol = 1e-14;

  /// n_max = 1 + ceil(sqrt(4 x ln(1/tail_tol))) / 2, clamped to [3, 50].
  static SeriesTruncation automatic(double x, double tail_tol = 1e-14);
};

struct GluingParams {
  double alpha = 1.0;
  double beta = 0.0;
  Field2D Q;

  void validate() const;
};

/// Green's function of the first boundary problem for u_x = u_yy on the
/// strip 0 < y < 1 (image series).
double green_G(double x, double y, double y1, const SeriesTruncation& trunc = {});

/// dG/dy at y = 0, as a function of (x, y1).
double green_Gy_trace(double x, double y1, const SeriesTruncation& trunc = {});

/// dG/dy1 at y1 = 0, as a function of (x, y). Same series as green_Gy_trace.
double green_Gy1_trace(double x, double y, const SeriesTruncation& trunc = {});

/// int_0^t green_Gy1_trace(s, y) ds, in closed form (erfc sums).
double green_trace_integral(double t, double y, const SeriesTruncation& trunc = {});

/// int_0^t s * green_Gy1_trace(s, y) ds, in closed form.
double green_trace_moment1(double t, double y, const SeriesTruncation& trunc = {});

/// k(x) = (1/sqrt(pi x)) sum_n exp(-n^2/x).
double kernel_k(double x, const SeriesTruncation& trunc = {});
/// Regular part of k: k(x) - 1/sqrt(pi x).
double kernel_ktilde(double x, const SeriesTruncation& trunc = {});
/// d/dx of kernel_ktilde.
double kernel_ktilde_prime(double x, const SeriesTruncation& trunc = {});

/// k1(x,t) = (1/alpha)[k(x-t) + beta Q(x,t)], 0 <= t < x.
double kernel_k1(double x, double t, const GluingParams& params,
                 const SeriesTruncation& trunc = {});
/// sqrt(x-t) k1(x,t), extended continuously to t = x.
double kernel_k1_cofactor(double x, double t, const GluingParams& params,
                          const SeriesTruncation& trunc = {});

/// Bounded part of k1: (1/alpha)[ktilde(x - t) + beta Q(x, t)], so that
/// k1 = 1/(alpha sqrt(pi (x - t))) + kernel_k1_regular.
double kernel_k1_regular(double x, double t, const GluingParams& params,
                         const SeriesTruncation& trunc = {});

/// Second-kind kernel of the alpha = 0 regime, from exact Abel inversion of
/// int_0^x [k(x-t) + beta Q(x,t)] tau'(t) dt = g(x):
///   K0(x,z) = (1/sqrt(pi)) [ beta Q(z,z)/sqrt(x-z)
///             + int_z^x (x-t)^(-1/2) d/dt (ktilde(t-z) + beta Q(t,z)) dt ].
double kernel_K0(double x, double z, const GluingParams& params,
                 const SeriesTruncation& trunc = {});
/// sqrt(x-z) K0(x,z), extended continuously to z = x.
double kernel_K0_cofactor(double x, double z, const GluingParams& params,
                          const SeriesTruncation& trunc = {});
/// Bounded part of K0 (the integral term), so that
/// K0 = beta Q(z,z) / sqrt(pi (x - z)) + kernel_K0_regular. Vanishes at z = x.
double kernel_K0_regular(double x, double z, const GluingParams& params,
                         const SeriesTruncation& trunc = {});

}  // namespace mixedsolve
