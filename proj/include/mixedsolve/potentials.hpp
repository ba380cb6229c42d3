#pragma once

#include "mixedsolve/geometry.hpp"
#include "mixedsolve/greens.hpp"
#include "mixedsolve/integral_engine.hpp"
#include "mixedsolve/rhs.hpp"

#include <span>

namespace mixedsolve {

/// Resolution knobs for the parabolic potentials. `t_levels` geometric
/// panels resolve the initial layer of the heat kernel down to times of order
/// x 2^-t_levels.
struct PotentialQuadrature {
  int t_levels = 28;
  int s_levels = 24;

  static PotentialQuadrature fine() { return {}; }
  static PotentialQuadrature moderate() { return {18, 16}; }
};

/// Volume heat potential V(x,y) = int_0^x int_0^1 G(x - x1, y, y1) f(x1, y1) dy1 dx1.
double volume_potential(const ForcingField& f, double x, double y,
                        const SeriesTruncation& trunc = {},
                        const PotentialQuadrature& q = {});

/// Boundary potential int_0^x Gy1-trace(x - s, y) tau(s) ds, written after an
/// integration by parts as int_0^x C(x - s, y) tau'(s) ds with tau' the
/// piecewise-linear interpolant of `tau_prime` on `grid`.
double trace_potential(std::span<const double> tau_prime, const Grid1D& grid, double x,
                       double y, const SeriesTruncation& trunc = {},
                       const PotentialQuadrature& q = {});

/// Same potential for a piecewise-linear tau given by nodal values, with exact
/// moments of the trace kernel on every cell.
double trace_potential_linear(std::span<const double> tau, const Grid1D& grid, double x,
                              double y, const SeriesTruncation& trunc = {});

/// tau(xi) = int_0^xi tau'_h, where tau'_h interpolates `tau_prime` linearly.
/// Agrees with cumulative_trapezoid at the nodes.
double integrate_linear(std::span<const double> tau_prime, const Grid1D& grid, double xi);

/// D(xi, eta) = int_xi^eta d eta1 int_{lambda(eta1)}^{xi} f1(xi1, eta1) d xi1.
double hyperbolic_source_term(const ForcingField& f, const CharCurve& curve, double xi,
                              double eta);

}  // namespace mixedsolve
