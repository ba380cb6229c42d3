#pragma once

#include "mixedsolve/geometry.hpp"
#include "mixedsolve/greens.hpp"
#include "mixedsolve/integral_engine.hpp"
#include "mixedsolve/potentials.hpp"
#include "mixedsolve/rhs.hpp"

#include <memory>
#include <vector>

namespace mixedsolve {

struct ProblemSpec {
  GluingParams params;
  CharCurve curve = CharCurve::linear(0.75);
  ForcingField forcing;
  Grid1D grid = Grid1D::uniform(128);
  /// Output sampling: parabolic (nx+1) x (ny+1) nodes; hyperbolic (nx+1) x (ny+1)
  /// nodes of the (eta, s) chart with xi = lambda(eta) + s (eta - lambda(eta)).
  int nx = 32;
  int ny = 32;
  SeriesTruncation trunc;

  /// alpha^2 + beta^2 > 0, curve valid, grids nonempty. Throws ConfigError.
  void validate() const;
};

/// Q(x,t) = 1 + x t / 2 with its x-derivative.
Field2D default_Q();

/// Default problem: l = 3/4 linear curve, Q = 1 + x t / 2.
ProblemSpec default_spec(double alpha, double beta, ForcingField f, int n = 128);

struct TraceFunctions {
  Grid1D grid;
  std::vector<double> tau;
  std::vector<double> tau_prime;
  /// u_y(x, +0) from the parabolic side.
  std::vector<double> nu0;
  /// u_y(x, -0) from the hyperbolic side.
  std::vector<double> nu1;
  std::vector<double> F0;
  std::vector<double> strip;
  RhsProfile F;
  /// sup over nodes of |nu0 - alpha nu1 - beta int_0^x Q nu1|.
  double gluing_residual = 0.0;
};

/// Kernel of the second-kind trace equation (k1 for alpha != 0, K0 otherwise).
KernelMatrix trace_kernel(const ProblemSpec& spec);

TraceFunctions solve_trace(const ProblemSpec& spec);

/// Variant of solve_trace taking an already assembled right-hand side.
TraceFunctions solve_trace_with_rhs(const ProblemSpec& spec, const RhsProfile& F,
                                    std::vector<double> F0, std::vector<double> strip,
                                    bool self_check = true);

enum class MethodTag { Direct, KernelForm };
const char* to_string(MethodTag m);

struct SolutionField {
  MethodTag method = MethodTag::Direct;
  int nx = 0;
  int ny = 0;
  /// Parabolic nodes x_i = i/nx, y_j = j/ny, value index i * (ny + 1) + j.
  std::vector<double> parabolic;
  /// Hyperbolic chart nodes eta_k = k/nx, s_j = j/ny, index k * (ny + 1) + j.
  std::vector<double> hyperbolic;
  std::vector<double> hyp_x;
  std::vector<double> hyp_y;

  double parabolic_at(int i, int j) const { return parabolic[i * (ny + 1) + j]; }
  double hyperbolic_at(int k, int j) const { return hyperbolic[k * (ny + 1) + j]; }
  double max_abs() const;
};

/// u at a parabolic point: volume potential plus the tau potential.
double parabolic_value(const ProblemSpec& spec, const TraceFunctions& tr, double x, double y,
                       const PotentialQuadrature& q = PotentialQuadrature::fine());

/// u(xi, eta) = tau(xi) + D(xi, eta).
double hyperbolic_value(const ProblemSpec& spec, const TraceFunctions& tr, double xi,
                        double eta);

/// The same value from the Cauchy data (tau, nu1) on the type line:
/// (tau(xi) + tau(eta))/2 - (1/2) int_xi^eta nu1 - int_xi^eta ds int_xi^s f1(r, s) dr.
double hyperbolic_value_cauchy(const ProblemSpec& spec, const TraceFunctions& tr, double xi,
                               double eta);

/// Dispatches on the region of (x, y). Throws GeometryError outside the domain.
double evaluate_direct(const ProblemSpec& spec, const TraceFunctions& tr, double x, double y,
                       const PotentialQuadrature& q = PotentialQuadrature::fine());

void reconstruct_parabolic(const ProblemSpec& spec, const TraceFunctions& tr,
                           SolutionField& field,
                           const PotentialQuadrature& q = PotentialQuadrature::moderate());
void reconstruct_hyperbolic(const ProblemSpec& spec, const TraceFunctions& tr,
                            SolutionField& field);

/// Coordinates of the hyperbolic chart node (k, j).
CartPoint hyperbolic_chart_point(const CharCurve& curve, int nx, int ny, int k, int j);

struct DirectSolution {
  TraceFunctions traces;
  SolutionField field;
};

DirectSolution solve_direct(const ProblemSpec& spec);

/// Closed-form Green kernel of the whole problem, u = int_Omega K f.
///
/// Built from the resolvent of the trace equation: T(x; p) is the value of
/// tau(x) produced by a unit point source at p, and
///   y > 0:  K = theta(x - x1) G(x - x1, y, y1) + int P(x - s, y) T(s; p) ds,
///   y < 0:  K = T(xi; p) + (1/2) [xi < eta1 < eta][xi1 < xi],
/// with P the boundary trace kernel.
class ClosedKernel {
 public:
  explicit ClosedKernel(const ProblemSpec& spec);

  const ProblemSpec& spec() const { return spec_; }
  const Grid1D& grid() const { return spec_.grid; }

  /// T(x_i; p) on all grid nodes for a parabolic source p = (x1, y1), y1 > 0.
  std::vector<double> response_parabolic(double x1, double y1) const;
  /// T(x_i; p) for a hyperbolic source; depends only on eta1 = x1 - y1.
  std::vector<double> response_hyperbolic(double eta1) const;

  /// T(.; p) as a piecewise-linear function of s starting at `start`.
  struct SourceResponse {
    std::vector<double> T;
    double start = 0.0;
    double start_value = 0.0;
    bool hyperbolic = false;
    double x1 = 0.0;
    double y1 = 0.0;
  };
  SourceResponse response(double x1, double y1) const;
  /// K(x, y; p) for a precomputed source response.
  double evaluate(const SourceResponse& r, double x, double y) const;

  /// K(x, y; x1, y1). Throws GeometryError outside the domain.
  double operator()(double x, double y, double x1, double y1) const;

  /// Cell weights (A_c, B_c) with int_{x1}^{x_{c+1}} phi(t) dmu(t) = sum A_c phi(x_c) + B_c phi(x_{c+1})
  /// for phi linear on each cell, where dmu is the source measure of the trace
  /// equation for a parabolic source. Accumulated with weight w.
  void accumulate_parabolic_weights(double x1, double y1, double w, std::vector<double>& A,
                                    std::vector<double>& B) const;
  /// tau from accumulated cell weights.
  std::vector<double> apply_parabolic_weights(const std::vector<double>& A,
                                              const std::vector<double>& B) const;

  /// theta(x - x1) G(x - x1, y, y1): the parabolic-parabolic leading block.
  double leading_block(double x, double y, double x1, double y1) const;

  /// Resolvent terms used by the trace equation.
  int resolvent_terms() const { return terms_; }

 private:
  // Z(i, t) for t off the grid, sqrt-aware in x_i - t.
  double table_at(std::size_t i, double t) const;
  double response_value(const SourceResponse& r, double s) const;
  double convolve_trace(const SourceResponse& r, double x, double y) const;

  ProblemSpec spec_;
  bool alpha_zero_ = false;
  // Gamma_1 (alpha != 0) or H(x, s) = int_s^x Gamma_1(x, t) (t - s)^(-1/2) dt (alpha = 0)
  LowerTriangular Z_;
  int terms_ = 0;
};

/// Source quadrature for the closed-kernel pipeline.
struct SourceQuadrature {
  int y_panels = 16;
  int y_grading = 4;
};

/// tau from the closed kernel: tau_K(x_i) = int_Omega T(x_i; p) f(p) dp.
std::vector<double> kernel_trace(const ClosedKernel& K, const ForcingField& f,
                                 const SourceQuadrature& sq = {});

/// u = L^{-1} f by the closed kernel on the field grid of the spec.
SolutionField apply_Linv_kernel(const ClosedKernel& K, const ForcingField& f,
                                const SourceQuadrature& sq = {});

/// Single-point value of the closed-kernel solution, given tau_K.
double kernel_form_value(const ClosedKernel& K, const ForcingField& f,
                         std::span<const double> tau_K, double x, double y,
                         const PotentialQuadrature& q = PotentialQuadrature::fine());

/// Assembles the kernel for the problem (convenience wrapper).
double assemble_closed_kernel(const ClosedKernel& K, double x, double y, double x1, double y1);

}  // namespace mixedsolve
