#pragma once

#include "mixedsolve/solver.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mixedsolve {

/// Residual samples of one condition.
struct ConditionResidual {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> value;
  double sup = 0.0;
  /// root mean square over the samples
  double l2 = 0.0;
};

/// Condition names, in report order.
inline const std::vector<std::string>& residual_condition_names() {
  static const std::vector<std::string> names{"heat",    "wave",   "dirichlet",
                                              "ac_flux", "gluing", "ux_continuity"};
  return names;
}

struct ResidualReport {
  /// Trace grid cells.
  int n = 0;
  /// Stencil step; for field residuals the parabolic x-spacing.
  double stencil = 0.0;
  std::string source;
  std::vector<ConditionResidual> conditions;

  /// Computes sup and l2 of every condition. Throws DataError on non-finite samples.
  void summarize();
  const ConditionResidual& get(const std::string& name) const;
  double sup(const std::string& name) const { return get(name).sup; }
  double max_sup() const;
};

/// u(x, y) on the closed domain.
using PointEvaluator = std::function<double(double, double)>;

struct ResidualOptions {
  /// Stencil step; 0 selects 2 / n.
  double stencil = 0.0;
  /// Probes per direction.
  int probes = 9;
  PotentialQuadrature quadrature = PotentialQuadrature::fine();
};

/// Residuals of every condition at fixed probe points with local stencils of
/// step H. Centered second-order stencils for the two PDEs; one-sided 3-point
/// stencils at the type line and on AC, the latter as 2 u_eta at fixed xi.
/// Throws ResolutionError if a stencil leaves its subdomain.
ResidualReport residuals(const ProblemSpec& spec, const PointEvaluator& u,
                         const ResidualOptions& opt = {});

/// Same with u from the direct pipeline.
ResidualReport residuals(const ProblemSpec& spec, const TraceFunctions& tr,
                         const ResidualOptions& opt = {});

/// Residuals computed on the nodes of a sampled field: parabolic grid for the
/// heat and Dirichlet conditions, chart derivatives for the hyperbolic ones.
/// Throws ResolutionError if nx or ny < 4.
ResidualReport residuals(const ProblemSpec& spec, const SolutionField& field);

/// Closed-form member of the manufactured family for given (alpha, beta, Q, curve):
///   tau = a (x^2/2 + k x^3), nu1 = a x, nu0 = alpha nu1 + beta int_0^x Q nu1,
///   u0 = tau (1 - y^2) + nu0 (y - y^2),
///   u1 = tau(xi) + int_xi^eta c(s) (xi - lambda(s)) ds, c = (tau' - nu1) / (2 (s - lambda(s))).
/// f is u0_x - u0_yy for y > 0 and 4 c(eta) for y <= 0. Cheap to copy.
class ManufacturedSolution {
 public:
  ManufacturedSolution(const ProblemSpec& spec_template, double amplitude = 1.0,
                       double k = 1.0);

  double u(double x, double y) const;
  double tau(double x) const;
  double nu0(double x) const;
  double nu1(double x) const;
  const ForcingField& forcing() const { return spec_.forcing; }
  /// Template with the manufactured forcing.
  const ProblemSpec& spec() const { return spec_; }

  struct Data;

 private:
  std::shared_ptr<const Data> d_;
  ProblemSpec spec_;
};

struct ManufacturedResult {
  /// Probe residuals of the exact field (construction check).
  ResidualReport exact_residuals;
  /// Probe residuals of the solver output.
  ResidualReport solver_residuals;
  /// sup over probes in both subdomains of |u_h - u_exact|.
  double error = 0.0;
  int n = 0;
};

/// Checks the residuals of the exact field (ConstructionError above
/// `construction_tol`), solves on an n-cell grid, optionally with other gluing
/// parameters than the ones the pair was built for, and measures the error.
ManufacturedResult manufactured_check(const ManufacturedSolution& exact, int n,
                                      const std::optional<GluingParams>& solve_params = {},
                                      double construction_tol = 1e-5);

struct ConvergenceStudy {
  std::vector<int> grids;
  std::vector<std::string> names;
  /// norms[c][g]: sup norm of condition c on grid g.
  std::vector<std::vector<double>> norms;
  /// Least-squares slope of -log norm against log n; NaN when skipped.
  std::vector<double> order;
  /// max - min of the pairwise orders.
  std::vector<double> spread;
  std::vector<std::vector<double>> pairwise;
  /// Conditions whose norms stay below this level on every grid are not fitted.
  double floor = 1e-10;

  int index(const std::string& name) const;
  /// Names with a fitted order below `min_order`.
  std::vector<std::string> failing(double min_order,
                                   const std::vector<std::string>& which) const;
};

/// Fits orders for per-grid norms. Requires at least 3 grids.
ConvergenceStudy fit_orders(std::vector<int> grids, std::vector<std::string> names,
                            std::vector<std::vector<double>> norms, double floor = 1e-10);

/// Runs the direct pipeline and the probe residuals on every grid.
ConvergenceStudy convergence(const ProblemSpec& spec, const std::vector<int>& grids,
                             const ResidualOptions& opt = {});

/// Manufactured-solution error on every grid (single condition "error").
ConvergenceStudy manufactured_convergence(const ProblemSpec& spec_template,
                                          const std::vector<int>& grids, double amplitude = 1.0,
                                          double k = 1.0);

}  // namespace mixedsolve
