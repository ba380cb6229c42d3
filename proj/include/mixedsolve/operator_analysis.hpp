#pragma once

#include "mixedsolve/solver.hpp"

#include <complex>
#include <string>
#include <vector>

namespace mixedsolve {

/// Quadrature node of the coarse product grid over the domain.
struct SamplePoint {
  double x = 0.0;
  double y = 0.0;
  /// Area weight.
  double w = 0.0;
  bool hyperbolic = false;
  /// Column index in x (cell index of the coarse grid) for parabolic nodes,
  /// -1 for hyperbolic nodes.
  int column = -1;
};

/// Midpoint nodes: n4 x n4 cell centres of the rectangle and n4 x n4 centres
/// of the (eta, s) chart of the hyperbolic region, xi = lambda + s (eta - lambda).
std::vector<SamplePoint> coarse_sample_points(const CharCurve& curve, int n4);

/// Dense samples K(p_a, p_b), row-major, plus the measured constant M.
struct IteratedKernelStack {
  std::vector<SamplePoint> points;
  double h = 0.0;
  /// Distance used for the bound at pair (a, b): x_a - x_b, or h/3 for a
  /// same-column parabolic pair (those are sampled at x_a + h/3).
  std::vector<double> dist;
  /// K_n for n = 1..size(); K[0] is the closed kernel.
  std::vector<std::vector<double>> K;
  /// max |sqrt(d) K| at the h/3 offset and at the h/9 offset, and the widened
  /// value used for the bounds. All three are lower estimates of the true sup.
  double M_coarse = 0.0;
  double M_fine = 0.0;
  double M = 0.0;

  std::size_t size() const { return points.size(); }
  double at(int n, std::size_t a, std::size_t b) const { return K[n - 1][a * size() + b]; }
};

/// K_1 on the coarse grid. Same-column parabolic pairs are evaluated at the
/// output offset x + h/3.
IteratedKernelStack sample_closed_kernel(const ClosedKernel& K, int n4 = 12);

/// Stack with K_1 given by `kernel(x, y, x1, y1)` on the same nodes and the
/// same offset rule; M is measured from the samples only.
IteratedKernelStack sample_kernel(const std::vector<SamplePoint>& points, double h,
                                  const std::function<double(double, double, double, double)>& kernel);

/// Appends K_2..K_{n_max}: K_n(a, b) = sum_c w_c K(a, c) K_{n-1}(c, b).
void iterate_kernels(IteratedKernelStack& stack, int n_max);

/// (sqrt(pi) M)^n (3/2)^(n-1) d^(n/2 - 1) / Gamma(n/2).
double iterated_kernel_bound(double M, int n, double d);

struct IteratedBoundReport {
  struct Row {
    int n = 0;
    /// min over causal samples of bound / |K_n| (infinity when K_n = 0 everywhere).
    double min_slack = 0.0;
    std::size_t violations = 0;
    std::size_t causality_violations = 0;
  };
  std::vector<Row> rows;
  double M = 0.0;
  bool passed() const;
};

/// Checks the iterated-kernel bound at every sample. Throws BoundViolation on a
/// violation when `throw_on_violation` is set.
IteratedBoundReport check_iterated_bound(const IteratedKernelStack& stack, bool throw_on_violation = false);

/// (3/2 sqrt(pi) M)^n / Gamma(1 + n/2).
double bound_curve(double M, int n);

struct NormReport {
  std::vector<int> n;
  std::vector<double> norms;
  std::vector<double> roots;
  std::vector<double> bound;
  double M = 0.0;
  /// roots strictly decreasing from the first index where they start to fall
  bool eventually_decreasing() const;
  /// roots[n] < bound[n] for every n >= 3
  bool below_bound() const;
};

/// ||L^{-n}|| estimated by the discrete L2(Omega x Omega) norm of K_n.
NormReport quasinilpotency_trend(const IteratedKernelStack& stack);

/// Discrete ||B||^2 over (Omega_0 x Omega_0) for B = theta(x - x1) G(x - x1, y, y1),
/// by tensor Gauss quadrature with boundary-layer grading.
double leading_block_norm2(const SeriesTruncation& trunc = {});

/// sum_k [1/(2 k^2 pi^2) - (1 - exp(-2 k^2 pi^2)) / (4 k^4 pi^4)], from the sine expansion of G.
double leading_block_norm2_exact();

struct AprioriRow {
  std::string name;
  double f_norm = 0.0;
  double u_h1_norm = 0.0;
  double F_norm = 0.0;
  /// ||u||_1 / ||f||_0 and ||F|| / ||f||_0, both 0 when f = 0.
  double u_ratio = 0.0;
  double F_ratio = 0.0;
};

/// Discrete ||f||_0 over the whole domain.
double forcing_l2(const ForcingField& f, const CharCurve& curve, int n = 32);

/// Discrete H^1 norm of the direct solution over both subdomains.
double solution_h1(const ProblemSpec& spec, const TraceFunctions& tr, int m = 16);

/// Stability ratios for each forcing at the problem's grid.
std::vector<AprioriRow> check_apriori(const ProblemSpec& spec,
                                      const std::vector<ForcingField>& forcings, int m = 16);

/// Auto runs Neumann and falls back to the dense solve when the discrete
/// iteration diverges.
enum class SpectralMethod { Auto, Neumann, DenseSolve };
const char* to_string(SpectralMethod m);

struct SpectralResult {
  std::complex<double> lambda;
  /// Method that produced u.
  SpectralMethod method = SpectralMethod::DenseSolve;
  /// Neumann steps taken (including a failed attempt under Auto).
  int neumann_iterations = 0;
  bool neumann_converged = false;
  std::vector<SamplePoint> points;
  std::vector<std::complex<double>> u;
  double last_update = 0.0;
  /// max |u - lambda A u - A f| / max |u| of the discrete system.
  double algebraic_residual = 0.0;
  /// sup |u - L^{-1}(f + lambda u)| / sup |u| with L^{-1} the direct pipeline
  /// applied to a bilinear interpolant of u; negative when not computed.
  double residual = -1.0;
};

struct SpectralOptions {
  SpectralMethod method = SpectralMethod::Auto;
  int max_iterations = 500;
  double tol = 1e-10;
  bool compute_residual = true;
};

/// Nystrom discretisation of u = L^{-1} f + lambda L^{-1} u on m x m nodes per
/// subdomain. The leading Gaussian block is cell-averaged on the two nearest
/// columns; hyperbolic source cells use 3 x 3 Gauss points.
class SpectralOperator {
 public:
  SpectralOperator(const ClosedKernel& K, int m);

  const std::vector<SamplePoint>& points() const { return points_; }
  /// A(a, b): weight-included discrete L^{-1}.
  double operator()(std::size_t a, std::size_t b) const { return A_[a * points_.size() + b]; }
  std::vector<double> apply(const std::vector<double>& g) const;
  const ClosedKernel& kernel() const { return K_; }
  double h() const { return h_; }

 private:
  const ClosedKernel& K_;
  std::vector<SamplePoint> points_;
  std::vector<double> A_;
  double h_ = 0.0;
};

SpectralResult solve_spectral(const SpectralOperator& op, std::complex<double> lambda,
                              const ForcingField& f, const SpectralOptions& opt = {});

}  // namespace mixedsolve
