#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace mixedsolve {

/// Nodes 0 = x_0 < ... < x_n = 1; `intervals()` cells, `size()` nodes.
class Grid1D {
 public:
  /// Uniform grid with n cells (n + 1 nodes, h = 1/n).
  static Grid1D uniform(int n);
  /// x_i = (i/n)^2, refined near 0.
  static Grid1D graded(int n);
  /// Arbitrary strictly increasing nodes from 0 to 1.
  static Grid1D from_nodes(std::vector<double> nodes);

  std::size_t size() const { return nodes_.size(); }
  int intervals() const { return static_cast<int>(nodes_.size()) - 1; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  /// Largest cell width.
  double h() const { return h_; }
  bool is_uniform() const { return uniform_; }
  /// Index of the cell containing x (clamped to [0, intervals()-1]).
  std::size_t cell_of(double x) const;

 private:
  std::vector<double> nodes_;
  double h_ = 0.0;
  bool uniform_ = false;
};

/// Dense lower-triangular array, row-major, (i, j) with j <= i.
class LowerTriangular {
 public:
  LowerTriangular() = default;
  explicit LowerTriangular(std::size_t n, double fill = 0.0)
      : n_(n), data_(n * (n + 1) / 2, fill) {}
  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * (i + 1) / 2 + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * (i + 1) / 2 + j];
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * (i + 1) / 2, i + 1};
  }
  double max_abs() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

enum class SingularityClass { Regular, InverseSqrt };

/// For Regular: the kernel kappa(x, t) itself, evaluated for t <= x.
/// For InverseSqrt: the cofactor sqrt(x - t) kappa(x, t), continuous up to
/// t = x (the caller supplies its diagonal limit).
using KernelFn = std::function<double(double, double)>;

/// Discretization of int_0^{x_i} kappa(x_i, t) phi(t) dt ~ sum_j W(i,j) phi(x_j).
///
/// InverseSqrt kernels may carry a bounded part:
/// kappa = r(x,t) / sqrt(x - t) + g(x,t).
struct KernelMatrix {
  Grid1D grid;
  SingularityClass singularity = SingularityClass::Regular;
  LowerTriangular weights;
  /// kappa samples (Regular) or cofactor samples r (InverseSqrt).
  LowerTriangular samples;
  /// Bounded part g of an InverseSqrt kernel (empty when absent).
  LowerTriangular regular;
  /// Weights of the r / sqrt(x - t) part alone (InverseSqrt only).
  LowerTriangular singular_weights;

  bool has_regular() const { return regular.size() > 0; }
};

/// Product-integration weights for one cell [a, b] against (x - t)^(-1/2),
/// x >= b, with the integrand's regular part linear on the cell.
/// Returns {weight at a, weight at b}.
std::pair<double, double> cell_weights_right_singular(double a, double b, double x);
/// Same against (t - s)^(-1/2), s <= a.
std::pair<double, double> cell_weights_left_singular(double a, double b, double s);
/// Same against (x - t)^(-1/2) (t - s)^(-1/2), s <= a < b <= x.
std::pair<double, double> cell_weights_two_sided(double a, double b, double s, double x);

/// Bound on |cofactor| beyond which an InverseSqrt kernel is reported as
/// misclassified.
inline constexpr double kDefaultCofactorBound = 1e6;

KernelMatrix build_kernel_matrix(const KernelFn& kappa, const Grid1D& grid,
                                 SingularityClass cls,
                                 double cofactor_bound = kDefaultCofactorBound);

/// InverseSqrt kernel r / sqrt(x - t) + g with an explicit bounded part; the
/// cofactor r gets product weights and g trapezoid weights.
KernelMatrix build_kernel_matrix(const KernelFn& cofactor, const KernelFn& regular,
                                 const Grid1D& grid,
                                 double cofactor_bound = kDefaultCofactorBound);

/// Forward marching for phi(x_i) + sum_{j<=i} W(i,j) phi(x_j) = rhs(x_i).
std::vector<double> solve_volterra2(const KernelMatrix& K, std::span<const double> rhs);

/// Discrete Abel operator: (A phi)(x_i) = int_0^{x_i} phi(t) (x_i - t)^(-1/2) dt,
/// exact for piecewise-linear phi.
std::vector<double> forward_abel(std::span<const double> phi, const Grid1D& grid);

/// Solves int_0^x phi(t) (x - t)^(-1/2) dt = g(x) on the grid.
///
/// The discrete operator of forward_abel is inverted by forward substitution;
/// the value at x = 0 comes from fitting g ~ 2a sqrt(x) + (4/3) b x^(3/2) on the
/// first two cells unless `phi0` is supplied. Exact (to rounding) for phi linear.
std::vector<double> abel_invert(std::span<const double> g, const Grid1D& grid,
                                double g0_tol = 1e-9,
                                std::optional<double> phi0 = std::nullopt);

/// Resolvent of a Volterra kernel by the Neumann recurrence
/// kappa_{n+1}(x,t) = int_t^x kappa(x,z) kappa_n(z,t) dz.
///
/// For InverseSqrt kernels Gamma = -r / sqrt(x - t) + gamma_reg; `regular`
/// holds gamma_reg (the bounded part of kappa_1 and all iterates n >= 2). For
/// Regular kernels `regular` holds the whole Gamma.
struct ResolventTable {
  Grid1D grid;
  SingularityClass singularity = SingularityClass::Regular;
  LowerTriangular regular;
  /// Gamma_1(x_i, x_j) = 1 + int_{x_j}^{x_i} Gamma(z, x_j) dz.
  LowerTriangular gamma1;
  int terms_used = 0;
  double last_term_norm = 0.0;

  /// Gamma(x_i, x_j) for j < i (includes the singular part if any).
  double gamma(const KernelMatrix& K, std::size_t i, std::size_t j) const;
};

inline constexpr double kDefaultSeriesTol = 1e-12;
inline constexpr int kMaxNeumannTerms = 200;

ResolventTable resolvent(const KernelMatrix& K, double series_tol = kDefaultSeriesTol);

/// phi = F + int_0^x Gamma(x,t) F(t) dt, discretized with the same weights as K.
std::vector<double> apply_resolvent(const ResolventTable& R, const KernelMatrix& K,
                                    std::span<const double> F);

/// Cumulative trapezoid: out_i = int_0^{x_i} v.
std::vector<double> cumulative_trapezoid(std::span<const double> v, const Grid1D& grid);

/// Linear interpolation of nodal values at x.
double interpolate_linear(std::span<const double> v, const Grid1D& grid, double x);

}  // namespace mixedsolve
