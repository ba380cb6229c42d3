#include "mixedsolve/integral_engine.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mixedsolve {

Grid1D Grid1D::uniform(int n) {
  if (n < 1) throw ConfigError("grid needs at least one cell");
  Grid1D g;
  g.nodes_.resize(n + 1);
  for (int i = 0; i <= n; ++i) g.nodes_[i] = static_cast<double>(i) / n;
  g.h_ = 1.0 / n;
  g.uniform_ = true;
  return g;
}

Grid1D Grid1D::graded(int n) {
  if (n < 1) throw ConfigError("grid needs at least one cell");
  std::vector<double> nodes(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double s = static_cast<double>(i) / n;
    nodes[i] = s * s;
  }
  return from_nodes(std::move(nodes));
}

Grid1D Grid1D::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2 || nodes.front() != 0.0 || nodes.back() != 1.0) {
    throw ConfigError("grid nodes must start at 0 and end at 1");
  }
  Grid1D g;
  g.h_ = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double d = nodes[i] - nodes[i - 1];
    if (!(d > 0.0)) throw ConfigError("grid nodes must be strictly increasing");
    g.h_ = std::max(g.h_, d);
  }
  g.nodes_ = std::move(nodes);
  g.uniform_ = false;
  return g;
}

std::size_t Grid1D::cell_of(double x) const {
  const std::size_t last = nodes_.size() - 2;
  if (uniform_) {
    const double pos = x * intervals();
    if (pos <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(pos), last);
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  if (it == nodes_.begin()) return 0;
  return std::min(static_cast<std::size_t>(it - nodes_.begin() - 1), last);
}

double LowerTriangular::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Moments of (dist)^(-1/2) on a cell of width w whose endpoint distances to
// the singular point are `near` and `far`; returns {near weight, far weight}.
std::pair<double, double> one_sided(double w, double near, double far) {
  const double sn = std::sqrt(std::max(near, 0.0));
  const double sf = std::sqrt(std::max(far, 0.0));
  const double denom = (sn + sf) * (sn + sf);
  const double near_w = (2.0 / 3.0) * w * (2.0 * sf + sn) / denom;
  const double far_w = (2.0 / 3.0) * w * (sf + 2.0 * sn) / denom;
  return {near_w, far_w};
}

}  // namespace

std::pair<double, double> cell_weights_right_singular(double a, double b, double x) {
  const auto [near_w, far_w] = one_sided(b - a, x - b, x - a);
  return {far_w, near_w};
}

std::pair<double, double> cell_weights_left_singular(double a, double b, double s) {
  const auto [near_w, far_w] = one_sided(b - a, a - s, b - s);
  return {near_w, far_w};
}

std::pair<double, double> cell_weights_two_sided(double a, double b, double s, double x) {
  const double L = x - s;
  auto angle = [&](double z) {
    return std::asin(std::sqrt(std::clamp((z - s) / L, 0.0, 1.0)));
  };
  const double ta = angle(a);
  const double tb = angle(b);
  const double m0 = 2.0 * (tb - ta);
  // int_a^b (z - a) dz / sqrt((x-z)(z-s)) with z = s + L sin^2(theta)
  const double m1 = 2.0 * ((s - a) * (tb - ta) +
                           L * (0.5 * (tb - ta) - 0.25 * (std::sin(2 * tb) - std::sin(2 * ta))));
  const double wb = m1 / (b - a);
  return {m0 - wb, wb};
}

namespace {

void check_cofactors(const KernelMatrix& K, double cofactor_bound) {
  const Grid1D& grid = K.grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = K.samples(i, j);
      const double g = K.has_regular() ? K.regular(i, j) : 0.0;
      if (!std::isfinite(v) || !std::isfinite(g) ||
          (K.singularity == SingularityClass::InverseSqrt && std::abs(v) > cofactor_bound)) {
        throw SingularityError("kernel cofactor not bounded near the diagonal at x = " +
                               std::to_string(grid[i]) + ", t = " + std::to_string(grid[j]) +
                               " (misclassified singularity?)");
      }
    }
  }
}

void fill_weights(KernelMatrix& K) {
  const Grid1D& grid = K.grid;
  const std::size_t n = grid.size();
  K.weights = LowerTriangular(n);
  if (K.singularity == SingularityClass::InverseSqrt) K.singular_weights = LowerTriangular(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = grid[i];
    for (std::size_t c = 0; c < i; ++c) {
      const double a = grid[c];
      const double b = grid[c + 1];
      const double half = 0.5 * (b - a);
      if (K.singularity == SingularityClass::InverseSqrt) {
        const auto [wa, wb] = cell_weights_right_singular(a, b, x);
        K.singular_weights(i, c) += wa * K.samples(i, c);
        K.singular_weights(i, c + 1) += wb * K.samples(i, c + 1);
        if (K.has_regular()) {
          K.weights(i, c) += half * K.regular(i, c);
          K.weights(i, c + 1) += half * K.regular(i, c + 1);
        }
      } else {
        K.weights(i, c) += half * K.samples(i, c);
        K.weights(i, c + 1) += half * K.samples(i, c + 1);
      }
    }
    if (K.singularity == SingularityClass::InverseSqrt) {
      for (std::size_t j = 0; j <= i; ++j) K.weights(i, j) += K.singular_weights(i, j);
    }
  });
}

}  // namespace

KernelMatrix build_kernel_matrix(const KernelFn& kappa, const Grid1D& grid,
                                 SingularityClass cls, double cofactor_bound) {
  const std::size_t n = grid.size();
  KernelMatrix K;
  K.grid = grid;
  K.singularity = cls;
  K.samples = LowerTriangular(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = grid[i];
    for (std::size_t j = 0; j <= i; ++j) K.samples(i, j) = kappa(x, grid[j]);
  });
  check_cofactors(K, cofactor_bound);
  fill_weights(K);
  return K;
}

KernelMatrix build_kernel_matrix(const KernelFn& cofactor, const KernelFn& regular,
                                 const Grid1D& grid, double cofactor_bound) {
  const std::size_t n = grid.size();
  KernelMatrix K;
  K.grid = grid;
  K.singularity = SingularityClass::InverseSqrt;
  K.samples = LowerTriangular(n);
  K.regular = LowerTriangular(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = grid[i];
    for (std::size_t j = 0; j <= i; ++j) {
      K.samples(i, j) = cofactor(x, grid[j]);
      K.regular(i, j) = regular(x, grid[j]);
    }
  });
  check_cofactors(K, cofactor_bound);
  fill_weights(K);
  return K;
}

std::vector<double> solve_volterra2(const KernelMatrix& K, std::span<const double> rhs) {
  const std::size_t n = K.grid.size();
  if (rhs.size() != n) throw DataError("solve_volterra2: rhs and kernel grids differ");
  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = K.weights.row(i);
    double acc = rhs[i];
    for (std::size_t j = 0; j < i; ++j) acc -= row[j] * phi[j];
    const double diag = 1.0 + row[i];
    if (std::abs(diag) < 1e-8) {
      throw MarchingError("diagonal coefficient 1 + W(i,i) vanishes at x = " +
                          std::to_string(K.grid[i]));
    }
    phi[i] = acc / diag;
  }
  return phi;
}

namespace {

KernelMatrix abel_matrix(const Grid1D& grid) {
  return build_kernel_matrix([](double, double) { return 1.0; }, grid,
                             SingularityClass::InverseSqrt);
}

}  // namespace

std::vector<double> forward_abel(std::span<const double> phi, const Grid1D& grid) {
  if (phi.size() != grid.size()) throw DataError("forward_abel: size mismatch");
  const KernelMatrix A = abel_matrix(grid);
  std::vector<double> g(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto row = A.weights.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += row[j] * phi[j];
    g[i] = acc;
  }
  return g;
}

std::vector<double> abel_invert(std::span<const double> g, const Grid1D& grid,
                                double g0_tol, std::optional<double> phi0) {
  const std::size_t n = grid.size();
  if (g.size() != n) throw DataError("abel_invert: size mismatch");
  double scale = 1.0;
  for (double v : g) scale = std::max(scale, std::abs(v));
  if (std::abs(g[0]) > g0_tol * scale) {
    throw DataError("abel_invert: g(0) must vanish (got " + std::to_string(g[0]) + ")");
  }
  std::vector<double> phi(n, 0.0);
  if (phi0) {
    phi[0] = *phi0;
  } else if (n < 3) {
    if (n == 2) phi[1] = phi[0] = g[1] / (2.0 * std::sqrt(grid[1]));
    return phi;
  } else {
    // g(x) ~ 2 a sqrt(x) + (4/3) b x^{3/2} for phi ~ a + b x
    const double x1 = grid[1];
    const double x2 = grid[2];
    const double m11 = 2.0 * std::sqrt(x1), m12 = (4.0 / 3.0) * x1 * std::sqrt(x1);
    const double m21 = 2.0 * std::sqrt(x2), m22 = (4.0 / 3.0) * x2 * std::sqrt(x2);
    const double det = m11 * m22 - m12 * m21;
    phi[0] = (g[1] * m22 - g[2] * m12) / det;
  }

  const KernelMatrix A = abel_matrix(grid);
  for (std::size_t i = 1; i < n; ++i) {
    const auto row = A.weights.row(i);
    double acc = g[i];
    for (std::size_t j = 0; j < i; ++j) acc -= row[j] * phi[j];
    phi[i] = acc / row[i];
  }
  return phi;
}

double ResolventTable::gamma(const KernelMatrix& K, std::size_t i, std::size_t j) const {
  double v = regular(i, j);
  if (singularity == SingularityClass::InverseSqrt && i != j) {
    v -= K.samples(i, j) / std::sqrt(grid[i] - grid[j]);
  }
  return v;
}

ResolventTable resolvent(const KernelMatrix& K, double series_tol) {
  const Grid1D& grid = K.grid;
  const std::size_t n = grid.size();
  ResolventTable R;
  R.grid = grid;
  R.singularity = K.singularity;
  R.regular = LowerTriangular(n);

  const bool singular = K.singularity == SingularityClass::InverseSqrt;
  const bool mixed = singular && K.has_regular();
  // bounded kernel part used with trapezoid weights
  const LowerTriangular& g = singular ? K.regular : K.samples;
  const bool has_g = !singular || mixed;

  // composition weights: contribution of kappa_n(c, j) and kappa_n(c+1, j)
  // on cell c of row i
  LowerTriangular left_w(n), right_w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < i; ++c) {
      const double a = grid[c], b = grid[c + 1];
      if (singular) {
        const auto [wa, wb] = cell_weights_right_singular(a, b, grid[i]);
        left_w(i, c) = wa * K.samples(i, c);
        right_w(i, c) = wb * K.samples(i, c + 1);
      }
      if (has_g) {
        left_w(i, c) += 0.5 * (b - a) * g(i, c);
        right_w(i, c) += 0.5 * (b - a) * g(i, c + 1);
      }
    }
  }

  LowerTriangular term(n);
  int count = 1;
  if (singular) {
    if (mixed) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) R.regular(i, j) = -g(i, j);
    }
    // kappa_2: the singular-singular product uses the two-sided weight
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = 0; j < i; ++j) {
        double acc = 0.0;
        for (std::size_t c = j; c < i; ++c) {
          const double a = grid[c], b = grid[c + 1];
          const auto [ta, tb] = cell_weights_two_sided(a, b, grid[j], grid[i]);
          acc += ta * K.samples(i, c) * K.samples(c, j) + tb * K.samples(i, c + 1) * K.samples(c + 1, j);
          if (mixed) {
            const auto [ra, rb] = cell_weights_right_singular(a, b, grid[i]);
            const auto [la, lb] = cell_weights_left_singular(a, b, grid[j]);
            const double half = 0.5 * (b - a);
            acc += ra * K.samples(i, c) * g(c, j) + rb * K.samples(i, c + 1) * g(c + 1, j);
            acc += la * g(i, c) * K.samples(c, j) + lb * g(i, c + 1) * K.samples(c + 1, j);
            acc += half * (g(i, c) * g(c, j) + g(i, c + 1) * g(c + 1, j));
          }
        }
        term(i, j) = acc;
      }
      term(i, i) = std::numbers::pi * K.samples(i, i) * K.samples(i, i);
    });
    count = 2;
  } else {
    term = K.samples;
  }

  int sign = count % 2 == 0 ? 1 : -1;
  while (true) {
    const double norm = term.max_abs();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) R.regular(i, j) += sign * term(i, j);
    R.terms_used = count;
    R.last_term_norm = norm;
    if (norm < series_tol) break;
    if (count >= kMaxNeumannTerms) {
      throw DivergenceError("Neumann series did not reach tolerance in " +
                            std::to_string(kMaxNeumannTerms) + " terms");
    }
    LowerTriangular next(n);
    parallel_for(n, [&](std::size_t i) {
      for (std::size_t j = 0; j < i; ++j) {
        double acc = 0.0;
        for (std::size_t c = j; c < i; ++c) {
          acc += left_w(i, c) * term(c, j) + right_w(i, c) * term(c + 1, j);
        }
        next(i, j) = acc;
      }
    });
    term = std::move(next);
    sign = -sign;
    ++count;
  }

  R.gamma1 = LowerTriangular(n);
  parallel_for(n, [&](std::size_t j) {
    double acc = 1.0;
    R.gamma1(j, j) = 1.0;
    for (std::size_t i = j + 1; i < n; ++i) {
      const double a = grid[i - 1], b = grid[i];
      acc += 0.5 * (b - a) * (R.regular(i - 1, j) + R.regular(i, j));
      if (singular) {
        const auto [wa, wb] = cell_weights_left_singular(a, b, grid[j]);
        acc -= wa * K.samples(i - 1, j) + wb * K.samples(i, j);
      }
      R.gamma1(i, j) = acc;
    }
  });
  return R;
}

std::vector<double> apply_resolvent(const ResolventTable& R, const KernelMatrix& K,
                                    std::span<const double> F) {
  const std::size_t n = R.grid.size();
  if (F.size() != n) throw DataError("apply_resolvent: size mismatch");
  const bool singular = R.singularity == SingularityClass::InverseSqrt;
  std::vector<double> out(F.begin(), F.end());
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < i; ++c) {
      const double half = 0.5 * (R.grid[c + 1] - R.grid[c]);
      acc += half * (R.regular(i, c) * F[c] + R.regular(i, c + 1) * F[c + 1]);
    }
    if (singular) {
      const auto row = K.singular_weights.row(i);
      for (std::size_t j = 0; j <= i; ++j) acc -= row[j] * F[j];
    }
    out[i] += acc;
  }
  return out;
}

std::vector<double> cumulative_trapezoid(std::span<const double> v, const Grid1D& grid) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (v[i] + v[i - 1]);
  }
  return out;
}

double interpolate_linear(std::span<const double> v, const Grid1D& grid, double x) {
  const std::size_t c = grid.cell_of(x);
  const double a = grid[c], b = grid[c + 1];
  const double s = (x - a) / (b - a);
  return (1.0 - s) * v[c] + s * v[c + 1];
}

}  // namespace mixedsolve
