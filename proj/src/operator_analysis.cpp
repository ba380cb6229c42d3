#include "mixedsolve/operator_analysis.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/parallel.hpp"
#include "mixedsolve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace mixedsolve {

namespace {

using std::numbers::pi;
const double kSqrtPi = std::sqrt(pi);

bool same_column(const SamplePoint& a, const SamplePoint& b) {
  return !a.hyperbolic && !b.hyperbolic && a.column == b.column;
}

// Output abscissa and bound distance for pair (a, b) at offset fraction `off` of h.
// Returns false for non-causal pairs.
bool pair_geometry(const SamplePoint& a, const SamplePoint& b, double h, double off,
                   double& x_out, double& d) {
  if (same_column(a, b)) {
    d = off * h;
    x_out = b.x + d;
    return true;
  }
  d = a.x - b.x;
  x_out = a.x;
  return d > 0.0;
}

// int_{ya}^{yb} G(t, y, y1) dy1 from the image series.
double green_strip_integral(double t, double y, double ya, double yb) {
  const double s = 2.0 * std::sqrt(t);
  double v = 0.0;
  for (int m = -3; m <= 3; ++m) {
    const double o = 2.0 * m;
    v += 0.5 * (std::erf((y - ya + o) / s) - std::erf((y - yb + o) / s));
    v -= 0.5 * (std::erf((y + yb + o) / s) - std::erf((y + ya + o) / s));
  }
  return v;
}

// int over the source cell of theta(x - x1) G(x - x1, y, y1).
double leading_cell_integral(double x, double y, double xc, double yc, double h) {
  const double t_lo = std::max(0.0, x - (xc + 0.5 * h));
  const double t_hi = x - (xc - 0.5 * h);
  if (t_hi <= 0.0) return 0.0;
  const double ya = std::max(0.0, yc - 0.5 * h), yb = std::min(1.0, yc + 0.5 * h);
  return quad::composite<16>(
      [&](double s) {
        const double t = s * s;
        return t > 0.0 ? 2.0 * s * green_strip_integral(t, y, ya, yb) : 0.0;
      },
      std::sqrt(t_lo), std::sqrt(t_hi), 4);
}

double weighted_l2(const std::vector<SamplePoint>& p, const std::vector<double>& K) {
  const std::size_t N = p.size();
  double s = 0.0;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) s += p[a].w * p[b].w * K[a * N + b] * K[a * N + b];
  return std::sqrt(s);
}

}  // namespace

std::vector<SamplePoint> coarse_sample_points(const CharCurve& curve, int n4) {
  if (n4 < 2) throw ConfigError("coarse grid needs at least 2 cells per axis");
  const double h = 1.0 / n4;
  std::vector<SamplePoint> pts;
  pts.reserve(static_cast<std::size_t>(2 * n4 * n4));
  for (int i = 0; i < n4; ++i)
    for (int j = 0; j < n4; ++j) pts.push_back({(i + 0.5) * h, (j + 0.5) * h, h * h, false, i});
  for (int k = 0; k < n4; ++k) {
    const double eta = (k + 0.5) * h;
    const double lam = lambda_of_eta(curve, eta);
    for (int j = 0; j < n4; ++j) {
      const double xi = lam + (j + 0.5) * h * (eta - lam);
      const CartPoint c = from_characteristic(xi, eta);
      pts.push_back({c.x, c.y, 0.5 * (eta - lam) * h * h, true, -1});
    }
  }
  return pts;
}

namespace {

// kernel(x, y, b): K at output (x, y) for the source node b.
IteratedKernelStack sample_indexed(const std::vector<SamplePoint>& points, double h,
                                   const std::function<double(double, double, std::size_t)>& kernel) {
  IteratedKernelStack st;
  st.points = points;
  st.h = h;
  const std::size_t N = points.size();
  st.dist.assign(N * N, 0.0);
  std::vector<double> K1(N * N, 0.0);
  std::vector<double> diag_coarse(N, 0.0), diag_fine(N, 0.0), off_diag(N, 0.0);
  parallel_for(N, [&](std::size_t b) {
    for (std::size_t a = 0; a < N; ++a) {
      double x_out, d;
      const bool causal = pair_geometry(points[a], points[b], h, 1.0 / 3.0, x_out, d);
      st.dist[a * N + b] = d;
      if (!causal) continue;
      const double v = kernel(x_out, points[a].y, b);
      K1[a * N + b] = v;
      const double r = std::sqrt(d) * std::abs(v);
      if (same_column(points[a], points[b])) {
        diag_coarse[b] = std::max(diag_coarse[b], r);
        double xf, df;
        pair_geometry(points[a], points[b], h, 1.0 / 9.0, xf, df);
        diag_fine[b] = std::max(
            diag_fine[b], std::sqrt(df) * std::abs(kernel(xf, points[a].y, b)));
      } else {
        off_diag[b] = std::max(off_diag[b], r);
      }
    }
  });
  const double Mc = *std::max_element(diag_coarse.begin(), diag_coarse.end());
  const double Mf = *std::max_element(diag_fine.begin(), diag_fine.end());
  const double Mo = *std::max_element(off_diag.begin(), off_diag.end());
  // sqrt(d) K = M + c sqrt(d) near the diagonal; extrapolate from d = h/3 and h/9
  const double s3 = std::sqrt(3.0);
  const double Mx = (s3 * Mf - Mc) / (s3 - 1.0);
  st.M_coarse = std::max(Mc, Mo);
  st.M_fine = std::max(Mf, Mo);
  st.M = std::max({st.M_coarse, st.M_fine, Mx});
  st.K.push_back(std::move(K1));
  return st;
}

}  // namespace

IteratedKernelStack sample_kernel(const std::vector<SamplePoint>& points, double h,
                                  const std::function<double(double, double, double, double)>& kernel) {
  return sample_indexed(points, h, [&](double x, double y, std::size_t b) {
    return kernel(x, y, points[b].x, points[b].y);
  });
}

IteratedKernelStack sample_closed_kernel(const ClosedKernel& K, int n4) {
  const std::vector<SamplePoint> pts = coarse_sample_points(K.spec().curve, n4);
  std::vector<ClosedKernel::SourceResponse> resp(pts.size());
  parallel_for(pts.size(), [&](std::size_t b) { resp[b] = K.response(pts[b].x, pts[b].y); });
  return sample_indexed(pts, 1.0 / n4, [&](double x, double y, std::size_t b) {
    return K.evaluate(resp[b], x, y);
  });
}

void iterate_kernels(IteratedKernelStack& st, int n_max) {
  const std::size_t N = st.size();
  st.K.reserve(static_cast<std::size_t>(std::max(n_max, 1)));
  const std::vector<double>& K1 = st.K.front();
  while (static_cast<int>(st.K.size()) < n_max) {
    const std::vector<double>& prev = st.K.back();
    std::vector<double> next(N * N, 0.0);
    parallel_for(N, [&](std::size_t a) {
      double* row = &next[a * N];
      for (std::size_t c = 0; c < N; ++c) {
        const double k = K1[a * N + c] * st.points[c].w;
        if (k == 0.0) continue;
        const double* src = &prev[c * N];
        for (std::size_t b = 0; b < N; ++b) row[b] += k * src[b];
      }
    });
    for (double v : next)
      if (!std::isfinite(v)) throw DivergenceError("iterated kernel overflow");
    st.K.push_back(std::move(next));
  }
}

double iterated_kernel_bound(double M, int n, double d) {
  return std::pow(kSqrtPi * M, n) * std::pow(1.5, n - 1) * std::pow(d, 0.5 * n - 1.0) /
         std::tgamma(0.5 * n);
}

bool IteratedBoundReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) {
    return r.violations == 0 && r.causality_violations == 0;
  });
}

IteratedBoundReport check_iterated_bound(const IteratedKernelStack& st, bool throw_on_violation) {
  IteratedBoundReport rep;
  rep.M = st.M;
  const std::size_t N = st.size();
  for (int n = 1; n <= static_cast<int>(st.K.size()); ++n) {
    IteratedBoundReport::Row row;
    row.n = n;
    row.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b) {
        const double v = std::abs(st.at(n, a, b));
        const double d = st.dist[a * N + b];
        if (d <= 0.0) {
          if (v != 0.0) ++row.causality_violations;
          continue;
        }
        if (v == 0.0) continue;
        const double slack = iterated_kernel_bound(st.M, n, d) / v;
        row.min_slack = std::min(row.min_slack, slack);
        // n = 1 is tight by the definition of M
        if (slack < 1.0 - 1e-12) ++row.violations;
      }
    rep.rows.push_back(row);
    if (throw_on_violation && (row.violations || row.causality_violations)) {
      throw BoundViolation("iterated kernel bound fails at n = " + std::to_string(n) +
                           " (min slack " + std::to_string(row.min_slack) + ")");
    }
  }
  return rep;
}

double bound_curve(double M, int n) {
  return std::exp(n * std::log(1.5 * kSqrtPi * M) - std::lgamma(1.0 + 0.5 * n));
}

bool NormReport::eventually_decreasing() const {
  if (roots.size() < 3) return false;
  std::size_t k = roots.size() - 1;
  while (k > 0 && roots[k] < roots[k - 1]) --k;
  return roots.size() - k >= 3 && roots.back() < roots.front();
}

bool NormReport::below_bound() const {
  for (std::size_t i = 0; i < n.size(); ++i)
    if (n[i] >= 3 && !(roots[i] < bound[i])) return false;
  return true;
}

NormReport quasinilpotency_trend(const IteratedKernelStack& st) {
  NormReport r;
  r.M = st.M;
  for (int k = 1; k <= static_cast<int>(st.K.size()); ++k) {
    const double nrm = weighted_l2(st.points, st.K[k - 1]);
    r.n.push_back(k);
    r.norms.push_back(nrm);
    r.roots.push_back(std::pow(nrm, 1.0 / k));
    r.bound.push_back(bound_curve(st.M, k));
  }
  return r;
}

double leading_block_norm2(const SeriesTruncation& trunc) {
  // int_0^1 (1 - t) I(t) dt with I(t) = int int G(t, y, y1)^2 dy dy1; t = s^2.
  auto inner = [&](double t) {
    const double r = 8.0 * std::sqrt(t);
    auto row = [&](double y) {
      const double lo = std::max(0.0, y - r), hi = std::min(1.0, y + r);
      return quad::composite<16>(
          [&](double y1) {
            const double g = green_G(t, y, y1, trunc);
            return g * g;
          },
          lo, hi, 4);
    };
    if (2.0 * r >= 1.0) return quad::composite<16>(row, 0.0, 1.0, 8);
    return quad::composite<16>(row, 0.0, r, 4) + quad::composite<16>(row, r, 1.0 - r, 8) +
           quad::composite<16>(row, 1.0 - r, 1.0, 4);
  };
  std::vector<double> nodes;
  const int panels = 6;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = static_cast<double>(p) / panels, b = static_cast<double>(p + 1) / panels;
    total += quad::gauss_legendre<24>(
        [&](double s) {
          const double t = s * s;
          return 2.0 * s * (1.0 - t) * inner(t);
        },
        a, b);
  }
  return total;
}

double leading_block_norm2_exact() {
  double s = 0.0;
  for (int k = 1; k < 200000; ++k) {
    const double a = static_cast<double>(k) * k * pi * pi;
    s += 1.0 / (2.0 * a) - (1.0 - std::exp(-2.0 * a)) / (4.0 * a * a);
  }
  // tail of sum 1/(2 k^2 pi^2) beyond the cut
  s += 1.0 / (2.0 * pi * pi * 200000.0);
  return s;
}

double forcing_l2(const ForcingField& f, const CharCurve& curve, int n) {
  if (f.is_zero()) return 0.0;
  const int panels = std::max(1, n / 8);
  auto sq = [&](double x, double y) {
    const double v = f(x, y);
    return v * v;
  };
  const double rect = quad::composite<8>(
      [&](double x) {
        return quad::composite<8>([&](double y) { return sq(x, y); }, 0.0, 1.0, panels);
      },
      0.0, 1.0, panels);
  const double hyp = quad::composite<8>(
      [&](double eta) {
        const double lam = lambda_of_eta(curve, eta);
        return 0.5 * quad::composite<8>(
                         [&](double xi) {
                           const CartPoint c = from_characteristic(xi, eta);
                           return sq(c.x, c.y);
                         },
                         lam, eta, panels);
      },
      0.0, 1.0, panels);
  return std::sqrt(rect + hyp);
}

double solution_h1(const ProblemSpec& spec, const TraceFunctions& tr, int m) {
  const double H = 1.0 / m;
  const std::size_t side = static_cast<std::size_t>(m + 1);
  std::vector<double> u(side * side);
  const PotentialQuadrature q = PotentialQuadrature::moderate();
  parallel_for(u.size(), [&](std::size_t idx) {
    u[idx] = parabolic_value(spec, tr, (idx / side) * H, (idx % side) * H, q);
  });
  auto at = [&](std::size_t i, std::size_t j) { return u[i * side + j]; };
  auto diff = [&](std::size_t i, std::size_t j, bool along_x) {
    const std::size_t k = along_x ? i : j;
    auto v = [&](std::size_t s) { return along_x ? at(s, j) : at(i, s); };
    if (k == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * H);
    if (k == side - 1) return (3.0 * v(k) - 4.0 * v(k - 1) + v(k - 2)) / (2.0 * H);
    return (v(k + 1) - v(k - 1)) / (2.0 * H);
  };
  double rect = 0.0;
  for (std::size_t i = 0; i < side; ++i)
    for (std::size_t j = 0; j < side; ++j) {
      const double wx = (i == 0 || i == side - 1) ? 0.5 : 1.0;
      const double wy = (j == 0 || j == side - 1) ? 0.5 : 1.0;
      const double ux = diff(i, j, true), uy = diff(i, j, false);
      rect += wx * wy * H * H * (at(i, j) * at(i, j) + ux * ux + uy * uy);
    }
  // hyperbolic chart midpoints with characteristic central differences
  std::vector<double> hyp(static_cast<std::size_t>(m * m), 0.0);
  parallel_for(hyp.size(), [&](std::size_t idx) {
    const double eta = (idx / m + 0.5) * H;
    const double lam = lambda_of_eta(spec.curve, eta);
    const double s = (idx % m + 0.5) * H;
    const double xi = lam + s * (eta - lam);
    const double d = 1e-3 * H * (eta - lam);
    const double v = hyperbolic_value(spec, tr, xi, eta);
    const double uxi = (hyperbolic_value(spec, tr, xi + d, eta) -
                        hyperbolic_value(spec, tr, xi - d, eta)) / (2.0 * d);
    const double ueta = (hyperbolic_value(spec, tr, xi, eta + d) -
                         hyperbolic_value(spec, tr, xi, eta - d)) / (2.0 * d);
    const double ux = uxi + ueta, uy = uxi - ueta;
    hyp[idx] = 0.5 * (eta - lam) * H * H * (v * v + ux * ux + uy * uy);
  });
  return std::sqrt(rect + std::accumulate(hyp.begin(), hyp.end(), 0.0));
}

std::vector<AprioriRow> check_apriori(const ProblemSpec& spec,
                                      const std::vector<ForcingField>& forcings, int m) {
  std::vector<AprioriRow> rows;
  for (const auto& f : forcings) {
    AprioriRow r;
    r.name = f.name();
    r.f_norm = forcing_l2(f, spec.curve);
    if (r.f_norm == 0.0) {
      rows.push_back(r);
      continue;
    }
    ProblemSpec s = spec;
    s.forcing = f;
    const TraceFunctions tr = solve_trace(s);
    r.u_h1_norm = solution_h1(s, tr, m);
    double F2 = 0.0;
    const auto& g = tr.grid;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double a = tr.F.values[i], b = tr.F.values[i + 1];
      F2 += 0.5 * (g[i + 1] - g[i]) * (a * a + b * b);
    }
    r.F_norm = std::sqrt(F2);
    r.u_ratio = r.u_h1_norm / r.f_norm;
    r.F_ratio = r.F_norm / r.f_norm;
    rows.push_back(r);
  }
  return rows;
}

SpectralOperator::SpectralOperator(const ClosedKernel& K, int m) : K_(K), h_(1.0 / m) {
  const CharCurve& curve = K.spec().curve;
  points_ = coarse_sample_points(curve, m);
  const std::size_t N = points_.size();
  A_.assign(N * N, 0.0);
  // 3 x 3 Gauss points per hyperbolic source cell: the kernel jumps across
  // xi = eta1 and across the edges of the 1/2 block
  constexpr double g3[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  constexpr double w3[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  parallel_for(N, [&](std::size_t b) {
    const SamplePoint& pb = points_[b];
    if (pb.hyperbolic) {
      const std::size_t idx = b - static_cast<std::size_t>(m * m);
      const double k = static_cast<double>(idx / m), j = static_cast<double>(idx % m);
      for (int qi = 0; qi < 3; ++qi) {
        const double eta = (k + 0.5 + 0.5 * g3[qi]) * h_;
        const double lam = lambda_of_eta(curve, eta);
        ClosedKernel::SourceResponse r;
        double wsum = 0.0;
        std::vector<std::pair<CartPoint, double>> sub;
        for (int qj = 0; qj < 3; ++qj) {
          const double s = (j + 0.5 + 0.5 * g3[qj]) * h_;
          const CartPoint c = from_characteristic(lam + s * (eta - lam), eta);
          const double w = 0.125 * (eta - lam) * h_ * h_ * w3[qi] * w3[qj];
          sub.push_back({c, w});
          wsum += w;
        }
        r = K.response(sub[0].first.x, sub[0].first.y);
        for (std::size_t a = 0; a < N; ++a) {
          const SamplePoint& pa = points_[a];
          if (!pa.hyperbolic) {
            // no 1/2 block above the type line: one evaluation per eta1
            A_[a * N + b] += wsum * K.evaluate(r, pa.x, pa.y);
            continue;
          }
          for (const auto& [c, w] : sub) {
            r.x1 = c.x;
            r.y1 = c.y;
            A_[a * N + b] += w * K.evaluate(r, pa.x, pa.y);
          }
        }
      }
      return;
    }
    const ClosedKernel::SourceResponse r = K.response(pb.x, pb.y);
    for (std::size_t a = 0; a < N; ++a) {
      const SamplePoint& pa = points_[a];
      double x_out, d;
      if (!pair_geometry(pa, pb, h_, 1.0 / 3.0, x_out, d)) continue;
      const double v = K.evaluate(r, x_out, pa.y);
      const bool near = !pa.hyperbolic && pa.column - pb.column <= 1;
      if (!near) {
        A_[a * N + b] = pb.w * v;
        continue;
      }
      // the Gaussian block is cell-averaged, the bounded rest is sampled
      const double rest = v - K.leading_block(x_out, pa.y, pb.x, pb.y);
      A_[a * N + b] = pb.w * rest + leading_cell_integral(pa.x, pa.y, pb.x, pb.y, h_);
    }
  });
}

std::vector<double> SpectralOperator::apply(const std::vector<double>& g) const {
  const std::size_t N = points_.size();
  std::vector<double> out(N, 0.0);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) out[a] += A_[a * N + b] * g[b];
  return out;
}

namespace {

using cplx = std::complex<double>;

// Dense complex solve with partial pivoting.
std::vector<cplx> solve_dense(std::vector<cplx> M, std::vector<cplx> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(M[i * n + k]) > std::abs(M[p * n + k])) p = i;
    if (std::abs(M[p * n + k]) == 0.0) throw DivergenceError("singular column block");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(M[k * n + j], M[p * n + j]);
      std::swap(rhs[k], rhs[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx f = M[i * n + k] / M[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) M[i * n + j] -= f * M[k * n + j];
      rhs[i] -= f * rhs[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    for (std::size_t j = k + 1; j < n; ++j) rhs[k] -= M[k * n + j] * rhs[j];
    rhs[k] /= M[k * n + k];
  }
  return rhs;
}

// Node abscissae (i + 1/2) H, optionally padded with a zero node at 0 or 1.
struct PaddedAxis {
  std::vector<double> pos;
  bool pad_low = false;
  bool pad_high = false;

  PaddedAxis(int m, bool low, bool high) : pad_low(low), pad_high(high) {
    if (low) pos.push_back(0.0);
    for (int i = 0; i < m; ++i) pos.push_back((i + 0.5) / m);
    if (high) pos.push_back(1.0);
  }
  // Cell index and weight for c, clamped to the node range.
  std::pair<std::size_t, double> locate(double c) const {
    c = std::clamp(c, pos.front(), pos.back());
    std::size_t k = static_cast<std::size_t>(std::upper_bound(pos.begin(), pos.end(), c) - pos.begin());
    k = std::clamp<std::size_t>(k, 1, pos.size() - 1) - 1;
    return {k, (c - pos[k]) / (pos[k + 1] - pos[k])};
  }
  // Data index of augmented node k, or -1 for a pad node.
  long data_index(std::size_t k) const {
    const long i = static_cast<long>(k) - (pad_low ? 1 : 0);
    const long m = static_cast<long>(pos.size()) - (pad_low ? 1 : 0) - (pad_high ? 1 : 0);
    return (i < 0 || i >= m) ? -1 : i;
  }
};

double bilinear(const std::vector<double>& vals, int m, const PaddedAxis& ax,
                const PaddedAxis& ay, double a, double b) {
  const auto [i, wa] = ax.locate(a);
  const auto [j, wb] = ay.locate(b);
  auto node = [&](std::size_t ii, std::size_t jj) {
    const long di = ax.data_index(ii), dj = ay.data_index(jj);
    return (di < 0 || dj < 0) ? 0.0 : vals[static_cast<std::size_t>(di * m + dj)];
  };
  return (1.0 - wa) * ((1.0 - wb) * node(i, j) + wb * node(i, j + 1)) +
         wa * ((1.0 - wb) * node(i + 1, j) + wb * node(i + 1, j + 1));
}

// Bilinear interpolant of node values on the rectangle (zero on x = 0 and
// y = 1) and on the hyperbolic (eta, s) chart, clamped elsewhere.
ForcingField interpolant(const std::vector<double>& v, const CharCurve& curve, int m) {
  const std::size_t half = static_cast<std::size_t>(m * m);
  std::vector<double> rect(v.begin(), v.begin() + static_cast<long>(half));
  std::vector<double> hyp(v.begin() + static_cast<long>(half), v.end());
  const PaddedAxis rx(m, true, false), ry(m, false, true), plain(m, false, false);
  return ForcingField(
      [=](double x, double y) {
        if (y >= 0.0) return bilinear(rect, m, rx, ry, x, y);
        const double xi = x + y, eta = std::clamp(x - y, 0.0, 1.0);
        const double lam = lambda_of_eta(curve, eta);
        const double s = eta > lam ? (xi - lam) / (eta - lam) : 0.0;
        return bilinear(hyp, m, plain, plain, eta, s);
      },
      Smoothness::L2only, "interpolant");
}

std::vector<double> direct_apply(const ClosedKernel& K, const ForcingField& g,
                                 const std::vector<SamplePoint>& pts) {
  ProblemSpec spec = K.spec();
  spec.forcing = g;
  const TraceFunctions tr = solve_trace(spec);
  std::vector<double> out(pts.size());
  const PotentialQuadrature q = PotentialQuadrature::moderate();
  parallel_for(pts.size(), [&](std::size_t a) {
    out[a] = evaluate_direct(spec, tr, pts[a].x, pts[a].y, q);
  });
  return out;
}

}  // namespace

const char* to_string(SpectralMethod m) {
  switch (m) {
    case SpectralMethod::Auto: return "auto";
    case SpectralMethod::Neumann: return "neumann";
    case SpectralMethod::DenseSolve: return "dense";
  }
  return "?";
}

namespace {

// u_{k+1} = A f + lambda A u_k until the relative update drops below tol.
std::vector<cplx> neumann(const SpectralOperator& op, std::complex<double> lambda,
                          const std::vector<double>& base, const SpectralOptions& opt,
                          SpectralResult& res) {
  const std::size_t N = base.size();
  std::vector<cplx> u(base.begin(), base.end());
  for (int it = 1;; ++it) {
    if (it > opt.max_iterations)
      throw IterationBudgetError("Neumann iteration did not converge in " +
                                 std::to_string(opt.max_iterations) + " steps");
    std::vector<cplx> next(N);
    double upd = 0.0, scale = 1.0;
    for (std::size_t a = 0; a < N; ++a) {
      cplx s = base[a];
      for (std::size_t b = 0; b < N; ++b) s += lambda * op(a, b) * u[b];
      next[a] = s;
      upd = std::max(upd, std::abs(s - u[a]));
      scale = std::max(scale, std::abs(s));
    }
    res.neumann_iterations = it;
    if (!std::isfinite(upd) || scale > 1e150)
      throw IterationBudgetError("Neumann iteration diverged at step " + std::to_string(it));
    u.swap(next);
    res.last_update = upd / scale;
    if (res.last_update < opt.tol) {
      res.neumann_converged = true;
      return u;
    }
  }
}

std::vector<cplx> dense(const SpectralOperator& op, std::complex<double> lambda,
                        const std::vector<double>& base) {
  const std::size_t N = base.size();
  std::vector<cplx> M(N * N), rhs(base.begin(), base.end());
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b) M[a * N + b] = (a == b ? 1.0 : 0.0) - lambda * op(a, b);
  return solve_dense(std::move(M), std::move(rhs));
}

}  // namespace

SpectralResult solve_spectral(const SpectralOperator& op, std::complex<double> lambda,
                              const ForcingField& f, const SpectralOptions& opt) {
  SpectralResult res;
  res.lambda = lambda;
  res.points = op.points();
  const auto& pts = op.points();
  const std::size_t N = pts.size();
  std::vector<double> fv(N);
  for (std::size_t a = 0; a < N; ++a) fv[a] = f(pts[a].x, pts[a].y);
  const std::vector<double> base = op.apply(fv);
  std::vector<cplx> u;
  if (opt.method == SpectralMethod::DenseSolve) {
    u = dense(op, lambda, base);
    res.method = SpectralMethod::DenseSolve;
  } else {
    try {
      u = neumann(op, lambda, base, opt, res);
      res.method = SpectralMethod::Neumann;
    } catch (const IterationBudgetError&) {
      if (opt.method == SpectralMethod::Neumann) throw;
      u = dense(op, lambda, base);
      res.method = SpectralMethod::DenseSolve;
    }
  }
  {
    double r = 0.0, s = 0.0;
    for (std::size_t a = 0; a < N; ++a) {
      cplx v = u[a] - base[a];
      for (std::size_t b = 0; b < N; ++b) v -= lambda * op(a, b) * u[b];
      r = std::max(r, std::abs(v));
      s = std::max(s, std::abs(u[a]));
    }
    res.algebraic_residual = s > 0.0 ? r / s : r;
  }
  res.u = u;

  if (opt.compute_residual) {
    const int m = static_cast<int>(std::lround(1.0 / op.h()));
    std::vector<double> re(N), im(N);
    for (std::size_t a = 0; a < N; ++a) {
      const cplx lu = lambda * u[a];
      re[a] = lu.real();
      im[a] = lu.imag();
    }
    const ForcingField g_re = f.combine(1.0, interpolant(re, op.kernel().spec().curve, m), 1.0);
    const std::vector<double> v_re = direct_apply(op.kernel(), g_re, pts);
    std::vector<double> v_im(N, 0.0);
    if (lambda.imag() != 0.0) {
      const ForcingField g_im = interpolant(im, op.kernel().spec().curve, m);
      v_im = direct_apply(op.kernel(), g_im, pts);
    }
    double r = 0.0, s = 0.0;
    for (std::size_t a = 0; a < N; ++a) {
      r = std::max(r, std::abs(u[a] - cplx(v_re[a], v_im[a])));
      s = std::max(s, std::abs(u[a]));
    }
    res.residual = s > 0.0 ? r / s : 0.0;
  }
  return res;
}

}  // namespace mixedsolve
