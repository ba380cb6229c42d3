#include "mixedsolve/errors.hpp"
#include "mixedsolve/parallel.hpp"
#include "mixedsolve/quadrature.hpp"
#include "mixedsolve/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mixedsolve {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double trace_P(double u, double y, const SeriesTruncation& trunc) {
  return u > 0.0 ? green_Gy1_trace(u, y, trunc) : 0.0;
}

}  // namespace

ClosedKernel::ClosedKernel(const ProblemSpec& spec) : spec_(spec) {
  spec_.validate();
  alpha_zero_ = spec_.params.alpha == 0.0;
  const Grid1D& grid = spec_.grid;
  const KernelMatrix K = trace_kernel(spec_);
  const ResolventTable R = resolvent(K);
  terms_ = R.terms_used;
  if (!alpha_zero_) {
    Z_ = R.gamma1;
    return;
  }
  const std::size_t n = grid.size();
  Z_ = LowerTriangular(n);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = 0; j < i; ++j) {
      double acc = 0.0;
      for (std::size_t c = j; c < i; ++c) {
        const auto [wa, wb] = cell_weights_left_singular(grid[c], grid[c + 1], grid[j]);
        acc += wa * R.gamma1(i, c) + wb * R.gamma1(i, c + 1);
      }
      Z_(i, j) = acc;
    }
  });
}

double ClosedKernel::table_at(std::size_t i, double t) const {
  const Grid1D& g = spec_.grid;
  const double x = g[i];
  const double base = Z_(i, i);
  if (i == 0 || t >= x) return base;
  t = std::max(t, 0.0);
  auto w = [&](std::size_t j) { return (Z_(i, j) - base) / std::sqrt(x - g[j]); };
  std::size_t c = g.cell_of(t);
  if (c >= i) c = i - 1;
  double wt;
  if (c + 1 < i) {
    const double s = (t - g[c]) / (g[c + 1] - g[c]);
    wt = (1.0 - s) * w(c) + s * w(c + 1);
  } else if (i >= 2) {
    const double s = (t - g[i - 2]) / (g[i - 1] - g[i - 2]);
    wt = (1.0 - s) * w(i - 2) + s * w(i - 1);
  } else {
    wt = w(0);
  }
  return base + std::sqrt(x - t) * wt;
}

void ClosedKernel::accumulate_parabolic_weights(double x1, double y1, double w,
                                                std::vector<double>& A,
                                                std::vector<double>& B) const {
  const Grid1D& g = spec_.grid;
  const SeriesTruncation& tr = spec_.trunc;
  const std::size_t cells = g.size() - 1;
  std::size_t c0 = g.cell_of(x1);
  // running values at lo
  double lo = x1;
  double C_lo = 0.0, M_lo = 0.0, P_lo = 0.0;
  for (std::size_t c = c0; c < cells; ++c) {
    const double a = g[c], hi = g[c + 1];
    if (!(hi > lo)) continue;
    const double width = hi - a;
    const double u = hi - x1;
    const double C_hi = green_trace_integral(u, y1, tr);
    double m0, m1;
    if (!alpha_zero_) {
      const double M_hi = green_trace_moment1(u, y1, tr);
      m0 = C_hi - C_lo;
      m1 = (x1 - a) * m0 + (M_hi - M_lo);
      M_lo = M_hi;
    } else {
      const double P_hi = trace_P(u, y1, tr);
      m0 = P_hi - P_lo;
      m1 = (hi - a) * P_hi - (lo - a) * P_lo - (C_hi - C_lo);
      P_lo = P_hi;
    }
    C_lo = C_hi;
    lo = hi;
    A[c] += w * (m0 - m1 / width);
    B[c] += w * (m1 / width);
  }
}

std::vector<double> ClosedKernel::apply_parabolic_weights(const std::vector<double>& A,
                                                          const std::vector<double>& B) const {
  const std::size_t n = spec_.grid.size();
  const double pref = alpha_zero_ ? 1.0 / kSqrtPi : 1.0 / spec_.params.alpha;
  std::vector<double> T(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < i; ++c) acc += A[c] * Z_(i, c) + B[c] * Z_(i, c + 1);
    T[i] = pref * acc;
  });
  return T;
}

std::vector<double> ClosedKernel::response_parabolic(double x1, double y1) const {
  const std::size_t cells = spec_.grid.size() - 1;
  std::vector<double> A(cells, 0.0), B(cells, 0.0);
  accumulate_parabolic_weights(x1, y1, 1.0, A, B);
  return apply_parabolic_weights(A, B);
}

std::vector<double> ClosedKernel::response_hyperbolic(double eta1) const {
  const Grid1D& g = spec_.grid;
  const GluingParams& p = spec_.params;
  const std::size_t n = g.size();
  double c0;
  std::function<double(double)> q;
  if (!alpha_zero_) {
    c0 = 1.0;
    const double r = p.beta / p.alpha;
    q = [&p, r, eta1](double t) { return r * p.Q(t, eta1); };
  } else {
    c0 = p.beta / kSqrtPi * p.Q(eta1, eta1);
    const double r = p.beta / kSqrtPi;
    q = [&p, r, eta1](double t) { return r * p.Q.d_first(t, eta1); };
  }
  std::vector<double> T(n, 0.0);
  const bool memory = p.beta != 0.0;
  parallel_for(n, [&](std::size_t i) {
    if (!(g[i] > eta1)) return;
    double v = c0 * table_at(i, eta1);
    if (memory) {
      for (std::size_t c = g.cell_of(eta1); c < i; ++c) {
        const double lo = std::max(g[c], eta1), hi = g[c + 1];
        if (!(hi > lo)) continue;
        v += quad::gauss_legendre<4>([&](double t) { return table_at(i, t) * q(t); }, lo, hi);
      }
    }
    T[i] = v;
  });
  return T;
}

ClosedKernel::SourceResponse ClosedKernel::response(double x1, double y1) const {
  const RegionTag tag = classify_point(spec_.curve, x1, y1);
  const bool inside_rect = y1 >= 0.0 && y1 <= 1.0 && x1 >= 0.0 && x1 <= 1.0;
  if (tag == RegionTag::Outside && !inside_rect) {
    throw GeometryError("source point (" + std::to_string(x1) + ", " + std::to_string(y1) +
                        ") lies outside the domain");
  }
  SourceResponse r;
  r.x1 = x1;
  r.y1 = y1;
  if (y1 < 0.0) {
    r.hyperbolic = true;
    r.start = x1 - y1;
    r.start_value = alpha_zero_ ? 0.0 : 1.0;
    r.T = response_hyperbolic(r.start);
  } else {
    r.start = x1;
    r.start_value = 0.0;
    r.T = response_parabolic(x1, y1);
  }
  return r;
}

double ClosedKernel::response_value(const SourceResponse& r, double s) const {
  if (s < r.start) return 0.0;
  const Grid1D& g = spec_.grid;
  const std::size_t c = g.cell_of(s);
  const double b = g[c + 1];
  const double a = std::max(g[c], r.start);
  const double va = g[c] >= r.start ? r.T[c] : r.start_value;
  if (!(b > a)) return va;
  const double t = (s - a) / (b - a);
  return (1.0 - t) * va + t * r.T[c + 1];
}

double ClosedKernel::convolve_trace(const SourceResponse& r, double x, double y) const {
  if (!(x > r.start)) return 0.0;
  const Grid1D& g = spec_.grid;
  const SeriesTruncation& tr = spec_.trunc;
  // knots: start, grid nodes in (start, x), x
  std::vector<double> knots{r.start};
  std::vector<double> vals{r.start_value};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > r.start && g[i] < x) {
      knots.push_back(g[i]);
      vals.push_back(r.T[i]);
    }
  }
  knots.push_back(x);
  vals.push_back(response_value(r, x));
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double s0 = knots[k], s1 = knots[k + 1];
    const double slope = (vals[k + 1] - vals[k]) / (s1 - s0);
    const double m0 = green_trace_integral(x - s0, y, tr) - green_trace_integral(x - s1, y, tr);
    const double m1 = green_trace_moment1(x - s0, y, tr) - green_trace_moment1(x - s1, y, tr);
    sum += vals[k] * m0 + slope * ((x - s0) * m0 - m1);
  }
  return sum;
}

double ClosedKernel::leading_block(double x, double y, double x1, double y1) const {
  if (!(x > x1) || y <= 0.0 || y1 <= 0.0 || y >= 1.0 || y1 >= 1.0) return 0.0;
  return green_G(x - x1, y, y1, spec_.trunc);
}

double ClosedKernel::evaluate(const SourceResponse& r, double x, double y) const {
  const RegionTag tag = classify_point(spec_.curve, x, y);
  const bool inside_rect = y >= 0.0 && y <= 1.0 && x >= 0.0 && x <= 1.0;
  if (tag == RegionTag::Outside && !inside_rect) {
    throw GeometryError("output point (" + std::to_string(x) + ", " + std::to_string(y) +
                        ") lies outside the domain");
  }
  if (y > 0.0) {
    double v = convolve_trace(r, x, y);
    if (!r.hyperbolic) v += leading_block(x, y, r.x1, r.y1);
    return v;
  }
  if (y == 0.0) return response_value(r, x);
  const double xi = x + y, eta = x - y;
  double v = response_value(r, xi);
  if (r.hyperbolic) {
    const double xi1 = r.x1 + r.y1, eta1 = r.x1 - r.y1;
    if (xi < eta1 && eta1 < eta && xi1 < xi) v += 0.5;
  }
  return v;
}

double ClosedKernel::operator()(double x, double y, double x1, double y1) const {
  return evaluate(response(x1, y1), x, y);
}

double assemble_closed_kernel(const ClosedKernel& K, double x, double y, double x1, double y1) {
  return K(x, y, x1, y1);
}

std::vector<double> kernel_trace(const ClosedKernel& K, const ForcingField& f,
                                 const SourceQuadrature& sq) {
  const Grid1D& g = K.grid();
  const std::size_t n = g.size();
  std::vector<double> tau(n, 0.0);
  if (f.is_zero()) return tau;

  // y1 panels: uniform, with the first one split geometrically toward 0
  std::vector<double> ybreaks;
  const double first = 1.0 / sq.y_panels;
  ybreaks.push_back(0.0);
  for (int k = sq.y_grading; k >= 1; --k) ybreaks.push_back(first / std::pow(2.0, k));
  for (int k = 1; k <= sq.y_panels; ++k) ybreaks.push_back(static_cast<double>(k) / sq.y_panels);

  using Rule = boost::math::quadrature::gauss<double, 4>;
  std::vector<double> gx, gw;
  for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
    gx.push_back(Rule::abscissa()[k]);
    gw.push_back(Rule::weights()[k]);
    gx.push_back(-Rule::abscissa()[k]);
    gw.push_back(Rule::weights()[k]);
  }
  std::vector<double> ys, wys;
  for (std::size_t p = 0; p + 1 < ybreaks.size(); ++p) {
    const double a = ybreaks[p], b = ybreaks[p + 1];
    for (std::size_t k = 0; k < gx.size(); ++k) {
      ys.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[k]);
      wys.push_back(0.5 * (b - a) * gw[k]);
    }
  }

  const std::size_t cells = n - 1;
  // parabolic sources: accumulate cell weights per worker, then reduce
  const unsigned workers = std::max(1u, std::min<unsigned>(thread_count(), cells));
  std::vector<std::vector<double>> As(workers, std::vector<double>(cells, 0.0));
  std::vector<std::vector<double>> Bs(workers, std::vector<double>(cells, 0.0));
  parallel_for(workers, [&](std::size_t w) {
    for (std::size_t c = w; c < cells; c += workers) {
      const double a = g[c], b = g[c + 1];
      for (std::size_t k = 0; k < gx.size(); ++k) {
        const double x1 = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
        const double wx = 0.5 * (b - a) * gw[k];
        for (std::size_t m = 0; m < ys.size(); ++m) {
          const double fv = f(x1, ys[m]);
          if (fv == 0.0) continue;
          K.accumulate_parabolic_weights(x1, ys[m], wx * wys[m] * fv, As[w], Bs[w]);
        }
      }
    }
  });
  for (unsigned w = 1; w < workers; ++w) {
    for (std::size_t c = 0; c < cells; ++c) {
      As[0][c] += As[w][c];
      Bs[0][c] += Bs[w][c];
    }
  }
  tau = K.apply_parabolic_weights(As[0], Bs[0]);

  // hyperbolic sources: int T(x; eta1) f dx1 dy1 = int T(x; eta1) 2 S(eta1) d eta1
  for (std::size_t c = 0; c < cells; ++c) {
    const double a = g[c], b = g[c + 1];
    for (std::size_t k = 0; k < gx.size(); ++k) {
      const double eta1 = 0.5 * (a + b) + 0.5 * (b - a) * gx[k];
      const double wt = 0.5 * (b - a) * gw[k] * 2.0 * strip_integral(f, K.spec().curve, eta1);
      if (wt == 0.0) continue;
      const auto T = K.response_hyperbolic(eta1);
      for (std::size_t i = 0; i < n; ++i) tau[i] += wt * T[i];
    }
  }
  return tau;
}

double kernel_form_value(const ClosedKernel& K, const ForcingField& f,
                         std::span<const double> tau_K, double x, double y,
                         const PotentialQuadrature& q) {
  const ProblemSpec& spec = K.spec();
  if (y > 0.0) {
    if (x <= 0.0 || y >= 1.0) return 0.0;
    return volume_potential(f, x, y, spec.trunc, q) +
           trace_potential_linear(tau_K, K.grid(), x, y, spec.trunc);
  }
  if (y == 0.0) return interpolate_linear(tau_K, K.grid(), x);
  const CharPoint c = to_characteristic(x, y);
  return interpolate_linear(tau_K, K.grid(), c.xi) +
         hyperbolic_source_term(f, spec.curve, c.xi, c.eta);
}

SolutionField apply_Linv_kernel(const ClosedKernel& K, const ForcingField& f,
                                const SourceQuadrature& sq) {
  const ProblemSpec& spec = K.spec();
  const auto tau = kernel_trace(K, f, sq);
  SolutionField field;
  field.method = MethodTag::KernelForm;
  field.nx = spec.nx;
  field.ny = spec.ny;
  const int nx = spec.nx, ny = spec.ny;
  const std::size_t count = static_cast<std::size_t>((nx + 1) * (ny + 1));
  field.parabolic.assign(count, 0.0);
  field.hyperbolic.assign(count, 0.0);
  field.hyp_x.assign(count, 0.0);
  field.hyp_y.assign(count, 0.0);
  const auto q = PotentialQuadrature::moderate();
  parallel_for(count, [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / (ny + 1);
    const int j = static_cast<int>(idx) % (ny + 1);
    field.parabolic[idx] = kernel_form_value(K, f, tau, static_cast<double>(i) / nx,
                                             static_cast<double>(j) / ny, q);
    const CartPoint p = hyperbolic_chart_point(spec.curve, nx, ny, i, j);
    field.hyp_x[idx] = p.x;
    field.hyp_y[idx] = p.y;
    field.hyperbolic[idx] = kernel_form_value(K, f, tau, p.x, p.y, q);
  });
  return field;
}

}  // namespace mixedsolve
