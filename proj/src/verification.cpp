#include "mixedsolve/verification.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/parallel.hpp"
#include "mixedsolve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixedsolve {

namespace {

double lerp(double a, double b, int i, int count) {
  return count <= 1 ? a : a + (b - a) * static_cast<double>(i) / (count - 1);
}

// d lambda / d eta from x* + gamma(x*) = eta, x* - gamma(x*) = lambda
double lambda_prime(const CharCurve& curve, double eta) {
  const double lam = lambda_of_eta(curve, eta);
  const double g = curve.gamma_prime(0.5 * (eta + lam));
  return (1.0 - g) / (1.0 + g);
}

struct Sample {
  double x = 0.0;
  double y = 0.0;
};

ConditionResidual evaluate_condition(const std::string& name, const std::vector<Sample>& at,
                                     const std::function<double(std::size_t)>& value) {
  ConditionResidual c;
  c.name = name;
  c.value.assign(at.size(), 0.0);
  parallel_for(at.size(), [&](std::size_t i) { c.value[i] = value(i); });
  for (const Sample& s : at) {
    c.x.push_back(s.x);
    c.y.push_back(s.y);
  }
  return c;
}

void require(bool ok, const std::string& what, double H) {
  if (!ok)
    throw ResolutionError(what + " stencil does not fit the domain at step " + std::to_string(H));
}

}  // namespace

void ResidualReport::summarize() {
  for (ConditionResidual& c : conditions) {
    double sup = 0.0, sq = 0.0;
    for (double v : c.value) {
      if (!std::isfinite(v)) throw DataError("non-finite residual in condition " + c.name);
      sup = std::max(sup, std::abs(v));
      sq += v * v;
    }
    c.sup = sup;
    c.l2 = c.value.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(c.value.size()));
  }
}

const ConditionResidual& ResidualReport::get(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw ConfigError("no residual condition named " + name);
}

double ResidualReport::max_sup() const {
  double m = 0.0;
  for (const auto& c : conditions) m = std::max(m, c.sup);
  return m;
}

ResidualReport residuals(const ProblemSpec& spec, const PointEvaluator& u,
                         const ResidualOptions& opt) {
  const int n = spec.grid.intervals();
  const double H = opt.stencil > 0.0 ? opt.stencil : 2.0 / n;
  const int P = std::max(2, opt.probes);
  const CharCurve& curve = spec.curve;
  const auto& f = spec.forcing;
  const auto U = [&](double xi, double eta) { return u(0.5 * (xi + eta), 0.5 * (xi - eta)); };
  const auto lam = [&](double eta) { return lambda_of_eta(curve, eta); };

  ResidualReport rep;
  rep.n = n;
  rep.stencil = H;
  rep.source = "probe";

  {
    std::vector<Sample> at;
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j) at.push_back({lerp(0.1, 0.9, i, P), lerp(0.1, 0.9, j, P)});
    require(0.1 - H >= 0.0 && 0.9 + H <= 1.0, "heat", H);
    rep.conditions.push_back(evaluate_condition("heat", at, [&](std::size_t k) {
      const double x = at[k].x, y = at[k].y;
      const double ux = (u(x + H, y) - u(x - H, y)) / (2.0 * H);
      const double uyy = (u(x, y + H) - 2.0 * u(x, y) + u(x, y - H)) / (H * H);
      return ux - uyy - f(x, y);
    }));
  }
  {
    std::vector<Sample> at;  // (xi, eta)
    for (int i = 0; i < P; ++i)
      for (int j = 0; j < P; ++j) {
        const double eta = lerp(0.5, 0.95, i, P);
        const double l = lam(eta);
        const double xi = l + lerp(0.3, 0.7, j, P) * (eta - l);
        require(lam(std::min(1.0, eta + H)) <= xi - H && xi + H <= eta - H && eta + H <= 1.0,
                "wave", H);
        at.push_back({xi, eta});
      }
    ConditionResidual c = evaluate_condition("wave", at, [&](std::size_t k) {
      const double xi = at[k].x, eta = at[k].y;
      const double uxe = (U(xi + H, eta + H) - U(xi + H, eta - H) - U(xi - H, eta + H) +
                          U(xi - H, eta - H)) /
                         (4.0 * H * H);
      return 4.0 * uxe - f(0.5 * (xi + eta), 0.5 * (xi - eta));
    });
    for (std::size_t k = 0; k < at.size(); ++k) {
      const double xi = c.x[k], eta = c.y[k];
      c.x[k] = 0.5 * (xi + eta);
      c.y[k] = 0.5 * (xi - eta);
    }
    rep.conditions.push_back(std::move(c));
  }
  {
    std::vector<Sample> at;
    for (int i = 0; i < 2 * P; ++i) at.push_back({0.0, lerp(0.05, 1.0, i, 2 * P)});
    for (int i = 0; i < 2 * P; ++i) at.push_back({lerp(0.05, 1.0, i, 2 * P), 1.0});
    rep.conditions.push_back(
        evaluate_condition("dirichlet", at, [&](std::size_t k) { return u(at[k].x, at[k].y); }));
  }
  {
    std::vector<Sample> at;  // (xi, eta) on AC
    for (int i = 0; i < 2 * P; ++i) {
      const double eta = lerp(0.15, 0.95, i, 2 * P);
      const double xi = lam(eta);
      require(xi <= eta - 2.0 * H, "AC", H);
      at.push_back({xi, eta});
    }
    ConditionResidual c = evaluate_condition("ac_flux", at, [&](std::size_t k) {
      const double xi = at[k].x, eta = at[k].y;
      // u_x - u_y = 2 u_eta; backward in eta keeps the stencil inside
      const double ue =
          (3.0 * U(xi, eta) - 4.0 * U(xi, eta - H) + U(xi, eta - 2.0 * H)) / (2.0 * H);
      return 2.0 * ue;
    });
    for (std::size_t k = 0; k < at.size(); ++k) {
      const double xi = c.x[k], eta = c.y[k];
      c.x[k] = 0.5 * (xi + eta);
      c.y[k] = 0.5 * (xi - eta);
    }
    rep.conditions.push_back(std::move(c));
  }

  // type line: smallest t with the backward xi stencil inside
  double lo = 2.0 * H, hi = 1.0 - 2.0 * H;
  const auto fits = [&](double t) { return t - 2.0 * H >= lam(t); };
  require(hi > lo && fits(hi), "type-line", H);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? hi : lo) = mid;
  }
  const double t0 = hi;
  const auto u_xi = [&](double t) {
    return (3.0 * U(t, t) - 4.0 * U(t - H, t) + U(t - 2.0 * H, t)) / (2.0 * H);
  };
  const auto u_eta = [&](double t) {
    return (-3.0 * U(t, t) + 4.0 * U(t, t + H) - U(t, t + 2.0 * H)) / (2.0 * H);
  };
  const auto nu1 = [&](double t) { return u_xi(t) - u_eta(t); };

  std::vector<Sample> line;
  const double x_lo = std::max(0.15, t0 + H);
  require(x_lo < 0.9 && 0.9 + 2.0 * H <= 1.0 && 3.0 * H < 1.0, "type-line", H);
  for (int i = 0; i < P; ++i) line.push_back({lerp(x_lo, 0.9, i, P), 0.0});

  const GluingParams& gp = spec.params;
  const double nu1_a = gp.beta != 0.0 ? nu1(t0) : 0.0;
  const double nu1_b = gp.beta != 0.0 ? nu1(t0 + H) : 0.0;
  rep.conditions.push_back(evaluate_condition("gluing", line, [&](std::size_t k) {
    const double x = line[k].x;
    const double nu0 = (-3.0 * u(x, 0.0) + 4.0 * u(x, H) - u(x, 2.0 * H)) / (2.0 * H);
    double mem = 0.0;
    if (gp.beta != 0.0) {
      mem = quad::composite<8>([&](double t) { return gp.Q(x, t) * nu1(t); }, t0, x, 4);
      // linear extrapolation of nu1 below t0
      mem += quad::gauss_legendre<4>(
          [&](double t) { return gp.Q(x, t) * (nu1_a + (t - t0) * (nu1_b - nu1_a) / H); }, 0.0,
          t0);
    }
    return nu0 - gp.alpha * nu1(x) - gp.beta * mem;
  }));
  rep.conditions.push_back(evaluate_condition("ux_continuity", line, [&](std::size_t k) {
    const double x = line[k].x;
    const auto trace = [&](double s) {
      return 3.0 * u(s, H) - 3.0 * u(s, 2.0 * H) + u(s, 3.0 * H);
    };
    const double above = (trace(x + H) - trace(x - H)) / (2.0 * H);
    const double below = u_xi(x) + u_eta(x);
    return above - below;
  }));

  rep.summarize();
  return rep;
}

ResidualReport residuals(const ProblemSpec& spec, const TraceFunctions& tr,
                         const ResidualOptions& opt) {
  const PotentialQuadrature q = opt.quadrature;
  return residuals(
      spec,
      [&spec, &tr, q](double x, double y) {
        if (y > 0.0) return parabolic_value(spec, tr, x, y, q);
        return hyperbolic_value(spec, tr, x + y, x - y);
      },
      opt);
}

ResidualReport residuals(const ProblemSpec& spec, const SolutionField& field) {
  const int nx = field.nx, ny = field.ny;
  if (nx < 4 || ny < 4) throw ResolutionError("field residuals need nx, ny >= 4");
  const double hx = 1.0 / nx, hy = 1.0 / ny;
  const auto P = [&](int i, int j) { return field.parabolic_at(i, j); };
  const auto V = [&](int k, int j) { return field.hyperbolic_at(k, j); };
  const auto& f = spec.forcing;
  const CharCurve& curve = spec.curve;

  ResidualReport rep;
  rep.n = spec.grid.intervals();
  rep.stencil = hx;
  rep.source = "field";
  const auto push = [&](const std::string& name) -> ConditionResidual& {
    rep.conditions.push_back({});
    rep.conditions.back().name = name;
    return rep.conditions.back();
  };
  const auto add = [](ConditionResidual& c, double x, double y, double v) {
    c.x.push_back(x);
    c.y.push_back(y);
    c.value.push_back(v);
  };

  {
    ConditionResidual& c = push("heat");
    for (int i = 1; i < nx; ++i)
      for (int j = 1; j < ny; ++j) {
        const double x = i * hx, y = j * hy;
        const double ux = (P(i + 1, j) - P(i - 1, j)) / (2.0 * hx);
        const double uyy = (P(i, j + 1) - 2.0 * P(i, j) + P(i, j - 1)) / (hy * hy);
        add(c, x, y, ux - uyy - f(x, y));
      }
  }

  // chart derivatives: xi = lambda + s w, w = eta - lambda
  std::vector<double> lam(nx + 1), lp(nx + 1);
  for (int k = 0; k <= nx; ++k) {
    lam[k] = lambda_of_eta(curve, k * hx);
    lp[k] = lambda_prime(curve, k * hx);
  }
  const auto v_eta = [&](int k, int j) {
    if (k < nx) return (V(k + 1, j) - V(k - 1, j)) / (2.0 * hx);
    return (3.0 * V(k, j) - 4.0 * V(k - 1, j) + V(k - 2, j)) / (2.0 * hx);
  };
  {
    ConditionResidual& c = push("wave");
    for (int k = 1; k < nx; ++k) {
      const double w = k * hx - lam[k];
      const double wp = 1.0 - lp[k];
      for (int j = 1; j < ny; ++j) {
        const double s = j * hy;
        const double vs = (V(k, j + 1) - V(k, j - 1)) / (2.0 * hy);
        const double vss = (V(k, j + 1) - 2.0 * V(k, j) + V(k, j - 1)) / (hy * hy);
        const double vse =
            (V(k + 1, j + 1) - V(k + 1, j - 1) - V(k - 1, j + 1) + V(k - 1, j - 1)) /
            (4.0 * hx * hy);
        const double s_eta = -(lp[k] + s * wp) / w;
        const double uxe = (vse + vss * s_eta) / w - vs * wp / (w * w);
        const CartPoint p = hyperbolic_chart_point(curve, nx, ny, k, j);
        add(c, p.x, p.y, 4.0 * uxe - f(p.x, p.y));
      }
    }
  }
  {
    ConditionResidual& c = push("dirichlet");
    for (int j = 0; j <= ny; ++j) add(c, 0.0, j * hy, P(0, j));
    for (int i = 0; i <= nx; ++i) add(c, i * hx, 1.0, P(i, ny));
  }
  {
    ConditionResidual& c = push("ac_flux");
    for (int k = 1; k < nx; ++k) {
      const double w = k * hx - lam[k];
      const double vs = (-3.0 * V(k, 0) + 4.0 * V(k, 1) - V(k, 2)) / (2.0 * hy);
      const CartPoint p = hyperbolic_chart_point(curve, nx, ny, k, 0);
      add(c, p.x, p.y, 2.0 * (v_eta(k, 0) - vs * lp[k] / w));
    }
  }
  // nu1 = u_xi - u_eta = 2 v_s / w - v_eta at s = 1
  std::vector<double> nu1(nx + 1, 0.0);
  for (int k = 1; k <= nx; ++k) {
    const double w = k * hx - lam[k];
    const double vs = (3.0 * V(k, ny) - 4.0 * V(k, ny - 1) + V(k, ny - 2)) / (2.0 * hy);
    nu1[k] = 2.0 * vs / w - v_eta(k, ny);
  }
  nu1[0] = 2.0 * nu1[1] - nu1[2];
  {
    ConditionResidual& c = push("gluing");
    const GluingParams& gp = spec.params;
    for (int k = 1; k <= nx; ++k) {
      const double x = k * hx;
      const double nu0 = (-3.0 * P(k, 0) + 4.0 * P(k, 1) - P(k, 2)) / (2.0 * hy);
      double mem = 0.0;
      if (gp.beta != 0.0) {
        for (int m = 0; m <= k; ++m) {
          const double w = (m == 0 || m == k) ? 0.5 : 1.0;
          mem += w * gp.Q(x, m * hx) * nu1[m];
        }
        mem *= hx;
      }
      add(c, x, 0.0, nu0 - gp.alpha * nu1[k] - gp.beta * mem);
    }
  }
  {
    ConditionResidual& c = push("ux_continuity");
    const auto trace = [&](int i) { return 3.0 * P(i, 1) - 3.0 * P(i, 2) + P(i, 3); };
    for (int k = 1; k < nx; ++k) {
      const double above = (trace(k + 1) - trace(k - 1)) / (2.0 * hx);
      add(c, k * hx, 0.0, above - v_eta(k, ny));
    }
  }
  rep.summarize();
  return rep;
}

struct ManufacturedSolution::Data {
  GluingParams params;
  CharCurve curve = CharCurve::linear(0.75);
  double a = 1.0;
  double k = 1.0;

  double tau(double x) const { return a * x * x * (0.5 + k * x); }
  double tau_prime(double x) const { return a * x * (1.0 + 3.0 * k * x); }
  double nu1(double x) const { return a * x; }
  double nu0(double x) const {
    double v = params.alpha * nu1(x);
    if (params.beta != 0.0 && x > 0.0)
      v += params.beta *
           quad::gauss_legendre<20>([&](double t) { return params.Q(x, t) * nu1(t); }, 0.0, x);
    return v;
  }
  double nu0_prime(double x) const {
    double v = params.alpha * a;
    if (params.beta != 0.0 && x > 0.0)
      v += params.beta *
           (params.Q(x, x) * nu1(x) +
            quad::gauss_legendre<20>([&](double t) { return params.Q.d_first(x, t) * nu1(t); },
                                     0.0, x));
    return v;
  }
  double c(double s) const {
    if (s <= 0.0) return 0.0;
    return (tau_prime(s) - nu1(s)) / (2.0 * (s - lambda_of_eta(curve, s)));
  }
  double u(double x, double y) const {
    if (y > 0.0) return tau(x) * (1.0 - y * y) + nu0(x) * (y - y * y);
    const double xi = x + y, eta = x - y;
    double v = tau(xi);
    if (eta > xi && k != 0.0)
      v += quad::composite<16>(
          [&](double s) { return c(s) * (xi - lambda_of_eta(curve, s)); }, xi, eta, 2);
    return v;
  }
  double f(double x, double y) const {
    if (y > 0.0)
      return tau_prime(x) * (1.0 - y * y) + nu0_prime(x) * (y - y * y) + 2.0 * tau(x) +
             2.0 * nu0(x);
    return 4.0 * c(x - y);
  }
};

ManufacturedSolution::ManufacturedSolution(const ProblemSpec& spec_template, double amplitude,
                                           double k)
    : spec_(spec_template) {
  auto d = std::make_shared<Data>();
  d->params = spec_template.params;
  d->curve = spec_template.curve;
  d->a = amplitude;
  d->k = k;
  d_ = d;
  if (amplitude == 0.0) {
    spec_.forcing = ForcingField::zero();
  } else {
    spec_.forcing = ForcingField([d](double x, double y) { return d->f(x, y); },
                                 Smoothness::C1, "manufactured");
  }
}

double ManufacturedSolution::u(double x, double y) const { return d_->u(x, y); }
double ManufacturedSolution::tau(double x) const { return d_->tau(x); }
double ManufacturedSolution::nu0(double x) const { return d_->nu0(x); }
double ManufacturedSolution::nu1(double x) const { return d_->nu1(x); }

ManufacturedResult manufactured_check(const ManufacturedSolution& exact, int n,
                                      const std::optional<GluingParams>& solve_params,
                                      double construction_tol) {
  ManufacturedResult res;
  res.n = n;
  ResidualOptions fine;
  fine.stencil = 1e-3;
  res.exact_residuals =
      residuals(exact.spec(), [&](double x, double y) { return exact.u(x, y); }, fine);
  for (const auto& c : res.exact_residuals.conditions)
    if (c.sup > construction_tol)
      throw ConstructionError("manufactured pair violates condition " + c.name + " by " +
                              std::to_string(c.sup));

  ProblemSpec spec = exact.spec();
  spec.grid = Grid1D::uniform(n);
  if (solve_params) spec.params = *solve_params;
  spec.validate();
  const TraceFunctions tr = solve_trace(spec);
  res.solver_residuals = residuals(spec, tr);

  std::vector<Sample> at;
  const int P = 9;
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) at.push_back({lerp(0.1, 0.9, i, P), lerp(0.1, 0.9, j, P)});
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j) {
      const double eta = lerp(0.1, 1.0, i, P);
      const double l = lambda_of_eta(spec.curve, eta);
      const CartPoint p = from_characteristic(l + lerp(0.0, 1.0, j, P) * (eta - l), eta);
      at.push_back({p.x, p.y});
    }
  std::vector<double> err(at.size(), 0.0);
  parallel_for(at.size(), [&](std::size_t k) {
    const double x = at[k].x, y = at[k].y;
    const double uh =
        y > 0.0 ? parabolic_value(spec, tr, x, y) : hyperbolic_value(spec, tr, x + y, x - y);
    err[k] = std::abs(uh - exact.u(x, y));
  });
  for (double e : err) {
    if (!std::isfinite(e)) throw DataError("non-finite manufactured error");
    res.error = std::max(res.error, e);
  }
  return res;
}

int ConvergenceStudy::index(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::string> ConvergenceStudy::failing(double min_order,
                                                   const std::vector<std::string>& which) const {
  std::vector<std::string> out;
  for (const auto& name : which) {
    const int i = index(name);
    if (i < 0) continue;
    if (!std::isnan(order[i]) && order[i] < min_order) out.push_back(name);
  }
  return out;
}

ConvergenceStudy fit_orders(std::vector<int> grids, std::vector<std::string> names,
                            std::vector<std::vector<double>> norms, double floor) {
  if (grids.size() < 3) throw ConfigError("a convergence study needs at least 3 grids");
  ConvergenceStudy st;
  st.grids = std::move(grids);
  st.names = std::move(names);
  st.norms = std::move(norms);
  st.floor = floor;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : st.norms) {
    std::vector<double> pair;
    std::vector<double> lx, ly;
    for (std::size_t g = 0; g < st.grids.size(); ++g) {
      if (r[g] > floor) {
        lx.push_back(std::log(static_cast<double>(st.grids[g])));
        ly.push_back(std::log(r[g]));
      }
      if (g + 1 < st.grids.size() && r[g] > floor && r[g + 1] > floor)
        pair.push_back(std::log(r[g] / r[g + 1]) /
                       std::log(static_cast<double>(st.grids[g + 1]) / st.grids[g]));
    }
    double order = nan, spread = nan;
    if (lx.size() >= 2) {
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
      }
      mx /= lx.size();
      my /= ly.size();
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
      }
      order = -sxy / sxx;
    }
    if (!pair.empty()) {
      const auto [lo, hi] = std::minmax_element(pair.begin(), pair.end());
      spread = *hi - *lo;
    }
    st.order.push_back(order);
    st.spread.push_back(spread);
    st.pairwise.push_back(std::move(pair));
  }
  return st;
}

ConvergenceStudy convergence(const ProblemSpec& spec, const std::vector<int>& grids,
                             const ResidualOptions& opt) {
  if (grids.size() < 3) throw ConfigError("a convergence study needs at least 3 grids");
  std::vector<int> sorted = grids;
  std::sort(sorted.begin(), sorted.end());
  const auto& names = residual_condition_names();
  std::vector<std::vector<double>> norms(names.size(), std::vector<double>(sorted.size()));
  for (std::size_t g = 0; g < sorted.size(); ++g) {
    ProblemSpec s = spec;
    s.grid = Grid1D::uniform(sorted[g]);
    const TraceFunctions tr = solve_trace(s);
    const ResidualReport rep = residuals(s, tr, opt);
    for (std::size_t c = 0; c < names.size(); ++c) norms[c][g] = rep.sup(names[c]);
  }
  return fit_orders(sorted, names, std::move(norms));
}

ConvergenceStudy manufactured_convergence(const ProblemSpec& spec_template,
                                          const std::vector<int>& grids, double amplitude,
                                          double k) {
  if (grids.size() < 3) throw ConfigError("a convergence study needs at least 3 grids");
  std::vector<int> sorted = grids;
  std::sort(sorted.begin(), sorted.end());
  const ManufacturedSolution exact(spec_template, amplitude, k);
  std::vector<std::vector<double>> norms(1, std::vector<double>(sorted.size()));
  for (std::size_t g = 0; g < sorted.size(); ++g)
    norms[0][g] = manufactured_check(exact, sorted[g]).error;
  return fit_orders(sorted, {"error"}, std::move(norms));
}

}  // namespace mixedsolve
