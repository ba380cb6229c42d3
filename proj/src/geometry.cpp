#include "mixedsolve/geometry.hpp"

#include "mixedsolve/errors.hpp"

#include <cmath>
// pchip.hpp in Boost 1.74 calls unqualified isnan
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace mixedsolve {

const char* to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::Parabolic: return "parabolic";
    case RegionTag::Hyperbolic: return "hyperbolic";
    case RegionTag::TypeLine: return "typeline";
    case RegionTag::Outside: return "outside";
  }
  return "outside";
}

CharPoint to_characteristic(double x, double y) { return {x + y, x - y}; }

CartPoint from_characteristic(double xi, double eta) {
  return {0.5 * (xi + eta), 0.5 * (xi - eta)};
}

CharCurve CharCurve::linear(double l) {
  if (!(l > 0.5 && l < 1.0)) {
    throw ConfigError("linear curve requires 1/2 < l < 1, got l = " +
                      std::to_string(l));
  }
  CharCurve c;
  c.kind_ = Kind::Linear;
  c.l_ = l;
  c.coef_ = (1.0 - l) / l;
  c.finish();
  return c;
}

CharCurve CharCurve::power(double l, double p) {
  if (!(l > 0.5 && l < 1.0)) {
    throw ConfigError("power curve requires 1/2 < l < 1");
  }
  if (!(p >= 1.0)) {
    throw ConfigError("power curve requires exponent p >= 1 (gamma in C^1)");
  }
  CharCurve c;
  c.kind_ = Kind::Power;
  c.l_ = l;
  c.param_ = p;
  c.coef_ = (1.0 - l) / std::pow(l, p);
  c.finish();
  return c;
}

CharCurve CharCurve::degenerate() {
  CharCurve c;
  c.kind_ = Kind::Degenerate;
  c.l_ = 0.5;
  c.coef_ = 1.0;
  c.finish();
  return c;
}

CharCurve CharCurve::table(std::vector<double> xs, std::vector<double> gammas) {
  if (xs.size() != gammas.size() || xs.size() < 4) {
    throw ConfigError("curve table needs at least 4 (x, gamma) pairs of equal length");
  }
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (!(xs[k] > xs[k - 1])) {
      throw ConfigError("curve table x values must be strictly increasing");
    }
  }
  CharCurve c;
  c.kind_ = Kind::Table;
  c.l_ = xs.back();
  c.table_x_ = xs;
  c.table_g_ = gammas;
  auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(
      std::move(xs), std::move(gammas));
  c.interp_ = std::make_shared<const std::function<double(double)>>(
      [spline](double x) { return (*spline)(x); });
  c.interp_prime_ = std::make_shared<const std::function<double(double)>>(
      [spline](double x) { return spline->prime(x); });
  c.finish();
  return c;
}

double CharCurve::gamma(double x) const {
  switch (kind_) {
    case Kind::Linear:
    case Kind::Degenerate:
      return coef_ * x;
    case Kind::Power:
      return x <= 0.0 ? 0.0 : coef_ * std::pow(x, param_);
    case Kind::Table:
      return (*interp_)(std::clamp(x, table_x_.front(), table_x_.back()));
  }
  return 0.0;
}

double CharCurve::gamma_prime(double x) const {
  switch (kind_) {
    case Kind::Linear:
    case Kind::Degenerate:
      return coef_;
    case Kind::Power:
      return x <= 0.0 ? (param_ == 1.0 ? coef_ : 0.0)
                      : coef_ * param_ * std::pow(x, param_ - 1.0);
    case Kind::Table:
      return (*interp_prime_)(std::clamp(x, table_x_.front(), table_x_.back()));
  }
  return 0.0;
}

void CharCurve::finish() {
  lambda_table_.resize(lambda_table_size);
  for (int k = 0; k < lambda_table_size; ++k) {
    const double eta = static_cast<double>(k) / (lambda_table_size - 1);
    try {
      lambda_table_[k] = lambda_of_eta(*this, eta);
    } catch (const GeometryError&) {
      lambda_table_[k] = std::nan("");
    }
  }
}

double lambda_of_eta(const CharCurve& curve, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError("lambda_of_eta requires 0 <= eta <= 1");
  }
  if (curve.kind() == CharCurve::Kind::Degenerate) return 0.0;
  if (eta == 0.0) return -curve.gamma(0.0);
  const double l = curve.l();
  auto residual = [&](double x) { return x + curve.gamma(x) - eta; };
  const double r0 = residual(0.0);
  const double rl = residual(l);
  if (r0 > curve.root_tol() || rl < -curve.root_tol()) {
    throw GeometryError("root of x + gamma(x) = eta not bracketed in [0, l]");
  }
  if (r0 >= 0.0) return -curve.gamma(0.0);
  if (rl <= 0.0) return l - curve.gamma(l);
  std::uintmax_t iters = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      residual, 0.0, l, r0, rl, boost::math::tools::eps_tolerance<double>(52),
      iters);
  const double xs = 0.5 * (lo + hi);
  return xs - curve.gamma(xs);
}

RegionTag classify_point(const CharCurve& curve, double x, double y) {
  if (y == 0.0) {
    return (x >= 0.0 && x <= 1.0) ? RegionTag::TypeLine : RegionTag::Outside;
  }
  if (y > 0.0) {
    return (x > 0.0 && x < 1.0 && y < 1.0) ? RegionTag::Parabolic
                                           : RegionTag::Outside;
  }
  const CharPoint c = to_characteristic(x, y);
  if (!(c.eta <= 1.0) || c.eta < 0.0) return RegionTag::Outside;
  const double lam = lambda_of_eta(curve, c.eta);
  // closed region: points on AC and BC count as hyperbolic
  const double slack = 1e-13;
  if (c.xi >= lam - slack && c.xi <= c.eta) return RegionTag::Hyperbolic;
  return RegionTag::Outside;
}

bool CurveReport::ok() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CurveCheck& c) { return c.passed; });
}

std::string CurveReport::summary() const {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.name << " (defect " << c.defect
       << ")\n";
  }
  return os.str();
}

CurveCheck check_sum_monotone(const std::vector<double>& xs,
                              const std::vector<double>& gammas) {
  CurveCheck chk{"x + gamma(x) strictly increasing", true, 0.0};
  for (std::size_t k = 1; k < xs.size() && k < gammas.size(); ++k) {
    const double step = (xs[k] + gammas[k]) - (xs[k - 1] + gammas[k - 1]);
    if (!(step > 0.0)) {
      chk.passed = false;
      chk.defect = std::max(chk.defect, -step);
    }
  }
  return chk;
}

CurveReport validate_curve(const CharCurve& curve) {
  CurveReport rep;
  const double tol = curve.root_tol();
  const double l = curve.l();

  const double g0 = std::abs(curve.gamma(0.0));
  rep.checks.push_back({"gamma(0) = 0", g0 <= tol, g0});

  const double end = std::abs(l + curve.gamma(l) - 1.0);
  rep.checks.push_back({"l + gamma(l) = 1", end <= tol, end});

  const bool l_ok = (l > 0.5 && l < 1.0) ||
                    (curve.degenerate_allowed() && std::abs(l - 0.5) <= tol);
  rep.checks.push_back({"1/2 < l < 1", l_ok, l_ok ? 0.0 : std::abs(l - 0.75)});

  constexpr int samples = 513;
  std::vector<double> xs(samples), gs(samples);
  for (int k = 0; k < samples; ++k) {
    xs[k] = l * k / (samples - 1);
    gs[k] = curve.gamma(xs[k]);
  }
  if (curve.kind() == CharCurve::Kind::Table) {
    xs = curve.table_x();
    gs = curve.table_gamma();
  }
  rep.checks.push_back(check_sum_monotone(xs, gs));

  CurveCheck mono{"gamma nonnegative and monotone", true, 0.0};
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (gs[k] < -tol) {
      mono.passed = false;
      mono.defect = std::max(mono.defect, -gs[k]);
    }
    if (k > 0 && gs[k] < gs[k - 1] - tol) {
      mono.passed = false;
      mono.defect = std::max(mono.defect, gs[k - 1] - gs[k]);
    }
  }
  rep.checks.push_back(mono);

  CurveCheck lam{"0 <= lambda(eta) <= eta, lambda(0) = 0, lambda(1) = 2l - 1",
                 true, 0.0};
  const auto& table = curve.lambda_table();
  for (int k = 0; k < lambda_table_size; ++k) {
    const double eta = static_cast<double>(k) / (lambda_table_size - 1);
    const double v = table[k];
    if (std::isnan(v)) {
      lam.passed = false;
      lam.defect = std::max(lam.defect, 1.0);
      continue;
    }
    const double over = std::max(-v, v - eta);
    if (over > tol) {
      lam.passed = false;
      lam.defect = std::max(lam.defect, over);
    }
  }
  if (!std::isnan(table.front())) {
    lam.defect = std::max(lam.defect, std::abs(table.front()));
    if (std::abs(table.front()) > tol) lam.passed = false;
  }
  if (!std::isnan(table.back())) {
    const double d = std::abs(table.back() - (2.0 * l - 1.0));
    if (d > tol) {
      lam.passed = false;
      lam.defect = std::max(lam.defect, d);
    }
  }
  rep.checks.push_back(lam);
  return rep;
}

}  // namespace mixedsolve
