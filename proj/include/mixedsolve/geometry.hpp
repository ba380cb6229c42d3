#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace mixedsolve {

/// Characteristic coordinates xi = x + y, eta = x - y.
struct CharPoint {
  double xi = 0.0;
  double eta = 0.0;
};

struct CartPoint {
  double x = 0.0;
  double y = 0.0;
};

enum class RegionTag { Parabolic, Hyperbolic, TypeLine, Outside };

const char* to_string(RegionTag tag);

CharPoint to_characteristic(double x, double y);
CartPoint from_characteristic(double xi, double eta);

/// The non-characteristic arc AC: y = -gamma(x), 0 <= x <= l.
///
/// gamma is given either by an analytic family or by a monotone sample table
/// (monotone cubic interpolation). The map eta -> lambda(eta) describing AC in
/// characteristic coordinates is obtained by inverting x + gamma(x) = eta.
class CharCurve {
 public:
  enum class Kind { Linear, Power, Degenerate, Table };

  /// gamma(x) = x (1 - l) / l.
  static CharCurve linear(double l);
  /// gamma(x) = c x^p with c chosen so that l + gamma(l) = 1.
  static CharCurve power(double l, double p);
  /// gamma(x) = x, l = 1/2: AC coincides with the characteristic x + y = 0.
  static CharCurve degenerate();
  /// Sample table (x_k, gamma_k); x_0 = 0 and x_last = l.
  static CharCurve table(std::vector<double> xs, std::vector<double> gammas);

  Kind kind() const { return kind_; }
  double l() const { return l_; }
  double root_tol() const { return root_tol_; }
  bool degenerate_allowed() const { return kind_ == Kind::Degenerate; }
  /// Family parameter (exponent for Power, unused otherwise).
  double parameter() const { return param_; }
  const std::vector<double>& table_x() const { return table_x_; }
  const std::vector<double>& table_gamma() const { return table_g_; }

  double gamma(double x) const;
  double gamma_prime(double x) const;

  /// Samples of lambda on a uniform eta-grid of [0, 1] (size lambda_table_size).
  const std::vector<double>& lambda_table() const { return lambda_table_; }

 private:
  CharCurve() = default;
  void finish();

  Kind kind_ = Kind::Linear;
  double l_ = 0.75;
  double param_ = 1.0;
  double coef_ = 1.0;
  double root_tol_ = 1e-12;
  std::vector<double> table_x_;
  std::vector<double> table_g_;
  std::shared_ptr<const std::function<double(double)>> interp_;
  std::shared_ptr<const std::function<double(double)>> interp_prime_;
  std::vector<double> lambda_table_;
};

inline constexpr int lambda_table_size = 257;

/// lambda(eta) = x* - gamma(x*), where x* + gamma(x*) = eta.
double lambda_of_eta(const CharCurve& curve, double eta);

RegionTag classify_point(const CharCurve& curve, double x, double y);

struct CurveCheck {
  std::string name;
  bool passed = false;
  double defect = 0.0;
};

struct CurveReport {
  std::vector<CurveCheck> checks;
  bool ok() const;
  std::string summary() const;
};

CurveReport validate_curve(const CharCurve& curve);

/// Monotonicity check on raw samples of x + gamma(x); used for table input.
CurveCheck check_sum_monotone(const std::vector<double>& xs,
                              const std::vector<double>& gammas);

}  // namespace mixedsolve
