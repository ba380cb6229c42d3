#pragma once

#include "mixedsolve/geometry.hpp"
#include "mixedsolve/greens.hpp"
#include "mixedsolve/integral_engine.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mixedsolve {

enum class Smoothness { C1, L2only };

/// Forcing f on the closure of the whole domain (y > 0 and y < 0).
/// f1 is always derived from f.
class ForcingField {
 public:
  using Fn = std::function<double(double, double)>;

  ForcingField();
  explicit ForcingField(Fn f, Smoothness smoothness = Smoothness::C1,
                        std::string name = "custom");

  static ForcingField zero();

  double operator()(double x, double y) const { return f_(x, y); }
  /// f1(xi, eta) = f((xi + eta)/2, (xi - eta)/2) / 4.
  double f1(double xi, double eta) const {
    return 0.25 * f_(0.5 * (xi + eta), 0.5 * (xi - eta));
  }

  Smoothness smoothness() const { return smoothness_; }
  const std::string& name() const { return name_; }
  bool is_zero() const { return zero_; }

  /// For C1 fields, throws ConfigError unless |f(0,0)| <= tol.
  void check_origin(double tol = 1e-12) const;

  /// Returns a * this + b * other.
  ForcingField combine(double a, const ForcingField& other, double b) const;

 private:
  Fn f_;
  Smoothness smoothness_ = Smoothness::C1;
  std::string name_;
  bool zero_ = false;
};

enum class RhsVariant { F0, F1, F2 };
const char* to_string(RhsVariant v);

struct RhsProfile {
  Grid1D grid;
  std::vector<double> values;
  RhsVariant variant = RhsVariant::F0;
};

/// Hyperbolic strip integral S(eta) = int_{lambda(eta)}^{eta} f1(xi1, eta) d xi1.
double strip_integral(const ForcingField& f, const CharCurve& curve, double eta);
std::vector<double> strip_profile(const ForcingField& f, const CharCurve& curve,
                                  const Grid1D& grid);

/// int_0^x Q(x, t) S(t) dt.
double memory_strip_term(const ForcingField& f, const GluingParams& params,
                         const CharCurve& curve, double x);

/// F0(x) = int_0^x int_0^1 Gy-trace(x - x1, y1) f(x1, y1) dy1 dx1 at one point.
double F0_at(const ForcingField& f, double x, const SeriesTruncation& trunc = {});

RhsProfile compute_F0(const ForcingField& f, const Grid1D& grid,
                      const SeriesTruncation& trunc = {});

/// Requires alpha != 0.
RhsProfile compute_F1(const ForcingField& f, const RhsProfile& F0,
                      const GluingParams& params, const CharCurve& curve);

/// Requires alpha == 0, beta != 0. sqrt(pi) times the Abel inverse of
/// g = F0 + 2 beta int_0^x Q(x,t) S(t) dt.
RhsProfile compute_F2(const ForcingField& f, const GluingParams& params,
                      const CharCurve& curve, const Grid1D& grid,
                      const SeriesTruncation& trunc = {});

/// Same, reusing an assembled F0 profile.
RhsProfile compute_F2(const ForcingField& f, const RhsProfile& F0, const GluingParams& params,
                      const CharCurve& curve);

RhsProfile compute_F_dispatch(const ForcingField& f, const GluingParams& params,
                              const CharCurve& curve, const Grid1D& grid,
                              const SeriesTruncation& trunc = {});

}  // namespace mixedsolve
