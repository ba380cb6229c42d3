#pragma once

#include <functional>
#include <string>
#include <utility>

namespace mixedsolve {

/// A scalar function of two variables with an optional analytic partial
/// derivative in the first argument. Missing derivatives fall back to a
/// centered difference.
class Field2D {
 public:
  using Fn = std::function<double(double, double)>;

  Field2D() : value_([](double, double) { return 0.0; }), name_("zero") {}
  explicit Field2D(Fn value, Fn d_first = {}, std::string name = "custom")
      : value_(std::move(value)), d_first_(std::move(d_first)), name_(std::move(name)) {}

  double operator()(double a, double b) const { return value_(a, b); }

  double d_first(double a, double b) const {
    if (d_first_) return d_first_(a, b);
    constexpr double step = 1e-6;
    return (value_(a + step, b) - value_(a - step, b)) / (2.0 * step);
  }

  const std::string& name() const { return name_; }

 private:
  Fn value_;
  Fn d_first_;
  std::string name_;
};

}  // namespace mixedsolve
