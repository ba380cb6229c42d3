#include "mixedsolve/library.hpp"

#include "mixedsolve/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace mixedsolve {

namespace {

using std::numbers::pi;

void check_keys(const std::string& what, const ParamMap& params,
                const std::set<std::string>& allowed) {
  for (const auto& [k, v] : params) {
    if (!allowed.count(k)) throw ConfigError(what + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError(what + ": parameter '" + k + "' is not finite");
  }
}

double get(const ParamMap& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double poly_eval(const std::vector<PolyTerm>& terms, double a, double b) {
  double s = 0.0;
  for (const auto& t : terms) s += t.c * std::pow(a, t.i) * std::pow(b, t.j);
  return s;
}

void check_table(const std::vector<PolyTerm>& terms, const std::string& what) {
  if (terms.empty()) throw ConfigError(what + ": empty coefficient table");
  for (const auto& t : terms) {
    if (t.i < 0 || t.j < 0) throw ConfigError(what + ": negative exponent");
    if (!std::isfinite(t.c)) throw ConfigError(what + ": non-finite coefficient");
  }
}

std::vector<ForcingField> make_library() {
  using F = ForcingField;
  const auto C1 = Smoothness::C1;
  return {
      F([](double x, double y) { return x * std::cos(y) + y * y + 0.5 * x * y; }, C1,
        "mixed_trig"),
      F([](double x, double) { return x; }, C1, "x"),
      F([](double, double y) { return y; }, C1, "y"),
      F([](double x, double y) { return x * y; }, C1, "xy"),
      F([](double x, double) { return std::sin(pi * x); }, C1, "sin_pi_x"),
      F([](double x, double y) { return x * std::exp(y); }, C1, "x_exp_y"),
      F([](double x, double y) { return y * std::cos(2.0 * x); }, C1, "y_cos_2x"),
      F([](double x, double y) { return x * x - y * y + x; }, C1, "quadratic"),
      F([](double x, double y) { return std::sin(x + 2.0 * y); }, C1, "sin_x_2y"),
      F([](double x, double y) { return x * std::exp(-(x - 0.5) * (x - 0.5) - y * y); }, C1,
        "x_bump"),
  };
}

}  // namespace

const std::vector<ForcingField>& forcing_library() {
  static const std::vector<ForcingField> lib = make_library();
  return lib;
}

std::vector<std::string> forcing_library_names() {
  std::vector<std::string> out;
  for (const auto& f : forcing_library()) out.push_back(f.name());
  return out;
}

ForcingField forcing_by_name(const std::string& name, const ParamMap& params) {
  if (name == "zero") {
    check_keys("forcing zero", params, {});
    return ForcingField::zero();
  }
  if (name == "sin_pi_y") {
    check_keys("forcing sin_pi_y", params, {"amp"});
    const double a = get(params, "amp", 1.0);
    return ForcingField([a](double, double y) { return a * std::sin(pi * y); }, Smoothness::C1,
                        "sin_pi_y");
  }
  for (const auto& f : forcing_library()) {
    if (f.name() != name) continue;
    check_keys("forcing " + name, params, {"scale"});
    const double s = get(params, "scale", 1.0);
    if (s == 1.0) return f;
    return ForcingField([f, s](double x, double y) { return s * f(x, y); }, f.smoothness(),
                        name);
  }
  throw ConfigError("unknown forcing '" + name + "'");
}

ForcingField forcing_from_table(const std::vector<PolyTerm>& terms) {
  check_table(terms, "forcing table");
  return ForcingField([terms](double x, double y) { return poly_eval(terms, x, y); },
                      Smoothness::C1, "table");
}

Field2D q_by_name(const std::string& name, const ParamMap& params) {
  if (name == "default") {
    check_keys("Q default", params, {});
    return Field2D([](double x, double t) { return 1.0 + 0.5 * x * t; },
                   [](double, double t) { return 0.5 * t; }, "default");
  }
  if (name == "constant") {
    check_keys("Q constant", params, {"c"});
    const double c = get(params, "c", 1.0);
    return Field2D([c](double, double) { return c; }, [](double, double) { return 0.0; },
                   "constant");
  }
  if (name == "linear") {
    check_keys("Q linear", params, {"a", "b", "c"});
    const double a = get(params, "a", 1.0), b = get(params, "b", 0.0), c = get(params, "c", 0.0);
    return Field2D([a, b, c](double x, double t) { return a + b * x + c * t; },
                   [b](double, double) { return b; }, "linear");
  }
  if (name == "exp") {
    check_keys("Q exp", params, {"a", "k"});
    const double a = get(params, "a", 1.0), k = get(params, "k", 1.0);
    return Field2D([a, k](double x, double t) { return a * std::exp(k * (x - t)); },
                   [a, k](double x, double t) { return a * k * std::exp(k * (x - t)); }, "exp");
  }
  throw ConfigError("unknown Q '" + name + "'");
}

Field2D q_from_table(const std::vector<PolyTerm>& terms) {
  check_table(terms, "Q table");
  std::vector<PolyTerm> dx;
  for (const auto& t : terms)
    if (t.i > 0) dx.push_back({t.i - 1, t.j, t.c * t.i});
  return Field2D([terms](double x, double t) { return poly_eval(terms, x, t); },
                 [dx](double x, double t) { return poly_eval(dx, x, t); }, "table");
}

CharCurve curve_by_name(const std::string& name, const ParamMap& params) {
  if (name == "linear") {
    check_keys("curve linear", params, {"l"});
    return CharCurve::linear(get(params, "l", 0.75));
  }
  if (name == "power") {
    check_keys("curve power", params, {"l", "p"});
    return CharCurve::power(get(params, "l", 0.75), get(params, "p", 2.0));
  }
  if (name == "degenerate") {
    check_keys("curve degenerate", params, {});
    return CharCurve::degenerate();
  }
  throw ConfigError("unknown curve '" + name + "'");
}

}  // namespace mixedsolve
