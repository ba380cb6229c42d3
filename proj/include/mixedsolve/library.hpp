#pragma once

#include "mixedsolve/field.hpp"
#include "mixedsolve/geometry.hpp"
#include "mixedsolve/rhs.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace mixedsolve {

using ParamMap = std::map<std::string, double>;

/// Term c * a^i * b^j of a polynomial coefficient table.
struct PolyTerm {
  int i = 0;
  int j = 0;
  double c = 0.0;

  bool operator==(const PolyTerm&) const = default;
};

/// The fixed set of smooth forcing fields used by tests and studies. Every
/// entry is defined on both subdomains and vanishes at the origin.
const std::vector<ForcingField>& forcing_library();

/// Names of the library entries, in order.
std::vector<std::string> forcing_library_names();

/// Built-in forcing by name: any library entry (optional {scale}), "zero",
/// "sin_pi_y" {amp}. Unknown names or parameters raise ConfigError.
ForcingField forcing_by_name(const std::string& name, const ParamMap& params = {});

/// f(x, y) = sum c x^i y^j.
ForcingField forcing_from_table(const std::vector<PolyTerm>& terms);

/// Built-in Q(x, t): "default" (1 + x t / 2), "constant" {c}, "linear" {a, b, c}
/// for a + b x + c t, "exp" {a, k} for a exp(k (x - t)).
Field2D q_by_name(const std::string& name, const ParamMap& params = {});

/// Q(x, t) = sum c x^i t^j with its exact x-derivative.
Field2D q_from_table(const std::vector<PolyTerm>& terms);

/// Built-in curve: "linear" {l}, "power" {l, p}, "degenerate".
CharCurve curve_by_name(const std::string& name, const ParamMap& params = {});

}  // namespace mixedsolve
