#pragma once

#include "mixedsolve/library.hpp"
#include "mixedsolve/solver.hpp"

#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mixedsolve {

inline constexpr const char* kConfigSchema = "mixedsolve-config/1";
inline constexpr const char* kToolVersion = "1.0.0";

/// A built-in addressed by name and parameters, or a polynomial table.
struct FunctionConfig {
  std::string name;
  ParamMap params;
  bool is_table = false;
  std::vector<PolyTerm> table;

  bool operator==(const FunctionConfig&) const = default;
};

struct CurveConfig {
  std::string kind = "linear";
  ParamMap params{{"l", 0.75}};
  /// Sample table for kind "table".
  std::vector<double> x;
  std::vector<double> gamma;

  bool operator==(const CurveConfig&) const = default;
};

struct ProblemConfig {
  double alpha = 1.0;
  double beta = 0.0;
  CurveConfig curve;
  FunctionConfig Q{"default", {}, false, {}};
  FunctionConfig forcing{"mixed_trig", {}, false, {}};
  int n = 128;
  int nx = 32;
  int ny = 32;
  std::vector<int> study_grids{64, 128, 256};
  int trunc_n_max = 8;
  double trunc_tail_tol = 1e-14;
  double min_order = 1.0;
  /// Spectral residual must stay below this constant times 1/m.
  double spectral_constant = 0.5;
  double neumann_tol = 1e-10;
  int max_iterations = 500;

  bool operator==(const ProblemConfig&) const = default;
};

struct AnalysisConfig {
  int n4 = 12;
  int n_max = 6;
  int apriori_m = 16;
  int probes = 9;
  double stencil = 0.0;
  double manufactured_k = 1.0;

  bool operator==(const AnalysisConfig&) const = default;
};

struct SpectralConfig {
  int m = 16;
  std::vector<std::complex<double>> lambdas{{1.0, 0.0}};
  std::string method = "auto";

  bool operator==(const SpectralConfig&) const = default;
};

enum class Command { Solve, Verify, Analyze, Converge, Spectral };
const char* to_string(Command c);
/// Throws ConfigError for unknown names.
Command command_from_string(const std::string& s);

struct RunConfig {
  std::string schema = kConfigSchema;
  Command command = Command::Solve;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  ProblemConfig problem;
  AnalysisConfig analysis;
  SpectralConfig spectral;

  bool operator==(const RunConfig&) const = default;
};

/// Parses a config document. Unknown keys, wrong types and a wrong schema tag
/// raise ConfigError naming the field path (and line/column for syntax errors).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON text: fixed key order, every field present.
std::string config_to_json(const RunConfig& cfg);

/// ProblemSpec for the configuration. Random forcings draw from `seed`.
ProblemSpec build_spec(const ProblemConfig& p, std::uint64_t seed = 0);

/// Random combination of the forcing library, coefficients uniform in [-1, 1].
ForcingField random_library_forcing(std::uint64_t seed);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// Rows of numbers under a mandatory header.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& row);
  /// Row with a leading text column.
  void add_row(const std::string& label, const std::vector<double>& row);
  std::string str() const;
  std::size_t rows() const { return rows_; }

 private:
  std::vector<std::string> header_;
  std::string body_;
  std::size_t rows_ = 0;
};

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

}  // namespace mixedsolve
