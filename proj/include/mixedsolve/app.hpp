#pragma once

#include "mixedsolve/io.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace mixedsolve {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOutcome {
  /// 0 when every check passed, 1 otherwise.
  int exit_code = 0;
  std::vector<CheckResult> checks;
  /// Files written, relative to the output directory (manifest last).
  std::vector<std::string> files;
  std::filesystem::path output_dir;
};

/// Runs one command and writes its artifacts plus manifest.json. Config
/// problems raise ConfigError; numerical failures become failed checks.
RunOutcome run(const RunConfig& cfg, std::ostream& log);

}  // namespace mixedsolve
