#include "mixedsolve/app.hpp"
#include "mixedsolve/errors.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <sstream>

using namespace mixedsolve;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  return out;
}

template <class T>
T parse_number(const std::string& text, const std::string& option) {
  T v{};
  const char* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end || text.empty())
    throw ConfigError(option + ": cannot read '" + text + "' as a number");
  return v;
}

std::vector<int> parse_grids(const std::string& s) {
  std::vector<int> grids;
  for (const auto& part : split(s, ',')) {
    const int n = parse_number<int>(part, "--grids");
    if (n < 1) throw ConfigError("--grids: grid sizes must be positive, got " + part);
    grids.push_back(n);
  }
  if (grids.size() < 3) throw ConfigError("--grids: at least 3 grids are needed to fit an order");
  return grids;
}

std::complex<double> parse_lambda(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() != 2) throw ConfigError("--lambda: expected re,im");
  return {parse_number<double>(parts[0], "--lambda"), parse_number<double>(parts[1], "--lambda")};
}

void check_thread_env() {
  const char* env = std::getenv("MIXEDSOLVE_THREADS");
  if (!env) return;
  const std::string s(env);
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || v < 1)
    throw ConfigError("MIXEDSOLVE_THREADS: expected a positive integer, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solver and verification harness for the mixed parabolic-hyperbolic problem"};
  std::string command, config_path, out_dir, grids, lambda;
  app.add_option("command", command, "solve | verify | analyze | converge | spectral")->required();
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "Output directory (overrides output_dir)");
  app.add_option("--grids", grids, "Study grids a,b,c (verify, converge)");
  app.add_option("--lambda", lambda, "Spectral parameter re,im (spectral)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    check_thread_env();
    RunConfig cfg = load_config(config_path);
    cfg.command = command_from_string(command);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!grids.empty()) cfg.problem.study_grids = parse_grids(grids);
    if (!lambda.empty()) cfg.spectral.lambdas = {parse_lambda(lambda)};
    const RunOutcome res = run(cfg, std::cout);
    if (res.exit_code != 0) {
      for (const auto& c : res.checks)
        if (!c.passed) std::cerr << "check failed: " << c.name << (c.detail.empty() ? "" : ": ") << c.detail << "\n";
    } else {
      std::cout << "ok: " << res.files.size() << " files in " << res.output_dir.string() << "\n";
    }
    return res.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
