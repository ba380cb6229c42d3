#include "mixedsolve/io.hpp"

#include "mixedsolve/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace mixedsolve {

using Json = nlohmann::ordered_json;

const char* to_string(Command c) {
  switch (c) {
    case Command::Solve: return "solve";
    case Command::Verify: return "verify";
    case Command::Analyze: return "analyze";
    case Command::Converge: return "converge";
    case Command::Spectral: return "spectral";
  }
  return "?";
}

Command command_from_string(const std::string& s) {
  for (Command c : {Command::Solve, Command::Verify, Command::Analyze, Command::Converge,
                    Command::Spectral})
    if (s == to_string(c)) return c;
  throw ConfigError("command: unknown command '" + s +
                    "' (expected solve, verify, analyze, converge or spectral)");
}

namespace {

// Strict view of one JSON object: every key must be read or listed.
class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  void only(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key()))
        throw ConfigError(where() + ": unknown key '" + it.key() + "'");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const Json& at(const char* key) const { return j_.at(key); }
  std::string child(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void read(const char* key, double& out) const {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(child(key) + ": expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(child(key) + ": must be finite");
  }
  void read(const char* key, int& out) const {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
    out = v.get<int>();
  }
  void read(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError(child(key) + ": expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void read(const char* key, std::string& out) const {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(child(key) + ": expected a string");
    out = v.get<std::string>();
  }
  void read(const char* key, std::vector<double>& out) const {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(child(key) + ": expected an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(child(key) + ": expected an array of numbers");
      out.push_back(e.get<double>());
    }
  }
  void read(const char* key, std::vector<int>& out) const {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(child(key) + ": expected an array of integers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number_integer())
        throw ConfigError(child(key) + ": expected an array of integers");
      out.push_back(e.get<int>());
    }
  }
  void read(const char* key, ParamMap& out) const {
    if (!has(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_object()) throw ConfigError(child(key) + ": expected an object of numbers");
    out.clear();
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (!it.value().is_number())
        throw ConfigError(child(key) + "." + it.key() + ": expected a number");
      out[it.key()] = it.value().get<double>();
    }
  }

  std::string where() const { return path_.empty() ? "config" : path_; }

 private:
  const Json& j_;
  std::string path_;
};

void positive(int v, const std::string& path, int min = 1) {
  if (v < min) throw ConfigError(path + ": must be >= " + std::to_string(min));
}

FunctionConfig read_function(const Reader& parent, const char* key, FunctionConfig out) {
  if (!parent.has(key)) return out;
  const Reader r(parent.at(key), parent.child(key));
  r.only({"name", "params", "table"});
  if (r.has("table")) {
    if (r.has("name") || r.has("params"))
      throw ConfigError(r.where() + ": give either a name or a table, not both");
    const Json& t = r.at("table");
    if (!t.is_array()) throw ConfigError(r.child("table") + ": expected [[i, j, c], ...]");
    out.is_table = true;
    out.name.clear();
    out.params.clear();
    out.table.clear();
    for (const auto& row : t) {
      if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() ||
          !row[1].is_number_integer() || !row[2].is_number())
        throw ConfigError(r.child("table") + ": expected rows [i, j, c] with integer powers");
      out.table.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<double>()});
    }
    return out;
  }
  out.is_table = false;
  out.table.clear();
  out.params.clear();
  r.read("name", out.name);
  r.read("params", out.params);
  return out;
}

Json function_json(const FunctionConfig& f) {
  Json j = Json::object();
  if (f.is_table) {
    Json t = Json::array();
    for (const PolyTerm& p : f.table) t.push_back(Json::array({p.i, p.j, p.c}));
    j["table"] = t;
  } else {
    j["name"] = f.name;
    Json p = Json::object();
    for (const auto& [k, v] : f.params) p[k] = v;
    j["params"] = p;
  }
  return j;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(col) + ": " + e.what());
  }
  RunConfig cfg;
  const Reader top(j, "");
  top.only({"schema", "command", "output_dir", "seed", "problem", "analysis", "spectral"});
  if (!top.has("schema")) throw ConfigError("schema: missing (expected \"" +
                                            std::string(kConfigSchema) + "\")");
  top.read("schema", cfg.schema);
  if (cfg.schema != kConfigSchema)
    throw ConfigError("schema: unsupported version '" + cfg.schema + "' (expected \"" +
                      kConfigSchema + "\")");
  std::string command = to_string(cfg.command);
  top.read("command", command);
  cfg.command = command_from_string(command);
  top.read("output_dir", cfg.output_dir);
  top.read("seed", cfg.seed);

  if (top.has("problem")) {
    const Reader p(top.at("problem"), "problem");
    p.only({"alpha", "beta", "curve", "Q", "forcing", "grid", "truncation", "tolerances"});
    ProblemConfig& pc = cfg.problem;
    p.read("alpha", pc.alpha);
    p.read("beta", pc.beta);
    if (p.has("curve")) {
      const Reader c(p.at("curve"), "problem.curve");
      c.only({"kind", "params", "x", "gamma"});
      pc.curve = CurveConfig{};
      c.read("kind", pc.curve.kind);
      if (c.has("params")) c.read("params", pc.curve.params);
      else if (pc.curve.kind != "linear") pc.curve.params.clear();
      c.read("x", pc.curve.x);
      c.read("gamma", pc.curve.gamma);
      if (pc.curve.kind == "table") {
        if (c.has("params")) throw ConfigError("problem.curve.params: not used by a table curve");
        pc.curve.params.clear();
      } else if (c.has("x") || c.has("gamma")) {
        throw ConfigError("problem.curve: x/gamma samples need kind \"table\"");
      }
    }
    pc.Q = read_function(p, "Q", pc.Q);
    pc.forcing = read_function(p, "forcing", pc.forcing);
    if (p.has("grid")) {
      const Reader g(p.at("grid"), "problem.grid");
      g.only({"n", "nx", "ny", "study"});
      g.read("n", pc.n);
      g.read("nx", pc.nx);
      g.read("ny", pc.ny);
      g.read("study", pc.study_grids);
      positive(pc.n, "problem.grid.n", 4);
      positive(pc.nx, "problem.grid.nx");
      positive(pc.ny, "problem.grid.ny");
      for (int n : pc.study_grids) positive(n, "problem.grid.study", 4);
    }
    if (p.has("truncation")) {
      const Reader t(p.at("truncation"), "problem.truncation");
      t.only({"n_max", "tail_tol"});
      t.read("n_max", pc.trunc_n_max);
      t.read("tail_tol", pc.trunc_tail_tol);
      positive(pc.trunc_n_max, "problem.truncation.n_max");
      if (!(pc.trunc_tail_tol > 0.0))
        throw ConfigError("problem.truncation.tail_tol: must be positive");
    }
    if (p.has("tolerances")) {
      const Reader t(p.at("tolerances"), "problem.tolerances");
      t.only({"min_order", "spectral_constant", "neumann_tol", "max_iterations"});
      t.read("min_order", pc.min_order);
      t.read("spectral_constant", pc.spectral_constant);
      t.read("neumann_tol", pc.neumann_tol);
      t.read("max_iterations", pc.max_iterations);
      positive(pc.max_iterations, "problem.tolerances.max_iterations");
      if (!(pc.neumann_tol > 0.0))
        throw ConfigError("problem.tolerances.neumann_tol: must be positive");
    }
  }
  if (top.has("analysis")) {
    const Reader a(top.at("analysis"), "analysis");
    a.only({"n4", "n_max", "apriori_m", "probes", "stencil", "manufactured_k"});
    AnalysisConfig& ac = cfg.analysis;
    a.read("n4", ac.n4);
    a.read("n_max", ac.n_max);
    a.read("apriori_m", ac.apriori_m);
    a.read("probes", ac.probes);
    a.read("stencil", ac.stencil);
    a.read("manufactured_k", ac.manufactured_k);
    positive(ac.n4, "analysis.n4", 2);
    positive(ac.n_max, "analysis.n_max");
    positive(ac.apriori_m, "analysis.apriori_m", 4);
    positive(ac.probes, "analysis.probes", 2);
    if (ac.stencil < 0.0) throw ConfigError("analysis.stencil: must be >= 0");
  }
  if (top.has("spectral")) {
    const Reader s(top.at("spectral"), "spectral");
    s.only({"m", "lambdas", "method"});
    SpectralConfig& sc = cfg.spectral;
    s.read("m", sc.m);
    positive(sc.m, "spectral.m", 2);
    s.read("method", sc.method);
    if (sc.method != "auto" && sc.method != "neumann" && sc.method != "dense")
      throw ConfigError("spectral.method: expected auto, neumann or dense");
    if (s.has("lambdas")) {
      const Json& l = s.at("lambdas");
      if (!l.is_array()) throw ConfigError("spectral.lambdas: expected [[re, im], ...]");
      sc.lambdas.clear();
      for (const auto& e : l) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
          throw ConfigError("spectral.lambdas: expected [[re, im], ...]");
        sc.lambdas.emplace_back(e[0].get<double>(), e[1].get<double>());
      }
    }
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  const ProblemConfig& p = cfg.problem;
  Json curve = Json::object();
  curve["kind"] = p.curve.kind;
  if (p.curve.kind == "table") {
    curve["x"] = p.curve.x;
    curve["gamma"] = p.curve.gamma;
  } else {
    Json params = Json::object();
    for (const auto& [k, v] : p.curve.params) params[k] = v;
    curve["params"] = params;
  }
  Json lambdas = Json::array();
  for (const auto& l : cfg.spectral.lambdas) lambdas.push_back(Json::array({l.real(), l.imag()}));
  Json j = {
      {"schema", cfg.schema},
      {"command", to_string(cfg.command)},
      {"output_dir", cfg.output_dir},
      {"seed", cfg.seed},
      {"problem",
       {{"alpha", p.alpha},
        {"beta", p.beta},
        {"curve", curve},
        {"Q", function_json(p.Q)},
        {"forcing", function_json(p.forcing)},
        {"grid", {{"n", p.n}, {"nx", p.nx}, {"ny", p.ny}, {"study", p.study_grids}}},
        {"truncation", {{"n_max", p.trunc_n_max}, {"tail_tol", p.trunc_tail_tol}}},
        {"tolerances",
         {{"min_order", p.min_order},
          {"spectral_constant", p.spectral_constant},
          {"neumann_tol", p.neumann_tol},
          {"max_iterations", p.max_iterations}}}}},
      {"analysis",
       {{"n4", cfg.analysis.n4},
        {"n_max", cfg.analysis.n_max},
        {"apriori_m", cfg.analysis.apriori_m},
        {"probes", cfg.analysis.probes},
        {"stencil", cfg.analysis.stencil},
        {"manufactured_k", cfg.analysis.manufactured_k}}},
      {"spectral",
       {{"m", cfg.spectral.m}, {"lambdas", lambdas}, {"method", cfg.spectral.method}}}};
  return j.dump(2);
}

ForcingField random_library_forcing(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const auto& lib = forcing_library();
  ForcingField f = ForcingField::zero();
  for (const auto& g : lib) f = f.combine(1.0, g, coef(rng));
  return ForcingField([f](double x, double y) { return f(x, y); }, Smoothness::C1,
                      "random_library");
}

ProblemSpec build_spec(const ProblemConfig& p, std::uint64_t seed) {
  if (p.alpha * p.alpha + p.beta * p.beta <= 0.0)
    throw ConfigError("problem.alpha, problem.beta: alpha^2 + beta^2 > 0 is required");
  ProblemSpec spec;
  spec.params.alpha = p.alpha;
  spec.params.beta = p.beta;
  try {
    spec.params.Q = p.Q.is_table ? q_from_table(p.Q.table) : q_by_name(p.Q.name, p.Q.params);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("problem.Q: ") + e.what());
  }
  try {
    if (p.curve.kind == "table") {
      spec.curve = CharCurve::table(p.curve.x, p.curve.gamma);
    } else {
      spec.curve = curve_by_name(p.curve.kind, p.curve.params);
    }
  } catch (const Error& e) {
    throw ConfigError(std::string("problem.curve: ") + e.what());
  }
  const CurveReport cr = validate_curve(spec.curve);
  if (!cr.ok()) throw ConfigError("problem.curve: " + cr.summary());
  try {
    if (p.forcing.is_table) {
      spec.forcing = forcing_from_table(p.forcing.table);
    } else if (p.forcing.name == "random_library") {
      if (!p.forcing.params.empty())
        throw ConfigError("random_library takes no parameters (it uses the config seed)");
      spec.forcing = random_library_forcing(seed);
    } else {
      spec.forcing = forcing_by_name(p.forcing.name, p.forcing.params);
    }
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("problem.forcing: ") + e.what());
  }
  spec.grid = Grid1D::uniform(p.n);
  spec.nx = p.nx;
  spec.ny = p.ny;
  spec.trunc.n_max = p.trunc_n_max;
  spec.trunc.tail_tol = p.trunc_tail_tol;
  spec.validate();
  return spec;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw DataError("CSV header must not be empty");
}

void CsvTable::add_row(const std::vector<double>& row) {
  if (row.size() != header_.size()) throw DataError("CSV row width differs from header");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) body_ += ',';
    body_ += format_double(row[i]);
  }
  body_ += '\n';
  ++rows_;
}

void CsvTable::add_row(const std::string& label, const std::vector<double>& row) {
  if (row.size() + 1 != header_.size()) throw DataError("CSV row width differs from header");
  body_ += label;
  for (double v : row) {
    body_ += ',';
    body_ += format_double(v);
  }
  body_ += '\n';
  ++rows_;
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += header_[i];
  }
  out += '\n';
  return out + body_;
}

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw DataError("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace mixedsolve
