#include "mixedsolve/app.hpp"

#include "mixedsolve/errors.hpp"
#include "mixedsolve/operator_analysis.hpp"
#include "mixedsolve/verification.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>

namespace mixedsolve {

using Json = nlohmann::ordered_json;

namespace {

// Non-finite numbers become JSON null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json num_array(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

class RunContext {
 public:
  RunContext(const RunConfig& cfg, std::ostream& log) : cfg_(cfg), log_(log) {
    out_.output_dir = cfg.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(out_.output_dir, ec);
    if (ec) throw ConfigError("output_dir: cannot create '" + cfg.output_dir + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = out_.output_dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("output_dir: cannot write " + path.string());
    f << content;
    files_.push_back({name, sha256_hex(content), content.size()});
    out_.files.push_back(name);
  }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void check(const std::string& name, bool passed, const std::string& detail = {}) {
    out_.checks.push_back({name, passed, detail});
    log_ << (passed ? "[pass] " : "[FAIL] ") << name;
    if (!detail.empty()) log_ << ": " << detail;
    log_ << "\n";
  }

  template <class F>
  auto timed(const std::string& stage, F&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      timings_.push_back({stage, seconds_since(t0)});
    } else {
      auto r = fn();
      timings_.push_back({stage, seconds_since(t0)});
      return r;
    }
  }

  RunOutcome finish() {
    bool ok = true;
    for (const auto& c : out_.checks) ok = ok && c.passed;
    out_.exit_code = ok ? 0 : 1;
    const std::string canonical = config_to_json(cfg_);
    Json files = Json::array();
    for (const auto& f : files_)
      files.push_back({{"path", f.name}, {"sha256", f.hash}, {"bytes", f.bytes}});
    Json timings = Json::object();
    for (const auto& [stage, s] : timings_) timings[stage] = s;
    Json checks = Json::array();
    for (const auto& c : out_.checks)
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    Json m = {{"tool", "mixedsolve"},
              {"version", kToolVersion},
              {"schema", cfg_.schema},
              {"command", to_string(cfg_.command)},
              {"config_hash", sha256_hex(canonical)},
              {"seed", cfg_.seed},
              {"status", ok ? "ok" : "failed"},
              {"checks", checks},
              {"timings_seconds", timings},
              {"files", files}};
    std::ofstream f(out_.output_dir / "manifest.json", std::ios::binary);
    if (!f) throw ConfigError("output_dir: cannot write manifest.json");
    f << m.dump(2) << "\n";
    out_.files.push_back("manifest.json");
    return out_;
  }

  const RunConfig& cfg() const { return cfg_; }
  std::ostream& log() { return log_; }

 private:
  static double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  struct FileEntry {
    std::string name;
    std::string hash;
    std::size_t bytes = 0;
  };

  const RunConfig& cfg_;
  std::ostream& log_;
  RunOutcome out_;
  std::vector<FileEntry> files_;
  std::vector<std::pair<std::string, double>> timings_;
};

void run_solve(RunContext& ctx, const ProblemSpec& spec) {
  DirectSolution sol;
  try {
    sol = ctx.timed("solve", [&] { return solve_direct(spec); });
  } catch (const GluingResidualError& e) {
    ctx.check("trace_gluing_self_check", false, e.what());
    return;
  }
  ctx.check("trace_gluing_self_check", true,
            "discrete gluing residual " + format_double(sol.traces.gluing_residual));
  const TraceFunctions& tr = sol.traces;
  CsvTable traces({"x", "tau", "tau_prime", "nu0", "nu1", "F"});
  for (std::size_t i = 0; i < tr.grid.size(); ++i)
    traces.add_row({tr.grid[i], tr.tau[i], tr.tau_prime[i], tr.nu0[i], tr.nu1[i], tr.F.values[i]});
  ctx.write("traces.csv", traces.str());

  const SolutionField& f = sol.field;
  CsvTable par({"x", "y", "u"});
  for (int i = 0; i <= f.nx; ++i)
    for (int j = 0; j <= f.ny; ++j)
      par.add_row({double(i) / f.nx, double(j) / f.ny, f.parabolic_at(i, j)});
  ctx.write("u_parabolic.csv", par.str());
  CsvTable hyp({"eta", "s", "x", "y", "u"});
  for (int k = 0; k <= f.nx; ++k)
    for (int j = 0; j <= f.ny; ++j) {
      const std::size_t idx = static_cast<std::size_t>(k) * (f.ny + 1) + j;
      hyp.add_row({double(k) / f.nx, double(j) / f.ny, f.hyp_x[idx], f.hyp_y[idx],
                   f.hyperbolic_at(k, j)});
    }
  ctx.write("u_hyperbolic.csv", hyp.str());
  CsvTable lam({"eta", "lambda"});
  for (int k = 0; k < lambda_table_size; ++k)
    lam.add_row({double(k) / (lambda_table_size - 1), spec.curve.lambda_table()[k]});
  ctx.write("curve_lambda.csv", lam.str());

  bool finite = true;
  for (double v : f.parabolic) finite = finite && std::isfinite(v);
  for (double v : f.hyperbolic) finite = finite && std::isfinite(v);
  ctx.check("finite_field", finite, "max |u| = " + format_double(f.max_abs()));
}

Json study_json(const ConvergenceStudy& st) {
  Json conds = Json::object();
  for (std::size_t c = 0; c < st.names.size(); ++c)
    conds[st.names[c]] = {{"sup_norms", num_array(st.norms[c])},
                          {"order", num(st.order[c])},
                          {"order_spread", num(st.spread[c])},
                          {"pairwise_orders", num_array(st.pairwise[c])}};
  return {{"grids", st.grids}, {"floor", st.floor}, {"conditions", conds}};
}

void check_orders(RunContext& ctx, const ConvergenceStudy& st, double min_order,
                  const std::vector<std::string>& which) {
  for (const auto& name : which) {
    const int i = st.index(name);
    if (i < 0) continue;
    const double o = st.order[i];
    if (std::isnan(o)) {
      ctx.check("order[" + name + "]", true, "at rounding level on every grid, fit skipped");
    } else {
      ctx.check("order[" + name + "] >= " + format_double(min_order), o >= min_order,
                "fitted " + format_double(o) + ", spread " + format_double(st.spread[i]));
    }
  }
}

void run_verify(RunContext& ctx, const ProblemSpec& spec) {
  const RunConfig& cfg = ctx.cfg();
  ResidualOptions opt;
  opt.probes = cfg.analysis.probes;
  opt.stencil = cfg.analysis.stencil;
  const ConvergenceStudy st =
      ctx.timed("study", [&] { return convergence(spec, cfg.problem.study_grids, opt); });
  ctx.write_json("convergence.json", study_json(st));
  // residual samples on the finest grid
  ProblemSpec fine = spec;
  fine.grid = Grid1D::uniform(st.grids.back());
  const ResidualReport rep =
      ctx.timed("finest_residuals", [&] { return residuals(fine, solve_trace(fine), opt); });
  CsvTable csv({"condition", "x", "y", "residual"});
  for (const auto& c : rep.conditions)
    for (std::size_t i = 0; i < c.value.size(); ++i) csv.add_row(c.name, {c.x[i], c.y[i], c.value[i]});
  ctx.write("residuals_n" + std::to_string(st.grids.back()) + ".csv", csv.str());
  check_orders(ctx, st, cfg.problem.min_order,
               {"heat", "wave", "ac_flux", "gluing", "ux_continuity"});
  ctx.check("dirichlet", st.norms[st.index("dirichlet")].back() <= 1e-10,
            "sup " + format_double(st.norms[st.index("dirichlet")].back()));
}

void run_converge(RunContext& ctx, const ProblemSpec& spec) {
  const RunConfig& cfg = ctx.cfg();
  ProblemSpec tmpl = spec;
  tmpl.forcing = ForcingField::zero();
  const ManufacturedSolution exact(tmpl, 1.0, cfg.analysis.manufactured_k);
  std::vector<int> grids = cfg.problem.study_grids;
  std::sort(grids.begin(), grids.end());
  std::vector<double> errors;
  double construction = 0.0;
  try {
    ctx.timed("manufactured", [&] {
      for (int n : grids) {
        const ManufacturedResult r = manufactured_check(exact, n);
        errors.push_back(r.error);
        construction = std::max(construction, r.exact_residuals.max_sup());
      }
    });
  } catch (const ConstructionError& e) {
    ctx.check("manufactured_construction", false, e.what());
    return;
  }
  ctx.check("manufactured_construction", true,
            "max residual of the exact pair " + format_double(construction));
  const ConvergenceStudy st = fit_orders(grids, {"error"}, {errors});
  Json j = study_json(st);
  j["manufactured_k"] = cfg.analysis.manufactured_k;
  j["construction_residual"] = construction;
  ctx.write_json("manufactured.json", j);
  check_orders(ctx, st, cfg.problem.min_order, {"error"});
}

void run_analyze(RunContext& ctx, const ProblemSpec& spec) {
  const RunConfig& cfg = ctx.cfg();
  const ClosedKernel K = ctx.timed("closed_kernel", [&] { return ClosedKernel(spec); });
  IteratedKernelStack st =
      ctx.timed("sample", [&] { return sample_closed_kernel(K, cfg.analysis.n4); });
  try {
    ctx.timed("iterate", [&] { iterate_kernels(st, cfg.analysis.n_max); });
  } catch (const DivergenceError& e) {
    ctx.check("iterated_kernels_finite", false, e.what());
    return;
  }
  const IteratedBoundReport bound_report = check_iterated_bound(st);
  Json rows = Json::array();
  for (const auto& r : bound_report.rows)
    rows.push_back({{"n", r.n},
                    {"min_slack", num(r.min_slack)},
                    {"violations", r.violations},
                    {"causality_violations", r.causality_violations}});
  ctx.write_json("iterated_bound.json", {{"M", st.M},
                                 {"M_coarse", st.M_coarse},
                                 {"M_fine", st.M_fine},
                                 {"n4", cfg.analysis.n4},
                                 {"rows", rows}});
  std::string slack;
  for (const auto& r : bound_report.rows) slack += (slack.empty() ? "" : ", ") + format_double(r.min_slack);
  ctx.check("iterated_kernel_bound", bound_report.passed(), "min slack per n: " + slack);

  const NormReport nr = quasinilpotency_trend(st);
  CsvTable norms({"n", "norm", "root", "bound_curve"});
  for (std::size_t i = 0; i < nr.n.size(); ++i)
    norms.add_row({double(nr.n[i]), nr.norms[i], nr.roots[i], nr.bound[i]});
  ctx.write("norms.csv", norms.str());
  ctx.write_json("norms.json", {{"M", nr.M},
                                {"n", nr.n},
                                {"norms", num_array(nr.norms)},
                                {"roots", num_array(nr.roots)},
                                {"bound_curve", num_array(nr.bound)},
                                {"eventually_decreasing", nr.eventually_decreasing()},
                                {"below_bound_from_3", nr.below_bound()}});
  ctx.check("quasinilpotency_trend", nr.eventually_decreasing() && nr.below_bound());

  const double b2 = ctx.timed("leading_block", [&] { return leading_block_norm2(spec.trunc); });
  const double b2_exact = leading_block_norm2_exact();
  const double limit = 1.0 / std::sqrt(std::numbers::pi);
  ctx.write_json("leading_block.json",
                 {{"norm2_discrete", b2}, {"norm2_series", b2_exact}, {"limit", limit}});
  ctx.check("leading_block_norm", b2 <= limit + 0.02,
            format_double(b2) + " <= " + format_double(limit) + " + 0.02");

  const auto rows_ap = ctx.timed("apriori", [&] {
    return check_apriori(spec, forcing_library(), cfg.analysis.apriori_m);
  });
  CsvTable ap({"forcing", "f_norm", "u_h1_norm", "F_norm", "u_ratio", "F_ratio"});
  bool finite = true;
  for (const auto& r : rows_ap) {
    ap.add_row(r.name, {r.f_norm, r.u_h1_norm, r.F_norm, r.u_ratio, r.F_ratio});
    finite = finite && std::isfinite(r.u_ratio) && std::isfinite(r.F_ratio);
  }
  ctx.write("apriori.csv", ap.str());
  ctx.check("apriori_ratios_finite", finite);
}

void run_spectral(RunContext& ctx, const ProblemSpec& spec) {
  const RunConfig& cfg = ctx.cfg();
  const ClosedKernel K = ctx.timed("closed_kernel", [&] { return ClosedKernel(spec); });
  const SpectralOperator op =
      ctx.timed("nystrom", [&] { return SpectralOperator(K, cfg.spectral.m); });
  SpectralOptions opt;
  opt.method = cfg.spectral.method == "dense"     ? SpectralMethod::DenseSolve
               : cfg.spectral.method == "neumann" ? SpectralMethod::Neumann
                                                  : SpectralMethod::Auto;
  opt.max_iterations = cfg.problem.max_iterations;
  opt.tol = cfg.problem.neumann_tol;
  const double bound = cfg.problem.spectral_constant * op.h();
  Json results = Json::array();
  for (std::size_t k = 0; k < cfg.spectral.lambdas.size(); ++k) {
    const auto lam = cfg.spectral.lambdas[k];
    const std::string tag = "lambda=" + format_double(lam.real()) +
                            (lam.imag() != 0.0 ? (lam.imag() > 0 ? "+" : "") +
                                                     format_double(lam.imag()) + "i"
                                               : "");
    SpectralResult r;
    try {
      r = ctx.timed("solve_" + std::to_string(k),
                    [&] { return solve_spectral(op, lam, spec.forcing, opt); });
    } catch (const IterationBudgetError& e) {
      ctx.check("spectral " + tag, false, e.what());
      results.push_back({{"lambda", {lam.real(), lam.imag()}}, {"error", e.what()}});
      continue;
    }
    results.push_back({{"lambda", {lam.real(), lam.imag()}},
                       {"method", to_string(r.method)},
                       {"neumann_iterations", r.neumann_iterations},
                       {"neumann_converged", r.neumann_converged},
                       {"last_update", num(r.last_update)},
                       {"algebraic_residual", num(r.algebraic_residual)},
                       {"residual", num(r.residual)},
                       {"residual_bound", bound}});
    CsvTable u({"x", "y", "re_u", "im_u"});
    for (std::size_t a = 0; a < r.points.size(); ++a)
      u.add_row({r.points[a].x, r.points[a].y, r.u[a].real(), r.u[a].imag()});
    ctx.write("spectral_u_" + std::to_string(k) + ".csv", u.str());
    ctx.check("spectral " + tag, r.residual <= bound,
              "residual " + format_double(r.residual) + " vs " + format_double(bound) + ", " +
                  to_string(r.method) + ", Neumann steps " +
                  std::to_string(r.neumann_iterations));
  }
  ctx.write_json("spectral.json", {{"m", cfg.spectral.m}, {"h", op.h()}, {"results", results}});
}

}  // namespace

RunOutcome run(const RunConfig& cfg, std::ostream& log) {
  const ProblemSpec spec = build_spec(cfg.problem, cfg.seed);
  RunContext ctx(cfg, log);
  ctx.write("config.json", config_to_json(cfg) + "\n");
  try {
    switch (cfg.command) {
      case Command::Solve: run_solve(ctx, spec); break;
      case Command::Verify: run_verify(ctx, spec); break;
      case Command::Converge: run_converge(ctx, spec); break;
      case Command::Analyze: run_analyze(ctx, spec); break;
      case Command::Spectral: run_spectral(ctx, spec); break;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    ctx.check(std::string(to_string(cfg.command)) + " pipeline", false, e.what());
  }
  return ctx.finish();
}

}  // namespace mixedsolve
