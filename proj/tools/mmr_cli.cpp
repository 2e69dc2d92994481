// mmr: batch front end for fitting, solving and minimax-regret reports.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mmr/config.hpp"
#include "mmr/errors.hpp"
#include "mmr/regret.hpp"
#include "mmr/report.hpp"

namespace fs = std::filesystem;
using namespace mmr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Globals {
  std::string config_path;
  std::string out_dir;
  bool no_timestamp = false;
  bool quiet = false;
};

struct Context {
  RunConfig config;
  fs::path config_file;
  fs::path out_dir;
  bool stamp = true;
  bool quiet = false;

  std::string stamp_line(const std::string& comment = "#") const {
    return timestamp_line(stamp, comment);
  }
  void say(const std::string& text) const {
    if (!quiet) std::cout << text;
  }
  void write(const std::string& name, const std::string& body) const {
    fs::create_directories(out_dir);
    const fs::path path = out_dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << body;
    say(fmt::format("wrote {}\n", path.string()));
  }
};

Context make_context(const Globals& g) {
  Context ctx;
  ctx.config_file = locate_config(g.config_path, MMR_DEFAULT_CONFIG);
  if (ctx.config_file.empty() || !fs::exists(ctx.config_file)) {
    throw ValidationError(fmt::format(
        "no config file found: pass --config or set {} (looked for '{}')",
        kConfigEnvVar, ctx.config_file.string()));
  }
  ctx.config = load_config(ctx.config_file);
  ctx.out_dir = g.out_dir.empty() ? ctx.config.resolve(ctx.config.output.directory)
                                  : fs::path(g.out_dir);
  ctx.stamp = ctx.config.output.timestamp && !g.no_timestamp;
  ctx.quiet = g.quiet;
  return ctx;
}

const ClimateModel& require_model(const RunConfig& c, const std::string& name) {
  const ClimateModel* m = c.find_model(name);
  if (!m) {
    throw ValidationError(fmt::format("unknown model '{}'; valid names: {}", name,
                                      c.model_names()));
  }
  return *m;
}

std::string tag(double x) { return fmt::format("{:g}", x); }

// ---- fit-baseline ----------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string variant;
  std::string write_config;
};

int cmd_fit(const Globals& g, const FitArgs& a) {
  Context ctx = make_context(g);
  RunConfig& c = ctx.config;
  if (!a.variant.empty()) c.baseline.variant = parse_form_variant(a.variant);
  fs::path data_path;
  if (!a.data.empty()) {
    data_path = a.data;
    c.baseline.data = fs::absolute(data_path).string();
  } else if (!c.baseline.data.empty()) {
    data_path = c.resolve(c.baseline.data);
  } else {
    throw ValidationError("fit-baseline needs --data or baseline.data in the config");
  }
  const auto series = load_emissions(data_path, c.start_year);
  const auto fit = fit_baseline_detailed(series, c.baseline.variant, {0.01, 600.0, 300.0});
  c.baseline.theta = fit.params.theta;
  c.baseline.phi = fit.params.phi;
  c.baseline.b0 = fit.params.b0;
  c.baseline.r_squared = fit.params.r_squared;

  const std::string report = fit_report_text(fit, series, ctx.stamp_line());
  ctx.say(report);
  ctx.write("fit_report.txt", report);
  const fs::path target = a.write_config.empty() ? ctx.config_file : fs::path(a.write_config);
  save_config(c, target);
  ctx.say(fmt::format("updated config {}\n", target.string()));
  if (fit.params.r_squared < 0.9) {
    ctx.say(fmt::format("warning: r_squared {:.4f} is far below the expected 0.93\n",
                        fit.params.r_squared));
  }
  return kExitOk;
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
  double delta = 0.0;
  std::string model;
  std::optional<double> alpha, beta;
  bool oracle = false;
};

int cmd_solve(const Globals& g, const SolveArgs& a) {
  const Context ctx = make_context(g);
  const auto& c = ctx.config;
  const ClimateModel& model = require_model(c, a.model);
  const auto resolved = resolve_scenario(c, a.alpha.value_or(c.economy.alpha),
                                         a.beta.value_or(c.economy.beta));
  const auto& sc = resolved.scenario;
  if (a.delta <= c.tolerances.integrability_margin) {
    throw InvalidDiscount(
        "discount rate must be positive: at zero the transversality condition "
        "is not satisfied and the infinite-horizon problem has no optimum");
  }
  const auto sol = solve_optimal(a.delta, model, sc);
  const auto none = no_abatement_solution(model, sc, a.delta);
  const double k = c.economy.reporting_scale;
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << "\n";
  ctx.say(fmt::format("delta {:g} model {} alpha {:g} beta {:g} e0 {:.4f}\n", a.delta,
                      model.name, sc.econ.alpha, sc.econ.beta, sc.e0));
  // J_star always goes to stdout, even with --quiet.
  std::cout << fmt::format("J_star {:.6f}\n", k * sol.cost);
  ctx.say(fmt::format("J_no_abatement {:.6f}\nregret_no_abatement {:.6f}\n",
                      k * none.cost, k * (none.cost - sol.cost)));
  try {
    const Policy p{sol.abatement, StateOfWorld{a.delta, model}};
    PeakOptions po;
    po.root_tol = c.tolerances.root_tol;
    const auto peak = tmax(p, model, sc, po);
    ctx.say(fmt::format("peak_years {:.2f}\ntmax_c {:.4f}\n", peak.years, peak.tmax));
  } catch (const NoPeak& e) {
    ctx.say(fmt::format("no interior peak; long-run temperature {:.4f}\n", e.asymptote()));
  }
  if (c.output.wants("csv")) {
    ctx.write(fmt::format("solution_d{}_{}.csv", tag(a.delta), model.name),
              solution_csv(sol, sc));
  }
  if (a.oracle) {
    const auto o = numeric_oracle(a.delta, model, sc);
    const double rel = std::abs(o.cost - sol.cost) / std::max(std::abs(sol.cost), 1e-300);
    ctx.say(fmt::format("oracle_J {:.6f} relative_gap {:.3e}\n", k * o.cost, rel));
    if (rel > c.tolerances.oracle_rel_tol) {
      throw NonConvergence(fmt::format("oracle disagrees with the closed form by {:.3e}", rel));
    }
  }
  return kExitOk;
}

// ---- regret-table and mmr --------------------------------------------------

struct MatrixArgs {
  std::optional<double> alpha, beta;
};

RegretMatrix build_matrix(const Context& ctx, const MatrixArgs& a, ScenarioConfig* out = nullptr) {
  const auto& c = ctx.config;
  const auto resolved = resolve_scenario(c, a.alpha.value_or(c.economy.alpha),
                                         a.beta.value_or(c.economy.beta));
  if (out) *out = resolved.scenario;
  return regret_matrix(c.discount_rates, c.ensemble, resolved.scenario);
}

int cmd_regret_table(const Globals& g, const MatrixArgs& a) {
  const Context ctx = make_context(g);
  const auto& c = ctx.config;
  const auto m = build_matrix(ctx, a);
  const double k = c.economy.reporting_scale;
  if (c.output.wants("csv")) ctx.write("regret_matrix.csv", regret_matrix_csv(m, k));
  if (c.output.wants("txt")) ctx.write("regret_table.txt", regret_table_text(m, k, ctx.stamp_line()));
  if (c.output.wants("svg")) {
    ctx.write("regret_heatmap.svg", regret_heatmap_svg(m, ctx.stamp_line("")));
  }
  ctx.say(fmt::format("{} states x {} policies; MMR {} max regret {:.3f}\n", m.rows(), m.cols(),
                      m.policies[m.mmr_index].label(), k * m.max_regret[m.mmr_index]));
  return kExitOk;
}

int cmd_mmr(const Globals& g, const MatrixArgs& a) {
  const Context ctx = make_context(g);
  const auto m = build_matrix(ctx, a);
  const auto choice = mmr_select(m);
  const double k = ctx.config.economy.reporting_scale;
  const auto& p = choice.policy.provenance;
  std::cout << fmt::format("discount {}\nmodel {}\nmax_regret {:.6f}\nworst_state {}\n",
                           p ? tag(p->discount) : "-", p ? p->model.name : "NoAbatement",
                           k * choice.max_regret, m.states[m.worst_state[choice.index]].label());
  return kExitOk;
}

// ---- tmax ------------------------------------------------------------------

struct TmaxArgs {
  std::optional<double> alpha, beta;
  std::optional<double> delta;
  std::string policy_model;
};

int cmd_tmax(const Globals& g, const TmaxArgs& a) {
  const Context ctx = make_context(g);
  const auto& c = ctx.config;
  if (a.delta.has_value() != !a.policy_model.empty()) {
    throw ValidationError("--delta and --model go together (omit both for the MMR policy)");
  }
  ScenarioConfig sc;
  Policy policy;
  if (a.delta) {
    const auto resolved = resolve_scenario(c, a.alpha.value_or(c.economy.alpha),
                                           a.beta.value_or(c.economy.beta));
    sc = resolved.scenario;
    const ClimateModel& m = require_model(c, a.policy_model);
    policy = Policy{solve_optimal(*a.delta, m, sc).abatement, StateOfWorld{*a.delta, m}};
  } else {
    const auto m = build_matrix(ctx, {a.alpha, a.beta}, &sc);
    policy = mmr_select(m).policy;
  }
  PeakOptions po;
  po.root_tol = c.tolerances.root_tol;
  std::string csv = "policy,true_model,peak_years,tmax_c,tmax_increase_c,asymptote_c\n";
  ctx.say(fmt::format("policy {}\n{:<10}{:>10}{:>10}{:>12}\n", policy.label(), "model", "years",
                      "tmax", "increase"));
  for (const auto& m : c.ensemble) {
    try {
      const auto p = tmax(policy, m, sc, po);
      ctx.say(fmt::format("{:<10}{:>10.1f}{:>10.3f}{:>12.3f}\n", m.name, p.years, p.tmax,
                          p.increase));
      csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g},\n", policy.label(), m.name, p.years,
                         p.tmax, p.increase);
    } catch (const NoPeak& e) {
      ctx.say(fmt::format("{:<10}{:>10}{:>10}{:>12}  (long run {:.3f})\n", m.name, "none", "-",
                          "-", e.asymptote()));
      csv += fmt::format("{},{},,,,{:.17g}\n", policy.label(), m.name, e.asymptote());
    }
  }
  if (c.output.wants("csv")) ctx.write("tmax.csv", csv);
  return kExitOk;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::optional<std::vector<double>> alphas, betas;
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  const Context ctx = make_context(g);
  const auto& c = ctx.config;
  const auto alphas = a.alphas.value_or(c.economy.alpha_grid);
  const auto betas = a.betas.value_or(c.economy.beta_grid);
  if (alphas.empty() || betas.empty()) throw ValidationError("sweep grid is empty");
  const auto resolved = resolve_scenario(c);
  const auto rep = sweep(alphas, betas, c.discount_rates, c.ensemble, resolved.scenario);
  const double k = c.economy.reporting_scale;
  const std::string text = sweep_text(rep, k, ctx.stamp_line());
  ctx.say(text);
  if (c.output.wants("csv")) ctx.write("sweep.csv", sweep_csv(rep, k));
  if (c.output.wants("txt")) ctx.write("sweep.txt", text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimax-regret climate policy under discount-rate and climate-model uncertainty"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-c,--config", g.config_path,
                 fmt::format("Config file (default: ${} or the bundled default)", kConfigEnvVar));
  app.add_option("-o,--out", g.out_dir, "Output directory (overrides output.directory)");
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the generated-at line from text and SVG");
  app.add_flag("-q,--quiet", g.quiet, "Only print the primary result");

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-baseline", "Fit the baseline emissions form to a series");
  fit_cmd->add_option("--data", fit.data, "CSV with header year,emissions_gtc");
  fit_cmd->add_option("--variant", fit.variant, "theta-scaled (default) or as-printed");
  fit_cmd->add_option("--write-config", fit.write_config,
                      "Write the updated config here instead of in place");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Optimal path for one discount rate and model");
  solve_cmd->add_option("--delta", solve.delta, "Discount rate")->required();
  solve_cmd->add_option("--model", solve.model, "Climate model name")->required();
  solve_cmd->add_option("--alpha", solve.alpha, "Abatement cost weight");
  solve_cmd->add_option("--beta", solve.beta, "Damage weight");
  solve_cmd->add_flag("--oracle", solve.oracle, "Cross-check against the numerical oracle");

  MatrixArgs table;
  auto* table_cmd = app.add_subcommand("regret-table", "Full regret matrix, table and heatmap");
  table_cmd->add_option("--alpha", table.alpha, "Abatement cost weight");
  table_cmd->add_option("--beta", table.beta, "Damage weight");

  MatrixArgs mmr_args;
  auto* mmr_cmd = app.add_subcommand("mmr", "Minimax-regret policy choice");
  mmr_cmd->add_option("--alpha", mmr_args.alpha, "Abatement cost weight");
  mmr_cmd->add_option("--beta", mmr_args.beta, "Damage weight");

  TmaxArgs tm;
  auto* tmax_cmd = app.add_subcommand("tmax", "Peak temperature of a policy under each model");
  tmax_cmd->add_option("--alpha", tm.alpha, "Abatement cost weight");
  tmax_cmd->add_option("--beta", tm.beta, "Damage weight");
  tmax_cmd->add_option("--delta", tm.delta, "Policy discount rate (default: MMR policy)");
  tmax_cmd->add_option("--model", tm.policy_model, "Policy model (default: MMR policy)");

  SweepArgs sw;
  std::string alpha_list, beta_list;
  auto* sweep_cmd = app.add_subcommand("sweep", "MMR and peak temperature over the alpha/beta grid");
  auto* alpha_opt = sweep_cmd->add_option("--alphas", alpha_list, "Comma-separated alpha grid");
  auto* beta_opt = sweep_cmd->add_option("--betas", beta_list, "Comma-separated beta grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  const auto parse_list = [](const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
    }
    return out;
  };

  try {
    if (*alpha_opt) sw.alphas = parse_list(alpha_list);
    if (*beta_opt) sw.betas = parse_list(beta_list);
    if (*fit_cmd) return cmd_fit(g, fit);
    if (*solve_cmd) return cmd_solve(g, solve);
    if (*table_cmd) return cmd_regret_table(g, table);
    if (*mmr_cmd) return cmd_mmr(g, mmr_args);
    if (*tmax_cmd) return cmd_tmax(g, tm);
    if (*sweep_cmd) return cmd_sweep(g, sw);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument&) {
    std::cerr << "error: grid lists must be comma-separated numbers\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
