// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmr/config.hpp"
#include "mmr/regret.hpp"
#include "support/quadrature.hpp"
#include "support/scenario.hpp"

using namespace mmr;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "  ok   " : "  FAIL ") + what);
  }
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
  fmt::print("[{}] criterion {}: {}\n", o.pass ? "PASS" : "FAIL", id, title);
  for (const auto& n : o.notes) fmt::print("{}\n", n);
  if (!o.pass) ++failures;
}

bool within(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::abs(want);
}

// Fit the bundled series from scratch and calibrate E0, as a fresh user would.
RunConfig calibrated_config() {
  auto c = load_config(std::string(MMR_SOURCE_DIR) + "/config/default.yaml");
  c.baseline.theta.reset();
  c.baseline.phi.reset();
  c.baseline.b0.reset();
  c.e0.reset();
  return c;
}

// ---------------------------------------------------------------------------

Outcome property_suite() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto models = testing::ensemble();
  const auto sc = testing::synthetic_scenario();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  const auto m = regret_matrix(testing::kRates, models, sc);
  double diag = 0.0, min_regret = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) diag = std::max(diag, std::abs(m.at(i, i)));
  for (double v : m.values) min_regret = std::min(min_regret, v);
  for (double v : m.max_regret) min_regret = std::min(min_regret, v);
  o.require(diag <= 1e-9, fmt::format("zero diagonal: max |regret| {:.2e} on 42 pairs", diag));
  o.require(min_regret >= -1e-9,
            fmt::format("nonnegativity: min over 1806 regrets + 43 maxima {:.2e}", min_regret));

  double vieta = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double d = 0.005 + 0.1 * u(rng);
    const auto r = char_roots(d, 0.003 * u(rng), 1e-5 + 3e-4 * u(rng), 0.03 * u(rng));
    vieta = std::max({vieta, std::abs(r.unstable + r.stable - d),
                      std::abs(r.unstable * r.stable + r.k)});
  }
  o.require(vieta <= 1e-12, fmt::format("Vieta identities: worst {:.2e} over 1000 draws", vieta));

  double quad_rel = 0.0;
  for (int i = 0; i < 200; ++i) {
    std::vector<Term> terms;
    const int n = 1 + static_cast<int>(3 * u(rng));
    for (int j = 0; j < n; ++j) {
      terms.push_back({10 * u(rng) - 5, static_cast<int>(3 * u(rng)), -0.005 - 0.1 * u(rng)});
    }
    const ExpPoly f(std::move(terms));
    const double d = 0.01 + 0.06 * u(rng);
    const double exact = integrate_discounted(f, d);
    const double q = testing::discounted_quadrature([&](double t) { return f(t); }, d);
    double mag = 0.0;  // scale for near-cancelling sums
    for (const auto& t : f.terms()) {
      mag += std::abs(integrate_discounted(ExpPoly({{t.coeff, t.power, t.rate}}), d));
    }
    quad_rel = std::max(quad_rel, std::abs(exact - q) / mag);
  }
  o.require(quad_rel <= 1e-6,
            fmt::format("ExpPoly integral vs Gauss-Kronrod: worst relative {:.2e}", quad_rel));

  double foc = 0.0;
  for (const auto& s : m.states) {
    const auto sol = solve_optimal(s.discount, s.model, sc);
    const double scale = std::max(1.0, sup_abs_on_grid(sol.abatement, 0.0, 1000.0, 10000));
    foc = std::max(foc, sup_abs_on_grid(euler_residual(sol, sc.econ), 0.0, 1000.0, 10000) / scale);
  }
  o.require(foc <= 1e-8, fmt::format("FOC residual: worst scaled {:.2e} over 42 states", foc));

  double oracle_gap = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = 0.01 + 0.06 * u(rng);
    const ClimateModel model = models[static_cast<std::size_t>(6 * u(rng)) % 6];
    const auto draw = testing::synthetic_scenario(5e-5 + 2e-4 * u(rng), 0.01 + 0.015 * u(rng));
    const double closed = solve_optimal(d, model, draw).cost;
    const double numeric = numeric_oracle(d, model, draw).cost;
    oracle_gap = std::max(oracle_gap, std::abs(numeric - closed) / closed);
  }
  o.require(oracle_gap <= 0.005,
            fmt::format("oracle vs closed-form J: worst relative gap {:.2e} on 5 draws", oracle_gap));

  bool scaling_ok = true;
  for (int i = 0; i < 3; ++i) {
    const double alpha = 5e-5 + 2e-4 * u(rng), beta = 0.01 + 0.015 * u(rng);
    const double c = 0.25 + 4 * u(rng);
    const auto a = regret_matrix(testing::kRates, models, testing::synthetic_scenario(alpha, beta));
    const auto b =
        regret_matrix(testing::kRates, models, testing::synthetic_scenario(c * alpha, c * beta));
    scaling_ok &= mmr_select(a).index == mmr_select(b).index;
  }
  o.require(scaling_ok, "joint (alpha, beta) scaling keeps the MMR argmin on 3 random grids");

  const double secs = seconds_since(t0);
  o.require(secs < 60.0, fmt::format("runtime {:.2f} s < 60 s", secs));
  return o;
}

// ---------------------------------------------------------------------------

struct Table2Cell {
  double alpha, beta;
  std::string model;
  double mmr;
  double years, tmax;
};

const std::vector<Table2Cell> kPublished = {
    {0.000075, 0.014, "IPSL", 0.172, 124, 1.248},  {0.000075, 0.018, "HAD", 0.172, 121, 1.055},
    {0.000075, 0.022, "HAD", 0.178, 118, 0.877},   {0.000125, 0.014, "MIROC", 0.266, 134, 1.831},
    {0.000125, 0.018, "IPSL", 0.273, 130, 1.564},  {0.000125, 0.022, "IPSL", 0.284, 125, 1.315},
    {0.0002, 0.014, "MIROC", 0.478, 149, 2.660},   {0.0002, 0.018, "MIROC", 0.436, 141, 2.187},
    {0.0002, 0.022, "MIROC", 0.423, 135, 1.859},
};

Outcome table2(const SweepReport& rep, double secs) {
  Outcome o;
  int models_match = 0;
  bool all_two = true, values_ok = true;
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const auto& cell = rep.cells[i];
    const auto& want = kPublished[i];
    const auto& p = cell.choice.policy.provenance;
    const bool two = p && p->discount == 0.02;
    const bool same = p && p->model.name == want.model;
    const bool close = within(cell.choice.max_regret, want.mmr, 0.15);
    all_two &= two;
    values_ok &= close;
    models_match += same;
    o.notes.push_back(fmt::format("       alpha={:<8g} beta={:<6g} got {:<5} d={:<5} {:.3f}   "
                                  "published {:<5} 0.02 {:.3f}",
                                  cell.alpha, cell.beta, p ? p->model.name : "NoAb",
                                  p ? fmt::format("{:g}", p->discount) : "-",
                                  cell.choice.max_regret, want.model, want.mmr));
  }
  o.require(all_two, "MMR discount is 0.02 in all nine cells");
  o.require(models_match >= 7, fmt::format("model matches in {}/9 cells (need >= 7)", models_match));
  o.require(values_ok, "every MMR value within 15% of the published one");
  o.require(secs < 300.0, fmt::format("sweep runtime {:.2f} s < 300 s", secs));
  return o;
}

Outcome table3(const SweepReport& rep) {
  Outcome o;
  bool years_ok = true, tmax_ok = true;
  std::vector<std::size_t> hot;
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const auto& cell = rep.cells[i];
    const auto& want = kPublished[i];
    if (!cell.peak) {
      o.require(false, fmt::format("no interior peak for alpha={:g} beta={:g}", cell.alpha, cell.beta));
      continue;
    }
    years_ok &= std::abs(cell.peak->years - want.years) <= 15.0;
    tmax_ok &= std::abs(cell.peak->tmax - want.tmax) <= 0.25;
    if (cell.peak->tmax >= 2.0) hot.push_back(i);
    o.notes.push_back(fmt::format("       alpha={:<8g} beta={:<6g} got {:6.1f} y {:.3f} C   "
                                  "published {:3.0f} y {:.3f} C",
                                  cell.alpha, cell.beta, cell.peak->years, cell.peak->tmax,
                                  want.years, want.tmax));
  }
  o.require(years_ok, "years to peak within 15 years in every cell");
  o.require(tmax_ok, "Tmax within 0.25 C in every cell");
  // The two costliest-abatement cells are alpha=0.0002 with beta 0.014, 0.018.
  o.require(hot == std::vector<std::size_t>{6, 7},
            fmt::format("Tmax >= 2 C in exactly the two costliest cells (found {})", hot.size()));
  return o;
}

// Looser of 15% relative and 0.01 absolute.
bool loose(double got, double want) {
  return std::abs(got - want) <= std::max(0.15 * std::abs(want), 0.01);
}

std::size_t state_index(const RegretMatrix& m, double d, const std::string& model) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.states[i].discount == d && m.states[i].model.name == model) return i;
  }
  throw std::runtime_error("state not found");
}

Outcome tableB1(const RegretMatrix& m, const ScenarioConfig& sc) {
  Outcome o;
  const std::size_t na = m.cols() - 1;
  // Policy {0.03, BCC} in state {0.04, GFDL}.
  const double cell = m.at(state_index(m, 0.04, "GFDL"), state_index(m, 0.03, "BCC"));
  o.require(loose(cell, 0.049), fmt::format("quoted cell: {:.3f} vs 0.049", cell));
  const std::size_t had1 = state_index(m, 0.01, "HAD");
  o.require(loose(m.at(had1, na), 38.510),
            fmt::format("No Abatement at (0.01, HAD): {:.3f} vs 38.510", m.at(had1, na)));
  o.require(loose(m.max_regret[0], 0.431),
            fmt::format("max regret of (0.01, GFDL): {:.3f} vs 0.431", m.max_regret[0]));
  const std::size_t ipsl2 = state_index(m, 0.02, "IPSL");
  o.require(loose(m.max_regret[ipsl2], 0.273),
            fmt::format("max regret of (0.02, IPSL): {:.3f} vs 0.273", m.max_regret[ipsl2]));
  o.require(loose(m.max_regret[na], 44.201),
            fmt::format("max regret of No Abatement: {:.3f} vs 44.201", m.max_regret[na]));
  const ClimateModel had = m.states[had1].model;
  const double identity = no_abatement_solution(had, sc, 0.01).cost - solve_optimal(0.01, had, sc).cost;
  const double gap = std::abs(identity - m.at(had1, na));
  o.require(gap <= 1e-9, fmt::format("regret(NoAbate; 0.01, HAD) = J(0) - J*: gap {:.1e}", gap));
  return o;
}

Outcome worked_example(const RegretMatrix& m, const ScenarioConfig& sc) {
  Outcome o;
  const ClimateModel had{"HAD", 0.002286};
  const double j5 = solve_optimal(0.05, had, sc).cost;
  const double j1 = solve_optimal(0.01, had, sc).cost;
  const double n5 = no_abatement_solution(had, sc, 0.05).cost;
  const double n1 = no_abatement_solution(had, sc, 0.01).cost;
  o.require(within(j5, 0.51, 0.15), fmt::format("J*(0.05) = {:.3f} vs 0.51", j5));
  o.require(within(j1, 3.51, 0.15), fmt::format("J*(0.01) = {:.3f} vs 3.51", j1));
  o.require(within(n5, 0.79, 0.15), fmt::format("J(NoAbate, 0.05) = {:.3f} vs 0.79", n5));
  o.require(within(n1, 42.02, 0.15), fmt::format("J(NoAbate, 0.01) = {:.3f} vs 42.02", n1));
  const std::size_t na = m.cols() - 1;
  const double g5 = std::abs((n5 - j5) - m.at(state_index(m, 0.05, "HAD"), na));
  const double g1 = std::abs((n1 - j1) - m.at(state_index(m, 0.01, "HAD"), na));
  o.require(std::max(g5, g1) <= 1e-9,
            fmt::format("differences {:.3f} and {:.3f} equal the matrix entries (gap {:.1e})",
                        n5 - j5, n1 - j1, std::max(g5, g1)));
  return o;
}

Outcome published_comparison(const RegretMatrix& m) {
  Outcome o;
  std::ifstream in(std::string(MMR_SOURCE_DIR) + "/tests/data/published_regrets.csv");
  std::map<std::pair<std::string, std::string>, double> pub;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string state, policy, value;
    std::getline(ss, state, ',');
    std::getline(ss, policy, ',');
    std::getline(ss, value, ',');
    pub[{state, policy}] = std::stod(value);
  }
  o.require(pub.size() == 1849, fmt::format("published table loaded: {} values", pub.size()));
  std::size_t exact = 0, close = 0, n = 0;
  std::vector<double> abs_err;
  const auto visit = [&](const std::string& row, const std::string& col, double got) {
    const auto it = pub.find({row, col});
    if (it == pub.end()) return;
    ++n;
    const double want = it->second;
    exact += std::abs(std::round(got * 1000) / 1000 - want) < 5e-4;
    close += loose(got, want);
    abs_err.push_back(std::abs(got - want));
  };
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) visit(m.states[r].label(), m.policies[c].label(), m.at(r, c));
  }
  for (std::size_t c = 0; c < m.cols(); ++c) visit("max_regret", m.policies[c].label(), m.max_regret[c]);
  std::sort(abs_err.begin(), abs_err.end());
  o.require(n == 1849, fmt::format("compared {} of 1849 cells", n));
  o.notes.push_back(fmt::format("       identical to 3 decimals: {}/{}; within 15% or 0.01: {}/{}", exact,
                                n, close, n));
  o.notes.push_back(fmt::format("       median |diff| {:.4f}, 95th percentile {:.4f}, max {:.4f}",
                                abs_err[n / 2], abs_err[n * 95 / 100], abs_err.back()));
  o.notes.push_back(
      "       exact agreement is not expected: the published baseline fit, initial stock and "
      "full-precision CCRs are not available, so criteria 2-5 bound the drift instead");
  return o;
}

}  // namespace

int main() {
  report(1, "calibration-free property suite", property_suite());

  const RunConfig config = calibrated_config();
  const auto resolved = resolve_scenario(config);
  fmt::print("calibration: theta {:.6f} phi {:.2f} b0 {:.2f} r2 {:.4f} e0 {:.2f}\n",
             resolved.params.theta, resolved.params.phi, resolved.params.b0,
             resolved.params.r_squared, resolved.scenario.e0);

  const auto t0 = Clock::now();
  const auto rep = sweep(config.economy.alpha_grid, config.economy.beta_grid,
                         config.discount_rates, config.ensemble, resolved.scenario);
  const double sweep_secs = seconds_since(t0);
  report(2, "MMR choice and value across the nine (alpha, beta) cells", table2(rep, sweep_secs));

  const auto middle = resolve_scenario(config, 0.000125, 0.018);
  const auto m = regret_matrix(config.discount_rates, config.ensemble, middle.scenario);
  report(3, "sampled regret-table cells at the middle (alpha, beta)", tableB1(m, middle.scenario));
  report(4, "worked example costs", worked_example(m, middle.scenario));
  report(5, "peak temperature and timing under the MMR policy", table3(rep));
  report(6, "full regret table comparison (informational)", published_comparison(m));

  fmt::print("{} criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
