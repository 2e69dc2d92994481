#include "mmr/regret.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "mmr/errors.hpp"

namespace mmr {
namespace {

// Strict "a is preferred over b" for MMR tie-breaking among equal values.
bool earlier_in_tie_order(const Policy& a, const Policy& b) {
  if (a.is_no_abatement()) return false;
  if (b.is_no_abatement()) return true;
  if (a.provenance->discount != b.provenance->discount) {
    return a.provenance->discount < b.provenance->discount;
  }
  return a.provenance->model.ccr < b.provenance->model.ccr;
}

}  // namespace

std::string StateOfWorld::label() const {
  std::ostringstream os;
  os << "d=" << discount << " " << model.name;
  return os.str();
}

std::string Policy::label() const {
  return provenance ? provenance->label() : std::string("No Abatement");
}

std::vector<StateOfWorld> enumerate_states(
    std::span<const double> rates, std::span<const ClimateModel> ensemble) {
  if (rates.empty() || ensemble.empty()) {
    throw ValidationError("need at least one discount rate and one model");
  }
  std::set<double> seen_rates;
  for (double d : rates) {
    if (!(d > 0.0)) {
      throw ValidationError("discount rates must be strictly positive");
    }
    if (!seen_rates.insert(d).second) {
      throw ValidationError("duplicate discount rate in the rate set");
    }
  }
  std::set<std::string> seen_names;
  for (const auto& m : ensemble) {
    m.validate();
    if (!seen_names.insert(m.name).second) {
      throw ValidationError("duplicate model name '" + m.name + "'");
    }
  }
  std::vector<StateOfWorld> states;
  states.reserve(rates.size() * ensemble.size());
  for (const auto& m : ensemble) {
    for (double d : rates) states.push_back({d, m});
  }
  return states;
}

std::vector<Policy> build_policy_set(std::span<const double> rates,
                                     std::span<const ClimateModel> ensemble,
                                     const ScenarioConfig& scenario) {
  std::vector<Policy> policies;
  for (const auto& state : enumerate_states(rates, ensemble)) {
    try {
      policies.push_back(
          {solve_optimal(state.discount, state.model, scenario).abatement,
           state});
    } catch (const NumericalError& e) {
      throw NumericalError("solving " + state.label() + ": " + e.what());
    }
  }
  policies.push_back({ExpPoly{}, std::nullopt});
  return policies;
}

double regret(const Policy& policy, const StateOfWorld& state,
              const ScenarioConfig& scenario) {
  const double optimal =
      solve_optimal(state.discount, state.model, scenario).cost;
  return discounted_total_cost(policy.abatement, scenario.econ, state.model,
                               state.discount, scenario.baseline,
                               scenario.e0) -
         optimal;
}

RegretMatrix regret_matrix(std::vector<Policy> policies,
                           std::vector<StateOfWorld> states,
                           const ScenarioConfig& scenario) {
  if (policies.empty() || states.empty()) {
    throw ValidationError("regret matrix needs policies and states");
  }
  RegretMatrix m;
  m.states = std::move(states);
  m.policies = std::move(policies);
  const std::size_t rows = m.rows(), cols = m.cols();
  m.optimal_costs.resize(rows);
  m.values.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const StateOfWorld& s = m.states[r];
    m.optimal_costs[r] = solve_optimal(s.discount, s.model, scenario).cost;
    for (std::size_t c = 0; c < cols; ++c) {
      const double cost =
          discounted_total_cost(m.policies[c].abatement, scenario.econ, s.model,
                                s.discount, scenario.baseline, scenario.e0);
      m.values[r * cols + c] = cost - m.optimal_costs[r];
    }
  }
  m.max_regret.assign(cols, 0.0);
  m.worst_state.assign(cols, 0);
  for (std::size_t c = 0; c < cols; ++c) {
    double best = m.at(0, c);
    std::size_t arg = 0;
    for (std::size_t r = 1; r < rows; ++r) {
      if (m.at(r, c) > best) {
        best = m.at(r, c);
        arg = r;
      }
    }
    m.max_regret[c] = best;
    m.worst_state[c] = arg;
  }
  m.mmr_index = mmr_select(m).index;
  return m;
}

RegretMatrix regret_matrix(std::span<const double> rates,
                           std::span<const ClimateModel> ensemble,
                           const ScenarioConfig& scenario) {
  return regret_matrix(build_policy_set(rates, ensemble, scenario),
                       enumerate_states(rates, ensemble), scenario);
}

MmrChoice mmr_select(const RegretMatrix& matrix) {
  const auto& mr = matrix.max_regret;
  if (mr.size() != matrix.cols() || matrix.cols() == 0) {
    throw ValidationError("mmr_select needs one max regret per policy");
  }
  std::size_t pick = 0;
  for (std::size_t c = 1; c < mr.size(); ++c) {
    if (mr[c] < mr[pick] ||
        (mr[c] == mr[pick] &&
         earlier_in_tie_order(matrix.policies[c], matrix.policies[pick]))) {
      pick = c;
    }
  }
  return {pick, matrix.policies[pick], mr[pick]};
}

TemperaturePeak tmax(const Policy& policy, const ClimateModel& model,
                     const ScenarioConfig& scenario,
                     const PeakOptions& options) {
  const ExpPoly stock =
      cumulative_emissions(policy.abatement, scenario.baseline, scenario.e0);
  const ExpPoly net = scenario.baseline - policy.abatement;  // dE/dt

  std::optional<TemperaturePeak> best;
  double lo = 0.0;
  double f_lo = net(lo);
  const auto steps =
      static_cast<long>(std::ceil(options.horizon / options.scan_step));
  for (long i = 1; i <= steps; ++i) {
    const double hi = std::min(options.horizon, i * options.scan_step);
    const double f_hi = net(hi);
    if (f_lo > 0.0 && f_hi <= 0.0) {
      double a = lo, b = hi;
      while (b - a > options.root_tol) {
        const double mid = 0.5 * (a + b);
        (net(mid) > 0.0 ? a : b) = mid;
      }
      const double t = 0.5 * (a + b);
      const double e = stock(t);
      if (!best || model.ccr * e > best->tmax) {
        best = TemperaturePeak{t, model.ccr * e, model.ccr * (e - scenario.e0)};
      }
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (!best) {
    const double asymptote = model.ccr * stock.constant_term();
    std::ostringstream os;
    os << "cumulative emissions under " << policy.label()
       << " have no interior maximum on [0, " << options.horizon
       << "]; temperature tends to " << asymptote;
    throw NoPeak(os.str(), asymptote);
  }
  return *best;
}

SweepReport sweep(std::span<const double> alphas, std::span<const double> betas,
                  std::span<const double> rates,
                  std::span<const ClimateModel> ensemble,
                  const ScenarioConfig& scenario) {
  if (alphas.empty() || betas.empty()) {
    throw ValidationError("sweep needs nonempty alpha and beta grids");
  }
  SweepReport report;
  report.alphas.assign(alphas.begin(), alphas.end());
  report.betas.assign(betas.begin(), betas.end());
  report.ensemble.assign(ensemble.begin(), ensemble.end());
  const auto hottest = std::max_element(
      ensemble.begin(), ensemble.end(),
      [](const ClimateModel& a, const ClimateModel& b) { return a.ccr < b.ccr; });

  for (double alpha : alphas) {
    for (double beta : betas) {
      ScenarioConfig cell_scenario = scenario;
      cell_scenario.econ = {alpha, beta};
      const RegretMatrix matrix = regret_matrix(rates, ensemble, cell_scenario);
      SweepCell cell;
      cell.alpha = alpha;
      cell.beta = beta;
      cell.choice = mmr_select(matrix);
      cell.hottest_model = *hottest;
      for (const auto& model : ensemble) {
        std::optional<TemperaturePeak> peak;
        try {
          peak = tmax(cell.choice.policy, model, cell_scenario);
        } catch (const NoPeak&) {
        }
        cell.peak_by_model.push_back(peak);
        if (model == *hottest) cell.peak = peak;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace mmr
