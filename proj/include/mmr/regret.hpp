#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmr/control.hpp"

namespace mmr {

/// One {discount rate, climate model} pair that may describe the world.
struct StateOfWorld {
  double discount = 0.0;
  ClimateModel model;

  std::string label() const;
  friend bool operator==(const StateOfWorld&, const StateOfWorld&) = default;
};

/// Candidate abatement path, either optimal for some state or the
/// no-abatement benchmark (no provenance).
struct Policy {
  ExpPoly abatement;
  std::optional<StateOfWorld> provenance;

  bool is_no_abatement() const { return !provenance.has_value(); }
  std::string label() const;
};

/// States in table order: model outer, discount inner (d1 m1, d2 m1, ...).
/// Throws ValidationError on empty, duplicate, or non-positive inputs.
std::vector<StateOfWorld> enumerate_states(std::span<const double> rates,
                                           std::span<const ClimateModel> ensemble);

/// One optimal policy per state (same order as enumerate_states), then the
/// no-abatement policy last.
std::vector<Policy> build_policy_set(std::span<const double> rates,
                                     std::span<const ClimateModel> ensemble,
                                     const ScenarioConfig& scenario);

/// Cost of a policy in a state minus the state's optimal cost.
double regret(const Policy& policy, const StateOfWorld& state,
              const ScenarioConfig& scenario);

/// Rows are actual states of the world, columns are policies.
struct RegretMatrix {
  std::vector<StateOfWorld> states;
  std::vector<Policy> policies;
  std::vector<double> optimal_costs;  // per state
  std::vector<double> values;         // row-major, states x policies
  std::vector<double> max_regret;     // per policy
  std::vector<std::size_t> worst_state;  // per policy, argmax row
  std::size_t mmr_index = 0;

  std::size_t rows() const { return states.size(); }
  std::size_t cols() const { return policies.size(); }
  double at(std::size_t row, std::size_t col) const {
    return values[row * cols() + col];
  }
};

RegretMatrix regret_matrix(std::vector<Policy> policies,
                           std::vector<StateOfWorld> states,
                           const ScenarioConfig& scenario);

/// Convenience: states and policies from the rate list and ensemble.
RegretMatrix regret_matrix(std::span<const double> rates,
                           std::span<const ClimateModel> ensemble,
                           const ScenarioConfig& scenario);

struct MmrChoice {
  std::size_t index = 0;
  Policy policy;
  double max_regret = 0.0;
};

/// Column with the smallest maximum regret. Ties go to the lower discount
/// rate, then the lower CCR; the no-abatement column loses every tie.
MmrChoice mmr_select(const RegretMatrix& matrix);

struct TemperaturePeak {
  double years = 0.0;     // time of the interior maximum of E
  double tmax = 0.0;      // ccr * E at the peak (includes the initial stock)
  double increase = 0.0;  // ccr * (E - e0) at the peak
};

struct PeakOptions {
  double horizon = 3000.0;
  double scan_step = 0.25;
  double root_tol = 1e-6;
};

/// Locates the interior maximum of cumulative emissions under the policy
/// (a zero of B - A where it turns from positive to negative; the largest
/// one if several). Throws NoPeak, carrying ccr * E(inf), when there is none.
TemperaturePeak tmax(const Policy& policy, const ClimateModel& model,
                     const ScenarioConfig& scenario,
                     const PeakOptions& options = {});

struct SweepCell {
  double alpha = 0.0;
  double beta = 0.0;
  MmrChoice choice;
  ClimateModel hottest_model;  // highest CCR in the ensemble
  std::optional<TemperaturePeak> peak;  // under hottest_model
  std::vector<std::optional<TemperaturePeak>> peak_by_model;  // ensemble order
};

struct SweepReport {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<ClimateModel> ensemble;
  std::vector<SweepCell> cells;  // alpha outer, beta inner
};

SweepReport sweep(std::span<const double> alphas, std::span<const double> betas,
                  std::span<const double> rates,
                  std::span<const ClimateModel> ensemble,
                  const ScenarioConfig& scenario);

}  // namespace mmr
