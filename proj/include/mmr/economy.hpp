#pragma once

#include <string>

#include "mmr/exppoly.hpp"

namespace mmr {

/// Weights of the quadratic abatement-cost and damage functions. Both output
/// percent of gross world product, so discounted totals come out directly in
/// the units of the regret tables.
struct EconParams {
  double alpha = 0.000125;
  double beta = 0.018;

  void validate() const;
};

/// Inputs of the Ramsey discounting rule.
struct RamseyInputs {
  double rho = 0.0;     // pure time preference, per year
  double eta = 0.0;     // elasticity of marginal utility
  double growth = 0.0;  // consumption growth, per year

  void validate() const;
};

/// Reduced-form climate model: temperature = ccr * cumulative carbon.
struct ClimateModel {
  std::string name;
  double ccr = 0.0;  // degC per GtC

  void validate() const;
  friend bool operator==(const ClimateModel&, const ClimateModel&) = default;
};

double ramsey_rate(const RamseyInputs& inputs);

inline double abatement_cost(double alpha, double abatement) {
  return 0.5 * alpha * abatement * abatement;
}

inline double damage(double beta, double temperature) {
  return 0.5 * beta * temperature * temperature;
}

/// E(t) = e0 + integral over [0, t] of (baseline - abatement).
ExpPoly cumulative_emissions(const ExpPoly& abatement, const ExpPoly& baseline,
                             double e0);

/// Present value over [0, inf) of abatement cost plus climate damage for a
/// given abatement path, evaluated exactly.
///
/// Throws InvalidDiscount for discount <= 0 (the cumulative stock has a
/// nonzero limit, so the damage integral cannot converge) and
/// DivergentIntegral if the path itself grows too fast for the discount.
double discounted_total_cost(const ExpPoly& abatement, const EconParams& econ,
                             const ClimateModel& model, double discount,
                             const ExpPoly& baseline, double e0);

/// Same value split into its two parts.
struct CostBreakdown {
  double abatement = 0.0;
  double damage = 0.0;
  double total() const { return abatement + damage; }
};

CostBreakdown discounted_cost_breakdown(const ExpPoly& abatement,
                                        const EconParams& econ,
                                        const ClimateModel& model,
                                        double discount,
                                        const ExpPoly& baseline, double e0);

}  // namespace mmr
