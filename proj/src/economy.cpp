#include "mmr/economy.hpp"

#include <cmath>

#include "mmr/errors.hpp"

namespace mmr {

void EconParams::validate() const {
  // beta == 0 is the degenerate no-damage case and is allowed.
  if (!(alpha > 0.0) || !(beta >= 0.0)) {
    throw ValidationError("economic weights need alpha > 0 and beta >= 0");
  }
}

void RamseyInputs::validate() const {
  if (!(rho >= 0.0) || !(eta >= 0.0)) {
    throw ValidationError("Ramsey inputs require rho >= 0 and eta >= 0");
  }
}

void ClimateModel::validate() const {
  if (!(ccr >= 0.0) || !std::isfinite(ccr)) {
    throw ValidationError("climate model '" + name +
                          "' has a negative or non-finite CCR");
  }
}

double ramsey_rate(const RamseyInputs& inputs) {
  inputs.validate();
  return inputs.rho + inputs.eta * inputs.growth;
}

ExpPoly cumulative_emissions(const ExpPoly& abatement, const ExpPoly& baseline,
                             double e0) {
  return ExpPoly::constant(e0) + (baseline - abatement).integral_from_zero();
}

CostBreakdown discounted_cost_breakdown(const ExpPoly& abatement,
                                        const EconParams& econ,
                                        const ClimateModel& model,
                                        double discount,
                                        const ExpPoly& baseline, double e0) {
  if (!(discount > 0.0)) {
    throw InvalidDiscount(
        "discount rate must be positive: with a zero rate the transversality "
        "condition fails and the infinite-horizon cost is unbounded");
  }
  const ExpPoly stock = cumulative_emissions(abatement, baseline, e0);
  CostBreakdown out;
  out.abatement =
      0.5 * econ.alpha * discounted_inner_product(abatement, abatement, discount);
  out.damage = 0.5 * econ.beta * model.ccr * model.ccr *
               discounted_inner_product(stock, stock, discount);
  return out;
}

double discounted_total_cost(const ExpPoly& abatement, const EconParams& econ,
                             const ClimateModel& model, double discount,
                             const ExpPoly& baseline, double e0) {
  return discounted_cost_breakdown(abatement, econ, model, discount, baseline,
                                   e0)
      .total();
}

}  // namespace mmr
