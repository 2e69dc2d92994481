#include "mmr/control.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "mmr/errors.hpp"

namespace mmr {
namespace {

// Polynomial part of every term sharing one exponential rate.
using RateGroups = std::map<double, std::vector<double>>;

RateGroups group_by_rate(const ExpPoly& f) {
  RateGroups groups;
  for (const Term& term : f.terms()) {
    auto& coeffs = groups[term.rate];
    if (coeffs.size() <= static_cast<std::size_t>(term.power)) {
      coeffs.resize(term.power + 1, 0.0);
    }
    coeffs[term.power] += term.coeff;
  }
  return groups;
}

bool is_resonant(const RateGroups& forcing, const CharRoots& roots,
                 double tol) {
  for (const auto& [rate, coeffs] : forcing) {
    if (std::abs(rate - roots.stable) <= tol ||
        std::abs(rate - roots.unstable) <= tol) {
      return true;
    }
  }
  return false;
}

// Solves  Q'' + (2 mu - d) Q' + chi(mu) Q = P  for polynomial Q, which makes
// Q(t) e^{mu t} a particular solution of  E'' - d E' - k E = P(t) e^{mu t}.
std::vector<double> particular_polynomial(const std::vector<double>& p,
                                          double mu, double discount,
                                          double k) {
  const double chi = mu * mu - discount * mu - k;
  const double slope = 2.0 * mu - discount;
  const int deg = static_cast<int>(p.size()) - 1;
  std::vector<double> q(p.size() + 2, 0.0);
  for (int n = deg; n >= 0; --n) {
    q[n] = (p[n] - slope * (n + 1) * q[n + 1] - (n + 2) * (n + 1) * q[n + 2]) /
           chi;
  }
  q.resize(p.size());
  return q;
}

// Below this rate gap the Taylor remainder is smaller than the quad-precision
// cancellation error of keeping the terms apart.
constexpr double kFuseGap = 1e-5;

// Re-expands terms whose rates sit within `gap` of an earlier rate around
// that rate: c t^n e^{(r+e)t} = c t^n e^{rt} sum_j (e t)^j / j!. After a
// resonance perturbation the two nearly equal rates carry huge opposite
// coefficients; fusing them recovers the finite t e^{rt} limit. The dropped
// remainder is of order c (e t)^(kMaxPower + 1 - n).
ExpPoly fuse_close_rates(const ExpPoly& f, double gap) {
  std::vector<double> anchors;
  std::vector<Term> out;
  for (const Term& term : f.terms()) {
    double anchor = term.rate;
    for (double a : anchors) {
      if (std::abs(term.rate - a) <= gap) {
        anchor = a;
        break;
      }
    }
    if (anchor == term.rate) {
      anchors.push_back(anchor);
      out.push_back(term);
      continue;
    }
    const double eps = term.rate - anchor;
    double factor = term.coeff;
    for (int j = 0; term.power + j <= ExpPoly::kMaxPower; ++j) {
      if (j > 0) factor *= eps / j;
      out.push_back({factor, term.power + j, anchor});
    }
  }
  return ExpPoly(std::move(out));
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(e0 >= 0.0)) {
    throw ValidationError("initial cumulative emissions must be nonnegative");
  }
  if (!baseline.is_zero() && !(baseline.max_rate() < 0.0)) {
    throw ValidationError(
        "baseline must decay (all rates negative) to be integrable");
  }
  econ.validate();
}

CharRoots char_roots(double discount, double ccr, double alpha, double beta) {
  if (!(discount > 0.0)) {
    throw InvalidDiscount(
        "discount rate must be positive: at zero the transversality "
        "condition is not satisfied and no optimal path exists");
  }
  if (!(alpha > 0.0) || !(beta >= 0.0)) {
    throw ValidationError("char_roots needs alpha > 0 and beta >= 0");
  }
  CharRoots roots;
  roots.k = beta * ccr * ccr / alpha;
  const double disc = std::sqrt(discount * discount + 4.0 * roots.k);
  roots.unstable = 0.5 * (discount + disc);
  // Stable root via Vieta to avoid cancellation when k is small.
  roots.stable = roots.k == 0.0 ? 0.0 : -roots.k / roots.unstable;
  return roots;
}

OptimalSolution solve_optimal(double discount, const ClimateModel& model,
                              const ScenarioConfig& scenario,
                              const SolveOptions& options) {
  model.validate();
  scenario.validate();
  CharRoots roots = char_roots(discount, model.ccr, scenario.econ.alpha,
                               scenario.econ.beta);

  OptimalSolution sol;
  sol.discount = discount;
  sol.model = model;
  sol.solved_discount = discount;

  if (roots.k == 0.0) {
    // No damages: abatement only costs, so the optimum is never to abate.
    sol.cumulative = cumulative_emissions({}, scenario.baseline, scenario.e0);
  } else {
    const ExpPoly& base = scenario.baseline;
    double d = discount;
    RateGroups forcing = group_by_rate(base.derivative() - d * base);
    int perturbations = 0;
    while (is_resonant(forcing, roots, options.resonance_tol)) {
      if (!options.allow_perturbation ||
          perturbations >= options.max_perturbations) {
        std::ostringstream os;
        os << "baseline forcing is resonant with a characteristic root at "
              "discount "
           << d << " (" << model.name << ")";
        throw ResonantForcing(os.str());
      }
      ++perturbations;
      d += options.resonance_perturbation;
      roots = char_roots(d, model.ccr, scenario.econ.alpha, scenario.econ.beta);
      forcing = group_by_rate(base.derivative() - d * base);
      std::ostringstream os;
      os << "resonant forcing: discount perturbed to " << d;
      sol.warnings.push_back(os.str());
    }
    sol.solved_discount = d;

    std::vector<Term> particular;
    for (const auto& [mu, coeffs] : forcing) {
      const auto q = particular_polynomial(coeffs, mu, d, roots.k);
      for (std::size_t n = 0; n < q.size(); ++n) {
        particular.push_back({q[n], static_cast<int>(n), mu});
      }
    }
    const ExpPoly e_part(std::move(particular));
    const double stable_coeff = scenario.e0 - e_part(0.0);
    sol.cumulative = e_part + ExpPoly::monomial(stable_coeff, 0, roots.stable);
    sol.cumulative = fuse_close_rates(sol.cumulative, kFuseGap);
    sol.abatement = base - sol.cumulative.derivative();
  }
  sol.temperature = model.ccr * sol.cumulative;
  sol.cost = discounted_total_cost(sol.abatement, scenario.econ, model,
                                   discount, scenario.baseline, scenario.e0);
  return sol;
}

OptimalSolution no_abatement_solution(const ClimateModel& model,
                                      const ScenarioConfig& scenario,
                                      double discount) {
  model.validate();
  scenario.validate();
  OptimalSolution sol;
  sol.discount = discount;
  sol.solved_discount = discount;
  sol.model = model;
  sol.cumulative = cumulative_emissions({}, scenario.baseline, scenario.e0);
  sol.temperature = model.ccr * sol.cumulative;
  sol.cost = discounted_total_cost({}, scenario.econ, model, discount,
                                   scenario.baseline, scenario.e0);
  return sol;
}

ExpPoly euler_residual(const OptimalSolution& sol, const EconParams& econ) {
  const double k = econ.beta * sol.model.ccr * sol.model.ccr / econ.alpha;
  return sol.abatement.derivative() - sol.solved_discount * sol.abatement +
         k * sol.cumulative;
}

}  // namespace mmr
