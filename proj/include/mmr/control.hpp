#pragma once

#include <string>
#include <vector>

#include "mmr/economy.hpp"
#include "mmr/exppoly.hpp"

namespace mmr {

/// Everything that is fixed across states of the world.
struct ScenarioConfig {
  ExpPoly baseline;   // GtC / yr
  double e0 = 0.0;    // initial net cumulative emissions, GtC
  EconParams econ;
  int start_year = 2020;

  void validate() const;
};

/// Roots of  lambda^2 - discount * lambda - k = 0,  k = beta m^2 / alpha.
struct CharRoots {
  double unstable = 0.0;  // lambda_+
  double stable = 0.0;    // lambda_-
  double k = 0.0;
};

/// Throws InvalidDiscount for discount <= 0.
CharRoots char_roots(double discount, double ccr, double alpha, double beta);

struct OptimalSolution {
  ExpPoly abatement;    // A(t), GtC/yr
  ExpPoly cumulative;   // E(t), GtC, E(0) = e0
  ExpPoly temperature;  // ccr * E(t), degC
  double discount = 0.0;
  ClimateModel model;
  double cost = 0.0;    // discounted total cost at `discount`
  /// Discount actually used to build the path; differs from `discount` only
  /// after a resonance perturbation.
  double solved_discount = 0.0;
  std::vector<std::string> warnings;
};

struct SolveOptions {
  /// A forcing rate this close to a characteristic root counts as resonant.
  double resonance_tol = 1e-12;
  /// Step added to the discount rate to break a resonance.
  double resonance_perturbation = 1e-9;
  int max_perturbations = 3;
  bool allow_perturbation = true;
};

/// Closed-form optimal abatement for one {discount, model} pair.
///
/// The optimality system  A' = discount A - k E,  E' = B - A  reduces to
///   E'' - discount E' - k E = B' - discount B.
/// E is built as the bounded particular response to the baseline plus the
/// stable mode e^{lambda_- t}; the lambda_+ mode is dropped (transversality)
/// and the stable coefficient is pinned by E(0) = e0. Then A = B - E'.
OptimalSolution solve_optimal(double discount, const ClimateModel& model,
                              const ScenarioConfig& scenario,
                              const SolveOptions& options = {});

/// A == 0 path, its cumulative emissions and temperature, costed at
/// `discount`.
OptimalSolution no_abatement_solution(const ClimateModel& model,
                                      const ScenarioConfig& scenario,
                                      double discount);

/// Residual A' - discount A + k E of the abatement Euler equation.
ExpPoly euler_residual(const OptimalSolution& sol, const EconParams& econ);

struct OracleOptions {
  double step = 1.0;        // years
  double horizon = 1500.0;  // years
  double tolerance = 1e-12; // relative residual for PCG
  int max_iterations = 20000;
};

struct OracleResult {
  std::vector<double> times;
  std::vector<double> abatement;
  double cost = 0.0;
  int iterations = 0;
};

/// Independent check of the closed form: minimizes the discretized cost
/// (piecewise-linear A on a uniform grid, trapezoid quadrature, truncated at
/// the horizon) by Jacobi-preconditioned conjugate gradient. The objective
/// is a convex quadratic in the sampled path, so CG reaches its minimizer.
OracleResult numeric_oracle(double discount, const ClimateModel& model,
                            const ScenarioConfig& scenario,
                            const OracleOptions& options = {});

}  // namespace mmr
