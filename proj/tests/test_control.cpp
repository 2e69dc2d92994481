#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mmr/control.hpp"
#include "mmr/errors.hpp"
#include "support/scenario.hpp"

using namespace mmr;

namespace {

const ClimateModel kHad{"HAD", 0.002286};

double sup_abs(const ExpPoly& f, double t1) { return sup_abs_on_grid(f, 0.0, t1, 20000); }

}  // namespace

TEST_CASE("characteristic roots") {
  SUBCASE("degenerate m = 0") {
    const auto r = char_roots(0.04, 0.0, 0.000125, 0.018);
    CHECK(r.unstable == 0.04);
    CHECK(r.stable == 0.0);
  }
  SUBCASE("reference parameters") {
    const auto r = char_roots(0.05, 0.002286, 0.000125, 0.018);
    CHECK(r.k == doctest::Approx(7.525146e-4).epsilon(1e-6));
    // Frozen from direct substitution into lambda^2 - d lambda - k = 0.
    CHECK(r.unstable == doctest::Approx(0.0621148841302246).epsilon(1e-12));
    CHECK(r.stable == doctest::Approx(-0.0121148841302246).epsilon(1e-12));
    for (double l : {r.unstable, r.stable}) {
      CHECK(std::abs(l * l - 0.05 * l - r.k) < 1e-15);
    }
  }
  SUBCASE("property: Vieta identities") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
      const double d = 0.005 + 0.1 * u(rng);
      const auto r = char_roots(d, 0.003 * u(rng), 0.00005 + 0.0003 * u(rng), 0.03 * u(rng));
      CHECK(std::abs(r.unstable + r.stable - d) <= 1e-12);
      CHECK(std::abs(r.unstable * r.stable + r.k) <= 1e-12);
      CHECK(r.unstable >= d);
      CHECK(r.stable <= 0.0);
    }
  }
  CHECK_THROWS_AS(char_roots(0.0, 0.002, 0.000125, 0.018), InvalidDiscount);
  CHECK_THROWS_AS(char_roots(-0.01, 0.002, 0.000125, 0.018), InvalidDiscount);
}

TEST_CASE("no damages means no abatement") {
  auto sc = testing::synthetic_scenario(0.000125, 0.0);
  sc.econ.beta = 0.0;
  const auto sol = solve_optimal(0.03, kHad, sc);
  CHECK(sol.abatement.is_zero());
  CHECK(sol.cost == 0.0);

  const auto sc2 = testing::synthetic_scenario();
  const auto sol2 = solve_optimal(0.03, {"none", 0.0}, sc2);
  CHECK(sol2.abatement.is_zero());
  CHECK(sol2.cost == 0.0);
}

TEST_CASE("closed-form solution structure") {
  const auto sc = testing::synthetic_scenario();
  for (double d : testing::kRates) {
    for (const auto& model : testing::ensemble()) {
      const auto sol = solve_optimal(d, model, sc);
      CHECK(sol.cumulative(0.0) == doctest::Approx(sc.e0).epsilon(1e-13));
      CHECK(sol.abatement.max_rate() < d / 2);
      // E' = B - A holds as an exact ExpPoly identity.
      CHECK((sol.cumulative.derivative() - sc.baseline + sol.abatement).is_zero());
      // Euler equation residual.
      const double scale = std::max(1.0, sup_abs(sol.abatement, 1000.0));
      CHECK(sup_abs(euler_residual(sol, sc.econ), 1000.0) <= 1e-8 * scale);
      CHECK(sol.warnings.empty());
    }
  }
}

TEST_CASE("optimal path shape at the reference parameters") {
  const auto sc = testing::calibrated_scenario();
  const auto sol = solve_optimal(0.05, kHad, sc);
  // Through the 21st century abatement lags the baseline. The fitted form
  // starts low (B(0) = b0 theta), so any early overshoot must be confined to
  // the first decade.
  for (double t = 10.0; t <= 80.0; t += 1.0) CHECK(sol.abatement(t) < sc.baseline(t));
  // In the 22nd century it overtakes it, so net cumulative emissions fall.
  bool overtakes = false;
  for (double t = 80.0; t <= 180.0; t += 1.0) overtakes |= sol.abatement(t) > sc.baseline(t);
  CHECK(overtakes);

  double peak_e = 0.0, peak_t = 0.0;
  for (double t = 0.0; t <= 3000.0; t += 0.5) {
    if (sol.cumulative(t) > peak_e) {
      peak_e = sol.cumulative(t);
      peak_t = t;
    }
  }
  CHECK(peak_t > 0.0);
  CHECK(std::abs(sol.cumulative(2000.0)) < 0.01 * peak_e);
  // The maximum of E is where A crosses B from below.
  const ExpPoly net = sc.baseline - sol.abatement;
  CHECK(net(peak_t - 1.0) > 0.0);
  CHECK(net(peak_t + 1.0) < 0.0);
}

TEST_CASE("first-order stationarity along random directions") {
  const auto sc = testing::synthetic_scenario();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double d : {0.01, 0.04, 0.07}) {
    const auto sol = solve_optimal(d, kHad, sc);
    for (int i = 0; i < 5; ++i) {
      const ExpPoly h = ExpPoly::monomial(0.2 * u(rng), 1, -0.01 - 0.04 * u(rng)) +
                        ExpPoly::monomial(5.0 * (u(rng) - 0.5), 0, -0.005 - 0.05 * u(rng));
      const double eps = 1e-3;
      const auto cost = [&](const ExpPoly& a) {
        return discounted_total_cost(a, sc.econ, kHad, d, sc.baseline, sc.e0);
      };
      const double gateaux = (cost(sol.abatement + eps * h) - cost(sol.abatement - eps * h)) / (2 * eps);
      CHECK(std::abs(gateaux) <= 1e-6);
      CHECK(cost(sol.abatement + 0.1 * h) > sol.cost);
    }
  }
}

TEST_CASE("resonant baseline triggers a documented perturbation") {
  auto sc = testing::synthetic_scenario();
  const double d = 0.03;
  const auto roots = char_roots(d, kHad.ccr, sc.econ.alpha, sc.econ.beta);
  sc.baseline = ExpPoly::monomial(10.0, 0, roots.stable);

  const auto sol = solve_optimal(d, kHad, sc);
  REQUIRE(sol.warnings.size() >= 1);
  CHECK(sol.solved_discount > d);
  CHECK(sol.solved_discount - d < 1e-8);
  CHECK(std::isfinite(sol.cost));
  // Same cost as a nearby non-resonant discount, to well within tolerance.
  auto near = sc;
  near.baseline = ExpPoly::monomial(10.0, 0, roots.stable * (1 + 1e-4));
  const auto ref = solve_optimal(d, kHad, near);
  CHECK(sol.cost == doctest::Approx(ref.cost).epsilon(1e-3));

  SolveOptions strict;
  strict.allow_perturbation = false;
  CHECK_THROWS_AS(solve_optimal(d, kHad, sc, strict), ResonantForcing);
}

TEST_CASE("invalid inputs") {
  const auto sc = testing::synthetic_scenario();
  CHECK_THROWS_AS(solve_optimal(0.0, kHad, sc), InvalidDiscount);
  auto bad = sc;
  bad.e0 = -1.0;
  CHECK_THROWS_AS(solve_optimal(0.03, kHad, bad), ValidationError);
  bad = sc;
  bad.baseline = ExpPoly::constant(1.0);
  CHECK_THROWS_AS(solve_optimal(0.03, kHad, bad), ValidationError);
}

TEST_CASE("no-abatement benchmark") {
  ScenarioConfig sc{ExpPoly::monomial(10.0, 0, -0.01), 0.0, {0.000125, 0.018}, 2020};
  const auto na = no_abatement_solution(kHad, sc, 0.03);
  CHECK(na.abatement.is_zero());
  for (double t : {0.0, 10.0, 100.0, 700.0}) {
    CHECK(na.cumulative(t) == doctest::Approx(1000.0 * (1 - std::exp(-0.01 * t))).scale(1.0));
  }
  CHECK(na.temperature.constant_term() == doctest::Approx(kHad.ccr * 1000.0));

  const auto syn = testing::synthetic_scenario();
  const auto na2 = no_abatement_solution(kHad, syn, 0.05);
  double prev = -1.0;
  for (double t = 0.0; t < 1000.0; t += 2.0) {
    CHECK(na2.cumulative(t) >= prev);
    prev = na2.cumulative(t);
  }
  const auto opt = solve_optimal(0.05, kHad, syn);
  CHECK(na2.cost > opt.cost);
}

TEST_CASE("numerical oracle agrees with the closed form") {
  const auto sc = testing::synthetic_scenario();
  const auto sol = solve_optimal(0.05, kHad, sc);
  const auto oracle = numeric_oracle(0.05, kHad, sc);
  CHECK(std::abs(oracle.cost - sol.cost) <= 0.005 * sol.cost);

  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < oracle.times.size() && oracle.times[i] <= 500.0; ++i) {
    peak = std::max(peak, std::abs(sol.abatement(oracle.times[i])));
    worst = std::max(worst, std::abs(oracle.abatement[i] - sol.abatement(oracle.times[i])));
  }
  CHECK(worst < 0.01 * peak);

  auto no_damage = sc;
  no_damage.econ.beta = 0.0;
  const auto zero = numeric_oracle(0.05, kHad, no_damage);
  CHECK(*std::max_element(zero.abatement.begin(), zero.abatement.end(),
                          [](double a, double b) { return std::abs(a) < std::abs(b); }) ==
        doctest::Approx(0.0).scale(1e-6));

  OracleOptions coarse;
  coarse.step = 2.0;
  CHECK_THROWS_AS(numeric_oracle(0.05, kHad, sc, coarse), ValidationError);
  coarse.step = 1.0;
  coarse.horizon = 500.0;
  CHECK_THROWS_AS(numeric_oracle(0.05, kHad, sc, coarse), ValidationError);
}
