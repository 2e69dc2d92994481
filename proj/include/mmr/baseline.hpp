#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "mmr/exppoly.hpp"

namespace mmr {

/// Which decay factor the baseline form uses.
///  - AsPrinted:           (theta t + B0 e^{-theta phi}) theta e^{-(t - phi)}
///  - ThetaScaledExponent: (theta t + B0 e^{-theta phi}) theta e^{-theta (t - phi)}
enum class FormVariant { AsPrinted, ThetaScaledExponent };

std::string_view to_string(FormVariant v);
/// Accepts "as-printed" and "theta-scaled"; throws ValidationError otherwise.
FormVariant parse_form_variant(std::string_view text);

struct EmissionPoint {
  double year_offset = 0.0;  // years since the model start year
  double emissions = 0.0;    // GtC / year
};

struct EmissionsSeries {
  std::vector<EmissionPoint> points;

  static constexpr std::size_t kMinPoints = 10;
  static constexpr double kMinSpanYears = 200.0;

  /// Strictly increasing offsets, nonnegative emissions, at least kMinPoints
  /// points spanning kMinSpanYears.
  void validate() const;
};

struct BaselineParams {
  double theta = 0.01;  // per year
  double phi = 600.0;   // years
  double b0 = 300.0;    // GtC/yr scale
  double r_squared = 0.0;
  FormVariant variant = FormVariant::ThetaScaledExponent;

  void validate() const;
  /// Direct evaluation of the closed-form expression (not via ExpPoly).
  double evaluate(double t) const;
  /// Decay rate of the exponential factor.
  double decay_rate() const {
    return variant == FormVariant::ThetaScaledExponent ? theta : 1.0;
  }
};

/// Reads `year,emissions_gtc` comma-separated rows. Years before start_year
/// are dropped; the rest become offsets from start_year.
EmissionsSeries parse_emissions(std::istream& in, int start_year);
EmissionsSeries load_emissions(const std::filesystem::path& path,
                               int start_year);

struct FitOptions {
  int max_iterations = 500;
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  double relative_ssr_tol = 1e-10;
};

struct BaselineFit {
  BaselineParams params;
  int iterations = 0;
  double ssr = 0.0;
  double sst = 0.0;
};

/// Nonlinear least-squares fit of the baseline form by Levenberg-Marquardt
/// (Marquardt diagonal scaling). Throws NonConvergence when the iteration
/// budget runs out or the fit lands outside the valid parameter region.
BaselineFit fit_baseline_detailed(const EmissionsSeries& series,
                                  FormVariant variant,
                                  const BaselineParams& initial_guess,
                                  const FitOptions& options = {});

BaselineParams fit_baseline(const EmissionsSeries& series, FormVariant variant,
                            const BaselineParams& initial_guess,
                            const FitOptions& options = {});

/// Two-term expansion  a t e^{-r t} + b e^{-r t}.
ExpPoly baseline_exppoly(const BaselineParams& params);

/// Integral of the baseline over [0, inf). Throws DivergentIntegral when any
/// rate is nonnegative.
double cumulative_baseline(const ExpPoly& baseline);
double cumulative_baseline(const BaselineParams& params);

/// Initial cumulative stock E0 such that ccr * (E0 + integral of B) equals
/// the given long-run temperature. Throws ValidationError if E0 < 0.
double calibrate_initial_stock(const ExpPoly& baseline, double ccr,
                               double asymptotic_temperature);

}  // namespace mmr
