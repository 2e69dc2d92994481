#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmr/baseline.hpp"
#include "mmr/control.hpp"

namespace mmr {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "MMR_CONFIG";

struct BaselineSection {
  FormVariant variant = FormVariant::ThetaScaledExponent;
  // Fitted parameters; absent until fit-baseline has run.
  std::optional<double> theta, phi, b0, r_squared;
  // Emissions series to fit when the parameters are absent. Relative paths
  // resolve against the config file's directory.
  std::string data;

  bool has_params() const { return theta && phi && b0; }
  friend bool operator==(const BaselineSection&, const BaselineSection&) = default;
};

struct CalibrationSection {
  std::string anchor_model = "HAD";
  double anchor_temperature = 14.7;  // degC, no-abatement asymptote
  friend bool operator==(const CalibrationSection&, const CalibrationSection&) = default;
};

struct EconomySection {
  double alpha = 0.000125;
  double beta = 0.018;
  std::vector<double> alpha_grid{0.000075, 0.000125, 0.0002};
  std::vector<double> beta_grid{0.014, 0.018, 0.022};
  double reporting_scale = 1.0;  // multiplies every reported cost and regret
  friend bool operator==(const EconomySection&, const EconomySection&) = default;
};

struct Tolerances {
  double integrability_margin = 1e-9;  // smallest admissible discount rate
  double root_tol = 1e-6;              // peak-time bisection
  double oracle_rel_tol = 0.005;       // solve --oracle check
  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

struct OutputSection {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "txt", "svg"};
  bool timestamp = true;

  bool wants(const std::string& fmt) const;
  friend bool operator==(const OutputSection&, const OutputSection&) = default;
};

struct RunConfig {
  int start_year = 2020;
  std::optional<double> e0;  // nullopt: calibrate from the anchor
  BaselineSection baseline;
  CalibrationSection calibration;
  EconomySection economy;
  std::vector<double> discount_rates{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07};
  std::vector<ClimateModel> ensemble{{"GFDL", 0.00157}, {"BCC", 0.00186},
                                     {"FIO", 0.00194},  {"HAD", 0.002286},
                                     {"IPSL", 0.00236}, {"MIROC", 0.00244}};
  Tolerances tolerances;
  OutputSection output;

  // Where the config was read from; not serialized.
  std::filesystem::path source_dir;

  /// Throws ValidationError naming the offending key.
  void validate() const;
  const ClimateModel* find_model(const std::string& name) const;
  std::string model_names() const;
  std::filesystem::path resolve(const std::string& path) const;

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.start_year == b.start_year && a.e0 == b.e0 &&
           a.baseline == b.baseline && a.calibration == b.calibration &&
           a.economy == b.economy && a.discount_rates == b.discount_rates &&
           a.ensemble == b.ensemble && a.tolerances == b.tolerances &&
           a.output == b.output;
  }
};

/// Parses YAML text. Unknown keys are rejected so typos surface early.
/// Throws ParseError on malformed input and ValidationError on bad values.
RunConfig parse_config(const std::string& text,
                       const std::filesystem::path& source_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// YAML with full double precision; parse_config(write_config(c)) == c.
std::string write_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::filesystem::path& path);

/// Explicit path, else $MMR_CONFIG, else `fallback`. Empty if none is set.
std::filesystem::path locate_config(const std::string& explicit_path,
                                    const std::filesystem::path& fallback = {});

/// Baseline parameters (fitting the data file if the config has none) and
/// E0 (calibrated if not fixed), ready for the solver.
struct ResolvedScenario {
  ScenarioConfig scenario;
  BaselineParams params;
  bool fitted_now = false;
  bool e0_calibrated = false;
};

ResolvedScenario resolve_scenario(const RunConfig& config);
ResolvedScenario resolve_scenario(const RunConfig& config, double alpha,
                                  double beta);

}  // namespace mmr
