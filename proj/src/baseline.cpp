#include "mmr/baseline.hpp"

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include "mmr/errors.hpp"

namespace mmr {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

struct ModelEval {
  double value;
  Eigen::Vector3d grad;  // d/dtheta, d/dphi, d/dB0
};

ModelEval eval_with_gradient(const Eigen::Vector3d& x, FormVariant variant,
                             double t) {
  const double theta = x[0], phi = x[1], b0 = x[2];
  const bool scaled = variant == FormVariant::ThetaScaledExponent;
  const double r = scaled ? theta : 1.0;
  const double dr_dtheta = scaled ? 1.0 : 0.0;
  const double g = std::exp(-r * (t - phi));
  const double dg_dtheta = -dr_dtheta * (t - phi) * g;
  const double dg_dphi = r * g;
  const double shift = std::exp(-theta * phi);

  ModelEval out;
  out.value = theta * theta * t * g + b0 * theta * shift * g;
  out.grad[0] = 2.0 * theta * t * g + theta * theta * t * dg_dtheta +
                b0 * shift * (1.0 - theta * phi) * g +
                b0 * theta * shift * dg_dtheta;
  out.grad[1] = theta * theta * t * dg_dphi +
                b0 * theta * shift * (dg_dphi - theta * g);
  out.grad[2] = theta * shift * g;
  return out;
}

double sum_squared_residuals(const EmissionsSeries& series,
                             const Eigen::Vector3d& x, FormVariant variant) {
  double ssr = 0.0;
  for (const auto& p : series.points) {
    const double r = eval_with_gradient(x, variant, p.year_offset).value -
                     p.emissions;
    ssr += r * r;
  }
  return ssr;
}

}  // namespace

std::string_view to_string(FormVariant v) {
  return v == FormVariant::AsPrinted ? "as-printed" : "theta-scaled";
}

FormVariant parse_form_variant(std::string_view text) {
  if (text == "as-printed") return FormVariant::AsPrinted;
  if (text == "theta-scaled") return FormVariant::ThetaScaledExponent;
  throw ValidationError("unknown baseline form variant '" + std::string(text) +
                        "' (expected as-printed or theta-scaled)");
}

void EmissionsSeries::validate() const {
  if (points.size() < kMinPoints) {
    throw ValidationError("emissions series needs at least " +
                          std::to_string(kMinPoints) + " points, got " +
                          std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].emissions >= 0.0)) {
      throw ValidationError("negative emissions at offset " +
                            std::to_string(points[i].year_offset));
    }
    if (i > 0 && !(points[i].year_offset > points[i - 1].year_offset)) {
      throw ValidationError("years must be strictly increasing (offset " +
                            std::to_string(points[i].year_offset) + ")");
    }
  }
  if (points.back().year_offset - points.front().year_offset <
      kMinSpanYears) {
    throw ValidationError("emissions series must span at least 200 years");
  }
}

void BaselineParams::validate() const {
  if (!(theta > 0.0) || !(phi > 0.0) || !(b0 > 0.0)) {
    throw ValidationError("baseline parameters theta, phi, B0 must be positive");
  }
  if (!(r_squared >= 0.0 && r_squared <= 1.0)) {
    throw ValidationError("baseline r_squared must lie in [0, 1]");
  }
}

double BaselineParams::evaluate(double t) const {
  return (theta * t + b0 / std::exp(theta * phi)) * theta *
         std::exp(-decay_rate() * (t - phi));
}

EmissionsSeries parse_emissions(std::istream& in, int start_year) {
  std::string line;
  int line_no = 0;
  bool have_header = false;
  EmissionsSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!have_header) {
      if (row != "year,emissions_gtc") {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected header 'year,emissions_gtc'");
      }
      have_header = true;
      continue;
    }
    const auto comma = row.find(',');
    double year = 0.0, value = 0.0;
    if (comma == std::string_view::npos ||
        row.find(',', comma + 1) != std::string_view::npos ||
        !parse_double(row.substr(0, comma), year) ||
        !parse_double(row.substr(comma + 1), value)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": malformed row '" + std::string(row) + "'");
    }
    if (year < start_year) continue;
    series.points.push_back({year - start_year, value});
  }
  if (!have_header) throw ParseError("emissions file is empty");
  series.validate();
  return series;
}

EmissionsSeries load_emissions(const std::filesystem::path& path,
                               int start_year) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open emissions file " + path.string());
  return parse_emissions(in, start_year);
}

BaselineFit fit_baseline_detailed(const EmissionsSeries& series,
                                  FormVariant variant,
                                  const BaselineParams& initial_guess,
                                  const FitOptions& options) {
  series.validate();
  Eigen::Vector3d x(initial_guess.theta, initial_guess.phi, initial_guess.b0);
  if (!x.allFinite()) throw ValidationError("initial guess must be finite");

  double mean = 0.0;
  for (const auto& p : series.points) mean += p.emissions;
  mean /= static_cast<double>(series.points.size());
  double sst = 0.0;
  for (const auto& p : series.points) {
    sst += (p.emissions - mean) * (p.emissions - mean);
  }
  if (!(sst > 0.0)) {
    throw NonConvergence("emissions series has zero variance; nothing to fit");
  }

  double ssr = sum_squared_residuals(series, x, variant);
  if (!std::isfinite(ssr)) {
    throw NonConvergence("baseline model is not finite at the initial guess");
  }
  double lambda = options.initial_damping;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const auto& p : series.points) {
      const ModelEval e = eval_with_gradient(x, variant, p.year_offset);
      jtj += e.grad * e.grad.transpose();
      jtr += e.grad * (e.value - p.emissions);
    }
    // Retry with heavier damping until the step lowers the SSR.
    while (true) {
      Eigen::Matrix3d lhs = jtj;
      lhs.diagonal() += lambda * jtj.diagonal();
      const Eigen::Vector3d step = lhs.ldlt().solve(-jtr);
      const Eigen::Vector3d trial = x + step;
      const double trial_ssr =
          step.allFinite() && trial[0] > 0.0
              ? sum_squared_residuals(series, trial, variant)
              : std::numeric_limits<double>::infinity();
      if (std::isfinite(trial_ssr) && trial_ssr < ssr) {
        const double rel_change = (ssr - trial_ssr) / ssr;
        x = trial;
        ssr = trial_ssr;
        lambda /= options.damping_factor;
        converged = rel_change < options.relative_ssr_tol;
        break;
      }
      lambda *= options.damping_factor;
      if (lambda > 1e16) {
        // No descent direction left at working precision: stationary.
        converged = true;
        break;
      }
    }
  }
  if (!converged) {
    throw NonConvergence("Levenberg-Marquardt did not converge in " +
                         std::to_string(options.max_iterations) +
                         " iterations");
  }

  BaselineFit fit;
  fit.params = {x[0], x[1], x[2], 1.0 - ssr / sst, variant};
  fit.iterations = iter;
  fit.ssr = ssr;
  fit.sst = sst;
  try {
    fit.params.r_squared = std::max(0.0, fit.params.r_squared);
    fit.params.validate();
  } catch (const ValidationError& e) {
    std::ostringstream os;
    os << "fit converged to a degenerate baseline (theta=" << x[0]
       << ", phi=" << x[1] << ", B0=" << x[2] << "): " << e.what();
    throw NonConvergence(os.str());
  }
  return fit;
}

BaselineParams fit_baseline(const EmissionsSeries& series, FormVariant variant,
                            const BaselineParams& initial_guess,
                            const FitOptions& options) {
  return fit_baseline_detailed(series, variant, initial_guess, options).params;
}

ExpPoly baseline_exppoly(const BaselineParams& params) {
  params.validate();
  const double r = params.decay_rate();
  const double theta = params.theta;
  // theta^2 e^{r phi} t e^{-r t} + B0 theta e^{(r - theta) phi} e^{-r t}
  const double slope = theta * theta * std::exp(r * params.phi);
  const double level = params.b0 * theta * std::exp((r - theta) * params.phi);
  return ExpPoly({{slope, 1, -r}, {level, 0, -r}});
}

double cumulative_baseline(const ExpPoly& baseline) {
  if (!(baseline.max_rate() < 0.0)) {
    throw DivergentIntegral(
        "cumulative baseline diverges: baseline has a non-decaying term");
  }
  return integrate_discounted(baseline, 0.0);
}

double cumulative_baseline(const BaselineParams& params) {
  return cumulative_baseline(baseline_exppoly(params));
}

double calibrate_initial_stock(const ExpPoly& baseline, double ccr,
                               double asymptotic_temperature) {
  if (!(ccr > 0.0)) throw ValidationError("calibration CCR must be positive");
  const double e0 = asymptotic_temperature / ccr - cumulative_baseline(baseline);
  if (!(e0 >= 0.0)) {
    throw ValidationError(
        "calibration yields a negative initial cumulative stock; the baseline "
        "alone exceeds the target long-run temperature");
  }
  return e0;
}

}  // namespace mmr
