#include "mmr/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "mmr/errors.hpp"

namespace mmr {
namespace {

namespace fs = std::filesystem;

// Starting point for fits run on the fly; the same one fit-baseline uses.
const BaselineParams kFitGuess{0.01, 600.0, 300.0};

void reject_unknown(const YAML::Node& node, const std::string& where,
                    std::initializer_list<const char*> known) {
  if (!node.IsMap()) throw ParseError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::none_of(known.begin(), known.end(),
                     [&](const char* k) { return key == k; })) {
      throw ParseError(where + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
T read_key(const YAML::Node& node, const std::string& key, T fallback) {
  const YAML::Node v = node[key];
  if (!v) return fallback;
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ParseError("key '" + key + "' has the wrong type");
  }
}

std::optional<double> get_opt(const YAML::Node& node, const std::string& key) {
  if (!node[key] || node[key].IsNull()) return std::nullopt;
  return read_key<double>(node, key, 0.0);
}

void require_positive_distinct(const std::vector<double>& v,
                               const std::string& key) {
  if (v.empty()) throw ValidationError(key + " must not be empty");
  std::set<double> seen;
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ValidationError(key + " entries must be positive");
    }
    if (!seen.insert(x).second) {
      throw ValidationError(key + " entries must be distinct");
    }
  }
}

// Shortest text that reads back to the same double.
std::string num(double x) { return fmt::format("{}", x); }

YAML::Node seq(const std::vector<double>& v) {
  YAML::Node n(YAML::NodeType::Sequence);
  for (double x : v) n.push_back(num(x));
  n.SetStyle(YAML::EmitterStyle::Flow);
  return n;
}

}  // namespace

bool OutputSection::wants(const std::string& fmt) const {
  return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

void RunConfig::validate() const {
  if (start_year < 1 || start_year > 9999) {
    throw ValidationError("start_year out of range");
  }
  if (e0 && !(*e0 >= 0.0)) throw ValidationError("e0 must be nonnegative");
  if (baseline.has_params()) {
    BaselineParams p{*baseline.theta, *baseline.phi, *baseline.b0,
                     baseline.r_squared.value_or(0.0), baseline.variant};
    p.validate();
  } else if (baseline.data.empty()) {
    throw ValidationError(
        "baseline needs either theta/phi/b0 or a data file to fit");
  }
  if (!e0 && !find_model(calibration.anchor_model)) {
    throw ValidationError("calibration.anchor_model '" +
                          calibration.anchor_model +
                          "' is not in the ensemble (" + model_names() + ")");
  }
  if (!(calibration.anchor_temperature > 0.0)) {
    throw ValidationError("calibration.anchor_temperature must be positive");
  }
  EconParams{economy.alpha, economy.beta}.validate();
  require_positive_distinct(economy.alpha_grid, "economy.alpha_grid");
  for (double b : economy.beta_grid) {
    if (!(b >= 0.0)) throw ValidationError("economy.beta_grid entries must be >= 0");
  }
  if (economy.beta_grid.empty()) {
    throw ValidationError("economy.beta_grid must not be empty");
  }
  if (!(economy.reporting_scale > 0.0)) {
    throw ValidationError("economy.reporting_scale must be positive");
  }
  require_positive_distinct(discount_rates, "discount_rates");
  for (double d : discount_rates) {
    if (d <= tolerances.integrability_margin) {
      throw ValidationError("discount rate " + std::to_string(d) +
                            " is within the integrability margin of zero");
    }
  }
  if (ensemble.empty()) throw ValidationError("ensemble must not be empty");
  std::set<std::string> names;
  std::set<double> ccrs;
  for (const auto& m : ensemble) {
    if (!(m.ccr > 0.0)) {
      throw ValidationError("ensemble CCR for '" + m.name + "' must be positive");
    }
    if (!names.insert(m.name).second || !ccrs.insert(m.ccr).second) {
      throw ValidationError("ensemble names and CCRs must be distinct");
    }
  }
  if (!(tolerances.integrability_margin >= 0.0) || !(tolerances.root_tol > 0.0) ||
      !(tolerances.oracle_rel_tol > 0.0)) {
    throw ValidationError("tolerances must be positive");
  }
  for (const auto& f : output.formats) {
    if (f != "csv" && f != "txt" && f != "svg") {
      throw ValidationError("output.formats: unknown format '" + f + "'");
    }
  }
}

const ClimateModel* RunConfig::find_model(const std::string& name) const {
  for (const auto& m : ensemble) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::string RunConfig::model_names() const {
  std::string out;
  for (const auto& m : ensemble) {
    if (!out.empty()) out += ", ";
    out += m.name;
  }
  return out;
}

fs::path RunConfig::resolve(const std::string& path) const {
  const fs::path p(path);
  if (p.is_absolute() || source_dir.empty()) return p;
  return source_dir / p;
}

RunConfig parse_config(const std::string& text, const fs::path& source_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig c;
  c.source_dir = source_dir;
  if (root.IsNull()) {
    c.validate();
    return c;
  }
  reject_unknown(root, "config",
                 {"start_year", "e0", "baseline", "calibration", "economy",
                  "discount_rates", "ensemble", "tolerances", "output"});
  c.start_year = read_key<int>(root, "start_year", c.start_year);
  if (root["e0"]) {
    if (root["e0"].IsScalar() && root["e0"].Scalar() == "calibrate") {
      c.e0.reset();
    } else {
      c.e0 = read_key<double>(root, "e0", 0.0);
    }
  }
  if (const auto b = root["baseline"]) {
    reject_unknown(b, "baseline",
                   {"variant", "theta", "phi", "b0", "r_squared", "data"});
    try {
      c.baseline.variant = parse_form_variant(
          read_key<std::string>(b, "variant", std::string(to_string(c.baseline.variant))));
    } catch (const ValidationError& e) {
      throw ParseError(e.what());
    }
    c.baseline.theta = get_opt(b, "theta");
    c.baseline.phi = get_opt(b, "phi");
    c.baseline.b0 = get_opt(b, "b0");
    c.baseline.r_squared = get_opt(b, "r_squared");
    c.baseline.data = read_key<std::string>(b, "data", "");
  }
  if (const auto cal = root["calibration"]) {
    reject_unknown(cal, "calibration", {"anchor_model", "anchor_temperature"});
    c.calibration.anchor_model =
        read_key<std::string>(cal, "anchor_model", c.calibration.anchor_model);
    c.calibration.anchor_temperature =
        read_key<double>(cal, "anchor_temperature", c.calibration.anchor_temperature);
  }
  if (const auto e = root["economy"]) {
    reject_unknown(e, "economy",
                   {"alpha", "beta", "alpha_grid", "beta_grid", "reporting_scale"});
    c.economy.alpha = read_key<double>(e, "alpha", c.economy.alpha);
    c.economy.beta = read_key<double>(e, "beta", c.economy.beta);
    c.economy.alpha_grid = read_key(e, "alpha_grid", c.economy.alpha_grid);
    c.economy.beta_grid = read_key(e, "beta_grid", c.economy.beta_grid);
    c.economy.reporting_scale =
        read_key<double>(e, "reporting_scale", c.economy.reporting_scale);
  }
  c.discount_rates = read_key(root, "discount_rates", c.discount_rates);
  if (const auto ens = root["ensemble"]) {
    if (!ens.IsSequence()) throw ParseError("ensemble: expected a list");
    c.ensemble.clear();
    for (const auto& m : ens) {
      reject_unknown(m, "ensemble entry", {"name", "ccr"});
      if (!m["name"] || !m["ccr"]) {
        throw ParseError("ensemble entries need name and ccr");
      }
      c.ensemble.push_back({read_key<std::string>(m, "name", ""), read_key<double>(m, "ccr", 0.0)});
    }
  }
  if (const auto t = root["tolerances"]) {
    reject_unknown(t, "tolerances",
                   {"integrability_margin", "root_tol", "oracle_rel_tol"});
    auto& tol = c.tolerances;
    tol.integrability_margin =
        read_key<double>(t, "integrability_margin", tol.integrability_margin);
    tol.root_tol = read_key<double>(t, "root_tol", tol.root_tol);
    tol.oracle_rel_tol = read_key<double>(t, "oracle_rel_tol", tol.oracle_rel_tol);
  }
  if (const auto o = root["output"]) {
    reject_unknown(o, "output", {"directory", "formats", "timestamp"});
    c.output.directory = read_key<std::string>(o, "directory", c.output.directory);
    c.output.formats = read_key(o, "formats", c.output.formats);
    c.output.timestamp = read_key<bool>(o, "timestamp", c.output.timestamp);
  }
  c.validate();
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), fs::absolute(path).parent_path());
}

std::string write_config(const RunConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "start_year" << YAML::Value << c.start_year;
  out << YAML::Key << "e0" << YAML::Value;
  if (c.e0) {
    out << num(*c.e0);
  } else {
    out << "calibrate";
  }

  out << YAML::Key << "baseline" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "variant" << YAML::Value << std::string(to_string(c.baseline.variant));
  const auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) out << YAML::Key << key << YAML::Value << num(*v);
  };
  opt("theta", c.baseline.theta);
  opt("phi", c.baseline.phi);
  opt("b0", c.baseline.b0);
  opt("r_squared", c.baseline.r_squared);
  if (!c.baseline.data.empty()) {
    out << YAML::Key << "data" << YAML::Value << c.baseline.data;
  }
  out << YAML::EndMap;

  out << YAML::Key << "calibration" << YAML::Value << YAML::BeginMap
      << YAML::Key << "anchor_model" << YAML::Value << c.calibration.anchor_model
      << YAML::Key << "anchor_temperature" << YAML::Value
      << num(c.calibration.anchor_temperature) << YAML::EndMap;

  out << YAML::Key << "economy" << YAML::Value << YAML::BeginMap
      << YAML::Key << "alpha" << YAML::Value << num(c.economy.alpha)
      << YAML::Key << "beta" << YAML::Value << num(c.economy.beta)
      << YAML::Key << "alpha_grid" << YAML::Value << seq(c.economy.alpha_grid)
      << YAML::Key << "beta_grid" << YAML::Value << seq(c.economy.beta_grid)
      << YAML::Key << "reporting_scale" << YAML::Value
      << num(c.economy.reporting_scale) << YAML::EndMap;

  out << YAML::Key << "discount_rates" << YAML::Value << seq(c.discount_rates);

  out << YAML::Key << "ensemble" << YAML::Value << YAML::BeginSeq;
  for (const auto& m : c.ensemble) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value
        << m.name << YAML::Key << "ccr" << YAML::Value << num(m.ccr) << YAML::EndMap;
  }
  out << YAML::EndSeq;

  out << YAML::Key << "tolerances" << YAML::Value << YAML::BeginMap
      << YAML::Key << "integrability_margin" << YAML::Value
      << num(c.tolerances.integrability_margin) << YAML::Key << "root_tol"
      << YAML::Value << num(c.tolerances.root_tol) << YAML::Key << "oracle_rel_tol"
      << YAML::Value << num(c.tolerances.oracle_rel_tol) << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap
      << YAML::Key << "directory" << YAML::Value << c.output.directory
      << YAML::Key << "formats" << YAML::Value << YAML::Flow << c.output.formats
      << YAML::Key << "timestamp" << YAML::Value << c.output.timestamp
      << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void save_config(const RunConfig& config, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write config file " + path.string());
  out << write_config(config);
}

fs::path locate_config(const std::string& explicit_path, const fs::path& fallback) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) return env;
  return fallback;
}

ResolvedScenario resolve_scenario(const RunConfig& config) {
  return resolve_scenario(config, config.economy.alpha, config.economy.beta);
}

ResolvedScenario resolve_scenario(const RunConfig& config, double alpha,
                                  double beta) {
  ResolvedScenario r;
  if (config.baseline.has_params()) {
    r.params = {*config.baseline.theta, *config.baseline.phi, *config.baseline.b0,
                config.baseline.r_squared.value_or(0.0), config.baseline.variant};
  } else {
    const auto series =
        load_emissions(config.resolve(config.baseline.data), config.start_year);
    r.params = fit_baseline(series, config.baseline.variant, kFitGuess);
    r.fitted_now = true;
  }
  const ExpPoly b = baseline_exppoly(r.params);
  double e0 = 0.0;
  if (config.e0) {
    e0 = *config.e0;
  } else {
    const ClimateModel* anchor = config.find_model(config.calibration.anchor_model);
    if (!anchor) throw ValidationError("calibration anchor model not in ensemble");
    e0 = calibrate_initial_stock(b, anchor->ccr, config.calibration.anchor_temperature);
    r.e0_calibrated = true;
  }
  r.scenario = ScenarioConfig{b, e0, EconParams{alpha, beta}, config.start_year};
  r.scenario.validate();
  return r;
}

}  // namespace mmr
