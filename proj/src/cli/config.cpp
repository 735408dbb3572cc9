#include "tmsim/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "tmsim/stochastic.hpp"
#include "tmsim/waveguide.hpp"

namespace tmsim::cli {

namespace {

constexpr std::pair<Experiment, std::string_view> kExperiments[] = {
    {Experiment::modes, "modes"},         {Experiment::rates, "rates"},
    {Experiment::decohere, "decohere"},   {Experiment::bell, "bell"},
    {Experiment::chsh_scan, "chsh-scan"}, {Experiment::delays, "delays"},
    {Experiment::fig2, "fig2"},           {Experiment::bpm_run, "bpm-run"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : known_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

double parse_number(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

long long parse_integer(std::string_view key, std::string_view v) {
  v = trim(v);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  }
  return out;
}

bool parse_boolean(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  v = trim(v);
  if (v.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(parse_number(key, v.substr(start, comma == std::string_view::npos ? v.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void check_value(const KeySpec& k, std::string_view v) {
  switch (k.kind) {
    case ValueKind::number: parse_number(k.name, v); break;
    case ValueKind::integer: parse_integer(k.name, v); break;
    case ValueKind::boolean: parse_boolean(k.name, v); break;
    case ValueKind::number_list: parse_list(k.name, v); break;
    case ValueKind::text: break;
  }
}

}  // namespace

std::string_view experiment_name(Experiment e) {
  for (const auto& [x, name] : kExperiments) {
    if (x == e) return name;
  }
  return "?";
}

const std::vector<KeySpec>& known_keys() {
  static const std::vector<KeySpec> keys = {
      {"core_width_um", ValueKind::number, "8", "slab core width"},
      {"n_core", ValueKind::number, "1.50", "core index"},
      {"n_clad", ValueKind::number, "1.49", "cladding index"},
      {"wavelength_um", ValueKind::number, "1.55", "vacuum wavelength"},
      {"sigma", ValueKind::number, "0.05", "rms of the coupling perturbation f(z)"},
      {"corr_length_um", ValueKind::number, "100", "correlation length D of f(z)"},
      {"k_ab_per_m", ValueKind::number, "500", "|K_ab|"},
      {"k_ab_phase_rad", ValueKind::number, "0", "arg K_ab"},
      {"delta_beta_per_m", ValueKind::number, "", "beta1 - beta0; default from the mode solver"},
      {"l_max_m", ValueKind::number, "1.0", "longest propagation length of a scan"},
      {"l_points", ValueKind::integer, "20", "lengths in a scan, evenly spaced up to l_max_m"},
      {"realizations", ValueKind::integer, "1000", "Monte-Carlo ensemble size"},
      {"dz_um", ValueKind::number, "0", "Monte-Carlo step; 0 picks min(D/16, beat/32)"},
      {"input_theta_rad", ValueKind::number, "0", "single-rail input (e^{-i t}TE0 + e^{i t}TE1)/sqrt2"},
      {"analyzer_points", ValueKind::integer, "64", "theta samples of the analyzer scan"},
      {"export_paths", ValueKind::integer, "0", "number of sampled f(z) paths to write"},
      {"state", ValueKind::text, "phi_plus", "phi_plus, phi_minus, psi_plus, psi_minus or product"},
      {"length_m", ValueKind::number, "0", "two-rail propagation length"},
      {"two_rail_mode", ValueKind::text, "paper", "paper (closed form) or channel (per-rail map)"},
      {"bell_points", ValueKind::integer, "32", "theta samples per rail of the Bell curve"},
      {"grid_n", ValueKind::integer, "32", "CHSH scan angles per setting"},
      {"top_k", ValueKind::integer, "10", "CHSH candidates reported"},
      {"dk_rel", ValueKind::number, "1e-4", "relative wavenumber step of the group-delay derivative"},
      {"delta_n_list", ValueKind::number_list, "0,1e-4,2.1e-4", "phase-section index changes"},
      {"phase_length_mm", ValueKind::number, "1", "phase-section length"},
      {"stem_length_mm", ValueKind::number, "2", "dual-mode stem length before biasing"},
      {"branch_half_angle_deg", ValueKind::number, "0.5", "branch half angle"},
      {"branch_separation_um", ValueKind::number, "24", "final branch axis separation"},
      {"output_length_mm", ValueKind::number, "0.5", "straight output section after the taper"},
      {"window_um", ValueKind::number, "80", "BPM transverse window"},
      {"nx", ValueKind::integer, "2048", "BPM transverse nodes"},
      {"bpm_dz_um", ValueKind::number, "1", "BPM step"},
      {"absorber_strength", ValueKind::number, "0.01", "peak imaginary index of the edge absorber"},
      {"bias_quadrature", ValueKind::boolean, "true", "extend the stem to the quadrature point"},
      {"structure", ValueKind::text, "splitter", "bpm-run device: splitter or straight"},
      {"length_mm", ValueKind::number, "1", "bpm-run straight-guide length"},
      {"delta_n", ValueKind::number, "0", "bpm-run phase-section index change"},
      {"launch_w1", ValueKind::number, "0.5", "bpm-run TE1 power fraction of the launch"},
      {"launch_phase_rad", ValueKind::number, "0", "bpm-run TE1 phase relative to TE0"},
      {"raster_every", ValueKind::integer, "10", "bpm-run intensity raster stride in steps"},
  };
  return keys;
}

double RunConfig::number(const std::string& key) const {
  const auto* k = find_key(key);
  const auto it = parameters.find(key);
  if (it != parameters.end()) return parse_number(key, it->second);
  if (k == nullptr || k->default_value.empty()) throw ConfigError("missing value for " + key);
  return parse_number(key, k->default_value);
}

long long RunConfig::integer(const std::string& key) const {
  const auto* k = find_key(key);
  const auto it = parameters.find(key);
  return parse_integer(key, it != parameters.end() ? std::string_view(it->second) : k->default_value);
}

bool RunConfig::boolean(const std::string& key) const {
  const auto* k = find_key(key);
  const auto it = parameters.find(key);
  return parse_boolean(key, it != parameters.end() ? std::string_view(it->second) : k->default_value);
}

std::string RunConfig::text(const std::string& key) const {
  const auto* k = find_key(key);
  const auto it = parameters.find(key);
  return std::string(trim(it != parameters.end() ? std::string_view(it->second) : k->default_value));
}

std::vector<double> RunConfig::number_list(const std::string& key) const {
  const auto* k = find_key(key);
  const auto it = parameters.find(key);
  return parse_list(key, it != parameters.end() ? std::string_view(it->second) : k->default_value);
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string> seen;
  bool have_experiment = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    if (key == "experiment") {
      const auto it = std::find_if(std::begin(kExperiments), std::end(kExperiments),
                                   [&](const auto& e) { return e.second == value; });
      if (it == std::end(kExperiments)) throw ConfigError(where + ": unknown experiment '" + value + "'");
      config.experiment = it->first;
      have_experiment = true;
      continue;
    }
    if (key == "seed") {
      const long long s = parse_integer(key, value);
      if (s < 0) throw ConfigError(where + ": seed must be >= 0");
      config.seed = static_cast<std::uint64_t>(s);
      continue;
    }
    const auto* spec = find_key(key);
    if (spec == nullptr) throw ConfigError(where + ": unknown key '" + key + "'");
    check_value(*spec, value);
    config.parameters[key] = value;
  }
  if (!have_experiment) throw ConfigError("config: `experiment` is required");
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::vector<Diagnostic> validate(const RunConfig& c) {
  std::vector<Diagnostic> out;
  auto error = [&](const std::string& key, const std::string& msg) { out.push_back({key, msg, Severity::error}); };
  try {
    for (const auto& [key, value] : c.parameters) {
      const auto* spec = find_key(key);
      if (spec == nullptr) {
        error(key, "unknown key");
        continue;
      }
      check_value(*spec, value);
    }
    for (const char* key : {"core_width_um", "wavelength_um", "n_clad", "corr_length_um", "l_max_m", "window_um",
                            "bpm_dz_um", "phase_length_mm", "stem_length_mm", "length_mm", "dk_rel"}) {
      if (!(c.number(key) > 0.0)) error(key, "must be > 0");
    }
    for (const char* key : {"sigma", "k_ab_per_m", "dz_um", "length_m", "output_length_mm", "absorber_strength"}) {
      if (!(c.number(key) >= 0.0)) error(key, "must be >= 0");
    }
    if (c.number("n_core") < c.number("n_clad")) error("n_core", "must be >= n_clad");
    if (c.integer("l_points") < 1) error("l_points", "must be >= 1");
    if (c.integer("realizations") < 1) error("realizations", "must be >= 1");
    if (c.integer("export_paths") < 0) error("export_paths", "must be >= 0");
    if (c.integer("analyzer_points") < 1) error("analyzer_points", "must be >= 1");
    if (c.integer("bell_points") < 1) error("bell_points", "must be >= 1");
    if (c.integer("grid_n") < 8) error("grid_n", "must be >= 8");
    if (c.integer("top_k") < 1) error("top_k", "must be >= 1");
    if (c.integer("nx") < 64) error("nx", "must be >= 64");
    if (c.integer("raster_every") < 0) error("raster_every", "must be >= 0");
    const double w1 = c.number("launch_w1");
    if (!(w1 >= 0.0 && w1 <= 1.0)) error("launch_w1", "must be in [0, 1]");
    const double angle = c.number("branch_half_angle_deg");
    if (!(angle >= 0.0 && angle < 2.0)) error("branch_half_angle_deg", "must be in [0, 2)");
    const auto state = c.text("state");
    if (state != "phi_plus" && state != "phi_minus" && state != "psi_plus" && state != "psi_minus" &&
        state != "product") {
      error("state", "unknown state '" + state + "'");
    }
    const auto mode = c.text("two_rail_mode");
    if (mode != "paper" && mode != "channel") error("two_rail_mode", "must be paper or channel");
    if (mode == "paper" && state != "phi_plus" && state != "product" && c.number("length_m") > 0.0) {
      error("two_rail_mode", "the closed form covers phi_plus and product only; use channel");
    }
    const auto structure = c.text("structure");
    if (structure != "splitter" && structure != "straight") error("structure", "must be splitter or straight");
    if (c.number_list("delta_n_list").empty()) error("delta_n_list", "must not be empty");
    if (c.number("phase_length_mm") > c.number("stem_length_mm")) {
      error("phase_length_mm", "phase section must fit in the stem");
    }
    if (!out.empty()) return out;

    // Regime check needs the beat constant.
    SlabSpec spec{c.number("core_width_um") * 1e-6, c.number("n_core"), c.number("n_clad"),
                  c.number("wavelength_um") * 1e-6};
    double dbeta = 0.0;
    if (c.has("delta_beta_per_m")) {
      dbeta = c.number("delta_beta_per_m");
    } else {
      const auto betas = slab_propagation_constants(spec);
      if (betas.size() < 2) {
        error("delta_beta_per_m", "waveguide guides fewer than two modes; set delta_beta_per_m");
        return out;
      }
      dbeta = betas[1] - betas[0];
    }
    PerturbationModel model{c.number("sigma"), c.number("corr_length_um") * 1e-6,
                            std::polar(c.number("k_ab_per_m"), c.number("k_ab_phase_rad"))};
    if (!rates(model, dbeta).regime_ok) {
      out.push_back({"corr_length_um", "perturbative regime violated", Severity::warning});
    }
  } catch (const ConfigError& e) {
    error("", e.what());
  }
  return out;
}

}  // namespace tmsim::cli
