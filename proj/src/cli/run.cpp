#include "tmsim/cli/run.hpp"

#include <cmath>
#include <filesystem>
#include <ostream>
#include <system_error>

#include <unistd.h>

#include "tmsim/analyzer.hpp"
#include "tmsim/bpm.hpp"
#include "tmsim/correlation.hpp"
#include "tmsim/csv.hpp"
#include "tmsim/decoherence.hpp"
#include "tmsim/stochastic.hpp"
#include "tmsim/waveguide.hpp"

#ifndef TMSIM_VERSION
#define TMSIM_VERSION "0.0.0"
#endif

namespace tmsim::cli {

namespace {

using io::CsvTable;
using nlohmann::json;

SlabSpec slab_from(const RunConfig& c) {
  return {c.number("core_width_um") * 1e-6, c.number("n_core"), c.number("n_clad"), c.number("wavelength_um") * 1e-6};
}

double delta_beta_from(const RunConfig& c) {
  if (c.has("delta_beta_per_m")) return c.number("delta_beta_per_m");
  return delta_beta(slab_from(c));
}

PerturbationModel model_from(const RunConfig& c) {
  return {c.number("sigma"), c.number("corr_length_um") * 1e-6,
          std::polar(c.number("k_ab_per_m"), c.number("k_ab_phase_rad"))};
}

std::vector<double> length_grid(const RunConfig& c) {
  const auto n = c.integer("l_points");
  const double l_max = c.number("l_max_m");
  std::vector<double> out;
  for (long long i = 1; i <= n; ++i) out.push_back(l_max * static_cast<double>(i) / static_cast<double>(n));
  return out;
}

EvolutionParams params_at(const RunConfig& c, double length) {
  const double dbeta = delta_beta_from(c);
  return {dbeta, rates(model_from(c), dbeta), length};
}

DensityMatrix two_rail_state(const RunConfig& c) {
  const auto name = c.text("state");
  PureState s = product_state();
  if (name == "phi_plus") s = bell_state(BellFamily::Phi, BellSign::plus);
  if (name == "phi_minus") s = bell_state(BellFamily::Phi, BellSign::minus);
  if (name == "psi_plus") s = bell_state(BellFamily::Psi, BellSign::plus);
  if (name == "psi_minus") s = bell_state(BellFamily::Psi, BellSign::minus);
  const double length = c.number("length_m");
  if (length == 0.0) return density_of(s);
  const EvolutionParams p = params_at(c, length);
  if (c.text("two_rail_mode") == "channel") return apply_two_rail_channel(density_of(s), p);
  const auto input = name == "product" ? TwoRailInput::product : TwoRailInput::phi_plus;
  return two_rail_evolve(input, p, TwoRailMode::paper_closed_form);
}

void run_modes(const RunConfig& c, RunProducts& out) {
  const SlabSpec spec = slab_from(c);
  const auto modes = solve_slab_te_modes(spec);
  if (modes.empty()) throw std::domain_error("modes: waveguide guides no mode");
  CsvTable table({"index", "beta_per_m", "n_eff", "u", "group_delay_s_per_m"});
  std::vector<std::string> header{"x_m"};
  for (const auto& m : modes) {
    table.add_row({static_cast<double>(m.index), m.beta, m.beta / spec.k(), m.eigenvalue,
                   group_delay(spec, m.index, 1.0, c.number("dk_rel"))});
    header.push_back("psi_" + std::to_string(m.index));
  }
  CsvTable profiles(header);
  const auto& grid = modes.front().grid;
  for (std::size_t i = 0; i < grid.count; ++i) {
    std::vector<double> row{grid.x(i)};
    for (const auto& m : modes) row.push_back(m.profile[i].real());
    profiles.add_row(std::move(row));
  }
  out.files["modes.csv"] = table.render();
  out.files["profiles.csv"] = profiles.render();
  out.derived["extra"] = {{"guided_modes", modes.size()}, {"v_number", spec.v_number()}};
}

void run_rates(const RunConfig& c, RunProducts& out) {
  const auto model = model_from(c);
  const double dbeta = delta_beta_from(c);
  const auto r = rates(model, dbeta);
  const double x = 0.5 * model.corr_length * dbeta;
  CsvTable table({"sigma", "corr_length_m", "k_ab_abs_per_m", "delta_beta_per_m", "x", "dawson_x", "gamma_per_m",
                  "kappa_per_m", "regime_ok"});
  table.add_row({model.sigma, model.corr_length, std::abs(model.k_ab), dbeta, x, dawson(x), r.gamma, r.kappa,
                 r.regime_ok ? 1.0 : 0.0});
  out.files["rates.csv"] = table.render();
}

void run_decohere(const RunConfig& c, RunProducts& out) {
  const auto model = model_from(c);
  const double dbeta = delta_beta_from(c);
  const auto r = rates(model, dbeta);
  const double theta = c.number("input_theta_rad");
  const DensityMatrix rho0 = density_of(superpose(std::polar(1.0, -theta), std::polar(1.0, theta)));
  const auto lengths = length_grid(c);
  EnsembleOptions opts;
  opts.dz = c.number("dz_um") * 1e-6;
  opts.threads = c.threads;
  const auto scan = ensemble_scan(rho0, model, dbeta, lengths, static_cast<std::size_t>(c.integer("realizations")),
                                  c.seed, opts);

  CsvTable table({"L_m", "re_rho01", "im_rho01", "purity", "analytic_re", "analytic_im", "se_rho01"});
  std::vector<double> magnitudes;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    const auto& mean = scan.mean[j];
    const auto analytic = analytic_single_rail(rho0, {dbeta, r, lengths[j]});
    table.add_row({lengths[j], mean(0, 1).real(), mean(0, 1).imag(), mean.purity(), analytic(0, 1).real(),
                   analytic(0, 1).imag(), scan.std_error[j](0, 1)});
    magnitudes.push_back(std::abs(mean(0, 1)));
  }
  out.files["decohere.csv"] = table.render();

  const auto points = c.integer("analyzer_points");
  CsvTable analyzer({"theta_rad", "I_plus", "I_minus", "difference"});
  for (long long j = 0; j < points; ++j) {
    const double th = kPi * static_cast<double>(j) / static_cast<double>(points);
    const auto [ip, im] = intensities(scan.mean.back(), th);
    analyzer.add_row({th, ip, im, ip - im});
  }
  out.files["analyzer_scan.csv"] = analyzer.render();

  if (const auto n_paths = c.integer("export_paths"); n_paths > 0) {
    const PathSampler sampler(model, scan.dz, ensemble_path_count(model, scan.dz, lengths.back()));
    std::vector<SampledPath> paths;
    std::vector<std::string> header{"z_m"};
    for (long long i = 0; i < n_paths; ++i) {
      paths.push_back(sampler.sample(c.seed + static_cast<std::uint64_t>(i)));
      header.push_back("f_" + std::to_string(i));
    }
    CsvTable table_paths(header);
    for (std::size_t k = 0; k < sampler.count(); ++k) {
      std::vector<double> row{static_cast<double>(k) * scan.dz};
      for (const auto& p : paths) row.push_back(p.values[k]);
      table_paths.add_row(std::move(row));
    }
    out.files["paths.csv"] = table_paths.render();
  }

  json extra = {{"mc_dz_m", scan.dz}, {"realizations", scan.realizations}};
  const double m0 = std::abs(rho0(0, 1));
  bool fit_ok = m0 > 0.0;
  for (double m : magnitudes) fit_ok = fit_ok && m > 0.0;
  if (fit_ok) extra["fitted_gamma_per_m"] = fit_coherence_decay(lengths, magnitudes, m0);
  out.derived["extra"] = extra;
}

void run_bell(const RunConfig& c, RunProducts& out) {
  const DensityMatrix rho = two_rail_state(c);
  const auto n = c.integer("bell_points");
  CsvTable table({"theta1", "theta2", "E"});
  for (long long i = 0; i < n; ++i) {
    for (long long j = 0; j < n; ++j) {
      const double t1 = kPi * static_cast<double>(i) / static_cast<double>(n);
      const double t2 = kPi * static_cast<double>(j) / static_cast<double>(n);
      table.add_row({t1, t2, correlation_E(rho, t1, t2)});
    }
  }
  out.files["bell.csv"] = table.render();
}

void run_chsh(const RunConfig& c, RunProducts& out) {
  const DensityMatrix rho = two_rail_state(c);
  ChshScanOptions opts;
  opts.threads = c.threads;
  opts.top_k = static_cast<std::size_t>(c.integer("top_k"));
  const auto result = chsh_scan(rho, static_cast<int>(c.integer("grid_n")), opts);
  CsvTable table({"theta1", "theta1p", "theta2", "theta2p", "B"});
  for (const auto& cand : result.top) {
    table.add_row({cand.angles.theta1, cand.angles.theta1p, cand.angles.theta2, cand.angles.theta2p, cand.b});
  }
  out.files["chsh.csv"] = table.render();
  out.derived["extra"] = {{"max_B", result.max_b}};
}

void run_delays(const RunConfig& c, RunProducts& out) {
  const SlabSpec spec = slab_from(c);
  const double dk = c.number("dk_rel");
  const auto mode = c.text("two_rail_mode") == "channel" ? TwoRailMode::channel_composition
                                                         : TwoRailMode::paper_closed_form;
  CsvTable table({"L_m", "tau0_s", "tau1_s", "cov_entangled_s2", "cov_product_s2", "quarter_dtau2_s2"});
  for (double length : length_grid(c)) {
    const DelayPair d{group_delay(spec, 0, length, dk), group_delay(spec, 1, length, dk)};
    const auto p = params_at(c, length);
    const double ent = delay_covariance(two_rail_evolve(TwoRailInput::phi_plus, p, mode), d);
    const double prod = delay_covariance(two_rail_evolve(TwoRailInput::product, p, mode), d);
    table.add_row({length, d.tau0, d.tau1, ent, prod, 0.25 * (d.tau1 - d.tau0) * (d.tau1 - d.tau0)});
  }
  out.files["delays.csv"] = table.render();
}

bpm::YSplitterGeometry geometry_from(const RunConfig& c) {
  bpm::YSplitterGeometry g;
  g.stem_length = c.number("stem_length_mm") * 1e-3;
  g.branch_half_angle = c.number("branch_half_angle_deg") * kPi / 180.0;
  g.branch_separation_final = c.number("branch_separation_um") * 1e-6;
  g.core_width = c.number("core_width_um") * 1e-6;
  g.phase_section = bpm::PhaseSection{0.0, c.number("phase_length_mm") * 1e-3};
  return g;
}

bpm::PropagateOptions propagate_from(const RunConfig& c) {
  bpm::PropagateOptions o;
  o.wavelength = c.number("wavelength_um") * 1e-6;
  o.absorber_strength = c.number("absorber_strength");
  return o;
}

void run_fig2(const RunConfig& c, RunProducts& out) {
  const SlabSpec spec = slab_from(c);
  const auto g = geometry_from(c);
  const auto grid = bpm::splitter_grid(g, c.number("window_um") * 1e-6, static_cast<std::size_t>(c.integer("nx")),
                                       c.number("bpm_dz_um") * 1e-6, c.number("output_length_mm") * 1e-3);
  bpm::Fig2Options opts;
  opts.bias_to_quadrature = c.boolean("bias_quadrature");
  opts.threads = c.threads;
  opts.propagate = propagate_from(c);
  const auto list = c.number_list("delta_n_list");
  const auto table = bpm::fig2_experiment(list, spec, g, grid, opts);
  CsvTable csv({"delta_n", "differential_phase_rad", "P_left", "P_right", "ratio", "predicted_right"});
  for (const auto& r : table.rows) {
    csv.add_row({r.delta_n, r.differential_phase, r.left, r.right, r.ratio, r.predicted_right});
  }
  out.files["fig2.csv"] = csv.render();
  json extra = {{"stem_length_m", table.geometry.stem_length},
                {"bias_phase_rad", table.calibration.bias_phase()},
                {"cross_abs", std::abs(table.calibration.cross)},
                {"contrast", table.contrast}};
  if (table.rows.size() >= 2) extra["correlation"] = table.correlation;
  out.derived["extra"] = extra;
}

void run_bpm(const RunConfig& c, RunProducts& out) {
  const SlabSpec spec = slab_from(c);
  const double window = c.number("window_um") * 1e-6;
  const auto nx = static_cast<std::size_t>(c.integer("nx"));
  const double dz = c.number("bpm_dz_um") * 1e-6;
  bpm::Grid grid;
  std::optional<bpm::RIMap> map;
  if (c.text("structure") == "straight") {
    const auto nz = static_cast<std::size_t>(std::ceil(c.number("length_mm") * 1e-3 / dz - 1e-9));
    grid = bpm::Grid::centered(window, nx, dz, nz);
    map.emplace(bpm::straight_guide(grid, spec));
  } else {
    auto g = geometry_from(c);
    g.phase_section->delta_n = c.number("delta_n");
    grid = bpm::splitter_grid(g, window, nx, dz, c.number("output_length_mm") * 1e-3);
    map.emplace(bpm::build_geometry(g, grid, spec));
  }
  const auto modes = solve_slab_te_modes(spec, grid.profile_grid());
  const double w1 = c.number("launch_w1");
  if (modes.size() < 2 && w1 > 0.0) throw ConfigError("launch_w1: the input guide has no TE1 mode");
  std::vector<cplx> coeffs{std::sqrt(1.0 - w1)};
  if (modes.size() >= 2) coeffs.push_back(std::polar(std::sqrt(w1), c.number("launch_phase_rad")));

  auto opts = propagate_from(c);
  opts.raster_every = static_cast<std::size_t>(c.integer("raster_every"));
  const auto result = bpm::propagate(bpm::launch(coeffs, modes), *map, grid, opts);
  const auto& final_field = result.snapshots.back();

  CsvTable field({"x_m", "re", "im", "intensity"});
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const cplx v = final_field.values[i];
    field.add_row({grid.x(i), v.real(), v.imag(), std::norm(v)});
  }
  CsvTable power({"z_m", "power"});
  for (std::size_t j = 0; j < result.power.size(); ++j) power.add_row({grid.z(j), result.power[j]});
  out.files["field.csv"] = field.render();
  out.files["power.csv"] = power.render();
  if (opts.raster_every > 0) {
    out.files["raster.bin"] = io::render_raster(grid.nx, result.raster_rows, grid.dx,
                                                grid.dz * static_cast<double>(opts.raster_every), result.raster);
  }
  const auto bp = bpm::branch_powers(final_field, grid);
  json extra = {{"length_m", grid.length()},
                {"power_ratio", result.power.back() / result.power.front()},
                {"max_step_growth", result.max_step_growth},
                {"P_left", bp.left},
                {"P_right", bp.right}};
  if (c.text("structure") == "straight") {
    const auto d = bpm::decompose(final_field, modes, grid);
    extra["residual_power"] = d.residual_power;
  }
  out.derived["extra"] = extra;
}

}  // namespace

RunProducts execute(const RunConfig& c) {
  RunProducts out;
  const auto model = model_from(c);
  const double dbeta = delta_beta_from(c);
  const auto r = rates(model, dbeta);
  out.derived = {{"delta_beta_per_m", dbeta},
                 {"gamma_per_m", r.gamma},
                 {"kappa_per_m", r.kappa},
                 {"regime_ok", r.regime_ok}};
  switch (c.experiment) {
    case Experiment::modes: run_modes(c, out); break;
    case Experiment::rates: run_rates(c, out); break;
    case Experiment::decohere: run_decohere(c, out); break;
    case Experiment::bell: run_bell(c, out); break;
    case Experiment::chsh_scan: run_chsh(c, out); break;
    case Experiment::delays: run_delays(c, out); break;
    case Experiment::fig2: run_fig2(c, out); break;
    case Experiment::bpm_run: run_bpm(c, out); break;
  }
  return out;
}

json build_manifest(const RunConfig& c, const RunProducts& products) {
  json config = json::object();
  for (const auto& k : known_keys()) {
    const std::string key(k.name);
    if (c.has(key)) {
      config[key] = c.parameters.at(key);
    } else if (!k.default_value.empty()) {
      config[key] = std::string(k.default_value);
    }
  }
  json outputs = json::array();
  for (const auto& [name, content] : products.files) outputs.push_back({{"file", name}, {"bytes", content.size()}});
  return {{"schema_version", kManifestSchemaVersion},
          {"tool", "tmsim"},
          {"version", TMSIM_VERSION},
          {"experiment", std::string(experiment_name(c.experiment))},
          {"seed", c.seed},
          {"config", config},
          {"derived", products.derived},
          {"outputs", outputs}};
}

std::vector<std::string> validate_manifest(const json& m) {
  std::vector<std::string> problems;
  if (!m.is_object()) return {"manifest is not an object"};
  auto need = [&](const char* key, auto check, const char* what) {
    if (!m.contains(key)) {
      problems.push_back(std::string("missing ") + key);
    } else if (!check(m.at(key))) {
      problems.push_back(std::string(key) + " must be " + what);
    }
  };
  need("schema_version", [](const json& v) { return v.is_number_integer() && v.get<int>() == kManifestSchemaVersion; },
       "1");
  need("tool", [](const json& v) { return v.is_string() && v.get<std::string>() == "tmsim"; }, "\"tmsim\"");
  need("version", [](const json& v) { return v.is_string(); }, "a string");
  need("experiment",
       [](const json& v) {
         if (!v.is_string()) return false;
         for (auto e : {Experiment::modes, Experiment::rates, Experiment::decohere, Experiment::bell,
                        Experiment::chsh_scan, Experiment::delays, Experiment::fig2, Experiment::bpm_run}) {
           if (experiment_name(e) == v.get<std::string>()) return true;
         }
         return false;
       },
       "a known experiment");
  need("seed", [](const json& v) { return v.is_number_unsigned(); }, "an unsigned integer");
  need("config",
       [](const json& v) {
         if (!v.is_object()) return false;
         for (const auto& item : v.items()) {
           if (!item.value().is_string()) return false;
         }
         return true;
       },
       "an object of strings");
  need("derived",
       [](const json& v) {
         return v.is_object() && v.contains("delta_beta_per_m") && v["delta_beta_per_m"].is_number() &&
                v.contains("gamma_per_m") && v["gamma_per_m"].is_number() && v.contains("kappa_per_m") &&
                v["kappa_per_m"].is_number() && v.contains("regime_ok") && v["regime_ok"].is_boolean() &&
                (!v.contains("extra") || v["extra"].is_object());
       },
       "an object with delta_beta_per_m, gamma_per_m, kappa_per_m, regime_ok");
  need("outputs",
       [](const json& v) {
         if (!v.is_array() || v.empty()) return false;
         for (const auto& o : v) {
           if (!o.is_object() || !o.contains("file") || !o["file"].is_string() || !o.contains("bytes") ||
               !o["bytes"].is_number_unsigned()) {
             return false;
           }
         }
         return true;
       },
       "a non-empty array of {file, bytes}");
  return problems;
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  bool blocked = false;
  for (const auto& d : validate(config)) {
    const bool is_error = d.severity == Severity::error;
    blocked = blocked || is_error;
    if (is_error || !config.quiet) {
      err << (is_error ? "error" : "warning") << ": " << (d.key.empty() ? "" : d.key + ": ") << d.message << '\n';
    }
  }
  if (blocked) return kExitConfig;

  RunProducts products;
  try {
    products = execute(config);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }

  const json manifest = build_manifest(config, products);
  // Stage every file first so a failed write leaves no outputs behind.
  namespace fs = std::filesystem;
  auto files = products.files;
  files["manifest.json"] = manifest.dump(2) + "\n";
  fs::path staging;
  try {
    fs::create_directories(config.output_path);
    staging = config.output_path / (".tmsim-staging-" + std::to_string(::getpid()));
    fs::create_directories(staging);
    for (const auto& [name, content] : files) io::write_atomic(staging / name, content);
    for (const auto& [name, content] : files) fs::rename(staging / name, config.output_path / name);
    fs::remove(staging);
  } catch (const std::exception& e) {
    std::error_code ec;
    if (!staging.empty()) fs::remove_all(staging, ec);
    err << "cannot write outputs: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!config.quiet) {
    for (const auto& [name, content] : products.files) log << "wrote " << (config.output_path / name).string() << '\n';
    log << "wrote " << (config.output_path / "manifest.json").string() << '\n';
  }
  return kExitOk;
}

}  // namespace tmsim::cli
