#include "tmsim/bpm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

namespace tmsim::bpm {

namespace {

struct Interval {
  double lo;
  double hi;
  double n;
};

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

// Rasterizes non-overlapping intervals sorted by lo; touching intervals with
// the same index are merged so that a zero angle reproduces the stem exactly.
std::vector<double> raster_row(std::vector<Interval> cores, const Grid& grid, double n_clad) {
  std::sort(cores.begin(), cores.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& c : cores) {
    if (!merged.empty() && c.lo <= merged.back().hi && c.n == merged.back().n) {
      merged.back().hi = std::max(merged.back().hi, c.hi);
    } else {
      merged.push_back(c);
    }
  }
  const double clad2 = n_clad * n_clad;
  std::vector<double> row(grid.nx);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double xl = grid.x(i) - 0.5 * grid.dx;
    const double xr = grid.x(i) + 0.5 * grid.dx;
    double n2 = clad2;
    for (const auto& c : merged) {
      const double overlap = std::min(c.hi, xr) - std::max(c.lo, xl);
      if (overlap > 0.0) n2 += overlap / grid.dx * (c.n * c.n - clad2);
    }
    row[i] = std::sqrt(n2);
  }
  return row;
}

SlabSpec stem_spec(const YSplitterGeometry& g, const SlabSpec& base) {
  SlabSpec s = base;
  s.core_width = g.core_width;
  return s;
}

double te0_index(const SlabSpec& s) {
  const auto betas = slab_propagation_constants(s);
  if (betas.empty()) throw std::domain_error("bpm: stem guides no mode");
  return betas.front() / s.k();
}

// Thomas solve of a tridiagonal system with constant off-diagonals.
struct Tridiagonal {
  std::vector<cplx> c_prime;
  std::vector<cplx> inv_denom;
  cplx off;

  void factor(const std::vector<cplx>& diag, cplx off_diag) {
    const std::size_t n = diag.size();
    off = off_diag;
    c_prime.resize(n);
    inv_denom.resize(n);
    cplx denom = diag[0];
    inv_denom[0] = 1.0 / denom;
    c_prime[0] = off * inv_denom[0];
    for (std::size_t i = 1; i < n; ++i) {
      denom = diag[i] - off * c_prime[i - 1];
      inv_denom[i] = 1.0 / denom;
      c_prime[i] = off * inv_denom[i];
    }
  }

  void solve(std::vector<cplx>& d) const {
    const std::size_t n = d.size();
    d[0] *= inv_denom[0];
    for (std::size_t i = 1; i < n; ++i) d[i] = (d[i] - off * d[i - 1]) * inv_denom[i];
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= c_prime[i] * d[i + 1];
  }
};

}  // namespace

Grid Grid::centered(double width, std::size_t nx, double dz, std::size_t nz) {
  if (nx < 2 || !(width > 0.0)) throw std::invalid_argument("Grid: bad window");
  return {-0.5 * width, width / static_cast<double>(nx - 1), nx, dz, nz};
}

void Grid::validate() const {
  if (!(dx > 0.0) || !(dz > 0.0)) throw std::invalid_argument("Grid: dx and dz must be > 0");
  if (nx < 64) throw std::invalid_argument("Grid: nx must be >= 64");
  if (nz < 1) throw std::invalid_argument("Grid: nz must be >= 1");
}

RIMap::RIMap(std::size_t nx, double reference_n0) : nx_(nx), n0_(reference_n0) {}

void RIMap::push_row(std::vector<double> row) {
  if (row.size() != nx_) throw std::invalid_argument("RIMap: row length mismatch");
  for (double v : row) {
    if (!(v > 0.0)) throw std::invalid_argument("RIMap: index must be > 0");
  }
  if (!rows_.empty() && row == rows_.back()) {
    index_.push_back(rows_.size() - 1);
    return;
  }
  rows_.push_back(std::move(row));
  index_.push_back(rows_.size() - 1);
}

double RIMap::max_n() const {
  double m = 0.0;
  for (const auto& r : rows_) m = std::max(m, *std::max_element(r.begin(), r.end()));
  return m;
}

double RIMap::min_n() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows_) m = std::min(m, *std::min_element(r.begin(), r.end()));
  return m;
}

double RIMap::max_contrast() const { return std::max(std::abs(max_n() - n0_), std::abs(min_n() - n0_)); }

double power(const Field& f, const Grid& grid) {
  double s = 0.0;
  const std::size_t n = f.values.size();
  for (std::size_t i = 0; i < n; ++i) s += trapezoid_weight(i, n) * std::norm(f.values[i]);
  return s * grid.dx;
}

void YSplitterGeometry::validate() const {
  if (!(core_width > 0.0)) throw std::invalid_argument("YSplitterGeometry: core_width must be > 0");
  if (!(stem_length > 0.0)) throw std::invalid_argument("YSplitterGeometry: stem_length must be > 0");
  if (!(branch_half_angle >= 0.0) || branch_half_angle >= 2.0 * kPi / 180.0) {
    throw std::invalid_argument("YSplitterGeometry: branch_half_angle must be in [0, 2 deg)");
  }
  if (!(branch_separation_final >= 0.5 * core_width)) {
    throw std::invalid_argument("YSplitterGeometry: branch_separation_final must be >= core_width/2");
  }
  if (phase_section) {
    if (!(phase_section->length > 0.0)) throw std::invalid_argument("PhaseSection: length must be > 0");
    if (phase_section->length > stem_length) {
      throw std::invalid_argument("PhaseSection: longer than the stem");
    }
  }
}

double YSplitterGeometry::taper_length() const {
  if (branch_half_angle == 0.0) return std::numeric_limits<double>::infinity();
  return (0.5 * branch_separation_final - 0.25 * core_width) / std::tan(branch_half_angle);
}

double YSplitterGeometry::branch_offset(double z) const {
  const double s = std::clamp(z - stem_length, 0.0, taper_length());
  return 0.25 * core_width + s * std::tan(branch_half_angle);
}

double YSplitterGeometry::max_extent() const {
  if (branch_half_angle == 0.0) return 0.5 * core_width;
  return std::max(0.5 * core_width, 0.5 * branch_separation_final + 0.25 * core_width);
}

RIMap build_geometry(const YSplitterGeometry& g, const Grid& grid, const SlabSpec& base) {
  g.validate();
  grid.validate();
  const SlabSpec stem = stem_spec(g, base);
  stem.validate();
  const double inner = 0.5 * grid.width() * (1.0 - 2.0 * kAbsorberFraction);
  const double needed = g.max_extent() + g.core_width;
  if (needed > inner) {
    throw std::invalid_argument(
        fmt("build_geometry: device needs |x| <= %.6e m clear of the absorber, window gives %.6e m", needed,
            inner));
  }
  const double device = g.stem_length + (std::isfinite(g.taper_length()) ? g.taper_length() : 0.0);
  if (grid.length() < device * (1.0 - 1e-12)) {
    throw std::invalid_argument(fmt("build_geometry: grid length %.6e m shorter than device %.6e m",
                                    grid.length(), device));
  }

  const double half_w = 0.5 * g.core_width;
  const double quarter_w = 0.25 * g.core_width;
  double ps_lo = 0.0;
  double ps_hi = 0.0;
  double ps_dn = 0.0;
  if (g.phase_section) {
    ps_lo = 0.5 * (g.stem_length - g.phase_section->length);
    ps_hi = ps_lo + g.phase_section->length;
    ps_dn = g.phase_section->delta_n;
  }
  RIMap map(grid.nx, te0_index(stem));
  for (std::size_t j = 0; j <= grid.nz; ++j) {
    const double z = grid.z(j);
    std::vector<Interval> cores;
    if (z < g.stem_length) {
      const bool in_ps = ps_dn != 0.0 && z >= ps_lo && z < ps_hi;
      cores.push_back({-half_w, half_w, in_ps ? stem.n_core + ps_dn : stem.n_core});
    } else {
      const double off = g.branch_offset(z);
      cores.push_back({-off - quarter_w, -off + quarter_w, stem.n_core});
      cores.push_back({off - quarter_w, off + quarter_w, stem.n_core});
    }
    map.push_row(raster_row(std::move(cores), grid, stem.n_clad));
  }
  return map;
}

RIMap straight_guide(const Grid& grid, const SlabSpec& base) {
  grid.validate();
  base.validate();
  RIMap map(grid.nx, te0_index(base));
  const auto row = raster_row({{-0.5 * base.core_width, 0.5 * base.core_width, base.n_core}}, grid, base.n_clad);
  for (std::size_t j = 0; j <= grid.nz; ++j) map.push_row(row);
  return map;
}

RIMap uniform_medium(const Grid& grid, double n) {
  grid.validate();
  RIMap map(grid.nx, n);
  const std::vector<double> row(grid.nx, n);
  for (std::size_t j = 0; j <= grid.nz; ++j) map.push_row(row);
  return map;
}

double core_area(const RIMap& map, const Grid& grid, const SlabSpec& base) {
  const double clad2 = base.n_clad * base.n_clad;
  const double span = base.n_core * base.n_core - clad2;
  const std::size_t planes = map.planes();
  double area = 0.0;
  for (std::size_t j = 0; j < planes; ++j) {
    const auto& row = map.row(j);
    double s = 0.0;
    for (double n : row) s += (n * n - clad2) / span;
    area += trapezoid_weight(j, planes) * s;
  }
  return area * grid.dx * grid.dz;
}

PropagationResult propagate(const Field& f, const RIMap& map, const Grid& grid, const PropagateOptions& opts) {
  grid.validate();
  const std::size_t nx = grid.nx;
  if (f.values.size() != nx || map.nx() != nx) throw std::invalid_argument("propagate: grid size mismatch");
  if (map.planes() < grid.nz + 1) throw std::invalid_argument("propagate: map shorter than the grid");
  if (!(opts.wavelength > 0.0)) throw std::invalid_argument("propagate: wavelength must be > 0");
  const double k = 2.0 * kPi / opts.wavelength;
  const double n0 = map.reference_n0();
  if (opts.check_step) {
    const double contrast = map.max_contrast();
    if (contrast > 0.0) {
      const double dz_max = 0.1 * opts.wavelength / (2.0 * contrast);
      if (grid.dz > dz_max) {
        throw std::invalid_argument(fmt("propagate: dz = %.6e m exceeds the paraxial limit %.6e m", grid.dz, dz_max));
      }
    }
  }

  // Absorber: n -> n - i kappa(x), quadratic ramp over the outer layers.
  std::vector<double> kappa(nx, 0.0);
  const double layer = kAbsorberFraction * grid.width();
  if (layer > 0.0) {
    const double x_lo = grid.x_min + layer;
    const double x_hi = grid.x(nx - 1) - layer;
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = grid.x(i);
      const double d = x < x_lo ? x_lo - x : (x > x_hi ? x - x_hi : 0.0);
      kappa[i] = opts.absorber_strength * (d / layer) * (d / layer);
    }
  }

  const cplx alpha = cplx(0.0, -1.0) / (2.0 * k * n0);  // du/dz = alpha (D2 + k^2 (eps - n0^2)) u
  const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
  const cplx half = 0.5 * grid.dz;
  const cplx off_rhs = half * alpha * inv_dx2;
  std::vector<cplx> diag_op(nx);
  std::vector<cplx> lhs_diag(nx);
  Tridiagonal solver;
  std::size_t cached_a = std::numeric_limits<std::size_t>::max();
  std::size_t cached_b = cached_a;

  auto eps = [&](std::size_t i, std::size_t j) {
    const cplx n = cplx(map.n(i, j), -kappa[i]);
    return n * n;
  };

  PropagationResult out;
  out.power.reserve(grid.nz + 1);
  std::vector<cplx> u = f.values;
  std::vector<cplx> rhs(nx);
  Field current{u, f.z};
  double p_prev = power(current, grid);
  if (!(p_prev > 0.0) || !std::isfinite(p_prev)) throw std::invalid_argument("propagate: launch field has no power");
  out.power.push_back(p_prev);
  out.snapshots.push_back(current);

  auto record_raster = [&](std::size_t j) {
    if (opts.raster_every == 0 || j % opts.raster_every != 0) return;
    for (const auto& v : u) out.raster.push_back(std::norm(v));
    ++out.raster_rows;
  };
  record_raster(0);

  for (std::size_t j = 0; j < grid.nz; ++j) {
    const std::size_t a = map.row_id(j);
    const std::size_t b = map.row_id(j + 1);
    if (a != cached_a || b != cached_b) {
      for (std::size_t i = 0; i < nx; ++i) {
        const cplx e_mid = 0.5 * (eps(i, j) + eps(i, j + 1));
        diag_op[i] = alpha * (-2.0 * inv_dx2 + k * k * (e_mid - n0 * n0));
        lhs_diag[i] = 1.0 - half * diag_op[i];
      }
      solver.factor(lhs_diag, -off_rhs);
      cached_a = a;
      cached_b = b;
    }
    for (std::size_t i = 0; i < nx; ++i) {
      const cplx left = i > 0 ? u[i - 1] : 0.0;
      const cplx right = i + 1 < nx ? u[i + 1] : 0.0;
      rhs[i] = (1.0 + half * diag_op[i]) * u[i] + off_rhs * (left + right);
    }
    solver.solve(rhs);
    u.swap(rhs);

    double p = 0.0;
    for (std::size_t i = 0; i < nx; ++i) p += trapezoid_weight(i, nx) * std::norm(u[i]);
    p *= grid.dx;
    if (!std::isfinite(p)) throw NumericalError(fmt("propagate: non-finite field at z = %.6e m", grid.z(j + 1)));
    const double growth = (p - p_prev) / p_prev;
    out.max_step_growth = std::max(out.max_step_growth, growth);
    if (growth > 1e-6) {
      throw NumericalError(
          fmt("propagate: unstable, power grew by %.3e relative in one step at z = %.6e m", growth, grid.z(j + 1)));
    }
    p_prev = p;
    out.power.push_back(p);
    record_raster(j + 1);
    const bool last = j + 1 == grid.nz;
    if (last || (opts.snapshot_every > 0 && (j + 1) % opts.snapshot_every == 0)) {
      out.snapshots.push_back({u, f.z + grid.z(j + 1)});
    }
  }
  return out;
}

Field launch(std::span<const cplx> coefficients, const std::vector<GuidedMode>& modes) {
  if (coefficients.size() > modes.size()) throw std::invalid_argument("launch: more coefficients than modes");
  if (modes.empty()) throw std::invalid_argument("launch: no modes");
  Field f;
  f.values.assign(modes.front().profile.size(), 0.0);
  for (std::size_t n = 0; n < coefficients.size(); ++n) {
    if (!(modes[n].grid == modes.front().grid)) throw std::invalid_argument("launch: modes on different grids");
    for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] += coefficients[n] * modes[n].profile[i];
  }
  return f;
}

Decomposition decompose(const Field& f, const std::vector<GuidedMode>& modes, const Grid& grid) {
  const std::size_t nx = f.values.size();
  Decomposition d;
  double captured = 0.0;
  for (const auto& m : modes) {
    if (m.profile.size() != nx || std::abs(m.grid.dx - grid.dx) > 1e-12 * grid.dx ||
        std::abs(m.grid.x_min - grid.x_min) > 1e-9 * grid.dx) {
      throw std::invalid_argument("decompose: mode and field grids differ");
    }
    cplx c = 0.0;
    for (std::size_t i = 0; i < nx; ++i) c += trapezoid_weight(i, nx) * std::conj(m.profile[i]) * f.values[i];
    c *= grid.dx;
    d.coefficients.push_back(c);
    captured += std::norm(c);
  }
  d.residual_power = power(f, grid) - captured;
  return d;
}

BranchPowers branch_powers(const Field& f, const Grid& grid, double split_x) {
  const std::size_t nx = f.values.size();
  double left = 0.0;
  double right = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double w = trapezoid_weight(i, nx) * std::norm(f.values[i]);
    const double x = grid.x(i);
    if (std::abs(x - split_x) <= 1e-9 * grid.dx) {
      left += 0.5 * w;  // a sample on the split line counts half to each side
      right += 0.5 * w;
    } else {
      (x < split_x ? left : right) += w;
    }
  }
  const double total = left + right;
  if (!(total > 0.0)) throw std::invalid_argument("branch_powers: field has no power");
  return {left / total, right / total};
}

SplitterCalibration calibrate_splitter(const YSplitterGeometry& g, const Grid& grid, const SlabSpec& base,
                                       const PropagateOptions& opts) {
  YSplitterGeometry plain = g;
  plain.phase_section.reset();
  const SlabSpec stem = stem_spec(plain, base);
  const auto modes = solve_slab_te_modes(stem, grid.profile_grid());
  if (modes.size() < 2) throw std::domain_error("calibrate_splitter: stem must guide TE0 and TE1");
  const RIMap map = build_geometry(plain, grid, base);
  PropagateOptions o = opts;
  o.wavelength = stem.wavelength;
  o.snapshot_every = 0;
  o.raster_every = 0;

  auto run = [&](int mode) {
    std::vector<cplx> c(2, 0.0);
    c[mode] = 1.0;
    const Field in = launch(c, modes);
    auto result = propagate(in, map, grid, o);
    return std::pair{std::move(result.snapshots.back()), result.power.back() / result.power.front()};
  };
  auto [us, ts] = run(0);
  auto [ua, ta] = run(1);

  SplitterCalibration cal;
  cal.stem_length = plain.stem_length;
  cal.transmitted_s = ts;
  cal.transmitted_a = ta;
  cal.right_s = branch_powers(us, grid).right;
  cal.right_a = branch_powers(ua, grid).right;
  const double ns = std::sqrt(power(us, grid));
  const double na = std::sqrt(power(ua, grid));
  cplx cross = 0.0;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i);
    if (x < -1e-9 * grid.dx) continue;
    const double share = x <= 1e-9 * grid.dx ? 0.5 : 1.0;
    cross += share * trapezoid_weight(i, grid.nx) * us.values[i] * std::conj(ua.values[i]);
  }
  cal.cross = cross * grid.dx / (ns * na);
  return cal;
}

double differential_beta_shift(const SlabSpec& base, double delta_n) {
  SlabSpec shifted = base;
  shifted.n_core += delta_n;
  const auto b0 = slab_propagation_constants(base);
  const auto b1 = slab_propagation_constants(shifted);
  if (b0.size() < 2 || b1.size() < 2) throw std::domain_error("differential_beta_shift: need two guided modes");
  return (b1[1] - b1[0]) - (b0[1] - b0[0]);
}

double predicted_right_fraction(const SplitterCalibration& cal, double differential_phase) {
  const double c = std::cos(0.5 * (differential_phase + cal.bias_phase()));
  return c * c;
}

Grid splitter_grid(const YSplitterGeometry& g, double window, std::size_t nx, double dz, double output_length) {
  g.validate();
  const double taper = std::isfinite(g.taper_length()) ? g.taper_length() : 0.0;
  const double length = g.stem_length + taper + output_length;
  const auto nz = static_cast<std::size_t>(std::ceil(length / dz - 1e-9));
  return Grid::centered(window, nx, dz, nz);
}

Fig2Table fig2_experiment(std::span<const double> delta_n_list, const SlabSpec& base, const YSplitterGeometry& g,
                          const Grid& grid, const Fig2Options& opts) {
  if (delta_n_list.empty()) throw std::invalid_argument("fig2_experiment: empty index list");
  g.validate();
  const double ps_length = g.phase_section ? g.phase_section->length : 1e-3;
  YSplitterGeometry geom = g;
  geom.phase_section.reset();
  const double taper = std::isfinite(geom.taper_length()) ? geom.taper_length() : 0.0;
  const double output = grid.length() - geom.stem_length - taper;
  if (output < 0.0) throw std::invalid_argument("fig2_experiment: grid shorter than the device");
  auto grid_for = [&](const YSplitterGeometry& gg) { return splitter_grid(gg, grid.width(), grid.nx, grid.dz, output); };

  const SlabSpec stem = stem_spec(geom, base);
  Grid run_grid = grid_for(geom);
  SplitterCalibration cal = calibrate_splitter(geom, run_grid, base, opts.propagate);
  if (opts.bias_to_quadrature) {
    // Extra stem length s adds (beta1^2 - beta0^2)/(2 k n0) s of differential
    // phase in the paraxial model; pick the shortest s >= 0 reaching +-pi/2.
    const auto betas = slab_propagation_constants(stem);
    const double k = stem.k();
    const double n0 = betas[0] / k;
    const double omega = (betas[1] * betas[1] - betas[0] * betas[0]) / (2.0 * k * n0);
    double target = 0.5 * kPi - cal.bias_phase();
    // omega < 0: need omega s = target - m pi with the smallest s >= 0.
    target = std::fmod(target, kPi);
    if (target > 0.0) target -= kPi;
    geom.stem_length += target / omega;
    run_grid = grid_for(geom);
    cal = calibrate_splitter(geom, run_grid, base, opts.propagate);
  }

  std::vector<Fig2Row> rows(delta_n_list.size());
  const auto modes = solve_slab_te_modes(stem, run_grid.profile_grid());
  const cplx r2 = 1.0 / std::sqrt(2.0);
  const std::vector<cplx> coeffs{r2, r2};
  PropagateOptions o = opts.propagate;
  o.wavelength = stem.wavelength;
  o.snapshot_every = 0;
  o.raster_every = 0;

  auto run_one = [&](std::size_t idx) {
    YSplitterGeometry gi = geom;
    gi.phase_section = PhaseSection{delta_n_list[idx], ps_length};
    const RIMap map = build_geometry(gi, run_grid, base);
    const auto result = propagate(launch(coeffs, modes), map, run_grid, o);
    const auto bp = branch_powers(result.snapshots.back(), run_grid);
    Fig2Row& row = rows[idx];
    row.delta_n = delta_n_list[idx];
    row.differential_phase = differential_beta_shift(stem, row.delta_n) * ps_length;
    row.left = bp.left;
    row.right = bp.right;
    row.ratio = bp.left > 0.0 ? bp.right / bp.left : std::numeric_limits<double>::infinity();
    row.predicted_right = predicted_right_fraction(cal, row.differential_phase);
  };

  const unsigned threads = std::clamp<unsigned>(opts.threads, 1, static_cast<unsigned>(rows.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < rows.size(); ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < rows.size(); i += threads) run_one(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  Fig2Table table;
  table.rows = std::move(rows);
  table.geometry = geom;
  table.geometry.phase_section = PhaseSection{0.0, ps_length};
  table.calibration = cal;
  std::vector<double> bpm_right;
  std::vector<double> predicted;
  for (const auto& r : table.rows) {
    bpm_right.push_back(r.right);
    predicted.push_back(r.predicted_right);
  }
  const auto [lo, hi] = std::minmax_element(bpm_right.begin(), bpm_right.end());
  table.contrast = (*hi - *lo) / (*hi + *lo);
  table.correlation = table.rows.size() >= 2 ? pearson(bpm_right, predicted) : 1.0;
  return table;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson: need two equal-length series");
  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace tmsim::bpm
