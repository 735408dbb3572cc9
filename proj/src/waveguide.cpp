#include "tmsim/waveguide.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmsim {

namespace {

// Symmetric-slab branch equations in normalized form. u is the transverse
// core parameter, w = sqrt(V^2 - u^2) the cladding decay parameter.
double branch_function(int index, double u, double v) {
  const double w = std::sqrt(std::max(v * v - u * u, 0.0));
  if (index % 2 == 0) return u * std::sin(u) - w * std::cos(u);
  return u * std::cos(u) + w * std::sin(u);
}

struct SlabRoot {
  int index;
  double u;
  double w;
  double beta;
};

std::vector<SlabRoot> solve_roots(const SlabSpec& spec) {
  spec.validate();
  const double v = spec.v_number();
  const double a = 0.5 * spec.core_width;
  const double k = spec.k();
  std::vector<SlabRoot> roots;
  for (int m = 0;; ++m) {
    const double lo0 = 0.5 * kPi * m;
    if (lo0 >= v) break;
    const double hi0 = std::min(0.5 * kPi * (m + 1), v);
    double lo = lo0;
    double hi = hi0;
    double f_lo = branch_function(m, lo, v);
    const double f_hi = branch_function(m, hi, v);
    if (f_lo == 0.0) {
      hi = lo;
    } else if (f_hi == 0.0) {
      lo = hi;
    } else if ((f_lo < 0.0) == (f_hi < 0.0)) {
      break;
    }
    // Bisect to adjacent doubles.
    while (true) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double f_mid = branch_function(m, mid, v);
      if (f_mid == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((f_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = f_mid;
      } else {
        hi = mid;
      }
    }
    const double u = 0.5 * (lo + hi);
    const double w = std::sqrt(std::max(v * v - u * u, 0.0));
    if (!(w > 0.0)) break;  // at cutoff, not guided
    const double beta = std::sqrt(k * k * spec.n_core * spec.n_core - (u / a) * (u / a));
    roots.push_back({m, u, w, beta});
  }
  return roots;
}

std::vector<cplx> sample_slab_profile(const SlabSpec& spec, const SlabRoot& r,
                                      const ProfileGrid& grid) {
  const double a = 0.5 * spec.core_width;
  std::vector<cplx> psi(grid.count);
  const bool even = r.index % 2 == 0;
  const double edge = even ? std::cos(r.u) : std::sin(r.u);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double x = grid.x(i);
    const double ax = std::abs(x);
    double val;
    if (ax <= a) {
      val = even ? std::cos(r.u * x / a) : std::sin(r.u * x / a);
    } else {
      const double tail = edge * std::exp(-r.w * (ax - a) / a);
      val = (even || x > 0.0) ? tail : -tail;
    }
    psi[i] = val;
  }
  return psi;
}

double trapezoid_norm2(const std::vector<cplx>& psi, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double w = (i == 0 || i + 1 == psi.size()) ? 0.5 : 1.0;
    s += w * std::norm(psi[i]);
  }
  return s * dx;
}

void normalize(std::vector<cplx>& psi, double dx) {
  const double n = std::sqrt(trapezoid_norm2(psi, dx));
  if (!(n > 0.0)) throw NumericalError("mode profile vanishes on the grid");
  for (auto& p : psi) p /= n;
}

}  // namespace

void SlabSpec::validate() const {
  if (!(core_width > 0.0)) throw std::invalid_argument("SlabSpec: core_width must be > 0");
  if (!(wavelength > 0.0)) throw std::invalid_argument("SlabSpec: wavelength must be > 0");
  if (!(n_clad > 0.0)) throw std::invalid_argument("SlabSpec: n_clad must be > 0");
  if (!(n_core >= n_clad)) throw std::invalid_argument("SlabSpec: n_core must be >= n_clad");
}

double SlabSpec::v_number() const {
  return 0.5 * k() * core_width * std::sqrt(n_core * n_core - n_clad * n_clad);
}

void ParabolicSpec::validate() const {
  if (!(n0 > 0.0)) throw std::invalid_argument("ParabolicSpec: n0 must be > 0");
  if (!(gradient > 0.0)) throw std::invalid_argument("ParabolicSpec: gradient must be > 0");
  if (!(wavelength > 0.0)) throw std::invalid_argument("ParabolicSpec: wavelength must be > 0");
}

ProfileGrid ProfileGrid::centered(double span, std::size_t count) {
  if (count < 2 || !(span > 0.0)) throw std::invalid_argument("ProfileGrid: bad span/count");
  return {-0.5 * span, span / static_cast<double>(count - 1), count};
}

ProfileGrid default_profile_grid(const SlabSpec& spec) {
  // Wide enough that the slowest-decaying guided tail drops by e^-20 before
  // the window edge; capped for modes sitting right at cutoff.
  double w_min = 1e300;
  for (const auto& r : solve_roots(spec)) w_min = std::min(w_min, r.w);
  const double a = 0.5 * spec.core_width;
  const double half = a * (1.0 + std::min(20.0 / w_min, 100.0));
  const double dx = spec.core_width / 256.0;
  const auto count = std::max<std::size_t>(2048, static_cast<std::size_t>(std::ceil(2.0 * half / dx)) + 1);
  return ProfileGrid::centered(2.0 * half, count);
}

std::vector<double> slab_propagation_constants(const SlabSpec& spec) {
  std::vector<double> betas;
  for (const auto& r : solve_roots(spec)) betas.push_back(r.beta);
  return betas;
}

std::vector<GuidedMode> solve_slab_te_modes(const SlabSpec& spec) {
  return solve_slab_te_modes(spec, default_profile_grid(spec));
}

std::vector<GuidedMode> solve_slab_te_modes(const SlabSpec& spec, const ProfileGrid& grid) {
  std::vector<GuidedMode> modes;
  for (const auto& r : solve_roots(spec)) {
    GuidedMode m;
    m.index = r.index;
    m.beta = r.beta;
    m.eigenvalue = r.u;
    m.grid = grid;
    m.profile = sample_slab_profile(spec, r, grid);
    normalize(m.profile, grid.dx);
    modes.push_back(std::move(m));
  }
  return modes;
}

double slab_dispersion_residual(const SlabSpec& spec, int index, double beta) {
  const double a = 0.5 * spec.core_width;
  const double k = spec.k();
  const double u = a * std::sqrt(std::max(k * k * spec.n_core * spec.n_core - beta * beta, 0.0));
  const double v = spec.v_number();
  return branch_function(index, u, v) / v;
}

std::vector<GuidedMode> parabolic_modes(const ParabolicSpec& spec, int count) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("parabolic_modes: count must be >= 1");
  const double alpha = spec.k() * std::sqrt(spec.gradient);
  // Turning point of the highest mode plus a generous Gaussian tail.
  const double x_turn = std::sqrt((2.0 * count + 1.0) / alpha);
  const double half = 1.5 * x_turn + 8.0 / std::sqrt(alpha);
  return parabolic_modes(spec, count, ProfileGrid::centered(2.0 * half, 2048));
}

std::vector<GuidedMode> parabolic_modes(const ParabolicSpec& spec, int count,
                                        const ProfileGrid& grid) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("parabolic_modes: count must be >= 1");
  const double k = spec.k();
  const double root_g = std::sqrt(spec.gradient);
  const double alpha = k * root_g;
  const double sqrt_alpha = std::sqrt(alpha);

  std::vector<GuidedMode> modes(count);
  for (int n = 0; n < count; ++n) {
    const double omega = (n + 0.5) * root_g / k;
    const double arg = spec.n0 * spec.n0 - 2.0 * omega;
    if (!(arg > 0.0)) throw std::domain_error("mode not guided");
    modes[n].index = n;
    modes[n].eigenvalue = omega;
    modes[n].beta = k * std::sqrt(arg);
    modes[n].grid = grid;
    modes[n].profile.resize(grid.count);
  }
  // Normalized Hermite functions by the stable three-term recurrence.
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double xi = sqrt_alpha * grid.x(i);
    double h_prev = 0.0;
    double h = std::pow(alpha / kPi, 0.25) * std::exp(-0.5 * xi * xi);
    for (int n = 0; n < count; ++n) {
      modes[n].profile[i] = h;
      const double h_next = std::sqrt(2.0 / (n + 1.0)) * xi * h - std::sqrt(n / (n + 1.0)) * h_prev;
      h_prev = h;
      h = h_next;
    }
  }
  for (auto& m : modes) normalize(m.profile, grid.dx);
  return modes;
}

cplx mode_overlap(const GuidedMode& a, const GuidedMode& b) {
  if (!(a.grid == b.grid) || a.profile.size() != b.profile.size()) {
    throw std::invalid_argument("mode_overlap: grid mismatch");
  }
  cplx s = 0.0;
  const std::size_t n = a.profile.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    s += w * std::conj(a.profile[i]) * b.profile[i];
  }
  return s * a.grid.dx;
}

double group_delay(const SlabSpec& spec, int mode_index, double length, double dk_rel) {
  spec.validate();
  if (!(dk_rel > 0.0)) throw std::invalid_argument("group_delay: dk_rel must be > 0");
  if (mode_index < 0) throw std::invalid_argument("group_delay: negative mode index");
  const double k = spec.k();
  const double dk = dk_rel * k;
  auto beta_at = [&](double kk) {
    SlabSpec s = spec;
    s.wavelength = 2.0 * kPi / kk;
    const auto betas = slab_propagation_constants(s);
    if (static_cast<std::size_t>(mode_index) >= betas.size()) {
      throw NumericalError("group_delay: mode " + std::to_string(mode_index) +
                           " near cutoff, reduce dk_rel");
    }
    return betas[mode_index];
  };
  const double slope = (beta_at(k + dk) - beta_at(k - dk)) / (2.0 * dk);
  return length / kSpeedOfLight * slope;
}

double delta_beta(const SlabSpec& spec) {
  const auto betas = slab_propagation_constants(spec);
  if (betas.size() < 2) {
    throw std::domain_error("delta_beta: fewer than two guided modes");
  }
  return betas[1] - betas[0];
}

int count_sign_changes(const GuidedMode& mode, double half_width, double floor) {
  double peak = 0.0;
  for (const auto& p : mode.profile) peak = std::max(peak, std::abs(p));
  int changes = 0;
  int last_sign = 0;
  for (std::size_t i = 0; i < mode.profile.size(); ++i) {
    if (std::abs(mode.grid.x(i)) > half_width) continue;
    const double v = mode.profile[i].real();
    if (std::abs(v) < floor * peak) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

}  // namespace tmsim
