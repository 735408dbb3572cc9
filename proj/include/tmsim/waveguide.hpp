#pragma once

#include <cstddef>
#include <vector>

#include "tmsim/states.hpp"

namespace tmsim {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Symmetric step-index slab. All lengths in meters.
struct SlabSpec {
  double core_width = 8e-6;
  double n_core = 1.50;
  double n_clad = 1.49;
  double wavelength = 1.55e-6;

  /// Dual-mode design used throughout: guides exactly TE0 and TE1.
  static SlabSpec design_default() { return {}; }

  void validate() const;
  double k() const { return 2.0 * kPi / wavelength; }
  /// V = (k w / 2) sqrt(n_core^2 - n_clad^2)
  double v_number() const;
};

/// n^2(x) = n0^2 - gradient * x^2.
struct ParabolicSpec {
  double n0 = 1.5;
  double gradient = 1e8;
  double wavelength = 1.55e-6;

  void validate() const;
  double k() const { return 2.0 * kPi / wavelength; }
};

/// Uniform sampling x_i = x_min + i dx, i in [0, count).
struct ProfileGrid {
  double x_min = 0.0;
  double dx = 0.0;
  std::size_t count = 0;

  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  double x_max() const { return x(count - 1); }

  /// Symmetric grid spanning [-span/2, span/2] with `count` nodes.
  static ProfileGrid centered(double span, std::size_t count);

  bool operator==(const ProfileGrid&) const = default;
};

struct GuidedMode {
  int index = 0;
  double beta = 0.0;           // 1/m
  double eigenvalue = 0.0;     // slab: transverse u parameter; parabolic: omega_n
  std::vector<cplx> profile;   // normalized: sum |psi|^2 dx = 1 (trapezoid)
  ProfileGrid grid;
};

/// Default profile grid: 2048 nodes spanning 6 core widths.
ProfileGrid default_profile_grid(const SlabSpec& spec);

/// Propagation constants of all guided TE modes, descending. Empty below
/// cutoff.
std::vector<double> slab_propagation_constants(const SlabSpec& spec);

/// Guided TE modes with sampled, normalized profiles. Sorted by descending
/// beta; mode n is even for even n.
std::vector<GuidedMode> solve_slab_te_modes(const SlabSpec& spec);
std::vector<GuidedMode> solve_slab_te_modes(const SlabSpec& spec, const ProfileGrid& grid);

/// Residual of the branch equation for mode `index`, normalized by V:
/// even modes u sin u - w cos u, odd modes u cos u + w sin u.
double slab_dispersion_residual(const SlabSpec& spec, int index, double beta);

/// Hermite-Gauss modes of the parabolic profile, eigenvalues
/// omega_n = (n + 1/2) sqrt(gradient) / k, beta_n = k sqrt(n0^2 - 2 omega_n).
std::vector<GuidedMode> parabolic_modes(const ParabolicSpec& spec, int count);
std::vector<GuidedMode> parabolic_modes(const ParabolicSpec& spec, int count,
                                        const ProfileGrid& grid);

/// Trapezoid-rule <a|b>. Throws std::invalid_argument on grid mismatch.
cplx mode_overlap(const GuidedMode& a, const GuidedMode& b);

/// Group delay tau = (L/c) dbeta/dk from a central difference with
/// dk = dk_rel * k. Material dispersion is ignored.
double group_delay(const SlabSpec& spec, int mode_index, double length, double dk_rel = 1e-4);

/// beta_1 - beta_0. Negative by the descending-beta ordering; the decoherence
/// rates depend on |delta_beta| and the sign only fixes the beat direction.
double delta_beta(const SlabSpec& spec);

/// Number of sign changes of Re(profile) restricted to |x| <= half_width,
/// ignoring samples below `floor` times the peak magnitude.
int count_sign_changes(const GuidedMode& mode, double half_width, double floor = 1e-6);

}  // namespace tmsim
