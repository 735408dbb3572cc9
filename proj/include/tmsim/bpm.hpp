#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tmsim/states.hpp"
#include "tmsim/waveguide.hpp"

namespace tmsim::bpm {

/// Transverse nodes x_i = x_min + i dx (i < nx), longitudinal planes z_j = j dz
/// (j <= nz).
struct Grid {
  double x_min = 0.0;
  double dx = 0.0;
  std::size_t nx = 0;
  double dz = 0.0;
  std::size_t nz = 0;

  /// Window [-width/2, width/2] sampled by nx nodes.
  static Grid centered(double width, std::size_t nx, double dz, std::size_t nz);

  void validate() const;
  double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
  double z(std::size_t j) const { return static_cast<double>(j) * dz; }
  double width() const { return dx * static_cast<double>(nx - 1); }
  double length() const { return dz * static_cast<double>(nz); }
  ProfileGrid profile_grid() const { return {x_min, dx, nx}; }
};

/// Refractive index on the grid. Consecutive identical z-planes share storage.
class RIMap {
 public:
  RIMap(std::size_t nx, double reference_n0);

  /// Appends the next z-plane.
  void push_row(std::vector<double> row);

  std::size_t nx() const { return nx_; }
  std::size_t planes() const { return index_.size(); }
  double reference_n0() const { return n0_; }
  void set_reference_n0(double n0) { n0_ = n0; }

  const std::vector<double>& row(std::size_t j) const { return rows_[index_[j]]; }
  std::size_t row_id(std::size_t j) const { return index_[j]; }
  double n(std::size_t i, std::size_t j) const { return row(j)[i]; }
  double max_n() const;
  double min_n() const;
  double max_contrast() const;  // max |n - n0|

 private:
  std::size_t nx_;
  double n0_;
  std::vector<std::vector<double>> rows_;
  std::vector<std::size_t> index_;
};

struct Field {
  std::vector<cplx> values;
  double z = 0.0;
};

/// Trapezoid integral of |u|^2 over the grid.
double power(const Field& f, const Grid& grid);

struct PhaseSection {
  double delta_n = 0.0;
  double length = 1e-3;  // m, centred in the stem
};

/// Dual-mode stem of width core_width, then two branches of width
/// core_width/2 that start adjacent and diverge at +-branch_half_angle until
/// their axes are branch_separation_final apart, then run parallel.
struct YSplitterGeometry {
  double stem_length = 2e-3;
  double branch_half_angle = 0.5 * kPi / 180.0;
  double branch_separation_final = 24e-6;  // axis to axis
  double core_width = 8e-6;
  std::optional<PhaseSection> phase_section;

  void validate() const;
  /// z-extent of the diverging part; infinite for a zero angle.
  double taper_length() const;
  /// Branch axis offset |x| at z.
  double branch_offset(double z) const;
  /// Outermost core edge over the whole device.
  double max_extent() const;
};

/// Area-weighted rasterization: each cell takes n^2 = n_clad^2 + f (n_core^2 -
/// n_clad^2) with f the covered fraction of [x_i - dx/2, x_i + dx/2]. The
/// core width comes from g; base supplies indices and wavelength. The
/// reference index is set to the stem's TE0 effective index. Throws
/// std::invalid_argument if the device does not clear the absorbing layer by
/// one core width or is longer than the grid.
RIMap build_geometry(const YSplitterGeometry& g, const Grid& grid, const SlabSpec& base);

/// z-invariant slab of base.core_width centred at x = 0.
RIMap straight_guide(const Grid& grid, const SlabSpec& base);

/// Uniform medium of index n (also the reference index).
RIMap uniform_medium(const Grid& grid, double n);

/// Total core area of the rasterized map (sum of fill fractions times dx,
/// trapezoid in z).
double core_area(const RIMap& map, const Grid& grid, const SlabSpec& base);

/// Absorbing layer width on each side, as a fraction of the window.
inline constexpr double kAbsorberFraction = 0.1;

struct PropagateOptions {
  double wavelength = 1.55e-6;
  double absorber_strength = 0.01;  // peak imaginary index
  std::size_t snapshot_every = 0;  // 0: initial and final planes only
  std::size_t raster_every = 0;    // 0: no intensity raster
  bool check_step = true;          // paraxial step-size and sampling checks
};

struct PropagationResult {
  std::vector<Field> snapshots;  // includes the initial and the final plane
  std::vector<double> power;     // per plane, nz + 1 entries
  /// Row-major |u|^2 of every raster_every-th plane, raster_rows x nx.
  std::vector<double> raster;
  std::size_t raster_rows = 0;
  double max_step_growth = 0.0;  // largest relative power increase per step
};

/// Crank-Nicolson solution of the paraxial envelope equation
/// 2 i k n0 du/dz = -(d^2/dx^2 + k^2 (n^2 - n0^2)) u, E = u exp(-i k n0 z),
/// with the index averaged over the two planes of each step and a quadratic
/// absorbing layer at both window edges. Throws NumericalError if power grows
/// by more than 1e-6 in any step.
PropagationResult propagate(const Field& f, const RIMap& map, const Grid& grid,
                            const PropagateOptions& opts = {});

/// Superposition sum c_n psi_n sampled on the grid. Modes must share it.
Field launch(std::span<const cplx> coefficients, const std::vector<GuidedMode>& modes);

struct Decomposition {
  std::vector<cplx> coefficients;  // C_n = <psi_n|f>
  double residual_power = 0.0;     // power(f) - sum |C_n|^2
};
Decomposition decompose(const Field& f, const std::vector<GuidedMode>& modes, const Grid& grid);

struct BranchPowers {
  double left = 0.0;   // x < split_x, a sample on split_x is shared
  double right = 0.0;  // x > split_x
};
/// Fractions of the field power on each side of split_x.
BranchPowers branch_powers(const Field& f, const Grid& grid, double split_x = 0.0);

/// Response of a splitter at zero index change, measured from separate TE0
/// and TE1 launches. Fields go as e^{-i beta z}, so an extra differential
/// propagation constant dbeta over length L multiplies TE1 by e^{-i phi},
/// phi = dbeta L. For an equal-weight launch the right-branch fraction is
/// then cos^2((phi + arg cross) / 2) for an ideal device; a launch phase psi
/// on TE1 is the same as phi = -psi.
struct SplitterCalibration {
  double stem_length = 0.0;
  double right_s = 0.0;  // right fraction of the TE0 launch
  double right_a = 0.0;  // right fraction of the TE1 launch
  cplx cross;            // int_{x>0} u_s conj(u_a), both power-normalized
  double transmitted_s = 0.0;
  double transmitted_a = 0.0;

  double bias_phase() const { return std::arg(cross); }
};

SplitterCalibration calibrate_splitter(const YSplitterGeometry& g, const Grid& grid,
                                       const SlabSpec& base, const PropagateOptions& opts = {});

/// [beta1 - beta0](n_core + delta_n) - [beta1 - beta0](n_core), mode-solver values.
double differential_beta_shift(const SlabSpec& base, double delta_n);

/// Ideal-splitter prediction for the right-branch fraction.
double predicted_right_fraction(const SplitterCalibration& cal, double differential_phase);

struct Fig2Row {
  double delta_n = 0.0;
  double differential_phase = 0.0;  // 2 theta accumulated in the phase section, rad
  double left = 0.0;
  double right = 0.0;
  double ratio = 0.0;  // right / left
  double predicted_right = 0.0;
};

struct Fig2Options {
  /// Extend the stem so that the zero-index-change point sits at quadrature
  /// (right fraction 1/2, largest slope).
  bool bias_to_quadrature = true;
  unsigned threads = 1;
  PropagateOptions propagate;
};

struct Fig2Table {
  std::vector<Fig2Row> rows;
  YSplitterGeometry geometry;  // as run, after biasing
  SplitterCalibration calibration;
  double correlation = 0.0;  // Pearson, BPM right fraction vs prediction
  double contrast = 0.0;     // (max - min) / (max + min) of the BPM right fraction
};

/// Launches (TE0 + TE1)/sqrt2 into the splitter with a phase section of each
/// listed index change and reports branch powers next to the prediction. The
/// grid supplies the transverse sampling, dz and the straight output length
/// beyond the taper; nz is extended when the stem is biased. The phase
/// section length is taken from g (1 mm if unset).
Fig2Table fig2_experiment(std::span<const double> delta_n_list, const SlabSpec& base,
                          const YSplitterGeometry& g, const Grid& grid, const Fig2Options& opts = {});

double pearson(std::span<const double> a, std::span<const double> b);

/// Grid that fits the splitter: window, absorber margin and length.
Grid splitter_grid(const YSplitterGeometry& g, double window, std::size_t nx, double dz,
                   double output_length);

}  // namespace tmsim::bpm
