#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tmsim/states.hpp"
#include "tmsim/stochastic.hpp"

namespace tmsim {

struct EvolutionParams {
  double delta_beta = 0.0;  // 1/m
  RateConstants rates;
  double length = 0.0;  // m

  void validate() const;
  /// multiple * (delta_beta + kappa) L reduced to [-pi, pi]. Formed in
  /// extended precision; at metre lengths the raw phase is ~1e5 rad and a
  /// double product alone would be off by ~1e-11.
  double accumulated_phase(int multiple = 1) const;
  /// exp([i(delta_beta + kappa) - gamma] L), the single-rail coherence factor.
  cplx coherence_factor() const;
};

enum class TwoRailMode { paper_closed_form, channel_composition };
enum class TwoRailInput { phi_plus, product };

/// Closed-form random-waveguide map: populations relax towards 1/2 with
/// exp(-2 gamma L), the coherence picks up exp([i(dbeta+kappa) - gamma] L).
DensityMatrix analytic_single_rail(const DensityMatrix& rho0, const EvolutionParams& p);

/// Required integrator step for a given beat constant: (2 pi / |dbeta|) / 16.
double max_integrator_step(double delta_beta);

/// Integrates i drho/dz = [H(z), rho] along one realization with
/// H = [[-dbeta/2, K f], [K* f, dbeta/2]], f held at its step average. Each
/// step applies the exact 2x2 propagator, so purity is conserved. Returns the
/// state at the end of the path.
DensityMatrix integrate_realization(const DensityMatrix& rho0, const SampledPath& path,
                                    double delta_beta, cplx k_ab);

/// Same integration, reporting rho at each requested length (ascending, each
/// within the path).
std::vector<DensityMatrix> integrate_realization_at(const DensityMatrix& rho0,
                                                    const SampledPath& path, double delta_beta,
                                                    cplx k_ab, std::span<const double> lengths);

struct EnsembleOptions {
  double dz = 0.0;       // 0 selects min(D/16, (2 pi/|dbeta|)/32)
  unsigned threads = 1;  // realizations are split across threads
};

struct EnsembleScan {
  std::vector<double> lengths;
  std::vector<DensityMatrix> mean;
  /// Entrywise standard error of the mean (real and imaginary parts
  /// combined as sqrt(var_re + var_im) / sqrt(n)).
  std::vector<Eigen::MatrixXd> std_error;
  std::size_t realizations = 0;
  double dz = 0.0;
};

/// Samples per path used by ensemble_scan for a scan reaching l_max.
std::size_t ensemble_path_count(const PerturbationModel& model, double dz, double l_max);

/// Ensemble mean over realizations i = 0..n-1, realization i sampled with
/// seed base_seed + i. Summation is compensated and in index order, so the
/// result does not depend on the thread count.
EnsembleScan ensemble_scan(const DensityMatrix& rho0, const PerturbationModel& model,
                           double delta_beta, std::span<const double> lengths,
                           std::size_t n_realizations, std::uint64_t base_seed,
                           const EnsembleOptions& opts = {});

DensityMatrix ensemble_evolve(const DensityMatrix& rho0, const PerturbationModel& model,
                              double delta_beta, double length, std::size_t n_realizations,
                              std::uint64_t base_seed, const EnsembleOptions& opts = {});

/// Two rails through statistically independent guides sharing p.
/// paper_closed_form: the closed forms for Phi+ and the product state (lower
/// triangle completed as the conjugate of the upper). channel_composition:
/// the single-rail map applied to each rail.
DensityMatrix two_rail_evolve(TwoRailInput state, const EvolutionParams& p, TwoRailMode mode);

/// Single-rail map applied to both rails of an arbitrary two-rail state.
DensityMatrix apply_two_rail_channel(const DensityMatrix& rho4, const EvolutionParams& p);

/// Least-squares rate for |rho01(L)| = |rho01(0)| exp(-rate L), fitted on
/// log magnitudes through the known origin.
double fit_coherence_decay(std::span<const double> lengths, std::span<const double> magnitudes,
                           double magnitude0);

}  // namespace tmsim
