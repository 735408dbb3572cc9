#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tmsim/states.hpp"

namespace tmsim {

struct ChshAngles {
  double theta1 = 0.0;
  double theta1p = 0.0;
  double theta2 = 0.0;
  double theta2p = 0.0;
};

/// Group-delay eigenvalues of the two modes, seconds.
struct DelayPair {
  double tau0 = 0.0;
  double tau1 = 0.0;
};

/// op (x) I for the control rail, I (x) op for the target rail.
ModeOperator rail_embed(const ModeOperator& op, Rail rail);

/// E = <(I1+ - I1-)(I2+ - I2-)> / <(I1+ + I1-)(I2+ + I2-)>. The denominator is
/// evaluated and must be 1 within 1e-10; NumericalError otherwise.
double correlation_E(const DensityMatrix& rho4, double theta1, double theta2);

/// |E(t1,t2) - E(t1,t2') + E(t1',t2') + E(t1',t2)|
double chsh_B(const DensityMatrix& rho4, const ChshAngles& a);

struct ChshCandidate {
  double b = 0.0;
  std::array<int, 4> index{};  // grid indices of (theta1, theta1p, theta2, theta2p)
  ChshAngles angles;
};

struct ChshScanResult {
  double max_b = 0.0;
  ChshAngles argmax;
  /// Best candidates, descending in B, ties in ascending index order.
  std::vector<ChshCandidate> top;
  int grid_n = 0;
};

struct ChshScanOptions {
  unsigned threads = 1;
  std::size_t top_k = 1;
};

/// Exhaustive scan over angles j pi / grid_n, j = 0..grid_n-1, for all four
/// settings. Ties resolve to the lexicographically smallest index tuple, so
/// the result does not depend on the thread count. grid_n >= 8.
ChshScanResult chsh_scan(const DensityMatrix& rho4, int grid_n, const ChshScanOptions& opts = {});

/// <tau_c tau_t> - <tau_c><tau_t>, tau = diag(tau0, tau1) on each rail, rail
/// means from the partial traces.
double delay_covariance(const DensityMatrix& rho4, const DelayPair& d);

}  // namespace tmsim
