#include "tmsim/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "tmsim/analyzer.hpp"
#include "tmsim/waveguide.hpp"

namespace tmsim {

namespace {

void require_two_rail(const DensityMatrix& rho, const char* what) {
  if (rho.dimension() != 4) throw std::invalid_argument(std::string(what) + ": expects a two-rail state");
}

// Candidate a ranks before b.
bool ranks_before(const ChshCandidate& a, const ChshCandidate& b) {
  if (a.b != b.b) return a.b > b.b;
  return a.index < b.index;
}

void offer(std::vector<ChshCandidate>& top, std::size_t k, const ChshCandidate& c) {
  if (top.size() == k && !ranks_before(c, top.back())) return;
  const auto pos = std::upper_bound(top.begin(), top.end(), c, ranks_before);
  top.insert(pos, c);
  if (top.size() > k) top.pop_back();
}

}  // namespace

ModeOperator rail_embed(const ModeOperator& op, Rail rail) {
  if (op.dimension() != 2) throw std::invalid_argument("rail_embed: expects a single-rail operator");
  const CMatrix id = CMatrix::Identity(2, 2);
  return ModeOperator(rail == Rail::control ? kron(op.matrix(), id) : kron(id, op.matrix()));
}

double correlation_E(const DensityMatrix& rho4, double theta1, double theta2) {
  require_two_rail(rho4, "correlation_E");
  const auto [p1, m1] = analyzer_projectors(theta1);
  const auto [p2, m2] = analyzer_projectors(theta2);
  const CMatrix num = kron(p1.matrix() - m1.matrix(), p2.matrix() - m2.matrix());
  const CMatrix den = kron(p1.matrix() + m1.matrix(), p2.matrix() + m2.matrix());
  const double d = expectation(rho4, ModeOperator(den)).real();
  if (std::abs(d - 1.0) > 1e-10) throw NumericalError("correlation_E: normalization drifted from 1");
  return expectation(rho4, ModeOperator(num)).real() / d;
}

double chsh_B(const DensityMatrix& rho4, const ChshAngles& a) {
  return std::abs(correlation_E(rho4, a.theta1, a.theta2) - correlation_E(rho4, a.theta1, a.theta2p) +
                  correlation_E(rho4, a.theta1p, a.theta2p) + correlation_E(rho4, a.theta1p, a.theta2));
}

ChshScanResult chsh_scan(const DensityMatrix& rho4, int grid_n, const ChshScanOptions& opts) {
  require_two_rail(rho4, "chsh_scan");
  if (grid_n < 8) throw std::invalid_argument("chsh_scan: grid_n must be >= 8");
  const std::size_t k = std::max<std::size_t>(opts.top_k, 1);
  const auto n = static_cast<std::size_t>(grid_n);
  auto angle = [grid_n](int j) { return kPi * j / grid_n; };

  std::vector<double> e(n * n);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) e[i * n + j] = correlation_E(rho4, angle(i), angle(j));
  }

  // Block over theta1; each block keeps its own top list.
  auto scan_block = [&](int a) {
    std::vector<ChshCandidate> top;
    for (int b = 0; b < grid_n; ++b) {
      for (int c = 0; c < grid_n; ++c) {
        for (int d = 0; d < grid_n; ++d) {
          const double v = std::abs(e[a * n + c] - e[a * n + d] + e[b * n + d] + e[b * n + c]);
          if (top.size() == k && v <= top.back().b) continue;
          offer(top, k, {v, {a, b, c, d}, {}});
        }
      }
    }
    return top;
  };

  std::vector<std::vector<ChshCandidate>> blocks(n);
  const unsigned threads = std::clamp<unsigned>(opts.threads, 1, static_cast<unsigned>(grid_n));
  if (threads == 1) {
    for (int a = 0; a < grid_n; ++a) blocks[a] = scan_block(a);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int a = static_cast<int>(t); a < grid_n; a += static_cast<int>(threads)) blocks[a] = scan_block(a);
      });
    }
    for (auto& th : pool) th.join();
  }

  ChshScanResult result;
  result.grid_n = grid_n;
  for (const auto& block : blocks) {
    for (const auto& c : block) offer(result.top, k, c);
  }
  for (auto& c : result.top) {
    c.angles = {angle(c.index[0]), angle(c.index[1]), angle(c.index[2]), angle(c.index[3])};
  }
  result.max_b = result.top.front().b;
  result.argmax = result.top.front().angles;
  return result;
}

double delay_covariance(const DensityMatrix& rho4, const DelayPair& d) {
  require_two_rail(rho4, "delay_covariance");
  // The covariance is unchanged by a common shift of both eigenvalues;
  // centring them avoids cancelling two large products.
  const double centre = 0.5 * (d.tau0 + d.tau1);
  CMatrix tau = CMatrix::Zero(2, 2);
  tau(0, 0) = d.tau0 - centre;
  tau(1, 1) = d.tau1 - centre;
  const ModeOperator t(tau);
  const double joint = expectation(rho4, ModeOperator(kron(tau, tau))).real();
  const double mean_c = expectation(partial_trace(rho4, Rail::control), t).real();
  const double mean_t = expectation(partial_trace(rho4, Rail::target), t).real();
  return joint - mean_c * mean_t;
}

}  // namespace tmsim
