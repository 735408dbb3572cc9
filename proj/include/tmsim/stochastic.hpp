#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "tmsim/states.hpp"

namespace tmsim {

/// Random-waveguide statistics: coupling C_ab(z) = K_ab f(z) with
/// <f(z) f(z-u)> = sigma^2 exp(-(u/D)^2).
struct PerturbationModel {
  double sigma = 0.0;
  double corr_length = 1e-4;  // D, meters
  cplx k_ab = 0.0;            // 1/m per unit f

  void validate() const;
  double covariance(double lag) const;
};

struct SampledPath {
  std::vector<double> values;  // f(z_i), z_i = i * dz
  double dz = 0.0;
  std::uint64_t seed = 0;

  double length() const { return values.empty() ? 0.0 : dz * static_cast<double>(values.size() - 1); }
};

struct RateConstants {
  double gamma = 0.0;  // 1/m
  double kappa = 0.0;  // 1/m
  /// delta_beta >= 100 max(gamma, |kappa|); advisory only.
  bool regime_ok = true;
};

/// Portable normal deviates: mt19937_64 words mapped to 53-bit uniforms and
/// Box-Muller pairs. Same sequence on every conforming platform.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double operator()();

 private:
  double uniform_open();
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Circulant-embedding sampler for a fixed (model, dz, count). Holds the
/// embedding spectrum; sample() is const and safe to call concurrently.
class PathSampler {
 public:
  PathSampler(const PerturbationModel& model, double dz, std::size_t count);
  ~PathSampler();
  PathSampler(const PathSampler&) = delete;
  PathSampler& operator=(const PathSampler&) = delete;

  SampledPath sample(std::uint64_t seed) const;

  std::size_t count() const { return count_; }
  double dz() const { return dz_; }
  std::size_t embedding_size() const { return m_; }
  /// Number of embedding doublings needed for a nonnegative spectrum.
  int doublings() const { return doublings_; }

 private:
  struct Plan;
  PerturbationModel model_;
  double dz_;
  std::size_t count_;
  std::size_t m_ = 0;
  int doublings_ = 0;
  std::vector<double> amplitude_;  // sqrt(lambda_k / m), k = 0..m/2
  std::unique_ptr<Plan> plan_;
};

/// One realization of f(z) on count points spaced dz. Requires dz <= D/8 and
/// count * dz >= 20 D.
SampledPath sample_path(const PerturbationModel& model, double dz, std::size_t count,
                        std::uint64_t seed);

/// Dawson integral F(x) = exp(-x^2) int_0^x exp(t^2) dt.
double dawson(double x);

/// gamma = sqrt(pi) sigma^2 D exp(-(D dbeta/2)^2) |K|^2,
/// kappa = 2 sigma^2 D F(D dbeta / 2) |K|^2.
RateConstants rates(const PerturbationModel& model, double delta_beta);

}  // namespace tmsim
