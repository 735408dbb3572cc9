#include "tmsim/decoherence.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>

#include "tmsim/waveguide.hpp"

namespace tmsim {

namespace {

using Mat2 = std::array<cplx, 4>;  // row-major 2x2

// SU(2) element [[a, b], [-conj(b), conj(a)]]; the step Hamiltonian is
// traceless, so products stay in this form and can be renormalized.
struct Su2 {
  cplx a = 1.0;
  cplx b = 0.0;
};

// left * right, renormalized to |a|^2 + |b|^2 = 1.
Su2 mul(const Su2& l, const Su2& r) {
  Su2 out{l.a * r.a - l.b * std::conj(r.b), l.a * r.b + l.b * std::conj(r.a)};
  const double norm = std::sqrt(std::norm(out.a) + std::norm(out.b));
  out.a /= norm;
  out.b /= norm;
  return out;
}

// exp(-i H h) for H = [[-d/2, c], [conj(c), d/2]].
Su2 step_propagator(double half_delta, cplx c, double h) {
  const double omega = std::sqrt(half_delta * half_delta + std::norm(c));
  if (omega == 0.0) return {};
  const double s = std::sin(omega * h) / omega;
  return {cplx(std::cos(omega * h), half_delta * s), cplx(0.0, -s) * c};
}

CMatrix conjugate(const Su2& u, const CMatrix& rho) {
  CMatrix um(2, 2);
  um << u.a, u.b, -std::conj(u.b), std::conj(u.a);
  return um * rho * um.adjoint();
}

// Neumaier-compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      c += (sum - t) + x;
    } else {
      c += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + c; }
};

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Single-rail map on the matrix unit |a><c|.
CMatrix channel_on_unit(int a, int c, const EvolutionParams& p) {
  CMatrix out = CMatrix::Zero(2, 2);
  const double relax = std::exp(-2.0 * p.rates.gamma * p.length);
  if (a == c) {
    out(a, a) = 0.5 * (1.0 + relax);
    out(1 - a, 1 - a) = 0.5 * (1.0 - relax);
  } else {
    const cplx g = p.coherence_factor();
    out(a, c) = a == 0 ? g : std::conj(g);
  }
  return out;
}

}  // namespace

void EvolutionParams::validate() const {
  if (!(length >= 0.0)) throw std::invalid_argument("EvolutionParams: length must be >= 0");
  if (!(rates.gamma >= 0.0)) throw std::invalid_argument("EvolutionParams: gamma must be >= 0");
}

double EvolutionParams::accumulated_phase(int multiple) const {
  const long double two_pi = 6.283185307179586476925286766559L;
  const long double raw = static_cast<long double>(multiple) *
                          (static_cast<long double>(delta_beta) + static_cast<long double>(rates.kappa)) *
                          static_cast<long double>(length);
  return static_cast<double>(std::remainder(raw, two_pi));
}

cplx EvolutionParams::coherence_factor() const {
  return std::polar(std::exp(-rates.gamma * length), accumulated_phase());
}

DensityMatrix analytic_single_rail(const DensityMatrix& rho0, const EvolutionParams& p) {
  p.validate();
  if (rho0.dimension() != 2) throw std::invalid_argument("analytic_single_rail: expects 2x2");
  const CMatrix& r = rho0.entries();
  const double relax = std::exp(-2.0 * p.rates.gamma * p.length);
  const double p0 = r(0, 0).real();
  const double p1 = r(1, 1).real();
  CMatrix out(2, 2);
  out(0, 0) = 0.5 * (1.0 + relax) * p0 + 0.5 * (1.0 - relax) * p1;
  out(1, 1) = 0.5 * (1.0 + relax) * p1 + 0.5 * (1.0 - relax) * p0;
  out(0, 1) = r(0, 1) * p.coherence_factor();
  out(1, 0) = std::conj(out(0, 1));
  return DensityMatrix(std::move(out));
}

double max_integrator_step(double delta_beta) {
  if (delta_beta == 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 * kPi / std::abs(delta_beta) / 16.0;
}

std::vector<DensityMatrix> integrate_realization_at(const DensityMatrix& rho0,
                                                    const SampledPath& path, double delta_beta,
                                                    cplx k_ab, std::span<const double> lengths) {
  if (rho0.dimension() != 2) throw std::invalid_argument("integrate_realization: expects 2x2");
  if (path.values.size() < 2) throw std::invalid_argument("integrate_realization: empty path");
  const double dz = path.dz;
  const double dz_max = max_integrator_step(delta_beta);
  if (dz > dz_max * (1.0 + 1e-12)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "integrate_realization: dz = %.6e m too coarse, need dz <= %.6e m",
                  dz, dz_max);
    throw std::invalid_argument(buf);
  }
  const double total = path.length();
  const auto& f = path.values;
  const double half_delta = 0.5 * delta_beta;

  std::vector<DensityMatrix> out;
  out.reserve(lengths.size());
  Su2 u;
  std::size_t done = 0;  // full steps applied to u
  double previous = 0.0;
  for (const double length : lengths) {
    if (length < previous || length < 0.0 || length > total * (1.0 + 1e-12)) {
      throw std::invalid_argument("integrate_realization: lengths must ascend within the path");
    }
    previous = length;
    auto full = static_cast<std::size_t>(std::floor(length / dz * (1.0 + 1e-12)));
    full = std::min(full, f.size() - 1);
    for (; done < full; ++done) {
      const cplx c = k_ab * (0.5 * (f[done] + f[done + 1]));
      u = mul(step_propagator(half_delta, c, dz), u);
    }
    Su2 uc = u;
    const double rest = length - static_cast<double>(full) * dz;
    if (rest > 1e-15 * dz && full + 1 < f.size()) {
      const double t = rest / dz;
      const double f_end = (1.0 - t) * f[full] + t * f[full + 1];
      const cplx c = k_ab * (0.5 * (f[full] + f_end));
      uc = mul(step_propagator(half_delta, c, rest), uc);
    }
    out.emplace_back(hermitize(conjugate(uc, rho0.entries())));
  }
  return out;
}

DensityMatrix integrate_realization(const DensityMatrix& rho0, const SampledPath& path,
                                    double delta_beta, cplx k_ab) {
  const double l = path.length();
  return integrate_realization_at(rho0, path, delta_beta, k_ab, std::span<const double>(&l, 1))
      .front();
}

std::size_t ensemble_path_count(const PerturbationModel& model, double dz, double l_max) {
  const auto steps = static_cast<std::size_t>(std::ceil(l_max / dz * (1.0 - 1e-12)));
  const auto min_count = static_cast<std::size_t>(std::ceil(20.0 * model.corr_length / dz)) + 1;
  return std::max(steps + 1, min_count);
}

EnsembleScan ensemble_scan(const DensityMatrix& rho0, const PerturbationModel& model,
                           double delta_beta, std::span<const double> lengths,
                           std::size_t n_realizations, std::uint64_t base_seed,
                           const EnsembleOptions& opts) {
  model.validate();
  if (n_realizations < 1) throw std::invalid_argument("ensemble: n_realizations must be >= 1");
  if (lengths.empty()) throw std::invalid_argument("ensemble: no lengths requested");
  const double d = model.corr_length;
  double dz = opts.dz;
  if (dz <= 0.0) dz = std::min(d / 16.0, max_integrator_step(delta_beta) / 2.0);
  const double l_max = *std::max_element(lengths.begin(), lengths.end());
  const PathSampler sampler(model, dz, ensemble_path_count(model, dz, l_max));
  const std::size_t nl = lengths.size();
  // results[i * nl + j]: realization i at length j
  std::vector<Mat2> results(n_realizations * nl);

  auto run = [&](std::size_t i) {
    const SampledPath path = sampler.sample(base_seed + i);
    const auto states = integrate_realization_at(rho0, path, delta_beta, model.k_ab, lengths);
    for (std::size_t j = 0; j < nl; ++j) {
      const CMatrix& e = states[j].entries();
      results[i * nl + j] = {e(0, 0), e(0, 1), e(1, 0), e(1, 1)};
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads,
                                                           static_cast<unsigned>(n_realizations)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_realizations; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n_realizations; i = next++) {
          try {
            run(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  EnsembleScan scan;
  scan.lengths.assign(lengths.begin(), lengths.end());
  scan.realizations = n_realizations;
  scan.dz = dz;
  const double n = static_cast<double>(n_realizations);
  for (std::size_t j = 0; j < nl; ++j) {
    std::array<CompensatedSum, 8> sums;
    for (std::size_t i = 0; i < n_realizations; ++i) {
      const Mat2& r = results[i * nl + j];
      for (int e = 0; e < 4; ++e) {
        sums[2 * e].add(r[e].real());
        sums[2 * e + 1].add(r[e].imag());
      }
    }
    Mat2 mean;
    for (int e = 0; e < 4; ++e) mean[e] = cplx(sums[2 * e].value() / n, sums[2 * e + 1].value() / n);

    Eigen::MatrixXd se = Eigen::MatrixXd::Zero(2, 2);
    if (n_realizations > 1) {
      std::array<CompensatedSum, 4> var;
      for (std::size_t i = 0; i < n_realizations; ++i) {
        const Mat2& r = results[i * nl + j];
        for (int e = 0; e < 4; ++e) var[e].add(std::norm(r[e] - mean[e]));
      }
      for (int e = 0; e < 4; ++e) se(e / 2, e % 2) = std::sqrt(var[e].value() / (n - 1.0) / n);
    }
    CMatrix m(2, 2);
    m << mean[0], mean[1], mean[2], mean[3];
    scan.mean.emplace_back(hermitize(m));
    scan.std_error.push_back(std::move(se));
  }
  return scan;
}

DensityMatrix ensemble_evolve(const DensityMatrix& rho0, const PerturbationModel& model,
                              double delta_beta, double length, std::size_t n_realizations,
                              std::uint64_t base_seed, const EnsembleOptions& opts) {
  return ensemble_scan(rho0, model, delta_beta, std::span<const double>(&length, 1),
                       n_realizations, base_seed, opts)
      .mean.front();
}

DensityMatrix apply_two_rail_channel(const DensityMatrix& rho4, const EvolutionParams& p) {
  p.validate();
  if (rho4.dimension() != 4) throw std::invalid_argument("apply_two_rail_channel: expects 4x4");
  const CMatrix& r = rho4.entries();
  CMatrix out = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
          const cplx w = r(2 * a + b, 2 * c + d);
          if (w == 0.0) continue;
          out += w * kron(channel_on_unit(a, c, p), channel_on_unit(b, d, p));
        }
      }
    }
  }
  return DensityMatrix(hermitize(out));
}

DensityMatrix two_rail_evolve(TwoRailInput state, const EvolutionParams& p, TwoRailMode mode) {
  p.validate();
  if (mode == TwoRailMode::channel_composition) {
    const PureState s =
        state == TwoRailInput::phi_plus ? bell_state(BellFamily::Phi, BellSign::plus) : product_state();
    return apply_two_rail_channel(density_of(s), p);
  }
  const cplx g = p.coherence_factor();
  CMatrix m = CMatrix::Zero(4, 4);
  if (state == TwoRailInput::phi_plus) {
    m(0, 0) = 0.5;
    m(3, 3) = 0.5;
    m(0, 3) = 0.5 * std::polar(std::exp(-2.0 * p.rates.gamma * p.length), p.accumulated_phase(2));
  } else {
    for (int i = 0; i < 4; ++i) m(i, i) = 0.25;
    m(0, 1) = 0.25 * g;
    m(0, 2) = 0.25 * g;
    m(0, 3) = 0.25 * std::polar(std::exp(-2.0 * p.rates.gamma * p.length), p.accumulated_phase(2));
    m(1, 2) = 0.25 * std::exp(-2.0 * p.rates.gamma * p.length);
    m(1, 3) = 0.25 * g;
    m(2, 3) = 0.25 * g;
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < i; ++j) m(i, j) = std::conj(m(j, i));
  }
  return DensityMatrix(std::move(m));
}

double fit_coherence_decay(std::span<const double> lengths, std::span<const double> magnitudes,
                           double magnitude0) {
  if (lengths.size() != magnitudes.size() || lengths.empty()) {
    throw std::invalid_argument("fit_coherence_decay: size mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (!(magnitudes[i] > 0.0)) throw NumericalError("fit_coherence_decay: nonpositive magnitude");
    num += lengths[i] * std::log(magnitudes[i] / magnitude0);
    den += lengths[i] * lengths[i];
  }
  if (den == 0.0) throw std::invalid_argument("fit_coherence_decay: all lengths zero");
  return -num / den;
}

}  // namespace tmsim
