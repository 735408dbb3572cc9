#include "tmsim/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "tmsim/waveguide.hpp"

namespace tmsim {

namespace {

// FFTW's planner is not reentrant; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// Smallest 2^a 3^b 5^c 7^d >= n.
std::size_t fft_friendly(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 2);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1 && m % 2 == 0) return m;
  }
}

}  // namespace

void PerturbationModel::validate() const {
  if (!(sigma >= 0.0)) throw std::invalid_argument("PerturbationModel: sigma must be >= 0");
  if (!(corr_length > 0.0)) throw std::invalid_argument("PerturbationModel: corr_length must be > 0");
}

double PerturbationModel::covariance(double lag) const {
  const double r = lag / corr_length;
  return sigma * sigma * std::exp(-r * r);
}

double NormalStream::uniform_open() {
  // (0, 1): 53-bit mantissa, shifted half an ulp off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::operator()() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * kPi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

struct PathSampler::Plan {
  fftw_plan c2r = nullptr;
  ~Plan() {
    if (c2r != nullptr) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(c2r);
    }
  }
};

PathSampler::PathSampler(const PerturbationModel& model, double dz, std::size_t count)
    : model_(model), dz_(dz), count_(count), plan_(std::make_unique<Plan>()) {
  model.validate();
  if (count < 2) throw std::invalid_argument("sample_path: count must be >= 2");
  if (!(dz > 0.0)) throw std::invalid_argument("sample_path: dz must be > 0");
  const double d = model.corr_length;
  if (dz > d / 8.0 * (1.0 + 1e-12)) {
    throw std::invalid_argument("sample_path: dz must resolve the correlation length (dz <= D/8)");
  }
  if (static_cast<double>(count) * dz < 20.0 * d * (1.0 - 1e-12)) {
    throw std::invalid_argument("sample_path: window too short (count * dz >= 20 D)");
  }
  if (model.sigma == 0.0) return;

  std::size_t m = fft_friendly(2 * (count - 1));
  for (doublings_ = 0; doublings_ <= 3; ++doublings_) {
    // Symmetric embedding of the covariance row; its DFT is real.
    std::vector<double> row(m);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t lag = std::min(j, m - j);
      row[j] = model.covariance(static_cast<double>(lag) * dz);
    }
    auto in = fftw_buffer<double>(m);
    auto out = fftw_buffer<fftw_complex>(m / 2 + 1);
    std::copy(row.begin(), row.end(), in.get());
    {
      std::lock_guard lock(planner_mutex());
      fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(m), in.get(), out.get(), FFTW_ESTIMATE);
      fftw_execute(p);
      fftw_destroy_plan(p);
    }
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    for (std::size_t k = 0; k <= m / 2; ++k) {
      lambda_max = std::max(lambda_max, out[k][0]);
      lambda_min = std::min(lambda_min, out[k][0]);
    }
    if (lambda_min >= -1e-10 * lambda_max) {
      m_ = m;
      amplitude_.resize(m / 2 + 1);
      for (std::size_t k = 0; k <= m / 2; ++k) {
        amplitude_[k] = std::sqrt(std::max(out[k][0], 0.0) / static_cast<double>(m));
      }
      auto cin = fftw_buffer<fftw_complex>(m / 2 + 1);
      auto rout = fftw_buffer<double>(m);
      std::lock_guard lock(planner_mutex());
      plan_->c2r = fftw_plan_dft_c2r_1d(static_cast<int>(m), cin.get(), rout.get(), FFTW_ESTIMATE);
      return;
    }
    m = fft_friendly(2 * m);
  }
  throw NumericalError("sample_path: circulant embedding not nonnegative after 3 doublings");
}

PathSampler::~PathSampler() = default;

SampledPath PathSampler::sample(std::uint64_t seed) const {
  SampledPath path;
  path.dz = dz_;
  path.seed = seed;
  path.values.assign(count_, 0.0);
  if (model_.sigma == 0.0) return path;

  // Hermitian-symmetric spectrum: real modes at k = 0 and m/2, complex pairs
  // with variance 1/2 per quadrature elsewhere. Output covariance is exact on
  // the embedded grid.
  NormalStream normal(seed);
  const std::size_t half = m_ / 2;
  auto spec = fftw_buffer<fftw_complex>(half + 1);
  auto out = fftw_buffer<double>(m_);
  const double r2 = 1.0 / std::sqrt(2.0);
  spec[0][0] = amplitude_[0] * normal();
  spec[0][1] = 0.0;
  for (std::size_t k = 1; k < half; ++k) {
    const double a = normal();
    const double b = normal();
    spec[k][0] = amplitude_[k] * a * r2;
    spec[k][1] = amplitude_[k] * b * r2;
  }
  spec[half][0] = amplitude_[half] * normal();
  spec[half][1] = 0.0;
  fftw_execute_dft_c2r(plan_->c2r, spec.get(), out.get());
  std::copy(out.get(), out.get() + count_, path.values.begin());
  return path;
}

SampledPath sample_path(const PerturbationModel& model, double dz, std::size_t count,
                        std::uint64_t seed) {
  return PathSampler(model, dz, count).sample(seed);
}

double dawson(double x) {
  const double ax = std::abs(x);
  double f;
  if (ax < 7.0) {
    // F(x) = exp(-x^2) sum_n x^(2n+1) / (n! (2n+1)); all terms positive.
    const double x2 = ax * ax;
    double term = ax;  // x^(2n+1) / n!
    double sum = ax;
    for (int n = 1; n < 400; ++n) {
      term *= x2 / n;
      const double add = term / (2.0 * n + 1.0);
      sum += add;
      if (add < 1e-18 * sum) break;
    }
    f = std::exp(-x2) * sum;
  } else {
    // Asymptotic: F(x) ~ 1/(2x) sum_n (2n-1)!! / (2x^2)^n.
    const double y = 1.0 / (2.0 * ax * ax);
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 60; ++n) {
      const double next = term * (2.0 * n - 1.0) * y;
      if (next > term) break;
      term = next;
      sum += term;
      if (term < 1e-18 * sum) break;
    }
    f = sum / (2.0 * ax);
  }
  return std::copysign(f, x);
}

RateConstants rates(const PerturbationModel& model, double delta_beta) {
  model.validate();
  const double d = model.corr_length;
  const double s2 = model.sigma * model.sigma;
  const double k2 = std::norm(model.k_ab);
  const double x = 0.5 * d * delta_beta;
  RateConstants r;
  r.gamma = std::sqrt(kPi) * s2 * d * std::exp(-x * x) * k2;
  // Im[sqrt(pi) e^{-x^2} erf(i x)] = 2 F(x).
  r.kappa = 2.0 * s2 * d * dawson(x) * k2;
  r.regime_ok = std::abs(delta_beta) >= 100.0 * std::max(r.gamma, std::abs(r.kappa));
  return r;
}

}  // namespace tmsim
