#pragma once

// Independent reference computations for the test suites. None of these call
// into the library.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// RK4 shooting through the core of a symmetric slab: integrate
// psi'' = (beta^2 - k^2 n_core^2) psi from x = 0 (even: psi=1, psi'=0; odd:
// psi=0, psi'=1) to the core edge and match the decaying cladding solution,
// psi' + q psi = 0 with q = sqrt(beta^2 - k^2 n_clad^2).
inline double shooting_mismatch(double beta, double k, double n_core, double n_clad, double half_width,
                                bool even, int steps = 4000) {
  const double c = beta * beta - k * k * n_core * n_core;
  double y = even ? 1.0 : 0.0;
  double dy = even ? 0.0 : 1.0 / half_width;
  const double h = half_width / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1y = dy, k1d = c * y;
    const double k2y = dy + 0.5 * h * k1d, k2d = c * (y + 0.5 * h * k1y);
    const double k3y = dy + 0.5 * h * k2d, k3d = c * (y + 0.5 * h * k2y);
    const double k4y = dy + h * k3d, k4d = c * (y + h * k3y);
    y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
    dy += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
  }
  const double q = std::sqrt(std::max(beta * beta - k * k * n_clad * n_clad, 0.0));
  // Scale-free: divide by the amplitude at the edge.
  return (dy + q * y) / std::hypot(y, dy * half_width);
}

// All guided propagation constants, descending, by scanning the mismatch
// for sign changes on a fine beta grid and bisecting each bracket.
inline std::vector<double> shooting_slab_betas(double wavelength, double core_width, double n_core,
                                               double n_clad) {
  const double k = 2.0 * kPi / wavelength;
  const double a = 0.5 * core_width;
  const double lo = k * n_clad;
  const double hi = k * n_core;
  std::vector<double> roots;
  const int scan = 4000;
  for (bool even : {true, false}) {
    auto f = [&](double b) { return shooting_mismatch(b, k, n_core, n_clad, a, even); };
    double b_prev = hi - (hi - lo) * 1e-9;
    double f_prev = f(b_prev);
    for (int i = 1; i <= scan; ++i) {
      const double b = hi - (hi - lo) * (static_cast<double>(i) / scan);
      const double fb = f(b);
      // A pole of the normalized mismatch never changes sign this way
      // because the amplitude normalization removes it.
      if ((fb < 0) != (f_prev < 0)) {
        double x0 = b, x1 = b_prev, f0 = fb;
        for (int it = 0; it < 200; ++it) {
          const double m = 0.5 * (x0 + x1);
          if (m <= x0 || m >= x1) break;
          const double fm = f(m);
          if ((fm < 0) == (f0 < 0)) {
            x0 = m;
            f0 = fm;
          } else {
            x1 = m;
          }
        }
        roots.push_back(0.5 * (x0 + x1));
      }
      b_prev = b;
      f_prev = fb;
    }
  }
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

// Lowest eigenvalues of -d^2/dx^2 + V(x) on [-half, half] with Dirichlet
// ends, second-order finite differences, symmetric tridiagonal solve.
inline std::vector<double> fd_eigenvalues(const std::function<double(double)>& potential, double half, int n,
                                          int count) {
  const double h = 2.0 * half / (n + 1);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd sub(n - 1);
  for (int i = 0; i < n; ++i) diag(i) = 2.0 / (h * h) + potential(-half + (i + 1) * h);
  sub.setConstant(-1.0 / (h * h));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

// Halves the spacing once and removes the O(h^2) term.
inline std::vector<double> fd_eigenvalues_extrapolated(const std::function<double(double)>& potential, double half,
                                                       int n, int count) {
  const auto coarse = fd_eigenvalues(potential, half, n, count);
  const auto fine = fd_eigenvalues(potential, half, 2 * (n + 1) - 1, count);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back((4.0 * fine[i] - coarse[i]) / 3.0);
  return out;
}

// Richardson-extrapolated central difference, error O(h^4).
inline double richardson_derivative(const std::function<double(double)>& f, double x, double h) {
  auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

// Dawson integral by composite Simpson on exp(t^2 - x^2), t in [0, x].
inline double dawson_quadrature(double x, int intervals = 200000) {
  if (x == 0.0) return 0.0;
  const long double ax = std::fabs(x);
  const long double h = ax / intervals;
  auto g = [&](long double t) { return std::exp(t * t - ax * ax); };
  long double s = g(0.0L) + g(ax);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0L : 2.0L) * g(i * h);
  const double v = static_cast<double>(s * h / 3.0L);
  return x < 0 ? -v : v;
}

// 1/e^2 intensity radius of a diffracting Gaussian beam in a medium of index n.
inline double gaussian_width(double w0, double z, double n, double wavelength) {
  const double z_r = kPi * w0 * w0 * n / wavelength;
  return w0 * std::sqrt(1.0 + (z / z_r) * (z / z_r));
}

// Covered fraction of [x - dx/2, x + dx/2] by the union of intervals, by
// midpoint supersampling.
inline double supersampled_fill(double x, double dx, const std::vector<std::pair<double, double>>& intervals,
                                int samples = 256) {
  int hit = 0;
  for (int s = 0; s < samples; ++s) {
    const double xs = x - 0.5 * dx + (s + 0.5) * dx / samples;
    for (const auto& [lo, hi] : intervals) {
      if (xs >= lo && xs <= hi) {
        ++hit;
        break;
      }
    }
  }
  return static_cast<double>(hit) / samples;
}

// Sample autocovariance at integer lag, zero-mean estimator pooled over paths.
inline double pooled_autocovariance(const std::vector<std::vector<double>>& paths, std::size_t lag) {
  long double s = 0.0L;
  std::size_t n = 0;
  for (const auto& p : paths) {
    for (std::size_t i = 0; i + lag < p.size(); ++i) {
      s += static_cast<long double>(p[i]) * p[i + lag];
      ++n;
    }
  }
  return static_cast<double>(s / n);
}

}  // namespace oracle
