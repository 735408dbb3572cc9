#include "tmsim/states.hpp"

#include <cmath>
#include <cstdio>

namespace tmsim {

namespace {

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

}  // namespace

PureState::PureState(CVector coefficients) : c_(std::move(coefficients)) {
  if (c_.size() != 2 && c_.size() != 4) {
    throw std::invalid_argument("PureState: dimension must be 2 or 4");
  }
  const double norm2 = c_.squaredNorm();
  if (std::abs(norm2 - 1.0) > 1e-12) {
    throw std::domain_error("PureState: not normalized (|c|^2 = " + fmt_double(norm2) + ")");
  }
}

DensityMatrix::DensityMatrix(CMatrix entries) : rho_(std::move(entries)) {
  const auto n = rho_.rows();
  if (n != rho_.cols() || (n != 2 && n != 4)) {
    throw std::invalid_argument("DensityMatrix: must be 2x2 or 4x4");
  }
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw std::domain_error("DensityMatrix: not Hermitian (deviation " + fmt_double(herm) + ")");
  }
  const cplx tr = rho_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw std::domain_error("DensityMatrix: trace " + fmt_double(tr.real()) + " != 1");
  }
  const CMatrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < kEigenTol) {
    throw std::domain_error("DensityMatrix: negative eigenvalue " + fmt_double(min_eig));
  }
  if (purity() > 1.0 + kPurityTol) {
    throw std::domain_error("DensityMatrix: purity exceeds 1");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(int rails) {
  const Eigen::Index d = rails == 1 ? 2 : 4;
  return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho_.cwiseAbs2().sum();
}

ModeOperator::ModeOperator(CMatrix entries) : m_(std::move(entries)) {
  const auto n = m_.rows();
  if (n != m_.cols() || (n != 2 && n != 4)) {
    throw std::invalid_argument("ModeOperator: must be 2x2 or 4x4");
  }
}

ModeOperator ModeOperator::identity(Eigen::Index dim) {
  return ModeOperator(CMatrix::Identity(dim, dim));
}

bool ModeOperator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

FockVector::FockVector(CVector coefficients) : c_(std::move(coefficients)) {
  if (c_.size() < 2) {
    throw std::invalid_argument("FockVector: n_max must be >= 1");
  }
}

FockVector FockVector::basis(int n, int n_max) {
  if (n < 0 || n > n_max) {
    throw std::out_of_range("FockVector::basis: level outside truncation");
  }
  CVector c = CVector::Zero(n_max + 1);
  c(n) = 1.0;
  return FockVector(std::move(c));
}

PureState superpose(cplx c0, cplx c1) {
  const double norm = std::sqrt(std::norm(c0) + std::norm(c1));
  if (norm == 0.0) {
    throw std::domain_error("null state");
  }
  CVector c(2);
  c << c0 / norm, c1 / norm;
  return PureState(std::move(c));
}

PureState basis_state(ModeLabel label) {
  return label == ModeLabel::TE0 ? superpose(1.0, 0.0) : superpose(0.0, 1.0);
}

DensityMatrix density_of(const PureState& s) {
  const CVector& c = s.coefficients();
  return DensityMatrix(c * c.adjoint());
}

double purity(const DensityMatrix& rho) { return rho.purity(); }

PureState bell_state(BellFamily family, BellSign sign) {
  const double h = 1.0 / std::sqrt(2.0);
  const double s = sign == BellSign::plus ? h : -h;
  CVector c = CVector::Zero(4);
  if (family == BellFamily::Phi) {
    c(0) = h;  // |00>
    c(3) = s;  // |11>
  } else {
    c(1) = h;  // |01>
    c(2) = s;  // |10>
  }
  return PureState(std::move(c));
}

PureState product_state() {
  CVector c = CVector::Constant(4, cplx(0.5, 0.0));
  return PureState(std::move(c));
}

DensityMatrix incoherent_mixture(double w0, double w1) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = w0;
  m(1, 1) = w1;
  return DensityMatrix(std::move(m));
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dimension() != 2 || b.dimension() != 2) {
    throw std::invalid_argument("tensor: both factors must be single-rail (2x2)");
  }
  return DensityMatrix(kron(a.entries(), b.entries()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, Rail keep) {
  if (rho.dimension() != 4) {
    throw std::invalid_argument("partial_trace: expects a two-rail (4x4) state");
  }
  const CMatrix& r = rho.entries();
  CMatrix out = CMatrix::Zero(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int c = 0; c < 2; ++c) {
      for (int b = 0; b < 2; ++b) {
        if (keep == Rail::control) {
          out(a, c) += r(2 * a + b, 2 * c + b);
        } else {
          out(a, c) += r(2 * b + a, 2 * b + c);
        }
      }
    }
  }
  return DensityMatrix(std::move(out));
}

cplx expectation(const DensityMatrix& rho, const ModeOperator& q) {
  if (rho.dimension() != q.dimension()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return (rho.entries() * q.matrix()).trace();
}

CMatrix ladder_matrix(Ladder kind, int n_max) {
  const int d = n_max + 1;
  CMatrix m = CMatrix::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    switch (kind) {
      case Ladder::create:
        if (n + 1 < d) m(n + 1, n) = std::sqrt(static_cast<double>(n + 1));
        break;
      case Ladder::annihilate:
        if (n > 0) m(n - 1, n) = std::sqrt(static_cast<double>(n));
        break;
      case Ladder::number:
        m(n, n) = static_cast<double>(n);
        break;
    }
  }
  return m;
}

FockVector ladder_apply(Ladder kind, const FockVector& v) {
  const int n_max = v.n_max();
  if (kind == Ladder::create && v[n_max] != 0.0) {
    throw std::out_of_range("ladder_apply: create overflows truncation at n_max = " +
                            std::to_string(n_max));
  }
  return FockVector(ladder_matrix(kind, n_max) * v.coefficients());
}

}  // namespace tmsim
