#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tmsim {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Raised when an iterative or time-marching computation cannot deliver a
/// trustworthy result (instability, cutoff, failed embedding).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-rail mode basis. TE0 is component 0, TE1 component 1.
enum class ModeLabel : int { TE0 = 0, TE1 = 1 };

/// Two-rail states use the ordering {|00>, |01>, |10>, |11>} with the control
/// rail as the left tensor factor.
enum class Rail { control, target };

class PureState {
 public:
  /// Length must be 2 (one rail) or 4 (two rails) and the vector normalized
  /// to 1e-12.
  explicit PureState(CVector coefficients);

  const CVector& coefficients() const { return c_; }
  cplx operator[](Eigen::Index i) const { return c_(i); }
  Eigen::Index dimension() const { return c_.size(); }
  int rails() const { return c_.size() == 2 ? 1 : 2; }

 private:
  CVector c_;
};

class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kEigenTol = -1e-10;
  static constexpr double kPurityTol = 1e-12;

  /// Validates Hermiticity, unit trace, positivity and purity bound; throws
  /// std::domain_error on violation.
  explicit DensityMatrix(CMatrix entries);

  static DensityMatrix maximally_mixed(int rails);

  const CMatrix& entries() const { return rho_; }
  cplx operator()(Eigen::Index r, Eigen::Index c) const { return rho_(r, c); }
  Eigen::Index dimension() const { return rho_.rows(); }
  int rails() const { return rho_.rows() == 2 ? 1 : 2; }

  double trace() const { return rho_.trace().real(); }
  double purity() const;

 private:
  CMatrix rho_;
};

/// Observable or map on the mode space. Dimension is 2 or 4.
class ModeOperator {
 public:
  explicit ModeOperator(CMatrix entries);
  static ModeOperator identity(Eigen::Index dim);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dimension() const { return m_.rows(); }
  bool is_hermitian(double tol = 1e-12) const;

 private:
  CMatrix m_;
};

/// Truncated Fock-ladder vector over |0>..|n_max>.
class FockVector {
 public:
  static constexpr int kDefaultMax = 16;

  explicit FockVector(CVector coefficients);
  static FockVector basis(int n, int n_max = kDefaultMax);

  const CVector& coefficients() const { return c_; }
  int n_max() const { return static_cast<int>(c_.size()) - 1; }
  cplx operator[](Eigen::Index n) const { return c_(n); }

 private:
  CVector c_;
};

enum class BellFamily { Phi, Psi };
enum class BellSign { plus, minus };
enum class Ladder { create, annihilate, number };

PureState superpose(cplx c0, cplx c1);
PureState basis_state(ModeLabel label);

DensityMatrix density_of(const PureState& s);
double purity(const DensityMatrix& rho);

PureState bell_state(BellFamily family, BellSign sign);

/// (1/2)(|TE0>+|TE1>)_c (|TE0>+|TE1>)_t
PureState product_state();

/// Incoherent mixture W0|TE0><TE0| + W1|TE1><TE1|.
DensityMatrix incoherent_mixture(double w0, double w1);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

DensityMatrix partial_trace(const DensityMatrix& rho, Rail keep);

cplx expectation(const DensityMatrix& rho, const ModeOperator& q);

/// Truncated ladder matrices on n_max + 1 levels; `create` drops the
/// component that would leave the truncation.
CMatrix ladder_matrix(Ladder kind, int n_max);

/// Applies a ladder operator. `create` throws std::out_of_range when |n_max>
/// carries weight.
FockVector ladder_apply(Ladder kind, const FockVector& v);

}  // namespace tmsim
