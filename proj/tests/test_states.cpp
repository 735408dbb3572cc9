#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tmsim/states.hpp"

using namespace tmsim;
using testutil::expect_matrix_near;
using testutil::random_density;

namespace {
const double kS = 1.0 / std::sqrt(2.0);
}

TEST(Superpose, BasisState) {
  const auto s = superpose(1.0, 0.0);
  EXPECT_EQ(s.dimension(), 2);
  EXPECT_NEAR(std::abs(s[0] - cplx(1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1]), 0.0, 1e-15);
}

TEST(Superpose, EqualWeights) {
  const auto s = superpose(1.0, 1.0);
  EXPECT_NEAR(std::abs(s[0] - cplx(kS)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - cplx(kS)), 0.0, 1e-15);
}

TEST(Superpose, ThreeFourFive) {
  const auto s = superpose(3.0, cplx(0.0, 4.0));
  EXPECT_NEAR(std::abs(s[0] - cplx(0.6)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s[1] - cplx(0.0, 0.8)), 0.0, 1e-15);
}

TEST(Superpose, NullStateRejected) {
  try {
    superpose(0.0, 0.0);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_STREQ(e.what(), "null state");
  }
}

TEST(PureStateType, RejectsUnnormalizedAndBadDimension) {
  CVector v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(PureState{v}, std::domain_error);
  CVector w(3);
  w << 1.0, 0.0, 0.0;
  EXPECT_THROW(PureState{w}, std::invalid_argument);
}

TEST(DensityOf, BasisState) {
  CMatrix expect = CMatrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  expect_matrix_near(density_of(basis_state(ModeLabel::TE0)).entries(), expect, 1e-15);
}

TEST(DensityOf, EqualSuperpositionAllHalf) {
  expect_matrix_near(density_of(superpose(1.0, 1.0)).entries(), CMatrix::Constant(2, 2, 0.5), 1e-15);
}

TEST(DensityOf, PhasedSuperpositionOffDiagonal) {
  // rho01 = c0 conj(c1) = e^{-i pi/4} e^{-i pi/4} / 2 = -i/2.
  const double th = M_PI / 4;
  const auto s = superpose(std::polar(kS, -th), std::polar(kS, th));
  const auto rho = density_of(s);
  EXPECT_NEAR(std::abs(rho(0, 1) - cplx(0.0, -0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rho(1, 0) - cplx(0.0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(rho.purity(), 1.0, 1e-12);
}

TEST(DensityMatrixType, ValidatesInvariants) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;  // not Hermitian
  EXPECT_THROW(DensityMatrix{m}, std::domain_error);
  m(0, 1) = 0.0;
  m(1, 1) = 0.6;  // trace 1.1
  EXPECT_THROW(DensityMatrix{m}, std::domain_error);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;  // negative eigenvalue
  EXPECT_THROW(DensityMatrix{m}, std::domain_error);
  EXPECT_THROW(DensityMatrix{CMatrix::Identity(3, 3) / 3.0}, std::invalid_argument);
}

TEST(BellState, PhiPlus) {
  const auto s = bell_state(BellFamily::Phi, BellSign::plus);
  ASSERT_EQ(s.dimension(), 4);
  const cplx expect[4] = {kS, 0.0, 0.0, kS};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(s[i] - expect[i]), 0.0, 1e-15) << i;
}

TEST(BellState, PsiMinus) {
  const auto s = bell_state(BellFamily::Psi, BellSign::minus);
  const cplx expect[4] = {0.0, kS, -kS, 0.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(s[i] - expect[i]), 0.0, 1e-15) << i;
}

TEST(BellState, AllFourOrthonormal) {
  std::vector<PureState> all;
  for (auto f : {BellFamily::Phi, BellFamily::Psi})
    for (auto g : {BellSign::plus, BellSign::minus}) all.push_back(bell_state(f, g));
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j)
      EXPECT_NEAR(std::abs(all[i].coefficients().dot(all[j].coefficients())), i == j ? 1.0 : 0.0, 1e-15);
}

TEST(BellState, MarginalsMaximallyMixed) {
  const auto rho = density_of(bell_state(BellFamily::Phi, BellSign::plus));
  for (auto rail : {Rail::control, Rail::target})
    expect_matrix_near(partial_trace(rho, rail).entries(), CMatrix::Identity(2, 2) * 0.5, 1e-15);
}

TEST(ProductState, Coefficients) {
  const auto s = product_state();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(s[i] - cplx(0.5)), 0.0, 1e-15);
  EXPECT_NEAR(purity(density_of(s)), 1.0, 1e-12);
}

TEST(ProductState, MarginalIsRankOneProjector) {
  const auto m = partial_trace(density_of(product_state()), Rail::control);
  expect_matrix_near(m.entries(), CMatrix::Constant(2, 2, 0.5), 1e-15);
  EXPECT_NEAR(m.purity(), 1.0, 1e-12);
}

TEST(Tensor, Examples) {
  const auto e0 = density_of(basis_state(ModeLabel::TE0));
  CMatrix expect = CMatrix::Zero(4, 4);
  expect(0, 0) = 1.0;
  expect_matrix_near(tensor(e0, e0).entries(), expect, 1e-15);
  const auto mm = DensityMatrix::maximally_mixed(1);
  expect_matrix_near(tensor(mm, mm).entries(), CMatrix::Identity(4, 4) * 0.25, 1e-15);
  EXPECT_THROW(tensor(tensor(mm, mm), mm), std::invalid_argument);
}

TEST(PartialTrace, TensorRoundTripRandom) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_density(2, rng);
    const auto b = random_density(2, rng);
    const auto ab = tensor(a, b);
    expect_matrix_near(partial_trace(ab, Rail::control).entries(), a.entries(), 1e-14);
    expect_matrix_near(partial_trace(ab, Rail::target).entries(), b.entries(), 1e-14);
  }
}

TEST(PartialTrace, PreservesTraceOfEntangledRandom) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rho = random_density(4, rng);
    EXPECT_NEAR(partial_trace(rho, Rail::control).trace(), 1.0, 1e-12);
    EXPECT_NEAR(partial_trace(rho, Rail::target).trace(), 1.0, 1e-12);
  }
}

TEST(Expectation, Examples) {
  std::mt19937_64 rng(3);
  const auto rho = random_density(2, rng);
  EXPECT_NEAR(std::abs(expectation(rho, ModeOperator::identity(2)) - cplx(1.0)), 0.0, 1e-12);
  CMatrix tau = CMatrix::Zero(2, 2);
  tau(0, 0) = 3.5e-9;
  tau(1, 1) = 3.6e-9;
  EXPECT_NEAR(expectation(density_of(basis_state(ModeLabel::TE0)), ModeOperator(tau)).real(), 3.5e-9, 1e-24);
  EXPECT_THROW(expectation(rho, ModeOperator::identity(4)), std::invalid_argument);
}

TEST(Expectation, RealForHermitianObservables) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto rho = random_density(4, rng);
    const CMatrix h = testutil::random_hermitian(4, rng);
    EXPECT_NEAR(expectation(rho, ModeOperator(h)).imag(), 0.0, 1e-12);
  }
}

TEST(Purity, PureAndMixed) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = superpose(cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
    EXPECT_NEAR(purity(density_of(s)), 1.0, 1e-12);
  }
  EXPECT_NEAR(purity(incoherent_mixture(0.5, 0.5)), 0.5, 1e-15);
  EXPECT_NEAR(purity(incoherent_mixture(0.25, 0.75)), 0.625, 1e-15);
}

TEST(Ladder, Examples) {
  const auto zero = ladder_apply(Ladder::annihilate, FockVector::basis(0));
  EXPECT_NEAR(zero.coefficients().norm(), 0.0, 1e-15);

  const auto c = ladder_apply(Ladder::create, FockVector::basis(2));
  EXPECT_NEAR(std::abs(c[3] - cplx(std::sqrt(3.0))), 0.0, 1e-15);
  EXPECT_NEAR((c.coefficients().norm()), std::sqrt(3.0), 1e-15);

  CVector v = CVector::Zero(FockVector::kDefaultMax + 1);
  v(1) = kS;
  v(3) = kS;
  const auto n = ladder_apply(Ladder::number, FockVector(v));
  EXPECT_NEAR(std::abs(n[1] - cplx(kS)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(n[3] - cplx(3.0 * kS)), 0.0, 1e-15);
}

TEST(Ladder, CreateOverflowAtTruncation) {
  EXPECT_THROW(ladder_apply(Ladder::create, FockVector::basis(4, 4)), std::out_of_range);
  EXPECT_NO_THROW(ladder_apply(Ladder::create, FockVector::basis(3, 4)));
}

TEST(Ladder, CommutatorBelowTruncation) {
  for (int n_max : {1, 4, 16}) {
    const CMatrix a = ladder_matrix(Ladder::annihilate, n_max);
    const CMatrix ad = ladder_matrix(Ladder::create, n_max);
    const CMatrix comm = a * ad - ad * a;
    for (int i = 0; i < n_max; ++i)
      for (int j = 0; j < n_max; ++j)
        EXPECT_NEAR(std::abs(comm(i, j) - cplx(i == j ? 1.0 : 0.0)), 0.0, 1e-12) << n_max << " " << i << j;
  }
}

TEST(Ladder, NumberIsCreateTimesAnnihilate) {
  const int n_max = 8;
  expect_matrix_near(ladder_matrix(Ladder::number, n_max),
                     ladder_matrix(Ladder::create, n_max) * ladder_matrix(Ladder::annihilate, n_max), 1e-12);
}
