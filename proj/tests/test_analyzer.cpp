#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tmsim/analyzer.hpp"
#include "tmsim/waveguide.hpp"

using namespace tmsim;
using testutil::expect_matrix_near;

namespace {

const double kS = 1.0 / std::sqrt(2.0);

EvolutionParams params(double gamma, double kappa, double length, double db) {
  EvolutionParams p;
  p.delta_beta = db;
  p.rates.gamma = gamma;
  p.rates.kappa = kappa;
  p.length = length;
  return p;
}

}  // namespace

TEST(PhaseOp, IdentityAndGlobalSign) {
  expect_matrix_near(phase_op(0.0).matrix(), CMatrix::Identity(2, 2), 1e-15);
  expect_matrix_near(phase_op(kPi).matrix(), -CMatrix::Identity(2, 2), 1e-15);
}

TEST(PhaseOp, GroupPropertyAndUnitarity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng);
    expect_matrix_near(phase_op(a).matrix() * phase_op(b).matrix(), phase_op(a + b).matrix(), 1e-12);
    expect_matrix_near(phase_op(a).matrix() * phase_op(a).matrix().adjoint(), CMatrix::Identity(2, 2), 1e-14);
  }
}

TEST(SplitterStates, OrthonormalComplete) {
  const auto [plus, minus] = splitter_states();
  EXPECT_NEAR(std::abs(plus.coefficients().dot(minus.coefficients())), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(plus.coefficients().dot(basis_state(ModeLabel::TE0).coefficients()) - cplx(kS)), 0.0, 1e-15);
  const CMatrix sum = density_of(plus).entries() + density_of(minus).entries();
  expect_matrix_near(sum, CMatrix::Identity(2, 2), 1e-15);
}

TEST(AnalyzerProjectors, ZeroAngleAreSplitterProjectors) {
  const auto [plus, minus] = splitter_states();
  const auto [ip, im] = analyzer_projectors(0.0);
  expect_matrix_near(ip.matrix(), density_of(plus).entries(), 1e-15);
  expect_matrix_near(im.matrix(), density_of(minus).entries(), 1e-15);
}

TEST(AnalyzerProjectors, QuarterPiExplicit) {
  // Sign convention: the TE0-TE1 element carries e^{-2i theta}.
  const auto [ip, im] = analyzer_projectors(kPi / 4);
  CMatrix expect(2, 2);
  expect << 0.5, cplx(0.0, -0.5), cplx(0.0, 0.5), 0.5;
  expect_matrix_near(ip.matrix(), expect, 1e-15);
  expect_matrix_near(ip.matrix() * im.matrix(), CMatrix::Zero(2, 2), 1e-15);
}

TEST(AnalyzerProjectors, AlgebraForRandomAngles) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 100; ++i) {
    const double th = u(rng);
    const auto [ip, im] = analyzer_projectors(th);
    const CMatrix& p = ip.matrix();
    const CMatrix& m = im.matrix();
    expect_matrix_near(p * p, p, 1e-12);
    expect_matrix_near(m * m, m, 1e-12);
    expect_matrix_near(p + m, CMatrix::Identity(2, 2), 1e-12);
    expect_matrix_near(p * m, CMatrix::Zero(2, 2), 1e-12);
    EXPECT_TRUE(ip.is_hermitian());
    EXPECT_TRUE(im.is_hermitian());
    expect_matrix_near(difference_operator(th).matrix(), p - m, 1e-12);
  }
}

TEST(AnalyzerProjectors, RotatedFrameIdentity) {
  const auto [plus, minus] = splitter_states();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double th = u(rng);
    const CMatrix p = phase_op(th).matrix();
    const auto [ip, im] = analyzer_projectors(th);
    expect_matrix_near(ip.matrix(), p.adjoint() * density_of(plus).entries() * p, 1e-12);
    expect_matrix_near(im.matrix(), p.adjoint() * density_of(minus).entries() * p, 1e-12);
  }
}

TEST(AnalyzerProjectors, PiPeriodic) {
  for (double th : {0.1, 0.7, 2.0}) {
    const auto [a, b] = analyzer_projectors(th);
    const auto [c, d] = analyzer_projectors(th + kPi);
    expect_matrix_near(a.matrix(), c.matrix(), 1e-14);
    expect_matrix_near(b.matrix(), d.matrix(), 1e-14);
  }
}

TEST(Intensities, PhasedInputAtZeroAnalyzer) {
  for (double th : {0.0, 0.3, kPi / 4, 1.2, 2.9}) {
    const auto rho = density_of(superpose(std::polar(kS, -th), std::polar(kS, th)));
    const auto [p, m] = intensities(rho, 0.0);
    EXPECT_NEAR(p, std::cos(th) * std::cos(th), 1e-15);
    EXPECT_NEAR(m, std::sin(th) * std::sin(th), 1e-15);
  }
}

TEST(Intensities, MixturesSplitEvenly) {
  for (double th : {0.0, 0.4, 1.9}) {
    const auto [a, b] = intensities(incoherent_mixture(0.5, 0.5), th);
    EXPECT_NEAR(a, 0.5, 1e-15);
    EXPECT_NEAR(b, 0.5, 1e-15);
    const auto [c, d] = intensities(density_of(basis_state(ModeLabel::TE0)), th);
    EXPECT_NEAR(c, 0.5, 1e-15);
    EXPECT_NEAR(d, 0.5, 1e-15);
  }
}

TEST(Intensities, BoundedAndComplementaryRandom) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const auto rho = testutil::random_density(2, rng);
    const auto [p, m] = intensities(rho, u(rng));
    EXPECT_GE(p, -1e-15);
    EXPECT_GE(m, -1e-15);
    EXPECT_LE(p, 1.0 + 1e-15);
    EXPECT_NEAR(p + m, 1.0, 1e-12);
  }
  EXPECT_THROW(intensities(DensityMatrix::maximally_mixed(2), 0.0), std::invalid_argument);
}

TEST(IntensityDifference, EqualWeightsCosine) {
  const double db = -18710.6;
  for (double l : {0.0, 1e-4, 0.37, 2.0})
    for (double th : {0.0, 0.2, 1.0, -0.6}) {
      const auto p = params(0.04, -0.07, l, db);
      const long double arg = 2.0L * th + (static_cast<long double>(db) - 0.07) * l;
      const double expect = std::exp(-0.04 * l) * static_cast<double>(std::cos(arg));
      EXPECT_NEAR(intensity_difference_evolved(kS, kS, p, th), expect, 1e-12);
      EXPECT_NEAR(intensity_difference_traced(kS, kS, p, th), expect, 1e-12);
    }
}

TEST(IntensityDifference, LimitsAndCoherentPlus) {
  EXPECT_NEAR(intensity_difference_evolved(kS, kS, params(0.3, 0.0, 0.0, 1e4), 0.0), 1.0, 1e-15);
  for (double th : {0.0, 0.5, 1.3}) EXPECT_NEAR(intensity_difference_evolved(kS, kS, params(1.0, 0.1, 100.0, 1e4), th), 0.0, 1e-15);
}

TEST(IntensityDifference, ClosedFormMatchesTraceRandom) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const auto s = testutil::random_pure(2, rng);
    const auto p = params(u(rng), u(rng) - 0.5, 3.0 * u(rng), 4e4 * (u(rng) - 0.5));
    const double th = 6.0 * u(rng);
    EXPECT_NEAR(intensity_difference_evolved(s[0], s[1], p, th), intensity_difference_traced(s[0], s[1], p, th),
                1e-12);
  }
}

TEST(IntensityDifference, RequiresNormalizedAmplitudes) {
  EXPECT_THROW(intensity_difference_evolved(1.0, 1.0, params(0.1, 0.0, 1.0, 1.0), 0.0), std::invalid_argument);
}
