#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "tmsim/analyzer.hpp"
#include "tmsim/waveguide.hpp"
#include "tmsim/correlation.hpp"
#include "tmsim/decoherence.hpp"

using namespace tmsim;
using testutil::expect_matrix_near;

namespace {

DensityMatrix phi_plus() { return density_of(bell_state(BellFamily::Phi, BellSign::plus)); }
DensityMatrix product() { return density_of(product_state()); }

EvolutionParams params(double gamma, double kappa, double length, double db) {
  EvolutionParams p;
  p.delta_beta = db;
  p.rates.gamma = gamma;
  p.rates.kappa = kappa;
  p.length = length;
  return p;
}

const ChshAngles kBellAngles{kPi / 8, -kPi / 8, 0.0, kPi / 4};

}  // namespace

TEST(RailEmbed, IdentityAndCommutingRails) {
  expect_matrix_near(rail_embed(ModeOperator::identity(2), Rail::control).matrix(), CMatrix::Identity(4, 4), 0.0);
  expect_matrix_near(rail_embed(ModeOperator::identity(2), Rail::target).matrix(), CMatrix::Identity(4, 4), 0.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const CMatrix a = rail_embed(ModeOperator(testutil::random_hermitian(2, rng)), Rail::control).matrix();
    const CMatrix b = rail_embed(ModeOperator(testutil::random_hermitian(2, rng)), Rail::target).matrix();
    expect_matrix_near(a * b, b * a, 1e-12);
  }
  EXPECT_THROW(rail_embed(ModeOperator::identity(4), Rail::control), std::invalid_argument);
}

TEST(RailEmbed, DifferenceOperatorLadderForm) {
  // I+ - I- = e^{-2i theta} |TE0><TE1| + e^{2i theta} |TE1><TE0| on each rail.
  const CVector e0 = basis_state(ModeLabel::TE0).coefficients();
  const CVector e1 = basis_state(ModeLabel::TE1).coefficients();
  for (double th : {0.0, 0.3, kPi / 8, 1.7}) {
    const CMatrix ladder = std::exp(cplx(0.0, -2.0 * th)) * e0 * e1.adjoint() + std::exp(cplx(0.0, 2.0 * th)) * e1 * e0.adjoint();
    const CMatrix id = CMatrix::Identity(2, 2);
    expect_matrix_near(rail_embed(difference_operator(th), Rail::control).matrix(), kron(ladder, id), 1e-15);
    expect_matrix_near(rail_embed(difference_operator(th), Rail::target).matrix(), kron(id, ladder), 1e-15);
  }
}

TEST(CorrelationE, PhiPlusDependsOnAngleSum) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), b = u(rng), d = u(rng);
    EXPECT_NEAR(correlation_E(phi_plus(), a, b), std::cos(2 * a + 2 * b), 1e-12);
    EXPECT_NEAR(correlation_E(phi_plus(), a + d, b - d), correlation_E(phi_plus(), a, b), 1e-12);
  }
}

TEST(CorrelationE, ProductState) {
  for (double a : {0.0, 0.2, 1.1})
    for (double b : {0.0, -0.4, 2.3}) EXPECT_NEAR(correlation_E(product(), a, b), std::cos(2 * a) * std::cos(2 * b), 1e-12);
}

TEST(CorrelationE, DecoheredPhiPlus) {
  const double db = -18710.6;
  for (double l : {0.0, 0.01, 0.5, 3.0}) {
    const auto p = params(0.046, -0.068, l, db);
    const auto rho = two_rail_evolve(TwoRailInput::phi_plus, p, TwoRailMode::paper_closed_form);
    for (double a : {0.0, 0.3, -1.0})
      for (double b : {0.0, 0.9}) {
        // Phases reach ~1e5 rad, so the reference is formed in long double.
        const long double arg = 2.0L * a + 2.0L * b + 2.0L * (static_cast<long double>(db) - 0.068) * l;
        const double expect = std::exp(-2 * 0.046 * l) * static_cast<double>(std::cos(arg));
        EXPECT_NEAR(correlation_E(rho, a, b), expect, 1e-12);
      }
  }
}

TEST(CorrelationE, BoundedRandomStates) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 300; ++i) {
    const auto rho = testutil::random_density(4, rng);
    const double e = correlation_E(rho, u(rng), u(rng));
    EXPECT_LE(std::abs(e), 1.0 + 1e-12);
  }
  EXPECT_THROW(correlation_E(DensityMatrix::maximally_mixed(1), 0.0, 0.0), std::invalid_argument);
}

TEST(Chsh, BellAnglesPhiPlus) { EXPECT_NEAR(chsh_B(phi_plus(), kBellAngles), 2.0 * std::sqrt(2.0), 1e-12); }

TEST(Chsh, BellAnglesProductState) {
  const auto& a = kBellAngles;
  auto e = [](double x, double y) { return std::cos(2 * x) * std::cos(2 * y); };
  const double direct = std::abs(e(a.theta1, a.theta2) - e(a.theta1, a.theta2p) + e(a.theta1p, a.theta2p) + e(a.theta1p, a.theta2));
  const double b = chsh_B(product(), kBellAngles);
  EXPECT_NEAR(b, direct, 1e-12);
  EXPECT_NEAR(b, std::sqrt(2.0), 1e-12);
  EXPECT_LE(b, 2.0);
}

TEST(Chsh, FullyDecoheredVanishes) {
  const auto rho = two_rail_evolve(TwoRailInput::phi_plus, params(1.0, 0.0, 100.0, 1e4), TwoRailMode::paper_closed_form);
  EXPECT_NEAR(chsh_B(rho, kBellAngles), 0.0, 1e-15);
}

TEST(ChshScan, PhiPlusApproachesTsirelson) {
  const auto r = chsh_scan(phi_plus(), 32);
  EXPECT_GE(r.max_b, 2.76);
  EXPECT_LE(r.max_b, 2.0 * std::sqrt(2.0) + 1e-9);
  EXPECT_NEAR(chsh_B(phi_plus(), r.argmax), r.max_b, 1e-12);
  EXPECT_EQ(r.grid_n, 32);
}

TEST(ChshScan, ProductNeverViolates) {
  const auto r = chsh_scan(product(), 32);
  EXPECT_LE(r.max_b, 2.0 + 1e-9);
  EXPECT_GE(r.max_b, 1.9);
}

TEST(ChshScan, MaximallyMixedIsZero) { EXPECT_NEAR(chsh_scan(DensityMatrix::maximally_mixed(2), 16).max_b, 0.0, 1e-15); }

TEST(ChshScan, RandomStatesBoundedByTsirelson) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 5; ++i) EXPECT_LE(chsh_scan(testutil::random_density(4, rng), 12).max_b, 2.0 * std::sqrt(2.0) + 1e-9);
}

TEST(ChshScan, ThreadCountAndTopOrdering) {
  ChshScanOptions one, many;
  one.top_k = many.top_k = 25;
  many.threads = 4;
  const auto rho = two_rail_evolve(TwoRailInput::phi_plus, params(0.05, 0.01, 0.3, 123.0), TwoRailMode::paper_closed_form);
  const auto a = chsh_scan(rho, 16, one);
  const auto b = chsh_scan(rho, 16, many);
  ASSERT_EQ(a.top.size(), 25u);
  ASSERT_EQ(b.top.size(), 25u);
  EXPECT_EQ(a.max_b, b.max_b);
  for (std::size_t i = 0; i < a.top.size(); ++i) {
    EXPECT_EQ(a.top[i].index, b.top[i].index);
    EXPECT_EQ(a.top[i].b, b.top[i].b);
    if (i > 0) {
      EXPECT_LE(a.top[i].b, a.top[i - 1].b);
      if (a.top[i].b == a.top[i - 1].b) EXPECT_LT(a.top[i - 1].index, a.top[i].index);
    }
  }
  EXPECT_EQ(a.top.front().b, a.max_b);
  EXPECT_THROW(chsh_scan(rho, 7), std::invalid_argument);
}

TEST(ChshScan, AnglesOnGrid) {
  const auto r = chsh_scan(phi_plus(), 8);
  const auto& c = r.top.front();
  EXPECT_NEAR(c.angles.theta1, c.index[0] * kPi / 8, 1e-15);
  EXPECT_NEAR(c.angles.theta2p, c.index[3] * kPi / 8, 1e-15);
}

TEST(DelayCovariance, EntangledQuarterSquare) {
  const DelayPair d{4.9e-9, 4.9e-9 + 3.7e-13};
  for (double l : {0.0, 0.4, 5.0}) {
    const auto rho = two_rail_evolve(TwoRailInput::phi_plus, params(0.05, 0.02, l, -1.8e4), TwoRailMode::paper_closed_form);
    const double dt = d.tau1 - d.tau0;
    EXPECT_NEAR(delay_covariance(rho, d), 0.25 * dt * dt, 1e-9 * 0.25 * dt * dt);
  }
}

TEST(DelayCovariance, ProductAndDegenerate) {
  const DelayPair d{4.9e-9, 4.9e-9 + 3.7e-13};
  const auto rho = two_rail_evolve(TwoRailInput::product, params(0.05, 0.02, 0.7, -1.8e4), TwoRailMode::paper_closed_form);
  EXPECT_NEAR(delay_covariance(rho, d), 0.0, 1e-35);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) EXPECT_NEAR(delay_covariance(testutil::random_density(4, rng), DelayPair{2e-9, 2e-9}), 0.0, 1e-30);
}

TEST(DelayCovariance, QuadraticGrowthWithLength) {
  const double t0 = 4.97e-9, t1 = 4.97e-9 + 3.1e-13;  // per metre
  for (double l : {0.1, 1.0, 7.0}) {
    const auto rho1 = two_rail_evolve(TwoRailInput::phi_plus, params(0.05, 0.02, l, -1.8e4), TwoRailMode::paper_closed_form);
    const auto rho2 = two_rail_evolve(TwoRailInput::phi_plus, params(0.05, 0.02, 2 * l, -1.8e4), TwoRailMode::paper_closed_form);
    const double c1 = delay_covariance(rho1, {t0 * l, t1 * l});
    const double c2 = delay_covariance(rho2, {t0 * 2 * l, t1 * 2 * l});
    EXPECT_NEAR(c2 / c1, 4.0, 1e-9);
  }
}
