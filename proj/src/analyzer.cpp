#include "tmsim/analyzer.hpp"

#include <cmath>
#include <stdexcept>

namespace tmsim {

namespace {

void check_normalized(cplx c0, cplx c1) {
  if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > 1e-12) {
    throw std::invalid_argument("intensity difference: |C0|^2 + |C1|^2 must be 1");
  }
}

}  // namespace

ModeOperator phase_op(double theta) {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, theta);
  m(1, 1) = std::polar(1.0, -theta);
  return ModeOperator(std::move(m));
}

std::pair<PureState, PureState> splitter_states() {
  return {superpose(1.0, 1.0), superpose(1.0, -1.0)};
}

std::pair<ModeOperator, ModeOperator> analyzer_projectors(double theta) {
  const cplx e = std::polar(0.5, 2.0 * theta);
  CMatrix plus(2, 2);
  plus << 0.5, std::conj(e), e, 0.5;
  CMatrix minus(2, 2);
  minus << 0.5, -std::conj(e), -e, 0.5;
  return {ModeOperator(std::move(plus)), ModeOperator(std::move(minus))};
}

ModeOperator difference_operator(double theta) {
  const cplx e = std::polar(1.0, 2.0 * theta);
  CMatrix d(2, 2);
  d << 0.0, std::conj(e), e, 0.0;
  return ModeOperator(std::move(d));
}

std::pair<double, double> intensities(const DensityMatrix& rho, double theta) {
  if (rho.dimension() != 2) throw std::invalid_argument("intensities: expects a single-rail state");
  const auto [plus, minus] = analyzer_projectors(theta);
  return {expectation(rho, plus).real(), expectation(rho, minus).real()};
}

double intensity_difference_evolved(cplx c0, cplx c1, const EvolutionParams& p, double theta) {
  check_normalized(c0, c1);
  p.validate();
  const cplx phase = std::polar(1.0, p.accumulated_phase() + 2.0 * theta);
  return 2.0 * std::exp(-p.rates.gamma * p.length) * (c0 * std::conj(c1) * phase).real();
}

double intensity_difference_traced(cplx c0, cplx c1, const EvolutionParams& p, double theta) {
  check_normalized(c0, c1);
  CVector v(2);
  v << c0, c1;
  const DensityMatrix rho = analytic_single_rail(density_of(PureState(std::move(v))), p);
  return expectation(rho, difference_operator(theta)).real();
}

}  // namespace tmsim
