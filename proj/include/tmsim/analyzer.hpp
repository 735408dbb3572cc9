#pragma once

#include <utility>

#include "tmsim/decoherence.hpp"
#include "tmsim/states.hpp"

namespace tmsim {

/// Phase-controller half-angle; the differential phase between TE0 and TE1 is
/// 2 theta. Observables are pi-periodic in theta.
struct AnalyzerSetting {
  double theta = 0.0;  // rad
};

/// diag(e^{i theta}, e^{-i theta}). The analyzer measures the splitter
/// projectors in the frame rotated by this operator (see analyzer_projectors).
ModeOperator phase_op(double theta);

/// |+> = (|TE0> + |TE1>)/sqrt2, |-> = (|TE0> - |TE1>)/sqrt2.
std::pair<PureState, PureState> splitter_states();

/// I+(theta) = P^dag(theta) |+><+| P(theta) = 1/2 [[1, e^{-2i theta}], [e^{2i theta}, 1]],
/// I-(theta) likewise with |->.
std::pair<ModeOperator, ModeOperator> analyzer_projectors(double theta);

/// I+(theta) - I-(theta) = [[0, e^{-2i theta}], [e^{2i theta}, 0]].
ModeOperator difference_operator(double theta);

/// (Tr rho I+, Tr rho I-).
std::pair<double, double> intensities(const DensityMatrix& rho, double theta);

/// Closed form e^{-gamma L} [C0 C1* e^{i(dbeta+kappa)L} e^{2i theta} + c.c.].
/// Requires |C0|^2 + |C1|^2 = 1.
double intensity_difference_evolved(cplx c0, cplx c1, const EvolutionParams& p, double theta);

/// Same quantity through the state: Tr(analytic_single_rail(rho0, p) (I+ - I-)).
double intensity_difference_traced(cplx c0, cplx c1, const EvolutionParams& p, double theta);

}  // namespace tmsim
