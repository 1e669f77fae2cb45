#pragma once

#include <utility>
#include <vector>

#include "patrol/evaluator.hpp"
#include "patrol/graph.hpp"
#include "patrol/strategy.hpp"

namespace patrol {

// Ramp penalty against a reference maximum m: 0 below m - eps*m, rising
// linearly to 1 at m. Not clamped above m, so probes past the reference
// extrapolate along the same slope (the optimizer itself never needs that
// region; derivative checks against a frozen m do).
double phi(double t, double hard_max, double eps);

struct LossBreakdown {
  double total = 0.0;     // soft + beta * entropy
  double soft = 0.0;      // sum over (target, edge) of phi^2
  double entropy = 0.0;   // mean row entropy of the strategy
  double hard_max = 0.0;  // exact worst damage of the soft strategy
  std::vector<std::vector<double>> phi_values;  // [target][edge] diagnostics
};

// Loss of a full-support strategy given its damages (single component
// covering the whole augmented space). hard_max is taken from the damages.
LossBreakdown loss(const RegularStrategy& s, const DamageMatrix& damages, double eps, double beta);

// Loss and d(loss)/d(coefficient) at theta, differentiating through softmax,
// the hitting-time solves (adjoint systems, one per target) and the entropy
// term. The reference maximum inside phi is held fixed (no gradient flows
// through it). Serial and parallel execution give bit-identical results.
std::pair<LossBreakdown, GradientMatrix> loss_grad(const CoefficientMatrix& theta,
                                                   const PatrollingGraph& g, double eps,
                                                   double beta, Exec exec = Exec::parallel);

}  // namespace patrol
