#pragma once

#include <vector>

#include "patrol/evaluator.hpp"
#include "patrol/graph.hpp"
#include "patrol/strategy.hpp"

namespace patrol {

// Fixed-point iteration y <- P(t + y) from y=0 (monotone from below), with a
// contraction-based error estimate so the returned vector is within `tol`
// (absolute) of the fixed point. Independent of the LU path; exists to
// cross-check it. Throws if max_sweeps is exhausted.
HittingTimeVector value_iteration_hitting(const RegularStrategy& s,
                                          const std::vector<int>& component, int target_vertex,
                                          double tol = 1e-10, long max_sweeps = 50000000);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long long used = 0;       // samples that hit the target within the horizon
  long long truncated = 0;  // samples cut off at the horizon (excluded from mean)
  double horizon = 0.0;     // time-unit cap actually applied
};

// Simulates the damage of attacking `target_vertex` when the walk commits to
// augmented edge e: alpha * (time of e + time from e's head to any copy of
// the target). horizon <= 0 picks one automatically from a pilot run (100x
// the worst pilot walk), keeping truncation far below 0.1%.
MonteCarloEstimate monte_carlo_damage(const RegularStrategy& s, const PatrollingGraph& g,
                                      AugEdge e, int target_vertex, long long samples,
                                      double horizon, unsigned long long seed);

struct DeterministicSearchResult {
  double best_value = kInfinite;
  RegularStrategy best;
  unsigned long long searched = 0;
};

// Exact brute force over all deterministic strategies (every row commits to
// one successor). Throws when the choice space exceeds `guard` combinations.
// Ties keep the first strategy in odometer order.
DeterministicSearchResult enumerate_deterministic(const PatrollingGraph& g,
                                                  const std::vector<int>& mem,
                                                  unsigned long long guard = 1000000);

}  // namespace patrol
