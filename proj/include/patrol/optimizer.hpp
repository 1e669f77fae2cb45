#pragma once

#include <random>
#include <string>
#include <vector>

#include "patrol/evaluator.hpp"
#include "patrol/gradient.hpp"
#include "patrol/graph.hpp"
#include "patrol/strategy.hpp"

namespace patrol {

struct OptimizerConfig {
  int steps = 100;
  double eps = 0.3;                 // ramp width of the soft penalty
  double beta = 0.2;                // entropy regularizer weight
  double learning_rate = 0.5;
  double cutoff_threshold = 0.1;    // support pruning before each evaluation
  double rounding_threshold = 0.001;  // snap-to-{0,1} before each evaluation
  double noise_std0 = 0.05;         // gradient noise schedule: std0 * decay^step
  double noise_decay = 0.95;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  unsigned long long seed = 1;
  Exec exec = Exec::parallel;
};

inline double noise_std(const OptimizerConfig& cfg, int step) {
  double s = cfg.noise_std0;
  for (int i = 0; i < step; ++i) s *= cfg.noise_decay;
  return s;
}

// i.i.d. Gaussian gradient noise for one step; empty-variance schedules draw
// nothing so the RNG stream is untouched when noise is disabled.
GradientMatrix noise(const ShapePtr& shape, int step, const OptimizerConfig& cfg,
                     std::mt19937_64& rng);

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
};

// Standard Adam with bias correction; increments st.t.
void adam_step(AdamState& st, CoefficientMatrix& theta, const GradientMatrix& grad,
               const OptimizerConfig& cfg);

struct TraceRecord {
  int step = 0;
  double loss = 0.0;       // soft loss + entropy term, before this step's update
  double hard_max = 0.0;   // exact bound of the soft strategy, before the update
  double eval_value = 0.0; // bound of the hardened strategy, after the update
  bool unambiguous = false;
};

struct SynthesisResult {
  RegularStrategy best;            // hardened strategy achieving best_value
  double best_value = kInfinite;
  int best_step = -1;              // -1 when only the initial strategy was evaluated
  std::vector<TraceRecord> trace;  // exactly cfg.steps records
  CoefficientMatrix theta;         // final coefficients
  double mean_step_seconds = 0.0;
};

// Gradient-descent synthesis: per step, loss and adjoint gradient at the
// current coefficients, plus decaying Gaussian noise, Adam update, then
// cutoff + rounding + exact evaluation of the updated strategy. Keeps the
// hardened strategy with the smallest bound (earliest step wins ties;
// finite always beats INFINITE). steps=0 evaluates the random initial
// strategy and nothing else. The full trace is a deterministic function of
// (graph, mem, cfg) including the seed.
SynthesisResult synthesize(const PatrollingGraph& g, const std::vector<int>& mem,
                           const OptimizerConfig& cfg);

// step,loss,hard_max,eval_value,unambiguous with 17 significant digits and
// "inf" for INFINITE, so reruns are byte-comparable.
void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path);

struct TrialSummary {
  int trial = 0;
  double best_value = kInfinite;
  int best_step = -1;
  double mean_step_seconds = 0.0;
  double normalized_value = kInfinite;  // best_value / baseline, if a baseline is set
};

// trial,best_value,best_step,mean_step_seconds[,normalized_value]
void write_summary_csv(const std::vector<TrialSummary>& rows, bool with_normalized,
                       const std::string& path);

// 17-significant-digit decimal, or "inf"; shared by the CSV and JSON writers.
std::string format_value(double x);

}  // namespace patrol
