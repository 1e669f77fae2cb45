#include "patrol/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace patrol {

GradientMatrix noise(const ShapePtr& shape, int step, const OptimizerConfig& cfg,
                     std::mt19937_64& rng) {
  GradientMatrix out{shape, std::vector<double>(shape->slot_count, 0.0)};
  double std = noise_std(cfg, step);
  if (std <= 0.0) return out;
  std::normal_distribution<double> gauss(0.0, std);
  for (double& x : out.value) x = gauss(rng);
  return out;
}

void adam_step(AdamState& st, CoefficientMatrix& theta, const GradientMatrix& grad,
               const OptimizerConfig& cfg) {
  size_t n = theta.value.size();
  if (grad.value.size() != n) throw std::runtime_error("adam_step: gradient size mismatch");
  if (st.m.empty()) {
    st.m.assign(n, 0.0);
    st.v.assign(n, 0.0);
  }
  st.t += 1;
  double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(st.t));
  double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(st.t));
  for (size_t i = 0; i < n; ++i) {
    double gi = grad.value[i];
    st.m[i] = cfg.adam_beta1 * st.m[i] + (1.0 - cfg.adam_beta1) * gi;
    st.v[i] = cfg.adam_beta2 * st.v[i] + (1.0 - cfg.adam_beta2) * gi * gi;
    double mhat = st.m[i] / c1;
    double vhat = st.v[i] / c2;
    theta.value[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps);
  }
}

namespace {

RegularStrategy harden(const CoefficientMatrix& theta, const OptimizerConfig& cfg) {
  return round_endpoints(cutoff(softmax(theta), cfg.cutoff_threshold), cfg.rounding_threshold);
}

}  // namespace

SynthesisResult synthesize(const PatrollingGraph& g, const std::vector<int>& mem,
                           const OptimizerConfig& cfg) {
  if (cfg.steps < 0) throw std::runtime_error("synthesize: steps must be >= 0");
  ShapePtr shape = build_shape(g, mem);
  std::mt19937_64 rng(cfg.seed);

  SynthesisResult res;
  res.theta = random_init(shape, rng);

  if (cfg.steps == 0) {
    res.best = harden(res.theta, cfg);
    res.best_value = evaluate(res.best, g, cfg.exec).value;
    return res;
  }

  AdamState adam;
  auto t0 = std::chrono::steady_clock::now();
  for (int step = 0; step < cfg.steps; ++step) {
    auto [bd, grad] = loss_grad(res.theta, g, cfg.eps, cfg.beta, cfg.exec);
    GradientMatrix jitter = noise(shape, step, cfg, rng);
    for (size_t i = 0; i < grad.value.size(); ++i) grad.value[i] += jitter.value[i];
    adam_step(adam, res.theta, grad, cfg);

    RegularStrategy hardened = harden(res.theta, cfg);
    EvaluationReport rep = evaluate(hardened, g, cfg.exec);
    res.trace.push_back({step, bd.total, bd.hard_max, rep.value, rep.unambiguous});
    if (res.best_step < 0 || rep.value < res.best_value) {
      res.best = std::move(hardened);
      res.best_value = rep.value;
      res.best_step = step;
    }
  }
  auto t1 = std::chrono::steady_clock::now();
  res.mean_step_seconds = std::chrono::duration<double>(t1 - t0).count() / cfg.steps;
  return res;
}

std::string format_value(double x) {
  if (is_infinite(x)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_trace_csv(const std::vector<TraceRecord>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file '" + path + "'");
  out << "step,loss,hard_max,eval_value,unambiguous\n";
  for (const auto& r : trace)
    out << r.step << ',' << format_value(r.loss) << ',' << format_value(r.hard_max) << ','
        << format_value(r.eval_value) << ',' << (r.unambiguous ? 1 : 0) << '\n';
}

void write_summary_csv(const std::vector<TrialSummary>& rows, bool with_normalized,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write summary file '" + path + "'");
  out << "trial,best_value,best_step,mean_step_seconds";
  if (with_normalized) out << ",normalized_value";
  out << "\n";
  char secs[32];
  for (const auto& r : rows) {
    std::snprintf(secs, sizeof(secs), "%.6f", r.mean_step_seconds);
    out << r.trial << ',' << format_value(r.best_value) << ',' << r.best_step << ',' << secs;
    if (with_normalized) out << ',' << format_value(r.normalized_value);
    out << "\n";
  }
}

}  // namespace patrol
