#include "patrol/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace patrol {

HittingTimeVector value_iteration_hitting(const RegularStrategy& s,
                                          const std::vector<int>& component, int target_vertex,
                                          double tol, long max_sweeps) {
  const auto& sh = *s.shape;
  HittingTimeVector out;
  out.members = component;
  std::sort(out.members.begin(), out.members.end());
  int n = static_cast<int>(out.members.size());

  std::vector<int> pos(sh.aug_count, -1);
  for (int i = 0; i < n; ++i) pos[out.members[i]] = i;
  bool has_target = false;
  for (int a : out.members)
    if (sh.owner[a] == target_vertex) { has_target = true; break; }
  if (!has_target) return out;

  std::vector<double> y(n, 0.0), next(n, 0.0);
  double prev_diff = kInfinite;
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    double diff = 0.0;
    for (int i = 0; i < n; ++i) {
      int a = out.members[i];
      if (sh.owner[a] == target_vertex) {
        next[i] = 0.0;
        continue;
      }
      double acc = 0.0;
      for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k) {
        double pk = s.p[k];
        if (pk <= 0.0) continue;
        int j = pos[sh.succ[k]];
        if (j < 0) throw std::logic_error("value iteration: support leaves the component");
        acc += pk * (sh.stime[k] + y[j]);
      }
      next[i] = acc;
      diff = std::max(diff, std::abs(next[i] - y[i]));
    }
    y.swap(next);
    // geometric tail bound: remaining error <= diff * q / (1 - q)
    double q = std::min(prev_diff > 0.0 ? diff / prev_diff : 0.0, 0.999999);
    double tail = diff * q / (1.0 - q);
    if (std::max(diff, tail) <= tol) {
      out.reachable = true;
      out.y = y;
      return out;
    }
    prev_diff = diff;
  }
  throw std::runtime_error("value iteration did not converge");
}

namespace {

// per-row cumulative probabilities for walk sampling
std::vector<double> row_cdf(const StrategyShape& sh, const std::vector<double>& p) {
  std::vector<double> cdf(p.size());
  for (int a = 0; a < sh.aug_count; ++a) {
    double acc = 0.0;
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k) {
      acc += p[k];
      cdf[k] = acc;
    }
  }
  return cdf;
}

int sample_slot(const StrategyShape& sh, const std::vector<double>& p,
                const std::vector<double>& cdf, int a, double u) {
  int lo = sh.row_offset[a], hi = sh.row_offset[a + 1];
  for (int k = lo; k < hi; ++k)
    if (u <= cdf[k] && p[k] > 0.0) return k;
  for (int k = hi - 1; k >= lo; --k)  // u landed in trailing round-off
    if (p[k] > 0.0) return k;
  throw std::logic_error("strategy row with no positive probability");
}

}  // namespace

MonteCarloEstimate monte_carlo_damage(const RegularStrategy& s, const PatrollingGraph& g,
                                      AugEdge e, int target_vertex, long long samples,
                                      double horizon, unsigned long long seed) {
  const auto& sh = *s.shape;
  double alpha = g.cost_of(target_vertex);
  std::vector<double> cdf = row_cdf(sh, s.p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto walk_time = [&](double cap) {
    // time from committing to e until a copy of the target is entered
    double t = e.time;
    int at = e.to;
    while (sh.owner[at] != target_vertex) {
      if (t > cap) return -1.0;
      int k = sample_slot(sh, s.p, cdf, at, unit(rng));
      t += sh.stime[k];
      at = sh.succ[k];
    }
    return t;
  };

  if (horizon <= 0.0) {
    double worst = 1.0;
    for (int i = 0; i < 256; ++i) worst = std::max(worst, walk_time(1e9));
    horizon = 100.0 * worst;
  }

  MonteCarloEstimate est;
  est.horizon = horizon;
  double sum = 0.0, sumsq = 0.0;
  for (long long i = 0; i < samples; ++i) {
    double t = walk_time(horizon);
    if (t < 0.0) {
      ++est.truncated;
      continue;
    }
    double d = alpha * t;
    sum += d;
    sumsq += d * d;
    ++est.used;
  }
  if (est.used > 0) {
    est.mean = sum / est.used;
    if (est.used > 1) {
      double var = (sumsq - sum * sum / est.used) / (est.used - 1);
      est.std_error = std::sqrt(std::max(var, 0.0) / est.used);
    }
  }
  return est;
}

DeterministicSearchResult enumerate_deterministic(const PatrollingGraph& g,
                                                  const std::vector<int>& mem,
                                                  unsigned long long guard) {
  ShapePtr shape = build_shape(g, mem);
  const auto& sh = *shape;

  unsigned long long count = 1;
  for (int a = 0; a < sh.aug_count; ++a) {
    count *= static_cast<unsigned long long>(sh.row_size(a));
    if (count > guard)
      throw std::runtime_error("deterministic search space exceeds " + std::to_string(guard) +
                               " strategies");
  }

  DeterministicSearchResult res;
  std::vector<int> choice(sh.aug_count, 0);  // slot offset per row
  RegularStrategy s{shape, std::vector<double>(sh.slot_count, 0.0)};
  while (true) {
    std::fill(s.p.begin(), s.p.end(), 0.0);
    for (int a = 0; a < sh.aug_count; ++a) s.p[sh.row_offset[a] + choice[a]] = 1.0;
    double v = evaluate(s, g, Exec::serial).value;
    ++res.searched;
    if (v < res.best_value || res.searched == 1) {
      res.best_value = v;
      res.best = s;
    }
    int a = sh.aug_count - 1;
    while (a >= 0 && choice[a] + 1 >= sh.row_size(a)) choice[a--] = 0;
    if (a < 0) break;
    ++choice[a];
  }
  return res;
}

}  // namespace patrol
