// Acceptance gate: one pass/fail line per criterion, exit 0 only when all
// ten hold. Each criterion names the fixture or property it checks and the
// bound it enforces; tolerances and runtime caps are part of the gate.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "fd_check.hpp"
#include "fixtures.hpp"
#include "patrol/evaluator.hpp"
#include "patrol/gradient.hpp"
#include "patrol/graph.hpp"
#include "patrol/optimizer.hpp"
#include "patrol/oracle.hpp"
#include "patrol/strategy.hpp"

using namespace patrol;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& label,
               const std::function<std::pair<bool, std::string>()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  bool pass = false;
  std::string note;
  try {
    auto [ok, n] = body();
    pass = ok;
    note = n;
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!pass) ++g_failures;
  std::printf("[%s] criterion %d: %s: %s (%.2fs)\n", pass ? "PASS" : "FAIL", id, label.c_str(),
              note.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

fs::path sandbox() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "patrol_acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  fs::path so = sandbox() / "stdout.txt";
  std::string cmd = std::string(PATROL_BIN) + " " + args + " > " + so.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  // 1: deterministic two-target shuttle evaluates to exactly 2
  criterion(1, "alternating shuttle evaluates to 2", [] {
    auto t0 = std::chrono::steady_clock::now();
    PatrollingGraph twin = fx::twin_targets();
    EvaluationReport rep = evaluate(fx::alternating(twin), twin);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = std::abs(rep.value - 2.0) <= 1e-12 && secs < 1.0;
    return std::pair(ok, fmt("value %.17g, %.3fs", rep.value, secs));
  });

  // 2: lazy shuttle with stay probability 0.99
  criterion(2, "lazy shuttle hitting time 100, value 101", [] {
    PatrollingGraph twin = fx::twin_targets();
    RegularStrategy lz = fx::lazy(twin, 0.99);
    std::vector<int> members(lz.shape->aug_count);
    std::iota(members.begin(), members.end(), 0);
    auto y = solve_hitting(lz, members, 1);
    EvaluationReport rep = evaluate(lz, twin);
    bool ok = y.reachable && std::abs(y.at(0) - 100.0) <= 1e-9 &&
              std::abs(rep.value - 101.0) <= 1e-9;
    return std::pair(ok, fmt("y %.12g, value %.12g", y.at(0), rep.value));
  });

  // 3: corridor strategy with a return memory on v
  criterion(3, "corridor with memory evaluates to 6 with the right witness", [] {
    PatrollingGraph path = fx::path3();
    RegularStrategy s = fx::return_with_memory(path);
    EvaluationReport rep = evaluate(s, path);
    const WitnessEntry& w = rep.witness.empty() ? WitnessEntry{} : rep.witness[0];
    bool witness_ok = w.target_vertex == 2 && s.shape->owner[w.edge.from] == 2 &&
                      s.shape->owner[w.edge.to] == 1;
    bool ok = std::abs(rep.value - 6.0) <= 1e-9 && rep.unambiguous && rep.val_equals_bound &&
              witness_ok;
    return std::pair(ok, fmt("value %.12g, unambiguous %d, witness target t%c edge %s->%s",
                             rep.value, rep.unambiguous ? 1 : 0,
                             w.target_vertex == 2 ? '2' : '?',
                             path.vertices[s.shape->owner[w.edge.from]].c_str(),
                             path.vertices[s.shape->owner[w.edge.to]].c_str()));
  });

  // 4: memoryless corridor split at the optimal coin bias
  criterion(4, "memoryless corridor at the optimal bias", [] {
    PatrollingGraph path = fx::path3();
    double p = (7.0 - std::sqrt(41.0)) / 2.0;
    EvaluationReport rep = evaluate(fx::memoryless_split(path, p), path);
    double closed = 2.0 + (2.0 - p) / p;  // = (9 + sqrt(41)) / 2
    bool ok = std::abs(rep.value - closed) <= 1e-6;
    return std::pair(ok, fmt("value %.12g vs closed form %.12g", rep.value, closed));
  });

  // 5: brute force over deterministic strategies on the corridor
  criterion(5, "deterministic search: 8 with memory, infinite without", [] {
    PatrollingGraph path = fx::path3();
    auto with_mem = enumerate_deterministic(path, {1, 2, 1});
    auto flat = enumerate_deterministic(path, {1, 1, 1});
    bool ok = with_mem.best_value == 8.0 && is_infinite(flat.best_value);
    return std::pair(ok, fmt("mem(v)=2 best %.17g over %llu, mem=1 best %s", with_mem.best_value,
                             with_mem.searched, format_value(flat.best_value).c_str()));
  });

  // 6: adjoint gradient vs central differences on 20 seeded instances
  criterion(6, "adjoint gradient matches finite differences", [] {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(123);
    double worst = 0.0;
    int checked = 0, skipped = 0;
    for (int i = 0; i < 20; ++i) {
      PatrollingGraph g = fx::random_strongly_connected(rng, 8);
      auto shape = build_shape(g, fx::random_memory(rng, g, 2));
      CoefficientMatrix theta = random_init(shape, rng);
      auto rep = fd::check_gradient(g, theta, 0.3, 0.2, 1e-5);
      worst = std::max(worst, rep.max_rel_err);
      checked += rep.checked;
      skipped += rep.skipped;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = worst <= 1e-4 && checked > 0 && secs < 30.0;
    return std::pair(ok, fmt("max rel err %.3g over %d coords (%d kink-straddlers skipped), %.2fs",
                             worst, checked, skipped, secs));
  });

  // 7: value iteration and Monte Carlo against the direct solver
  criterion(7, "independent oracles agree with the evaluator", [] {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    int pairs = 0;
    while (pairs < 50) {
      PatrollingGraph g = fx::random_strongly_connected(rng, 7);
      RegularStrategy s = fx::random_soft(rng, g, fx::random_memory(rng, g, 2));
      if (pairs % 2 == 1) s = cutoff(s, 0.2);
      auto dec = bottom_sccs(support_graph(s));
      for (int b : dec.bottom_ids) {
        for (int t : g.targets) {
          auto direct = solve_hitting(s, dec.components[b], t);
          auto iter = value_iteration_hitting(s, dec.components[b], t, 1e-10);
          if (direct.reachable != iter.reachable)
            return std::pair(false, std::string("reachability disagreement"));
          if (direct.reachable)
            for (int a : dec.components[b])
              worst = std::max(worst, std::abs(direct.at(a) - iter.at(a)));
        }
        ++pairs;
      }
    }
    if (worst > 1e-8) return std::pair(false, fmt("value iteration diff %.3g", worst));

    PatrollingGraph twin = fx::twin_targets();
    PatrollingGraph path = fx::path3();
    double pstar = (7.0 - std::sqrt(41.0)) / 2.0;
    std::vector<std::pair<PatrollingGraph, RegularStrategy>> fixtures;
    fixtures.emplace_back(twin, fx::alternating(twin));
    fixtures.emplace_back(twin, fx::lazy(twin, 0.99));
    fixtures.emplace_back(path, fx::memoryless_split(path, pstar));
    fixtures.emplace_back(path, fx::return_with_memory(path));
    std::string mc_note;
    for (size_t i = 0; i < fixtures.size(); ++i) {
      const auto& [g, s] = fixtures[i];
      EvaluationReport rep = evaluate(s, g);
      const WitnessEntry& w = rep.witness[rep.best_component];
      auto est = monte_carlo_damage(s, g, w.edge, w.target_vertex, 100000, 0.0,
                                    11 + static_cast<unsigned long long>(i));
      double gap = std::abs(est.mean - rep.value);
      if (est.used == 0 || gap > 3.0 * est.std_error)
        return std::pair(false, fmt("fixture %zu: mc mean %.6g vs value %.6g (3se %.3g)", i + 1,
                                    est.mean, rep.value, 3.0 * est.std_error));
      mc_note += fmt("%s%.4g/%.4g", i ? ", " : "", est.mean, rep.value);
    }
    return std::pair(true, fmt("vi diff %.3g over %d pairs; mc mean/value: %s", worst, pairs,
                               mc_note.c_str()));
  });

  // 8: synthesis rediscovers the good corridor strategy
  criterion(8, "synthesis reaches 6.1 on the corridor", [] {
    auto t0 = std::chrono::steady_clock::now();
    PatrollingGraph path = fx::path3();
    OptimizerConfig cfg;
    cfg.steps = 500;
    double best = kInfinite;
    int best_seed = -1;
    for (unsigned long long seed = 1; seed <= 10; ++seed) {
      cfg.seed = seed;
      SynthesisResult res = synthesize(path, {1, 2, 1}, cfg);
      if (res.best_value < best) {
        best = res.best_value;
        best_seed = static_cast<int>(seed);
      }
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = best <= 6.1 && secs < 120.0;
    return std::pair(ok, fmt("best %.6g (seed %d) over 10 seeds x 500 steps, %.1fs", best,
                             best_seed, secs));
  });

  // 9: small airport quality plus step-time scaling on grids
  criterion(9, "airport quality and grid step-time scaling", [] {
    PatrollingGraph ap = gen_airport({4, 2, 2});
    std::vector<int> mem(ap.vertex_count());
    for (int v = 0; v < ap.vertex_count(); ++v) mem[v] = ap.is_target(v) ? 1 : 4;
    OptimizerConfig cfg;
    cfg.steps = 500;
    double best = kInfinite;
    for (unsigned long long seed = 1; seed <= 30; ++seed) {
      cfg.seed = seed;
      SynthesisResult res = synthesize(ap, mem, cfg);
      best = std::min(best, res.best_value);
    }
    double baseline = airport_baseline(ap);
    if (!(best / baseline <= 1.25))
      return std::pair(false, fmt("airport best %.6g is %.3fx the baseline %g", best,
                                  best / baseline, baseline));

    OptimizerConfig quick;
    quick.steps = 2;
    quick.seed = 1;
    std::vector<double> step_secs;
    for (int n : {10, 20, 30, 40, 50}) {
      PatrollingGraph g = gen_grid(n, 2);
      SynthesisResult res = synthesize(g, uniform_memory(g, 6), quick);
      step_secs.push_back(res.mean_step_seconds);
    }
    bool monotone = true;
    for (size_t i = 1; i < step_secs.size(); ++i)
      if (step_secs[i] <= step_secs[i - 1]) monotone = false;

    PatrollingGraph g100 = gen_grid(100, 1);
    SynthesisResult big = synthesize(g100, uniform_memory(g100, 6), quick);
    bool ok = monotone && big.mean_step_seconds < 60.0;
    return std::pair(
        ok, fmt("airport best %.4gx baseline; grid step secs %.4g/%.4g/%.4g/%.4g/%.4g, "
                "n=100: %.2fs",
                best / baseline, step_secs[0], step_secs[1], step_secs[2], step_secs[3],
                step_secs[4], big.mean_step_seconds));
  });

  // 10: manifest replay reproduces trace files byte for byte
  criterion(10, "manifest replay is byte-identical", [] {
    fs::path g = sandbox() / "replay_graph.json";
    save_graph(fx::path3(), g.string());
    fs::path a = sandbox() / "run_a", b = sandbox() / "run_b";
    if (run_cli("synth --graph " + g.string() +
                " --mem default=1,v=2 --steps 30 --trials 2 --seed 21 --out " + a.string()) != 0)
      return std::pair(false, std::string("first synth run failed"));
    if (run_cli("synth --replay " + (a / "manifest.json").string() + " --out " + b.string()) != 0)
      return std::pair(false, std::string("replay run failed"));
    for (const char* f : {"trace_000.csv", "trace_001.csv"}) {
      std::string xa = slurp(a / f), xb = slurp(b / f);
      if (xa.empty() || xa != xb) return std::pair(false, fmt("%s differs between runs", f));
    }
    return std::pair(true, std::string("2 trials x 30 steps replayed byte-identically"));
  });

  if (g_failures == 0) std::printf("all 10 criteria passed\n");
  else std::printf("%d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
