// Times the per-target solve kernels (evaluation and gradient) serial vs
// OpenMP, and checks both give byte-identical numbers while at it.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "patrol/evaluator.hpp"
#include "patrol/gradient.hpp"
#include "patrol/graph.hpp"
#include "patrol/strategy.hpp"

using namespace patrol;
using clk = std::chrono::steady_clock;

static double secs(clk::time_point a, clk::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 40;
  int mem = argc > 2 ? std::atoi(argv[2]) : 6;
  int reps = argc > 3 ? std::atoi(argv[3]) : 3;

  PatrollingGraph g = gen_grid(n, 7);
  ShapePtr shape = build_shape(g, uniform_memory(g, mem));
  std::mt19937_64 rng(7);
  CoefficientMatrix theta = random_init(shape, rng);
  RegularStrategy s = softmax(theta);

#ifdef _OPENMP
  std::printf("grid n=%d, mem=%d: %d augmented vertices, %d slots, %d targets, %d omp threads\n",
              n, mem, shape->aug_count, shape->slot_count, g.target_count(), omp_get_max_threads());
#else
  std::printf("grid n=%d, mem=%d: %d augmented vertices, %d slots, %d targets, no OpenMP\n", n,
              mem, shape->aug_count, shape->slot_count, g.target_count());
#endif

  double t_eval[2] = {0, 0}, t_grad[2] = {0, 0};
  EvaluationReport rep[2];
  std::pair<LossBreakdown, GradientMatrix> lg[2];
  Exec modes[2] = {Exec::serial, Exec::parallel};
  for (int r = 0; r < reps; ++r)
    for (int m = 0; m < 2; ++m) {
      auto a = clk::now();
      rep[m] = evaluate(s, g, modes[m]);
      auto b = clk::now();
      lg[m] = loss_grad(theta, g, 0.3, 0.2, modes[m]);
      auto c = clk::now();
      t_eval[m] += secs(a, b);
      t_grad[m] += secs(b, c);
    }

  bool same = rep[0].value == rep[1].value && lg[0].first.total == lg[1].first.total &&
              std::memcmp(lg[0].second.value.data(), lg[1].second.value.data(),
                          lg[0].second.value.size() * sizeof(double)) == 0;

  std::printf("%-10s %12s %12s %9s\n", "kernel", "serial", "parallel", "speedup");
  std::printf("%-10s %10.4fs %10.4fs %8.2fx\n", "evaluate", t_eval[0] / reps, t_eval[1] / reps,
              t_eval[0] / t_eval[1]);
  std::printf("%-10s %10.4fs %10.4fs %8.2fx\n", "loss_grad", t_grad[0] / reps, t_grad[1] / reps,
              t_grad[0] / t_grad[1]);
  std::printf("results bit-identical: %s\n", same ? "yes" : "NO");
  return same ? 0 : 1;
}
