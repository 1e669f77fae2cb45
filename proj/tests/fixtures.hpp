#pragma once

// Shared hand-built instances: a two-target shuttle, a three-vertex corridor
// with a weighted target, the strategies whose exact values are known in
// closed form, and seeded random instance generators for property tests.

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "patrol/graph.hpp"
#include "patrol/strategy.hpp"

namespace fx {

using namespace patrol;

// set one augmented-edge probability by names; throws if the slot is absent
inline void set_p(RegularStrategy& s, const PatrollingGraph& g, const std::string& from_v,
                  int from_m, const std::string& to_v, int to_m, double p) {
  const auto& sh = *s.shape;
  int a = sh.aug_id(g.vertex_id(from_v), from_m);
  int b = sh.aug_id(g.vertex_id(to_v), to_m);
  for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k)
    if (sh.succ[k] == b) {
      s.p[k] = p;
      return;
    }
  throw std::runtime_error("fixture edge " + from_v + "->" + to_v + " not admissible");
}

inline RegularStrategy zero_strategy(const PatrollingGraph& g, const std::vector<int>& mem) {
  ShapePtr shape = build_shape(g, mem);
  return {shape, std::vector<double>(shape->slot_count, 0.0)};
}

// two unit-cost targets, self-loops and both cross edges, all times 1
inline PatrollingGraph twin_targets() {
  PatrollingGraph g;
  g.vertices = {"t1", "t2"};
  g.targets = {0, 1};
  g.costs = {1.0, 1.0};
  g.edges = {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  return g;
}

// deterministic shuttle between the two targets
inline RegularStrategy alternating(const PatrollingGraph& g) {
  RegularStrategy s = zero_strategy(g, uniform_memory(g, 1));
  set_p(s, g, "t1", 1, "t2", 1, 1.0);
  set_p(s, g, "t2", 1, "t1", 1, 1.0);
  return s;
}

// mostly sits on the self-loop, crosses with probability 1-stay
inline RegularStrategy lazy(const PatrollingGraph& g, double stay = 0.99) {
  RegularStrategy s = zero_strategy(g, uniform_memory(g, 1));
  set_p(s, g, "t1", 1, "t1", 1, stay);
  set_p(s, g, "t1", 1, "t2", 1, 1.0 - stay);
  set_p(s, g, "t2", 1, "t2", 1, stay);
  set_p(s, g, "t2", 1, "t1", 1, 1.0 - stay);
  return s;
}

// corridor t1 - v - t2 with cost 2 on t2, all times 1, no self-loops
inline PatrollingGraph path3() {
  PatrollingGraph g;
  g.vertices = {"t1", "v", "t2"};
  g.targets = {0, 2};
  g.costs = {1.0, 2.0};
  g.edges = {{0, 1, 1}, {1, 0, 1}, {1, 2, 1}, {2, 1, 1}};
  return g;
}

// memoryless: v goes to t1 with probability p, to t2 otherwise
inline RegularStrategy memoryless_split(const PatrollingGraph& g, double p) {
  RegularStrategy s = zero_strategy(g, uniform_memory(g, 1));
  set_p(s, g, "t1", 1, "v", 1, 1.0);
  set_p(s, g, "t2", 1, "v", 1, 1.0);
  set_p(s, g, "v", 1, "t1", 1, p);
  set_p(s, g, "v", 1, "t2", 1, 1.0 - p);
  return s;
}

// v remembers which target it last left: after t1 it always continues to t2,
// after t2 it flips a fair coin; worst-case expected damage is exactly 6
inline RegularStrategy return_with_memory(const PatrollingGraph& g) {
  std::vector<int> mem = {1, 2, 1};
  RegularStrategy s = zero_strategy(g, mem);
  set_p(s, g, "t1", 1, "v", 1, 1.0);
  set_p(s, g, "v", 1, "t2", 1, 1.0);
  set_p(s, g, "t2", 1, "v", 2, 1.0);
  set_p(s, g, "v", 2, "t1", 1, 0.5);
  set_p(s, g, "v", 2, "t2", 1, 0.5);
  return s;
}

// random strongly connected digraph: a directed cycle plus extra edges,
// times in 1..max_time, a random nonempty target set with costs in [0.5, 2]
inline PatrollingGraph random_strongly_connected(std::mt19937_64& rng, int max_v,
                                                 int max_time = 3) {
  std::uniform_int_distribution<int> nv_d(2, max_v);
  int nv = nv_d(rng);
  std::uniform_int_distribution<int> time_d(1, max_time);
  std::uniform_real_distribution<double> unit(0.0, 1.0), cost_d(0.5, 2.0);

  PatrollingGraph g;
  for (int v = 0; v < nv; ++v) g.vertices.push_back("v" + std::to_string(v));
  for (int v = 0; v < nv; ++v) g.edges.push_back({v, (v + 1) % nv, time_d(rng)});
  for (int u = 0; u < nv; ++u)
    for (int v = 0; v < nv; ++v) {
      if (v == (u + 1) % nv) continue;  // cycle edge already there
      if (unit(rng) < 0.3) g.edges.push_back({u, v, time_d(rng)});
    }
  for (int v = 0; v < nv; ++v)
    if (unit(rng) < 0.5) {
      g.targets.push_back(v);
      g.costs.push_back(cost_d(rng));
    }
  if (g.targets.empty()) {
    g.targets.push_back(0);
    g.costs.push_back(1.0);
  }
  return g;
}

inline std::vector<int> random_memory(std::mt19937_64& rng, const PatrollingGraph& g,
                                      int max_mem = 2) {
  std::uniform_int_distribution<int> mem_d(1, max_mem);
  std::vector<int> mem(g.vertices.size());
  for (auto& m : mem) m = mem_d(rng);
  return mem;
}

inline RegularStrategy random_soft(std::mt19937_64& rng, const PatrollingGraph& g,
                                   const std::vector<int>& mem) {
  ShapePtr shape = build_shape(g, mem);
  CoefficientMatrix theta = random_init(shape, rng);
  return softmax(theta);
}

}  // namespace fx
