#pragma once

#include <string>
#include <vector>

#include "patrol/graph.hpp"
#include "patrol/strategy.hpp"

namespace patrol {

// Execution policy for the per-(component, target) solve kernels. Both give
// bit-identical results: parallel workers write disjoint slots and the final
// reductions always run serially in a fixed order.
enum class Exec { serial, parallel };

// Strongly connected components of a support graph, members sorted, the
// component list ordered by smallest member. A component is "bottom" when no
// support edge leaves it; those are the recurrent classes the walk ends in.
struct BsccDecomposition {
  std::vector<std::vector<int>> components;
  std::vector<bool> bottom;
  std::vector<int> bottom_ids;  // indices of bottom components, ascending
};

BsccDecomposition bottom_sccs(const AugmentedGraph& g);

// Expected times to first reach any memory copy of one target, from each
// member of one closed component. reachable=false means the target has no
// copy in the component, i.e. the attacker is never discovered from there.
struct HittingTimeVector {
  bool reachable = false;
  std::vector<int> members;  // sorted aug ids
  std::vector<double> y;     // aligned with members; 0 at the target's copies
  double at(int aug) const;  // kInfinite when unreachable
};

// Solves y = P*(t + y) with the target's rows pinned to 0 by dense LU plus
// one step of iterative refinement. Throws if the refined residual exceeds
// 1e-8 (ill-conditioned system), naming the component and target.
HittingTimeVector solve_hitting(const RegularStrategy& s, const std::vector<int>& component,
                                int target_vertex);

struct AugEdge {
  int from = -1;  // aug ids
  int to = -1;
  int time = 1;
};

// Support edges inside one component, ordered by (source, destination).
std::vector<AugEdge> component_edges(const RegularStrategy& s, const std::vector<int>& members);

// Damage alpha * (edge time + y(head)) per edge; all kInfinite when the
// target is unreachable.
std::vector<double> damage_edges(double alpha, const std::vector<AugEdge>& edges,
                                 const HittingTimeVector& y);

struct ComponentDamage {
  std::vector<int> members;
  std::vector<AugEdge> edges;
  std::vector<std::vector<double>> damage;  // [target index][edge index]
};

// Damages for every bottom component and every target.
struct DamageMatrix {
  std::vector<ComponentDamage> components;  // aligned with dec.bottom_ids
};

DamageMatrix damage_matrix(const RegularStrategy& s, const PatrollingGraph& g,
                           const BsccDecomposition& dec, Exec exec);

// The best attack against one bottom component: the target and committed
// augmented edge realizing its worst damage.
struct WitnessEntry {
  int component = -1;  // index into the bottom component list
  int target_vertex = -1;
  AugEdge edge;
  double damage = kInfinite;
};

struct EvaluationReport {
  double value = kInfinite;  // min over bottom components of the worst damage
  bool unambiguous = false;
  bool val_equals_bound = false;  // the bound is the exact game value iff unambiguous
  int best_component = -1;
  std::vector<WitnessEntry> witness;  // one per bottom component
  BsccDecomposition decomposition;
};

// Worst-case expected damage bound of a strategy: per bottom component the
// max over (target, support edge) damages, then the min over components.
// Max ties resolve to the last (target, edge) pair within a relative 1e-9
// band of the maximum, in canonical order; min ties keep the lowest
// component index.
EvaluationReport evaluate(const RegularStrategy& s, const PatrollingGraph& g,
                          Exec exec = Exec::parallel);

// Per bottom component, where the attacker strikes against this strategy.
inline const std::vector<WitnessEntry>& attacker_best_response(const EvaluationReport& r) {
  return r.witness;
}

// Report JSON: {"value": number|"inf", "unambiguous", "best_component",
// "witness": [{"component", "target", "edge" [[v,m],[v,m]], "damage"}]}.
std::string report_to_json(const EvaluationReport& r, const RegularStrategy& s,
                           const PatrollingGraph& g);
void save_report(const EvaluationReport& r, const RegularStrategy& s, const PatrollingGraph& g,
                 const std::string& path);

}  // namespace patrol
