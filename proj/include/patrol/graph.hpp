#pragma once

#include <limits>
#include <string>
#include <vector>

namespace patrol {

// Distinguished "attacker is never discovered" value. Kept as a plain double
// infinity in memory; serialized as the string "inf" in JSON/CSV.
inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

inline bool is_infinite(double x) { return x == kInfinite; }

struct Edge {
  int from = -1;
  int to = -1;
  int time = 1;  // traversal time, integer >= 1
};

// Directed patrolling graph: vertices, a nonempty target subset with positive
// costs, and integer-weighted edges. Self-loops are fine, duplicate (from,to)
// pairs are not. Every useful graph is strongly connected; validate() checks.
struct PatrollingGraph {
  std::vector<std::string> vertices;  // index = vertex id
  std::vector<int> targets;           // vertex ids, in declaration order
  std::vector<double> costs;          // aligned with targets, all > 0
  std::vector<Edge> edges;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int target_count() const { return static_cast<int>(targets.size()); }

  // -1 if the name is unknown.
  int vertex_id(const std::string& name) const;

  // -1 if v is not a target, else its position in `targets`.
  int target_index(int v) const;
  bool is_target(int v) const { return target_index(v) >= 0; }

  // Cost of target vertex v; requires is_target(v).
  double cost_of(int v) const;

  // Out-edges of v as indices into `edges`, sorted by destination id.
  std::vector<std::vector<int>> out_edges() const;

  // Edge id for (u,v), or -1 if absent.
  int edge_id(int u, int v) const;
};

struct Violation {
  std::string rule;     // short stable id, e.g. "time-positive"
  std::string message;  // human-readable, names the offending element
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Structural checks: nonempty targets, unique target vertices, positive costs,
// integer times >= 1, edge endpoints in range, no duplicate edges, every
// vertex has an out-edge, and strong connectivity.
ValidationReport validate(const PatrollingGraph& g);

// JSON round-trip. load_graph validates and throws std::runtime_error with
// file/field context on parse errors or validation failures.
PatrollingGraph load_graph(const std::string& path);
void save_graph(const PatrollingGraph& g, const std::string& path);

// n x n grid instance: n cells sampled without replacement from the grid,
// pairwise travel times = BFS hop distance in the grid, the first ceil(n/2)
// sampled cells are unit-cost targets, and the complete directed edge set is
// pruned by removing any (u,v) with an intermediate w (distinct from both)
// satisfying tm(u,w) + tm(w,v) <= tm(u,v). Pruning preserves strong
// connectivity. Deterministic for a fixed (n, seed).
PatrollingGraph gen_grid(int n, unsigned long long seed);

// Star-of-chains instance: a center C, one hall chain per terminal (one hall
// per gate pair, inner hall attached to C), two unit-cost target gates per
// hall, every edge bidirectional with time 1. gate_counts[i] is terminal i's
// gate count; each must be even and >= 2.
PatrollingGraph gen_airport(const std::vector<int>& gate_counts);

// Reference value 2*(|V|-1) for airport instances (tour of the doubled tree).
double airport_baseline(const PatrollingGraph& g);

}  // namespace patrol
