#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "patrol/graph.hpp"

namespace patrol {

// Augmented state space: vertex v with memory slots 1..mem[v] flattens to the
// contiguous range [offset[v], offset[v+1]). Per augmented vertex (a "row")
// the admissible successors are every memory copy of every out-neighbour of
// the base vertex, laid out flat so a strategy / coefficient table is a
// single vector indexed by row_offset[a] + slot.
//
// Row slot order is canonical: out-edges sorted by destination vertex id,
// then destination memory 1..mem. Everything downstream (solves, gradients,
// reports) iterates in this order, which is what makes runs reproducible.
struct StrategyShape {
  int base_vertices = 0;
  int aug_count = 0;               // |augmented vertices|
  std::vector<int> mem;            // per base vertex, all >= 1
  std::vector<int> offset;         // size base_vertices+1
  std::vector<int> owner;          // aug id -> base vertex
  std::vector<int> mem_of;         // aug id -> memory value (1-based)

  std::vector<int> row_offset;     // size aug_count+1, into the flat arrays
  std::vector<int> succ;           // flat: successor aug id per slot
  std::vector<int> stime;          // flat: traversal time per slot
  int slot_count = 0;

  int aug_id(int v, int m) const { return offset[v] + m - 1; }
  int row_size(int a) const { return row_offset[a + 1] - row_offset[a]; }
};

using ShapePtr = std::shared_ptr<const StrategyShape>;

// Builds the shape for a graph and per-vertex memory map (mem[v] >= 1).
ShapePtr build_shape(const PatrollingGraph& g, const std::vector<int>& mem);

inline std::vector<int> uniform_memory(const PatrollingGraph& g, int k) {
  return std::vector<int>(g.vertices.size(), k);
}

// Finite-memory strategy: p[slot] is the probability of the slot's augmented
// edge. Rows sum to 1; zero entries are allowed (pruned support).
struct RegularStrategy {
  ShapePtr shape;
  std::vector<double> p;
};

// Unconstrained optimizer variables, one per admissible augmented edge.
// softmax() turns a row of these into a strategy row.
struct CoefficientMatrix {
  ShapePtr shape;
  std::vector<double> value;
};

// Same layout as CoefficientMatrix; holds d(total loss)/d(coefficient).
using GradientMatrix = CoefficientMatrix;

// Support graph of a strategy: per augmented vertex the successors taken with
// positive probability (in slot order).
struct AugmentedGraph {
  ShapePtr shape;
  std::vector<std::vector<int>> adj;
};

// Throws if p is not row-stochastic within 1e-9 or has entries outside [0,1].
void check_strategy(const RegularStrategy& s);

// i.i.d. Gaussian(0,1) coefficients.
CoefficientMatrix random_init(const ShapePtr& shape, std::mt19937_64& rng);

// Row-wise max-shifted softmax; every entry comes out strictly positive.
RegularStrategy softmax(const CoefficientMatrix& theta);

// Zeroes entries strictly below `threshold` (always keeping each row's max,
// ties to the lowest slot) and renormalizes the survivors.
RegularStrategy cutoff(const RegularStrategy& s, double threshold);

// Snaps entries within `threshold` of 0 or 1 and renormalizes.
RegularStrategy round_endpoints(const RegularStrategy& s, double threshold);

// Mean over augmented vertices of the row Shannon entropy (natural log).
double mean_entropy(const RegularStrategy& s);

AugmentedGraph support_graph(const RegularStrategy& s);

// True when no augmented vertex has two positive slots into distinct memory
// copies of the same base successor (observing the base move pins down the
// next memory, which is what makes the worst-case bound tight).
bool is_unambiguous(const RegularStrategy& s);

// Strategy JSON round-trip against a graph (names resolve through g; memory
// defaults to 1 for vertices missing from the file's map). load validates
// support legality and row sums, renormalizing away file round-off.
RegularStrategy load_strategy(const std::string& path, const PatrollingGraph& g);
void save_strategy(const RegularStrategy& s, const PatrollingGraph& g, const std::string& path);

}  // namespace patrol
