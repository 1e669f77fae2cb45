#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "patrol/strategy.hpp"

namespace patrol::detail {

// Dense hitting-time system A y = c with A = I - P restricted to a closed set
// of augmented vertices and every row owned by the target pinned to identity
// (those y are 0 by definition). The set must be closed under the strategy's
// support except at pinned rows, which is true for bottom components and for
// the full augmented space.
//
// A is assembled once for the LU factorization and then dropped; residuals
// and refinement use the sparse slot structure directly, so memory stays at
// one n^2 block per live kernel.
struct HittingKernel {
  const StrategyShape* shape;
  const std::vector<double>* prob;
  int target;
  std::vector<int> members;  // sorted ascending
  std::vector<int> pos;      // aug id -> local index, -1 outside
  int n = 0;
  bool has_target = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::VectorXd y;

  HittingKernel(const RegularStrategy& s, std::vector<int> members_, int target_vertex)
      : shape(s.shape.get()), prob(&s.p), target(target_vertex), members(std::move(members_)) {
    std::sort(members.begin(), members.end());
    n = static_cast<int>(members.size());
    pos.assign(shape->aug_count, -1);
    for (int i = 0; i < n; ++i) pos[members[i]] = i;
    for (int i = 0; i < n; ++i)
      if (shape->owner[members[i]] == target) { has_target = true; break; }
    if (!has_target) return;  // nothing to solve, caller reports unreachable

    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      int a = members[i];
      if (shape->owner[a] == target) continue;  // pinned row stays e_i
      for (int k = shape->row_offset[a]; k < shape->row_offset[a + 1]; ++k) {
        double pk = (*prob)[k];
        if (pk <= 0.0) continue;
        int j = pos[shape->succ[k]];
        if (j < 0)
          throw std::logic_error("hitting system: support leaves the component at row " + std::to_string(a));
        A(i, j) -= pk;
      }
    }
    lu.compute(A);
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = x;
    for (int i = 0; i < n; ++i) {
      int a = members[i];
      if (shape->owner[a] == target) continue;
      for (int k = shape->row_offset[a]; k < shape->row_offset[a + 1]; ++k) {
        double pk = (*prob)[k];
        if (pk > 0.0) out[i] -= pk * x[pos[shape->succ[k]]];
      }
    }
    return out;
  }

  Eigen::VectorXd apply_t(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = x;
    for (int i = 0; i < n; ++i) {
      int a = members[i];
      if (shape->owner[a] == target) continue;
      for (int k = shape->row_offset[a]; k < shape->row_offset[a + 1]; ++k) {
        double pk = (*prob)[k];
        if (pk > 0.0) out[pos[shape->succ[k]]] -= pk * x[i];
      }
    }
    return out;
  }

  Eigen::VectorXd expected_step_times() const {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      int a = members[i];
      if (shape->owner[a] == target) continue;
      for (int k = shape->row_offset[a]; k < shape->row_offset[a + 1]; ++k)
        if ((*prob)[k] > 0.0) c[i] += (*prob)[k] * shape->stime[k];
    }
    return c;
  }

  // One refinement step, then an absolute residual gate at 1e-8.
  Eigen::VectorXd refined_solve(const Eigen::VectorXd& rhs, bool transposed,
                                const std::string& context) const {
    Eigen::VectorXd x(n), dx(n);
    if (transposed) x = lu.transpose().solve(rhs);
    else x = lu.solve(rhs);
    Eigen::VectorXd r = rhs - (transposed ? apply_t(x) : apply(x));
    if (transposed) dx = lu.transpose().solve(r);
    else dx = lu.solve(r);
    x += dx;
    r = rhs - (transposed ? apply_t(x) : apply(x));
    double resid = r.lpNorm<Eigen::Infinity>();
    if (!x.allFinite() || !(resid <= 1e-8))
      throw std::runtime_error("hitting-time solve ill-conditioned (" + context +
                               "): residual " + std::to_string(resid));
    return x;
  }

  void solve_forward(const std::string& context) {
    y = refined_solve(expected_step_times(), false, context);
    for (int i = 0; i < n; ++i) {
      if (shape->owner[members[i]] == target) y[i] = 0.0;  // pin exactly
      else if (y[i] < 0.0) y[i] = 0.0;                     // shave solver dust
    }
  }
};

}  // namespace patrol::detail
