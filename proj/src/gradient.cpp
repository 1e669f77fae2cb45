#include "patrol/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hitting_kernel.hpp"

namespace patrol {

double phi(double t, double hard_max, double eps) {
  double band = eps * hard_max;
  if (t < hard_max - band) return 0.0;
  return 1.0 + (t - hard_max) / band;
}

LossBreakdown loss(const RegularStrategy& s, const DamageMatrix& damages, double eps, double beta) {
  if (damages.components.size() != 1)
    throw std::runtime_error("loss expects the single full-support component");
  const auto& cd = damages.components[0];

  LossBreakdown out;
  out.hard_max = 0.0;
  for (const auto& row : cd.damage)
    for (double d : row) {
      if (is_infinite(d)) throw std::runtime_error("loss needs finite damages (full support)");
      out.hard_max = std::max(out.hard_max, d);
    }
  out.phi_values.assign(cd.damage.size(), {});
  for (size_t t = 0; t < cd.damage.size(); ++t) {
    out.phi_values[t].resize(cd.damage[t].size());
    for (size_t e = 0; e < cd.damage[t].size(); ++e) {
      double f = phi(cd.damage[t][e], out.hard_max, eps);
      out.phi_values[t][e] = f;
      out.soft += f * f;
    }
  }
  out.entropy = mean_entropy(s);
  out.total = out.soft + beta * out.entropy;
  return out;
}

std::pair<LossBreakdown, GradientMatrix> loss_grad(const CoefficientMatrix& theta,
                                                   const PatrollingGraph& g, double eps,
                                                   double beta, Exec exec) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::runtime_error("loss_grad: eps must be in (0,1]");
  if (beta < 0.0) throw std::runtime_error("loss_grad: beta must be >= 0");
  const auto& sh = *theta.shape;
  if (sh.base_vertices != g.vertex_count())
    throw std::runtime_error("loss_grad: coefficient shape does not match graph");

  RegularStrategy s = softmax(theta);
  int nt = g.target_count();
  bool parallel = (exec == Exec::parallel);

  std::vector<int> everyone(sh.aug_count);
  for (int a = 0; a < sh.aug_count; ++a) everyone[a] = a;
  std::vector<int> row_of(sh.slot_count);
  for (int a = 0; a < sh.aug_count; ++a)
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k) row_of[k] = a;

  // forward: one hitting system per target over the full augmented space
  // (softmax support is everything, so there is a single bottom component)
  std::vector<std::vector<double>> yv(nt);          // [target][aug]
  std::vector<std::vector<double>> L(nt);           // [target][slot]
  std::string first_error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int t = 0; t < nt; ++t) {
    try {
      detail::HittingKernel kernel(s, everyone, g.targets[t]);
      kernel.solve_forward("full space, target " + g.vertices[g.targets[t]]);
      yv[t].assign(kernel.y.data(), kernel.y.data() + kernel.n);
      L[t].resize(sh.slot_count);
      for (int k = 0; k < sh.slot_count; ++k)
        L[t][k] = g.costs[t] * (sh.stime[k] + yv[t][sh.succ[k]]);
    } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (first_error.empty()) first_error = e.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);

  LossBreakdown bd;
  for (int t = 0; t < nt; ++t)
    for (double d : L[t]) bd.hard_max = std::max(bd.hard_max, d);
  double band = eps * bd.hard_max;
  bd.phi_values.assign(nt, std::vector<double>(sh.slot_count));
  for (int t = 0; t < nt; ++t) {
    double part = 0.0;
    for (int k = 0; k < sh.slot_count; ++k) {
      double f = phi(L[t][k], bd.hard_max, eps);
      bd.phi_values[t][k] = f;
      part += f * f;
    }
    bd.soft += part;  // target order is fixed, so the sum is reproducible
  }
  bd.entropy = mean_entropy(s);
  bd.total = bd.soft + beta * bd.entropy;

  // adjoint: seed with d(soft)/dy, solve the transposed system per target,
  // then pick up d(soft)/d(sigma) on the non-pinned rows. The reference
  // maximum is frozen: phi' ignores d(hard_max)/d(sigma).
  std::vector<std::vector<double>> acc(nt);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int t = 0; t < nt; ++t) {
    try {
      detail::HittingKernel kernel(s, everyone, g.targets[t]);
      Eigen::VectorXd seed = Eigen::VectorXd::Zero(sh.aug_count);
      for (int k = 0; k < sh.slot_count; ++k) {
        double l = L[t][k];
        if (l < bd.hard_max - band) continue;  // flat side of the ramp
        seed[sh.succ[k]] += g.costs[t] * 2.0 * bd.phi_values[t][k] / band;
      }
      Eigen::VectorXd lambda =
          kernel.refined_solve(seed, true, "adjoint, target " + g.vertices[g.targets[t]]);
      acc[t].assign(sh.slot_count, 0.0);
      for (int k = 0; k < sh.slot_count; ++k) {
        int r = row_of[k];
        if (sh.owner[r] == g.targets[t]) continue;  // pinned rows carry no dependence
        acc[t][k] = lambda[r] * (sh.stime[k] + yv[t][sh.succ[k]]);
      }
    } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (first_error.empty()) first_error = e.what();
    }
  }
  (void)parallel;
  if (!first_error.empty()) throw std::runtime_error(first_error);

  std::vector<double> dsigma(sh.slot_count, 0.0);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < sh.slot_count; ++k) dsigma[k] += acc[t][k];
  for (int k = 0; k < sh.slot_count; ++k)
    dsigma[k] += beta / sh.aug_count * (-std::log(s.p[k]) - 1.0);

  // through the softmax: dtheta_i = p_i * (dsigma_i - sum_j p_j dsigma_j)
  GradientMatrix grad{theta.shape, std::vector<double>(sh.slot_count)};
  for (int a = 0; a < sh.aug_count; ++a) {
    int lo = sh.row_offset[a], hi = sh.row_offset[a + 1];
    double inner = 0.0;
    for (int k = lo; k < hi; ++k) inner += s.p[k] * dsigma[k];
    for (int k = lo; k < hi; ++k) grad.value[k] = s.p[k] * (dsigma[k] - inner);
  }
  return {std::move(bd), std::move(grad)};
}

}  // namespace patrol
