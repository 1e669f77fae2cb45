#include "patrol/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hitting_kernel.hpp"
#include "json.hpp"
#include "scc.hpp"

namespace patrol {

using nlohmann::json;

BsccDecomposition bottom_sccs(const AugmentedGraph& g) {
  std::vector<int> comp;
  int ncomp = detail::tarjan_scc(g.adj, comp);

  std::vector<std::vector<int>> groups(ncomp);
  for (int a = 0; a < static_cast<int>(g.adj.size()); ++a) groups[comp[a]].push_back(a);
  for (auto& grp : groups) std::sort(grp.begin(), grp.end());
  std::sort(groups.begin(), groups.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });

  // canonical component id per vertex, then bottom = no edge escapes
  BsccDecomposition dec;
  dec.components = std::move(groups);
  std::vector<int> canon(g.adj.size());
  for (int c = 0; c < ncomp; ++c)
    for (int a : dec.components[c]) canon[a] = c;
  dec.bottom.assign(ncomp, true);
  for (int a = 0; a < static_cast<int>(g.adj.size()); ++a)
    for (int b : g.adj[a])
      if (canon[b] != canon[a]) dec.bottom[canon[a]] = false;
  for (int c = 0; c < ncomp; ++c)
    if (dec.bottom[c]) dec.bottom_ids.push_back(c);
  return dec;
}

double HittingTimeVector::at(int aug) const {
  if (!reachable) return kInfinite;
  auto it = std::lower_bound(members.begin(), members.end(), aug);
  if (it == members.end() || *it != aug)
    throw std::out_of_range("hitting time queried outside its component");
  return y[it - members.begin()];
}

HittingTimeVector solve_hitting(const RegularStrategy& s, const std::vector<int>& component,
                                int target_vertex) {
  detail::HittingKernel kernel(s, component, target_vertex);
  HittingTimeVector out;
  out.members = kernel.members;
  if (!kernel.has_target) return out;  // reachable stays false
  kernel.solve_forward("component min vertex " + std::to_string(kernel.members.front()) +
                       ", target " + std::to_string(target_vertex));
  out.reachable = true;
  out.y.assign(kernel.y.data(), kernel.y.data() + kernel.n);
  return out;
}

std::vector<AugEdge> component_edges(const RegularStrategy& s, const std::vector<int>& members) {
  const auto& sh = *s.shape;
  std::vector<int> sorted = members;
  std::sort(sorted.begin(), sorted.end());
  std::vector<AugEdge> edges;
  for (int a : sorted)
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k)
      if (s.p[k] > 0.0) edges.push_back({a, sh.succ[k], sh.stime[k]});
  return edges;
}

std::vector<double> damage_edges(double alpha, const std::vector<AugEdge>& edges,
                                 const HittingTimeVector& y) {
  std::vector<double> d(edges.size());
  for (size_t i = 0; i < edges.size(); ++i)
    d[i] = y.reachable ? alpha * (edges[i].time + y.at(edges[i].to)) : kInfinite;
  return d;
}

DamageMatrix damage_matrix(const RegularStrategy& s, const PatrollingGraph& g,
                           const BsccDecomposition& dec, Exec exec) {
  int nb = static_cast<int>(dec.bottom_ids.size());
  int nt = g.target_count();
  DamageMatrix dm;
  dm.components.resize(nb);
  for (int ci = 0; ci < nb; ++ci) {
    auto& cd = dm.components[ci];
    cd.members = dec.components[dec.bottom_ids[ci]];
    cd.edges = component_edges(s, cd.members);
    cd.damage.assign(nt, std::vector<double>(cd.edges.size(), kInfinite));
  }

  // one task per (component, target); each writes only its own damage row
  int tasks = nb * nt;
  std::string first_error;
  bool parallel = (exec == Exec::parallel);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int task = 0; task < tasks; ++task) {
    int ci = task / nt, ti = task % nt;
    try {
      auto& cd = dm.components[ci];
      HittingTimeVector y = solve_hitting(s, cd.members, g.targets[ti]);
      cd.damage[ti] = damage_edges(g.costs[ti], cd.edges, y);
    } catch (const std::exception& e) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (first_error.empty()) first_error = e.what();
    }
  }
  (void)parallel;
  if (!first_error.empty()) throw std::runtime_error(first_error);
  return dm;
}

EvaluationReport evaluate(const RegularStrategy& s, const PatrollingGraph& g, Exec exec) {
  check_strategy(s);
  if (s.shape->base_vertices != g.vertex_count())
    throw std::runtime_error("evaluate: strategy shape does not match graph");

  EvaluationReport rep;
  rep.decomposition = bottom_sccs(support_graph(s));
  DamageMatrix dm = damage_matrix(s, g, rep.decomposition, exec);

  int nb = static_cast<int>(dm.components.size());
  for (int ci = 0; ci < nb; ++ci) {
    const auto& cd = dm.components[ci];
    double worst = -kInfinite;
    for (const auto& row : cd.damage)
      for (double d : row) worst = std::max(worst, d);

    // the witness is the last (target, edge) pair tying the maximum, within
    // a relative band so FP noise in equal-by-construction damages cannot
    // flip the pick
    WitnessEntry w;
    w.component = ci;
    w.damage = worst;
    for (int ti = 0; ti < g.target_count(); ++ti)
      for (size_t ei = 0; ei < cd.edges.size(); ++ei) {
        double d = cd.damage[ti][ei];
        bool tie = is_infinite(worst) ? is_infinite(d)
                                      : (worst - d) <= 1e-9 * std::max(1.0, std::abs(worst));
        if (tie) {
          w.target_vertex = g.targets[ti];
          w.edge = cd.edges[ei];
          w.damage = d;
        }
      }
    rep.witness.push_back(w);
    if (rep.best_component < 0 || worst < rep.value) {
      rep.value = worst;
      rep.best_component = ci;
    }
  }
  rep.unambiguous = is_unambiguous(s);
  rep.val_equals_bound = rep.unambiguous;
  return rep;
}

namespace {

json finite_or_inf(double x) {
  if (is_infinite(x)) return json("inf");
  return json(x);
}

json aug_json(const StrategyShape& sh, const PatrollingGraph& g, int aug) {
  return json::array({g.vertices[sh.owner[aug]], sh.mem_of[aug]});
}

}  // namespace

std::string report_to_json(const EvaluationReport& r, const RegularStrategy& s,
                           const PatrollingGraph& g) {
  const auto& sh = *s.shape;
  json j;
  j["value"] = finite_or_inf(r.value);
  j["unambiguous"] = r.unambiguous;
  j["val_equals_bound"] = r.val_equals_bound;
  j["best_component"] = r.best_component;
  j["witness"] = json::array();
  for (const auto& w : r.witness)
    j["witness"].push_back({{"component", w.component},
                            {"target", w.target_vertex >= 0 ? json(g.vertices[w.target_vertex]) : json()},
                            {"edge", json::array({aug_json(sh, g, w.edge.from), aug_json(sh, g, w.edge.to)})},
                            {"damage", finite_or_inf(w.damage)}});
  return j.dump(2);
}

void save_report(const EvaluationReport& r, const RegularStrategy& s, const PatrollingGraph& g,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report file '" + path + "'");
  out << report_to_json(r, s, g) << "\n";
}

}  // namespace patrol
