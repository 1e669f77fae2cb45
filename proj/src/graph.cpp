#include "patrol/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "scc.hpp"

namespace patrol {

using nlohmann::json;

int PatrollingGraph::vertex_id(const std::string& name) const {
  for (int i = 0; i < vertex_count(); ++i)
    if (vertices[i] == name) return i;
  return -1;
}

int PatrollingGraph::target_index(int v) const {
  for (int i = 0; i < target_count(); ++i)
    if (targets[i] == v) return i;
  return -1;
}

double PatrollingGraph::cost_of(int v) const {
  int i = target_index(v);
  if (i < 0) throw std::runtime_error("cost_of: vertex " + std::to_string(v) + " is not a target");
  return costs[i];
}

std::vector<std::vector<int>> PatrollingGraph::out_edges() const {
  std::vector<std::vector<int>> out(vertices.size());
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    if (edges[e].from >= 0 && edges[e].from < vertex_count()) out[edges[e].from].push_back(e);
  for (auto& lst : out)
    std::sort(lst.begin(), lst.end(),
              [&](int a, int b) { return edges[a].to < edges[b].to; });
  return out;
}

int PatrollingGraph::edge_id(int u, int v) const {
  for (int e = 0; e < static_cast<int>(edges.size()); ++e)
    if (edges[e].from == u && edges[e].to == v) return e;
  return -1;
}

ValidationReport validate(const PatrollingGraph& g) {
  ValidationReport rep;
  auto fail = [&](const std::string& rule, const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back({rule, msg});
  };

  int n = g.vertex_count();
  {
    std::set<std::string> seen;
    for (const auto& name : g.vertices)
      if (!seen.insert(name).second) fail("vertex-duplicate", "duplicate vertex name '" + name + "'");
  }
  if (g.targets.empty()) fail("targets-nonempty", "graph has no targets");
  if (g.costs.size() != g.targets.size())
    fail("target-cost-arity", "targets and costs differ in length");
  std::set<int> tseen;
  for (size_t i = 0; i < g.targets.size(); ++i) {
    int t = g.targets[i];
    if (t < 0 || t >= n) {
      fail("target-unknown", "target index " + std::to_string(t) + " out of range");
      continue;
    }
    if (!tseen.insert(t).second) fail("target-duplicate", "target '" + g.vertices[t] + "' listed twice");
    if (i < g.costs.size() && !(g.costs[i] > 0.0 && std::isfinite(g.costs[i])))
      fail("cost-positive", "target '" + g.vertices[t] + "' has non-positive cost");
  }
  std::set<std::pair<int, int>> eseen;
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      fail("edge-endpoint-unknown", "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) + ") out of range");
      continue;
    }
    if (e.time < 1)
      fail("time-positive", "edge " + g.vertices[e.from] + " -> " + g.vertices[e.to] +
                                " has traversal time " + std::to_string(e.time) + " (must be >= 1)");
    if (!eseen.insert({e.from, e.to}).second)
      fail("edge-duplicate", "duplicate edge " + g.vertices[e.from] + " -> " + g.vertices[e.to]);
  }
  if (!rep.ok) return rep;  // index errors above make the reachability check meaningless

  std::vector<std::vector<int>> adj(n);
  for (const auto& e : g.edges) adj[e.from].push_back(e.to);
  for (int v = 0; v < n; ++v)
    if (adj[v].empty())
      fail("strongly-connected", "vertex '" + g.vertices[v] + "' has no outgoing edge; graph is not strongly connected");
  if (rep.ok && n > 0) {
    std::vector<int> comp;
    int ncomp = detail::tarjan_scc(adj, comp);
    if (ncomp > 1)
      fail("strongly-connected", "graph is not strongly connected (" + std::to_string(ncomp) + " components)");
  }
  return rep;
}

PatrollingGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("graph file '" + path + "': " + e.what());
  }
  auto need = [&](const char* field) -> const json& {
    if (!j.contains(field))
      throw std::runtime_error("graph file '" + path + "': missing field \"" + field + "\"");
    return j.at(field);
  };

  PatrollingGraph g;
  for (const auto& v : need("vertices")) g.vertices.push_back(v.get<std::string>());
  for (const auto& t : need("targets")) {
    if (!t.contains("vertex") || !t.contains("cost"))
      throw std::runtime_error("graph file '" + path + "': target entry missing \"vertex\" or \"cost\"");
    std::string name = t.at("vertex").get<std::string>();
    int id = g.vertex_id(name);
    if (id < 0) throw std::runtime_error("graph file '" + path + "': target vertex '" + name + "' not in vertices");
    g.targets.push_back(id);
    g.costs.push_back(t.at("cost").get<double>());
  }
  for (const auto& e : need("edges")) {
    if (!e.contains("from") || !e.contains("to") || !e.contains("time"))
      throw std::runtime_error("graph file '" + path + "': edge entry missing \"from\", \"to\" or \"time\"");
    std::string fn = e.at("from").get<std::string>(), tn = e.at("to").get<std::string>();
    int u = g.vertex_id(fn), v = g.vertex_id(tn);
    if (u < 0) throw std::runtime_error("graph file '" + path + "': edge endpoint '" + fn + "' not in vertices");
    if (v < 0) throw std::runtime_error("graph file '" + path + "': edge endpoint '" + tn + "' not in vertices");
    const auto& tj = e.at("time");
    if (!tj.is_number_integer())
      throw std::runtime_error("graph file '" + path + "': edge " + fn + " -> " + tn + " has non-integer time");
    g.edges.push_back({u, v, tj.get<int>()});
  }

  ValidationReport rep = validate(g);
  if (!rep.ok) {
    std::ostringstream msg;
    msg << "graph file '" << path << "' failed validation:";
    for (const auto& v : rep.violations) msg << "\n  [" << v.rule << "] " << v.message;
    throw std::runtime_error(msg.str());
  }
  return g;
}

void save_graph(const PatrollingGraph& g, const std::string& path) {
  json j;
  j["vertices"] = g.vertices;
  j["targets"] = json::array();
  for (size_t i = 0; i < g.targets.size(); ++i)
    j["targets"].push_back({{"vertex", g.vertices[g.targets[i]]}, {"cost", g.costs[i]}});
  j["edges"] = json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"from", g.vertices[e.from]}, {"to", g.vertices[e.to]}, {"time", e.time}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file '" + path + "'");
  out << j.dump(2) << "\n";
}

PatrollingGraph gen_grid(int n, unsigned long long seed) {
  if (n < 2) throw std::runtime_error("gen_grid: n must be >= 2");
  std::mt19937_64 rng(seed);

  // sample n distinct cells from the n x n grid
  long long total = static_cast<long long>(n) * n;
  std::vector<long long> cells;
  {
    std::set<long long> chosen;
    std::uniform_int_distribution<long long> pick(0, total - 1);
    while (static_cast<int>(chosen.size()) < n) chosen.insert(pick(rng));
    cells.assign(chosen.begin(), chosen.end());
    // shuffle so target selection is not biased toward low cell ids
    for (size_t i = cells.size(); i > 1; --i) {
      std::uniform_int_distribution<size_t> d(0, i - 1);
      std::swap(cells[i - 1], cells[d(rng)]);
    }
  }

  PatrollingGraph g;
  std::vector<std::pair<int, int>> rc(n);
  for (int i = 0; i < n; ++i) {
    rc[i] = {static_cast<int>(cells[i] / n), static_cast<int>(cells[i] % n)};
    g.vertices.push_back("v" + std::to_string(rc[i].first) + "_" + std::to_string(rc[i].second));
  }
  int ntargets = (n + 1) / 2;
  for (int i = 0; i < ntargets; ++i) {
    g.targets.push_back(i);
    g.costs.push_back(1.0);
  }

  // grid hop distance = Manhattan distance (the grid itself has no holes)
  auto dist = [&](int a, int b) {
    return std::abs(rc[a].first - rc[b].first) + std::abs(rc[a].second - rc[b].second);
  };

  // complete directed graph, then drop (u,v) whenever some w relays it at
  // least as fast; the shortest outgoing edge of each vertex always survives,
  // so the pruned graph stays strongly connected
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) {
      if (u == v) continue;
      int duv = dist(u, v);
      bool dominated = false;
      for (int w = 0; w < n && !dominated; ++w)
        if (w != u && w != v && dist(u, w) + dist(w, v) <= duv) dominated = true;
      if (!dominated) g.edges.push_back({u, v, duv});
    }
  return g;
}

PatrollingGraph gen_airport(const std::vector<int>& gate_counts) {
  if (gate_counts.empty()) throw std::runtime_error("gen_airport: need at least one terminal");
  for (int c : gate_counts)
    if (c < 2 || c % 2 != 0)
      throw std::runtime_error("gen_airport: every terminal gate count must be even and >= 2 (got " +
                               std::to_string(c) + ")");

  PatrollingGraph g;
  g.vertices.push_back("C");
  auto biedge = [&](int u, int v) {
    g.edges.push_back({u, v, 1});
    g.edges.push_back({v, u, 1});
  };
  for (size_t t = 0; t < gate_counts.size(); ++t) {
    int halls = gate_counts[t] / 2;  // one hall per gate pair
    int prev = 0;                    // chain grows outward from C
    for (int h = 1; h <= halls; ++h) {
      std::string base = "T" + std::to_string(t + 1) + "H" + std::to_string(h);
      int hall = g.vertex_count();
      g.vertices.push_back(base);
      biedge(prev, hall);
      for (int k = 1; k <= 2; ++k) {
        int gate = g.vertex_count();
        g.vertices.push_back(base + "G" + std::to_string(k));
        g.targets.push_back(gate);
        g.costs.push_back(1.0);
        biedge(hall, gate);
      }
      prev = hall;
    }
  }
  return g;
}

double airport_baseline(const PatrollingGraph& g) {
  return 2.0 * (g.vertex_count() - 1);
}

}  // namespace patrol
