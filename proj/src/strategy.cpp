#include "patrol/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace patrol {

using nlohmann::json;

ShapePtr build_shape(const PatrollingGraph& g, const std::vector<int>& mem) {
  if (static_cast<int>(mem.size()) != g.vertex_count())
    throw std::runtime_error("build_shape: memory map size does not match vertex count");
  for (int v = 0; v < g.vertex_count(); ++v)
    if (mem[v] < 1)
      throw std::runtime_error("build_shape: memory of '" + g.vertices[v] + "' must be >= 1");

  auto shape = std::make_shared<StrategyShape>();
  shape->base_vertices = g.vertex_count();
  shape->mem = mem;
  shape->offset.resize(g.vertex_count() + 1, 0);
  for (int v = 0; v < g.vertex_count(); ++v) shape->offset[v + 1] = shape->offset[v] + mem[v];
  shape->aug_count = shape->offset.back();
  shape->owner.resize(shape->aug_count);
  shape->mem_of.resize(shape->aug_count);
  for (int v = 0; v < g.vertex_count(); ++v)
    for (int m = 1; m <= mem[v]; ++m) {
      shape->owner[shape->offset[v] + m - 1] = v;
      shape->mem_of[shape->offset[v] + m - 1] = m;
    }

  auto out = g.out_edges();
  shape->row_offset.assign(shape->aug_count + 1, 0);
  for (int a = 0; a < shape->aug_count; ++a) {
    int width = 0;
    for (int e : out[shape->owner[a]]) width += mem[g.edges[e].to];
    shape->row_offset[a + 1] = shape->row_offset[a] + width;
  }
  shape->slot_count = shape->row_offset.back();
  shape->succ.resize(shape->slot_count);
  shape->stime.resize(shape->slot_count);
  for (int a = 0; a < shape->aug_count; ++a) {
    int k = shape->row_offset[a];
    for (int e : out[shape->owner[a]]) {
      int w = g.edges[e].to;
      for (int m = 1; m <= mem[w]; ++m) {
        shape->succ[k] = shape->aug_id(w, m);
        shape->stime[k] = g.edges[e].time;
        ++k;
      }
    }
  }
  return shape;
}

void check_strategy(const RegularStrategy& s) {
  if (!s.shape || static_cast<int>(s.p.size()) != s.shape->slot_count)
    throw std::runtime_error("strategy table size does not match its shape");
  for (int a = 0; a < s.shape->aug_count; ++a) {
    double sum = 0.0;
    for (int k = s.shape->row_offset[a]; k < s.shape->row_offset[a + 1]; ++k) {
      if (s.p[k] < 0.0 || s.p[k] > 1.0)
        throw std::runtime_error("strategy row " + std::to_string(a) + " has entry outside [0,1]");
      sum += s.p[k];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::runtime_error("strategy row " + std::to_string(a) + " sums to " + std::to_string(sum));
  }
}

CoefficientMatrix random_init(const ShapePtr& shape, std::mt19937_64& rng) {
  CoefficientMatrix theta{shape, std::vector<double>(shape->slot_count)};
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& x : theta.value) x = gauss(rng);
  return theta;
}

RegularStrategy softmax(const CoefficientMatrix& theta) {
  const auto& sh = *theta.shape;
  RegularStrategy s{theta.shape, std::vector<double>(sh.slot_count)};
  for (int a = 0; a < sh.aug_count; ++a) {
    int lo = sh.row_offset[a], hi = sh.row_offset[a + 1];
    double mx = theta.value[lo];
    for (int k = lo + 1; k < hi; ++k) mx = std::max(mx, theta.value[k]);
    double sum = 0.0;
    for (int k = lo; k < hi; ++k) {
      s.p[k] = std::exp(theta.value[k] - mx);  // shift so the largest exponent is 0
      sum += s.p[k];
    }
    for (int k = lo; k < hi; ++k) s.p[k] /= sum;
  }
  return s;
}

namespace {

// renormalize each row of p in place; every row must keep positive mass
void renormalize(const StrategyShape& sh, std::vector<double>& p) {
  for (int a = 0; a < sh.aug_count; ++a) {
    double sum = 0.0;
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k) sum += p[k];
    if (!(sum > 0.0))
      throw std::runtime_error("strategy row " + std::to_string(a) + " lost all probability mass");
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k) p[k] /= sum;
  }
}

}  // namespace

RegularStrategy cutoff(const RegularStrategy& s, double threshold) {
  const auto& sh = *s.shape;
  RegularStrategy out{s.shape, s.p};
  for (int a = 0; a < sh.aug_count; ++a) {
    int lo = sh.row_offset[a], hi = sh.row_offset[a + 1];
    int arg = lo;
    for (int k = lo + 1; k < hi; ++k)
      if (out.p[k] > out.p[arg]) arg = k;  // strict: ties keep the lowest slot
    for (int k = lo; k < hi; ++k)
      if (k != arg && out.p[k] < threshold) out.p[k] = 0.0;
  }
  renormalize(sh, out.p);
  return out;
}

RegularStrategy round_endpoints(const RegularStrategy& s, double threshold) {
  RegularStrategy out{s.shape, s.p};
  for (double& x : out.p) {
    if (x <= threshold) x = 0.0;
    else if (x >= 1.0 - threshold) x = 1.0;
  }
  renormalize(*s.shape, out.p);
  return out;
}

double mean_entropy(const RegularStrategy& s) {
  const auto& sh = *s.shape;
  double total = 0.0;
  for (int a = 0; a < sh.aug_count; ++a)
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k)
      if (s.p[k] > 0.0) total -= s.p[k] * std::log(s.p[k]);
  return total / sh.aug_count;
}

AugmentedGraph support_graph(const RegularStrategy& s) {
  const auto& sh = *s.shape;
  AugmentedGraph g{s.shape, std::vector<std::vector<int>>(sh.aug_count)};
  for (int a = 0; a < sh.aug_count; ++a)
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k)
      if (s.p[k] > 0.0) g.adj[a].push_back(sh.succ[k]);
  return g;
}

bool is_unambiguous(const RegularStrategy& s) {
  const auto& sh = *s.shape;
  for (int a = 0; a < sh.aug_count; ++a) {
    int prev_base = -1;
    bool prev_positive = false;
    // slots of a row are grouped by base successor, so a duplicate base move
    // with positive mass shows up as two positives in one group
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k) {
      int base = sh.owner[sh.succ[k]];
      if (base != prev_base) {
        prev_base = base;
        prev_positive = false;
      }
      if (s.p[k] > 0.0) {
        if (prev_positive) return false;
        prev_positive = true;
      }
    }
  }
  return true;
}

RegularStrategy load_strategy(const std::string& path, const PatrollingGraph& g) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open strategy file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("strategy file '" + path + "': " + e.what());
  }
  if (!j.contains("memory") || !j.contains("rows"))
    throw std::runtime_error("strategy file '" + path + "': missing field \"memory\" or \"rows\"");

  std::vector<int> mem(g.vertex_count(), 1);
  for (auto it = j["memory"].begin(); it != j["memory"].end(); ++it) {
    int v = g.vertex_id(it.key());
    if (v < 0) throw std::runtime_error("strategy file '" + path + "': memory names unknown vertex '" + it.key() + "'");
    mem[v] = it.value().get<int>();
    if (mem[v] < 1) throw std::runtime_error("strategy file '" + path + "': memory of '" + it.key() + "' must be >= 1");
  }
  ShapePtr shape = build_shape(g, mem);
  RegularStrategy s{shape, std::vector<double>(shape->slot_count, 0.0)};

  for (const auto& row : j["rows"]) {
    if (!row.contains("from") || !row.contains("to") || !row.contains("p"))
      throw std::runtime_error("strategy file '" + path + "': row missing \"from\", \"to\" or \"p\"");
    auto read_av = [&](const json& av, const char* which) {
      if (!av.is_array() || av.size() != 2)
        throw std::runtime_error("strategy file '" + path + "': \"" + which + "\" must be [vertex, memory]");
      int v = g.vertex_id(av[0].get<std::string>());
      if (v < 0)
        throw std::runtime_error("strategy file '" + path + "': unknown vertex '" + av[0].get<std::string>() + "'");
      int m = av[1].get<int>();
      if (m < 1 || m > mem[v])
        throw std::runtime_error("strategy file '" + path + "': memory " + std::to_string(m) +
                                 " out of range for vertex '" + g.vertices[v] + "'");
      return shape->aug_id(v, m);
    };
    int a = read_av(row["from"], "from");
    int b = read_av(row["to"], "to");
    double p = row["p"].get<double>();
    if (!(p >= 0.0 && p <= 1.0))
      throw std::runtime_error("strategy file '" + path + "': probability " + std::to_string(p) + " outside [0,1]");
    int slot = -1;
    for (int k = shape->row_offset[a]; k < shape->row_offset[a + 1]; ++k)
      if (shape->succ[k] == b) { slot = k; break; }
    if (slot < 0)
      throw std::runtime_error("strategy file '" + path + "': row uses edge " + g.vertices[shape->owner[a]] +
                               " -> " + g.vertices[shape->owner[b]] + " which is not in the graph");
    if (s.p[slot] != 0.0)
      throw std::runtime_error("strategy file '" + path + "': duplicate row for one augmented edge");
    s.p[slot] = p;
  }

  for (int a = 0; a < shape->aug_count; ++a) {
    double sum = 0.0;
    for (int k = shape->row_offset[a]; k < shape->row_offset[a + 1]; ++k) sum += s.p[k];
    if (std::abs(sum - 1.0) > 1e-9) {
      std::ostringstream msg;
      msg << "strategy file '" << path << "': row for (" << g.vertices[shape->owner[a]] << ", "
          << shape->mem_of[a] << ") sums to " << sum;
      throw std::runtime_error(msg.str());
    }
    for (int k = shape->row_offset[a]; k < shape->row_offset[a + 1]; ++k) s.p[k] /= sum;
  }
  return s;
}

void save_strategy(const RegularStrategy& s, const PatrollingGraph& g, const std::string& path) {
  const auto& sh = *s.shape;
  if (sh.base_vertices != g.vertex_count())
    throw std::runtime_error("save_strategy: strategy shape does not match graph");
  json j;
  j["memory"] = json::object();
  for (int v = 0; v < g.vertex_count(); ++v) j["memory"][g.vertices[v]] = sh.mem[v];
  j["rows"] = json::array();
  for (int a = 0; a < sh.aug_count; ++a)
    for (int k = sh.row_offset[a]; k < sh.row_offset[a + 1]; ++k) {
      if (s.p[k] <= 0.0) continue;  // zero entries stay implicit
      int b = sh.succ[k];
      j["rows"].push_back({{"from", {g.vertices[sh.owner[a]], sh.mem_of[a]}},
                           {"to", {g.vertices[sh.owner[b]], sh.mem_of[b]}},
                           {"p", s.p[k]}});
    }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write strategy file '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace patrol
