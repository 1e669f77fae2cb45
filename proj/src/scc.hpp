#pragma once

#include <algorithm>
#include <utility>
#include <vector>

namespace patrol::detail {

// Iterative Tarjan; fills comp[v] with a component id and returns the count.
// Ids come out in reverse topological order, callers re-sort as needed.
inline int tarjan_scc(const std::vector<std::vector<int>>& adj, std::vector<int>& comp) {
  int n = static_cast<int>(adj.size());
  comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), stack;
  std::vector<char> on_stack(n, 0);
  int next_index = 0, ncomp = 0;

  std::vector<std::pair<int, size_t>> call;  // (vertex, next adjacency slot)
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      auto& [v, pi] = call.back();
      if (pi == 0) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      bool descended = false;
      while (pi < adj[v].size()) {
        int w = adj[v][pi++];
        if (index[w] < 0) {
          call.push_back({w, 0});  // invalidates v/pi, break immediately
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
          if (w == v) break;
        }
        ++ncomp;
      }
      int child = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[child]);
    }
  }
  return ncomp;
}

}  // namespace patrol::detail
