#pragma once

// Brute-force Baker-Norine rank on a finite multigraph. Used as an
// independent reference for the metric implementation: integer-length
// metric graphs are subdivided into unit edges, where the discrete rank
// equals the metric rank.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "metricgraph/divisor.hpp"

namespace oracle {

struct Multigraph {
  std::vector<std::vector<int>> adj;  // neighbour list with repetition
  int size() const { return static_cast<int>(adj.size()); }
  int degree(int v) const { return static_cast<int>(adj[v].size()); }
};

using Chips = std::vector<long long>;

// Borrowing by an indebted vertex is a sandpile toppling of (deg - 1 - D),
// so the loop stops once every vertex other than q is out of debt.
inline void clear_debt(const Multigraph& g, Chips& d, int q) {
  bool again = true;
  while (again) {
    again = false;
    for (int v = 0; v < g.size(); ++v) {
      if (v == q || d[v] >= 0) continue;
      long long times = (-d[v] + g.degree(v) - 1) / g.degree(v);
      d[v] += times * g.degree(v);
      for (int w : g.adj[v]) d[w] -= times;
      again = true;
    }
  }
}

// Vertices left unburnt by Dhar's algorithm started at q.
inline std::vector<char> unburnt(const Multigraph& g, const Chips& d, int q) {
  std::vector<char> burnt(g.size(), 0);
  std::vector<int> hits(g.size(), 0);
  std::vector<int> stack = {q};
  burnt[q] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : g.adj[v]) {
      if (burnt[w]) continue;
      if (++hits[w] > d[w]) {
        burnt[w] = 1;
        stack.push_back(w);
      }
    }
  }
  for (auto& b : burnt) b = !b;
  return burnt;
}

inline Chips reduce(const Multigraph& g, Chips d, int q) {
  clear_debt(g, d, q);
  for (;;) {
    std::vector<char> rest = unburnt(g, d, q);
    if (std::none_of(rest.begin(), rest.end(), [](char c) { return c != 0; })) return d;
    for (int v = 0; v < g.size(); ++v) {
      if (!rest[v]) continue;
      for (int w : g.adj[v])
        if (!rest[w]) {
          --d[v];
          ++d[w];
        }
    }
  }
}

inline bool has_effective(const Multigraph& g, const Chips& d) {
  long long deg = 0;
  for (long long c : d) deg += c;
  if (deg < 0) return false;
  return reduce(g, d, 0)[0] >= 0;
}

inline bool rank_at_least(const Multigraph& g, const Chips& d, int r) {
  if (r < 0) return true;
  std::vector<int> e(static_cast<std::size_t>(r), 0);
  std::function<bool(int, int)> walk = [&](int pos, int start) {
    if (pos == r) {
      Chips x = d;
      for (int v : e) --x[v];
      return has_effective(g, x);
    }
    for (int v = start; v < g.size(); ++v) {
      e[pos] = v;
      if (!walk(pos + 1, v)) return false;
    }
    return true;
  };
  return walk(0, 0);
}

inline int rank(const Multigraph& g, const Chips& d) {
  if (!has_effective(g, d)) return -1;
  int r = 0;
  long long deg = 0;
  for (long long c : d) deg += c;
  while (r < deg && rank_at_least(g, d, r + 1)) ++r;
  return r;
}

// Unit subdivision of a metric graph whose finite edges have integer
// lengths after scaling by `scale`. Infinite edges are dropped.
struct Subdivision {
  Multigraph graph;
  std::map<mg::Point, int> index;  // lattice point -> vertex
  mg::Rat scale{1};
  const mg::MetricGraph* source = nullptr;

  int vertex_of(const mg::Point& p) const {
    auto it = index.find(p);
    if (it == index.end()) throw std::invalid_argument("point is not on the lattice");
    return it->second;
  }
  Chips chips(const mg::Divisor& d) const {
    Chips c(graph.adj.size(), 0);
    for (const auto& [p, k] : d.terms()) c[vertex_of(p)] += k;
    return c;
  }
};

inline Subdivision subdivide(const mg::MetricGraph& g, mg::Rat scale = mg::Rat{1}) {
  Subdivision s;
  s.scale = scale;
  s.source = &g;
  std::vector<int> vid(g.vertex_count(), -1);
  int next = 0;
  for (mg::VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.is_infinite_leaf(v)) continue;
    vid[v] = next++;
    s.index[mg::Point::vertex(v)] = vid[v];
  }
  s.graph.adj.assign(static_cast<std::size_t>(next), {});
  auto link = [&](int a, int b) {
    s.graph.adj[a].push_back(b);
    s.graph.adj[b].push_back(a);
  };
  for (mg::EdgeId e = 0; e < g.edge_count(); ++e) {
    const mg::Edge& ed = g.edge(e);
    if (ed.length.is_infinite()) continue;
    mg::Rat units = ed.length.value() * scale;
    if (!units.is_integer()) throw std::invalid_argument("edge length is not integral after scaling");
    int prev = vid[ed.u];
    for (std::int64_t k = 1; k < units.num(); ++k) {
      int v = static_cast<int>(s.graph.adj.size());
      s.graph.adj.emplace_back();
      s.index[g.point_on_edge(e, mg::Rat(k) / scale)] = v;
      link(prev, v);
      prev = v;
    }
    link(prev, vid[ed.v]);
  }
  return s;
}

}  // namespace oracle
