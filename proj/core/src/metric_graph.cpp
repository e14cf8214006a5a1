#include "metricgraph/metric_graph.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace mg {
namespace {

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<std::size_t> parent;
};

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

}  // namespace

MetricGraph::MetricGraph(std::vector<VertexSpec> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
  if (vertices_.empty()) throw DomainError("metric graph needs at least one vertex");
  std::set<std::string, std::less<>> names;
  for (const auto& v : vertices_) {
    if (v.name.empty()) throw DomainError("empty vertex name");
    if (!names.insert(v.name).second) throw DomainError("duplicate vertex name '" + v.name + "'");
  }
  names.clear();
  adjacency_.assign(vertices_.size(), {});
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    Edge& ed = edges_[e];
    if (ed.name.empty()) throw DomainError("empty edge name");
    if (!names.insert(ed.name).second) throw DomainError("duplicate edge name '" + ed.name + "'");
    if (ed.u >= vertices_.size() || ed.v >= vertices_.size())
      throw DomainError("edge '" + ed.name + "' references an unknown vertex");
    if (ed.u == ed.v) throw DomainError("edge '" + ed.name + "' must have two different end vertices");
    bool leaf_u = vertices_[ed.u].infinite_leaf;
    bool leaf_v = vertices_[ed.v].infinite_leaf;
    if (leaf_u && leaf_v) throw DomainError("edge '" + ed.name + "' joins two infinite leaves");
    if (ed.length.is_infinite() != (leaf_u || leaf_v))
      throw DomainError("edge '" + ed.name + "' must be infinite iff it ends at an infinite leaf");
    if (!ed.length.is_infinite() && ed.length.value().sign() <= 0)
      throw DomainError("edge '" + ed.name + "' must have positive length");
    if (leaf_u) std::swap(ed.u, ed.v);
    adjacency_[ed.u].push_back({e, true});
    adjacency_[ed.v].push_back({e, false});
  }
  for (VertexId v = 0; v < vertices_.size(); ++v) {
    if (vertices_[v].infinite_leaf && adjacency_[v].size() != 1)
      throw DomainError("infinite leaf '" + vertices_[v].name + "' must have exactly one edge");
  }
  UnionFind uf(vertices_.size());
  std::size_t components = vertices_.size();
  for (const auto& ed : edges_) components -= uf.unite(ed.u, ed.v) ? 1 : 0;
  if (components != 1) throw DomainError("metric graph must be connected");
}

std::optional<VertexId> MetricGraph::find_vertex(std::string_view name) const {
  for (VertexId v = 0; v < vertices_.size(); ++v)
    if (vertices_[v].name == name) return v;
  return std::nullopt;
}

std::optional<EdgeId> MetricGraph::find_edge(std::string_view name) const {
  for (EdgeId e = 0; e < edges_.size(); ++e)
    if (edges_[e].name == name) return e;
  return std::nullopt;
}

Point MetricGraph::point_on_edge(EdgeId e, const Rat& offset) const {
  if (e >= edges_.size()) throw DomainError("unknown edge id");
  const Edge& ed = edges_[e];
  if (offset.sign() < 0) throw DomainError("negative offset on edge '" + ed.name + "'");
  if (offset.sign() == 0) return Point::vertex(ed.u);
  if (!ed.length.is_infinite()) {
    const Rat& l = ed.length.value();
    if (offset > l) throw DomainError("offset " + offset.str() + " beyond edge '" + ed.name + "'");
    if (offset == l) return Point::vertex(ed.v);
  }
  return Point{true, e, offset};
}

Point MetricGraph::point_from_end(EdgeId e, bool from_u, const Rat& distance) const {
  if (from_u) return point_on_edge(e, distance);
  const Edge& ed = edges_.at(e);
  if (ed.length.is_infinite()) throw DomainError("cannot measure from the infinite end");
  return point_on_edge(e, ed.length.value() - distance);
}

bool MetricGraph::contains(const Point& p) const {
  if (!p.on_edge) return p.id < vertices_.size();
  if (p.id >= edges_.size() || p.offset.sign() <= 0) return false;
  const Edge& ed = edges_[p.id];
  return ed.length.is_infinite() || p.offset < ed.length.value();
}

bool MetricGraph::in_finite_part(const Point& p) const {
  if (!contains(p)) return false;
  if (!p.on_edge) return !vertices_[p.id].infinite_leaf;
  return !edges_[p.id].length.is_infinite();
}

void MetricGraph::require(const Point& p) const {
  if (!contains(p)) throw DomainError("point is not on the graph");
}

std::size_t MetricGraph::valence(const Point& p) const {
  require(p);
  return p.on_edge ? 2 : adjacency_[p.id].size();
}

std::vector<TangentDirection> MetricGraph::tangent_directions(const Point& p) const {
  require(p);
  std::vector<TangentDirection> out;
  if (p.on_edge) {
    out.push_back({p, p.id, false});
    out.push_back({p, p.id, true});
  } else {
    for (const auto& inc : adjacency_[p.id]) out.push_back({p, inc.edge, inc.at_u});
  }
  return out;
}

int MetricGraph::genus() const {
  return static_cast<int>(edges_.size()) - static_cast<int>(vertices_.size()) + 1;
}

bool MetricGraph::has_infinite_edges() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.length.is_infinite(); });
}

Rat MetricGraph::finite_length() const {
  Rat total{0};
  for (const auto& e : edges_)
    if (!e.length.is_infinite()) total += e.length.value();
  return total;
}

std::optional<Rat> MetricGraph::distance(const Point& a, const Point& b) const {
  require(a);
  require(b);
  if (!in_finite_part(a) || !in_finite_part(b)) return std::nullopt;
  std::vector<std::optional<Rat>> dist(vertices_.size());
  using Item = std::pair<Rat, VertexId>;
  auto cmp = [](const Item& x, const Item& y) { return x.first > y.first; };
  std::priority_queue<Item, std::vector<Item>, decltype(cmp)> pq(cmp);
  auto relax = [&](VertexId v, const Rat& d) {
    if (!dist[v] || d < *dist[v]) {
      dist[v] = d;
      pq.push({d, v});
    }
  };
  if (a.on_edge) {
    const Edge& ed = edges_[a.id];
    relax(ed.u, a.offset);
    relax(ed.v, ed.length.value() - a.offset);
  } else {
    relax(a.id, Rat{0});
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d != *dist[v]) continue;
    for (const auto& inc : adjacency_[v]) {
      const Edge& ed = edges_[inc.edge];
      if (ed.length.is_infinite()) continue;
      relax(inc.at_u ? ed.v : ed.u, d + ed.length.value());
    }
  }
  if (!b.on_edge) return dist[b.id];
  const Edge& ed = edges_[b.id];
  Rat best = *dist[ed.u] + b.offset;
  best = min(best, *dist[ed.v] + (ed.length.value() - b.offset));
  if (a.on_edge && a.id == b.id) best = min(best, abs(a.offset - b.offset));
  return best;
}

std::string MetricGraph::describe(const Point& p) const {
  if (!p.on_edge) return vertices_.at(p.id).name;
  return edges_.at(p.id).name + "@" + p.offset.str();
}

bool MetricGraph::vertex_specs_equal(const MetricGraph& o) const {
  if (vertices_.size() != o.vertices_.size()) return false;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].name != o.vertices_[i].name || vertices_[i].infinite_leaf != o.vertices_[i].infinite_leaf)
      return false;
  return true;
}

bool MetricGraph::edges_equal(const MetricGraph& o) const {
  if (edges_.size() != o.edges_.size()) return false;
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& x = edges_[i];
    const Edge& y = o.edges_[i];
    if (x.name != y.name || x.u != y.u || x.v != y.v || !(x.length == y.length)) return false;
  }
  return true;
}

Point PointMap::operator()(const Point& p) const {
  if (!p.on_edge) {
    if (p.id >= vertex_map_.size() || vertex_map_[p.id] == kNone)
      throw DomainError("point has no image under the relabelling");
    return Point::vertex(vertex_map_[p.id]);
  }
  if (p.id >= edge_pieces_.size() || edge_pieces_[p.id].empty())
    throw DomainError("point has no image under the relabelling");
  for (const auto& [off, v] : cut_vertices_[p.id])
    if (off == p.offset) return Point::vertex(v);
  const auto& pieces = edge_pieces_[p.id];
  auto it = std::upper_bound(pieces.begin(), pieces.end(), p.offset,
                             [](const Rat& t, const Piece& pc) { return t < pc.start; });
  --it;
  return Point{true, it->edge, p.offset - it->start};
}

struct RefineAccess {
  static PointMap make(std::vector<VertexId> vmap, std::vector<std::vector<PointMap::Piece>> pieces,
                       std::vector<std::vector<std::pair<Rat, VertexId>>> cuts) {
    PointMap m;
    m.vertex_map_ = std::move(vmap);
    m.edge_pieces_ = std::move(pieces);
    m.cut_vertices_ = std::move(cuts);
    return m;
  }
  using Piece = PointMap::Piece;
};

Refinement refine(const MetricGraph& g, std::span<const Point> points, std::span<const std::string> names) {
  std::vector<std::map<Rat, std::string>> cuts(g.edge_count());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    g.require(p);
    if (!p.on_edge) continue;
    std::string name = i < names.size() ? names[i] : g.describe(p);
    cuts[p.id].emplace(p.offset, std::move(name));
  }
  std::vector<VertexSpec> vertices = g.vertices();
  std::vector<std::vector<std::pair<Rat, VertexId>>> cut_vertices(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    for (const auto& [off, name] : cuts[e]) {
      cut_vertices[e].push_back({off, vertices.size()});
      vertices.push_back({name, false});
    }
  }
  std::vector<Edge> edges;
  std::vector<std::vector<RefineAccess::Piece>> pieces(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (cuts[e].empty()) {
      pieces[e].push_back({Rat{0}, edges.size()});
      edges.push_back(ed);
      continue;
    }
    VertexId prev = ed.u;
    Rat prev_off{0};
    std::size_t k = 0;
    for (const auto& [off, v] : cut_vertices[e]) {
      pieces[e].push_back({prev_off, edges.size()});
      edges.push_back({ed.name + "_" + std::to_string(k++), prev, v, Length(off - prev_off)});
      prev = v;
      prev_off = off;
    }
    pieces[e].push_back({prev_off, edges.size()});
    Length last = ed.length.is_infinite() ? Length::infinity() : Length(ed.length.value() - prev_off);
    edges.push_back({ed.name + "_" + std::to_string(k), prev, ed.v, last});
  }
  std::vector<VertexId> vmap(g.vertex_count());
  std::iota(vmap.begin(), vmap.end(), 0);
  return Refinement{MetricGraph(std::move(vertices), std::move(edges)),
                    RefineAccess::make(std::move(vmap), std::move(pieces), std::move(cut_vertices))};
}

Refinement retract(const MetricGraph& g) {
  std::vector<VertexId> vmap(g.vertex_count(), kNone);
  std::vector<VertexSpec> vertices;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.is_infinite_leaf(v)) continue;
    vmap[v] = vertices.size();
    vertices.push_back(g.vertices()[v]);
  }
  std::vector<Edge> edges;
  std::vector<std::vector<RefineAccess::Piece>> pieces(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.length.is_infinite()) continue;
    pieces[e].push_back({Rat{0}, edges.size()});
    edges.push_back({ed.name, vmap[ed.u], vmap[ed.v], ed.length});
  }
  std::vector<std::vector<std::pair<Rat, VertexId>>> cuts(g.edge_count());
  return Refinement{MetricGraph(std::move(vertices), std::move(edges)),
                    RefineAccess::make(std::move(vmap), std::move(pieces), std::move(cuts))};
}

bool is_loop_subgraph(const MetricGraph& g, std::span<const EdgeId> edges) {
  if (edges.empty()) return false;
  std::set<EdgeId> unique(edges.begin(), edges.end());
  std::vector<int> degree(g.vertex_count(), 0);
  UnionFind uf(g.vertex_count());
  for (EdgeId e : unique) {
    const Edge& ed = g.edge(e);
    ++degree[ed.u];
    ++degree[ed.v];
    uf.unite(ed.u, ed.v);
  }
  std::optional<std::size_t> root;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (degree[v] == 0) continue;
    if (degree[v] != 2) return false;
    if (!root) root = uf.find(v);
    if (uf.find(v) != *root) return false;
  }
  return true;
}

std::vector<bool> bridges(const MetricGraph& g) {
  std::vector<bool> is_bridge(g.edge_count(), false);
  std::vector<int> order(g.vertex_count(), -1), low(g.vertex_count(), 0);
  int counter = 0;
  // Iterative DFS; the parent edge id (not the parent vertex) is skipped so
  // that parallel edges are never bridges.
  struct Frame {
    VertexId v;
    EdgeId parent_edge;
    std::size_t next;
  };
  for (VertexId root = 0; root < g.vertex_count(); ++root) {
    if (order[root] >= 0) continue;
    std::vector<Frame> stack{{root, kNone, 0}};
    order[root] = low[root] = counter++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto inc = g.incident(f.v);
      if (f.next < inc.size()) {
        const Incidence& in = inc[f.next++];
        if (in.edge == f.parent_edge) continue;
        const Edge& ed = g.edge(in.edge);
        VertexId w = in.at_u ? ed.v : ed.u;
        if (order[w] < 0) {
          order[w] = low[w] = counter++;
          stack.push_back({w, in.edge, 0});
        } else {
          low[f.v] = std::min(low[f.v], order[w]);
        }
      } else {
        Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          VertexId parent = stack.back().v;
          low[parent] = std::min(low[parent], low[done.v]);
          if (low[done.v] > order[parent]) is_bridge[done.parent_edge] = true;
        }
      }
    }
  }
  return is_bridge;
}

}  // namespace mg
