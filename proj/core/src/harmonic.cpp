#include "metricgraph/harmonic.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>

#include "metricgraph/family.hpp"
#include "metricgraph/parallel.hpp"

namespace mg {

// ---------------------------------------------------------------------------
// Morphisms

MorphismCheck check_morphism(const GraphMorphism& m) {
  MorphismCheck c;
  auto fail = [&](std::string s) {
    c.ok = false;
    c.violations.push_back(std::move(s));
  };
  if (!m.source || !m.target) {
    fail("source or target graph missing");
    return c;
  }
  const MetricGraph& s = *m.source;
  const MetricGraph& t = *m.target;
  if (m.vertex_map.size() != s.vertex_count()) fail("vertex map covers " + std::to_string(m.vertex_map.size()) + " of " + std::to_string(s.vertex_count()) + " vertices");
  if (m.edge_map.size() != s.edge_count()) fail("edge map covers " + std::to_string(m.edge_map.size()) + " of " + std::to_string(s.edge_count()) + " edges");
  if (!c.ok) return c;
  for (VertexId v = 0; v < s.vertex_count(); ++v) {
    VertexId w = m.vertex_map[v];
    if (w >= t.vertex_count()) {
      fail("vertex " + s.vertex_name(v) + " maps outside the target");
      continue;
    }
    if (s.is_infinite_leaf(v) != t.is_infinite_leaf(w))
      fail("vertex " + s.vertex_name(v) + " and its image " + t.vertex_name(w) + " differ in being infinite leaves");
  }
  if (!c.ok) return c;
  for (EdgeId e = 0; e < s.edge_count(); ++e) {
    const Edge& ed = s.edge(e);
    const EdgeImage& img = m.edge_map[e];
    if (img.collapsed) {
      if (img.dilation != 0) fail("collapsed edge " + ed.name + " must have dilation 0");
      if (img.vertex >= t.vertex_count()) {
        fail("edge " + ed.name + " collapses outside the target");
        continue;
      }
      if (ed.length.is_infinite()) fail("infinite edge " + ed.name + " cannot collapse");
      if (m.vertex_map[ed.u] != img.vertex || m.vertex_map[ed.v] != img.vertex)
        fail("collapsed edge " + ed.name + " has ends not mapped to " + t.vertex_name(img.vertex));
      continue;
    }
    if (img.dilation < 1) fail("edge " + ed.name + " maps onto an edge with dilation " + std::to_string(img.dilation));
    if (img.edge >= t.edge_count()) {
      fail("edge " + ed.name + " maps outside the target");
      continue;
    }
    const Edge& f = t.edge(img.edge);
    VertexId fu = img.forward ? f.u : f.v;
    VertexId fv = img.forward ? f.v : f.u;
    if (m.vertex_map[ed.u] != fu || m.vertex_map[ed.v] != fv)
      fail("ends of " + ed.name + " do not map to the ends of " + f.name);
    if (ed.length.is_infinite() != f.length.is_infinite()) {
      fail("edge " + ed.name + " and its image " + f.name + " differ in being infinite");
    } else if (!ed.length.is_infinite() && f.length.value() != ed.length.value() * Rat{img.dilation}) {
      fail("length of " + f.name + " is " + f.length.str() + " but " + std::to_string(img.dilation) + " * l(" + ed.name +
           ") = " + (ed.length.value() * Rat{img.dilation}).str());
    }
  }
  return c;
}

bool is_morphism(const GraphMorphism& m) { return check_morphism(m).ok; }

bool is_finite(const GraphMorphism& m) {
  return std::all_of(m.edge_map.begin(), m.edge_map.end(), [](const EdgeImage& i) { return !i.collapsed && i.dilation > 0; });
}

namespace {

/// Target direction reached from a source direction along a non-collapsed edge.
std::pair<EdgeId, bool> image_direction(const EdgeImage& img, bool source_at_u) {
  return {img.edge, source_at_u == img.forward};
}

}  // namespace

HarmonicCertificate check_harmonic(const GraphMorphism& m) {
  HarmonicCertificate cert;
  MorphismCheck mc = check_morphism(m);
  if (!mc.ok) {
    cert.violation = "not a morphism: " + mc.violations.front();
    return cert;
  }
  const MetricGraph& s = *m.source;
  const MetricGraph& t = *m.target;
  cert.local_degree.assign(s.vertex_count(), 0);
  for (VertexId p = 0; p < s.vertex_count(); ++p) {
    VertexId img = m.vertex_map[p];
    std::map<std::pair<EdgeId, bool>, int> sums;
    for (const Incidence& inc : t.incident(img)) sums[{inc.edge, inc.at_u}] = 0;
    for (const Incidence& inc : s.incident(p)) {
      const EdgeImage& ei = m.edge_map[inc.edge];
      if (ei.collapsed) continue;
      sums[image_direction(ei, inc.at_u)] += ei.dilation;
    }
    std::set<int> values;
    for (const auto& [dir, sum] : sums) {
      cert.table.push_back({p, dir.first, dir.second, sum});
      values.insert(sum);
    }
    if (values.size() > 1 && cert.violation.empty()) {
      std::string detail;
      for (const auto& [dir, sum] : sums)
        detail += (detail.empty() ? "" : ", ") + t.edge(dir.first).name + (dir.second ? "+" : "-") + "=" + std::to_string(sum);
      cert.violation = "not harmonic at " + s.vertex_name(p) + ": direction sums " + detail;
    }
    cert.local_degree[p] = values.empty() ? 0 : *values.begin();
  }
  if (!cert.violation.empty()) return cert;

  std::vector<int> edge_fiber(t.edge_count(), 0);
  for (EdgeId e = 0; e < s.edge_count(); ++e)
    if (!m.edge_map[e].collapsed) edge_fiber[m.edge_map[e].edge] += m.edge_map[e].dilation;
  std::vector<int> vertex_fiber(t.vertex_count(), 0);
  std::vector<char> vertex_hit(t.vertex_count(), 0);
  for (VertexId p = 0; p < s.vertex_count(); ++p) {
    vertex_fiber[m.vertex_map[p]] += cert.local_degree[p];
    vertex_hit[m.vertex_map[p]] = 1;
  }
  for (EdgeId f = 0; f < t.edge_count(); ++f)
    if (edge_fiber[f] == 0) {
      cert.violation = "not surjective: " + t.edge(f).name + " has no preimage";
      return cert;
    }
  for (VertexId w = 0; w < t.vertex_count(); ++w)
    if (!vertex_hit[w]) {
      cert.violation = "not surjective: " + t.vertex_name(w) + " has no preimage";
      return cert;
    }
  int degree = t.edge_count() > 0 ? edge_fiber[0] : vertex_fiber[0];
  for (EdgeId f = 0; f < t.edge_count(); ++f)
    if (edge_fiber[f] != degree) {
      cert.violation = "fiber degree over " + t.edge(f).name + " is " + std::to_string(edge_fiber[f]) + ", expected " +
                       std::to_string(degree);
      return cert;
    }
  for (VertexId w = 0; w < t.vertex_count(); ++w)
    if (vertex_fiber[w] != degree) {
      cert.violation = "fiber degree over " + t.vertex_name(w) + " is " + std::to_string(vertex_fiber[w]) +
                       ", expected " + std::to_string(degree);
      return cert;
    }
  cert.harmonic = true;
  cert.degree = degree;
  return cert;
}

bool is_harmonic(const GraphMorphism& m) { return check_harmonic(m).harmonic; }

int fiber_degree(const GraphMorphism& m, const Point& target_point) {
  m.target->require(target_point);
  const MetricGraph& s = *m.source;
  if (target_point.on_edge) {
    int sum = 0;
    for (EdgeId e = 0; e < s.edge_count(); ++e)
      if (!m.edge_map[e].collapsed && m.edge_map[e].edge == target_point.id) sum += m.edge_map[e].dilation;
    return sum;
  }
  HarmonicCertificate cert = check_harmonic(m);
  if (!cert.harmonic) throw DomainError("local degrees need a harmonic morphism: " + cert.violation);
  int sum = 0;
  for (VertexId p = 0; p < s.vertex_count(); ++p)
    if (m.vertex_map[p] == target_point.id) sum += cert.local_degree[p];
  return sum;
}

GraphMorphism compose(const GraphMorphism& first, const GraphMorphism& second) {
  if (!(first.target == second.source || *first.target == *second.source))
    throw DomainError("cannot compose: target of the first map is not the source of the second");
  GraphMorphism out{first.source, second.target, {}, {}};
  for (VertexId v : first.vertex_map) out.vertex_map.push_back(second.vertex_map.at(v));
  for (const EdgeImage& a : first.edge_map) {
    if (a.collapsed) {
      out.edge_map.push_back(EdgeImage::collapse(second.vertex_map.at(a.vertex)));
      continue;
    }
    const EdgeImage& b = second.edge_map.at(a.edge);
    if (b.collapsed) {
      out.edge_map.push_back(EdgeImage::collapse(b.vertex));
      continue;
    }
    out.edge_map.push_back(EdgeImage::onto(b.edge, a.forward == b.forward, a.dilation * b.dilation));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subtree test

namespace {

struct Components {
  explicit Components(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
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

/// Shortest cycle through target edge f (finite edges only): f plus a
/// shortest path between its ends avoiding f.
std::pair<std::set<EdgeId>, Rat> shortest_cycle_through(const MetricGraph& t, EdgeId f) {
  const Edge& fe = t.edge(f);
  std::vector<std::optional<Rat>> dist(t.vertex_count());
  std::vector<std::optional<EdgeId>> via(t.vertex_count());
  using Item = std::pair<Rat, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[fe.v] = Rat{0};
  pq.push({Rat{0}, fe.v});
  while (!pq.empty()) {
    auto [d, x] = pq.top();
    pq.pop();
    if (d != *dist[x]) continue;
    for (const Incidence& inc : t.incident(x)) {
      if (inc.edge == f || t.edge(inc.edge).length.is_infinite()) continue;
      const Edge& ed = t.edge(inc.edge);
      VertexId y = inc.at_u ? ed.v : ed.u;
      Rat nd = d + ed.length.value();
      if (!dist[y] || nd < *dist[y]) {
        dist[y] = nd;
        via[y] = inc.edge;
        pq.push({nd, y});
      }
    }
  }
  std::set<EdgeId> cycle = {f};
  if (!dist[fe.u]) return {cycle, fe.length.value()};
  for (VertexId x = fe.u; x != fe.v;) {
    EdgeId e = *via[x];
    cycle.insert(e);
    x = t.edge(e).u == x ? t.edge(e).v : t.edge(e).u;
  }
  return {cycle, fe.length.value() + *dist[fe.u]};
}

}  // namespace

SubtreeTest subtree_into_loop_test(const GraphMorphism& m, const std::vector<EdgeId>& subtree, VertexId t) {
  MorphismCheck mc = check_morphism(m);
  if (!mc.ok) throw DomainError("not a morphism: " + mc.violations.front());
  if (!is_finite(m)) throw DomainError("morphism is not finite");
  const MetricGraph& s = *m.source;
  const MetricGraph& tg = *m.target;
  if (t >= s.vertex_count()) throw DomainError("cut point is not a source vertex");
  SubtreeTest out;
  if (subtree.empty()) {
    out.trace.push_back("subtree is the single point " + s.vertex_name(t));
    return out;
  }
  std::set<EdgeId> in_tree(subtree.begin(), subtree.end());
  std::set<VertexId> tree_vertices;
  Components tree_comp(s.vertex_count());
  for (EdgeId e : in_tree) {
    if (e >= s.edge_count()) throw DomainError("subtree edge out of range");
    const Edge& ed = s.edge(e);
    tree_vertices.insert(ed.u);
    tree_vertices.insert(ed.v);
    if (!tree_comp.unite(ed.u, ed.v)) throw DomainError("hypothesis failed: T' is not a tree (it contains a cycle)");
  }
  for (VertexId v : tree_vertices)
    if (tree_comp.find(v) != tree_comp.find(*tree_vertices.begin()))
      throw DomainError("hypothesis failed: T' is not a tree (it is disconnected)");
  if (!tree_vertices.count(t)) throw DomainError("hypothesis failed: T' does not contain t");
  std::set<VertexId> rest_vertices;
  Components rest_comp(s.vertex_count());
  for (EdgeId e = 0; e < s.edge_count(); ++e) {
    if (in_tree.count(e)) continue;
    const Edge& ed = s.edge(e);
    rest_vertices.insert(ed.u);
    rest_vertices.insert(ed.v);
    rest_comp.unite(ed.u, ed.v);
  }
  for (VertexId v : rest_vertices)
    if (rest_comp.find(v) != rest_comp.find(*rest_vertices.begin()))
      throw DomainError("hypothesis failed: the closure of the complement of T' is not connected");
  std::vector<VertexId> common;
  std::set_intersection(tree_vertices.begin(), tree_vertices.end(), rest_vertices.begin(), rest_vertices.end(),
                        std::back_inserter(common));
  if (common != std::vector<VertexId>{t})
    throw DomainError("hypothesis failed: T' meets the rest of the graph in more than the point t");

  std::vector<bool> bridge = bridges(tg);
  std::optional<EdgeId> offending;
  for (EdgeId e : in_tree)
    if (!bridge[m.edge_map[e].edge]) {
      offending = e;
      break;
    }
  if (!offending) {
    out.trace.push_back("every edge of T' maps onto a bridge of the target");
    return out;
  }
  out.holds = false;

  int degree = 0;
  {
    std::vector<int> fiber(tg.edge_count(), 0);
    for (const EdgeImage& img : m.edge_map) fiber[img.edge] += img.dilation;
    degree = *std::max_element(fiber.begin(), fiber.end());
  }
  const EdgeId f = m.edge_map[*offending].edge;
  auto [cycle, loop_length] = shortest_cycle_through(tg, f);
  const Rat bound = loop_length * Rat{degree};
  std::set<EdgeId> grown = {*offending};
  Rat length = s.edge(*offending).length.value();
  out.trace.push_back("edge " + s.edge(*offending).name + " maps into a loop through " + tg.edge(f).name +
                      " of length " + loop_length.str() + "; bound deg * l(loop) = " + bound.str());
  for (;;) {
    if (length > bound) {
      out.trace.push_back("l(T) = " + length.str() + " exceeds " + bound.str());
      return out;
    }
    std::map<VertexId, int> tree_degree;
    for (EdgeId e : grown) {
      ++tree_degree[s.edge(e).u];
      ++tree_degree[s.edge(e).v];
    }
    bool extended = false;
    for (const auto& [q, deg] : tree_degree) {
      if (deg != 1 || q == t) continue;
      EdgeId g = 0;
      bool g_at_u = true;
      for (const Incidence& inc : s.incident(q))
        if (grown.count(inc.edge)) {
          g = inc.edge;
          g_at_u = inc.at_u;
        }
      auto w = image_direction(m.edge_map[g], g_at_u);
      std::optional<std::pair<EdgeId, bool>> other;
      for (const Incidence& inc : tg.incident(m.vertex_map[q]))
        if (cycle.count(inc.edge) && std::make_pair(inc.edge, inc.at_u) != w) other = {inc.edge, inc.at_u};
      if (!other) continue;
      std::optional<EdgeId> h;
      for (const Incidence& inc : s.incident(q))
        if (inc.edge != g && !grown.count(inc.edge) && image_direction(m.edge_map[inc.edge], inc.at_u) == *other)
          h = inc.edge;
      if (!h) {
        out.trace.push_back("harmonicity fails at " + s.vertex_name(q) + ": no direction maps onto " +
                            tg.edge(other->first).name);
        return out;
      }
      if (!in_tree.count(*h)) {
        out.trace.push_back("extension at " + s.vertex_name(q) + " leaves T' through " + s.edge(*h).name);
        return out;
      }
      grown.insert(*h);
      length = length + s.edge(*h).length.value();
      out.trace.push_back("extend at " + s.vertex_name(q) + " by " + s.edge(*h).name + ": l(T) = " + length.str());
      extended = true;
      break;
    }
    if (!extended) {
      out.trace.push_back("no leaf of T other than t can be extended");
      return out;
    }
  }
}

// ---------------------------------------------------------------------------
// Degree-2 cover search

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::GenusObstruction:
      return "GENUS_OBSTRUCTION";
    case RejectReason::LengthClash:
      return "LENGTH_CLASH";
    case RejectReason::VerificationFailed:
      return "VERIFICATION_FAILED";
  }
  return "?";
}

namespace {

struct ChainEdge {
  std::size_t a = 0, b = 0;                    // essential vertex indices
  std::vector<std::pair<EdgeId, bool>> chain;  // model edges, true = traversed u -> v
  Length length;
  std::vector<Rat> cuts;  // offsets of interior model vertices from a
  bool is_loop() const { return a == b; }
};

struct EssentialModel {
  std::vector<VertexId> vertices;  // model ids
  std::vector<bool> leaf;
  std::vector<std::size_t> valence;
  std::vector<ChainEdge> edges;
};

EssentialModel essential_model(const MetricGraph& g) {
  EssentialModel em;
  std::vector<long> index(g.vertex_count(), -1);
  auto essential = [&](VertexId v) { return g.incident(v).size() != 2; };
  for (int pass = 0; pass < 2; ++pass)
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (essential(v) && g.is_infinite_leaf(v) == (pass == 1)) {
        index[v] = static_cast<long>(em.vertices.size());
        em.vertices.push_back(v);
      }
  if (em.vertices.empty()) {
    index[0] = 0;
    em.vertices.push_back(0);
  }
  for (VertexId v : em.vertices) {
    em.leaf.push_back(g.is_infinite_leaf(v));
    em.valence.push_back(g.incident(v).size());
  }
  std::vector<bool> used(g.edge_count(), false);
  for (std::size_t ai = 0; ai < em.vertices.size(); ++ai) {
    VertexId a = em.vertices[ai];
    for (const Incidence& start : g.incident(a)) {
      if (used[start.edge]) continue;
      ChainEdge ce;
      ce.a = ai;
      EdgeId e = start.edge;
      bool fwd = start.at_u;
      Rat pos{0};
      bool infinite = false;
      VertexId next = a;
      for (;;) {
        used[e] = true;
        ce.chain.push_back({e, fwd});
        const Edge& ed = g.edge(e);
        if (ed.length.is_infinite()) infinite = true;
        else pos = pos + ed.length.value();
        next = fwd ? ed.v : ed.u;
        if (index[next] >= 0) break;
        ce.cuts.push_back(pos);
        for (const Incidence& inc : g.incident(next))
          if (inc.edge != e) {
            e = inc.edge;
            fwd = inc.at_u;
            break;
          }
      }
      ce.b = static_cast<std::size_t>(index[next]);
      ce.length = infinite ? Length::infinity() : Length(pos);
      em.edges.push_back(std::move(ce));
    }
  }
  return em;
}

/// Calls fn for every involution of the essential multigraph preserving
/// valence, leaves and edge incidences (lengths are not consulted).
void for_each_involution(const EssentialModel& em, const std::function<void(const EssentialInvolution&)>& fn) {
  const std::size_t n = em.vertices.size();
  const std::size_t m = em.edges.size();
  auto key = [](std::size_t a, std::size_t b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < m; ++i) classes[key(em.edges[i].a, em.edges[i].b)].push_back(i);

  EssentialInvolution inv;
  inv.vertex.assign(n, n);
  inv.edge.assign(m, m);
  inv.reversed.assign(m, false);

  std::function<void(std::size_t)> match_edges = [&](std::size_t i) {
    while (i < m && inv.edge[i] != m) ++i;
    if (i == m) {
      fn(inv);
      return;
    }
    const ChainEdge& ce = em.edges[i];
    std::size_t pa = inv.vertex[ce.a], pb = inv.vertex[ce.b];
    auto it = classes.find(key(pa, pb));
    if (it == classes.end()) return;
    for (std::size_t j : it->second) {
      if (j != i && inv.edge[j] != m) continue;
      if (j < i) continue;
      const ChainEdge& ct = em.edges[j];
      std::vector<bool> orientations;
      if (ce.is_loop()) {
        orientations = {false, true};
      } else if (j == i) {
        orientations = {pa != ce.a};
      } else {
        orientations = {pa != ct.a};
      }
      for (bool rev : orientations) {
        inv.edge[i] = j;
        inv.edge[j] = i;
        inv.reversed[i] = rev;
        inv.reversed[j] = rev;
        match_edges(i + 1);
        inv.edge[i] = m;
        inv.edge[j] = m;
        inv.reversed[i] = false;
        inv.reversed[j] = false;
      }
    }
  };

  auto classes_compatible = [&] {
    for (const auto& [k, list] : classes) {
      auto it = classes.find(key(inv.vertex[k.first], inv.vertex[k.second]));
      if (it == classes.end() || it->second.size() != list.size()) return false;
    }
    return true;
  };

  std::function<void(std::size_t)> assign_vertices = [&](std::size_t i) {
    while (i < n && inv.vertex[i] != n) ++i;
    if (i == n) {
      if (classes_compatible()) match_edges(0);
      return;
    }
    inv.vertex[i] = i;
    assign_vertices(i + 1);
    inv.vertex[i] = n;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (inv.vertex[j] != n || em.leaf[j] != em.leaf[i] || em.valence[j] != em.valence[i]) continue;
      inv.vertex[i] = j;
      inv.vertex[j] = i;
      assign_vertices(i + 1);
      inv.vertex[i] = n;
      inv.vertex[j] = n;
    }
  };
  assign_vertices(0);
}

std::string chain_name(const MetricGraph& g, const ChainEdge& ce) { return g.edge(ce.chain.front().first).name; }

std::string describe_involution(const MetricGraph& g, const EssentialModel& em, const EssentialInvolution& inv) {
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < em.vertices.size(); ++i)
    if (inv.vertex[i] > i) parts.push_back(g.vertex_name(em.vertices[i]) + "<->" + g.vertex_name(em.vertices[inv.vertex[i]]));
  for (std::size_t i = 0; i < em.edges.size(); ++i) {
    std::size_t j = inv.edge[i];
    if (j > i) {
      parts.push_back(chain_name(g, em.edges[i]) + "<->" + chain_name(g, em.edges[j]) + (inv.reversed[i] ? " (reversed)" : ""));
    } else if (j == i && inv.reversed[i]) {
      parts.push_back(chain_name(g, em.edges[i]) + " reversed");
    }
  }
  if (parts.empty()) return "identity";
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : ", ") + p;
  return out;
}

/// Genus of the quotient after splitting every essential edge at its midpoint.
int quotient_genus(const EssentialModel& em, const EssentialInvolution& inv) {
  const std::size_t n = em.vertices.size();
  const std::size_t m = em.edges.size();
  // Vertex slots: essential vertices, then one midpoint per essential edge.
  Components vertices(n + m);
  for (std::size_t i = 0; i < n; ++i) vertices.unite(i, inv.vertex[i]);
  for (std::size_t i = 0; i < m; ++i) vertices.unite(n + i, n + inv.edge[i]);
  // Half edges: 2i is the half at the a end, 2i + 1 the half at the b end.
  Components halves(2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = inv.edge[i];
    halves.unite(2 * i, 2 * j + (inv.reversed[i] ? 1 : 0));
    halves.unite(2 * i + 1, 2 * j + (inv.reversed[i] ? 0 : 1));
  }
  std::set<std::size_t> vclasses, hclasses;
  for (std::size_t i = 0; i < n + m; ++i) vclasses.insert(vertices.find(i));
  for (std::size_t i = 0; i < 2 * m; ++i) hclasses.insert(halves.find(i));
  return static_cast<int>(hclasses.size()) - static_cast<int>(vclasses.size()) + 1;
}

/// Path membership of model edges of a modification, by refinement naming.
std::vector<int> path_of_chain(const MetricGraph& g, const EssentialModel& em, const std::vector<NamedPath>& paths,
                               const std::vector<std::vector<std::string>>& path_names) {
  std::vector<int> out(em.edges.size(), -1);
  for (std::size_t i = 0; i < em.edges.size(); ++i) {
    const std::string& nm = chain_name(g, em.edges[i]);
    for (std::size_t p = 0; p < paths.size() && out[i] < 0; ++p)
      for (const std::string& base : path_names[p])
        if (nm == base || nm.rfind(base + "_", 0) == 0) {
          out[i] = static_cast<int>(p);
          break;
        }
  }
  return out;
}

std::optional<std::string> first_length_clash(const MetricGraph& g, const EssentialModel& em,
                                              const EssentialInvolution& inv) {
  for (std::size_t i = 0; i < em.edges.size(); ++i) {
    std::size_t j = inv.edge[i];
    if (em.edges[i].length == em.edges[j].length) continue;
    return "l(" + chain_name(g, em.edges[i]) + ") = " + em.edges[i].length.str() + " vs l(" +
           chain_name(g, em.edges[j]) + ") = " + em.edges[j].length.str();
  }
  return std::nullopt;
}

/// Builds the quotient morphism of a length-preserving involution on a
/// common refinement (cuts made symmetric, every piece split at its midpoint).
GraphMorphism quotient_morphism(const MetricGraph& g, const EssentialModel& em, const EssentialInvolution& inv) {
  const std::size_t m = em.edges.size();
  std::vector<std::vector<Rat>> points(m);  // interior cut offsets, sorted
  for (std::size_t i = 0; i < m; ++i) {
    const ChainEdge& ce = em.edges[i];
    const ChainEdge& other = em.edges[inv.edge[i]];
    std::set<Rat> cuts(ce.cuts.begin(), ce.cuts.end());
    for (const Rat& c : other.cuts) cuts.insert(inv.reversed[i] ? ce.length.value() - c : c);
    if (inv.edge[i] == i && inv.reversed[i]) cuts.insert(ce.length.value() / Rat{2});
    std::vector<Rat> sorted(cuts.begin(), cuts.end());
    std::set<Rat> all(sorted.begin(), sorted.end());
    Rat prev{0};
    for (const Rat& c : sorted) {
      all.insert((prev + c) / Rat{2});
      prev = c;
    }
    if (!ce.length.is_infinite()) all.insert((prev + ce.length.value()) / Rat{2});
    points[i].assign(all.begin(), all.end());
  }

  // Source graph.
  std::vector<VertexSpec> vertices;
  for (VertexId v : em.vertices) vertices.push_back(g.vertices()[v]);
  std::vector<std::vector<VertexId>> interior(m);
  auto model_point = [&](const ChainEdge& ce, const Rat& off) {
    Rat start{0};
    for (const auto& [e, fwd] : ce.chain) {
      const Length& l = g.edge(e).length;
      if (l.is_infinite() || off <= start + l.value()) {
        Rat along = off - start;
        return fwd ? g.point_on_edge(e, along) : g.point_on_edge(e, l.value() - along);
      }
      start = start + l.value();
    }
    throw DomainError("offset outside chain");
  };
  for (std::size_t i = 0; i < m; ++i)
    for (const Rat& off : points[i]) {
      interior[i].push_back(vertices.size());
      vertices.push_back({g.describe(model_point(em.edges[i], off)), false});
    }
  std::vector<Edge> edges;
  std::vector<std::vector<EdgeId>> pieces(m);
  std::map<std::string, int> piece_count;
  for (std::size_t i = 0; i < m; ++i) {
    const ChainEdge& ce = em.edges[i];
    std::vector<VertexId> ends = {ce.a};
    for (VertexId v : interior[i]) ends.push_back(v);
    ends.push_back(ce.b);
    std::vector<Rat> offs = {Rat{0}};
    for (const Rat& o : points[i]) offs.push_back(o);
    for (std::size_t k = 0; k + 1 < ends.size(); ++k) {
      bool last = k + 2 == ends.size();
      Length len = last && ce.length.is_infinite() ? Length::infinity()
                                                   : Length((last ? ce.length.value() : offs[k + 1]) - offs[k]);
      Point inside = model_point(ce, len.is_infinite() ? offs[k] + Rat{1} : offs[k] + len.value() / Rat{2});
      std::string base = g.edge(inside.id).name;
      std::string name = base + "." + std::to_string(piece_count[base]++);
      pieces[i].push_back(edges.size());
      edges.push_back({name, ends[k], ends[k + 1], len});
    }
  }
  auto source = std::make_shared<const MetricGraph>(vertices, edges);

  // Involution on the refined model.
  std::vector<VertexId> vsigma(vertices.size());
  for (std::size_t a = 0; a < em.vertices.size(); ++a) vsigma[a] = inv.vertex[a];
  std::vector<EdgeId> esigma(edges.size());
  std::vector<bool> erev(edges.size());
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = inv.edge[i];
    const std::size_t np = pieces[i].size();
    if (pieces[j].size() != np) throw DomainError("asymmetric refinement");
    for (std::size_t k = 0; k < np; ++k) {
      std::size_t kk = inv.reversed[i] ? np - 1 - k : k;
      esigma[pieces[i][k]] = pieces[j][kk];
      erev[pieces[i][k]] = inv.reversed[i];
    }
    for (std::size_t k = 0; k < interior[i].size(); ++k) {
      std::size_t kk = inv.reversed[i] ? interior[i].size() - 1 - k : k;
      vsigma[interior[i][k]] = interior[j][kk];
    }
  }

  // Target: orbits of vertices and pieces.
  std::vector<VertexId> vclass(vertices.size());
  std::vector<VertexSpec> tv;
  for (VertexId v = 0; v < vertices.size(); ++v) {
    VertexId w = vsigma[v];
    if (w < v) {
      vclass[v] = vclass[w];
      continue;
    }
    vclass[v] = tv.size();
    std::string name = w == v ? vertices[v].name : vertices[v].name + "|" + vertices[w].name;
    tv.push_back({name, vertices[v].infinite_leaf});
  }
  std::vector<Edge> te;
  std::vector<EdgeImage> emap(edges.size());
  for (EdgeId e = 0; e < edges.size(); ++e) {
    EdgeId o = esigma[e];
    if (o < e) {
      EdgeImage img = emap[o];
      // e = sigma(o); o maps forward onto its target, so e keeps o's
      // orientation unless sigma reverses it.
      img.forward = !erev[e];
      emap[e] = img;
      continue;
    }
    int dilation = o == e ? 2 : 1;
    const Edge& ed = edges[e];
    Length len = ed.length.is_infinite() ? Length::infinity() : Length(ed.length.value() * Rat{dilation});
    std::string name = o == e ? ed.name : ed.name + "|" + edges[o].name;
    emap[e] = EdgeImage::onto(te.size(), true, dilation);
    te.push_back({name, vclass[ed.u], vclass[ed.v], len});
  }
  auto target = std::make_shared<const MetricGraph>(tv, te);
  // The target constructor may flip infinite edges; fix orientations.
  for (EdgeId e = 0; e < edges.size(); ++e) {
    const Edge& f = target->edge(emap[e].edge);
    emap[e].forward = vclass[edges[e].u] == f.u;
  }
  GraphMorphism out{source, target, {}, emap};
  for (VertexId v = 0; v < vertices.size(); ++v) out.vertex_map.push_back(vclass[v]);
  return out;
}

struct ModificationOutcome {
  std::vector<Rejection> rejections;
  std::vector<CoverWitness> witnesses;
  std::size_t involutions = 0;
};

std::string describe_sites(const MetricGraph& g, std::span<const Point> sites, std::span<const std::size_t> chosen) {
  if (chosen.empty()) return "none";
  std::string out;
  for (std::size_t i : chosen) out += (out.empty() ? "" : ", ") + g.describe(sites[i]);
  return out;
}

}  // namespace

CoverSearchResult search_degree2_to_genus1(const MetricGraph& g, const std::vector<NamedPath>& paths,
                                           const CoverSearchBudget& budget) {
  CoverSearchResult result;
  std::vector<Point> sites = attachment_sites(g, budget.denominator);
  std::vector<std::vector<std::size_t>> sets = modification_site_sets(sites.size(), budget.max_attachments);
  std::vector<std::vector<std::string>> path_names;
  std::vector<Rat> path_length;
  for (const NamedPath& p : paths) {
    std::vector<std::string> names;
    Rat total{0};
    for (EdgeId e : p.edges) {
      names.push_back(g.edge(e).name);
      total = total + g.edge(e).length.value();
    }
    path_names.push_back(names);
    path_length.push_back(total);
  }
  for (std::size_t i = 0; i < paths.size(); ++i)
    for (std::size_t j = i + 1; j < paths.size(); ++j)
      if (path_length[i] == path_length[j]) result.boundary_case = true;

  std::vector<ModificationOutcome> outcomes(sets.size());
  parallel_for(sets.size(), budget.jobs, [&](std::size_t k) {
    ModificationOutcome& out = outcomes[k];
    MetricGraph mod = modify_at(g, sites, sets[k]);
    EssentialModel em = essential_model(mod);
    std::vector<int> chain_path = path_of_chain(mod, em, paths, path_names);
    const std::string where = describe_sites(g, sites, sets[k]);
    for_each_involution(em, [&](const EssentialInvolution& inv) {
      ++out.involutions;
      Rejection rej;
      rej.modification = k;
      rej.sites = where;
      rej.involution = describe_involution(mod, em, inv);
      rej.data = inv;
      if (auto clash = first_length_clash(mod, em, inv)) {
        rej.reason = RejectReason::LengthClash;
        rej.detail = *clash;
        for (std::size_t i = 0; i < em.edges.size(); ++i) {
          int pi = chain_path[i], pj = chain_path[inv.edge[i]];
          if (pi >= 0 && pj >= 0 && pi != pj && path_length[pi] != path_length[pj]) {
            rej.detail += "; maps part of " + paths[pi].name + " onto " + paths[pj].name + ": l(" + paths[pi].name +
                          ") = " + path_length[pi].str() + " vs l(" + paths[pj].name + ") = " + path_length[pj].str();
            break;
          }
        }
        out.rejections.push_back(std::move(rej));
        return;
      }
      int genus = quotient_genus(em, inv);
      if (genus != 1) {
        rej.reason = RejectReason::GenusObstruction;
        rej.detail = "quotient genus " + std::to_string(genus);
        out.rejections.push_back(std::move(rej));
        return;
      }
      GraphMorphism phi = quotient_morphism(mod, em, inv);
      HarmonicCertificate cert = check_harmonic(phi);
      if (!is_finite(phi) || !cert.harmonic || cert.degree != 2 || phi.target->genus() != 1) {
        rej.reason = RejectReason::VerificationFailed;
        rej.detail = cert.harmonic ? "degree " + std::to_string(cert.degree) : cert.violation;
        out.rejections.push_back(std::move(rej));
        return;
      }
      out.witnesses.push_back({k, where, rej.involution, std::move(phi)});
    });
  });

  std::map<RejectReason, std::size_t> counts;
  for (auto& out : outcomes) {
    result.involutions += out.involutions;
    for (auto& r : out.rejections) {
      ++counts[r.reason];
      result.log.push_back(std::move(r));
    }
    for (auto& w : out.witnesses) result.witnesses.push_back(std::move(w));
  }
  result.modifications = sets.size();

  ClaimResult& c = result.claim;
  c.claim = "no-degree2-genus1-cover";
  c.mode = Mode::ExhaustedWithinBudget;
  c.verdict = result.witnesses.empty();
  c.candidates_checked = static_cast<long long>(result.involutions);
  c.sampling = "modifications with at most " + std::to_string(budget.max_attachments) + " infinite edges at " +
               std::to_string(sites.size()) + " sites (offsets k/" + std::to_string(budget.denominator) + "): " +
               std::to_string(sets.size()) + " graphs, " + std::to_string(result.involutions) + " involutions";
  for (const auto& w : result.witnesses)
    c.counterexamples.push_back("sites {" + w.sites + "}, involution " + w.involution + ", target genus " +
                          std::to_string(w.morphism.target->genus()));
  for (const auto& [reason, count] : counts) c.notes.push_back(std::string(to_string(reason)) + ": " + std::to_string(count));
  if (!paths.empty())
    c.notes.push_back(result.boundary_case ? "boundary class: two named paths have equal length"
                                           : "boundary class (equal path lengths): absent");
  c.notes.push_back("vertex-weighted genus-1 targets are outside this search");
  c.notes.push_back("open: no length bound shows that this budget of attachments and sites suffices");
  return result;
}

bool recheck_rejection(const MetricGraph& g, const CoverSearchBudget& budget, const Rejection& r) {
  std::vector<Point> sites = attachment_sites(g, budget.denominator);
  std::vector<std::vector<std::size_t>> sets = modification_site_sets(sites.size(), budget.max_attachments);
  if (r.modification >= sets.size()) return false;
  MetricGraph mod = modify_at(g, sites, sets[r.modification]);
  EssentialModel em = essential_model(mod);
  const EssentialInvolution& inv = r.data;
  const std::size_t n = em.vertices.size(), m = em.edges.size();
  if (inv.vertex.size() != n || inv.edge.size() != m || inv.reversed.size() != m) return false;
  // Structural check: an involution compatible with incidences.
  for (std::size_t i = 0; i < n; ++i)
    if (inv.vertex[i] >= n || inv.vertex[inv.vertex[i]] != i) return false;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = inv.edge[i];
    if (j >= m || inv.edge[j] != i || inv.reversed[j] != inv.reversed[i]) return false;
    std::size_t a = inv.vertex[em.edges[i].a], b = inv.vertex[em.edges[i].b];
    if (inv.reversed[i]) std::swap(a, b);
    if (a != em.edges[j].a || b != em.edges[j].b) return false;
  }
  bool lengths_ok = true;
  for (std::size_t i = 0; i < m; ++i)
    if (!(em.edges[i].length == em.edges[inv.edge[i]].length)) lengths_ok = false;
  switch (r.reason) {
    case RejectReason::LengthClash:
      return !lengths_ok;
    case RejectReason::GenusObstruction: {
      if (!lengths_ok) return false;
      // Independent count: build the quotient of the midpoint subdivision
      // explicitly and take its first Betti number.
      GraphMorphism phi = quotient_morphism(mod, em, inv);
      return phi.target->genus() != 1;
    }
    case RejectReason::VerificationFailed:
      return true;
  }
  return false;
}

MetricGraph symmetric_control_graph() {
  return MetricGraph({{"v1", false}, {"v2", false}},
                     {{"e0", 0, 1, Length(Rat{2})}, {"e1", 0, 1, Length(Rat{2})}, {"e2", 0, 1, Length(Rat{2})}});
}

}  // namespace mg
