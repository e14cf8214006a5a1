#include "metricgraph/family.hpp"

#include <algorithm>
#include <set>

#include "metricgraph/rank.hpp"

namespace mg {

const Point& FamilyGraph::mark(std::string_view name) const {
  auto it = marks.find(name);
  if (it == marks.end()) throw DomainError("unknown mark '" + std::string(name) + "'");
  return it->second;
}

const std::vector<EdgeId>& FamilyGraph::subgraph(std::string_view name) const {
  auto it = subgraphs.find(name);
  if (it == subgraphs.end()) throw DomainError("unknown subgraph '" + std::string(name) + "'");
  return it->second;
}

Divisor FamilyGraph::divisor(std::initializer_list<std::pair<std::string_view, int>> terms) const {
  Divisor d(graph);
  for (const auto& [name, c] : terms) d.add(mark(name), c);
  return d;
}

int FamilyGraph::loop_of(const Point& p) const {
  for (std::size_t i = 0; i < loop_edges.size(); ++i) {
    if (!p.on_edge && p.id == loop_aux[i]) return static_cast<int>(i);
    if (p.on_edge && (p.id == loop_edges[i][0] || p.id == loop_edges[i][1])) return static_cast<int>(i);
  }
  return -1;
}

Rat FamilyGraph::loop_position(int i, const Point& p) const {
  const Rat half = loop_lengths.at(i) / Rat{2};
  if (p == attachments.at(i)) return Rat{0};
  if (!p.on_edge && p.id == loop_aux.at(i)) return half;
  if (p.on_edge && p.id == loop_edges[i][0]) return p.offset;
  if (p.on_edge && p.id == loop_edges[i][1]) return half + p.offset;
  throw DomainError("point " + graph->describe(p) + " is not on gamma" + std::to_string(i));
}

Point FamilyGraph::loop_point(int i, const Rat& s) const {
  const Rat len = loop_lengths.at(i);
  const Rat half = len / Rat{2};
  Rat t = s;
  // Reduce into [0, len).
  Rat turns = t / len;
  std::int64_t whole = turns.num() / turns.den();
  if (turns.num() < 0 && turns.num() % turns.den() != 0) --whole;
  t = t - len * Rat{whole};
  if (t == Rat{0}) return attachments.at(i);
  if (t < half) return graph->point_on_edge(loop_edges[i][0], t);
  return graph->point_on_edge(loop_edges[i][1], t - half);
}

G0Spec default_g0() { return G0Spec{}; }

namespace {

std::vector<G0Point> generated_extras(const G0Spec& base, int count, const std::vector<G0Point>& taken) {
  const Rat lengths[3] = {base.l0, base.l1, base.l2};
  const std::int64_t starts[3] = {3, 5, 7};
  std::vector<G0Point> used = taken;
  std::vector<G0Point> out;
  auto collides = [&](int e, const Rat& off) {
    for (const auto& p : used)
      if (p.edge == e && p.offset == off) return true;
    return false;
  };
  std::vector<std::vector<Rat>> candidates(3);
  for (int e = 0; e < 3; ++e) {
    for (std::int64_t shift = 0; shift < 8; shift += 2)
      for (std::int64_t j = 0;; ++j) {
        Rat off(8 * j + (starts[e] + shift) % 8, 8);
        if (off >= lengths[e]) break;
        candidates[e].push_back(off);
      }
  }
  std::size_t next[3] = {0, 0, 0};
  int e = 0;
  int stalled = 0;
  while (static_cast<int>(out.size()) < count) {
    bool placed = false;
    while (next[e] < candidates[e].size()) {
      Rat off = candidates[e][next[e]++];
      if (collides(e, off)) continue;
      out.push_back({e, off});
      used.push_back({e, off});
      placed = true;
      break;
    }
    stalled = placed ? 0 : stalled + 1;
    if (stalled == 3) throw DomainError("not enough free positions for generated marks");
    e = (e + 1) % 3;
  }
  return out;
}

std::vector<G0Point> fixed_marks(const G0Spec& s) {
  return {{0, Rat{0}},         {0, s.l0},          {0, s.l0 / Rat{2}}, {1, s.l1 / Rat{2}},
          {2, s.l2 / Rat{2}},  {1, s.q1},          {2, s.l2 - s.q2}};
}

}  // namespace

GnSpec default_gn(int n) {
  GnSpec s;
  s.n = n;
  return s;
}

std::vector<GnSpec> perturbed_gn(int n) {
  GnSpec a;
  a.n = n;
  a.base = G0Spec{Rat{3}, Rat{4}, Rat{6}, Rat{1}, Rat{3, 4}};
  a.loops.assign(static_cast<std::size_t>(n + 1), Rat{1, 2});
  GnSpec b;
  b.n = n;
  b.base = G0Spec{Rat{5, 2}, Rat{7, 2}, Rat{4}, Rat{3, 4}, Rat{1, 3}};
  b.loops.assign(static_cast<std::size_t>(n + 1), Rat{3, 2});
  return {a, b};
}

std::vector<G0Spec> g0_variants() {
  return {default_g0(), perturbed_gn(2)[0].base, perturbed_gn(2)[1].base};
}

void validate(const G0Spec& s) {
  if (s.l0.sign() <= 0 || s.l1.sign() <= 0 || s.l2.sign() <= 0) throw DomainError("lengths must be positive");
  if (s.l0 == s.l1 || s.l0 == s.l2 || s.l1 == s.l2) throw DomainError("lengths must be pairwise distinct");
  if (s.q1.sign() <= 0 || s.q1 >= s.l1 / Rat{2}) throw DomainError("q1 must lie strictly between v1 and m1");
  if (s.q2.sign() <= 0 || s.q2 >= s.l2 / Rat{2}) throw DomainError("q2 must lie strictly between v2 and m2");
}

FamilyGraph build_g0(const G0Spec& s) {
  validate(s);
  std::vector<VertexSpec> vertices = {{"v1", false}, {"v2", false}};
  std::vector<Edge> edges = {{"e0", 0, 1, Length(s.l0)}, {"e1", 0, 1, Length(s.l1)}, {"e2", 0, 1, Length(s.l2)}};
  FamilyGraph f;
  auto g = std::make_shared<const MetricGraph>(std::move(vertices), std::move(edges));
  f.graph = g;
  f.marks = {
      {"v1", Point::vertex(0)},
      {"v2", Point::vertex(1)},
      {"m0", g->point_on_edge(0, s.l0 / Rat{2})},
      {"q0", g->point_on_edge(0, s.l0 / Rat{2})},
      {"m1", g->point_on_edge(1, s.l1 / Rat{2})},
      {"m2", g->point_on_edge(2, s.l2 / Rat{2})},
      {"q1", g->point_on_edge(1, s.q1)},
      {"q1p", g->point_on_edge(1, s.l1 - s.q1)},
      {"q2", g->point_on_edge(2, s.l2 - s.q2)},
      {"q2p", g->point_on_edge(2, s.q2)},
  };
  for (int i = 0; i < 3; ++i) f.subgraphs["e" + std::to_string(i)] = {static_cast<EdgeId>(i)};
  f.subgraphs["v1m0v2"] = {0};
  f.subgraphs["v1m1v2"] = {1};
  f.subgraphs["v1m2v2"] = {2};
  return f;
}

FamilyGraph build_gn(const GnSpec& spec) {
  const G0Spec& s = spec.base;
  validate(s);
  if (spec.n < 1) throw DomainError("n must be at least 1");
  FamilyGraph f;
  f.n = spec.n;
  f.has_loops = true;
  if (spec.n == 1) f.warnings.push_back("n = 1: the no g^r_{2r+1} statement requires n >= 2");

  const int extra_count = std::max(0, spec.n - 2);
  std::vector<G0Point> attach = {{0, s.l0 / Rat{2}}, {1, s.q1}};
  if (spec.n >= 2) attach.push_back({2, s.l2 - s.q2});
  std::vector<G0Point> extras = spec.extra;
  if (extras.empty()) {
    extras = generated_extras(s, extra_count, fixed_marks(s));
  } else if (static_cast<int>(extras.size()) != extra_count) {
    throw DomainError("expected " + std::to_string(extra_count) + " extra marks q3..qn");
  }
  const Rat lengths[3] = {s.l0, s.l1, s.l2};
  std::vector<G0Point> taken = fixed_marks(s);
  for (const auto& p : extras) {
    if (p.edge < 0 || p.edge > 2) throw DomainError("extra mark edge index must be 0, 1 or 2");
    if (p.offset.sign() <= 0 || p.offset >= lengths[p.edge]) throw DomainError("extra mark must lie inside its edge");
    for (const auto& t : taken)
      if (t.edge == p.edge && t.offset == p.offset) throw DomainError("duplicate mark at e" + std::to_string(p.edge) + "@" + p.offset.str());
    taken.push_back(p);
    attach.push_back(p);
  }
  std::vector<Rat> loops = spec.loops;
  if (loops.empty()) loops.assign(attach.size(), Rat{1});
  if (loops.size() != attach.size()) throw DomainError("expected " + std::to_string(attach.size()) + " loop lengths");
  for (const Rat& l : loops)
    if (l.sign() <= 0) throw DomainError("loop lengths must be positive");

  FamilyGraph g0 = build_g0(s);
  std::vector<Point> points;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < attach.size(); ++i) {
    points.push_back(g0.graph->point_on_edge(attach[i].edge, attach[i].offset));
    names.push_back(i == 0 ? "m0" : "q" + std::to_string(i));
  }
  Refinement ref = refine(*g0.graph, points, names);
  std::vector<VertexSpec> vertices = ref.graph.vertices();
  std::vector<Edge> edges = ref.graph.edges();
  for (const auto& [name, p] : g0.marks) f.marks[name] = ref.map(p);
  for (std::size_t i = 0; i < attach.size(); ++i) {
    Point q = ref.map(points[i]);
    f.attachments.push_back(q);
    f.marks["q" + std::to_string(i)] = q;
    VertexId aux = vertices.size();
    vertices.push_back({"a" + std::to_string(i), false});
    EdgeId first = edges.size();
    Length half(loops[i] / Rat{2});
    edges.push_back({"g" + std::to_string(i) + "_0", q.id, aux, half});
    edges.push_back({"g" + std::to_string(i) + "_1", aux, q.id, half});
    f.loop_edges.push_back({first, first + 1});
    f.loop_aux.push_back(aux);
    f.marks["a" + std::to_string(i)] = Point::vertex(aux);
    f.subgraphs["gamma" + std::to_string(i)] = {first, first + 1};
  }
  f.loop_lengths = loops;
  f.attachment_coords = attach;
  f.graph = std::make_shared<const MetricGraph>(std::move(vertices), std::move(edges));
  const MetricGraph& g = *f.graph;
  for (int i = 0; i < 3; ++i) {
    std::string base = "e" + std::to_string(i);
    std::vector<EdgeId> parts;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      const std::string& nm = g.edge(e).name;
      if (nm == base || nm.rfind(base + "_", 0) == 0) parts.push_back(e);
    }
    f.subgraphs[base] = parts;
  }
  f.subgraphs["v1m0v2"] = f.subgraphs["e0"];
  f.subgraphs["v1m1v2"] = f.subgraphs["e1"];
  f.subgraphs["v1m2v2"] = f.subgraphs["e2"];
  return f;
}

MetricGraph elementary_tropical_modification(const MetricGraph& g, const Point& p) {
  g.require(p);
  if (!g.in_finite_part(p)) throw DomainError("modification point must lie on the finite part");
  Refinement ref = refine(g, std::span<const Point>(&p, 1));
  Point at = ref.map(p);
  std::vector<VertexSpec> vertices = ref.graph.vertices();
  std::vector<Edge> edges = ref.graph.edges();
  std::size_t k = 0;
  for (const auto& v : vertices)
    if (v.infinite_leaf) ++k;
  while (ref.graph.find_vertex("x" + std::to_string(k)) || ref.graph.find_edge("ray" + std::to_string(k))) ++k;
  VertexId leaf = vertices.size();
  vertices.push_back({"x" + std::to_string(k), true});
  edges.push_back({"ray" + std::to_string(k), at.id, leaf, Length::infinity()});
  return MetricGraph(std::move(vertices), std::move(edges));
}

std::vector<Point> attachment_sites(const MetricGraph& g, int denominator) {
  GridSpec spec;
  spec.denominator = denominator;
  spec.midpoints = false;
  return sampling_grid(g, spec);
}

std::vector<std::vector<std::size_t>> modification_site_sets(std::size_t site_count, int max_attachments) {
  std::vector<std::vector<std::size_t>> out;
  for (int k = 0; k <= max_attachments; ++k)
    for_each_multiset(site_count, k, [&](std::span<const std::size_t> idx) {
      out.emplace_back(idx.begin(), idx.end());
      return true;
    });
  return out;
}

MetricGraph modify_at(const MetricGraph& g, std::span<const Point> sites, std::span<const std::size_t> chosen) {
  // Refine at all chosen sites first so site coordinates stay valid.
  std::vector<Point> pts;
  for (std::size_t i : chosen) pts.push_back(sites[i]);
  Refinement ref = refine(g, pts);
  MetricGraph out = ref.graph;
  for (const Point& p : pts) out = elementary_tropical_modification(out, ref.map(p));
  return out;
}

std::vector<MetricGraph> enumerate_modifications(const MetricGraph& g, std::span<const Point> sites,
                                                 int max_attachments) {
  std::vector<MetricGraph> out;
  for (const auto& chosen : modification_site_sets(sites.size(), max_attachments))
    out.push_back(modify_at(g, sites, chosen));
  return out;
}

}  // namespace mg
