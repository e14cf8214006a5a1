#include "metricgraph/family_checks.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace mg {
namespace {

struct Checker {
  ClaimResult& res;
  bool ok = true;
  void require(bool cond, const std::string& what) {
    if (cond) return;
    ok = false;
    res.counterexamples.push_back(what);
  }
};

/// Cut points of G0 (as offsets per edge, ends included) and one
/// representative per open cell, plus the cut points themselves.
std::vector<Point> cell_representatives(const MetricGraph& g, const std::vector<Point>& cuts) {
  std::set<Point> out;
  std::vector<std::set<Rat>> per_edge(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    per_edge[e].insert(Rat{0});
    per_edge[e].insert(g.edge(e).length.value());
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) out.insert(Point::vertex(v));
  for (const Point& p : cuts) {
    out.insert(p);
    if (p.on_edge) per_edge[p.id].insert(p.offset);
  }
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    std::optional<Rat> prev;
    for (const Rat& off : per_edge[e]) {
      if (prev) out.insert(g.point_on_edge(e, (*prev + off) / Rat{2}));
      prev = off;
    }
  }
  return {out.begin(), out.end()};
}

Divisor single(const GraphPtr& g, const Point& p, int c = 1) { return Divisor(g).add(p, c); }

/// Reflection of a point of G0 through the middle of its edge.
Point reflect(const MetricGraph& g, const Point& p) {
  if (!p.on_edge) return Point::vertex(p.id == 0 ? 1 : 0);
  return g.point_on_edge(p.id, g.edge(p.id).length.value() - p.offset);
}

}  // namespace

ClaimResult check_g0_pencil(const G0Spec& spec, int grid_denominator, int rank_samples) {
  ClaimResult res;
  res.claim = "g0-pencil";
  res.mode = Mode::Exact;
  Checker c{res};
  FamilyGraph f = build_g0(spec);
  const GraphPtr& g = f.graph;
  const Point v1 = f.mark("v1"), v2 = f.mark("v2");
  const Divisor k = f.divisor({{"v1", 1}, {"v2", 1}});

  int r = rank(k);
  c.require(r == 1, "rank(v1 + v2) = " + std::to_string(r));
  res.witnesses.push_back("rank(v1 + v2) = " + std::to_string(r));

  GridSpec grid_spec;
  grid_spec.denominator = grid_denominator;
  grid_spec.midpoints = false;
  std::vector<Point> grid = sampling_grid(*g, grid_spec);
  std::vector<Point> others;
  for (const Point& p : grid)
    if (p != v2) others.push_back(p);
  int sampled = 0;
  for (int i = 0; i < rank_samples && !others.empty(); ++i) {
    const Point& v = others[static_cast<std::size_t>(i) * others.size() / static_cast<std::size_t>(rank_samples)];
    int rv = rank(single(g, v1) + single(g, v));
    ++sampled;
    c.require(rv == 0, "rank(v1 + " + g->describe(v) + ") = " + std::to_string(rv));
  }
  res.witnesses.push_back("rank(v1 + v) = 0 at " + std::to_string(sampled) + " grid points");

  // v1 + v is v2-reduced for every v != v2: one representative per open edge.
  std::vector<Point> cuts = {v1, v2};
  for (const Point& v : cell_representatives(*g, cuts)) {
    if (v == v2) continue;
    ++res.candidates_checked;
    c.require(is_reduced(single(g, v1) + single(g, v), v2), "v1 + " + g->describe(v) + " is not v2-reduced");
  }

  std::set<Point> expected = {f.mark("m0"), f.mark("m1"), f.mark("m2")};
  std::set<Point> found;
  for (const Point& v : grid) {
    ++res.candidates_checked;
    if (linearly_equivalent(single(g, v, 2), k)) found.insert(v);
  }
  std::string listed;
  for (const Point& p : found) {
    std::string name = g->describe(p);
    for (const char* m : {"m0", "m1", "m2"})
      if (f.mark(m) == p) name = std::string(m) + " = " + name;
    listed += (listed.empty() ? "" : ", ") + name;
  }
  c.require(found == expected, "2v ~ v1 + v2 on the grid at {" + listed + "}");
  res.witnesses.push_back("{v on the 1/" + std::to_string(grid_denominator) + " grid : 2v ~ v1 + v2} = {" + listed + "}");

  // For every v the reflected point v' gives v + v' ~ v1 + v2, and v' is
  // v-reduced, so 2v ~ v1 + v2 forces v' = v.
  std::vector<Point> mids(expected.begin(), expected.end());
  mids.push_back(v1);
  mids.push_back(v2);
  for (const Point& v : cell_representatives(*g, mids)) {
    Point w = reflect(*g, v);
    ++res.candidates_checked;
    c.require(linearly_equivalent(single(g, v) + single(g, w), k),
              g->describe(v) + " + " + g->describe(w) + " is not in |v1 + v2|");
    if (w != v) c.require(is_reduced(single(g, w), v), g->describe(w) + " is not " + g->describe(v) + "-reduced");
  }
  res.sampling = "grid 1/" + std::to_string(grid_denominator) + "; cells cut by v1, v2, m0, m1, m2";
  res.verdict = c.ok;
  return res;
}

ClaimResult check_no_common_g13(const G0Spec& spec) {
  ClaimResult res;
  res.claim = "no-common-g13";
  res.mode = Mode::Exact;
  Checker c{res};
  FamilyGraph f = build_g0(spec);
  const GraphPtr& g = f.graph;
  const Divisor k = f.divisor({{"v1", 1}, {"v2", 1}});
  const Point v1 = f.mark("v1");
  const Point q1 = f.mark("q1"), q2 = f.mark("q2"), q1p = f.mark("q1p"), q2p = f.mark("q2p");
  c.require(linearly_equivalent(f.divisor({{"m0", 2}}), k), "2m0 is not in |v1 + v2|");
  c.require(linearly_equivalent(f.divisor({{"q1", 1}, {"q1p", 1}}), k), "q1 + q1' is not in |v1 + v2|");
  c.require(linearly_equivalent(f.divisor({{"q2", 1}, {"q2p", 1}}), k), "q2 + q2' is not in |v1 + v2|");
  std::vector<Point> cuts = {f.mark("v1"), f.mark("v2"), f.mark("m0"), f.mark("m1"), f.mark("m2"), q1, q2, q1p, q2p};
  const EdgeId e1 = *g->find_edge("e1");
  for (const Point& v : cell_representatives(*g, cuts)) {
    ++res.candidates_checked;
    Divisor d = k + single(g, v);
    bool through_m0 = has_effective_representative(d - single(g, f.mark("m0"), 2));
    bool through_q1 = has_effective_representative(d - single(g, q1, 2));
    bool through_q2 = has_effective_representative(d - single(g, q2, 2));
    const std::string at = g->describe(v);
    c.require(!(through_m0 && through_q1 && through_q2), "|v1 + v2 + " + at + "| meets 2m0, 2q1 and 2q2");
    // Away from e1 and v1 the pair q1 + q1' blocks 2q1; otherwise q2 + q2' blocks 2q2.
    bool blocks_q1 = v != v1 && !(v.on_edge && v.id == e1);
    const Point& qi = blocks_q1 ? q1 : q2;
    const Point& qip = blocks_q1 ? q1p : q2p;
    c.require(is_reduced(single(g, qip) + single(g, v), qi),
              g->describe(qip) + " + " + at + " is not " + g->describe(qi) + "-reduced");
    c.require(!(blocks_q1 ? through_q1 : through_q2), "|v1 + v2 + " + at + " - 2" + g->describe(qi) + "| is not empty");
  }
  res.witnesses.push_back(std::to_string(res.candidates_checked) + " cell representatives, each with an empty system");
  res.sampling = "cells cut by v1, v2, m0, m1, m2, q1, q1', q2, q2'";
  res.verdict = c.ok;
  return res;
}

ClaimResult check_no_g12(const GnSpec& spec) {
  ClaimResult res;
  res.claim = "no-g12";
  res.mode = Mode::Exact;
  Checker c{res};
  FamilyGraph gn = build_gn(spec);
  FamilyGraph g0 = build_g0(spec.base);
  ClaimResult pencil = check_g0_pencil(spec.base);
  c.require(pencil.verdict, "the g^1_2 of G0 is not as expected");
  int genus = gn.graph->genus();
  c.require(genus - 1 > 0, "removing one loop leaves a tree");
  res.witnesses.push_back("genus(G_n minus one loop) = " + std::to_string(genus - 1));
  for (std::size_t i = 1; i < gn.attachments.size(); ++i) {
    const G0Point& at = gn.attachment_coords[i];
    Point q0pt = g0.graph->point_on_edge(static_cast<EdgeId>(at.edge), at.offset);
    int r0 = rank(single(g0.graph, q0pt, 2));
    int rn = rank(single(gn.graph, gn.attachments[i], 2));
    res.candidates_checked += 2;
    std::string name = "q" + std::to_string(i);
    c.require(r0 == 0, "rank_G0(2" + name + ") = " + std::to_string(r0));
    c.require(rn == 0, "rank_Gn(2" + name + ") = " + std::to_string(rn));
    res.witnesses.push_back("rank_G0(2" + name + ") = " + std::to_string(r0) + ", rank_Gn(2" + name +
                            ") = " + std::to_string(rn));
  }
  res.verdict = c.ok;
  return res;
}

ClaimResult check_no_low_pencils(const GnSpec& spec, const SearchBudget& budget) {
  ClaimResult res;
  res.claim = "no-low-pencils";
  Checker c{res};
  FamilyGraph gn = build_gn(spec);
  ClaimResult parts[] = {check_no_g12(spec), check_no_common_g13(spec.base), no_grd_exists(gn.graph, 1, 3, budget),
                         no_grd_exists(gn.graph, 2, 5, budget)};
  res.mode = Mode::Exact;
  for (const ClaimResult& p : parts) {
    res.mode = weakest(res.mode, p.mode);
    res.candidates_checked += p.candidates_checked;
    c.require(p.verdict, p.claim + " failed");
    res.notes.push_back(p.claim + ": " + (p.verdict ? "holds" : "fails") + " (" + to_string(p.mode) + ")");
    for (const auto& w : p.counterexamples) res.counterexamples.push_back(p.claim + ": " + w);
    for (const auto& w : p.witnesses) res.witnesses.push_back(p.claim + ": " + w);
  }
  res.sampling = parts[2].sampling;
  res.verdict = c.ok;
  return res;
}

std::optional<Divisor> pencil_through(const FamilyGraph& g, const Divisor& f) {
  if (f.degree() != 2 || !f.is_effective()) return std::nullopt;
  std::vector<Point> pts;
  for (const auto& [p, c] : f.terms())
    for (int k = 0; k < c; ++k) pts.push_back(p);
  const GraphPtr& gp = g.graph;
  const Point v1 = g.mark("v1");
  int l1 = g.loop_of(pts[0]);
  int l2 = g.loop_of(pts[1]);
  if (l1 < 0 && l2 >= 0) {
    std::swap(pts[0], pts[1]);
    std::swap(l1, l2);
  }
  auto opposite = [&](int i, const Point& p) {
    return g.loop_point(i, g.loop_lengths[i] - g.loop_position(i, p));
  };
  Divisor e = f;
  if (l1 < 0 && l2 < 0) {
    e.add(v1, 2);
  } else if (l2 < 0) {
    e.add(v1).add(opposite(l1, pts[0]));
  } else if (l1 != l2) {
    e.add(opposite(l1, pts[0])).add(opposite(l2, pts[1]));
  } else {
    Rat s = g.loop_position(l1, pts[0]) + g.loop_position(l1, pts[1]);
    e.add(g.loop_point(l1, -s)).add(v1);
  }
  (void)gp;
  return e;
}

ClaimResult check_w14_lower(const GnSpec& spec, int random_pairs, std::uint64_t seed, const SearchBudget& budget) {
  FamilyGraph gn = build_gn(spec);
  const GraphPtr& g = gn.graph;
  GridSpec grid_spec;
  grid_spec.denominator = 4;
  grid_spec.midpoints = false;
  std::vector<Point> grid = sampling_grid(*g, grid_spec);
  std::vector<Divisor> samples;
  for_each_multiset(grid.size(), 2, [&](std::span<const std::size_t> idx) {
    samples.push_back(single(g, grid[idx[0]]) + single(g, grid[idx[1]]));
    return true;
  });
  std::mt19937_64 rng(seed);
  for (int i = 0; i < random_pairs; ++i) {
    Point a = random_rational_point(*g, rng, 64);
    Point b = random_rational_point(*g, rng, 64);
    samples.push_back(single(g, a) + single(g, b));
  }
  ClaimResult res = wrd_lower(g, 1, 4, 1, samples, [&](const Divisor& f) { return pencil_through(gn, f); }, budget);
  res.claim = "w14-lower";
  res.sampling = "all pairs on the 1/4 grid (" + std::to_string(grid.size()) + " points) plus " +
                 std::to_string(random_pairs) + " random pairs, seed " + std::to_string(seed);
  return res;
}

ClaimResult check_w14_upper(const GnSpec& spec, const SearchBudget& budget) {
  FamilyGraph gn = build_gn(spec);
  Divisor f(gn.graph);
  f.add(gn.loop_point(0, gn.loop_lengths[0] / Rat{4}));
  f.add(gn.loop_point(0, gn.loop_lengths[0] / Rat{2}));
  f.add(gn.loop_point(1, gn.loop_lengths[1] / Rat{4}));
  std::vector<Divisor> candidates = {f};
  ClaimResult res = wrd_upper(gn.graph, 1, 4, 2, candidates, budget);
  res.claim = "w14-upper";
  return res;
}

ClaimResult check_clifford_two(const GnSpec& spec, const SearchBudget& budget) {
  ClaimResult res;
  res.claim = "clifford-index";
  Checker c{res};
  FamilyGraph gn = build_gn(spec);
  const GraphPtr& g = gn.graph;

  Divisor e = gn.divisor({{"m0", 2}, {"q1", 2}});
  int r = rank(e);
  bool special = is_very_special(e);
  c.require(r == 1 && special, "2m0 + 2q1 has rank " + std::to_string(r));
  if (special) {
    int ci = clifford_index(e);
    res.witnesses.push_back(e.str() + ": degree 4, rank " + std::to_string(r) + ", c = " + std::to_string(ci));
  }

  ClaimResult g12 = check_no_g12(spec);
  c.require(g12.verdict, "a g^1_2 was not excluded");
  res.notes.push_back(std::string("c = 0 excluded: no g^1_2 (") + to_string(g12.mode) +
                      "), and a very special g^r_2r forces a g^1_2");
  res.mode = g12.mode;

  ClaimResult search = graph_clifford_index(g, budget);
  res.mode = weakest(res.mode, search.mode);
  res.candidates_checked = search.candidates_checked;
  c.require(search.value && *search.value == 2,
            "grid search found Clifford index " + (search.value ? std::to_string(*search.value) : std::string("none")));
  for (const auto& w : search.witnesses) res.witnesses.push_back("grid search: " + w);
  res.notes.push_back("c = 1 excluded on the grid: no g^r_{2r+1} with r < g - 2 (" + std::string(to_string(search.mode)) +
                      ")");
  res.value = search.value;
  res.sampling = "grid search over q-reduced r*q + G, denominator " + std::to_string(budget.grid.denominator);
  res.verdict = c.ok;
  return res;
}

}  // namespace mg
