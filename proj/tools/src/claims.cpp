#include "mgraph/claims.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

#include "metricgraph/family_checks.hpp"
#include "metricgraph/rank.hpp"

namespace mgraph {

using mg::ClaimResult;
using mg::Mode;

const std::vector<std::string>& claim_ids() {
  static const std::vector<std::string> ids = {"lemma1", "lemma2", "prop1", "prop2", "lemma3", "theorem", "corollary"};
  return ids;
}

std::vector<mg::NamedPath> family_paths(const mg::FamilyGraph& g) {
  std::vector<mg::NamedPath> out;
  for (const char* name : {"v1m0v2", "v1m1v2", "v1m2v2"}) out.push_back({name, g.subgraph(name)});
  return out;
}

namespace {

mg::SearchBudget class_budget(const VerifyOptions& o) {
  mg::SearchBudget b;
  b.grid.denominator = o.grid;
  b.grid.midpoints = true;
  b.max_candidates = o.max_candidates;
  b.jobs = o.jobs;
  return b;
}

mg::GnSpec gn_spec(const VerifyOptions& o) {
  if (o.gn) {
    mg::GnSpec s = *o.gn;
    if (s.n != o.n) {
      s.n = o.n;
      s.extra.clear();
      s.loops.clear();
    }
    return s;
  }
  return mg::default_gn(o.n);
}

std::vector<mg::G0Spec> g0_specs(const VerifyOptions& o) {
  if (o.g0) return {*o.g0};
  if (o.gn) return {o.gn->base};
  std::vector<mg::G0Spec> out = {mg::default_g0()};
  if (o.variants) {
    std::vector<mg::G0Spec> v = mg::g0_variants();
    out.assign(v.begin(), v.end());
  }
  return out;
}

void set_budget(Report& rep, const std::string& key, const std::string& value) {
  for (auto& [k, v] : rep.budgets)
    if (k == key) {
      v = value;
      return;
    }
  rep.budgets.push_back({key, value});
}

std::string spec_label(const mg::G0Spec& s) {
  return "(l0, l1, l2) = (" + s.l0.str() + ", " + s.l1.str() + ", " + s.l2.str() + "), q1 at " + s.q1.str() +
         ", q2 at " + s.q2.str();
}

void add_prop1(Report& rep, const VerifyOptions& o) {
  mg::GnSpec spec = gn_spec(o);
  mg::FamilyGraph g = mg::build_gn(spec);
  mg::SearchBudget budget = class_budget(o);
  rep.parts.push_back(mg::check_no_g12(spec));
  rep.parts.push_back(mg::check_no_common_g13(spec.base));
  rep.parts.push_back(mg::no_grd_exists(g.graph, 1, 3, budget));
  rep.parts.push_back(mg::no_grd_exists(g.graph, 2, 5, budget));
  set_budget(rep, "grid_denominator", std::to_string(o.grid));
  set_budget(rep, "max_candidates", std::to_string(o.max_candidates));
}

void add_prop2(Report& rep, const VerifyOptions& o) {
  mg::GnSpec spec = gn_spec(o);
  mg::SearchBudget budget = class_budget(o);
  budget.grid.random_points = o.random_pairs;
  budget.grid.seed = o.seed;
  rep.parts.push_back(mg::check_w14_lower(spec, o.random_pairs, o.seed, budget));
  rep.parts.push_back(mg::check_w14_upper(spec, budget));
  set_budget(rep, "random_pairs", std::to_string(o.random_pairs));
  set_budget(rep, "grid_denominator", std::to_string(o.grid));
}

void add_theorem(Report& rep, const VerifyOptions& o) {
  mg::GnSpec spec = gn_spec(o);
  mg::FamilyGraph g = mg::build_gn(spec);
  mg::CoverSearchBudget budget{o.budget_mods, o.subdiv, o.jobs};
  mg::CoverSearchResult search = mg::search_degree2_to_genus1(*g.graph, family_paths(g), budget);
  ClaimResult& main = search.claim;
  main.notes.push_back("rejection log: " + std::to_string(search.log.size()) + " entries, " +
                       std::to_string(search.witnesses.size()) + " witnesses, " + std::to_string(search.involutions) +
                       " involutions");
  if (search.log.size() + search.witnesses.size() != search.involutions) {
    main.verdict = false;
    main.counterexamples.push_back("rejection log is incomplete");
  }
  // Re-derive an evenly spaced sample of rejections from scratch.
  std::size_t step = std::max<std::size_t>(1, search.log.size() / 200);
  std::size_t rechecked = 0, failed = 0;
  for (std::size_t i = 0; i < search.log.size(); i += step) {
    ++rechecked;
    if (!mg::recheck_rejection(*g.graph, budget, search.log[i])) {
      ++failed;
      main.counterexamples.push_back("rejection not reproduced: sites {" + search.log[i].sites + "}, " +
                                     search.log[i].involution);
    }
  }
  if (failed) main.verdict = false;
  main.notes.push_back("rechecked " + std::to_string(rechecked) + " rejections from scratch, " +
                       std::to_string(failed) + " not reproduced");
  if (!search.log.empty()) {
    const mg::Rejection& first = search.log.front();
    main.notes.push_back("first rejection: sites {" + first.sites + "}, " + first.involution + ": " +
                         mg::to_string(first.reason) + " (" + first.detail + ")");
  }
  for (const auto& r : search.log)
    if (r.reason == mg::RejectReason::LengthClash && r.detail.find("maps part of") != std::string::npos) {
      main.notes.push_back("example length clash: sites {" + r.sites + "}, " + r.involution + ": " + r.detail);
      break;
    }
  rep.parts.push_back(std::move(main));

  mg::CoverSearchResult control = mg::search_degree2_to_genus1(mg::symmetric_control_graph(), {}, budget);
  ClaimResult c;
  c.claim = "control-cover-found";
  c.mode = Mode::ExhaustedWithinBudget;
  c.verdict = !control.witnesses.empty();
  c.candidates_checked = static_cast<long long>(control.involutions);
  c.sampling = control.claim.sampling;
  if (!control.witnesses.empty()) {
    const mg::CoverWitness& w = control.witnesses.front();
    mg::HarmonicCertificate cert = mg::check_harmonic(w.morphism);
    c.witnesses.push_back("theta graph (2, 2, 2), sites {" + w.sites + "}, involution " + w.involution +
                          ": harmonic degree " + std::to_string(cert.degree) + " onto genus " +
                          std::to_string(w.morphism.target->genus()));
  }
  c.notes.push_back(std::to_string(control.witnesses.size()) + " witnesses in total");
  rep.parts.push_back(std::move(c));
  set_budget(rep, "budget_mods", std::to_string(o.budget_mods));
  set_budget(rep, "subdiv", std::to_string(o.subdiv));
}

}  // namespace

Report verify_claim(const std::string& id, const VerifyOptions& o) {
  Report rep;
  rep.command = "verify " + id;
  rep.seed = o.seed;
  if (id == "lemma1") {
    for (const mg::G0Spec& s : g0_specs(o)) {
      ClaimResult r = mg::check_g0_pencil(s);
      r.notes.push_back(spec_label(s));
      rep.parts.push_back(std::move(r));
    }
    set_budget(rep, "grid_denominator", "16");
    set_budget(rep, "rank_samples", "20");
  } else if (id == "lemma2") {
    std::vector<mg::G0Spec> specs = g0_specs(o);
    if (o.variants && !o.g0 && !o.gn) {
      specs = {mg::default_g0()};
      for (const mg::GnSpec& p : mg::perturbed_gn(2)) specs.push_back(p.base);
    }
    for (const mg::G0Spec& s : specs) {
      ClaimResult r = mg::check_no_common_g13(s);
      r.notes.push_back(spec_label(s));
      rep.parts.push_back(std::move(r));
    }
  } else if (id == "prop1") {
    set_budget(rep, "n", std::to_string(o.n));
    add_prop1(rep, o);
  } else if (id == "prop2") {
    set_budget(rep, "n", std::to_string(o.n));
    add_prop2(rep, o);
  } else if (id == "lemma3") {
    rep.parts.push_back(check_subtree_cases());
  } else if (id == "theorem") {
    set_budget(rep, "n", std::to_string(o.n));
    add_theorem(rep, o);
  } else if (id == "corollary") {
    set_budget(rep, "n", std::to_string(o.n));
    add_prop1(rep, o);
    add_prop2(rep, o);
    add_theorem(rep, o);
    int genus = mg::build_gn(gn_spec(o)).graph->genus();
    rep.statements.push_back("G_" + std::to_string(o.n) + " has genus " + std::to_string(genus) +
                             ": w^1_4 >= 1 (sampled), no divisor of Clifford index 0 or 1, and no modification with at"
                             " most " + std::to_string(o.budget_mods) +
                             " infinite edges admits a finite degree-2 harmonic morphism onto a genus-1 graph.");
    rep.statements.push_back(
        "Consequence (not computed): for genus >= 6 the graph is not the tropicalization of a curve of that genus "
        "whose W^1_4 is one-dimensional, since such a curve would be a double cover of an elliptic curve.");
  } else {
    throw std::invalid_argument("unknown claim '" + id + "'");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Subtree cases

namespace {

using EdgeSpec = std::tuple<std::string, std::string, std::string, std::string>;  // name, u, v, length

mg::GraphPtr make_graph(const std::vector<std::string>& vertices, const std::vector<EdgeSpec>& edges) {
  std::vector<mg::VertexSpec> vs;
  std::map<std::string, mg::VertexId> index;
  for (std::string v : vertices) {
    bool leaf = v.back() == '!';
    if (leaf) v.pop_back();
    index[v] = vs.size();
    vs.push_back({v, leaf});
  }
  std::vector<mg::Edge> es;
  for (const auto& [name, u, v, len] : edges)
    es.push_back({name, index.at(u), index.at(v), len == "inf" ? mg::Length::infinity() : mg::Length(*mg::Rat::parse(len))});
  return std::make_shared<const mg::MetricGraph>(vs, es);
}

struct Image {
  std::string source, target;
  bool forward = true;
  int dilation = 1;
};

mg::GraphMorphism make_morphism(const mg::GraphPtr& s, const mg::GraphPtr& t,
                                const std::vector<std::pair<std::string, std::string>>& vertices,
                                const std::vector<Image>& edges) {
  mg::GraphMorphism m{s, t, std::vector<mg::VertexId>(s->vertex_count()), std::vector<mg::EdgeImage>(s->edge_count())};
  for (const auto& [a, b] : vertices) m.vertex_map.at(*s->find_vertex(a)) = *t->find_vertex(b);
  for (const Image& i : edges)
    m.edge_map.at(*s->find_edge(i.source)) = mg::EdgeImage::onto(*t->find_edge(i.target), i.forward, i.dilation);
  return m;
}

std::vector<mg::EdgeId> edge_ids(const mg::MetricGraph& g, const std::vector<std::string>& names) {
  std::vector<mg::EdgeId> out;
  for (const auto& n : names) out.push_back(*g.find_edge(n));
  return out;
}

}  // namespace

std::vector<SubtreeCase> subtree_cases() {
  std::vector<SubtreeCase> out;
  auto add = [&](std::string name, mg::GraphMorphism m, std::vector<std::string> tree, const std::string& t, bool loop) {
    const mg::MetricGraph& s = *m.source;
    std::vector<mg::EdgeId> ids = edge_ids(s, tree);
    mg::VertexId tv = *s.find_vertex(t);
    out.push_back({std::move(name), std::move(m), std::move(ids), tv, loop});
  };

  // Targets: a two-edge circle, the circle with a tail, with a second circle
  // behind the tail, and with an infinite ray.
  mg::GraphPtr circle = make_graph({"c0", "c1"}, {{"f0", "c0", "c1", "1"}, {"f1", "c1", "c0", "1"}});
  mg::GraphPtr tailed = make_graph({"c0", "c1", "d", "d2"}, {{"f0", "c0", "c1", "1"},
                                                             {"f1", "c1", "c0", "1"},
                                                             {"f2", "c0", "d", "1"},
                                                             {"f3", "d", "d2", "1"}});
  mg::GraphPtr barbell = make_graph({"c0", "c1", "d", "d2"}, {{"f0", "c0", "c1", "1"},
                                                              {"f1", "c1", "c0", "1"},
                                                              {"f2", "c0", "d", "1"},
                                                              {"f3", "d", "d2", "1"},
                                                              {"f4", "d2", "d", "1"}});
  mg::GraphPtr rayed = make_graph({"c0", "c1", "y!"}, {{"f0", "c0", "c1", "1"}, {"f1", "c1", "c0", "1"}, {"f2", "c0", "y", "inf"}});

  const std::vector<std::pair<std::string, std::string>> circle_vertices = {{"p0", "c0"}, {"p1", "c1"}};
  const std::vector<Image> circle_edges = {{"e0", "f0"}, {"e1", "f1"}};
  auto with = [](std::vector<Image> base, std::initializer_list<Image> more) {
    base.insert(base.end(), more);
    return base;
  };
  auto with_v = [](std::vector<std::pair<std::string, std::string>> base,
                   std::initializer_list<std::pair<std::string, std::string>> more) {
    base.insert(base.end(), more);
    return base;
  };

  {  // pendant edge wrapped onto half the circle
    auto s = make_graph({"p0", "p1", "w"}, {{"e0", "p0", "p1", "1"}, {"e1", "p1", "p0", "1"}, {"h", "p0", "w", "1"}});
    add("pendant onto circle edge",
        make_morphism(s, circle, with_v(circle_vertices, {{"w", "c1"}}), with(circle_edges, {{"h", "f0"}})), {"h"},
        "p0", true);
  }
  {  // the same with dilation 2
    auto s = make_graph({"p0", "p1", "w"}, {{"e0", "p0", "p1", "1"}, {"e1", "p1", "p0", "1"}, {"h", "p0", "w", "1/2"}});
    add("dilated pendant onto circle edge",
        make_morphism(s, circle, with_v(circle_vertices, {{"w", "c1"}}), with(circle_edges, {{"h", "f0", true, 2}})),
        {"h"}, "p0", true);
  }
  {  // a path wrapping once around the circle
    auto s = make_graph({"p0", "p1", "w1", "w2"}, {{"e0", "p0", "p1", "1"},
                                                   {"e1", "p1", "p0", "1"},
                                                   {"h1", "p0", "w1", "1"},
                                                   {"h2", "w1", "w2", "1"}});
    add("path wrapping the circle",
        make_morphism(s, circle, with_v(circle_vertices, {{"w1", "c1"}, {"w2", "c0"}}),
                      with(circle_edges, {{"h1", "f0"}, {"h2", "f1"}})),
        {"h1", "h2"}, "p0", true);
  }
  {  // tree crossing a bridge into a second circle
    auto s = make_graph({"p0", "p1", "w", "y"}, {{"e0", "p0", "p1", "1"},
                                                 {"e1", "p1", "p0", "1"},
                                                 {"h1", "p0", "w", "1"},
                                                 {"h2", "w", "y", "1"}});
    add("tree through a bridge into a far circle",
        make_morphism(s, barbell, with_v(circle_vertices, {{"w", "d"}, {"y", "d2"}}),
                      with(circle_edges, {{"h1", "f2"}, {"h2", "f3"}})),
        {"h1", "h2"}, "p0", true);
  }
  {  // rest of the graph is a dilated circle, subtree hangs at p1
    auto s = make_graph({"p0", "p1", "w"}, {{"e0", "p0", "p1", "1/2"}, {"e1", "p1", "p0", "1/2"}, {"h", "p1", "w", "1"}});
    add("pendant on a dilated circle",
        make_morphism(s, circle, with_v(circle_vertices, {{"w", "c0"}}),
                      {{"e0", "f0", true, 2}, {"e1", "f1", true, 2}, {"h", "f1"}}),
        {"h"}, "p1", true);
  }

  {  // pendant onto the tail
    auto s = make_graph({"p0", "p1", "w"}, {{"e0", "p0", "p1", "1"}, {"e1", "p1", "p0", "1"}, {"h", "p0", "w", "1"}});
    add("pendant onto a bridge",
        make_morphism(s, tailed, with_v(circle_vertices, {{"w", "d"}}), with(circle_edges, {{"h", "f2"}})), {"h"}, "p0",
        false);
  }
  {  // path along the whole tail
    auto s = make_graph({"p0", "p1", "w1", "w2"}, {{"e0", "p0", "p1", "1"},
                                                   {"e1", "p1", "p0", "1"},
                                                   {"h1", "p0", "w1", "1"},
                                                   {"h2", "w1", "w2", "1"}});
    add("path along a tail",
        make_morphism(s, tailed, with_v(circle_vertices, {{"w1", "d"}, {"w2", "d2"}}),
                      with(circle_edges, {{"h1", "f2"}, {"h2", "f3"}})),
        {"h1", "h2"}, "p0", false);
  }
  {  // two edges of a star folded onto the same bridge
    auto s = make_graph({"p0", "p1", "w1", "w2"}, {{"e0", "p0", "p1", "1"},
                                                   {"e1", "p1", "p0", "1"},
                                                   {"h1", "p0", "w1", "1"},
                                                   {"h2", "p0", "w2", "1"}});
    add("star folded onto a bridge",
        make_morphism(s, tailed, with_v(circle_vertices, {{"w1", "d"}, {"w2", "d"}}),
                      with(circle_edges, {{"h1", "f2"}, {"h2", "f2"}})),
        {"h1", "h2"}, "p0", false);
  }
  {  // infinite ray onto an infinite ray
    auto s = make_graph({"p0", "p1", "x!"}, {{"e0", "p0", "p1", "1"}, {"e1", "p1", "p0", "1"}, {"r", "p0", "x", "inf"}});
    add("ray onto a ray",
        make_morphism(s, rayed, with_v(circle_vertices, {{"x", "y"}}), with(circle_edges, {{"r", "f2"}})), {"r"}, "p0",
        false);
  }
  {  // harmonic double cover of the tailed circle, one of two pendants as T'
    auto s = make_graph({"p0", "p1", "p2", "p3", "w", "w2"}, {{"e0", "p0", "p1", "1"},
                                                              {"e1", "p1", "p2", "1"},
                                                              {"e2", "p2", "p3", "1"},
                                                              {"e3", "p3", "p0", "1"},
                                                              {"h", "p0", "w", "1"},
                                                              {"h2", "p2", "w2", "1"}});
    add("pendant of a double cover",
        make_morphism(s, tailed,
                      {{"p0", "c0"}, {"p1", "c1"}, {"p2", "c0"}, {"p3", "c1"}, {"w", "d"}, {"w2", "d"}},
                      {{"e0", "f0"}, {"e1", "f1"}, {"e2", "f0"}, {"e3", "f1"}, {"h", "f2"}, {"h2", "f2"}}),
        {"h"}, "p0", false);
  }
  return out;
}

ClaimResult check_subtree_cases() {
  ClaimResult r;
  r.claim = "subtree-into-loop";
  r.mode = Mode::Exact;
  r.verdict = true;
  for (const SubtreeCase& c : subtree_cases()) {
    ++r.candidates_checked;
    mg::SubtreeTest t = mg::subtree_into_loop_test(c.morphism, c.subtree, c.t);
    bool expected = !c.maps_into_loop;
    std::string line = c.name + ": " + (t.holds ? "true" : "false");
    if (!t.trace.empty()) line += " (" + t.trace.back() + ")";
    if (t.holds == expected) {
      r.witnesses.push_back(line);
    } else {
      r.verdict = false;
      r.counterexamples.push_back(line + ", expected " + (expected ? "true" : "false"));
    }
  }
  r.sampling = "synthetic morphisms: 5 with a subtree edge on a cycle, 5 with the subtree on bridges";
  return r;
}

}  // namespace mgraph
