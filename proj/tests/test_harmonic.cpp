#include "doctest.h"

#include <random>

#include "metricgraph/family.hpp"
#include "metricgraph/harmonic.hpp"
#include "support/zoo.hpp"

using mg::EdgeImage;
using mg::GraphMorphism;
using mg::Point;
using mg::Rat;

namespace {

// Circle of length 4 wrapped twice around a circle of length 2.
GraphMorphism circle_double_cover() {
  auto src = zoo::make({{"s0"}, {"s1"}, {"s2"}, {"s3"}}, {{"a", 0, 1, Rat{1}},
                                                          {"b", 1, 2, Rat{1}},
                                                          {"c", 2, 3, Rat{1}},
                                                          {"d", 3, 0, Rat{1}}});
  auto tgt = zoo::circle(Rat{2});
  return {src, tgt, {0, 1, 0, 1}, {EdgeImage::onto(0, true, 1), EdgeImage::onto(1, true, 1),
                                   EdgeImage::onto(0, true, 1), EdgeImage::onto(1, true, 1)}};
}

// Path a - b - c folded at b onto a unit segment.
GraphMorphism fold() {
  auto src = zoo::make({{"a"}, {"b"}, {"c"}}, {{"ab", 0, 1, Rat{1}}, {"bc", 1, 2, Rat{1}}});
  auto tgt = zoo::make({{"x"}, {"y"}}, {{"e", 0, 1, Rat{1}}});
  return {src, tgt, {0, 1, 0}, {EdgeImage::onto(0, true, 1), EdgeImage::onto(0, false, 1)}};
}

GraphMorphism identity(const mg::GraphPtr& g) {
  GraphMorphism m{g, g, {}, {}};
  for (mg::VertexId v = 0; v < g->vertex_count(); ++v) m.vertex_map.push_back(v);
  for (mg::EdgeId e = 0; e < g->edge_count(); ++e) m.edge_map.push_back(EdgeImage::onto(e, true, 1));
  return m;
}

// Unit circle with a pendant edge at c0 wrapped onto half of a target circle.
GraphMorphism pendant_onto_circle() {
  auto src = zoo::make({{"c0"}, {"c1"}, {"w"}},
                       {{"g0", 0, 1, Rat{1}}, {"g1", 1, 0, Rat{1}}, {"p", 0, 2, Rat{1}}});
  auto tgt = zoo::circle(Rat{2});
  return {src, tgt, {0, 1, 1}, {EdgeImage::onto(0, true, 1), EdgeImage::onto(1, true, 1), EdgeImage::onto(0, true, 1)}};
}

}  // namespace

TEST_CASE("identity is a finite harmonic morphism of degree 1") {
  auto m = identity(zoo::theta());
  CHECK(mg::is_morphism(m));
  CHECK(mg::is_finite(m));
  auto h = mg::check_harmonic(m);
  CHECK(h.harmonic);
  CHECK(h.degree == 1);
}

TEST_CASE("collapsing an edge is not finite") {
  auto src = zoo::make({{"a"}, {"b"}}, {{"ab", 0, 1, Rat{1}}});
  auto tgt = zoo::make({{"x"}}, {});
  GraphMorphism m{src, tgt, {0, 0}, {EdgeImage::collapse(0)}};
  CHECK(mg::is_morphism(m));
  CHECK_FALSE(mg::is_finite(m));
}

TEST_CASE("morphism validation reports violations") {
  auto m = circle_double_cover();
  m.edge_map[0] = EdgeImage::onto(0, true, 2);  // length 1 cannot cover length 1 with dilation 2
  CHECK_FALSE(mg::is_morphism(m));
  m = circle_double_cover();
  m.vertex_map[1] = 0;  // endpoints no longer match
  auto c = mg::check_morphism(m);
  CHECK_FALSE(c.ok);
  CHECK_FALSE(c.violations.empty());
}

TEST_CASE("circle double cover") {
  auto m = circle_double_cover();
  REQUIRE(mg::is_morphism(m));
  auto h = mg::check_harmonic(m);
  CHECK(h.harmonic);
  CHECK(h.degree == 2);
  for (int d : h.local_degree) CHECK(d == 1);
  std::mt19937_64 rng(47);
  for (int i = 0; i < 25; ++i) CHECK(mg::fiber_degree(m, zoo::random_point(*m.target, rng)) == 2);
}

TEST_CASE("fold has local degree 2 at the fold point") {
  auto m = fold();
  auto h = mg::check_harmonic(m);
  CHECK(h.harmonic);
  CHECK(h.degree == 2);
  CHECK(h.local_degree == std::vector<int>{1, 2, 1});
  CHECK(mg::fiber_degree(m, Point::vertex(0)) == 2);
  CHECK(mg::fiber_degree(m, Point::vertex(1)) == 2);
  CHECK(mg::fiber_degree(m, m.target->point_on_edge(0, Rat(1, 3))) == 2);
}

TEST_CASE("non-harmonic morphism") {
  // Pendant plus circle onto a circle: the pendant end has local degree 1
  // but nothing else maps over the other half.
  auto h = mg::check_harmonic(pendant_onto_circle());
  CHECK_FALSE(h.harmonic);
  CHECK_FALSE(h.violation.empty());
}

TEST_CASE("composition with an isomorphism") {
  auto m = circle_double_cover();
  auto id = identity(m.target);
  auto c = mg::compose(m, id);
  CHECK(mg::is_harmonic(c));
  CHECK(mg::check_harmonic(c).degree == 2);
  CHECK(c.vertex_map == m.vertex_map);
}

TEST_CASE("subtree test") {
  auto m = pendant_onto_circle();
  auto into_loop = mg::subtree_into_loop_test(m, {2}, 0);
  CHECK_FALSE(into_loop.holds);
  CHECK_FALSE(into_loop.trace.empty());

  // A single point is a subtree with no edges.
  CHECK(mg::subtree_into_loop_test(m, {}, 0).holds);
  // Pendant onto a bridge.
  auto f = fold();
  CHECK(mg::subtree_into_loop_test(f, {1}, 1).holds);

  // Hypotheses: a cycle is not a tree, and t must be the meeting point.
  CHECK_THROWS_AS(mg::subtree_into_loop_test(m, {0, 1}, 0), mg::DomainError);
  CHECK_THROWS_AS(mg::subtree_into_loop_test(m, {2}, 1), mg::DomainError);
}

TEST_CASE("cover search finds the control cover") {
  mg::CoverSearchBudget b;
  b.max_attachments = 0;
  b.denominator = 1;
  auto r = mg::search_degree2_to_genus1(mg::symmetric_control_graph(), {}, b);
  CHECK_FALSE(r.claim.verdict);
  REQUIRE_FALSE(r.witnesses.empty());
  for (const auto& w : r.witnesses) {
    auto h = mg::check_harmonic(w.morphism);
    CHECK(h.harmonic);
    CHECK(h.degree == 2);
    CHECK(mg::is_finite(w.morphism));
    CHECK(w.morphism.target->genus() == 1);
  }
}

TEST_CASE("cover search on G2 within a small budget") {
  auto f = mg::build_gn(mg::default_gn(2));
  mg::CoverSearchBudget b;
  b.max_attachments = 1;
  b.denominator = 1;
  b.jobs = 2;
  std::vector<mg::NamedPath> paths = {{"v1m0v2", f.subgraph("e0")}, {"v1m1v2", f.subgraph("e1")},
                                      {"v1m2v2", f.subgraph("e2")}};
  auto r = mg::search_degree2_to_genus1(*f.graph, paths, b);
  CHECK(r.claim.verdict);
  CHECK(r.claim.mode == mg::Mode::ExhaustedWithinBudget);
  CHECK(r.witnesses.empty());
  CHECK(r.log.size() == r.involutions);
  CHECK(r.modifications == 1 + mg::attachment_sites(*f.graph, 1).size());
  for (std::size_t i = 0; i < r.log.size(); i += 7) CHECK(mg::recheck_rejection(*f.graph, b, r.log[i]));

  b.jobs = 1;
  auto again = mg::search_degree2_to_genus1(*f.graph, paths, b);
  REQUIRE(again.log.size() == r.log.size());
  for (std::size_t i = 0; i < r.log.size(); ++i) CHECK(again.log[i].detail == r.log[i].detail);

  // Tampering with the recorded reason is caught.
  mg::Rejection bad = r.log.front();
  bad.reason = bad.reason == mg::RejectReason::LengthClash ? mg::RejectReason::GenusObstruction
                                                           : mg::RejectReason::LengthClash;
  CHECK_FALSE(mg::recheck_rejection(*f.graph, b, bad));
}
