#include "doctest.h"

#include <random>

#include "metricgraph/divisor.hpp"
#include "metricgraph/family.hpp"
#include "support/discrete_oracle.hpp"
#include "support/zoo.hpp"

using mg::Divisor;
using mg::DomainError;
using mg::Point;
using mg::Rat;

namespace {

mg::FamilyGraph g0() { return mg::build_g0(mg::default_g0()); }

}  // namespace

TEST_CASE("degree") {
  auto f = g0();
  CHECK(f.divisor({{"v1", 1}, {"v2", 1}}).degree() == 2);
  CHECK(f.divisor({{"m0", 2}, {"v1", -1}}).degree() == 1);
  CHECK(mg::canonical(f.graph).degree() == 2);
}

TEST_CASE("canonical divisor") {
  auto f = g0();
  CHECK(mg::canonical(f.graph) == f.divisor({{"v1", 1}, {"v2", 1}}));
  CHECK(mg::canonical(zoo::circle()).degree() == 0);
  CHECK(mg::canonical(zoo::circle()).terms().empty());
  auto gn = mg::build_gn(mg::default_gn(2));
  Divisor k = mg::canonical(gn.graph);
  CHECK(k.degree() == 2 * (2 + 3) - 2);
  // Valences recomputed from the built model: v1, v2 have 3, attachments 4.
  for (const auto& [p, c] : k.terms()) CHECK(c == static_cast<int>(gn.graph->valence(p)) - 2);
  CHECK(k[gn.mark("q0")] == 2);
  CHECK(k[gn.mark("v1")] == 1);
}

TEST_CASE("divisors reject points off the finite part") {
  auto g = mg::build_g0(mg::default_g0()).graph;
  auto mod = std::make_shared<const mg::MetricGraph>(mg::elementary_tropical_modification(*g, Point::vertex(0)));
  Divisor d(mod);
  mg::EdgeId ray = *mod->find_edge("ray0");
  CHECK_THROWS_AS(d.add(mod->point_on_edge(ray, Rat{1})), DomainError);
  CHECK_THROWS_AS(d.add(Point::vertex(*mod->find_vertex("x0"))), DomainError);
}

TEST_CASE("burning test examples") {
  auto f = g0();
  const Point v2 = f.mark("v2");
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    Point v = zoo::random_point(*f.graph, rng);
    if (v == v2) continue;
    Divisor d = f.divisor({{"v1", 1}});
    d.add(v);
    CHECK(mg::is_reduced(d, v2));
  }
  CHECK(mg::is_reduced(Divisor(f.graph), f.mark("m1")));
  CHECK_THROWS_AS(mg::is_reduced(f.divisor({{"v1", -1}}), v2), DomainError);
  // 2m0 is not v2-reduced: the fire stalls at m0 from both sides.
  CHECK_FALSE(mg::is_reduced(f.divisor({{"m0", 2}}), v2));
}

TEST_CASE("reduce examples") {
  auto f = g0();
  CHECK(mg::reduced(f.divisor({{"m0", 2}}), f.mark("v2")) == f.divisor({{"v1", 1}, {"v2", 1}}));
  Divisor r = f.divisor({{"v1", 1}, {"m1", 1}});
  CHECK(mg::reduced(r, f.mark("v2")) == r);
  // |v1 + v - v2| is empty: the v2-reduced form of v1 + v - v2 is negative at v2.
  Divisor shifted = mg::reduced(f.divisor({{"v1", 1}, {"m1", 1}, {"v2", -1}}), f.mark("v2"));
  CHECK(shifted[f.mark("v2")] < 0);
}

TEST_CASE("linear equivalence on G0") {
  auto f = g0();
  CHECK(mg::linearly_equivalent(f.divisor({{"m0", 2}}), f.divisor({{"v1", 1}, {"v2", 1}})));
  CHECK(mg::linearly_equivalent(f.divisor({{"m0", 2}}), f.divisor({{"m1", 2}})));
  CHECK(mg::linearly_equivalent(f.divisor({{"m2", 2}}), f.divisor({{"m1", 2}})));
  Divisor a = f.divisor({{"v1", 1}, {"q1", 1}});
  Divisor b = f.divisor({{"v2", 1}, {"q2", 1}});
  CHECK_FALSE(mg::linearly_equivalent(a, b));
  CHECK_FALSE(mg::linearly_equivalent(a, f.divisor({{"v1", 1}})));
  CHECK_THROWS_AS(mg::linearly_equivalent(a, Divisor(zoo::theta())), DomainError);
}

TEST_CASE("effective representatives") {
  auto f = g0();
  CHECK_FALSE(mg::has_effective_representative(f.divisor({{"v1", 1}, {"v2", 1}, {"q1", -2}})));
  CHECK(mg::has_effective_representative(f.divisor({{"v1", 1}, {"v2", 1}, {"m1", -2}})));
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i)
    CHECK(mg::has_effective_representative(zoo::random_divisor(f.graph, rng, 3, 0, 2)));
}

TEST_CASE("reduction properties on random divisors") {
  std::mt19937_64 rng(21);
  for (const auto& [name, g] : zoo::graph_zoo(4)) {
    CAPTURE(name);
    for (int i = 0; i < 15; ++i) {
      Divisor d = zoo::random_divisor(g, rng, 4, -2, 3);
      Point q = zoo::random_point(*g, rng);
      mg::Reduction red = mg::reduce(d, q);
      CHECK(red.divisor.degree() == d.degree());
      CHECK(red.divisor.is_effective_away_from(q));
      CHECK(mg::is_reduced(red.divisor, q));
      CHECK(mg::replay(red.certificate));
      CHECK(mg::reduced(red.divisor, q) == red.divisor);
      // Any other representative of the class reduces to the same divisor.
      Point p = zoo::random_point(*g, rng);
      Divisor other = mg::reduced(d, p);
      CHECK(mg::reduced(other, q) == red.divisor);
    }
  }
}

TEST_CASE("certificate replay detects tampering") {
  auto f = g0();
  mg::Reduction red = mg::reduce(f.divisor({{"m0", 2}}), f.mark("v2"));
  REQUIRE_FALSE(red.certificate.events.empty());
  mg::ReductionCertificate bad = red.certificate;
  bad.events.front().amount = bad.events.front().amount + Rat(1, 7);
  CHECK_FALSE(mg::replay(bad));
}

TEST_CASE("reduction agrees with discrete Dhar reduction") {
  std::mt19937_64 rng(31);
  int compared = 0;
  for (int trial = 0; trial < 12; ++trial) {
    auto g = zoo::random_graph(rng, 3, true);
    auto sub = oracle::subdivide(*g);
    for (int i = 0; i < 6; ++i) {
      Divisor d = zoo::random_divisor(g, rng, 4, -1, 3, 1);
      Point q = zoo::random_point(*g, rng, 1);
      Divisor metric = mg::reduced(d, q);
      oracle::Chips chips = oracle::reduce(sub.graph, sub.chips(d), sub.vertex_of(q));
      CHECK(sub.chips(metric) == chips);
      ++compared;
    }
  }
  CHECK(compared == 72);
}
