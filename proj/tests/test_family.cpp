#include "doctest.h"

#include <random>

#include "metricgraph/family.hpp"
#include "metricgraph/family_checks.hpp"
#include "metricgraph/rank.hpp"
#include "support/zoo.hpp"

using mg::Divisor;
using mg::DomainError;
using mg::Point;
using mg::Rat;

TEST_CASE("G0 construction") {
  mg::G0Spec s;
  s.q1 = Rat(1, 2);
  s.q2 = Rat(3, 4);
  auto f = mg::build_g0(s);
  const auto& g = *f.graph;
  CHECK(g.genus() == 2);
  CHECK(g.finite_length() == Rat{10});
  CHECK(*g.distance(f.mark("v1"), f.mark("m1")) == Rat(3, 2));
  CHECK(*g.distance(f.mark("v2"), f.mark("q2")) == Rat(3, 4));
  CHECK(*g.distance(f.mark("v1"), f.mark("q1")) == Rat(1, 2));
  CHECK(*g.distance(f.mark("v1"), f.mark("v2")) == Rat{2});
  CHECK(f.mark("m0") == f.mark("q0"));
  CHECK(*g.distance(f.mark("q1"), f.mark("m1")) == *g.distance(f.mark("q1p"), f.mark("m1")));
}

TEST_CASE("G0 spec validation") {
  mg::G0Spec s;
  s.l1 = s.l0;
  CHECK_THROWS_AS(mg::build_g0(s), DomainError);
  s = mg::G0Spec{};
  s.q1 = s.l1 / Rat{2};
  CHECK_THROWS_AS(mg::build_g0(s), DomainError);
  s = mg::G0Spec{};
  s.q2 = Rat{0};
  CHECK_THROWS_AS(mg::build_g0(s), DomainError);
  s = mg::G0Spec{};
  s.l2 = Rat{-5};
  CHECK_THROWS_AS(mg::build_g0(s), DomainError);
  for (const auto& v : mg::g0_variants()) CHECK_NOTHROW(mg::validate(v));
}

TEST_CASE("G_n construction") {
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    auto f = mg::build_gn(mg::default_gn(n));
    CHECK(f.graph->genus() == n + 3);
    CHECK(f.attachments.size() == static_cast<std::size_t>(n + 1));
    for (const Point& q : f.attachments) CHECK(f.graph->valence(q) == 4);
    CHECK(f.warnings.empty() == (n != 1));
    for (int i = 0; i <= n; ++i) {
      CHECK(mg::is_loop_subgraph(*f.graph, f.subgraph("gamma" + std::to_string(i))));
      CHECK(f.loop_position(i, f.loop_point(i, Rat(1, 4))) == Rat(1, 4));
      CHECK(f.loop_of(f.loop_point(i, Rat(1, 3))) == i);
    }
    CHECK(f.graph->finite_length() == Rat{10} + Rat{n + 1});
  }
}

TEST_CASE("G_n spec validation") {
  CHECK_THROWS_AS(mg::build_gn(mg::default_gn(0)), DomainError);
  auto s = mg::default_gn(3);
  s.extra = {{0, Rat(1, 2)}, {1, Rat{1}}};
  CHECK_THROWS_AS(mg::build_gn(s), DomainError);
  s.extra = {{0, Rat{1}}};  // m0
  CHECK_THROWS_AS(mg::build_gn(s), DomainError);
  s.extra = {{1, Rat(5, 4)}};
  CHECK_NOTHROW(mg::build_gn(s));
  s.loops = {Rat{1}, Rat{1}};
  CHECK_THROWS_AS(mg::build_gn(s), DomainError);
}

TEST_CASE("elementary tropical modification") {
  auto f = mg::build_g0(mg::default_g0());
  const auto& g = *f.graph;
  auto once = mg::elementary_tropical_modification(g, f.mark("m1"));
  CHECK(once.genus() == g.genus());
  CHECK(once.has_infinite_edges());
  CHECK(once.vertex_count() == g.vertex_count() + 2);
  auto at = *once.find_vertex("e1@3/2");
  CHECK(once.valence(Point::vertex(at)) == 3);
  auto twice = mg::elementary_tropical_modification(once, Point::vertex(at));
  CHECK(twice.valence(Point::vertex(at)) == 4);
  CHECK(twice.find_edge("ray1"));
  auto r = mg::retract(twice);
  CHECK(r.graph.genus() == g.genus());
  CHECK(r.graph.finite_length() == g.finite_length());
  CHECK(*r.graph.distance(r.map(f.mark("v1")), r.map(Point::vertex(at))) == Rat(3, 2));
}

TEST_CASE("modification enumeration counts") {
  auto f = mg::build_g0(mg::default_g0());
  auto sites = mg::attachment_sites(*f.graph, 1);
  const std::size_t k = sites.size();
  CHECK(k == 2 + 1 + 2 + 4);  // vertices plus interior integer offsets
  CHECK(mg::enumerate_modifications(*f.graph, sites, 0).size() == 1);
  CHECK(mg::enumerate_modifications(*f.graph, sites, 1).size() == 1 + k);
  auto all = mg::enumerate_modifications(*f.graph, sites, 2);
  CHECK(all.size() == 1 + k + k * (k + 1) / 2);
  std::size_t two = 0;
  for (const auto& m : all) {
    CHECK(m.genus() == 2);
    std::size_t rays = 0;
    for (const auto& e : m.edges()) rays += e.length.is_infinite();
    two += rays == 2;
  }
  CHECK(two == k * (k + 1) / 2);
}

TEST_CASE("rank is unchanged by modification") {
  std::mt19937_64 rng(41);
  auto f = mg::build_g0(mg::default_g0());
  auto sites = mg::attachment_sites(*f.graph, 2);
  for (int i = 0; i < 20; ++i) {
    Divisor d = zoo::random_divisor(f.graph, rng, 3, 0, 2, 2);
    std::size_t s = std::uniform_int_distribution<std::size_t>(0, sites.size() - 1)(rng);
    std::vector<std::size_t> chosen = {s};
    auto mod = std::make_shared<const mg::MetricGraph>(mg::modify_at(*f.graph, sites, chosen));
    auto back = mg::refine(*f.graph, std::span<const Point>(&sites[s], 1));
    Divisor moved(mod);
    // The modification keeps the refined model's ids and appends the ray.
    for (const auto& [p, c] : d.terms()) moved.add(back.map(p), c);
    CHECK(mg::rank(moved) == mg::rank(d));
  }
}

TEST_CASE("G0 pencil and common g13 on all variants") {
  for (const auto& s : mg::g0_variants()) {
    auto pencil = mg::check_g0_pencil(s);
    CHECK(pencil.verdict);
    CHECK(pencil.mode == mg::Mode::Exact);
    auto g13 = mg::check_no_common_g13(s);
    CHECK(g13.verdict);
    CHECK(g13.mode == mg::Mode::Exact);
  }
}

TEST_CASE("pencils through pairs on G_n") {
  std::mt19937_64 rng(43);
  auto f = mg::build_gn(mg::default_gn(3));
  for (int i = 0; i < 25; ++i) {
    Divisor fd = zoo::random_divisor(f.graph, rng, 2, 1, 1);
    auto e = mg::pencil_through(f, fd);
    REQUIRE(e);
    CHECK(e->degree() == 4);
    CHECK((*e - fd).is_effective());
    CHECK(mg::rank_at_least(*e, 1));
  }
  CHECK(mg::check_no_g12(mg::default_gn(3)).verdict);
}
