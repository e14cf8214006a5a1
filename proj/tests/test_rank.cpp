#include "doctest.h"

#include <algorithm>
#include <random>

#include "metricgraph/family.hpp"
#include "metricgraph/family_checks.hpp"
#include "metricgraph/rank.hpp"
#include "support/discrete_oracle.hpp"
#include "support/zoo.hpp"

using mg::Divisor;
using mg::DomainError;
using mg::Point;
using mg::Rat;

namespace {

mg::FamilyGraph g0() { return mg::build_g0(mg::default_g0()); }

mg::SearchBudget small_budget(int denominator = 2) {
  mg::SearchBudget b;
  b.grid.denominator = denominator;
  b.max_candidates = 200'000;
  return b;
}

}  // namespace

TEST_CASE("rank examples on G0") {
  auto f = g0();
  CHECK(mg::rank(f.divisor({{"v1", 1}, {"v2", 1}})) == 1);
  CHECK(mg::rank(f.divisor({{"m0", 2}})) == 1);
  CHECK(mg::rank(f.divisor({{"v1", 1}, {"m1", 1}})) == 0);
  CHECK(mg::rank(f.divisor({{"v1", 1}, {"q2", 1}})) == 0);
  CHECK(mg::rank(f.divisor({{"v1", -1}})) == -1);
  CHECK(mg::rank(Divisor(f.graph)) == 0);
  CHECK(mg::rank(f.divisor({{"v1", 2}, {"v2", 2}})) == 2);
  CHECK(mg::rank(f.divisor({{"v1", 1}, {"v2", 1}, {"q1", -2}})) == -1);
}

TEST_CASE("rank on genus 0 and 1") {
  auto t = zoo::path_tree();
  Divisor d(t);
  d.add(Point::vertex(0), 3);
  d.add(Point::vertex(2), -1);
  CHECK(mg::rank(d) == 2);
  auto c = zoo::circle();
  Divisor one(c);
  one.add(Point::vertex(0));
  CHECK(mg::rank(one) == 0);
  one.add(c->point_on_edge(0, Rat(1, 3)));
  CHECK(mg::rank(one) == 1);
}

TEST_CASE("rank_at_least agrees with rank") {
  std::mt19937_64 rng(17);
  for (const auto& [name, g] : zoo::graph_zoo(2)) {
    CAPTURE(name);
    for (int i = 0; i < 4; ++i) {
      Divisor d = zoo::random_divisor(g, rng, 3, 0, 2);
      int r = mg::rank(d);
      CHECK(mg::rank_at_least(d, r));
      CHECK_FALSE(mg::rank_at_least(d, r + 1));
    }
  }
}

TEST_CASE("Riemann-Roch holds on random divisors") {
  std::mt19937_64 rng(23);
  for (const auto& [name, g] : zoo::graph_zoo(6)) {
    if (g->genus() > 3) continue;
    CAPTURE(name);
    for (int i = 0; i < 4; ++i) {
      Divisor d = zoo::random_divisor(g, rng, 3, -1, 2);
      CAPTURE(d.str());
      CHECK(mg::riemann_roch_check(d));
      int lhs = mg::rank(d) - mg::rank(mg::canonical(g) - d);
      CHECK(lhs == d.degree() - g->genus() + 1);
    }
  }
}

TEST_CASE("rank is a class invariant and grows by at most one") {
  std::mt19937_64 rng(29);
  auto f = g0();
  for (int i = 0; i < 15; ++i) {
    Divisor d = zoo::random_divisor(f.graph, rng, 3, 0, 1);
    int r = mg::rank(d);
    CHECK(mg::rank(mg::reduced(d, zoo::random_point(*f.graph, rng))) == r);
    Divisor more = d;
    more.add(zoo::random_point(*f.graph, rng));
    int r2 = mg::rank(more);
    CHECK(r2 >= r);
    CHECK(r2 <= r + 1);
  }
}

TEST_CASE("rank agrees with the discrete oracle on integer graphs") {
  std::mt19937_64 rng(37);
  int compared = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto g = zoo::random_graph(rng, 2, true);
    auto sub = oracle::subdivide(*g);
    for (int i = 0; i < 5; ++i) {
      Divisor d = zoo::random_divisor(g, rng, 3, -1, 2, 1);
      if (d.degree() > 4) continue;
      CAPTURE(d.str());
      CHECK(mg::rank(d) == oracle::rank(sub.graph, sub.chips(d)));
      ++compared;
    }
  }
  auto f = g0();
  auto sub = oracle::subdivide(*f.graph, Rat{4});
  for (auto terms : {std::vector<std::pair<std::string, int>>{{"v1", 1}, {"v2", 1}},
                     {{"m1", 1}, {"q2", 1}, {"v1", 1}},
                     {{"m0", 1}, {"m1", 1}, {"m2", 1}, {"v2", -1}},
                     {{"q1", 2}, {"q2", 1}}}) {
    Divisor d(f.graph);
    for (const auto& [n, c] : terms) d.add(f.mark(n), c);
    CHECK(mg::rank(d) == oracle::rank(sub.graph, sub.chips(d)));
    ++compared;
  }
  CHECK(compared >= 30);
}

TEST_CASE("rank-determining sets") {
  auto f = g0();
  auto rds = mg::RankDeterminingSet::vertices_of(*f.graph);
  CHECK(rds.points().size() == 2);
  CHECK_THROWS_AS(mg::RankDeterminingSet(*f.graph, {f.mark("v1")}), DomainError);
  mg::RankDeterminingSet wider(*f.graph, {f.mark("v1"), f.mark("v2"), f.mark("m1")});
  Divisor d = f.divisor({{"v1", 1}, {"v2", 1}});
  CHECK(mg::rank(d, wider) == mg::rank(d, rds));
}

TEST_CASE("very special divisors and Clifford index") {
  auto f = g0();
  Divisor k = f.divisor({{"v1", 1}, {"v2", 1}});
  // rank 1 = deg - g + 1: special but not very special.
  CHECK_FALSE(mg::is_very_special(k));
  CHECK_FALSE(mg::is_very_special(Divisor(f.graph)));
  CHECK_THROWS_AS(mg::clifford_index(k), DomainError);

  auto gn = mg::build_gn(mg::default_gn(2));
  Divisor e = gn.divisor({{"m0", 2}, {"q1", 2}});
  REQUIRE(mg::rank(e) == 1);
  CHECK(mg::is_very_special(e));
  CHECK(mg::clifford_index(e) == 2);
}

TEST_CASE("graph Clifford index of graphs without very special divisors") {
  auto tree = mg::graph_clifford_index(zoo::path_tree(), small_budget());
  CHECK_FALSE(tree.value.has_value());
  auto f = g0();
  auto c = mg::graph_clifford_index(f.graph, small_budget());
  CHECK_FALSE(c.value.has_value());
}

TEST_CASE("searching for g^r_d") {
  auto f = g0();
  auto g12 = mg::no_grd_exists(f.graph, 1, 2, small_budget());
  CHECK_FALSE(g12.verdict);
  CHECK_FALSE(g12.witnesses.empty());

  auto gn = mg::build_gn(mg::default_gn(2));
  CHECK(mg::no_grd_exists(gn.graph, 1, 2, small_budget()).verdict);
  CHECK(mg::no_grd_exists(gn.graph, 1, 3, small_budget()).verdict);
  auto found = mg::search_grd(gn.graph, 1, 4, small_budget());
  REQUIRE(found.witness);
  CHECK(mg::rank(*found.witness) >= 1);
  CHECK(found.witness->degree() == 4);
}

TEST_CASE("w^r_d brackets") {
  auto gn = mg::build_gn(mg::default_gn(2));
  auto none = mg::wrd_value(gn.graph, 1, 2, small_budget());
  REQUIRE(none.value);
  CHECK(*none.value == -1);
  // The upper check finds an F of degree 3 not contained in any g^1_4.
  auto upper = mg::check_w14_upper(mg::default_gn(2), small_budget(4));
  CHECK(upper.verdict);
  CHECK_FALSE(upper.witnesses.empty());
}

TEST_CASE("multiset enumeration") {
  int count = 0;
  mg::for_each_multiset(4, 2, [&](std::span<const std::size_t> s) {
    CHECK(s[0] <= s[1]);
    ++count;
    return true;
  });
  CHECK(count == 10);
  count = 0;
  CHECK_FALSE(mg::for_each_multiset(4, 2, [&](std::span<const std::size_t>) { return ++count < 3; }));
  CHECK(count == 3);
}

TEST_CASE("sampling grid is sorted and contains the vertices") {
  auto f = g0();
  mg::GridSpec spec;
  spec.denominator = 2;
  spec.random_points = 5;
  spec.seed = 4;
  auto grid = mg::sampling_grid(*f.graph, spec);
  CHECK(std::is_sorted(grid.begin(), grid.end()));
  CHECK(std::adjacent_find(grid.begin(), grid.end()) == grid.end());
  CHECK(grid[0] == f.mark("v1"));
  CHECK(std::find(grid.begin(), grid.end(), f.mark("m2")) != grid.end());
  CHECK(grid == mg::sampling_grid(*f.graph, spec));
}
