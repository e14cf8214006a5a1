#pragma once

// Small graphs and random divisors shared by the test programs.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "metricgraph/divisor.hpp"
#include "metricgraph/family.hpp"
#include "metricgraph/rank.hpp"

namespace zoo {

using mg::GraphPtr;
using mg::Rat;

inline GraphPtr make(std::vector<mg::VertexSpec> v, std::vector<mg::Edge> e) {
  return std::make_shared<const mg::MetricGraph>(std::move(v), std::move(e));
}

inline GraphPtr circle(Rat length = Rat{3}) {
  return make({{"c0"}, {"c1"}}, {{"f0", 0, 1, length / Rat{2}}, {"f1", 1, 0, length / Rat{2}}});
}

inline GraphPtr theta(Rat a = Rat{1}, Rat b = Rat{2}, Rat c = Rat{3}) {
  return make({{"v1"}, {"v2"}}, {{"e0", 0, 1, a}, {"e1", 0, 1, b}, {"e2", 0, 1, c}});
}

inline GraphPtr path_tree() {
  return make({{"a"}, {"b"}, {"c"}, {"d"}}, {{"ab", 0, 1, Rat{1}}, {"bc", 1, 2, Rat{2}}, {"bd", 1, 3, Rat{1, 2}}});
}

/// Connected graph of genus <= max_genus: a random tree plus extra edges,
/// lengths k/den with den | lcm_den (integral when integer_lengths), and an
/// optional infinite ray.
inline GraphPtr random_graph(std::mt19937_64& rng, int max_genus, bool integer_lengths, bool allow_ray = true) {
  std::uniform_int_distribution<int> nv(2, 5);
  int n = nv(rng);
  std::vector<mg::VertexSpec> vs;
  for (int i = 0; i < n; ++i) vs.push_back({"w" + std::to_string(i)});
  auto length = [&] {
    std::uniform_int_distribution<int> num(1, integer_lengths ? 3 : 7);
    std::uniform_int_distribution<int> den(1, 4);
    return integer_lengths ? Rat{num(rng)} : Rat(num(rng), den(rng));
  };
  std::vector<mg::Edge> es;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> parent(0, i - 1);
    es.push_back({"t" + std::to_string(i), static_cast<mg::VertexId>(parent(rng)), static_cast<mg::VertexId>(i), length()});
  }
  std::uniform_int_distribution<int> extra(std::min(1, max_genus), max_genus);
  int g = extra(rng);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int k = 0; k < g; ++k) {
    int a = pick(rng), b = pick(rng);
    while (b == a) b = pick(rng);
    es.push_back({"x" + std::to_string(k), static_cast<mg::VertexId>(a), static_cast<mg::VertexId>(b), length()});
  }
  if (allow_ray && std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
    vs.push_back({"inf", true});
    es.push_back({"ray", static_cast<mg::VertexId>(pick(rng)), static_cast<mg::VertexId>(n), mg::Length::infinity()});
  }
  return make(vs, es);
}

/// Random finite-part point; with a lattice denominator the offset is a
/// multiple of 1/lattice (vertices included).
inline mg::Point random_point(const mg::MetricGraph& g, std::mt19937_64& rng, int lattice = 0) {
  std::vector<mg::EdgeId> finite;
  for (mg::EdgeId e = 0; e < g.edge_count(); ++e)
    if (!g.edge(e).length.is_infinite()) finite.push_back(e);
  mg::EdgeId e = finite[std::uniform_int_distribution<std::size_t>(0, finite.size() - 1)(rng)];
  if (lattice == 0) return mg::random_rational_point(g, rng, 8);
  Rat len = g.edge(e).length.value() * Rat{lattice};
  std::uniform_int_distribution<long> k(0, static_cast<long>(len.num() / len.den()));
  return g.point_on_edge(e, Rat(k(rng), lattice));
}

/// Sum of `terms` random points with coefficients in [lo, hi].
inline mg::Divisor random_divisor(const GraphPtr& g, std::mt19937_64& rng, int terms, int lo, int hi, int lattice = 0) {
  mg::Divisor d(g);
  std::uniform_int_distribution<int> c(lo, hi);
  for (int i = 0; i < terms; ++i) d.add(random_point(*g, rng, lattice), c(rng));
  return d;
}

/// G0, G2, G3, a circle, a theta graph and five random graphs of genus <= 4.
inline std::vector<std::pair<std::string, GraphPtr>> graph_zoo(std::uint64_t seed) {
  std::vector<std::pair<std::string, GraphPtr>> out = {
      {"G0", mg::build_g0(mg::default_g0()).graph},
      {"G2", mg::build_gn(mg::default_gn(2)).graph},
      {"G3", mg::build_gn(mg::default_gn(3)).graph},
      {"circle", circle()},
      {"theta", theta()},
  };
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 5; ++i) out.push_back({"random" + std::to_string(i), random_graph(rng, 4, false)});
  return out;
}

}  // namespace zoo
