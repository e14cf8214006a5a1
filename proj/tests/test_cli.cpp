#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "metricgraph/family.hpp"
#include "mgraph/claims.hpp"
#include "mgraph/io.hpp"
#include "mgraph/report.hpp"
#include "support/zoo.hpp"

using mgraph::ParseError;

namespace {

struct DotCounts {
  int nodes = 0;
  int edges = 0;
};

DotCounts count_dot(const std::string& dot) {
  DotCounts c;
  std::istringstream in(dot);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find(" -- ") != std::string::npos) ++c.edges;
    else if (line.rfind("  \"", 0) == 0) ++c.nodes;
  }
  return c;
}

void expect_parse_error(std::string_view text, std::size_t line, std::size_t column) {
  try {
    mgraph::parse_graph_document(text);
    FAIL("no parse error for: " << text);
  } catch (const ParseError& e) {
    CHECK(e.line() == line);
    CHECK(e.column() == column);
  }
}

}  // namespace

TEST_CASE("graph files round-trip") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 50; ++i) {
    auto g = zoo::random_graph(rng, 4, false);
    std::string text = mgraph::emit_graph(*g);
    auto loaded = mgraph::load_graph_text(text);
    CHECK(*loaded.graph == *g);
    CHECK(mgraph::emit_graph(*loaded.graph) == text);
  }
}

TEST_CASE("family files round-trip") {
  for (const auto& spec : mg::perturbed_gn(3)) {
    auto loaded = mgraph::load_graph_text(mgraph::emit_family(spec));
    REQUIRE(loaded.family);
    CHECK(*loaded.graph == *mg::build_gn(spec).graph);
    CHECK(loaded.marks.count("q3") == 1);
  }
  auto g0 = mgraph::load_graph_text(mgraph::emit_family(mg::default_g0()));
  CHECK(*g0.graph == *mg::build_g0(mg::default_g0()).graph);
  auto n4 = mgraph::load_graph_text("metricgraph 1\nfamily gn\n", 4);
  CHECK(n4.graph->genus() == 7);
}

TEST_CASE("divisors round-trip through text") {
  std::mt19937_64 rng(59);
  for (int i = 0; i < 50; ++i) {
    auto g = zoo::random_graph(rng, 3, false);
    auto loaded = mgraph::load_graph_text(mgraph::emit_graph(*g));
    mg::Divisor d = zoo::random_divisor(g, rng, 4, -3, 3);
    mg::Divisor back = mgraph::parse_divisor(loaded, d.str());
    CHECK(back.terms() == d.terms());
    CHECK(back.str() == d.str());
  }
}

TEST_CASE("point and divisor syntax") {
  auto g = mgraph::load_graph_file(MGRAPH_DATA_DIR "/g0.graph");
  CHECK(mgraph::parse_point(g, "m0") == g.marks.at("m0"));
  CHECK(mgraph::parse_point(g, "v2") == mg::Point::vertex(1));
  CHECK(mgraph::parse_point(g, "e1@3/2") == g.marks.at("m1"));
  CHECK(mgraph::parse_divisor(g, "0").terms().empty());
  CHECK(mgraph::parse_divisor(g, "2*m0 - v1").degree() == 1);
  CHECK_THROWS_AS(mgraph::parse_point(g, "nowhere"), mg::DomainError);
  CHECK_THROWS_AS(mgraph::parse_point(g, "e0@7"), mg::DomainError);
  try {
    mgraph::parse_divisor(g, "e0@1/0");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 6);
  }
  CHECK_THROWS_AS(mgraph::parse_divisor(g, "2**m0"), ParseError);
}

TEST_CASE("parse errors carry positions") {
  expect_parse_error("graph 1\n", 1, 1);
  expect_parse_error("metricgraph 1\nvertex a\nedge e a\n", 3, 9);
  expect_parse_error("metricgraph 1\nvertex a\nvertex b\nedge e a b 1/0\n", 4, 14);
  expect_parse_error("metricgraph 1\nfamily gn l0=x\n", 2, 14);
  expect_parse_error("metricgraph 1\nbogus\n", 2, 1);
  expect_parse_error("metricgraph 1\nvertex a\nvertex b\nedge e a b 0\n", 4, 12);
  // Well-formed but disconnected.
  CHECK_THROWS_AS(mgraph::load_graph_text("metricgraph 1\nvertex a\nvertex b\nvertex c\nedge e a b 1\n"),
                  mg::DomainError);
}

TEST_CASE("dot output") {
  auto g0 = mgraph::load_graph_file(MGRAPH_DATA_DIR "/g0.graph");
  auto c = count_dot(mgraph::emit_dot(*g0.graph));
  CHECK(c.nodes == 2);
  CHECK(c.edges == 3);
  auto g6 = mg::build_gn(mg::default_gn(6)).graph;
  auto c6 = count_dot(mgraph::emit_dot(*g6));
  CHECK(c6.edges - c6.nodes + 1 == 9);
  auto tree = mgraph::load_graph_file(MGRAPH_DATA_DIR "/tree.graph");
  auto ct = count_dot(mgraph::emit_dot(*tree.graph));
  CHECK(ct.edges - ct.nodes + 1 == 0);
  CHECK(mgraph::emit_dot(*tree.graph).find("shape=point") != std::string::npos);
}

TEST_CASE("morphism files") {
  auto m = mgraph::load_morphism_file(MGRAPH_DATA_DIR "/circle_cover.morphism");
  CHECK(mg::is_harmonic(m));
  auto again = mgraph::parse_morphism(mgraph::emit_morphism(m, "a", "b"),
                                      mgraph::load_graph_text(mgraph::emit_graph(*m.source)),
                                      mgraph::load_graph_text(mgraph::emit_graph(*m.target)));
  CHECK(again.vertex_map == m.vertex_map);
  REQUIRE(again.edge_map.size() == m.edge_map.size());
  for (std::size_t i = 0; i < m.edge_map.size(); ++i) {
    CHECK(again.edge_map[i].edge == m.edge_map[i].edge);
    CHECK(again.edge_map[i].forward == m.edge_map[i].forward);
    CHECK(again.edge_map[i].dilation == m.edge_map[i].dilation);
  }
}

TEST_CASE("report exit codes") {
  mgraph::Report r;
  r.command = "test";
  mg::ClaimResult ok;
  ok.claim = "a";
  ok.verdict = true;
  r.parts = {ok};
  CHECK(mgraph::exit_code(r) == mgraph::kOk);
  mg::ClaimResult open = ok;
  open.verdict = false;
  open.mode = mg::Mode::Sampled;
  r.parts.push_back(open);
  CHECK(mgraph::exit_code(r) == mgraph::kInconclusive);
  CHECK(r.mode() == mg::Mode::Sampled);
  r.parts.back().counterexamples = {"x"};
  CHECK(mgraph::exit_code(r) == mgraph::kFalsified);
  CHECK(mgraph::to_json(r).find("\"seconds\"") == std::string::npos);
  r.seconds = 1.5;
  CHECK(mgraph::to_json(r).find("\"seconds\"") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
  mgraph::VerifyOptions opt;
  opt.budget_mods = 1;
  opt.subdiv = 1;
  opt.jobs = 3;
  for (const std::string id : {"lemma1", "lemma3", "theorem"}) {
    auto a = mgraph::to_json(mgraph::verify_claim(id, opt));
    opt.jobs = 1;
    auto b = mgraph::to_json(mgraph::verify_claim(id, opt));
    opt.jobs = 3;
    CHECK(a == b);
  }
  CHECK_THROWS_AS(mgraph::verify_claim("nope", opt), std::invalid_argument);
  const auto& ids = mgraph::claim_ids();
  CHECK(std::find(ids.begin(), ids.end(), "corollary") != ids.end());
}

TEST_CASE("subtree cases match their labels") {
  auto cases = mgraph::subtree_cases();
  CHECK(cases.size() == 10);
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CHECK(mg::subtree_into_loop_test(c.morphism, c.subtree, c.t).holds == !c.maps_into_loop);
  }
  CHECK(mgraph::check_subtree_cases().verdict);
}
