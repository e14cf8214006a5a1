#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metricgraph/family.hpp"
#include "metricgraph/harmonic.hpp"

namespace mgraph {

/// Malformed input, with a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

/// Parameters of a "family" line: kind g0 or gn, key=value pairs in file order.
struct FamilyStanza {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;
};

/// Syntax tree of a graph file before the graph is built.
///
///   metricgraph 1
///   vertex v1
///   vertex x leaf
///   edge e0 v1 v2 3/2
///   edge ray v1 x inf
///   mark p e0@1/2
///   family gn n=3 l0=2 l1=3 l2=5 q1=1/2 q2=1/2 loops=1,1,1,1
///
/// '#' starts a comment. A family line replaces vertex and edge lines.
struct GraphDocument {
  int version = 1;
  std::vector<mg::VertexSpec> vertices;
  std::vector<mg::Edge> edges;
  std::vector<std::pair<std::string, std::string>> marks;  // name, point text
  std::optional<FamilyStanza> family;
};

GraphDocument parse_graph_document(std::string_view text);

/// A graph ready for use: the built graph, its named points and, for family
/// files, the construction.
struct LoadedGraph {
  mg::GraphPtr graph;
  std::map<std::string, mg::Point, std::less<>> marks;
  std::optional<mg::FamilyGraph> family;
  std::optional<mg::GnSpec> gn;
  std::optional<mg::G0Spec> g0;
};

/// Builds the graph; `n` overrides the loop count of a gn family. Domain
/// violations (bad lengths, disconnected graphs) throw mg::DomainError.
LoadedGraph load_graph(const GraphDocument& doc, std::optional<int> n = std::nullopt);
LoadedGraph load_graph_text(std::string_view text, std::optional<int> n = std::nullopt);
LoadedGraph load_graph_file(const std::string& path, std::optional<int> n = std::nullopt);
std::string read_file(const std::string& path);

/// Plain vertex/edge listing with the given marks.
std::string emit_graph(const mg::MetricGraph& g, const std::map<std::string, mg::Point, std::less<>>& marks = {});
std::string emit_family(const mg::GnSpec& spec);
std::string emit_family(const mg::G0Spec& spec);

/// Point syntax: a mark name, a vertex name, or edge@offset with the offset
/// measured from the edge's first end.
mg::Point parse_point(const LoadedGraph& g, std::string_view text);

/// Sums of signed integer multiples of points: "2*m0 - v1 + e1@3/4", or "0".
mg::Divisor parse_divisor(const LoadedGraph& g, std::string_view text);

/// Morphism files refer to two graph files, relative to the morphism file:
///
///   morphism 1
///   source a.graph
///   target b.graph
///   vertex u -> x
///   edge e -> f dilation 2
///   edge e2 -> f reversed
///   edge e3 -> collapse x
mg::GraphMorphism load_morphism_file(const std::string& path);
mg::GraphMorphism parse_morphism(std::string_view text, const LoadedGraph& source, const LoadedGraph& target);
std::string emit_morphism(const mg::GraphMorphism& m, const std::string& source_path, const std::string& target_path);

/// Graphviz description with edge lengths as labels; infinite leaves are
/// drawn as points.
std::string emit_dot(const mg::MetricGraph& g, const std::string& name = "G");

}  // namespace mgraph
