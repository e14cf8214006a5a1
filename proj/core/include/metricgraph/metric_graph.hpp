#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "metricgraph/rational.hpp"

namespace mg {

using VertexId = std::size_t;
using EdgeId = std::size_t;

/// Violated precondition of a mathematical operation (point off the graph,
/// disconnected input, negative coefficient where effectivity is required...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Edge {
  std::string name;
  VertexId u = 0;
  VertexId v = 0;
  Length length;
};

struct VertexSpec {
  std::string name;
  bool infinite_leaf = false;
};

/// A location on a metric graph: either a vertex of the stored model or an
/// interior point of an edge at an offset measured from the edge's u end.
///
/// Points built through MetricGraph::point_on_edge are canonical: offsets 0
/// and l(e) become the corresponding vertex, so structural equality is point
/// equality. Vertex points order before edge points; edge points order by
/// (edge id, offset).
struct Point {
  bool on_edge = false;
  std::size_t id = 0;
  Rat offset{0};

  static Point vertex(VertexId v) { return Point{false, v, Rat{0}}; }
  bool is_vertex() const { return !on_edge; }

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

/// One of the germs of segments leaving a point.
struct TangentDirection {
  Point base;
  EdgeId edge = 0;
  bool toward_v = true;  // travelling in the direction of increasing offset

  friend bool operator==(const TangentDirection&, const TangentDirection&) = default;
  friend auto operator<=>(const TangentDirection&, const TangentDirection&) = default;
};

struct Incidence {
  EdgeId edge;
  bool at_u;  // the vertex is the edge's u end
};

/// Finite metric graph with a chosen vertex set.
///
/// Invariants enforced at construction: connected, every edge has two
/// distinct end vertices, finite lengths are positive, an edge is infinite
/// iff one end is an infinite leaf, and each infinite leaf has exactly one
/// incident edge. Infinite edges are stored with the leaf as their v end.
/// Values are immutable once built.
class MetricGraph {
 public:
  MetricGraph(std::vector<VertexSpec> vertices, std::vector<Edge> edges);

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::string& vertex_name(VertexId v) const { return vertices_.at(v).name; }
  bool is_infinite_leaf(VertexId v) const { return vertices_.at(v).infinite_leaf; }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<VertexSpec>& vertices() const { return vertices_; }
  std::span<const Incidence> incident(VertexId v) const { return adjacency_.at(v); }

  std::optional<VertexId> find_vertex(std::string_view name) const;
  std::optional<EdgeId> find_edge(std::string_view name) const;

  /// Canonical point at `offset` from the u end of `e`. Throws DomainError
  /// when the offset is outside [0, l(e)] (or negative on an infinite edge).
  Point point_on_edge(EdgeId e, const Rat& offset) const;
  /// Point at `distance` from the endpoint `from_u ? u : v` of `e`.
  Point point_from_end(EdgeId e, bool from_u, const Rat& distance) const;

  bool contains(const Point& p) const;
  /// True when p is not an infinite leaf and does not lie on an infinite edge.
  bool in_finite_part(const Point& p) const;
  void require(const Point& p) const;

  std::size_t valence(const Point& p) const;
  std::vector<TangentDirection> tangent_directions(const Point& p) const;

  int genus() const;
  bool is_tree() const { return genus() == 0; }
  bool has_infinite_edges() const;
  Rat finite_length() const;

  /// Shortest-path distance on the finite part; nullopt if either point lies
  /// on an infinite edge or is an infinite leaf.
  std::optional<Rat> distance(const Point& a, const Point& b) const;

  /// "v1" or "e1@3/4".
  std::string describe(const Point& p) const;

  friend bool operator==(const MetricGraph& a, const MetricGraph& b) {
    return a.vertex_specs_equal(b) && a.edges_equal(b);
  }

 private:
  bool vertex_specs_equal(const MetricGraph& o) const;
  bool edges_equal(const MetricGraph& o) const;

  std::vector<VertexSpec> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

/// Relabelling of points from a graph onto a refinement of it.
class PointMap {
 public:
  PointMap() = default;
  Point operator()(const Point& p) const;

 private:
  friend struct RefineAccess;
  struct Piece {
    Rat start;
    EdgeId edge;
  };
  std::vector<VertexId> vertex_map_;
  std::vector<std::vector<Piece>> edge_pieces_;  // per old edge, sorted by start
  std::vector<std::vector<std::pair<Rat, VertexId>>> cut_vertices_;
};

struct Refinement {
  MetricGraph graph;
  PointMap map;
};

/// Subdivides `g` so every point of `points` becomes a vertex. New vertices
/// get `names[i]` when given, else "<edge>@<offset>"; split edges are named
/// "<edge>_0", "<edge>_1", ... in order from their u end.
Refinement refine(const MetricGraph& g, std::span<const Point> points,
                  std::span<const std::string> names = {});

/// Removes infinite edges and infinite leaves. The map sends points of the
/// finite part to the retract.
Refinement retract(const MetricGraph& g);

/// True iff the union of the closed edges is homeomorphic to a circle.
bool is_loop_subgraph(const MetricGraph& g, std::span<const EdgeId> edges);

/// Edges whose removal disconnects the graph (multi-edge aware).
std::vector<bool> bridges(const MetricGraph& g);

}  // namespace mg
