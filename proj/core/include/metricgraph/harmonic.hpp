#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "metricgraph/claim.hpp"
#include "metricgraph/divisor.hpp"

namespace mg {

/// Image of one source edge: a whole target edge traversed in a given
/// direction with an integer dilation, or a single target vertex.
struct EdgeImage {
  bool collapsed = false;
  EdgeId edge = 0;       // target edge when not collapsed
  bool forward = true;   // source u maps to target u
  int dilation = 1;      // 0 exactly when collapsed
  VertexId vertex = 0;   // target vertex when collapsed

  static EdgeImage onto(EdgeId e, bool forward, int dilation) { return {false, e, forward, dilation, 0}; }
  static EdgeImage collapse(VertexId v) { return {true, 0, true, 0, v}; }
};

/// Morphism between two models: vertices go to vertices and every source
/// edge covers one whole target edge or collapses to a vertex.
struct GraphMorphism {
  GraphPtr source;
  GraphPtr target;
  std::vector<VertexId> vertex_map;
  std::vector<EdgeImage> edge_map;
};

struct MorphismCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Validates vertex/edge incidence, length compatibility l(f) = d l(e) and
/// the collapse conventions.
MorphismCheck check_morphism(const GraphMorphism& m);
bool is_morphism(const GraphMorphism& m);
/// Every dilation is positive.
bool is_finite(const GraphMorphism& m);

/// Sum of source dilations over one target direction at one source vertex.
struct DirectionSum {
  VertexId source_vertex = 0;
  EdgeId target_edge = 0;
  bool at_u = true;  // direction leaves the target edge's u end
  int sum = 0;
};

struct HarmonicCertificate {
  bool harmonic = false;
  std::string violation;              // first failure when not harmonic
  std::vector<int> local_degree;      // per source vertex
  std::vector<DirectionSum> table;    // every (source vertex, target direction)
  int degree = 0;                     // global degree when harmonic
};

/// Checks harmonicity at every source vertex (interior edge points are
/// harmonic with local degree equal to the dilation), surjectivity, and that
/// fiber sums agree over every target vertex and every target edge.
HarmonicCertificate check_harmonic(const GraphMorphism& m);
bool is_harmonic(const GraphMorphism& m);

/// Sum of local degrees over the preimage of a target point.
int fiber_degree(const GraphMorphism& m, const Point& target_point);

/// second after first; first.target must equal second.source.
GraphMorphism compose(const GraphMorphism& first, const GraphMorphism& second);

/// Result of the subtree test on a finite morphism.
struct SubtreeTest {
  bool holds = true;               // no edge of the subtree lands in a loop
  std::vector<std::string> trace;  // growth steps for the first offending edge
};

/// For a subtree T' (given by its source edges) that meets the rest of the
/// source only at the vertex t, tests that no subtree of T' maps into a loop
/// of the target. An edge maps into a loop iff its image is not a bridge.
/// When one does, the trace extends it through leaves q != t along the
/// other loop direction until harmonicity fails or l(T) exceeds
/// deg * l(loop). Throws DomainError naming a violated hypothesis.
SubtreeTest subtree_into_loop_test(const GraphMorphism& m, const std::vector<EdgeId>& subtree, VertexId t);

enum class RejectReason {
  GenusObstruction,  // quotient genus is not 1
  LengthClash,       // the involution moves an edge onto one of another length
  VerificationFailed,
};
const char* to_string(RejectReason r);

/// Combinatorial involution of the essential model (vertices of valence
/// other than 2, edges = maximal chains between them).
struct EssentialInvolution {
  std::vector<std::size_t> vertex;  // permutation of essential vertices
  std::vector<std::size_t> edge;    // permutation of essential edges
  std::vector<bool> reversed;       // edge i is traversed backwards onto edge[i]
};

struct Rejection {
  std::size_t modification = 0;  // index into the site-set enumeration
  std::string sites;             // attachment points of the modification
  std::string involution;        // readable description
  EssentialInvolution data;
  RejectReason reason = RejectReason::GenusObstruction;
  std::string detail;
};

struct CoverWitness {
  std::size_t modification = 0;
  std::string sites;
  std::string involution;
  GraphMorphism morphism;
};

/// Named chains of edges of the unmodified graph (for example the three
/// v1-v2 paths); used to tag length clashes between them.
struct NamedPath {
  std::string name;
  std::vector<EdgeId> edges;
};

struct CoverSearchBudget {
  int max_attachments = 2;  // B
  int denominator = 8;      // attachment sites at offsets k/denominator
  int jobs = 1;
};

struct CoverSearchResult {
  ClaimResult claim;
  std::vector<Rejection> log;
  std::vector<CoverWitness> witnesses;
  std::size_t modifications = 0;
  std::size_t involutions = 0;
  bool boundary_case = false;  // two named paths have equal length
};

/// Searches modifications with at most B infinite edges at grid sites for a
/// finite harmonic morphism of degree 2 onto a genus-1 graph. Such a
/// morphism is the quotient by an isometric involution (swapped edges get
/// dilation 1, pointwise fixed edges dilation 2), so for every modification
/// all involutions of its essential model are enumerated and either
/// rejected with a reason or turned into a verified witness morphism.
CoverSearchResult search_degree2_to_genus1(const MetricGraph& g, const std::vector<NamedPath>& paths,
                                           const CoverSearchBudget& budget);

/// Recomputes a logged rejection from scratch on the rebuilt modification.
bool recheck_rejection(const MetricGraph& g, const CoverSearchBudget& budget, const Rejection& r);

/// Theta graph with edges of length 2, 2, 2: admits a degree-2 cover of a
/// circle, used to show the search is not vacuous.
MetricGraph symmetric_control_graph();

}  // namespace mg
