#pragma once

#include <array>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metricgraph/divisor.hpp"

namespace mg {

/// Theta graph on v1, v2 with edges e0, e1, e2 (all oriented v1 -> v2).
struct G0Spec {
  Rat l0{2}, l1{3}, l2{5};
  Rat q1{1, 2};  // offset of q1 from v1 on e1, strictly below l1/2
  Rat q2{1, 2};  // offset of q2 from v2 on e2, strictly below l2/2
};

/// A point of G0 given as an edge index (0, 1, 2) and an offset from v1.
struct G0Point {
  int edge = 0;
  Rat offset;
};

/// G0 with loops attached at m0 = q0, q1, ..., qn.
struct GnSpec {
  G0Spec base;
  int n = 2;
  std::vector<G0Point> extra;  // q3..qn; generated when empty
  std::vector<Rat> loops;      // lengths of gamma0..gamman; all 1 when empty
};

/// A constructed family member with named points and subgraphs.
struct FamilyGraph {
  GraphPtr graph;
  int n = 0;  // number of loops minus one; 0 for G0 without loops
  bool has_loops = false;
  std::map<std::string, Point, std::less<>> marks;
  std::map<std::string, std::vector<EdgeId>, std::less<>> subgraphs;
  std::vector<Rat> loop_lengths;
  std::vector<Point> attachments;                 // q0..qn
  std::vector<G0Point> attachment_coords;         // q0..qn as points of G0
  std::vector<std::array<EdgeId, 2>> loop_edges;  // g<i>_0: q_i -> a_i, g<i>_1: a_i -> q_i
  std::vector<VertexId> loop_aux;                 // a_i
  std::vector<std::string> warnings;

  const Point& mark(std::string_view name) const;
  const std::vector<EdgeId>& subgraph(std::string_view name) const;
  /// Divisor from (mark, coefficient) pairs.
  Divisor divisor(std::initializer_list<std::pair<std::string_view, int>> terms) const;
  /// Index i of the loop gamma_i whose interior contains p, or -1.
  int loop_of(const Point& p) const;
  /// Position of p on gamma_i measured from q_i in [0, L_i).
  Rat loop_position(int i, const Point& p) const;
  /// Point of gamma_i at position s (taken modulo L_i).
  Point loop_point(int i, const Rat& s) const;
};

G0Spec default_g0();
/// Default G_n spec: default G0, generated q3..qn, unit loops.
GnSpec default_gn(int n);
/// Two further specs with other lengths, marks and loop lengths.
std::vector<GnSpec> perturbed_gn(int n);
/// Length triples used for repeated G0 checks (default first).
std::vector<G0Spec> g0_variants();

/// Throws DomainError naming the violated condition.
void validate(const G0Spec& spec);

FamilyGraph build_g0(const G0Spec& spec);
/// n >= 1; n == 1 is built with a warning.
FamilyGraph build_gn(const GnSpec& spec);

/// Attaches one infinite edge at p (a point of the finite part). Edge points
/// become vertices; the new leaf and edge are named "x<k>" and "ray<k>".
MetricGraph elementary_tropical_modification(const MetricGraph& g, const Point& p);

/// Attachment sites used for modification enumeration: non-leaf vertices
/// and offsets k/denominator on every finite edge, sorted.
std::vector<Point> attachment_sites(const MetricGraph& g, int denominator);

/// Site multisets of size 0..max_attachments in enumeration order; index
/// ranges of the result can be processed independently.
std::vector<std::vector<std::size_t>> modification_site_sets(std::size_t site_count, int max_attachments);

/// Applies one elementary modification per listed site.
MetricGraph modify_at(const MetricGraph& g, std::span<const Point> sites, std::span<const std::size_t> chosen);

/// All modifications with at most max_attachments infinite edges.
std::vector<MetricGraph> enumerate_modifications(const MetricGraph& g, std::span<const Point> sites,
                                                 int max_attachments);

}  // namespace mg
