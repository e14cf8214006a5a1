#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metricgraph/metric_graph.hpp"

namespace mg {

using GraphPtr = std::shared_ptr<const MetricGraph>;

/// Finite integer combination of points on the finite part of a metric graph.
class Divisor {
 public:
  explicit Divisor(GraphPtr graph);

  const MetricGraph& graph() const { return *graph_; }
  const GraphPtr& graph_ptr() const { return graph_; }

  int operator[](const Point& p) const;
  /// Adds `coefficient` at `p`. Points on infinite edges or at infinite
  /// leaves are rejected with DomainError.
  Divisor& add(const Point& p, int coefficient = 1);
  const std::map<Point, int>& terms() const { return terms_; }

  int degree() const;
  bool is_effective() const;
  bool is_effective_away_from(const Point& q) const;
  /// Expanded multiset of the negative part, in point order.
  std::vector<Point> negative_points() const;
  Divisor positive_part() const;

  Divisor& operator+=(const Divisor& o);
  Divisor& operator-=(const Divisor& o);
  friend Divisor operator+(Divisor a, const Divisor& b) { return a += b; }
  friend Divisor operator-(Divisor a, const Divisor& b) { return a -= b; }
  friend Divisor operator*(int k, const Divisor& d);

  friend bool operator==(const Divisor& a, const Divisor& b);

  /// "2*v1 - e1@3/4", or "0" for the zero divisor.
  std::string str() const;

 private:
  void require_same_graph(const Divisor& o) const;

  GraphPtr graph_;
  std::map<Point, int> terms_;
};

bool same_graph(const MetricGraph& a, const MetricGraph& b);

/// Closed segment [lo, hi] of an edge, offsets from its u end.
struct Segment {
  EdgeId edge = 0;
  Rat lo;
  Rat hi;
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Firing of the closed set A (its points plus the segments it contains) by
/// `amount`: one chip leaves each boundary point along every tangent
/// direction not contained in A and travels `amount`.
struct FiringEvent {
  std::vector<Point> closed_points;
  std::vector<Segment> closed_segments;
  Rat amount;
};

struct ReductionCertificate {
  Divisor input;
  Point base;
  Divisor output;
  std::vector<FiringEvent> events;
};

struct Reduction {
  Divisor divisor;
  ReductionCertificate certificate;
};

/// Metric burning test. Fire starts at q; a point p != q catches fire once
/// the number of burnt directions reaching it exceeds d(p). Throws
/// DomainError when d is negative away from q.
bool is_reduced(const Divisor& d, const Point& q);

/// The unique q-reduced divisor linearly equivalent to d, with the firing
/// events that transform d into it.
Reduction reduce(const Divisor& d, const Point& q);
/// Same result without recording a certificate.
Divisor reduced(const Divisor& d, const Point& q);

/// Principal divisor produced by a firing event, computed from the geometry
/// of the recorded closed set.
Divisor firing_divisor(const GraphPtr& g, const FiringEvent& event);
/// input + sum of event divisors == output; false for malformed events.
bool replay(const ReductionCertificate& cert);

/// Base point used for class comparisons: the first non-leaf vertex.
Point default_base_point(const MetricGraph& g);

bool linearly_equivalent(const Divisor& a, const Divisor& b);
std::optional<Divisor> effective_representative(const Divisor& d);
bool has_effective_representative(const Divisor& d);

/// Sum of (valence - 2) p over vertices, valence counted on the finite part.
Divisor canonical(const GraphPtr& g);

}  // namespace mg
