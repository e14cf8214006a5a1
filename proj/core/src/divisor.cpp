#include "metricgraph/divisor.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace mg {

Divisor::Divisor(GraphPtr graph) : graph_(std::move(graph)) {
  if (!graph_) throw std::invalid_argument("divisor without a graph");
}

int Divisor::operator[](const Point& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? 0 : it->second;
}

Divisor& Divisor::add(const Point& p, int coefficient) {
  graph_->require(p);
  if (!graph_->in_finite_part(p))
    throw DomainError("divisor support must avoid infinite edges: " + graph_->describe(p));
  if (coefficient == 0) return *this;
  int& c = terms_[p];
  c += coefficient;
  if (c == 0) terms_.erase(p);
  return *this;
}

int Divisor::degree() const {
  int deg = 0;
  for (const auto& [p, c] : terms_) deg += c;
  return deg;
}

bool Divisor::is_effective() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.second > 0; });
}

bool Divisor::is_effective_away_from(const Point& q) const {
  return std::all_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.second > 0 || t.first == q; });
}

std::vector<Point> Divisor::negative_points() const {
  std::vector<Point> out;
  for (const auto& [p, c] : terms_)
    for (int i = 0; i < -c; ++i) out.push_back(p);
  return out;
}

Divisor Divisor::positive_part() const {
  Divisor out(graph_);
  for (const auto& [p, c] : terms_)
    if (c > 0) out.terms_.emplace(p, c);
  return out;
}

bool same_graph(const MetricGraph& a, const MetricGraph& b) { return &a == &b || a == b; }

void Divisor::require_same_graph(const Divisor& o) const {
  if (!same_graph(*graph_, *o.graph_)) throw DomainError("divisors live on different graphs");
}

Divisor& Divisor::operator+=(const Divisor& o) {
  require_same_graph(o);
  for (const auto& [p, c] : o.terms_) {
    int& x = terms_[p];
    x += c;
    if (x == 0) terms_.erase(p);
  }
  return *this;
}

Divisor& Divisor::operator-=(const Divisor& o) {
  require_same_graph(o);
  for (const auto& [p, c] : o.terms_) {
    int& x = terms_[p];
    x -= c;
    if (x == 0) terms_.erase(p);
  }
  return *this;
}

Divisor operator*(int k, const Divisor& d) {
  Divisor out(d.graph_);
  if (k == 0) return out;
  for (const auto& [p, c] : d.terms_) out.terms_.emplace(p, k * c);
  return out;
}

bool operator==(const Divisor& a, const Divisor& b) {
  return same_graph(*a.graph_, *b.graph_) && a.terms_ == b.terms_;
}

std::string Divisor::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, c] : terms_) {
    int mag = c < 0 ? -c : c;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    if (mag != 1) os << mag << "*";
    os << graph_->describe(p);
    first = false;
  }
  return os.str();
}

namespace {

/// Subdivision of the finite part at the support of a divisor and the base
/// point. Original vertices keep their ids; cut points are appended.
struct Model {
  struct MEdge {
    std::size_t a, b;  // a is the end closer to the original u
    EdgeId orig;
    Rat lo, hi;
  };
  std::vector<Point> points;
  std::vector<int> chips;
  std::vector<bool> active;  // false for infinite leaves
  std::vector<MEdge> edges;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj;  // (edge, other end)
  std::size_t base = 0;
};

Model build_model(const MetricGraph& g, const std::map<Point, int>& chips, const Point& q) {
  Model m;
  const std::size_t nv = g.vertex_count();
  m.points.reserve(nv + chips.size() + 1);
  for (VertexId v = 0; v < nv; ++v) {
    m.points.push_back(Point::vertex(v));
    m.active.push_back(!g.is_infinite_leaf(v));
  }
  m.chips.assign(nv, 0);
  std::vector<std::vector<std::pair<Rat, std::size_t>>> cuts(g.edge_count());
  auto add_cut = [&](const Point& p, int c) -> std::size_t {
    std::size_t id = m.points.size();
    m.points.push_back(p);
    m.chips.push_back(c);
    m.active.push_back(true);
    cuts[p.id].push_back({p.offset, id});
    return id;
  };
  bool q_placed = !q.on_edge;
  for (const auto& [p, c] : chips) {
    if (!p.on_edge) {
      m.chips[p.id] = c;
      continue;
    }
    if (!q_placed && q < p) {
      m.base = add_cut(q, 0);
      q_placed = true;
    }
    std::size_t id = add_cut(p, c);
    if (p == q) {
      m.base = id;
      q_placed = true;
    }
  }
  if (!q_placed) m.base = add_cut(q, 0);
  if (!q.on_edge) m.base = q.id;

  m.adj.assign(m.points.size(), {});
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.length.is_infinite()) continue;
    std::size_t prev = ed.u;
    Rat prev_off{0};
    auto push = [&](std::size_t to, const Rat& off) {
      std::size_t id = m.edges.size();
      m.edges.push_back({prev, to, e, prev_off, off});
      m.adj[prev].push_back({id, to});
      m.adj[to].push_back({id, prev});
      prev = to;
      prev_off = off;
    };
    for (const auto& [off, id] : cuts[e]) push(id, off);
    push(ed.v, ed.length.value());
  }
  return m;
}

std::vector<bool> burn(const Model& m) {
  std::vector<bool> burnt(m.points.size(), false);
  std::vector<int> reached(m.points.size(), 0);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < m.points.size(); ++i)
    if (!m.active[i]) burnt[i] = true;
  burnt[m.base] = true;
  queue.push_back(m.base);
  while (!queue.empty()) {
    std::size_t x = queue.front();
    queue.pop_front();
    for (const auto& [e, y] : m.adj[x]) {
      if (burnt[y]) continue;
      if (++reached[y] > m.chips[y]) {
        burnt[y] = true;
        queue.push_back(y);
      }
    }
  }
  return burnt;
}

constexpr std::size_t kMaxFirings = 50'000'000;

/// Reduces an effective-away-from-q chip configuration in place.
void reduce_in_place(const MetricGraph& g, std::map<Point, int>& chips, const Point& q,
                     std::vector<FiringEvent>* events) {
  for (std::size_t iter = 0;; ++iter) {
    if (iter > kMaxFirings) throw std::runtime_error("reduction did not terminate");
    Model m = build_model(g, chips, q);
    std::vector<bool> burnt = burn(m);
    if (std::all_of(burnt.begin(), burnt.end(), [](bool b) { return b; })) return;

    std::optional<Rat> eps;
    for (const auto& me : m.edges) {
      if (burnt[me.a] == burnt[me.b]) continue;
      Rat len = me.hi - me.lo;
      if (!eps || len < *eps) eps = len;
    }
    if (events) {
      FiringEvent ev;
      ev.amount = *eps;
      for (std::size_t i = 0; i < m.points.size(); ++i)
        if (!burnt[i]) ev.closed_points.push_back(m.points[i]);
      std::sort(ev.closed_points.begin(), ev.closed_points.end());
      for (const auto& me : m.edges)
        if (!burnt[me.a] && !burnt[me.b]) ev.closed_segments.push_back({me.orig, me.lo, me.hi});
      events->push_back(std::move(ev));
    }
    auto bump = [&](const Point& p, int delta) {
      int& c = chips[p];
      c += delta;
      if (c == 0) chips.erase(p);
    };
    for (const auto& me : m.edges) {
      if (burnt[me.a] == burnt[me.b]) continue;
      bool from_a = !burnt[me.a];
      bump(m.points[from_a ? me.a : me.b], -1);
      Rat off = from_a ? me.lo + *eps : me.hi - *eps;
      bump(g.point_on_edge(me.orig, off), +1);
    }
  }
}

std::map<Point, int> reduce_chips(const Divisor& d, const Point& q, std::vector<FiringEvent>* events) {
  const MetricGraph& g = d.graph();
  g.require(q);
  if (!g.in_finite_part(q)) throw DomainError("base point must lie on the finite part");
  if (d.is_effective_away_from(q)) {
    std::map<Point, int> chips = d.terms();
    int lift = std::max(0, -d[q]);
    if (lift > 0) chips[q] += lift;
    if (chips.count(q) && chips[q] == 0) chips.erase(q);
    reduce_in_place(g, chips, q, events);
    if (lift > 0) {
      int& c = chips[q];
      c -= lift;
      if (c == 0) chips.erase(q);
    }
    return chips;
  }
  // Raise the degree to the genus so every intermediate system is
  // non-empty, then peel off the negative points one reduction at a time.
  int lift = std::max(0, g.genus() - d.degree());
  std::map<Point, int> chips = d.positive_part().terms();
  if (lift > 0) chips[q] += lift;
  for (const Point& n : d.negative_points()) {
    reduce_in_place(g, chips, n, events);
    auto it = chips.find(n);
    if (it == chips.end() || it->second < 1) throw std::logic_error("degree lift failed to make the class effective");
    if (--it->second == 0) chips.erase(it);
  }
  reduce_in_place(g, chips, q, events);
  if (lift > 0) {
    int& c = chips[q];
    c -= lift;
    if (c == 0) chips.erase(q);
  }
  return chips;
}

Divisor from_chips(const GraphPtr& g, const std::map<Point, int>& chips) {
  Divisor out(g);
  for (const auto& [p, c] : chips) out.add(p, c);
  return out;
}

}  // namespace

bool is_reduced(const Divisor& d, const Point& q) {
  const MetricGraph& g = d.graph();
  g.require(q);
  if (!d.is_effective_away_from(q)) throw DomainError("is_reduced needs a divisor effective away from the base point");
  Model m = build_model(g, d.terms(), q);
  std::vector<bool> burnt = burn(m);
  return std::all_of(burnt.begin(), burnt.end(), [](bool b) { return b; });
}

Reduction reduce(const Divisor& d, const Point& q) {
  std::vector<FiringEvent> events;
  Divisor out = from_chips(d.graph_ptr(), reduce_chips(d, q, &events));
  return Reduction{out, ReductionCertificate{d, q, out, std::move(events)}};
}

Divisor reduced(const Divisor& d, const Point& q) { return from_chips(d.graph_ptr(), reduce_chips(d, q, nullptr)); }

Divisor firing_divisor(const GraphPtr& g, const FiringEvent& event) {
  Divisor out(g);
  auto offset_on = [&](const Point& p, EdgeId e) -> Rat {
    if (p.on_edge) return p.offset;
    return g->edge(e).u == p.id ? Rat{0} : g->edge(e).length.value();
  };
  for (const Point& p : event.closed_points) {
    for (const TangentDirection& dir : g->tangent_directions(p)) {
      if (g->edge(dir.edge).length.is_infinite()) continue;
      Rat at = offset_on(p, dir.edge);
      bool inside = std::any_of(event.closed_segments.begin(), event.closed_segments.end(), [&](const Segment& s) {
        if (s.edge != dir.edge) return false;
        return dir.toward_v ? (s.lo <= at && at < s.hi) : (s.lo < at && at <= s.hi);
      });
      if (inside) continue;
      out.add(p, -1);
      out.add(g->point_on_edge(dir.edge, dir.toward_v ? at + event.amount : at - event.amount), +1);
    }
  }
  return out;
}

bool replay(const ReductionCertificate& cert) {
  Divisor acc = cert.input;
  try {
    for (const auto& ev : cert.events) acc += firing_divisor(cert.input.graph_ptr(), ev);
  } catch (const DomainError&) {
    return false;  // an event that does not describe a closed set on the graph
  }
  return acc == cert.output;
}

Point default_base_point(const MetricGraph& g) {
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (!g.is_infinite_leaf(v)) return Point::vertex(v);
  throw DomainError("graph has no finite vertex");
}

bool linearly_equivalent(const Divisor& a, const Divisor& b) {
  if (!same_graph(a.graph(), b.graph())) throw DomainError("divisors live on different graphs");
  if (a.degree() != b.degree()) return false;
  Point q = default_base_point(a.graph());
  return reduced(a, q) == reduced(b, q);
}

std::optional<Divisor> effective_representative(const Divisor& d) {
  if (d.is_effective()) return d;
  if (d.degree() < 0) return std::nullopt;
  const MetricGraph& g = d.graph();
  std::map<Point, int> chips = d.positive_part().terms();
  for (const Point& n : d.negative_points()) {
    reduce_in_place(g, chips, n, nullptr);
    auto it = chips.find(n);
    if (it == chips.end() || it->second < 1) return std::nullopt;
    if (--it->second == 0) chips.erase(it);
  }
  return from_chips(d.graph_ptr(), chips);
}

bool has_effective_representative(const Divisor& d) {
  if (d.is_effective()) return true;
  if (d.degree() < 0) return false;
  if (d.degree() >= d.graph().genus()) return true;
  return effective_representative(d).has_value();
}

Divisor canonical(const GraphPtr& g) {
  Divisor k(g);
  for (VertexId v = 0; v < g->vertex_count(); ++v) {
    if (g->is_infinite_leaf(v)) continue;
    int val = 0;
    for (const auto& inc : g->incident(v))
      if (!g->edge(inc.edge).length.is_infinite()) ++val;
    if (val != 2) k.add(Point::vertex(v), val - 2);
  }
  return k;
}

}  // namespace mg
