#include "metricgraph/rank.hpp"

#include <algorithm>
#include <atomic>
#include <random>
#include <set>

#include "metricgraph/parallel.hpp"

namespace mg {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Exact:
      return "EXACT";
    case Mode::Sampled:
      return "SAMPLED";
    case Mode::ExhaustedWithinBudget:
      return "EXHAUSTED_WITHIN_BUDGET";
  }
  return "?";
}

Mode weakest(Mode a, Mode b) {
  auto strength = [](Mode m) { return m == Mode::Exact ? 2 : m == Mode::ExhaustedWithinBudget ? 1 : 0; };
  return strength(a) <= strength(b) ? a : b;
}

RankDeterminingSet RankDeterminingSet::vertices_of(const MetricGraph& g) {
  RankDeterminingSet s;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (!g.is_infinite_leaf(v)) s.points_.push_back(Point::vertex(v));
  return s;
}

RankDeterminingSet::RankDeterminingSet(const MetricGraph& g, std::vector<Point> points) : points_(std::move(points)) {
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  if (points_.empty()) throw DomainError("rank-determining set must be non-empty");
  for (const Point& p : points_)
    if (!g.in_finite_part(p)) throw DomainError("rank-determining set must lie on the finite part");
  // Refine so every point is a vertex, then walk each direction through
  // valence-2 vertices outside the set; every walk must end at a different
  // point of the set (the complement consists of open intervals with two
  // distinct ends).
  Refinement ref = refine(g, points_);
  const MetricGraph& h = ref.graph;
  std::set<VertexId> in_set;
  for (const Point& p : points_) in_set.insert(ref.map(p).id);
  for (VertexId v = 0; v < h.vertex_count(); ++v) {
    if (h.is_infinite_leaf(v) || in_set.count(v)) continue;
    std::size_t finite_val = 0;
    for (const auto& inc : h.incident(v))
      if (!h.edge(inc.edge).length.is_infinite()) ++finite_val;
    if (finite_val != 2) throw DomainError("rank-determining set misses the vertex '" + h.vertex_name(v) + "'");
  }
  for (VertexId start : in_set) {
    for (const auto& first : h.incident(start)) {
      if (h.edge(first.edge).length.is_infinite()) continue;
      EdgeId e = first.edge;
      VertexId cur = first.at_u ? h.edge(e).v : h.edge(e).u;
      while (!in_set.count(cur)) {
        EdgeId next = e;
        for (const auto& inc : h.incident(cur))
          if (inc.edge != e && !h.edge(inc.edge).length.is_infinite()) next = inc.edge;
        e = next;
        cur = h.edge(e).u == cur ? h.edge(e).v : h.edge(e).u;
      }
      if (cur == start) throw DomainError("rank-determining set leaves a loop in its complement");
    }
  }
}

namespace {

bool removals_stay_effective(const Divisor& x, int k, std::size_t start, const std::vector<Point>& rds) {
  for (std::size_t i = start; i < rds.size(); ++i) {
    const Point& p = rds[i];
    Divisor y = reduced(x, p);
    if (y[p] < 1) return false;
    if (k > 1) {
      y.add(p, -1);
      if (!removals_stay_effective(y, k - 1, i, rds)) return false;
    }
  }
  return true;
}

bool rank_at_least_effective(const Divisor& eff, int r, const RankDeterminingSet& rds) {
  if (r <= 0) return true;
  int deg = eff.degree();
  if (r > deg) return false;
  if (deg - eff.graph().genus() >= r) return true;
  return removals_stay_effective(eff, r, 0, rds.points());
}

}  // namespace

bool rank_at_least(const Divisor& d, int r, const RankDeterminingSet& rds) {
  if (r < 0) return true;
  auto eff = effective_representative(d);
  if (!eff) return false;
  return rank_at_least_effective(*eff, r, rds);
}

bool rank_at_least(const Divisor& d, int r) { return rank_at_least(d, r, RankDeterminingSet::vertices_of(d.graph())); }

int rank(const Divisor& d, const RankDeterminingSet& rds) {
  auto eff = effective_representative(d);
  if (!eff) return -1;
  int deg = d.degree();
  int r = std::max(0, deg - d.graph().genus());
  while (r < deg && rank_at_least_effective(*eff, r + 1, rds)) ++r;
  return r;
}

int rank(const Divisor& d) { return rank(d, RankDeterminingSet::vertices_of(d.graph())); }

bool riemann_roch_check(const Divisor& d) {
  Divisor k = canonical(d.graph_ptr());
  return rank(d) - rank(k - d) == d.degree() - d.graph().genus() + 1;
}

bool is_very_special(const Divisor& d) {
  return rank(d) > std::max(0, d.degree() - d.graph().genus() + 1);
}

int clifford_index(const Divisor& d) {
  int r = rank(d);
  if (r <= std::max(0, d.degree() - d.graph().genus() + 1))
    throw DomainError("Clifford index is defined only for very special divisors");
  return d.degree() - 2 * r;
}

Point random_rational_point(const MetricGraph& g, std::mt19937_64& rng, int max_denominator) {
  std::vector<EdgeId> finite;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (!g.edge(e).length.is_infinite()) finite.push_back(e);
  if (finite.empty()) throw DomainError("graph has no finite edge");
  for (;;) {
    EdgeId e = finite[std::uniform_int_distribution<std::size_t>(0, finite.size() - 1)(rng)];
    std::int64_t den = std::uniform_int_distribution<std::int64_t>(1, std::max(1, max_denominator))(rng);
    Rat scaled = g.edge(e).length.value() * Rat{den};
    std::int64_t kmax = scaled.is_integer() ? scaled.num() - 1 : scaled.num() / scaled.den();
    if (kmax < 1) continue;
    std::int64_t k = std::uniform_int_distribution<std::int64_t>(1, kmax)(rng);
    return g.point_on_edge(e, Rat(k, den));
  }
}

std::vector<Point> sampling_grid(const MetricGraph& g, const GridSpec& spec) {
  std::set<Point> pts;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (!g.is_infinite_leaf(v)) pts.insert(Point::vertex(v));
  std::vector<EdgeId> finite;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.length.is_infinite()) continue;
    finite.push_back(e);
    const Rat& l = ed.length.value();
    if (spec.denominator > 0) {
      for (std::int64_t k = 1;; ++k) {
        Rat off(k, spec.denominator);
        if (off >= l) break;
        pts.insert(g.point_on_edge(e, off));
      }
    }
    if (spec.midpoints) pts.insert(g.point_on_edge(e, l / Rat{2}));
  }
  if (spec.random_points > 0 && !finite.empty()) {
    std::mt19937_64 rng(spec.seed);
    for (int made = 0; made < spec.random_points; ++made) pts.insert(random_rational_point(g, rng, spec.random_max_denominator));
  }
  return {pts.begin(), pts.end()};
}

bool for_each_multiset(std::size_t n, int k, const std::function<bool(std::span<const std::size_t>)>& fn) {
  if (k < 0) return true;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  if (k == 0) return fn(idx);
  if (n == 0) return true;
  for (;;) {
    if (!fn(idx)) return false;
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - 1) --pos;
    if (pos < 0) return true;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[pos];
  }
}

namespace {

long long multiset_count(long long n, int k) {
  // C(n + k - 1, k), saturating.
  if (k == 0) return 1;
  if (n <= 0) return 0;
  long double c = 1;
  for (int i = 1; i <= k; ++i) c = c * static_cast<long double>(n + i - 1) / i;
  return c > 9e18L ? static_cast<long long>(9e18) : static_cast<long long>(c + 0.5L);
}

Divisor divisor_from(const GraphPtr& g, std::span<const Point> grid, std::span<const std::size_t> idx) {
  Divisor d(g);
  for (std::size_t i : idx) d.add(grid[i]);
  return d;
}

}  // namespace

ClassSearch search_grd(const GraphPtr& g, int r, int d, const SearchBudget& budget) {
  ClassSearch out;
  Point q = default_base_point(*g);
  int rest = d - r;
  if (r < 0 || rest < 0) return out;
  if (r == 0 || d - g->genus() >= r) {
    out.witness = d * Divisor(g).add(q);
    out.checked = 1;
    return out;
  }
  std::vector<Point> grid = sampling_grid(*g, budget.grid);
  const std::size_t n = grid.size();
  Divisor base = r * Divisor(g).add(q);
  auto check = [&](std::span<const std::size_t> idx) -> bool {
    Divisor cand = base + divisor_from(g, grid, idx);
    return is_reduced(cand, q) && rank_at_least(cand, r);
  };
  if (rest == 0) {
    out.checked = 1;
    if (check({})) out.witness = base;
    return out;
  }
  // Shard by the first multiset index; shards are merged in order.
  std::size_t shards = n;
  long long total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    long long c = multiset_count(static_cast<long long>(n - i), rest - 1);
    if (total + c > budget.max_candidates) {
      shards = i;
      out.truncated = true;
      break;
    }
    total += c;
  }
  struct ShardResult {
    std::optional<std::vector<std::size_t>> hit;
    long long checked = 0;
  };
  std::vector<ShardResult> results(shards);
  std::atomic<std::size_t> best{shards};
  parallel_for(shards, budget.jobs, [&](std::size_t i0) {
    if (i0 > best.load()) return;
    ShardResult& res = results[i0];
    std::vector<std::size_t> idx(static_cast<std::size_t>(rest));
    for_each_multiset(n - i0, rest - 1, [&](std::span<const std::size_t> tail) {
      if (i0 > best.load()) return false;
      idx[0] = i0;
      for (std::size_t j = 0; j < tail.size(); ++j) idx[j + 1] = tail[j] + i0;
      ++res.checked;
      if (check(idx)) {
        res.hit = idx;
        std::size_t cur = best.load();
        while (i0 < cur && !best.compare_exchange_weak(cur, i0)) {
        }
        return false;
      }
      return true;
    });
  });
  for (std::size_t i = 0; i < shards; ++i) {
    out.checked += results[i].checked;
    if (results[i].hit) {
      out.witness = base + divisor_from(g, grid, *results[i].hit);
      out.truncated = false;
      break;
    }
  }
  return out;
}

ClaimResult no_grd_exists(const GraphPtr& g, int r, int d, const SearchBudget& budget) {
  ClaimResult res;
  res.claim = "no g^" + std::to_string(r) + "_" + std::to_string(d);
  if (r > d && d >= 0) {
    res.mode = Mode::Exact;
    res.verdict = true;
    res.notes.push_back("rank never exceeds a non-negative degree");
    return res;
  }
  ClassSearch s = search_grd(g, r, d, budget);
  res.candidates_checked = s.checked;
  res.sampling = "q-reduced r*q + G, G on grid denominator " + std::to_string(budget.grid.denominator) +
                 (budget.grid.midpoints ? " with midpoints" : "");
  if (s.witness) {
    res.mode = Mode::Exact;
    res.verdict = false;
    res.witnesses.push_back(s.witness->str());
  } else {
    res.verdict = true;
    res.mode = s.truncated ? Mode::ExhaustedWithinBudget : Mode::Sampled;
    if (s.truncated) res.notes.push_back("enumeration truncated at max_candidates");
  }
  return res;
}

namespace {

std::optional<Divisor> search_extension(const GraphPtr& g, const Divisor& f, int r, int extra,
                                        std::span<const Point> grid) {
  std::optional<Divisor> found;
  for_each_multiset(grid.size(), extra, [&](std::span<const std::size_t> idx) {
    Divisor e = f + divisor_from(g, grid, idx);
    if (rank_at_least(e, r)) {
      found = e;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace

ClaimResult wrd_lower(const GraphPtr& g, int r, int d, int w, std::span<const Divisor> f_samples,
                      const WitnessBuilder& builder, const SearchBudget& budget) {
  ClaimResult res;
  res.claim = "w^" + std::to_string(r) + "_" + std::to_string(d) + " >= " + std::to_string(w);
  res.mode = Mode::Sampled;
  res.sampling = std::to_string(f_samples.size()) + " sampled F of degree " + std::to_string(r + w);
  std::vector<Point> grid;
  if (!builder) grid = sampling_grid(*g, budget.grid);
  std::vector<std::optional<Divisor>> witnesses(f_samples.size());
  parallel_for(f_samples.size(), budget.jobs, [&](std::size_t i) {
    const Divisor& f = f_samples[i];
    if (f.degree() != r + w || !f.is_effective()) throw DomainError("F samples must be effective of degree r + w");
    std::optional<Divisor> e = builder ? builder(f) : search_extension(g, f, r, d - r - w, grid);
    if (e && e->degree() == d && (*e - f).is_effective() && rank_at_least(*e, r)) witnesses[i] = e;
  });
  res.verdict = true;
  for (std::size_t i = 0; i < f_samples.size(); ++i) {
    ++res.candidates_checked;
    if (witnesses[i]) {
      res.witnesses.push_back("F = " + f_samples[i].str() + " -> E = " + witnesses[i]->str());
    } else {
      res.verdict = false;
      res.counterexamples.push_back("F = " + f_samples[i].str() + " has no verified witness");
    }
  }
  return res;
}

ClaimResult wrd_upper(const GraphPtr& g, int r, int d, int w, std::span<const Divisor> f_candidates,
                      const SearchBudget& budget) {
  ClaimResult res;
  res.claim = "w^" + std::to_string(r) + "_" + std::to_string(d) + " < " + std::to_string(w);
  res.mode = Mode::Sampled;
  std::vector<Point> grid = sampling_grid(*g, budget.grid);
  res.sampling = "extensions F + G with G on a grid of " + std::to_string(grid.size()) + " points";
  int extra = d - r - w;
  std::vector<char> blocked(f_candidates.size(), 0);
  std::atomic<std::size_t> first{f_candidates.size()};
  parallel_for(f_candidates.size(), budget.jobs, [&](std::size_t i) {
    if (i > first.load()) return;
    const Divisor& f = f_candidates[i];
    if (extra < 0 || !search_extension(g, f, r, extra, grid)) {
      blocked[i] = 1;
      std::size_t cur = first.load();
      while (i < cur && !first.compare_exchange_weak(cur, i)) {
      }
    }
  });
  res.verdict = false;
  for (std::size_t i = 0; i < f_candidates.size(); ++i) {
    ++res.candidates_checked;
    if (blocked[i]) {
      res.verdict = true;
      res.witnesses.push_back("F = " + f_candidates[i].str() + " lies in no sampled g^" + std::to_string(r) +
                                    "_" + std::to_string(d));
      break;
    }
  }
  return res;
}

ClaimResult wrd_value(const GraphPtr& g, int r, int d, const SearchBudget& budget) {
  ClaimResult res;
  res.claim = "w^" + std::to_string(r) + "_" + std::to_string(d);
  ClassSearch exists = search_grd(g, r, d, budget);
  res.candidates_checked = exists.checked;
  if (!exists.witness) {
    res.value = -1;
    res.verdict = true;
    res.mode = exists.truncated ? Mode::ExhaustedWithinBudget : Mode::Sampled;
    res.notes.push_back("no g^" + std::to_string(r) + "_" + std::to_string(d) + " found on the grid");
    return res;
  }
  res.witnesses.push_back("g^" + std::to_string(r) + "_" + std::to_string(d) + ": " + exists.witness->str());
  std::vector<Point> grid = sampling_grid(*g, budget.grid);
  int w = 0;
  for (; r + w <= d; ++w) {
    std::vector<Divisor> samples;
    bool within = for_each_multiset(grid.size(), r + w, [&](std::span<const std::size_t> idx) {
      samples.push_back(divisor_from(g, grid, idx));
      return static_cast<long long>(samples.size()) < budget.max_candidates;
    });
    ClaimResult step = wrd_lower(g, r, d, w, samples, nullptr, budget);
    res.candidates_checked += step.candidates_checked;
    if (!step.verdict) {
      res.witnesses.push_back("upper bound: " + step.counterexamples.front());
      res.notes.push_back("upper bound: w^" + std::to_string(r) + "_" + std::to_string(d) + " < " + std::to_string(w));
      break;
    }
    if (!within) res.notes.push_back("F samples truncated at max_candidates for w = " + std::to_string(w));
  }
  res.value = w - 1;
  res.verdict = true;
  res.mode = Mode::Sampled;
  return res;
}

ClaimResult graph_clifford_index(const GraphPtr& g, const SearchBudget& budget) {
  ClaimResult res;
  res.claim = "Clifford index";
  int genus = g->genus();
  if (genus <= 1) {
    res.mode = Mode::Exact;
    res.verdict = true;
    res.notes.push_back("genus <= 1: no very special divisors");
    return res;
  }
  res.mode = Mode::Sampled;
  for (int c = 0; c <= 2 * genus - 4; ++c) {
    for (int r = 1; c + 2 * r <= 2 * genus - 2; ++r) {
      int d = c + 2 * r;
      if (r <= std::max(0, d - genus + 1)) continue;
      ClassSearch s = search_grd(g, r, d, budget);
      res.candidates_checked += s.checked;
      if (s.truncated) res.mode = weakest(res.mode, Mode::ExhaustedWithinBudget);
      if (!s.witness) continue;
      int actual = rank(*s.witness);
      res.value = d - 2 * actual;
      res.verdict = true;
      res.witnesses.push_back(s.witness->str() + " (degree " + std::to_string(d) + ", rank " +
                              std::to_string(actual) + ")");
      return res;
    }
  }
  res.verdict = true;
  res.notes.push_back("no very special divisor found on the grid");
  return res;
}

}  // namespace mg
