#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "metricgraph/claim.hpp"
#include "metricgraph/divisor.hpp"

namespace mg {

/// Finite point set whose complement is a disjoint union of open intervals.
/// Ranks are certified by testing only effective divisors supported here.
class RankDeterminingSet {
 public:
  /// The non-leaf vertices of the stored model.
  static RankDeterminingSet vertices_of(const MetricGraph& g);
  /// Validates the open-interval condition: every non-leaf vertex of valence
  /// other than 2 must be included.
  RankDeterminingSet(const MetricGraph& g, std::vector<Point> points);

  const std::vector<Point>& points() const { return points_; }

 private:
  RankDeterminingSet() = default;
  std::vector<Point> points_;
};

/// Baker-Norine rank: -1 if |D| is empty, else the largest r such that
/// |D - E| is non-empty for every effective E of degree r.
int rank(const Divisor& d);
int rank(const Divisor& d, const RankDeterminingSet& rds);
/// rank(d) >= r, stopping at the first failing E.
bool rank_at_least(const Divisor& d, int r);
bool rank_at_least(const Divisor& d, int r, const RankDeterminingSet& rds);

/// rank(D) - rank(K - D) == deg(D) - g + 1.
bool riemann_roch_check(const Divisor& d);

bool is_very_special(const Divisor& d);
/// deg(D) - 2 rank(D). Throws DomainError unless d is very special.
int clifford_index(const Divisor& d);

struct GridSpec {
  int denominator = 4;        // offsets k/denominator along every finite edge
  bool midpoints = true;      // plus every edge midpoint
  int random_points = 0;      // plus seeded random points
  int random_max_denominator = 64;
  std::uint64_t seed = 0;
};

/// Non-leaf vertices, grid offsets, midpoints and random points; sorted by
/// (edge id, offset) with vertices first, duplicates removed.
std::vector<Point> sampling_grid(const MetricGraph& g, const GridSpec& spec);

/// Uniform random point of the finite part: a random finite edge, then an
/// interior offset k/den with den uniform in [1, max_denominator]. Edges too
/// short for the drawn denominator are redrawn.
Point random_rational_point(const MetricGraph& g, std::mt19937_64& rng, int max_denominator);

struct SearchBudget {
  GridSpec grid;
  long long max_candidates = 5'000'000;
  int jobs = 1;
};

struct ClassSearch {
  std::optional<Divisor> witness;  // first hit in enumeration order
  long long checked = 0;
  bool truncated = false;           // stopped by max_candidates
};

/// Enumerates q-reduced divisors r*q + G, G effective on the grid with
/// degree d - r (q the default base point), and returns the first one with
/// rank >= r.
ClassSearch search_grd(const GraphPtr& g, int r, int d, const SearchBudget& budget);

/// Searches for a class of degree d and rank >= r among q-reduced divisors
/// r*q + G with G effective on the grid (q the default base point).
/// verdict true means none was found.
ClaimResult no_grd_exists(const GraphPtr& g, int r, int d, const SearchBudget& budget);

/// Constructs E >= F of degree d with rank >= r, or nullopt.
using WitnessBuilder = std::function<std::optional<Divisor>(const Divisor& f)>;

/// Checks w^r_d >= w on the given F samples (each of degree r + w). When no
/// builder is supplied, E is searched as F + G with G on the grid. Every
/// witness is re-checked with rank_at_least before it is accepted.
ClaimResult wrd_lower(const GraphPtr& g, int r, int d, int w, std::span<const Divisor> f_samples,
                      const WitnessBuilder& builder, const SearchBudget& budget);

/// Looks for F of degree r + w among `f_candidates` such that no F + G with
/// G effective on the grid has rank >= r; verdict true means such an F was
/// found, i.e. w^r_d < w on the sampled evidence.
ClaimResult wrd_upper(const GraphPtr& g, int r, int d, int w, std::span<const Divisor> f_candidates,
                      const SearchBudget& budget);

/// Brackets w^r_d: value = lower bound, notes carry the upper bound. Returns
/// -1 when no g^r_d was found.
ClaimResult wrd_value(const GraphPtr& g, int r, int d, const SearchBudget& budget);

/// Minimum Clifford index over very special classes found on the grid;
/// value is empty when no very special divisor exists or was found.
ClaimResult graph_clifford_index(const GraphPtr& g, const SearchBudget& budget);

/// Calls fn(multiset) for every non-decreasing index tuple of length k over
/// [0, n), in lexicographic order; stops early when fn returns false.
bool for_each_multiset(std::size_t n, int k, const std::function<bool(std::span<const std::size_t>)>& fn);

}  // namespace mg
