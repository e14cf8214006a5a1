#pragma once

#include <cstdint>
#include <optional>

#include "metricgraph/claim.hpp"
#include "metricgraph/family.hpp"
#include "metricgraph/rank.hpp"

namespace mg {

/// The g^1_2 of G0: rank(v1 + v2) = 1, rank(v1 + v) = 0 for v != v2, and
/// 2v ~ v1 + v2 only at the midpoints m0, m1, m2. Grid statements use
/// offsets k/grid_denominator; the statements for all points are checked on
/// one representative per open cell cut out by v1, v2 and the midpoints.
ClaimResult check_g0_pencil(const G0Spec& spec, int grid_denominator = 16, int rank_samples = 20);

/// No degree-3 class on G0 dominates 2m0, 2q1 and 2q2 at once. Every such
/// class is |v1 + v2 + v|; for each cell representative v the reduced
/// divisor q1' + v (or q2' + v) witnesses an empty linear system.
ClaimResult check_no_common_g13(const G0Spec& spec);

/// G_n has no g^1_2: a g^1_2 would force rank_{G0}(2 q_i) = 1 for i >= 1,
/// which is refuted by exact rank computations.
ClaimResult check_no_g12(const GnSpec& spec);

/// Exact no-g^1_2 plus grid searches for g^1_3 and g^2_5.
ClaimResult check_no_low_pencils(const GnSpec& spec, const SearchBudget& budget);

/// Degree-4 divisor E >= F with rank >= 1 on G_n for effective F of degree 2,
/// built by case analysis on where the two points of F lie.
std::optional<Divisor> pencil_through(const FamilyGraph& g, const Divisor& f);

/// Every F = f1 + f2 with f_i on the k/4 grid, plus `random_pairs` seeded
/// random pairs, lies in a verified g^1_4.
ClaimResult check_w14_lower(const GnSpec& spec, int random_pairs, std::uint64_t seed, const SearchBudget& budget);

/// F = two points of gamma0 (a quarter and half way round) plus the quarter
/// point of gamma1 lies in no g^1_4 of the form F + x with x on the grid.
ClaimResult check_w14_upper(const GnSpec& spec, const SearchBudget& budget);

/// Clifford index 2: an exhibited rank-1 degree-4 divisor together with the
/// exclusion of Clifford index 0 and 1.
ClaimResult check_clifford_two(const GnSpec& spec, const SearchBudget& budget);

}  // namespace mg
