#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metricgraph/family.hpp"
#include "metricgraph/harmonic.hpp"
#include "mgraph/report.hpp"

namespace mgraph {

/// Inputs shared by the verification commands. Unset specs use the defaults.
struct VerifyOptions {
  std::optional<mg::G0Spec> g0;
  std::optional<mg::GnSpec> gn;
  int n = 2;
  std::uint64_t seed = 1;
  int jobs = 1;
  int budget_mods = 2;    // infinite edges per modification
  int subdiv = 8;         // attachment sites at offsets k/subdiv
  int grid = 4;           // sampling grid denominator for class searches
  long long max_candidates = 5'000'000;
  int random_pairs = 50;  // extra random F for the w^1_4 lower bound
  bool variants = false;  // also run the perturbed specs where supported
};

/// lemma1, lemma2, prop1, prop2, lemma3, theorem, corollary.
const std::vector<std::string>& claim_ids();

/// Runs the checks behind one claim id; throws std::invalid_argument for an
/// unknown id.
Report verify_claim(const std::string& id, const VerifyOptions& options);

/// Finite morphism plus a subtree hanging off the rest of the source at t.
struct SubtreeCase {
  std::string name;
  mg::GraphMorphism morphism;
  std::vector<mg::EdgeId> subtree;
  mg::VertexId t = 0;
  bool maps_into_loop = false;  // by construction
};

/// Five candidates with a subtree edge mapped onto a cycle edge of the
/// target and five where the subtree lands on bridges.
std::vector<SubtreeCase> subtree_cases();

/// Runs subtree_into_loop_test on every case and compares with the label.
mg::ClaimResult check_subtree_cases();

/// The three v1-v2 paths of a family graph, for tagging length clashes.
std::vector<mg::NamedPath> family_paths(const mg::FamilyGraph& g);

}  // namespace mgraph
