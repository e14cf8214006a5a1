#pragma once

#include <optional>
#include <string>
#include <vector>

namespace mg {

/// How much of a quantified statement was actually checked.
enum class Mode {
  Exact,                  // finite certificate covering every case
  Sampled,                // checked on a finite grid of a continuum
  ExhaustedWithinBudget,  // every candidate within an explicit budget
};

const char* to_string(Mode m);

/// Outcome of checking one statement, with the evidence behind it.
struct ClaimResult {
  std::string claim;
  Mode mode = Mode::Exact;
  bool verdict = false;
  std::optional<long long> value;  // numeric outcome, when the claim has one
  std::vector<std::string> witnesses;
  std::vector<std::string> counterexamples;
  std::vector<std::string> notes;
  std::string sampling;
  long long candidates_checked = 0;
};

/// Weakest of two modes (Exact > ExhaustedWithinBudget > Sampled).
Mode weakest(Mode a, Mode b);

}  // namespace mg
