#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "metricgraph/claim.hpp"

namespace mgraph {

/// Output of one command: the checked claims plus everything needed to
/// replay them.
struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> budgets;
  std::vector<mg::ClaimResult> parts;
  std::vector<std::string> statements;  // free text, printed after the parts
  std::optional<double> seconds;        // only when timing was requested

  /// Every part holds.
  bool verdict() const;
  /// Weakest mode over the parts.
  mg::Mode mode() const;
};

/// 0 when every part holds, 1 when some part fails with a counterexample,
/// 4 when a part fails without one (the budget was not enough to decide).
int exit_code(const Report& r);

std::string to_text(const Report& r);
std::string to_json(const Report& r);

enum ExitCode { kOk = 0, kFalsified = 1, kParseError = 2, kDomainError = 3, kInconclusive = 4 };

}  // namespace mgraph
