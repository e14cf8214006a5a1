#include "mgraph/report.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace mgraph {

bool Report::verdict() const {
  for (const auto& p : parts)
    if (!p.verdict) return false;
  return true;
}

mg::Mode Report::mode() const {
  mg::Mode m = mg::Mode::Exact;
  for (const auto& p : parts) m = mg::weakest(m, p.mode);
  return m;
}

int exit_code(const Report& r) {
  if (r.verdict()) return kOk;
  for (const auto& p : r.parts)
    if (!p.verdict && !p.counterexamples.empty()) return kFalsified;
  return kInconclusive;
}

namespace {

std::string seconds_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

}  // namespace

std::string to_text(const Report& r) {
  std::ostringstream os;
  os << "command: " << r.command << "\n";
  os << "seed: " << r.seed << "\n";
  for (const auto& [k, v] : r.budgets) os << "budget: " << k << " = " << v << "\n";
  for (const auto& p : r.parts) {
    os << "[" << mg::to_string(p.mode) << "] " << p.claim << ": " << (p.verdict ? "true" : "false") << "\n";
    if (p.value) os << "  value: " << *p.value << "\n";
    if (!p.sampling.empty()) os << "  sampling: " << p.sampling << "\n";
    if (p.candidates_checked) os << "  checked: " << p.candidates_checked << "\n";
    constexpr std::size_t kShown = 20;
    for (std::size_t i = 0; i < p.witnesses.size() && i < kShown; ++i) os << "  witness: " << p.witnesses[i] << "\n";
    if (p.witnesses.size() > kShown)
      os << "  witness: ... " << p.witnesses.size() - kShown << " more in the JSON report\n";
    for (const auto& c : p.counterexamples) os << "  counterexample: " << c << "\n";
    for (const auto& n : p.notes) os << "  note: " << n << "\n";
  }
  for (const auto& s : r.statements) os << s << "\n";
  os << "result: " << mg::to_string(r.mode()) << " " << (r.verdict() ? "true" : "false") << "\n";
  if (r.seconds) os << "time: " << seconds_text(*r.seconds) << " s\n";
  return os.str();
}

std::string to_json(const Report& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["command"] = r.command;
  j["seed"] = r.seed;
  ordered_json budgets = ordered_json::object();
  for (const auto& [k, v] : r.budgets) budgets[k] = v;
  j["budgets"] = budgets;
  ordered_json parts = ordered_json::array();
  for (const auto& p : r.parts) {
    ordered_json o;
    o["claim"] = p.claim;
    o["mode"] = mg::to_string(p.mode);
    o["verdict"] = p.verdict;
    o["value"] = p.value ? ordered_json(*p.value) : ordered_json(nullptr);
    o["sampling"] = p.sampling;
    o["checked"] = p.candidates_checked;
    o["witnesses"] = p.witnesses;
    o["counterexamples"] = p.counterexamples;
    o["notes"] = p.notes;
    parts.push_back(std::move(o));
  }
  j["parts"] = std::move(parts);
  j["statements"] = r.statements;
  j["mode"] = mg::to_string(r.mode());
  j["verdict"] = r.verdict();
  if (r.seconds) j["seconds"] = *r.seconds;
  return j.dump(2) + "\n";
}

}  // namespace mgraph
