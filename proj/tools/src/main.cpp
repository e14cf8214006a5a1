#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "metricgraph/family_checks.hpp"
#include "metricgraph/harmonic.hpp"
#include "metricgraph/rank.hpp"
#include "mgraph/claims.hpp"
#include "mgraph/io.hpp"
#include "mgraph/report.hpp"

namespace {

using namespace mgraph;

struct Globals {
  std::uint64_t seed = 1;
  int jobs = 1;
  bool json = false;
  bool timing = false;
};

std::uint64_t default_seed() {
  if (const char* s = std::getenv("MGRAPH_SEED")) return std::strtoull(s, nullptr, 10);
  return 1;
}

std::optional<int> opt_n(int n) { return n > 0 ? std::optional<int>(n) : std::nullopt; }

int emit(const Report& r, const Globals& g) {
  std::cout << (g.json ? to_json(r) : to_text(r));
  return exit_code(r);
}

mg::SearchBudget class_budget(const Globals& g, int grid, long long max_candidates) {
  mg::SearchBudget b;
  b.grid.denominator = grid;
  b.grid.seed = g.seed;
  b.max_candidates = max_candidates;
  b.jobs = g.jobs;
  return b;
}

std::string certificate_json(const mg::Reduction& red) {
  using nlohmann::ordered_json;
  const mg::MetricGraph& g = red.divisor.graph();
  ordered_json j;
  j["input"] = red.certificate.input.str();
  j["base"] = g.describe(red.certificate.base);
  j["output"] = red.divisor.str();
  ordered_json events = ordered_json::array();
  for (const auto& ev : red.certificate.events) {
    ordered_json e;
    ordered_json points = ordered_json::array();
    for (const auto& p : ev.closed_points) points.push_back(g.describe(p));
    ordered_json segs = ordered_json::array();
    for (const auto& s : ev.closed_segments) segs.push_back(g.edge(s.edge).name + "[" + s.lo.str() + ", " + s.hi.str() + "]");
    e["points"] = points;
    e["segments"] = segs;
    e["amount"] = ev.amount.str();
    events.push_back(e);
  }
  j["events"] = events;
  j["replay"] = mg::replay(red.certificate);
  return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Divisors, ranks and harmonic morphisms on metric graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed = default_seed();
  app.add_option("--seed", g.seed, "Random seed (default: $MGRAPH_SEED or 1)");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--timing", g.timing, "Record wall time in the report");

  std::string graph_path, divisor_text, base_text, morphism_path, log_path, claim, spec_path;
  int n = 0, r = 1, d = 4, w = -1, grid = 4, budget_mods = 2, subdiv = 8, random_pairs = 50;
  long long max_candidates = 5'000'000;
  bool certificate = false, variants = false;

  auto* reduce = app.add_subcommand("reduce", "Reduce a divisor at a base point");
  reduce->add_option("graph", graph_path, "Graph file")->required();
  reduce->add_option("--divisor", divisor_text, "Divisor, e.g. \"2*m0 - v1 + e1@3/4\"")->required();
  reduce->add_option("--at", base_text, "Base point")->required();
  reduce->add_option("--n", n, "Loop count for gn family files");
  reduce->add_flag("--certificate", certificate, "Print the firing certificate");

  auto* rank = app.add_subcommand("rank", "Baker-Norine rank of a divisor");
  rank->add_option("graph", graph_path, "Graph file")->required();
  rank->add_option("--divisor", divisor_text, "Divisor")->required();
  rank->add_option("--n", n, "Loop count for gn family files");

  auto* wrd = app.add_subcommand("wrd", "Bounds on w^r_d");
  wrd->add_option("graph", graph_path, "Graph file")->required();
  wrd->add_option("--n", n, "Loop count for gn family files");
  wrd->add_option("--r", r, "Rank r")->check(CLI::NonNegativeNumber);
  wrd->add_option("--d", d, "Degree d")->check(CLI::NonNegativeNumber);
  wrd->add_option("--w", w, "Check w^r_d == w instead of bracketing it");
  wrd->add_option("--grid", grid, "Grid denominator")->check(CLI::PositiveNumber);
  wrd->add_option("--max-candidates", max_candidates, "Candidate budget per search");
  wrd->add_option("--random-pairs", random_pairs, "Extra random samples");

  auto* clifford = app.add_subcommand("clifford", "Clifford index of a graph");
  clifford->add_option("graph", graph_path, "Graph file")->required();
  clifford->add_option("--n", n, "Loop count for gn family files");
  clifford->add_option("--grid", grid, "Grid denominator")->check(CLI::PositiveNumber);
  clifford->add_option("--max-candidates", max_candidates, "Candidate budget");

  auto* harmonic = app.add_subcommand("harmonic", "Harmonic morphisms");
  harmonic->require_subcommand(1);
  auto* hcheck = harmonic->add_subcommand("check", "Check a morphism file");
  hcheck->add_option("morphism", morphism_path, "Morphism file")->required();
  auto* hsearch = harmonic->add_subcommand("search", "Search degree-2 covers of genus-1 graphs");
  hsearch->add_option("graph", graph_path, "Graph file")->required();
  hsearch->add_option("--n", n, "Loop count for gn family files");
  hsearch->add_option("--budget-mods", budget_mods, "Infinite edges per modification")->check(CLI::NonNegativeNumber);
  hsearch->add_option("--subdiv", subdiv, "Attachment sites at offsets k/subdiv")->check(CLI::PositiveNumber);
  hsearch->add_option("--log", log_path, "Write the rejection log (tab separated)");

  auto* verify = app.add_subcommand("verify", "Run the checks behind a claim");
  verify->add_option("claim", claim, "Claim id")->required()->check(CLI::IsMember(claim_ids()));
  verify->add_option("--graph", spec_path, "Family file overriding the default spec");
  verify->add_option("--n", n, "Loop count");
  verify->add_option("--budget-mods", budget_mods, "Infinite edges per modification")->check(CLI::NonNegativeNumber);
  verify->add_option("--subdiv", subdiv, "Attachment sites at offsets k/subdiv")->check(CLI::PositiveNumber);
  verify->add_option("--grid", grid, "Grid denominator for class searches")->check(CLI::PositiveNumber);
  verify->add_option("--max-candidates", max_candidates, "Candidate budget per search");
  verify->add_option("--random-pairs", random_pairs, "Extra random pairs for w^1_4");
  verify->add_flag("--variants", variants, "Also run the alternative specs");

  auto* dot = app.add_subcommand("dot", "Graphviz rendering");
  dot->add_option("graph", graph_path, "Graph file")->required();
  dot->add_option("--n", n, "Loop count for gn family files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kParseError;
  }

  auto start = std::chrono::steady_clock::now();
  auto finish = [&](Report rep) {
    if (g.timing) rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(rep, g);
  };

  try {
    if (*reduce) {
      LoadedGraph lg = load_graph_file(graph_path, opt_n(n));
      mg::Divisor div = parse_divisor(lg, divisor_text);
      mg::Point q = parse_point(lg, base_text);
      mg::Reduction red = mg::reduce(div, q);
      if (g.json) {
        std::cout << certificate_json(red);
      } else {
        std::cout << red.divisor.str() << "\n";
        if (certificate) {
          for (const auto& ev : red.certificate.events) {
            std::cout << "fire";
            for (const auto& p : ev.closed_points) std::cout << " " << lg.graph->describe(p);
            for (const auto& s : ev.closed_segments)
              std::cout << " " << lg.graph->edge(s.edge).name << "[" << s.lo << ", " << s.hi << "]";
            std::cout << " by " << ev.amount << "\n";
          }
          std::cout << "replay: " << (mg::replay(red.certificate) ? "ok" : "FAILED") << "\n";
        }
      }
      return kOk;
    }
    if (*rank) {
      LoadedGraph lg = load_graph_file(graph_path, opt_n(n));
      mg::Divisor div = parse_divisor(lg, divisor_text);
      int value = mg::rank(div);
      if (!g.json) {
        std::cout << value << "\n";
        return kOk;
      }
      Report rep;
      rep.command = "rank";
      rep.seed = g.seed;
      mg::ClaimResult c;
      c.claim = "rank(" + div.str() + ")";
      c.verdict = true;
      c.value = value;
      rep.parts.push_back(c);
      return finish(rep);
    }
    if (*wrd) {
      LoadedGraph lg = load_graph_file(graph_path, opt_n(n));
      mg::SearchBudget budget = class_budget(g, grid, max_candidates);
      Report rep;
      rep.command = "wrd r=" + std::to_string(r) + " d=" + std::to_string(d) + (w >= 0 ? " w=" + std::to_string(w) : "");
      rep.seed = g.seed;
      rep.budgets = {{"grid_denominator", std::to_string(grid)}, {"max_candidates", std::to_string(max_candidates)}};
      if (w < 0) {
        rep.parts.push_back(mg::wrd_value(lg.graph, r, d, budget));
      } else if (lg.gn && r == 1 && d == 4 && w == 1) {
        budget.grid.random_points = random_pairs;
        rep.budgets.push_back({"random_pairs", std::to_string(random_pairs)});
        rep.parts.push_back(mg::check_w14_lower(*lg.gn, random_pairs, g.seed, budget));
        rep.parts.push_back(mg::check_w14_upper(*lg.gn, budget));
      } else {
        std::vector<mg::Point> pts = mg::sampling_grid(*lg.graph, budget.grid);
        auto samples = [&](int degree) {
          std::vector<mg::Divisor> out;
          mg::for_each_multiset(pts.size(), degree, [&](std::span<const std::size_t> idx) {
            mg::Divisor f(lg.graph);
            for (std::size_t i : idx) f.add(pts[i]);
            out.push_back(f);
            return static_cast<long long>(out.size()) < max_candidates;
          });
          return out;
        };
        std::vector<mg::Divisor> lower = samples(r + w);
        std::vector<mg::Divisor> upper = samples(r + w + 1);
        rep.parts.push_back(mg::wrd_lower(lg.graph, r, d, w, lower, nullptr, budget));
        rep.parts.push_back(mg::wrd_upper(lg.graph, r, d, w + 1, upper, budget));
      }
      return finish(rep);
    }
    if (*clifford) {
      LoadedGraph lg = load_graph_file(graph_path, opt_n(n));
      mg::SearchBudget budget = class_budget(g, grid, max_candidates);
      Report rep;
      rep.command = "clifford";
      rep.seed = g.seed;
      rep.budgets = {{"grid_denominator", std::to_string(grid)}, {"max_candidates", std::to_string(max_candidates)}};
      rep.parts.push_back(lg.gn ? mg::check_clifford_two(*lg.gn, budget) : mg::graph_clifford_index(lg.graph, budget));
      return finish(rep);
    }
    if (*hcheck) {
      mg::GraphMorphism m = load_morphism_file(morphism_path);
      mg::HarmonicCertificate cert = mg::check_harmonic(m);
      Report rep;
      rep.command = "harmonic check";
      rep.seed = g.seed;
      mg::ClaimResult c;
      c.claim = "harmonic";
      c.verdict = cert.harmonic;
      if (cert.harmonic) {
        c.value = cert.degree;
        c.notes.push_back(std::string("finite: ") + (mg::is_finite(m) ? "yes" : "no"));
        for (mg::VertexId v = 0; v < m.source->vertex_count(); ++v)
          c.witnesses.push_back("local degree at " + m.source->vertex_name(v) + ": " + std::to_string(cert.local_degree[v]));
      } else {
        c.counterexamples.push_back(cert.violation);
      }
      rep.parts.push_back(c);
      return finish(rep);
    }
    if (*hsearch) {
      LoadedGraph lg = load_graph_file(graph_path, opt_n(n));
      mg::CoverSearchBudget budget{budget_mods, subdiv, g.jobs};
      std::vector<mg::NamedPath> paths;
      if (lg.family) paths = family_paths(*lg.family);
      mg::CoverSearchResult res = mg::search_degree2_to_genus1(*lg.graph, paths, budget);
      if (!log_path.empty()) {
        std::ofstream out(log_path);
        out << "modification\tsites\tinvolution\treason\tdetail\n";
        for (const auto& rej : res.log)
          out << rej.modification << "\t" << rej.sites << "\t" << rej.involution << "\t" << mg::to_string(rej.reason)
              << "\t" << rej.detail << "\n";
      }
      Report rep;
      rep.command = "harmonic search";
      rep.seed = g.seed;
      rep.budgets = {{"budget_mods", std::to_string(budget_mods)}, {"subdiv", std::to_string(subdiv)}};
      rep.parts.push_back(res.claim);
      return finish(rep);
    }
    if (*verify) {
      VerifyOptions o;
      o.seed = g.seed;
      o.jobs = g.jobs;
      o.budget_mods = budget_mods;
      o.subdiv = subdiv;
      o.grid = grid;
      o.max_candidates = max_candidates;
      o.random_pairs = random_pairs;
      o.variants = variants;
      if (!spec_path.empty()) {
        LoadedGraph lg = load_graph_file(spec_path, opt_n(n));
        if (!lg.g0 && !lg.gn) throw mg::DomainError("--graph needs a file with a family line");
        o.g0 = lg.g0;
        o.gn = lg.gn;
        if (lg.gn) o.n = lg.gn->n;
      }
      if (n > 0) o.n = n;
      return finish(verify_claim(claim, o));
    }
    if (*dot) {
      LoadedGraph lg = load_graph_file(graph_path, opt_n(n));
      std::cout << emit_dot(*lg.graph);
      return kOk;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const mg::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}
