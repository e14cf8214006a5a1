#include "mgraph/io.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mgraph {

using mg::DomainError;
using mg::Rat;

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string text;
  std::size_t column = 1;
};

struct Line {
  std::size_t number = 0;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      std::size_t start = i;
      while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i > start) line.tokens.push_back({std::string(raw.substr(start, i - start)), start + 1});
    }
    if (!line.tokens.empty()) lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

Rat parse_rat(std::string_view s, std::size_t line, std::size_t column) {
  std::size_t err = 0;
  auto r = Rat::parse(s, &err);
  if (!r) throw ParseError(line, column + err, "malformed rational '" + std::string(s) + "'");
  return *r;
}

mg::Length parse_length(const Token& t, std::size_t line) {
  if (t.text == "inf") return mg::Length::infinity();
  Rat r = parse_rat(t.text, line, t.column);
  if (r.sign() <= 0) throw ParseError(line, t.column, "edge length must be positive");
  return mg::Length(r);
}

void expect_count(const Line& l, std::size_t lo, std::size_t hi, const char* what) {
  if (l.tokens.size() < lo || l.tokens.size() > hi) {
    std::size_t col = l.tokens.size() < lo ? l.tokens.back().column + l.tokens.back().text.size() : l.tokens[hi].column;
    throw ParseError(l.number, col, std::string("expected ") + what);
  }
}

}  // namespace

GraphDocument parse_graph_document(std::string_view text) {
  GraphDocument doc;
  std::vector<Line> lines = tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty graph file");
  const Line& header = lines.front();
  if (header.tokens[0].text != "metricgraph") throw ParseError(header.number, 1, "expected 'metricgraph <version>'");
  expect_count(header, 2, 2, "'metricgraph <version>'");
  if (header.tokens[1].text != "1")
    throw ParseError(header.number, header.tokens[1].column, "unsupported format version " + header.tokens[1].text);
  std::map<std::string, mg::VertexId, std::less<>> vertex_index;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& l = lines[k];
    const std::string& kw = l.tokens[0].text;
    if (kw == "vertex") {
      expect_count(l, 2, 3, "'vertex <name> [leaf]'");
      bool leaf = false;
      if (l.tokens.size() == 3) {
        if (l.tokens[2].text != "leaf") throw ParseError(l.number, l.tokens[2].column, "expected 'leaf'");
        leaf = true;
      }
      if (!vertex_index.emplace(l.tokens[1].text, doc.vertices.size()).second)
        throw ParseError(l.number, l.tokens[1].column, "duplicate vertex '" + l.tokens[1].text + "'");
      doc.vertices.push_back({l.tokens[1].text, leaf});
    } else if (kw == "edge") {
      expect_count(l, 5, 5, "'edge <name> <u> <v> <length>'");
      mg::Edge e;
      e.name = l.tokens[1].text;
      for (int end = 0; end < 2; ++end) {
        const Token& t = l.tokens[2 + end];
        auto it = vertex_index.find(t.text);
        if (it == vertex_index.end()) throw ParseError(l.number, t.column, "unknown vertex '" + t.text + "'");
        (end == 0 ? e.u : e.v) = it->second;
      }
      e.length = parse_length(l.tokens[4], l.number);
      doc.edges.push_back(e);
    } else if (kw == "mark") {
      expect_count(l, 3, 3, "'mark <name> <point>'");
      doc.marks.push_back({l.tokens[1].text, l.tokens[2].text});
    } else if (kw == "family") {
      expect_count(l, 2, 64, "'family <g0|gn> key=value ...'");
      if (doc.family) throw ParseError(l.number, 1, "more than one family line");
      FamilyStanza f;
      f.kind = l.tokens[1].text;
      if (f.kind != "g0" && f.kind != "gn") throw ParseError(l.number, l.tokens[1].column, "family must be g0 or gn");
      for (std::size_t i = 2; i < l.tokens.size(); ++i) {
        const Token& t = l.tokens[i];
        auto eq = t.text.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError(l.number, t.column, "expected key=value");
        std::string key = t.text.substr(0, eq);
        std::string value = t.text.substr(eq + 1);
        static const std::vector<std::string> g0_keys = {"l0", "l1", "l2", "q1", "q2"};
        bool known = std::find(g0_keys.begin(), g0_keys.end(), key) != g0_keys.end() ||
                     (f.kind == "gn" && (key == "n" || key == "loops" || key == "extra"));
        if (!known) throw ParseError(l.number, t.column, "unknown family parameter '" + key + "'");
        // Validate values now so errors carry positions.
        std::size_t vcol = t.column + eq + 1;
        if (key == "n") {
          Rat n = parse_rat(value, l.number, vcol);
          if (!n.is_integer()) throw ParseError(l.number, vcol, "n must be an integer");
        } else if (key == "loops") {
          std::size_t off = 0;
          std::stringstream ss(value);
          for (std::string item; std::getline(ss, item, ',');) {
            parse_rat(item, l.number, vcol + off);
            off += item.size() + 1;
          }
        } else if (key == "extra") {
          std::size_t off = 0;
          std::stringstream ss(value);
          for (std::string item; std::getline(ss, item, ',');) {
            auto colon = item.find(':');
            if (colon == std::string::npos || item.size() < 4 || item[0] != 'e' ||
                (item[1] != '0' && item[1] != '1' && item[1] != '2') || colon != 2)
              throw ParseError(l.number, vcol + off, "expected e<0|1|2>:<offset>");
            parse_rat(item.substr(colon + 1), l.number, vcol + off + colon + 1);
            off += item.size() + 1;
          }
        } else {
          parse_rat(value, l.number, vcol);
        }
        f.params.push_back({key, value});
      }
      doc.family = std::move(f);
    } else {
      throw ParseError(l.number, l.tokens[0].column, "unknown directive '" + kw + "'");
    }
  }
  if (doc.family && (!doc.vertices.empty() || !doc.edges.empty()))
    throw ParseError(lines[1].number, 1, "a family line cannot be combined with vertex or edge lines");
  if (!doc.family && doc.vertices.empty()) throw ParseError(header.number, 1, "graph has no vertices");
  return doc;
}

namespace {

mg::G0Spec g0_from(const FamilyStanza& f) {
  mg::G0Spec s = mg::default_g0();
  std::map<std::string, Rat*> fields = {{"l0", &s.l0}, {"l1", &s.l1}, {"l2", &s.l2}, {"q1", &s.q1}, {"q2", &s.q2}};
  for (const auto& [k, v] : f.params)
    if (auto it = fields.find(k); it != fields.end()) *it->second = *Rat::parse(v);
  return s;
}

mg::GnSpec gn_from(const FamilyStanza& f, std::optional<int> n_override) {
  mg::GnSpec s;
  s.n = 2;
  for (const auto& [k, v] : f.params)
    if (k == "n") s.n = static_cast<int>(Rat::parse(v)->num());
  if (n_override) s.n = *n_override;
  s.base = g0_from(f);
  for (const auto& [k, v] : f.params) {
    std::stringstream ss(v);
    if (k == "loops")
      for (std::string item; std::getline(ss, item, ',');) s.loops.push_back(*Rat::parse(item));
    if (k == "extra")
      for (std::string item; std::getline(ss, item, ',');)
        s.extra.push_back({item[1] - '0', *Rat::parse(item.substr(3))});
  }
  return s;
}

}  // namespace

LoadedGraph load_graph(const GraphDocument& doc, std::optional<int> n) {
  LoadedGraph out;
  if (doc.family) {
    mg::FamilyGraph fg;
    if (doc.family->kind == "g0") {
      out.g0 = g0_from(*doc.family);
      fg = mg::build_g0(*out.g0);
    } else {
      out.gn = gn_from(*doc.family, n);
      if (out.gn->n < 1) throw DomainError("gn needs n >= 1");
      fg = mg::build_gn(*out.gn);
    }
    out.graph = fg.graph;
    for (const auto& [name, p] : fg.marks) out.marks.emplace(name, p);
    out.family = std::move(fg);
  } else {
    out.graph = std::make_shared<const mg::MetricGraph>(doc.vertices, doc.edges);
  }
  for (const auto& [name, text] : doc.marks) {
    mg::Point p = parse_point(out, text);
    out.marks.insert_or_assign(name, p);
  }
  return out;
}

LoadedGraph load_graph_text(std::string_view text, std::optional<int> n) {
  return load_graph(parse_graph_document(text), n);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedGraph load_graph_file(const std::string& path, std::optional<int> n) { return load_graph_text(read_file(path), n); }

std::string emit_graph(const mg::MetricGraph& g, const std::map<std::string, mg::Point, std::less<>>& marks) {
  std::ostringstream os;
  os << "metricgraph 1\n";
  for (const auto& v : g.vertices()) os << "vertex " << v.name << (v.infinite_leaf ? " leaf" : "") << "\n";
  for (const auto& e : g.edges())
    os << "edge " << e.name << " " << g.vertex_name(e.u) << " " << g.vertex_name(e.v) << " " << e.length.str() << "\n";
  for (const auto& [name, p] : marks) os << "mark " << name << " " << g.describe(p) << "\n";
  return os.str();
}

namespace {

void emit_g0_params(std::ostream& os, const mg::G0Spec& s) {
  os << " l0=" << s.l0 << " l1=" << s.l1 << " l2=" << s.l2 << " q1=" << s.q1 << " q2=" << s.q2;
}

}  // namespace

std::string emit_family(const mg::GnSpec& spec) {
  std::ostringstream os;
  os << "metricgraph 1\nfamily gn n=" << spec.n;
  emit_g0_params(os, spec.base);
  if (!spec.loops.empty()) {
    os << " loops=";
    for (std::size_t i = 0; i < spec.loops.size(); ++i) os << (i ? "," : "") << spec.loops[i];
  }
  if (!spec.extra.empty()) {
    os << " extra=";
    for (std::size_t i = 0; i < spec.extra.size(); ++i)
      os << (i ? "," : "") << "e" << spec.extra[i].edge << ":" << spec.extra[i].offset;
  }
  os << "\n";
  return os.str();
}

std::string emit_family(const mg::G0Spec& spec) {
  std::ostringstream os;
  os << "metricgraph 1\nfamily g0";
  emit_g0_params(os, spec);
  os << "\n";
  return os.str();
}

mg::Point parse_point(const LoadedGraph& g, std::string_view text) {
  if (text.empty()) throw ParseError(1, 1, "empty point");
  if (auto it = g.marks.find(text); it != g.marks.end()) return it->second;
  if (auto v = g.graph->find_vertex(text)) {
    mg::Point p = mg::Point::vertex(*v);
    return p;
  }
  auto at = text.find('@');
  if (at == std::string_view::npos) throw DomainError("no point named '" + std::string(text) + "'");
  std::string_view edge = text.substr(0, at);
  Rat offset = parse_rat(text.substr(at + 1), 1, at + 2);
  auto e = g.graph->find_edge(edge);
  if (!e) throw DomainError("no edge named '" + std::string(edge) + "'");
  return g.graph->point_on_edge(*e, offset);
}

mg::Divisor parse_divisor(const LoadedGraph& g, std::string_view text) {
  mg::Divisor d(g.graph);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  if (i == text.size()) throw ParseError(1, i + 1, "empty divisor");
  std::string_view rest = text.substr(i);
  if (rest.substr(0, rest.find_last_not_of(" \t") + 1) == "0") return d;
  bool first = true;
  while (true) {
    skip();
    int sign = 1;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      if (first && text[i] == '+') throw ParseError(1, i + 1, "unexpected '+'");
      sign = text[i] == '-' ? -1 : 1;
      ++i;
      skip();
    } else if (!first) {
      throw ParseError(1, i + 1, "expected '+' or '-'");
    }
    first = false;
    if (i == text.size()) throw ParseError(1, i + 1, "expected a term");
    long coefficient = 1;
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i - start > 9) throw ParseError(1, start + 1, "coefficient too large");
      coefficient = std::stol(std::string(text.substr(start, i - start)));
      skip();
      if (i == text.size() || text[i] != '*') throw ParseError(1, i + 1, "expected '*' after coefficient");
      ++i;
      skip();
    }
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '+' && text[i] != '-' &&
           text[i] != '*')
      ++i;
    if (i == start) throw ParseError(1, i + 1, "expected a point");
    mg::Point p;
    try {
      p = parse_point(g, text.substr(start, i - start));
    } catch (const ParseError& e) {
      throw ParseError(1, start + e.column(), std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
    d.add(p, sign * static_cast<int>(coefficient));
    skip();
    if (i == text.size()) break;
  }
  return d;
}

mg::GraphMorphism parse_morphism(std::string_view text, const LoadedGraph& source, const LoadedGraph& target) {
  std::vector<Line> lines = tokenize(text);
  if (lines.empty() || lines[0].tokens[0].text != "morphism") throw ParseError(1, 1, "expected 'morphism 1'");
  expect_count(lines[0], 2, 2, "'morphism 1'");
  if (lines[0].tokens[1].text != "1") throw ParseError(lines[0].number, lines[0].tokens[1].column, "unsupported version");
  const mg::MetricGraph& s = *source.graph;
  const mg::MetricGraph& t = *target.graph;
  mg::GraphMorphism m{source.graph, target.graph, std::vector<mg::VertexId>(s.vertex_count(), t.vertex_count()),
                      std::vector<mg::EdgeImage>(s.edge_count(), mg::EdgeImage::collapse(t.vertex_count()))};
  std::vector<bool> vseen(s.vertex_count()), eseen(s.edge_count());
  auto target_vertex = [&](const Line& l, std::size_t k) {
    auto v = t.find_vertex(l.tokens[k].text);
    if (!v) throw ParseError(l.number, l.tokens[k].column, "unknown target vertex '" + l.tokens[k].text + "'");
    return *v;
  };
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& l = lines[k];
    const std::string& kw = l.tokens[0].text;
    if (kw == "source" || kw == "target") continue;
    if (kw == "vertex") {
      expect_count(l, 4, 4, "'vertex <source> -> <target>'");
      auto v = s.find_vertex(l.tokens[1].text);
      if (!v) throw ParseError(l.number, l.tokens[1].column, "unknown source vertex '" + l.tokens[1].text + "'");
      if (l.tokens[2].text != "->") throw ParseError(l.number, l.tokens[2].column, "expected '->'");
      if (vseen[*v]) throw ParseError(l.number, l.tokens[1].column, "vertex mapped twice");
      vseen[*v] = true;
      m.vertex_map[*v] = target_vertex(l, 3);
    } else if (kw == "edge") {
      expect_count(l, 4, 7, "'edge <source> -> <target> [reversed] [dilation <d>]'");
      auto e = s.find_edge(l.tokens[1].text);
      if (!e) throw ParseError(l.number, l.tokens[1].column, "unknown source edge '" + l.tokens[1].text + "'");
      if (l.tokens[2].text != "->") throw ParseError(l.number, l.tokens[2].column, "expected '->'");
      if (eseen[*e]) throw ParseError(l.number, l.tokens[1].column, "edge mapped twice");
      eseen[*e] = true;
      if (l.tokens[3].text == "collapse") {
        expect_count(l, 5, 5, "'edge <source> -> collapse <vertex>'");
        m.edge_map[*e] = mg::EdgeImage::collapse(target_vertex(l, 4));
        continue;
      }
      auto f = t.find_edge(l.tokens[3].text);
      if (!f) throw ParseError(l.number, l.tokens[3].column, "unknown target edge '" + l.tokens[3].text + "'");
      bool forward = true;
      int dilation = 1;
      for (std::size_t i = 4; i < l.tokens.size(); ++i) {
        if (l.tokens[i].text == "reversed") {
          forward = false;
        } else if (l.tokens[i].text == "dilation" && i + 1 < l.tokens.size()) {
          Rat d = parse_rat(l.tokens[i + 1].text, l.number, l.tokens[i + 1].column);
          if (!d.is_integer() || d.sign() <= 0 || d.num() > 1'000'000)
            throw ParseError(l.number, l.tokens[i + 1].column, "dilation must be a positive integer");
          dilation = static_cast<int>(d.num());
          ++i;
        } else {
          throw ParseError(l.number, l.tokens[i].column, "expected 'reversed' or 'dilation <d>'");
        }
      }
      m.edge_map[*e] = mg::EdgeImage::onto(*f, forward, dilation);
    } else {
      throw ParseError(l.number, l.tokens[0].column, "unknown directive '" + kw + "'");
    }
  }
  for (mg::VertexId v = 0; v < s.vertex_count(); ++v)
    if (!vseen[v]) throw DomainError("source vertex '" + s.vertex_name(v) + "' is not mapped");
  for (mg::EdgeId e = 0; e < s.edge_count(); ++e)
    if (!eseen[e]) throw DomainError("source edge '" + s.edge(e).name + "' is not mapped");
  return m;
}

mg::GraphMorphism load_morphism_file(const std::string& path) {
  std::string text = read_file(path);
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  std::string source, target;
  for (const Line& l : tokenize(text)) {
    if (l.tokens[0].text == "source" || l.tokens[0].text == "target") {
      expect_count(l, 2, 2, "'source <file>' or 'target <file>'");
      (l.tokens[0].text == "source" ? source : target) = (dir / l.tokens[1].text).string();
    }
  }
  if (source.empty() || target.empty()) throw ParseError(1, 1, "morphism file needs source and target lines");
  LoadedGraph s = load_graph_file(source);
  LoadedGraph t = load_graph_file(target);
  return parse_morphism(text, s, t);
}

std::string emit_morphism(const mg::GraphMorphism& m, const std::string& source_path, const std::string& target_path) {
  std::ostringstream os;
  const mg::MetricGraph& s = *m.source;
  const mg::MetricGraph& t = *m.target;
  os << "morphism 1\nsource " << source_path << "\ntarget " << target_path << "\n";
  for (mg::VertexId v = 0; v < s.vertex_count(); ++v)
    os << "vertex " << s.vertex_name(v) << " -> " << t.vertex_name(m.vertex_map[v]) << "\n";
  for (mg::EdgeId e = 0; e < s.edge_count(); ++e) {
    const mg::EdgeImage& img = m.edge_map[e];
    os << "edge " << s.edge(e).name << " -> ";
    if (img.collapsed) {
      os << "collapse " << t.vertex_name(img.vertex) << "\n";
      continue;
    }
    os << t.edge(img.edge).name;
    if (!img.forward) os << " reversed";
    if (img.dilation != 1) os << " dilation " << img.dilation;
    os << "\n";
  }
  return os.str();
}

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string emit_dot(const mg::MetricGraph& g, const std::string& name) {
  std::ostringstream os;
  os << "graph " << quoted(name) << " {\n";
  for (const auto& v : g.vertices())
    os << "  " << quoted(v.name) << (v.infinite_leaf ? " [shape=point]" : " [label=" + quoted(v.name) + "]") << ";\n";
  for (const auto& e : g.edges())
    os << "  " << quoted(g.vertex_name(e.u)) << " -- " << quoted(g.vertex_name(e.v))
       << " [label=" << quoted(e.name + ": " + e.length.str()) << "];\n";
  os << "}\n";
  return os.str();
}

}  // namespace mgraph
