#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "quasifold/atlas.hpp"
#include "quasifold/bimodule.hpp"
#include "quasifold/checks.hpp"
#include "quasifold/lifting.hpp"
#include "quasifold/structure_groupoid.hpp"

namespace quasifold::io {

using json = nlohmann::ordered_json;

/// Short text for QAlpha values, e.g. "2+3α", "-α/2", "1/3"; QAlpha::parse
/// reads it back.
inline std::string display(const Rational& r) {
  return r.den() == 1 ? std::to_string(r.num()) : std::to_string(r.num()) + "/" + std::to_string(r.den());
}

inline std::string display(const QAlpha& x) {
  const Rational& p = x.rational_part();
  const Rational& q = x.alpha_part();
  if (q.is_zero()) return display(p);
  std::string a;
  if (q == Rational(1))
    a = "α";
  else if (q == Rational(-1))
    a = "-α";
  else if (q.den() == 1)
    a = std::to_string(q.num()) + "α";
  else if (q.num() == 1 || q.num() == -1)
    a = std::string(q.num() < 0 ? "-" : "") + "α/" + std::to_string(q.den());
  else
    a = std::to_string(q.num()) + "α/" + std::to_string(q.den());
  if (p.is_zero()) return a;
  return display(p) + (a[0] == '-' ? "" : "+") + a;
}

inline std::string display(const QVector& v) {
  if (v.size() == 1) return display(v[0]);
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + display(v[i]);
  return s + ")";
}

/// x ↦ Ax + b in compact text: "x+α", "2x-1", "(1/2)x", "[[0,-1],[1,0]]x+(0, 1)".
inline std::string display(const AffineElement& g) {
  if (g.dim() == 1) {
    const Rational& a = g.linear()(0, 0);
    std::string s = a == Rational(1)    ? "x"
                    : a == Rational(-1) ? "-x"
                    : a.den() == 1      ? display(a) + "x"
                                        : "(" + display(a) + ")x";
    const QAlpha& b = g.shift()[0];
    if (b.is_zero()) return s;
    std::string bs = display(b);
    return s + (bs[0] == '-' ? "" : "+") + bs;
  }
  std::string s = "[";
  for (std::size_t i = 0; i < g.dim(); ++i) {
    s += i ? ",[" : "[";
    for (std::size_t j = 0; j < g.dim(); ++j) s += (j ? "," : "") + display(g.linear()(i, j));
    s += "]";
  }
  return s + "]x+" + display(g.shift());
}

inline std::string display(const NebulaPoint& p) { return p.chart + ":" + display(p.coords); }

inline std::string display(const Arrow& a) {
  return "(" + display(a.src) + ", " + display(a.map) + " -> " + a.dst_chart + ")";
}

// --- reading -----------------------------------------------------------------

/// Cursor into a JSON document that remembers its field path for diagnostics.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const noexcept { return *j_; }
  const std::string& path() const noexcept { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw Error("parse-error", "at " + path_ + ": " + what); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key) && !(*j_)[key].is_null(); }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) fail("missing field '" + key + "'");
    return {(*j_)[key], path_ + "." + key};
  }

  std::vector<Node> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) out.emplace_back((*j_)[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  long long integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<long long>();
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }

  /// Wraps module parse errors with the field path.
  template <class F>
  auto guarded(F&& f) const {
    try {
      return f();
    } catch (const Error& e) {
      std::string msg = e.what();
      if (e.code() == "parse-error" && msg.find(": at $") != std::string::npos) throw;
      fail(msg.substr(std::min(msg.size(), e.code().size() + 2)));
    }
  }

 private:
  const json* j_;
  std::string path_;
};

/// Parses JSON text; syntax errors carry line and column.
inline json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    throw Error("parse-error", source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                                   (pos == std::string::npos ? msg : msg.substr(pos)));
  }
}

inline json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io-error", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

inline Rational rational_from(const Node& n) {
  if (n.raw().is_number_integer()) return Rational(n.integer());
  std::string s = n.str();
  return n.guarded([&] { return Rational::parse(s); });
}

inline QAlpha qalpha_from(const Node& n) {
  if (n.raw().is_number_integer()) return QAlpha(n.integer());
  std::string s = n.str();
  return n.guarded([&] { return QAlpha::parse(s); });
}

/// A vector, or a bare scalar for a 1-vector.
inline QVector qvector_from(const Node& n) {
  if (!n.raw().is_array()) return {qalpha_from(n)};
  QVector v;
  for (const auto& c : n.items()) v.push_back(qalpha_from(c));
  return v;
}

/// {"A": [[...], ...] or a scalar in dimension one, "b": [...]}; a missing A
/// is the identity, a missing b is zero.
inline AffineElement affine_from(const Node& n, std::size_t dim) {
  if (n.raw().is_string()) {
    // Shorthand: a translation.
    QVector b = qvector_from(n);
    if (b.size() != dim) n.fail("expected " + std::to_string(dim) + " coordinates");
    return AffineElement::translation(b);
  }
  RationalMatrix a = RationalMatrix::identity(dim);
  if (n.has("A")) {
    Node an = n.at("A");
    if (!an.raw().is_array()) {
      if (dim != 1) an.fail("scalar linear part needs dimension 1");
      a(0, 0) = rational_from(an);
    } else {
      auto rows = an.items();
      if (rows.size() != dim) an.fail("expected " + std::to_string(dim) + " rows");
      for (std::size_t i = 0; i < dim; ++i) {
        auto cols = rows[i].items();
        if (cols.size() != dim) rows[i].fail("expected " + std::to_string(dim) + " entries");
        for (std::size_t j = 0; j < dim; ++j) a(i, j) = rational_from(cols[j]);
      }
    }
  }
  QVector b(dim);
  if (n.has("b")) {
    b = qvector_from(n.at("b"));
    if (b.size() != dim) n.at("b").fail("expected " + std::to_string(dim) + " coordinates");
  }
  return n.guarded([&] { return AffineElement(a, b); });
}

inline GroupPresentation group_from(const Node& n, std::size_t dim) {
  std::string kind = n.at("kind").str();
  return n.guarded([&]() -> GroupPresentation {
    if (kind == "translation_lattice") {
      TranslationLattice l;
      for (const auto& g : n.at("generators").items()) {
        QVector v = qvector_from(g);
        if (v.size() != dim) g.fail("expected " + std::to_string(dim) + " coordinates");
        l.generators.push_back(v);
      }
      return {dim, l};
    }
    if (kind == "rational_translations") return GroupPresentation::rationals(dim);
    if (kind == "finite") {
      FiniteMatrixGroup f;
      for (const auto& e : n.at("elements").items()) f.elements.push_back(affine_from(e, dim));
      return {dim, f};
    }
    if (kind == "generated") {
      GeneratedGroup g;
      for (const auto& e : n.at("generators").items()) g.generators.push_back(affine_from(e, dim));
      return {dim, g};
    }
    n.at("kind").fail("unknown group kind '" + kind + "'");
  });
}

/// null or missing: whole space; otherwise one [lo, hi] pair per coordinate,
/// with null for an unbounded end.
inline Box box_from(const Node& n, std::size_t dim) {
  if (n.raw().is_null()) return Box::whole();
  Box b;
  for (const auto& f : n.items()) {
    auto ends = f.items();
    if (ends.size() != 2) f.fail("expected [lo, hi]");
    Interval iv;
    if (!ends[0].raw().is_null()) iv.lo = qalpha_from(ends[0]);
    if (!ends[1].raw().is_null()) iv.hi = qalpha_from(ends[1]);
    b.factors.push_back(iv);
  }
  if (b.factors.size() != dim) n.fail("expected " + std::to_string(dim) + " intervals");
  return b;
}

inline Transition transition_from(const Node& n, std::size_t dim) {
  Transition t{n.at("from").str(), n.at("to").str(), affine_from(n.at("map"), dim), std::nullopt};
  if (n.has("domain")) t.domain = box_from(n.at("domain"), dim);
  return t;
}

inline Atlas atlas_from(const Node& n) {
  Atlas a;
  a.name = n.has("name") ? n.at("name").str() : "atlas";
  a.dimension = n.has("dimension") ? static_cast<std::size_t>(n.at("dimension").integer()) : 1;
  if (a.dimension == 0) n.at("dimension").fail("dimension must be positive");
  for (const auto& c : n.at("charts").items()) {
    Chart ch{c.at("id").str(), group_from(c.at("group"), a.dimension), Box::whole(), std::nullopt, ""};
    if (c.has("domain")) ch.domain = box_from(c.at("domain"), a.dimension);
    if (c.has("label")) ch.label = affine_from(c.at("label"), a.dimension);
    if (c.has("description")) ch.description = c.at("description").str();
    a.charts.push_back(std::move(ch));
  }
  if (n.has("transitions"))
    for (const auto& t : n.at("transitions").items()) a.transitions.push_back(transition_from(t, a.dimension));
  if (n.has("model")) a.model = Model{group_from(n.at("model").at("group"), a.dimension)};
  n.guarded([&] {
    a.validate();
    return 0;
  });
  return a;
}

/// An inline atlas, or {"$ref": "file.json"} resolved against `base_dir`.
inline Atlas atlas_or_ref(const Node& n, const std::string& base_dir) {
  if (!n.has("$ref")) return atlas_from(n);
  std::string ref = n.at("$ref").str();
  std::string path = ref.empty() || ref[0] == '/' || base_dir.empty() ? ref : base_dir + "/" + ref;
  json j = n.guarded([&] { return read_file(path); });
  return atlas_from(Node(j, ref + ":$"));
}

inline BiAtlas biatlas_from(const Node& n, const std::string& base_dir = "") {
  BiAtlas b{n.has("name") ? n.at("name").str() : "bi-atlas", atlas_or_ref(n.at("left"), base_dir),
            atlas_or_ref(n.at("right"), base_dir), {}};
  if (b.left.dimension != b.right.dimension) n.fail("left and right atlases differ in dimension");
  for (const auto& l : n.at("links").items()) {
    Transition t = transition_from(l, b.left.dimension);
    if (!b.left.has_chart(t.from)) l.at("from").fail("unknown left chart '" + t.from + "'");
    if (!b.right.has_chart(t.to)) l.at("to").fail("unknown right chart '" + t.to + "'");
    b.links.push_back(std::move(t));
  }
  return b;
}

/// "chart:coordinate" or "chart:(x, y)".
inline NebulaPoint point_from_text(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0) throw Error("parse-error", "point '" + text + "' must be chart:coords");
  NebulaPoint p{text.substr(0, colon), {}};
  std::string rest = text.substr(colon + 1);
  if (!rest.empty() && rest.front() == '(' && rest.back() == ')') rest = rest.substr(1, rest.size() - 2);
  std::stringstream ss(rest);
  std::string item;
  while (std::getline(ss, item, ',')) p.coords.push_back(QAlpha::parse(item));
  if (p.coords.empty()) throw Error("parse-error", "point '" + text + "' has no coordinates");
  return p;
}

// --- writing -----------------------------------------------------------------

inline json to_json(const QVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(display(x));
  return a;
}

inline json to_json(const AffineElement& g) {
  json rows = json::array();
  for (std::size_t i = 0; i < g.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < g.dim(); ++j) row.push_back(display(g.linear()(i, j)));
    rows.push_back(row);
  }
  return {{"A", rows}, {"b", to_json(g.shift())}};
}

inline json to_json(const GroupPresentation& g) {
  json j{{"kind", g.kind_name()}};
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, TranslationLattice>) {
          json gens = json::array();
          for (const auto& v : k.generators) gens.push_back(to_json(v));
          j["generators"] = gens;
        } else if constexpr (std::is_same_v<T, FiniteMatrixGroup>) {
          json els = json::array();
          for (const auto& e : k.elements) els.push_back(to_json(e));
          j["elements"] = els;
        } else if constexpr (std::is_same_v<T, GeneratedGroup>) {
          json gens = json::array();
          for (const auto& e : k.generators) gens.push_back(to_json(e));
          j["generators"] = gens;
        }
      },
      g.kind());
  return j;
}

inline json to_json(const Box& b) {
  if (b.is_whole()) return nullptr;
  json a = json::array();
  for (const auto& f : b.factors)
    a.push_back(json::array({f.lo ? json(display(*f.lo)) : json(nullptr), f.hi ? json(display(*f.hi)) : json(nullptr)}));
  return a;
}

inline json to_json(const Transition& t) {
  json j{{"from", t.from}, {"to", t.to}, {"map", to_json(t.map)}};
  if (t.domain) j["domain"] = to_json(*t.domain);
  return j;
}

inline json to_json(const Atlas& a) {
  json charts = json::array();
  for (const auto& c : a.charts) {
    json cj{{"id", c.id}, {"group", to_json(c.group)}, {"domain", to_json(c.domain)}};
    if (c.label) cj["label"] = to_json(*c.label);
    if (!c.description.empty()) cj["description"] = c.description;
    charts.push_back(cj);
  }
  json trans = json::array();
  for (const auto& t : a.transitions) trans.push_back(to_json(t));
  json j{{"name", a.name}, {"dimension", a.dimension}, {"charts", charts}, {"transitions", trans}};
  if (a.model) j["model"] = {{"group", to_json(a.model->group)}};
  return j;
}

inline json to_json(const BiAtlas& b) {
  json links = json::array();
  for (const auto& l : b.links) links.push_back(to_json(l));
  return {{"name", b.name}, {"left", to_json(b.left)}, {"right", to_json(b.right)}, {"links", links}};
}

inline json to_json(const NebulaPoint& p) { return {{"chart", p.chart}, {"coords", to_json(p.coords)}}; }

inline json to_json(const Arrow& a) {
  return {{"src", to_json(a.src)}, {"map", display(a.map)}, {"dst", to_json(arrow_trg(a))}};
}

inline json to_json(const CheckResult& c) {
  json j{{"name", c.name}, {"status", to_string(c.status)}, {"instances", c.instances}};
  if (c.tolerance > 0) {
    j["max_error"] = c.max_error;
    j["tolerance"] = c.tolerance;
  }
  if (!c.counterexamples.empty()) j["counterexamples"] = c.counterexamples;
  return j;
}

inline CheckResult from_axiom(const AxiomResult& a) {
  CheckResult c{a.name};
  c.instances = a.instances;
  c.counterexamples = a.counterexamples;
  c.status = !a.passed ? CheckStatus::fail : a.inconclusive ? CheckStatus::inconclusive : CheckStatus::pass;
  return c;
}

}  // namespace quasifold::io
