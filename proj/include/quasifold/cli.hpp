#pragma once

#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "quasifold/checks.hpp"
#include "quasifold/circle_functor.hpp"
#include "quasifold/io.hpp"
#include "quasifold/lifting.hpp"
#include "quasifold/rotation_algebra.hpp"

namespace quasifold::cli {

using io::json;

inline constexpr const char* report_schema = "quasifold.report/1";

enum class Format { json, table, csv };

inline Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "table") return Format::table;
  if (s == "csv") return Format::csv;
  throw Error("usage", "unknown format '" + s + "' (json, table, csv)");
}

/// Run settings shared by every command.
struct Config {
  AlphaWitness witness = AlphaWitness::standard();
  int bound = 3;          // enumeration / word-length bound
  int fiber_bound = 6;    // orbit searches
  double tol = 1e-9;      // coefficient tolerance
  double residual_tol = 1e-9;
  double phase_tol = 1e-12;
  std::uint64_t seed = 1;
  Format format = Format::json;
  bool timing = false;

  void validate() const {
    if (bound <= 0 || fiber_bound <= 0) throw Error("usage", "bounds must be positive");
    if (!(tol > 0) || !(residual_tol > 0) || !(phase_tol > 0)) throw Error("usage", "tolerances must be positive");
  }

  GroupoidConfig groupoid() const { return {witness, GroupPresentation::default_hard_cap}; }
};

struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  Report() = default;
  explicit Report(std::string cmd) : command(std::move(cmd)) {}

  std::string command;
  json args = json::object();
  std::vector<CheckResult> checks;
  json data = json::object();
  std::vector<Table> tables;
  double elapsed_ms = 0.0;

  CheckStatus status() const { return overall(checks); }

  int exit_code() const {
    switch (status()) {
      case CheckStatus::pass:
        return 0;
      case CheckStatus::fail:
        return 1;
      case CheckStatus::inconclusive:
        return 3;
    }
    return 1;
  }
};

/// Exit code for a module error escaping a command.
inline int exit_code_for(const Error& e) {
  const std::string& c = e.code();
  if (c == "inconclusive-at-bound") return 3;
  if (c == "usage" || c == "parse-error" || c == "io-error" || c == "unknown-chart" || c == "dimension-mismatch" ||
      c == "unbounded-request" || c.rfind("invalid-", 0) == 0)
    return 2;
  return 1;
}

// --- rendering ---------------------------------------------------------------

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

inline json report_json(const Report& r, const Config& cfg) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(io::to_json(c));
  json j{{"schema", report_schema},
         {"command", r.command},
         {"args", r.args},
         {"seed", cfg.seed},
         {"status", to_string(r.status())},
         {"checks", checks},
         {"data", r.data}};
  if (cfg.timing) j["timing_ms"] = r.elapsed_ms;
  return j;
}

inline void render_aligned(std::ostream& os, const Table& t) {
  std::vector<std::size_t> width(t.columns.size());
  auto cells = [](const std::string& s) {
    // Display width: count UTF-8 lead bytes only.
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  };
  for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = cells(t.columns[i]);
  for (const auto& row : t.rows)
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], cells(row[i]));
  auto line = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) {
      s += row[i];
      if (i + 1 < row.size()) s += std::string(width[i] - cells(row[i]) + 2, ' ');
    }
    s.erase(s.find_last_not_of(' ') + 1);
    os << s << "\n";
  };
  os << t.title << "\n";
  line(t.columns);
  std::vector<std::string> rule;
  for (auto w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& row : t.rows) line(row);
}

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline Table checks_table(const Report& r) {
  Table t{"checks", {"check", "status", "instances", "max_error", "tolerance"}, {}};
  for (const auto& c : r.checks)
    t.rows.push_back({c.name, to_string(c.status), std::to_string(c.instances),
                      c.tolerance > 0 ? format_double(c.max_error) : "", c.tolerance > 0 ? format_double(c.tolerance) : ""});
  return t;
}

inline std::string render(const Report& r, const Config& cfg) {
  std::ostringstream os;
  switch (cfg.format) {
    case Format::json:
      os << report_json(r, cfg).dump(2) << "\n";
      break;
    case Format::table: {
      os << r.command << ": " << to_string(r.status()) << " (schema " << report_schema << ", seed " << cfg.seed << ")\n\n";
      render_aligned(os, checks_table(r));
      for (const auto& c : r.checks)
        for (const auto& ce : c.counterexamples) os << "  counterexample [" << c.name << "]: " << ce << "\n";
      for (const auto& t : r.tables) {
        os << "\n";
        render_aligned(os, t);
      }
      if (cfg.timing) os << "\ntiming: " << format_double(r.elapsed_ms) << " ms\n";
      break;
    }
    case Format::csv: {
      std::vector<Table> all{checks_table(r)};
      all.insert(all.end(), r.tables.begin(), r.tables.end());
      for (std::size_t k = 0; k < all.size(); ++k) {
        if (k) os << "\n";
        os << "# " << all[k].title << "\n";
        auto line = [&](const std::vector<std::string>& row) {
          for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
          os << "\n";
        };
        line(all[k].columns);
        for (const auto& row : all[k].rows) line(row);
      }
      break;
    }
  }
  return os.str();
}

// --- inputs --------------------------------------------------------------------

/// A data file path, or one of the built-in atlases "builtin:<name>".
inline Atlas load_atlas(const std::string& ref) {
  if (ref.rfind("builtin:", 0) == 0) {
    std::string n = ref.substr(8);
    if (n == "torus") return irrational_torus_atlas();
    if (n == "rq") return rational_quotient_atlas();
    if (n == "reflection") return reflection_orbifold_atlas();
    if (n == "reflection-global") return reflection_single_chart_atlas();
    if (n == "duplicated") return duplicated_atlas(irrational_torus_atlas());
    if (n == "twoscale") return two_scale_torus_atlas();
    throw Error("usage", "unknown built-in atlas '" + n + "'");
  }
  json j = io::read_file(ref);
  return io::atlas_from(io::Node(j, "$"));
}

inline BiAtlas load_biatlas(const std::string& ref) {
  if (ref.rfind("builtin:", 0) == 0) {
    std::string n = ref.substr(8);
    if (n == "duplicated") return duplicated_biatlas();
    if (n == "twoscale") return two_scale_biatlas();
    throw Error("usage", "unknown built-in bi-atlas '" + n + "'");
  }
  json j = io::read_file(ref);
  auto slash = ref.find_last_of('/');
  return io::biatlas_from(io::Node(j, "$"), slash == std::string::npos ? "." : ref.substr(0, slash));
}

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

// --- groupoid --------------------------------------------------------------------

/// Assembly report for the point, with the per-chart object × group table.
inline Report cmd_groupoid(const Atlas& atlas, const NebulaPoint& point, const Config& cfg) {
  Report r{"groupoid"};
  r.args = {{"atlas", atlas.name}, {"point", io::display(point)}, {"bound", cfg.bound}};
  CheckResult consistent{"transitions-consistent"};
  std::optional<StructureGroupoid> g;
  try {
    g.emplace(build_groupoid(atlas, cfg.groupoid()));
    consistent.instances = atlas.transitions.size();
  } catch (const Error& e) {
    if (e.code() != "inconsistent-transition") throw;
    consistent.fail(e.what());
    r.checks.push_back(consistent);
    return r;
  }
  r.checks.push_back(consistent);
  auto rep = g->isotropy_and_assembly(point, cfg.bound);

  CheckResult absorbed{"arrows-ev-absorbed"};
  json blocks = json::array();
  std::size_t total_arrows = 0;
  for (const auto& b : rep.blocks) {
    const Chart& chart = atlas.chart(b.chart);
    auto elements = chart.group.enumerate(cfg.bound, GroupPresentation::default_hard_cap);
    json objects = json::array(), arrows = json::array();
    for (const auto& o : b.objects) objects.push_back(io::display(o));
    for (const auto& a : b.arrows) {
      ++absorbed.instances;
      auto cmp = g->same_point(a.src, arrow_trg(a), cfg.fiber_bound);
      if (cmp.result == Tri::not_equal) absorbed.fail(io::display(a));
      if (cmp.result == Tri::inconclusive && absorbed.status == CheckStatus::pass) absorbed.status = CheckStatus::inconclusive;
      arrows.push_back({{"src", io::display(a.src.coords)}, {"map", io::display(a.map)},
                        {"dst", io::display(arrow_trg(a).coords)}});
    }
    total_arrows += b.arrows.size();
    blocks.push_back({{"chart", b.chart},
                      {"group", chart.group.kind_name()},
                      {"object_count", b.objects.size()},
                      {"arrow_count", b.arrows.size()},
                      {"objects", objects},
                      {"arrows", arrows}});

    Table t{"G^" + b.chart + " at " + io::display(point) + " (rows: objects, columns: group elements, cells: targets)",
            {"object"},
            {}};
    for (const auto& e : elements) t.columns.push_back(io::display(e));
    for (const auto& o : b.objects) {
      std::vector<std::string> row{io::display(o)};
      for (const auto& e : elements) {
        QVector trg = affine_apply(e, o);
        row.push_back(chart.domain.contains(trg, cfg.witness) ? io::display(trg) : "-");
      }
      t.rows.push_back(std::move(row));
    }
    r.tables.push_back(std::move(t));
  }
  r.checks.push_back(absorbed);

  json connections = json::array(), isotropy = json::array();
  for (const auto& a : rep.connections) connections.push_back(io::to_json(a));
  for (const auto& a : rep.isotropy) isotropy.push_back(io::display(a.map));
  r.data = {{"base", io::to_json(rep.base)},
            {"bound", rep.bound},
            {"blocks", blocks},
            {"connections", connections},
            {"isotropy", isotropy},
            {"isotropy_order", rep.isotropy.size()},
            {"arrow_count", total_arrows}};
  Table conn{"connecting arrows", {"from", "to", "arrow"}, {}};
  for (const auto& a : rep.connections) conn.rows.push_back({a.src.chart, a.dst_chart, io::display(a)});
  if (!conn.rows.empty()) r.tables.push_back(conn);
  return r;
}

// --- algebra -------------------------------------------------------------------------

inline AlgebraRef algebra_by_name(const std::string& name, const AlphaWitness& w) {
  if (name == "R/Q") return ConvolutionAlgebra::line_rationals(w);
  if (name == "T_alpha") return ConvolutionAlgebra::line_torus(w);
  if (name == "S_alpha") return ConvolutionAlgebra::circle_alpha(w);
  if (name == "S_Q") return ConvolutionAlgebra::circle_rationals(w);
  if (name == "R/{+-1}") return ConvolutionAlgebra::reflection_line(w);
  throw Error("usage", "unknown algebra '" + name + "' (R/Q, T_alpha, S_alpha, S_Q, R/{+-1})");
}

inline const std::vector<std::string>& all_algebras() {
  static const std::vector<std::string> names{"R/Q", "T_alpha", "S_alpha", "S_Q", "R/{+-1}"};
  return names;
}

inline Report cmd_algebra_check(const std::vector<std::string>& names, int trials, double consistency_tol,
                                const Config& cfg, const std::string& command = "algebra check") {
  if (trials <= 0) throw Error("usage", "trials must be positive");
  Report r{command};
  r.args = {{"algebras", names}, {"trials", trials}, {"tol", cfg.tol}, {"consistency_tol", consistency_tol}};
  std::mt19937_64 rng(cfg.seed);
  json algs = json::array();
  for (const auto& n : names) {
    auto alg = algebra_by_name(n, cfg.witness);
    auto checks = algebra_checks(alg, trials, rng, cfg.tol, consistency_tol);
    r.checks.insert(r.checks.end(), checks.begin(), checks.end());
    algs.push_back({{"name", alg->name()}, {"shape", to_string(alg->shape())}, {"group", alg->group().kind_name()}});
  }
  r.data = {{"algebras", algs}, {"trials", trials}};
  return r;
}

// --- rotation --------------------------------------------------------------------

/// "default" is α itself; anything else is read as a QAlpha.
inline QAlpha parse_angle(const std::string& s) { return s == "default" ? QAlpha::alpha() : QAlpha::parse(s); }

inline Report cmd_rotation(const QAlpha& angle, int degree, const Config& cfg) {
  Report r{"rotation"};
  r.args = {{"alpha", io::display(angle)}, {"degree", degree}};
  auto rep = rotation_relation(angle, cfg.witness, degree);
  auto flipped = rotation_relation(-angle, cfg.witness, degree);
  const double a = cfg.witness.evaluate(angle);
  const Complex opposite_phase = std::polar(1.0, 2 * std::numbers::pi * a);

  CheckResult lam{"lambda-is-exp(-2pi i alpha)"};
  lam.tolerance = cfg.phase_tol;
  lam.record(rep.lambda_error);
  CheckResult neg{"alpha->-alpha-gives-exp(2pi i alpha)"};
  neg.tolerance = cfg.phase_tol;
  neg.record(std::abs(flipped.lambda - opposite_phase));
  CheckResult powers{"V^b U^a = lambda^ab U^a V^b"};
  powers.tolerance = cfg.tol;
  powers.record(rep.power_deviation);
  r.checks = {lam, neg, powers};
  if (angle.is_rational()) {
    CheckResult root{"lambda^q = 1"};
    root.tolerance = cfg.tol;
    auto q = angle.rational_part().den();
    root.record(std::abs(std::pow(rep.lambda, static_cast<double>(q)) - Complex(1.0)));
    r.checks.push_back(root);
  }
  r.data = {{"convention", "U = delta_0 (x) e^{2 pi i x}, V = delta_alpha (x) 1; V*U = lambda U*V"},
            {"angle", io::display(angle)},
            {"angle_value", a},
            {"lambda", to_json(rep.lambda)},
            {"expected", to_json(rep.expected)},
            {"lambda_error", rep.lambda_error},
            {"lambda_for_negated_angle", to_json(flipped.lambda)},
            {"power_deviation", rep.power_deviation}};
  Table t{"rotation relation", {"quantity", "re", "im"}, {}};
  t.rows.push_back({"lambda", format_double(rep.lambda.real()), format_double(rep.lambda.imag())});
  t.rows.push_back({"exp(-2 pi i alpha)", format_double(rep.expected.real()), format_double(rep.expected.imag())});
  t.rows.push_back({"lambda(-alpha)", format_double(flipped.lambda.real()), format_double(flipped.lambda.imag())});
  r.tables.push_back(t);
  return r;
}

// --- matrix representation ------------------------------------------------------------

inline Report cmd_repr(const std::vector<int>& ps, int pairs, int z_count, const Config& cfg,
                       const std::string& command = "repr") {
  if (pairs <= 0 || z_count <= 0) throw Error("usage", "pairs and z-count must be positive");
  Report r{command};
  r.args = {{"p", ps}, {"pairs", pairs}, {"z_count", z_count}, {"tol", cfg.tol}};
  std::mt19937_64 rng(cfg.seed);
  for (int p : ps) {
    if (p <= 0) throw Error("usage", "p must be positive");
    r.checks.push_back(representation_check(p, pairs, z_count, rng, cfg.tol));
  }
  r.data = {{"product_order", representation_order == RepresentationOrder::reversed ? "g*f" : "f*g"},
            {"entry_rule", "M(z)[s][t] = f_{(t-s)/p}(z + s/p)"}};
  return r;
}

/// Matrix of a single element at one point; `terms` are "label=coefficient"
/// pairs with constant coefficients.
inline Report cmd_repr_matrix(const std::vector<std::pair<QAlpha, Complex>>& terms, int p, const QAlpha& z,
                              const Config& cfg) {
  Report r{"repr"};
  r.args = {{"p", p}, {"z", io::display(z)}};
  Element<TrigPoly> f(ConvolutionAlgebra::circle_rationals(cfg.witness));
  for (const auto& [lab, c] : terms) f.add_term(AffineElement::translation(lab), TrigPoly::constant(c));
  auto m = matrix_representation(f, p, z);
  json rows = json::array();
  Table t{"M(f)(" + io::display(z) + ")", {"row"}, {}};
  for (int j = 0; j < p; ++j) t.columns.push_back(std::to_string(j));
  for (int i = 0; i < p; ++i) {
    json row = json::array();
    std::vector<std::string> cells{std::to_string(i)};
    for (int j = 0; j < p; ++j) {
      row.push_back(to_json(m(i, j)));
      std::ostringstream os;
      os << format_double(m(i, j).real()) << (m(i, j).imag() < 0 ? "-" : "+") << format_double(std::abs(m(i, j).imag()))
         << "i";
      cells.push_back(os.str());
    }
    rows.push_back(row);
    t.rows.push_back(cells);
  }
  r.data = {{"matrix", rows}};
  r.tables.push_back(t);
  CheckResult ok{"support-in-U_p"};
  ok.instances = 1;
  r.checks.push_back(ok);
  return r;
}

// --- morita -------------------------------------------------------------------------

/// Deterministic sample points: domain sample points of every chart, each
/// followed by its image under the first non-identity group element so that
/// related pairs occur.
inline std::vector<NebulaPoint> atlas_samples(const Atlas& a, std::size_t per_chart, const AlphaWitness& w) {
  std::vector<NebulaPoint> out;
  for (const auto& c : a.charts) {
    auto pts = c.domain.sample_points(a.dimension);
    auto elements = c.group.enumerate(1);
    for (std::size_t i = 0; i < std::min(per_chart, pts.size()); ++i) {
      out.push_back({c.id, pts[i]});
      if (elements.size() < 2) continue;
      QVector moved = affine_apply(elements[1], pts[i]);
      if (c.domain.contains(moved, w) && !(moved == pts[i])) out.push_back({c.id, moved});
    }
  }
  return out;
}

inline Report cmd_morita(const BiAtlas& bi, std::size_t samples_per_chart, const Config& cfg) {
  Report r{"morita"};
  r.args = {{"biatlas", bi.name}, {"bound", cfg.bound}, {"samples_per_chart", samples_per_chart}};
  Bimodule m(bi, cfg.groupoid());
  auto rep = m.check_axioms(atlas_samples(bi.left, samples_per_chart, cfg.witness),
                            atlas_samples(bi.right, samples_per_chart, cfg.witness), cfg.bound);
  for (const auto& a : rep.axioms) r.checks.push_back(io::from_axiom(a));
  r.data = {{"biatlas", bi.name}, {"bound", rep.bound}, {"germs", rep.germs}, {"links", bi.links.size()}};
  return r;
}

// --- lifting -------------------------------------------------------------------------

inline GroupPresentation group_by_name(const std::string& n) {
  if (n == "Z+aZ") return GroupPresentation::z_plus_alpha_z();
  if (n == "Q") return GroupPresentation::rationals();
  if (n == "+-1") return GroupPresentation::reflection_1d();
  throw Error("usage", "unknown group '" + n + "' (Z+aZ, Q, +-1)");
}

/// Synthetic 1-D input: translations stitched at cuts, sampled on (−2, 2).
struct SyntheticMap {
  StitchedMap map;
  int samples = 40;
  double noise = 0.0;  // > 0 switches to numeric samples with Gaussian noise
  bool numeric = false;
};

inline SyntheticMap make_synthetic(const std::vector<QAlpha>& translations, std::vector<QAlpha> cuts, int samples,
                                   double noise, bool numeric) {
  if (translations.empty()) throw Error("usage", "need at least one --gamma");
  if (cuts.empty() && translations.size() > 1)
    for (std::size_t i = 1; i < translations.size(); ++i)
      cuts.push_back(QAlpha(Rational(static_cast<Rational::int_type>(4 * i), static_cast<Rational::int_type>(translations.size())) -
                            Rational(2)));
  if (cuts.size() + 1 != translations.size()) throw Error("usage", "need exactly one cut fewer than pieces");
  SyntheticMap s;
  for (const auto& t : translations) s.map.gammas.push_back(AffineElement::translation(t));
  s.map.cuts = std::move(cuts);
  s.samples = samples;
  s.noise = noise;
  s.numeric = numeric || noise > 0;
  return s;
}

/// Samples on a fixed grid of exact points 4(i + 1/2)/N − 2 (+ α/97 to avoid cut hits).
inline SampledMap sample_synthetic(const SyntheticMap& s, std::uint64_t seed, const AlphaWitness& w) {
  Ball ball{{0.0}, 2.0};
  std::vector<QVector> pts;
  for (int i = 0; i < s.samples; ++i)
    pts.push_back({QAlpha(Rational(4 * i + 2, s.samples) - Rational(2), Rational(1, 97))});
  if (!s.numeric) {
    std::vector<QVector> vals;
    for (const auto& p : pts) vals.push_back(s.map(p));
    return SampledMap::exact(ball, pts, vals, w);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, s.noise > 0 ? s.noise : 1.0);
  std::vector<RealVector> xs, ys;
  for (const auto& p : pts) {
    RealVector x = to_real(p, w);
    RealVector y = s.map(x, w);
    if (s.noise > 0) y[0] += gauss(rng);
    xs.push_back(x);
    ys.push_back(y);
  }
  StitchedMap m = s.map;
  return SampledMap::numeric(ball, xs, ys, [m, w](const RealVector& x) { return m(x, w); });
}

/// {"ball": {"center": [...], "radius": r}, "samples": [[...]], "values": [[...]]};
/// string coordinates make an exact map, numbers a numeric one.
inline SampledMap samples_from(const io::Node& n, const AlphaWitness& w) {
  Ball ball;
  for (const auto& c : n.at("ball").at("center").items()) ball.center.push_back(c.number());
  ball.radius = n.at("ball").at("radius").number();
  auto s = n.at("samples").items(), v = n.at("values").items();
  if (s.empty()) n.at("samples").fail("no samples");
  bool exact = s[0].items().at(0).raw().is_string();
  if (exact) {
    std::vector<QVector> xs, ys;
    for (const auto& x : s) xs.push_back(io::qvector_from(x));
    for (const auto& y : v) ys.push_back(io::qvector_from(y));
    return n.guarded([&] { return SampledMap::exact(ball, xs, ys, w); });
  }
  std::vector<RealVector> xs, ys;
  for (const auto& x : s) {
    RealVector r;
    for (const auto& c : x.items()) r.push_back(c.number());
    xs.push_back(r);
  }
  for (const auto& y : v) {
    RealVector r;
    for (const auto& c : y.items()) r.push_back(c.number());
    ys.push_back(r);
  }
  return n.guarded([&] { return SampledMap::numeric(ball, xs, ys); });
}

inline Report cmd_lift_detect(const SampledMap& f, const GroupPresentation& group, double min_coverage,
                              const Config& cfg) {
  Report r{"lift detect"};
  r.args = {{"group", group.kind_name()}, {"bound", cfg.bound}, {"samples", f.size()}, {"exact", f.is_exact()},
            {"min_coverage", min_coverage}, {"tol", cfg.residual_tol}};
  auto rep = detect_pieces(f, group, cfg.bound, cfg.residual_tol, cfg.witness);
  CheckResult cov{"coverage >= " + format_double(min_coverage)};
  cov.instances = rep.total;
  if (rep.coverage < min_coverage)
    cov.fail("coverage " + format_double(rep.coverage) + ", " + std::to_string(rep.unmatched.size()) +
             " samples with no-match-at-bound");
  r.checks.push_back(cov);
  json pieces = json::array();
  Table t{"affine pieces", {"gamma", "samples", "first", "last"}, {}};
  auto coords = [&](std::size_t i) {
    return f.is_exact() ? io::display(f.exact_samples()[i]) : format_double(f.numeric_samples()[i][0]);
  };
  for (const auto& p : rep.pieces) {
    pieces.push_back({{"gamma", io::display(p.gamma)}, {"samples", p.samples}});
    t.rows.push_back({io::display(p.gamma), std::to_string(p.samples.size()), coords(p.samples.front()),
                      coords(p.samples.back())});
  }
  r.tables.push_back(t);
  r.data = {{"pieces", pieces},
            {"unmatched", rep.unmatched},
            {"coverage", rep.coverage},
            {"max_residual", rep.max_residual},
            {"mean_residual", rep.mean_residual},
            {"candidates", rep.candidates.size()}};
  return r;
}

/// Fits each detected piece (or the whole map when no group is given).
inline Report cmd_lift_fit(const SampledMap& f, const std::optional<GroupPresentation>& group, double second_tol,
                           const Config& cfg) {
  if (f.is_exact()) throw Error("usage", "fit needs numeric samples");
  Report r{"lift fit"};
  r.args = {{"bound", cfg.bound}, {"samples", f.size()}, {"residual_tol", cfg.residual_tol}, {"second_tol", second_tol}};
  std::vector<std::pair<std::string, std::vector<std::size_t>>> parts;
  if (group) {
    r.args["group"] = group->kind_name();
    auto rep = detect_pieces(f, *group, cfg.bound, cfg.residual_tol, cfg.witness);
    for (const auto& p : rep.pieces) parts.push_back({io::display(p.gamma), p.samples});
    if (!rep.unmatched.empty()) parts.push_back({"unmatched", rep.unmatched});
  } else {
    std::vector<std::size_t> all(f.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    parts.push_back({"all", all});
  }
  json fits = json::array();
  Table t{"affine fits", {"piece", "samples", "A", "b", "residual", "second_derivative", "accepted"}, {}};
  for (const auto& [name, idx] : parts) {
    CheckResult c{"affine fit [" + name + "]"};
    c.instances = idx.size();
    try {
      auto fit = fit_affine(f.restricted(idx), cfg.residual_tol, second_tol);
      if (!fit.accepted)
        c.fail("residual " + format_double(fit.max_residual) + ", second derivative " +
               format_double(fit.second_derivative));
      json A = json::array();
      for (Eigen::Index i = 0; i < fit.map.A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < fit.map.A.cols(); ++j) row.push_back(fit.map.A(i, j));
        A.push_back(row);
      }
      json b = json::array();
      for (Eigen::Index i = 0; i < fit.map.b.size(); ++i) b.push_back(fit.map.b(i));
      fits.push_back({{"piece", name},
                      {"A", A},
                      {"b", b},
                      {"max_residual", fit.max_residual},
                      {"second_derivative", fit.second_derivative_checked ? json(fit.second_derivative) : json(nullptr)},
                      {"accepted", fit.accepted}});
      t.rows.push_back({name, std::to_string(idx.size()), format_double(fit.map.A(0, 0)), format_double(fit.map.b(0)),
                        format_double(fit.max_residual),
                        fit.second_derivative_checked ? format_double(fit.second_derivative) : "n/a",
                        fit.accepted ? "yes" : "no"});
    } catch (const Error& e) {
      if (e.code() != "degenerate-sample-configuration") throw;
      c.fail(e.what());
      fits.push_back({{"piece", name}, {"error", e.code()}});
    }
    r.checks.push_back(c);
  }
  r.tables.push_back(t);
  r.data = {{"fits", fits}};
  return r;
}

/// Prescribed lift through link `link`, with ev-compatibility on random points.
inline Report cmd_lift_construct(const BiAtlas& bi, std::size_t link, const QVector& rr, const QVector& rp,
                                 int check_points, const Config& cfg) {
  Report r{"lift construct"};
  r.args = {{"biatlas", bi.name}, {"link", link}, {"r", io::display(rr)}, {"r_prime", io::display(rp)},
            {"bound", cfg.fiber_bound}, {"check_points", check_points}};
  if (link >= bi.links.size()) throw Error("usage", "link index out of range");
  CheckResult hit{"lift(r) = r'"};
  CheckResult compat{"lift is ev-compatible"};
  std::optional<LiftResult> found;
  try {
    found = lift_diffeo(bi, link, rr, rp, cfg.fiber_bound);
  } catch (const Error& e) {
    if (e.code() != "fibers-incompatible") throw;
    hit.fail(e.what());
    r.checks.push_back(hit);
    r.data = {{"error", e.code()}};
    return r;
  }
  const LiftResult& lift = *found;
  hit.instances = 1;
  if (!(affine_apply(lift.lift, rr) == rp)) hit.fail("lift(r) = " + io::display(affine_apply(lift.lift, rr)));
  Bimodule m(bi, cfg.groupoid());
  const auto& l = bi.links[link];
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> num(-48, 48), den(1, 12);
  const Box dom = l.domain ? *l.domain : bi.left.chart(l.from).domain;
  for (int k = 0; k < check_points; ++k) {
    QVector x;
    for (std::size_t i = 0; i < bi.left.dimension; ++i) x.push_back(QAlpha(Rational(num(rng), den(rng)), Rational(num(rng), den(rng))));
    if (!dom.contains(x, cfg.witness)) continue;
    ++compat.instances;
    LinkingGerm z{{l.from, x}, lift.lift, l.to};
    switch (m.ev_compatible(z, cfg.fiber_bound)) {
      case Tri::equal:
        break;
      case Tri::not_equal:
        compat.fail(z.str());
        break;
      case Tri::inconclusive:
        if (compat.status == CheckStatus::pass) compat.status = CheckStatus::inconclusive;
        break;
    }
  }
  r.checks = {hit, compat};
  r.data = {{"lift", io::display(lift.lift)}, {"adjustment", io::display(lift.adjustment)}, {"seed", io::display(l.map)}};
  r.tables.push_back({"prescribed lift",
                      {"seed", "adjustment", "lift"},
                      {{io::display(l.map), io::display(lift.adjustment), io::display(lift.lift)}}});
  return r;
}

inline Report cmd_lift_flipdemo(int n_max, int samples, double tol, const Config& cfg) {
  Report r{"lift flipdemo"};
  r.args = {{"n_max", n_max}, {"samples", samples}, {"tol", tol}};
  auto rep = nonliftable_demo(n_max, samples, tol, cfg.seed);
  CheckResult outside{"f = 0 outside the unit disk"};
  outside.instances = 3;
  if (!rep.outside_unit_disk_zero) outside.fail("nonzero value for |z| > 1");
  r.checks.push_back(outside);
  json rows = json::array();
  Table t{"parity rule f(tau z) = h(tau) f(z)", {"n", "h", "samples", "max_abs_error", "max_rel_error", "other_h_gap"}, {}};
  for (const auto& row : rep.rows) {
    CheckResult c{"annulus n=" + std::to_string(row.n) + " h=" + row.h};
    c.tolerance = tol;
    c.record(row.max_abs_error);
    c.instances = row.samples;
    if (!(row.max_rel_error <= tol)) c.fail("relative error " + format_double(row.max_rel_error));
    if (!row.passed && c.status == CheckStatus::pass) c.fail("degenerate sample");
    r.checks.push_back(c);
    rows.push_back({{"n", row.n}, {"h", row.h}, {"samples", row.samples}, {"max_abs_error", row.max_abs_error},
                    {"max_rel_error", row.max_rel_error}, {"other_h_gap", row.other_rel_gap}});
    t.rows.push_back({std::to_string(row.n), row.h, std::to_string(row.samples), format_double(row.max_abs_error),
                      format_double(row.max_rel_error), format_double(row.other_rel_gap)});
  }
  r.tables.push_back(t);
  r.data = {{"rows", rows}, {"precision_digits", 50}};
  return r;
}

}  // namespace quasifold::cli
