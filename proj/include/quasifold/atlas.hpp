#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quasifold/affine.hpp"
#include "quasifold/alpha_witness.hpp"
#include "quasifold/error.hpp"
#include "quasifold/group.hpp"
#include "quasifold/groupoid.hpp"

namespace quasifold {

/// Open interval with optional QAlpha endpoints (missing = unbounded).
struct Interval {
  std::optional<QAlpha> lo;
  std::optional<QAlpha> hi;

  bool contains(const QAlpha& x, const AlphaWitness& w) const {
    if (lo && w.compare(*lo, x) >= 0) return false;
    if (hi && w.compare(x, *hi) >= 0) return false;
    return true;
  }
};

/// Product of open intervals; an empty factor list means all of ℝⁿ.
struct Box {
  std::vector<Interval> factors;

  static Box whole() { return {}; }
  bool is_whole() const noexcept { return factors.empty(); }

  bool contains(const QVector& x, const AlphaWitness& w) const {
    if (is_whole()) return true;
    if (factors.size() != x.size()) throw Error("dimension-mismatch", "domain membership");
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!factors[i].contains(x[i], w)) return false;
    return true;
  }

  /// A few deterministic interior points, used for consistency spot-checks.
  std::vector<QVector> sample_points(std::size_t dim) const {
    static const Rational fractions[] = {Rational(1, 2), Rational(1, 4), Rational(3, 4), Rational(1, 3)};
    static const QAlpha free_points[] = {QAlpha(0), QAlpha(Rational(1, 3)), QAlpha(Rational(-5, 2)),
                                         QAlpha(Rational(0), Rational(1, 2))};
    static const Rational offsets[] = {Rational(1, 2), Rational(1), Rational(2), Rational(7, 3)};
    std::vector<QVector> out;
    for (std::size_t s = 0; s < 4; ++s) {
      QVector p(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        const Interval iv = is_whole() ? Interval{} : factors[i];
        if (iv.lo && iv.hi)
          p[i] = *iv.lo + fractions[s] * (*iv.hi - *iv.lo);
        else if (iv.lo)
          p[i] = *iv.lo + QAlpha(offsets[s]);
        else if (iv.hi)
          p[i] = *iv.hi - QAlpha(offsets[s]);
        else
          p[i] = free_points[(s + i) % 4];
      }
      out.push_back(std::move(p));
    }
    return out;
  }
};

/// A chart ℝⁿ/Γ ⊇ U → X, recorded through its strict lifting F = f∘class.
///
/// `label`, when present, realises F concretely as class_ref ∘ label into the
/// atlas' reference model ℝⁿ/Γ_ref; evaluate-equality is then decidable
/// from the model.
struct Chart {
  ChartId id;
  GroupPresentation group;
  Box domain;
  std::optional<AffineElement> label;
  std::string description;
};

/// Declared chart change; valid on `domain` (source coordinates), which
/// defaults to the whole source chart.
struct Transition {
  ChartId from;
  ChartId to;
  AffineElement map;
  std::optional<Box> domain;
};

/// Reference quotient ℝⁿ/Γ_ref into which chart labels map.
struct Model {
  GroupPresentation group;
};

struct Atlas {
  std::string name;
  std::size_t dimension = 1;
  std::vector<Chart> charts;
  std::vector<Transition> transitions;
  std::optional<Model> model;

  const Chart& chart(const ChartId& id) const {
    for (const auto& c : charts)
      if (c.id == id) return c;
    throw Error("unknown-chart", "no chart '" + id + "'");
  }

  bool has_chart(const ChartId& id) const {
    for (const auto& c : charts)
      if (c.id == id) return true;
    return false;
  }

  /// Structural invariants: unique ids, consistent dimensions, known
  /// transition endpoints.
  void validate() const {
    if (charts.empty()) throw Error("invalid-atlas", "atlas has no charts");
    std::set<ChartId> ids;
    for (const auto& c : charts) {
      if (!ids.insert(c.id).second) throw Error("invalid-atlas", "duplicate chart id '" + c.id + "'");
      if (c.group.dimension() != dimension) throw Error("dimension-mismatch", "chart '" + c.id + "' group");
      if (!c.domain.is_whole() && c.domain.factors.size() != dimension)
        throw Error("dimension-mismatch", "chart '" + c.id + "' domain");
      if (c.label && c.label->dim() != dimension) throw Error("dimension-mismatch", "chart '" + c.id + "' label");
    }
    for (const auto& t : transitions) {
      if (!ids.count(t.from) || !ids.count(t.to))
        throw Error("invalid-atlas", "transition " + t.from + " -> " + t.to + " names an unknown chart");
      if (t.map.dim() != dimension) throw Error("dimension-mismatch", "transition map");
    }
    if (model && model->group.dimension() != dimension) throw Error("dimension-mismatch", "model group");
  }
};

/// Single chart ℝ with structure group Z + αZ: the irrational torus.
inline Atlas irrational_torus_atlas() {
  Atlas a;
  a.name = "T_alpha";
  a.charts.push_back({"class", GroupPresentation::z_plus_alpha_z(), Box::whole(), AffineElement::identity(1),
                      "class: R -> R/(Z + aZ)"});
  a.model = Model{GroupPresentation::z_plus_alpha_z()};
  return a;
}

/// Single chart ℝ with structure group ℚ.
inline Atlas rational_quotient_atlas() {
  Atlas a;
  a.name = "R/Q";
  a.charts.push_back({"class", GroupPresentation::rationals(), Box::whole(), AffineElement::identity(1),
                      "class: R -> R/Q"});
  a.model = Model{GroupPresentation::rationals()};
  return a;
}

/// A ⊔ A with identity transitions between the copies.
inline Atlas duplicated_atlas(const Atlas& base) {
  Atlas a = base;
  a.name = base.name + "+dup";
  std::size_t n = base.charts.size();
  for (std::size_t i = 0; i < n; ++i) {
    Chart c = base.charts[i];
    c.id += "'";
    a.charts.push_back(c);
    a.transitions.push_back({base.charts[i].id, c.id, AffineElement::identity(base.dimension), std::nullopt});
  }
  for (std::size_t i = 0; i < base.transitions.size(); ++i) {
    Transition t = base.transitions[i];
    t.from += "'";
    t.to += "'";
    a.transitions.push_back(t);
  }
  return a;
}

/// Orbifold ℝ/{±1}: chart U = (−2, 2) with the reflection group and chart
/// W = (1, ∞) with trivial group, glued by the identity on (1, 2).
inline Atlas reflection_orbifold_atlas() {
  Atlas a;
  a.name = "R/{+-1}";
  a.charts.push_back({"U", GroupPresentation::reflection_1d(), Box{{Interval{QAlpha(-2), QAlpha(2)}}},
                      AffineElement::identity(1), "(-2, 2)/{+-1}"});
  a.charts.push_back({"W", GroupPresentation::trivial(1), Box{{Interval{QAlpha(1), std::nullopt}}},
                      AffineElement::identity(1), "(1, inf)"});
  a.transitions.push_back({"W", "U", AffineElement::identity(1), Box{{Interval{QAlpha(1), QAlpha(2)}}}});
  a.model = Model{GroupPresentation::reflection_1d()};
  return a;
}

/// Single global chart ℝ with the reflection group.
inline Atlas reflection_single_chart_atlas() {
  Atlas a;
  a.name = "R/{+-1} (global)";
  a.charts.push_back({"R", GroupPresentation::reflection_1d(), Box::whole(), AffineElement::identity(1), "R/{+-1}"});
  a.model = Model{GroupPresentation::reflection_1d()};
  return a;
}

/// T_α presented by the chart x ↦ class(2x), i.e. structure group (Z + αZ)/2.
inline Atlas two_scale_torus_atlas() {
  Atlas a;
  a.name = "T_alpha (scale 2)";
  a.charts.push_back({"half", GroupPresentation::lattice_1d({QAlpha(Rational(1, 2)), QAlpha(0, Rational(1, 2))}),
                      Box::whole(), AffineElement::line(Rational(2), QAlpha(0)), "x -> class(2x)"});
  a.model = Model{GroupPresentation::z_plus_alpha_z()};
  return a;
}

}  // namespace quasifold
