#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quasifold/alpha_witness.hpp"
#include "quasifold/atlas.hpp"
#include "quasifold/error.hpp"
#include "quasifold/group.hpp"
#include "quasifold/groupoid.hpp"

namespace quasifold {

struct GroupoidConfig {
  AlphaWitness witness = AlphaWitness::standard();
  int hard_cap = GroupPresentation::default_hard_cap;
};

/// Three-valued outcome of a bounded equality test.
enum class Tri { equal, not_equal, inconclusive };

inline const char* to_string(Tri t) {
  switch (t) {
    case Tri::equal:
      return "equal";
    case Tri::not_equal:
      return "not-equal";
    case Tri::inconclusive:
      return "inconclusive";
  }
  return "?";
}

/// How a Tri answer was obtained.
struct PointComparison {
  Tri result = Tri::inconclusive;
  std::string route;  // "model", "arrow", "reference-arrow", "closed-component", "bound"
  std::optional<Arrow> witness;
};

/// Per-chart block G_x^F of the assembly G_x = G_x^{F1} - ... - G_x^{FN}.
struct ChartBlock {
  ChartId chart;
  std::vector<QVector> objects;
  std::vector<Arrow> arrows;
};

struct AssemblyReport {
  NebulaPoint base;
  int bound = 0;
  std::vector<ChartBlock> blocks;
  std::vector<Arrow> connections;  // one per consecutive block pair
  std::vector<Arrow> isotropy;
};

/// Structure groupoid of an atlas: objects are nebula points, arrows are
/// words in chart-group elements and transitions reduced to a single affine
/// germ. Generation is bound-driven: at bound B a word may use at most B
/// transitions, and each group letter is drawn from enumerate(Γ, B).
class StructureGroupoid {
 public:
  StructureGroupoid(Atlas atlas, GroupoidConfig config = {}) : atlas_(std::move(atlas)), config_(std::move(config)) {
    atlas_.validate();
    check_consistency();
  }

  const Atlas& atlas() const noexcept { return atlas_; }
  const GroupoidConfig& config() const noexcept { return config_; }
  const AlphaWitness& witness() const noexcept { return config_.witness; }

  bool is_valid(const NebulaPoint& p) const {
    if (!atlas_.has_chart(p.chart) || p.coords.size() != atlas_.dimension) return false;
    return atlas_.chart(p.chart).domain.contains(p.coords, config_.witness);
  }

  void require_valid(const NebulaPoint& p) const {
    if (!is_valid(p)) throw Error("invalid-point", p.str() + " is not in the nebula");
  }

  /// All generated arrows with source v, in discovery order, duplicate-free.
  std::vector<Arrow> arrows_from(const NebulaPoint& v, int bound) const {
    require_valid(v);
    return explore(v, bound).arrows;
  }

  /// G^point: arrows with target `point`, obtained by inverting arrows out of it
  /// (the generating sets are closed under inversion).
  std::vector<Arrow> fiber_over(const NebulaPoint& point, int bound) const {
    auto out = arrows_from(point, bound);
    for (auto& a : out) a = arrow_invert(a);
    return out;
  }

  std::vector<Arrow> arrows_between(const NebulaPoint& v, const NebulaPoint& w, int bound) const {
    require_valid(w);
    std::vector<Arrow> out;
    for (auto& a : arrows_from(v, bound))
      if (arrow_trg(a) == w) out.push_back(std::move(a));
    return out;
  }

  /// arrows_from(v, bound) paired with the least bound at which each arrow
  /// appears, its word level.
  std::vector<std::pair<Arrow, int>> arrows_with_level(const NebulaPoint& v, int bound) const {
    require_valid(v);
    std::vector<std::pair<Arrow, int>> out;
    std::set<Arrow> seen;
    for (int b = 0; b <= bound; ++b)
      for (auto& a : explore(v, b).arrows)
        if (seen.insert(a).second) out.emplace_back(std::move(a), b);
    return out;
  }

  /// Is the germ of `a` an arrow of the groupoid? With a reference model the
  /// map is conjugated into model coordinates and tested for membership in
  /// Γ_ref (an affine map carrying every nearby point into its own Γ_ref-orbit
  /// is an element of Γ_ref); otherwise the bounded arrows are searched.
  PointComparison contains_arrow(const Arrow& a, int bound) const {
    PointComparison out;
    if (!is_valid(a.src) || !atlas_.has_chart(a.dst_chart) || !is_valid(arrow_trg(a))) {
      out.result = Tri::not_equal;
      out.route = "domain";
      return out;
    }
    const Chart& cs = atlas_.chart(a.src.chart);
    const Chart& ct = atlas_.chart(a.dst_chart);
    if (atlas_.model && cs.label && ct.label) {
      auto conj = affine_compose(*ct.label, affine_compose(a.map, affine_invert(*cs.label)));
      if (auto in = atlas_.model->group.contains(conj)) {
        out.result = *in ? Tri::equal : Tri::not_equal;
        out.route = "model";
        if (*in) out.witness = a;
        return out;
      }
    }
    auto ex = explore(a.src, bound);
    if (std::find(ex.arrows.begin(), ex.arrows.end(), a) != ex.arrows.end()) {
      out.result = Tri::equal;
      out.route = "arrow";
      out.witness = a;
    } else if (ex.complete) {
      out.result = Tri::not_equal;
      out.route = "closed-component";
    } else {
      out.route = "bound";
    }
    return out;
  }

  /// Whether the transition (or chart) structure admits an arrow germ here:
  /// source and target inside their domains.
  bool is_generated_shape(const Arrow& a) const {
    return is_valid(a.src) && is_valid(arrow_trg(a));
  }

  /// ev(v) = ev(w)? Decided from the reference model when the atlas has one,
  /// otherwise from arrows and the structure-group reduction.
  PointComparison same_point(const NebulaPoint& v, const NebulaPoint& w, int bound) const {
    require_valid(v);
    require_valid(w);
    PointComparison out;
    const Chart& cv = atlas_.chart(v.chart);
    const Chart& cw = atlas_.chart(w.chart);
    if (atlas_.model && cv.label && cw.label) {
      auto d = atlas_.model->group.decide_orbit(affine_apply(*cv.label, v.coords), affine_apply(*cw.label, w.coords), bound,
                                                config_.hard_cap);
      if (!d.inconclusive()) {
        out.result = d.found() ? Tri::equal : Tri::not_equal;
        out.route = "model";
        return out;
      }
    }
    auto ex = explore(v, bound);
    for (const auto& a : ex.arrows)
      if (arrow_trg(a) == w) {
        out.result = Tri::equal;
        out.route = "arrow";
        out.witness = a;
        return out;
      }
    // Any two arrows from v into the chart of w differ by an element of that
    // chart's structure group, so one reference arrow reduces the question to
    // a Γ-orbit test.
    for (const auto& a : ex.arrows) {
      if (a.dst_chart != w.chart) continue;
      auto d = cw.group.decide_orbit(arrow_trg(a).coords, w.coords, bound, config_.hard_cap);
      if (d.found()) {
        out.result = Tri::equal;
        out.route = "reference-arrow";
        out.witness = Arrow{v, affine_compose(*d.witness, a.map), w.chart};
        return out;
      }
      if (d.absent()) {
        out.result = Tri::not_equal;
        out.route = "reference-arrow";
        return out;
      }
      break;
    }
    if (ex.complete) {
      out.result = Tri::not_equal;
      out.route = "closed-component";
      return out;
    }
    out.route = "bound";
    return out;
  }

  /// The assembly of G_x at x = ev(base): per chart meeting the fiber, the
  /// bounded object set and the structure-group arrows between fiber points,
  /// plus one connecting arrow between consecutive chart blocks.
  AssemblyReport isotropy_and_assembly(const NebulaPoint& base, int bound) const {
    require_valid(base);
    AssemblyReport rep;
    rep.base = base;
    rep.bound = bound;
    auto ex = explore(base, bound);
    std::vector<Arrow> first_into;  // first arrow reaching each block
    for (const auto& a : ex.arrows) {
      NebulaPoint t = arrow_trg(a);
      if (t == base) rep.isotropy.push_back(a);
      auto it = std::find_if(rep.blocks.begin(), rep.blocks.end(), [&](const ChartBlock& b) { return b.chart == t.chart; });
      if (it == rep.blocks.end()) {
        rep.blocks.push_back({t.chart, {}, {}});
        first_into.push_back(a);
        it = rep.blocks.end() - 1;
      }
      if (std::find(it->objects.begin(), it->objects.end(), t.coords) == it->objects.end())
        it->objects.push_back(t.coords);
    }
    for (auto& block : rep.blocks) {
      const Chart& c = atlas_.chart(block.chart);
      auto elements = c.group.enumerate(bound, config_.hard_cap);
      for (const auto& o : block.objects)
        for (const auto& g : elements) {
          Arrow a{{block.chart, o}, g, block.chart};
          if (c.domain.contains(affine_apply(g, o), config_.witness)) block.arrows.push_back(std::move(a));
        }
    }
    for (std::size_t i = 0; i + 1 < first_into.size(); ++i)
      rep.connections.push_back(arrow_compose(arrow_invert(first_into[i]), first_into[i + 1]));
    return rep;
  }

 private:
  struct Exploration {
    std::vector<Arrow> arrows;
    bool complete = false;  // the whole transitivity component was reached
  };

  struct Step {
    ChartId from;
    ChartId to;
    AffineElement map;
    std::optional<Box> domain;  // in `from` coordinates
    bool inverse = false;       // domain refers to the image side
    AffineElement forward;      // declared map, for inverse steps
  };

  std::vector<Step> steps() const {
    std::vector<Step> s;
    for (const auto& t : atlas_.transitions) {
      s.push_back({t.from, t.to, t.map, t.domain, false, t.map});
      s.push_back({t.to, t.from, affine_invert(t.map), t.domain, true, t.map});
    }
    return s;
  }

  bool step_applies(const Step& s, const QVector& p) const {
    if (!s.domain) return true;
    const QVector src = s.inverse ? affine_apply(affine_invert(s.forward), p) : p;
    return s.domain->contains(src, config_.witness);
  }

  Exploration explore(const NebulaPoint& v, int bound) const {
    Exploration ex;
    std::set<std::pair<ChartId, AffineElement>> seen;
    std::vector<std::pair<ChartId, AffineElement>> layer;
    bool all_finite = true;
    auto add_group_orbit = [&](const ChartId& chart, const AffineElement& phi, std::vector<std::pair<ChartId, AffineElement>>& out) {
      const Chart& c = atlas_.chart(chart);
      if (!c.group.is_finite()) all_finite = false;
      QVector p = affine_apply(phi, v.coords);
      for (const auto& g : c.group.enumerate(bound, config_.hard_cap)) {
        AffineElement m = affine_compose(g, phi);
        if (!c.domain.contains(affine_apply(g, p), config_.witness)) continue;
        if (seen.insert({chart, m}).second) {
          ex.arrows.push_back({v, m, chart});
          out.push_back({chart, m});
        }
      }
    };
    add_group_orbit(v.chart, AffineElement::identity(v.coords.size()), layer);
    auto all_steps = steps();
    for (int k = 1; k <= bound && !layer.empty(); ++k) {
      std::vector<std::pair<ChartId, AffineElement>> next;
      for (const auto& [chart, phi] : layer) {
        QVector p = affine_apply(phi, v.coords);
        for (const auto& s : all_steps) {
          if (s.from != chart || !step_applies(s, p)) continue;
          QVector q = affine_apply(s.map, p);
          if (!atlas_.chart(s.to).domain.contains(q, config_.witness)) continue;
          add_group_orbit(s.to, affine_compose(s.map, phi), next);
        }
      }
      layer = std::move(next);
    }
    // With finite groups, an empty frontier means closure under every step.
    ex.complete = all_finite && !layer_has_pending(layer, all_steps, v, seen);
    return ex;
  }

  bool layer_has_pending(const std::vector<std::pair<ChartId, AffineElement>>& layer, const std::vector<Step>& all_steps,
                         const NebulaPoint& v, const std::set<std::pair<ChartId, AffineElement>>& seen) const {
    for (const auto& [chart, phi] : layer) {
      QVector p = affine_apply(phi, v.coords);
      for (const auto& s : all_steps) {
        if (s.from != chart || !step_applies(s, p)) continue;
        QVector q = affine_apply(s.map, p);
        if (!atlas_.chart(s.to).domain.contains(q, config_.witness)) continue;
        if (!seen.count({s.to, affine_compose(s.map, phi)})) return true;
      }
    }
    return false;
  }

  /// Spot-checks declared transitions and chart groups against the model.
  void check_consistency() const {
    if (!atlas_.model) return;
    const auto& ref = atlas_.model->group;
    for (const auto& t : atlas_.transitions) {
      const Chart& a = atlas_.chart(t.from);
      const Chart& b = atlas_.chart(t.to);
      if (!a.label || !b.label) continue;
      const Box& dom = t.domain ? *t.domain : a.domain;
      for (const auto& r : dom.sample_points(atlas_.dimension)) {
        if (!a.domain.contains(r, config_.witness)) continue;
        auto d = ref.decide_orbit(affine_apply(*a.label, r), affine_apply(*b.label, affine_apply(t.map, r)), 2, config_.hard_cap);
        if (d.absent())
          throw Error("inconsistent-transition", "transition " + t.from + " -> " + t.to +
                                                     " is not ev-compatible at " + to_string(r));
      }
    }
    for (const auto& c : atlas_.charts) {
      if (!c.label) continue;
      for (const auto& r : c.domain.sample_points(atlas_.dimension))
        for (const auto& g : c.group.enumerate(2, config_.hard_cap)) {
          auto d = ref.decide_orbit(affine_apply(*c.label, r), affine_apply(*c.label, affine_apply(g, r)), 2, config_.hard_cap);
          if (d.absent())
            throw Error("inconsistent-chart", "structure group of chart '" + c.id + "' moves " + to_string(r) +
                                                  " off its fiber");
        }
    }
  }

  Atlas atlas_;
  GroupoidConfig config_;
};

/// Opaque handle for ev(point); equality is bounded-decidable.
struct QuasifoldPointHandle {
  NebulaPoint representative;
  const StructureGroupoid* groupoid = nullptr;

  Tri equals(const QuasifoldPointHandle& other, int bound) const {
    if (groupoid != other.groupoid) throw Error("mixed-groupoids", "handles from different groupoids");
    return groupoid->same_point(representative, other.representative, bound).result;
  }
};

inline StructureGroupoid build_groupoid(Atlas atlas, GroupoidConfig config = {}) {
  return StructureGroupoid(std::move(atlas), std::move(config));
}

inline QuasifoldPointHandle evaluate(const NebulaPoint& p, const StructureGroupoid& g) {
  g.require_valid(p);
  return {p, &g};
}

}  // namespace quasifold
