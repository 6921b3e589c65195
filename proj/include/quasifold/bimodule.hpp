#pragma once

#include <compare>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "quasifold/atlas.hpp"
#include "quasifold/error.hpp"
#include "quasifold/groupoid.hpp"
#include "quasifold/structure_groupoid.hpp"

namespace quasifold {

/// germ(f)_r for a local diffeomorphism f from the nebula of A into a chart
/// of A' with F'∘f = F; src is (F, r), the target chart is F'.
struct LinkingGerm {
  NebulaPoint src;
  AffineElement map;
  ChartId dst_chart;

  friend bool operator==(const LinkingGerm&, const LinkingGerm&) = default;
  friend std::strong_ordering operator<=>(const LinkingGerm&, const LinkingGerm&) = default;

  std::string str() const { return "<" + src.str() + " -" + map.str() + "-> " + dst_chart + ">"; }
};

/// Two atlases of one quasifold and the seeds generating the linking germs.
/// A link reuses the Transition shape: `from` is a chart of `left`, `to` a
/// chart of `right`.
struct BiAtlas {
  std::string name;
  Atlas left;
  Atlas right;
  std::vector<Transition> links;
};

/// (dst chart, f(r)): the point of the nebula of A' hit by the germ.
inline NebulaPoint class_map(const LinkingGerm& z) { return {z.dst_chart, affine_apply(z.map, z.src.coords)}; }

/// g·z = germ(f∘g): defined when trg(g) = src(z).
inline LinkingGerm left_act(const Arrow& g, const LinkingGerm& z) {
  if (!(arrow_trg(g) == z.src))
    throw Error("not-composable", "left action needs trg(g) = src(z): " + g.str() + " vs " + z.str());
  return {g.src, affine_compose(z.map, g.map), z.dst_chart};
}

/// z·g' = germ(g'∘f): defined when src(g') = class(z).
inline LinkingGerm right_act(const LinkingGerm& z, const Arrow& g) {
  if (!(g.src == class_map(z)))
    throw Error("not-composable", "right action needs src(g') = class(z): " + z.str() + " vs " + g.str());
  return {z.src, affine_compose(g.map, z.map), g.dst_chart};
}

/// The germ of f⁻¹ at f(r), an element of the inverse bimodule.
inline LinkingGerm invert_germ(const LinkingGerm& z) { return {class_map(z), affine_invert(z.map), z.src.chart}; }

struct QuotientWitness {
  std::optional<Arrow> arrow;  // g with z' = g·z
  std::string certificate;     // "constructed", "classes-differ", "not-in-groupoid", "inconclusive-at-bound"
};

struct ProbeResult {
  std::optional<LinkingGerm> germ;
  std::string status;  // "found" or "inconclusive-at-bound"
};

struct AxiomResult {
  AxiomResult() = default;
  explicit AxiomResult(std::string n) : name(std::move(n)) {}

  std::string name;
  bool passed = true;
  std::size_t instances = 0;
  std::size_t inconclusive = 0;
  std::vector<std::string> counterexamples;

  void fail(std::string what) {
    passed = false;
    if (counterexamples.size() < 5) counterexamples.push_back(std::move(what));
  }
};

struct AxiomReport {
  std::string biatlas;
  int bound = 0;
  std::size_t germs = 0;
  std::vector<AxiomResult> axioms;

  bool passed() const {
    for (const auto& a : axioms)
      if (!a.passed) return false;
    return true;
  }
};

/// The Z bimodule between G (left, from A) and G' (right, from A'), generated
/// as G-words · seed · G'-words.
class Bimodule {
 public:
  explicit Bimodule(BiAtlas bi, GroupoidConfig config = {})
      : bi_(std::move(bi)), left_(bi_.left, config), right_(bi_.right, config), config_(std::move(config)) {
    for (const auto& l : bi_.links) {
      if (!bi_.left.has_chart(l.from) || !bi_.right.has_chart(l.to))
        throw Error("invalid-biatlas", "link " + l.from + " -> " + l.to + " names an unknown chart");
      if (l.map.dim() != bi_.left.dimension || bi_.left.dimension != bi_.right.dimension)
        throw Error("dimension-mismatch", "link map");
    }
    check_links();
  }

  const BiAtlas& biatlas() const noexcept { return bi_; }
  const StructureGroupoid& left() const noexcept { return left_; }
  const StructureGroupoid& right() const noexcept { return right_; }

  /// Seed germs with source v (links whose domain contains v and whose image
  /// lies in the target chart).
  std::vector<LinkingGerm> seeds_at(const NebulaPoint& v) const {
    std::vector<LinkingGerm> out;
    if (!left_.is_valid(v)) return out;
    for (const auto& l : bi_.links) {
      if (l.from != v.chart) continue;
      if (l.domain && !l.domain->contains(v.coords, config_.witness)) continue;
      LinkingGerm z{v, l.map, l.to};
      if (right_.is_valid(class_map(z))) out.push_back(std::move(z));
    }
    return out;
  }

  /// {g·s·g'} with g into v's word neighbourhood and g' out of class(s), each
  /// bounded by `bound`; duplicate-free, in generation order.
  std::vector<LinkingGerm> germs_from(const NebulaPoint& v, int bound) const {
    std::vector<LinkingGerm> out;
    for (const auto& [z, level] : germs_with_level(v, bound)) out.push_back(z);
    return out;
  }

  /// germs_from with the combined word level of each germ.
  std::vector<std::pair<LinkingGerm, int>> germs_with_level(const NebulaPoint& v, int bound) const {
    std::vector<std::pair<LinkingGerm, int>> out;
    std::map<LinkingGerm, std::size_t> index;
    for (const auto& [a, la] : left_.arrows_with_level(v, bound)) {
      for (const auto& seed : seeds_at(arrow_trg(a))) {
        LinkingGerm z0 = left_act(a, seed);
        for (const auto& [b, lb] : right_.arrows_with_level(class_map(z0), bound - la)) {
          LinkingGerm z = right_act(z0, b);
          auto [it, fresh] = index.emplace(z, out.size());
          if (fresh)
            out.emplace_back(std::move(z), la + lb);
          else
            out[it->second].second = std::min(out[it->second].second, la + lb);
        }
      }
    }
    return out;
  }

  /// ev_A(src z) = ev_{A'}(class z)?  Decided through the left reference
  /// model when both atlases carry one.
  Tri ev_compatible(const LinkingGerm& z, int bound) const {
    const Chart& cs = bi_.left.chart(z.src.chart);
    const Chart& ct = bi_.right.chart(z.dst_chart);
    if (!bi_.left.model || !cs.label || !ct.label) return Tri::inconclusive;
    auto d = bi_.left.model->group.decide_orbit(affine_apply(*cs.label, z.src.coords),
                                                affine_apply(*ct.label, class_map(z).coords), bound, config_.hard_cap);
    if (d.inconclusive()) return Tri::inconclusive;
    return d.found() ? Tri::equal : Tri::not_equal;
  }

  /// g with z' = g·z, built as g = (src z', z.map⁻¹∘z'.map) when the classes
  /// agree. Distinct classes admit no such g at all.
  QuotientWitness quotient_witness(const LinkingGerm& z, const LinkingGerm& zp, int bound) const {
    if (!(class_map(z) == class_map(zp))) return {std::nullopt, "classes-differ"};
    Arrow g{zp.src, affine_compose(affine_invert(z.map), zp.map), z.src.chart};
    auto in = left_.contains_arrow(g, bound);
    if (in.result == Tri::equal) return {g, "constructed"};
    if (in.result == Tri::not_equal) return {std::nullopt, "not-in-groupoid"};
    return {std::nullopt, "inconclusive-at-bound"};
  }

  /// The right-hand analogue: g' with z' = z·g' when src z = src z'.
  QuotientWitness right_quotient_witness(const LinkingGerm& z, const LinkingGerm& zp, int bound) const {
    if (!(z.src == zp.src)) return {std::nullopt, "classes-differ"};
    Arrow g{class_map(z), affine_compose(zp.map, affine_invert(z.map)), zp.dst_chart};
    auto in = right_.contains_arrow(g, bound);
    if (in.result == Tri::equal) return {g, "constructed"};
    if (in.result == Tri::not_equal) return {std::nullopt, "not-in-groupoid"};
    return {std::nullopt, "inconclusive-at-bound"};
  }

  /// A germ z with class(z) = p': walk G' out of p', pull back through an
  /// inverted seed, then right-act back to p'.
  ProbeResult surjectivity_probe(const NebulaPoint& p, int bound) const {
    right_.require_valid(p);
    for (const auto& a : right_.arrows_from(p, bound)) {
      NebulaPoint q = arrow_trg(a);
      for (const auto& l : bi_.links) {
        if (l.to != q.chart) continue;
        NebulaPoint r{l.from, affine_apply(affine_invert(l.map), q.coords)};
        if (!left_.is_valid(r) || (l.domain && !l.domain->contains(r.coords, config_.witness))) continue;
        return {right_act(LinkingGerm{r, l.map, l.to}, arrow_invert(a)), "found"};
      }
    }
    return {std::nullopt, "inconclusive-at-bound"};
  }

  /// Z⁻¹: the bimodule from G' to G with inverted seeds.
  Bimodule inverse() const {
    BiAtlas inv{bi_.name + "^-1", bi_.right, bi_.left, {}};
    for (const auto& l : bi_.links) inv.links.push_back({l.to, l.from, affine_invert(l.map), image_domain(l)});
    return Bimodule(std::move(inv), config_);
  }

  /// Bimodule axioms on every bounded-word instance over the sample points:
  /// a tuple of arrows and germs qualifies when its word levels sum to at
  /// most `bound`.
  AxiomReport check_axioms(const std::vector<NebulaPoint>& samples_left, const std::vector<NebulaPoint>& samples_right,
                           int bound) const {
    AxiomReport rep{bi_.name, bound, 0, {}};
    AxiomResult left_unit{"left-action-unit"}, left_assoc{"left-action-associative"}, right_unit{"right-action-unit"},
        right_assoc{"right-action-associative"}, commute{"actions-commute"}, left_free{"left-action-free"},
        right_free{"right-action-free"}, class_inj{"class-map-injective-mod-G"},
        class_surj{"class-map-surjective"}, src_inj{"source-map-injective-mod-G'"}, src_surj{"source-map-surjective"},
        compat{"ev-compatible"}, inverse_sym{"inverse-bimodule"};

    Bimodule inv = inverse();
    std::map<NebulaPoint, std::vector<LinkingGerm>> by_class, by_source;
    using Leveled = std::vector<std::pair<Arrow, int>>;
    std::map<std::pair<NebulaPoint, int>, Leveled> into_cache, out_cache;
    auto into = [&](const NebulaPoint& p, int b) -> const Leveled& {
      auto it = into_cache.find({p, b});
      if (it == into_cache.end()) it = into_cache.emplace(std::pair{p, b}, arrows_into(left_, p, b)).first;
      return it->second;
    };
    auto out = [&](const NebulaPoint& p, int b) -> const Leveled& {
      auto it = out_cache.find({p, b});
      if (it == out_cache.end())
        it = out_cache.emplace(std::pair{p, b}, b < 0 ? Leveled{} : right_.arrows_with_level(p, b)).first;
      return it->second;
    };
    for (const auto& v : samples_left) {
      auto germs = germs_with_level(v, bound);
      rep.germs += germs.size();
      ++src_surj.instances;
      if (germs.empty()) src_surj.fail("no germ with source " + v.str());
      for (const auto& [z, lz] : germs) {
        by_class[class_map(z)].push_back(z);
        by_source[z.src].push_back(z);

        ++compat.instances;
        switch (ev_compatible(z, bound)) {
          case Tri::equal: break;
          case Tri::not_equal: compat.fail(z.str()); break;
          case Tri::inconclusive: ++compat.inconclusive; break;
        }

        ++left_unit.instances;
        if (!(left_act(unit_arrow(z.src), z) == z)) left_unit.fail(z.str());
        ++right_unit.instances;
        if (!(right_act(z, unit_arrow(class_map(z))) == z)) right_unit.fail(z.str());

        const int budget = bound - lz;
        const auto& out_of = out(class_map(z), budget);
        for (const auto& [g, lg] : into(z.src, budget)) {
          LinkingGerm gz = left_act(g, z);
          ++left_free.instances;
          if (gz == z && !is_unit(g)) left_free.fail(g.str() + " fixes " + z.str());

          ++inverse_sym.instances;
          if (!(invert_germ(gz) == right_act(invert_germ(z), arrow_invert(g))))
            inverse_sym.fail("(g.z)^-1 for g = " + g.str() + ", z = " + z.str());

          for (const auto& [g2, l2] : into(g.src, budget - lg)) {
            ++left_assoc.instances;
            if (!(left_act(arrow_compose(g2, g), z) == left_act(g2, gz)))
              left_assoc.fail(g2.str() + " . " + g.str() + " . " + z.str());
          }
          for (const auto& [h, lh] : out_of) {
            if (lg + lh > budget) continue;
            ++commute.instances;
            if (!(right_act(gz, h) == left_act(g, right_act(z, h))))
              commute.fail(g.str() + " . " + z.str() + " . " + h.str());
          }
        }
        for (const auto& [h, lh] : out_of) {
          LinkingGerm zh = right_act(z, h);
          ++right_free.instances;
          if (zh == z && !is_unit(h)) right_free.fail(z.str() + " fixed by " + h.str());
          for (const auto& [h2, l2] : out(arrow_trg(h), budget - lh)) {
            ++right_assoc.instances;
            if (!(right_act(z, arrow_compose(h, h2)) == right_act(zh, h2)))
              right_assoc.fail(z.str() + " . " + h.str() + " . " + h2.str());
          }
        }
        if (inv.ev_compatible(invert_germ(z), bound) == Tri::not_equal)
          inverse_sym.fail("inverse germ of " + z.str() + " is not ev-compatible");
      }
    }

    // Equal classes differ by an arrow of G, equal sources by one of G'.
    // Comparing each germ with the group's first member and its predecessor
    // covers the relation by transitivity.
    auto related = [&](const auto& groups, AxiomResult& r, bool left_side) {
      auto check = [&](const LinkingGerm& z, const LinkingGerm& zp) {
        ++r.instances;
        auto w = left_side ? quotient_witness(z, zp, bound) : right_quotient_witness(z, zp, bound);
        if (!w.arrow) {
          if (w.certificate == "inconclusive-at-bound")
            ++r.inconclusive;
          else
            r.fail(z.str() + " ~ " + zp.str() + ": " + w.certificate);
          return;
        }
        if (left_side ? !(left_act(*w.arrow, z) == zp) : !(right_act(z, *w.arrow) == zp))
          r.fail("witness does not relate " + z.str() + " and " + zp.str());
      };
      for (const auto& [key, zs] : groups)
        for (std::size_t i = 1; i < zs.size(); ++i) {
          check(zs[0], zs[i]);
          check(zs[i], zs[0]);
          if (i > 1) check(zs[i - 1], zs[i]);
        }
    };
    related(by_class, class_inj, true);
    related(by_source, src_inj, false);

    for (const auto& p : samples_right) {
      ++class_surj.instances;
      auto probe = surjectivity_probe(p, bound);
      if (!probe.germ)
        class_surj.fail("no germ over " + p.str());
      else if (!(class_map(*probe.germ) == p))
        class_surj.fail("probe over " + p.str() + " returned " + probe.germ->str());
    }

    rep.axioms = {left_unit, left_assoc, right_unit, right_assoc, commute, left_free, right_free,
                  class_inj, class_surj, src_inj, src_surj, compat, inverse_sym};
    return rep;
  }

 private:
  static std::vector<std::pair<Arrow, int>> arrows_into(const StructureGroupoid& g, const NebulaPoint& v, int budget) {
    std::vector<std::pair<Arrow, int>> out;
    if (budget < 0) return out;
    for (auto& [a, l] : g.arrows_with_level(v, budget)) out.emplace_back(arrow_invert(a), l);
    return out;
  }

  /// Domain of the inverted link: the image of the link's domain (1-D only).
  static std::optional<Box> image_domain(const Transition& l) {
    if (!l.domain || l.domain->factors.empty()) return l.domain;
    if (l.map.dim() != 1) throw Error("unsupported-biatlas", "inverting a restricted link needs dimension 1");
    const Interval& iv = l.domain->factors[0];
    auto img = [&](const std::optional<QAlpha>& x) -> std::optional<QAlpha> {
      if (!x) return std::nullopt;
      return affine_apply(l.map, QVector{*x})[0];
    };
    if (l.map.linear()(0, 0) > Rational(0)) return Box{{Interval{img(iv.lo), img(iv.hi)}}};
    return Box{{Interval{img(iv.hi), img(iv.lo)}}};
  }

  void check_links() const {
    for (const auto& l : bi_.links) {
      const Box& dom = l.domain ? *l.domain : bi_.left.chart(l.from).domain;
      for (const auto& r : dom.sample_points(bi_.left.dimension)) {
        NebulaPoint v{l.from, r};
        if (!left_.is_valid(v)) continue;
        LinkingGerm z{v, l.map, l.to};
        if (!right_.is_valid(class_map(z))) continue;
        if (ev_compatible(z, 2) == Tri::not_equal)
          throw Error("inconsistent-link", "link " + l.from + " -> " + l.to + " is not ev-compatible at " + to_string(r));
      }
    }
  }

  BiAtlas bi_;
  StructureGroupoid left_;
  StructureGroupoid right_;
  GroupoidConfig config_;
};

// --- sample bi-atlases ------------------------------------------------------

/// A and A ⊔ A (charts duplicated with a prime), linked by identities.
inline BiAtlas duplicated_biatlas(const Atlas& base = irrational_torus_atlas()) {
  BiAtlas b{base.name + " | dup", base, duplicated_atlas(base), {}};
  for (const auto& c : base.charts) {
    b.links.push_back({c.id, c.id, AffineElement::identity(base.dimension), std::nullopt});
    b.links.push_back({c.id, c.id + "'", AffineElement::identity(base.dimension), std::nullopt});
  }
  return b;
}

/// x ↦ class(x) against x ↦ class(2x), linked by x ↦ x/2.
inline BiAtlas two_scale_biatlas() {
  return {"T_alpha two-scale",
          irrational_torus_atlas(),
          two_scale_torus_atlas(),
          {{"class", "half", AffineElement::line(Rational(1, 2), QAlpha(0)), std::nullopt}}};
}

}  // namespace quasifold
