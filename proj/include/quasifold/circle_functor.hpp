#pragma once

#include <compare>
#include <string>

#include "quasifold/error.hpp"
#include "quasifold/groupoid.hpp"
#include "quasifold/qalpha.hpp"

namespace quasifold {

/// Arrow (z, m): z → z + mα of S¹ ⋊ αℤ, with S¹ modelled as ℝ/ℤ and z
/// kept reduced into [0, 1).
struct CircleArrow {
  QAlpha src;
  Rational::int_type m = 0;

  friend bool operator==(const CircleArrow&, const CircleArrow&) = default;
  friend std::strong_ordering operator<=>(const CircleArrow&, const CircleArrow&) = default;

  std::string str() const { return "(" + src.str() + ", " + std::to_string(m) + ")"; }
};

inline QAlpha circle_trg(const CircleArrow& a) { return (a.src + QAlpha(0, a.m)).mod_one(); }

/// (z, m)·(z + mα, m') = (z, m + m'), first a then b.
inline CircleArrow circle_compose(const CircleArrow& a, const CircleArrow& b) {
  if (!(circle_trg(a) == b.src)) throw Error("not-composable", "circle arrows " + a.str() + ", " + b.str());
  return {a.src, a.m + b.m};
}

/// Φ on objects: x ↦ x mod 1.
inline QAlpha phi_object(const NebulaPoint& x) {
  if (x.coords.size() != 1) throw Error("dimension-mismatch", "Φ acts on the line");
  return x.coords[0].mod_one();
}

/// Φ on arrows: (x, t_{n+αm}) ↦ (x mod 1, m); n is absorbed by ℝ → ℝ/ℤ.
inline CircleArrow phi_arrow(const Arrow& a) {
  if (!a.map.is_translation() || a.map.dim() != 1) throw Error("not-in-G_alpha", a.str() + " is not a translation");
  const QAlpha& t = a.map.shift()[0];
  if (!t.rational_part().is_integer() || !t.alpha_part().is_integer())
    throw Error("not-in-G_alpha", a.str() + " is not a translation by n + mα");
  return {phi_object(a.src), t.alpha_part().num()};
}

}  // namespace quasifold
