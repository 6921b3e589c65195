#pragma once

#include <compare>
#include <string>
#include <utility>

#include "quasifold/affine.hpp"
#include "quasifold/error.hpp"
#include "quasifold/qalpha.hpp"

namespace quasifold {

using ChartId = std::string;

/// Object of the structure groupoid: a chart of the generating family and
/// a point of its domain.
struct NebulaPoint {
  ChartId chart;
  QVector coords;

  friend bool operator==(const NebulaPoint&, const NebulaPoint&) = default;
  friend std::strong_ordering operator<=>(const NebulaPoint& a, const NebulaPoint& b) {
    if (auto c = a.chart <=> b.chart; c != 0) return c;
    return std::lexicographical_compare_three_way(a.coords.begin(), a.coords.end(), b.coords.begin(),
                                                  b.coords.end());
  }

  std::string str() const { return chart + ":" + to_string(coords); }
};

/// Germ at src of the affine map `map`, landing in chart `dst_chart`.
///
/// Affine maps that agree on an open set agree everywhere, so the germ is
/// the map itself and equality is structural.
struct Arrow {
  NebulaPoint src;
  AffineElement map;
  ChartId dst_chart;

  friend bool operator==(const Arrow&, const Arrow&) = default;
  friend std::strong_ordering operator<=>(const Arrow& a, const Arrow& b) {
    if (auto c = a.src <=> b.src; c != 0) return c;
    if (auto c = a.map <=> b.map; c != 0) return c;
    return a.dst_chart <=> b.dst_chart;
  }

  std::string str() const { return "(" + src.str() + ", " + map.str() + " -> " + dst_chart + ")"; }
};

inline const NebulaPoint& arrow_src(const Arrow& a) { return a.src; }

inline NebulaPoint arrow_trg(const Arrow& a) { return {a.dst_chart, affine_apply(a.map, a.src.coords)}; }

inline Arrow unit_arrow(const NebulaPoint& p) { return {p, AffineElement::identity(p.coords.size()), p.chart}; }

inline bool is_unit(const Arrow& a) { return a.map.is_identity() && a.dst_chart == a.src.chart; }

/// a·b: first a, then b. Requires trg(a) = src(b).
inline Arrow arrow_compose(const Arrow& a, const Arrow& b) {
  if (arrow_trg(a) != b.src)
    throw Error("not-composable", "target " + arrow_trg(a).str() + " differs from source " + b.src.str());
  return {a.src, affine_compose(b.map, a.map), b.dst_chart};
}

inline Arrow arrow_invert(const Arrow& a) { return {arrow_trg(a), affine_invert(a.map), a.src.chart}; }

}  // namespace quasifold
