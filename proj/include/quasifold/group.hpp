#pragma once

#include <algorithm>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "quasifold/affine.hpp"
#include "quasifold/error.hpp"
#include "quasifold/qalpha.hpp"

namespace quasifold {

/// Translations by the integer span of finitely many QAlpha vectors
/// (Z + αZ is the span of {1, α} in dimension one).
struct TranslationLattice {
  std::vector<QVector> generators;
};

/// All rational translations ℚⁿ.
struct RationalTranslations {};

/// Explicit finite group; closed under composition and inverse.
struct FiniteMatrixGroup {
  std::vector<AffineElement> elements;
};

/// Group generated by finitely many affine maps (and their inverses).
struct GeneratedGroup {
  std::vector<AffineElement> generators;
};

/// Outcome of a bounded orbit search: a witness, a certified absence, or
/// "not found within the bound".
struct OrbitDecision {
  enum class Status { found, absent, inconclusive } status = Status::inconclusive;
  std::optional<AffineElement> witness;

  bool found() const noexcept { return status == Status::found; }
  bool absent() const noexcept { return status == Status::absent; }
  bool inconclusive() const noexcept { return status == Status::inconclusive; }
};

/// Countable subgroup Γ ⊂ Aff(ℝⁿ) in one of four presentations.
///
/// Enumeration is deterministic: elements are listed by increasing
/// "max-index" (word length for generated groups, height for ℚⁿ) and then
/// lexicographically by index tuple. The identity always comes first.
class GroupPresentation {
 public:
  using Kind = std::variant<TranslationLattice, RationalTranslations, FiniteMatrixGroup, GeneratedGroup>;

  static constexpr int default_hard_cap = 64;

  GroupPresentation(std::size_t dimension, Kind kind) : dim_(dimension), kind_(std::move(kind)) { validate(); }

  static GroupPresentation z_plus_alpha_z() {
    return {1, TranslationLattice{{QVector{QAlpha(1)}, QVector{QAlpha::alpha()}}}};
  }
  static GroupPresentation lattice_1d(std::vector<QAlpha> gens) {
    TranslationLattice l;
    for (auto& g : gens) l.generators.push_back(QVector{g});
    return {1, std::move(l)};
  }
  static GroupPresentation rationals(std::size_t n = 1) { return {n, RationalTranslations{}}; }
  static GroupPresentation trivial(std::size_t n = 1) { return {n, FiniteMatrixGroup{{AffineElement::identity(n)}}}; }
  static GroupPresentation reflection_1d() {
    return {1, FiniteMatrixGroup{{AffineElement::identity(1), AffineElement::line(Rational(-1), QAlpha(0))}}};
  }

  std::size_t dimension() const noexcept { return dim_; }
  const Kind& kind() const noexcept { return kind_; }
  bool is_finite() const { return std::holds_alternative<FiniteMatrixGroup>(kind_); }
  bool is_translation_group() const {
    return std::holds_alternative<TranslationLattice>(kind_) || std::holds_alternative<RationalTranslations>(kind_);
  }

  std::string kind_name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, TranslationLattice>) return "translation_lattice";
          if constexpr (std::is_same_v<T, RationalTranslations>) return "rational_translations";
          if constexpr (std::is_same_v<T, FiniteMatrixGroup>) return "finite";
          if constexpr (std::is_same_v<T, GeneratedGroup>) return "generated";
        },
        kind_);
  }

  std::vector<AffineElement> enumerate(int bound, int hard_cap = default_hard_cap) const {
    if (bound < 0) throw Error("invalid-bound", "enumeration bound must be non-negative");
    if (bound > hard_cap)
      throw Error("unbounded-request",
                  "bound " + std::to_string(bound) + " exceeds hard cap " + std::to_string(hard_cap));
    return std::visit([&](const auto& k) { return enumerate_impl(k, bound); }, kind_);
  }

  /// Whether g ∈ Γ, when that is decidable from the presentation alone.
  std::optional<bool> contains(const AffineElement& g) const {
    if (g.dim() != dim_) return false;
    if (auto* l = std::get_if<TranslationLattice>(&kind_)) {
      if (!g.is_translation()) return false;
      auto coeffs = solve_lattice(*l, g.shift());
      if (!coeffs) return std::nullopt;
      if (coeffs->empty()) return false;
      return std::all_of(coeffs->begin(), coeffs->end(), [](const Rational& c) { return c.is_integer(); });
    }
    if (std::holds_alternative<RationalTranslations>(kind_)) {
      if (!g.is_translation()) return false;
      return std::all_of(g.shift().begin(), g.shift().end(), [](const QAlpha& c) { return c.is_rational(); });
    }
    if (auto* f = std::get_if<FiniteMatrixGroup>(&kind_))
      return std::find(f->elements.begin(), f->elements.end(), g) != f->elements.end();
    return std::nullopt;
  }

  /// Exact Γ-orbit test: decides y ∈ Γ·x outright for lattices with
  /// ℚ-independent generators, for ℚⁿ and for finite groups; otherwise
  /// searches up to `bound`.
  OrbitDecision decide_orbit(const QVector& x, const QVector& y, int bound, int hard_cap = default_hard_cap) const {
    if (x.size() != dim_ || y.size() != dim_) throw Error("dimension-mismatch", "orbit test");
    OrbitDecision d;
    if (auto* l = std::get_if<TranslationLattice>(&kind_)) {
      auto coeffs = solve_lattice(*l, y - x);
      if (coeffs) {
        bool integral = !coeffs->empty() &&
                        std::all_of(coeffs->begin(), coeffs->end(), [](const Rational& c) { return c.is_integer(); });
        if (integral) {
          d.status = OrbitDecision::Status::found;
          d.witness = AffineElement::translation(y - x);
        } else {
          d.status = OrbitDecision::Status::absent;
        }
        return d;
      }
    } else if (std::holds_alternative<RationalTranslations>(kind_)) {
      QVector diff = y - x;
      bool rational = std::all_of(diff.begin(), diff.end(), [](const QAlpha& c) { return c.is_rational(); });
      d.status = rational ? OrbitDecision::Status::found : OrbitDecision::Status::absent;
      if (rational) d.witness = AffineElement::translation(diff);
      return d;
    }
    for (const auto& g : enumerate(is_finite() ? 0 : bound, hard_cap))
      if (affine_apply(g, x) == y) {
        d.status = OrbitDecision::Status::found;
        d.witness = g;
        return d;
      }
    d.status = is_finite() ? OrbitDecision::Status::absent : OrbitDecision::Status::inconclusive;
    return d;
  }

 private:
  void validate() {
    std::visit([&](const auto& k) { validate_impl(k); }, kind_);
  }

  void validate_impl(const TranslationLattice& l) const {
    for (const auto& g : l.generators)
      if (g.size() != dim_) throw Error("dimension-mismatch", "lattice generator dimension");
  }
  void validate_impl(const RationalTranslations&) const {}
  void validate_impl(const FiniteMatrixGroup& f) const {
    if (f.elements.empty()) throw Error("invalid-group", "finite group with no elements");
    for (const auto& g : f.elements)
      if (g.dim() != dim_) throw Error("dimension-mismatch", "finite group element dimension");
    std::set<AffineElement> s(f.elements.begin(), f.elements.end());
    if (s.size() != f.elements.size()) throw Error("invalid-group", "duplicate elements in finite group");
    if (!s.count(AffineElement::identity(dim_))) throw Error("invalid-group", "finite group lacks the identity");
    for (const auto& g : f.elements) {
      if (!s.count(affine_invert(g))) throw Error("invalid-group", "finite group not closed under inverse");
      for (const auto& h : f.elements)
        if (!s.count(affine_compose(g, h))) throw Error("invalid-group", "finite group not closed under composition");
    }
  }
  void validate_impl(const GeneratedGroup& g) const {
    for (const auto& e : g.generators)
      if (e.dim() != dim_) throw Error("dimension-mismatch", "generator dimension");
  }

  std::vector<AffineElement> enumerate_impl(const TranslationLattice& l, int bound) const {
    const std::size_t k = l.generators.size();
    std::vector<std::vector<int>> tuples;
    std::vector<int> idx(k, -bound);
    if (k == 0) tuples.push_back({});
    while (k > 0) {
      tuples.push_back(idx);
      std::size_t i = k;
      while (i > 0) {
        --i;
        if (idx[i] < bound) {
          ++idx[i];
          break;
        }
        idx[i] = -bound;
        if (i == 0) goto done;
      }
    }
  done:
    auto max_abs = [](const std::vector<int>& t) {
      int m = 0;
      for (int v : t) m = std::max(m, std::abs(v));
      return m;
    };
    std::stable_sort(tuples.begin(), tuples.end(), [&](const auto& a, const auto& b) {
      return std::make_pair(max_abs(a), a) < std::make_pair(max_abs(b), b);
    });
    std::vector<AffineElement> out;
    std::set<AffineElement> seen;
    for (const auto& t : tuples) {
      QVector v(dim_);
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t c = 0; c < dim_; ++c) v[c] += Rational(t[j]) * l.generators[j][c];
      auto g = AffineElement::translation(v);
      if (seen.insert(g).second) out.push_back(std::move(g));
    }
    return out;
  }

  std::vector<AffineElement> enumerate_impl(const RationalTranslations&, int bound) const {
    // Reduced p/q with |p| ≤ bound, 1 ≤ q ≤ bound, keyed by (height, p, q).
    std::vector<std::tuple<int, int, int>> coords;
    for (int q = 1; q <= std::max(bound, 1); ++q)
      for (int p = -bound; p <= bound; ++p) {
        if (bound == 0 && p != 0) continue;
        Rational r(p, q);
        if (r.den() != q) continue;
        coords.emplace_back(std::max(std::abs(p), q == 1 && p == 0 ? 0 : q), p, q);
      }
    std::sort(coords.begin(), coords.end());
    // Cartesian power, ordered by (max height, tuple).
    std::vector<std::vector<std::size_t>> tuples{{}};
    for (std::size_t c = 0; c < dim_; ++c) {
      std::vector<std::vector<std::size_t>> next;
      for (const auto& t : tuples)
        for (std::size_t i = 0; i < coords.size(); ++i) {
          auto u = t;
          u.push_back(i);
          next.push_back(std::move(u));
        }
      tuples = std::move(next);
    }
    auto key = [&](const std::vector<std::size_t>& t) {
      int h = 0;
      for (auto i : t) h = std::max(h, std::get<0>(coords[i]));
      return std::make_pair(h, t);
    };
    std::stable_sort(tuples.begin(), tuples.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::vector<AffineElement> out;
    for (const auto& t : tuples) {
      QVector v;
      for (auto i : t) v.emplace_back(Rational(std::get<1>(coords[i]), std::get<2>(coords[i])));
      out.push_back(AffineElement::translation(std::move(v)));
    }
    return out;
  }

  std::vector<AffineElement> enumerate_impl(const FiniteMatrixGroup& f, int) const {
    std::vector<AffineElement> out{AffineElement::identity(dim_)};
    for (const auto& g : f.elements)
      if (!g.is_identity()) out.push_back(g);
    return out;
  }

  std::vector<AffineElement> enumerate_impl(const GeneratedGroup& g, int bound) const {
    std::vector<AffineElement> letters;
    for (const auto& e : g.generators) {
      letters.push_back(e);
      letters.push_back(affine_invert(e));
    }
    std::vector<AffineElement> out{AffineElement::identity(dim_)};
    std::set<AffineElement> seen(out.begin(), out.end());
    std::vector<AffineElement> frontier = out;
    for (int len = 1; len <= bound; ++len) {
      std::vector<AffineElement> next;
      for (const auto& w : frontier)
        for (const auto& a : letters) {
          auto c = affine_compose(a, w);
          if (seen.insert(c).second) {
            out.push_back(c);
            next.push_back(std::move(c));
          }
        }
      frontier = std::move(next);
    }
    return out;
  }

  /// Rational coordinates of v in the lattice generators, or nullopt when the
  /// generators are ℚ-dependent (coordinates not unique). An empty vector
  /// signals "v is not in the ℚ-span".
  std::optional<std::vector<Rational>> solve_lattice(const TranslationLattice& l, const QVector& v) const {
    const std::size_t k = l.generators.size();
    const std::size_t rows = 2 * dim_;
    std::vector<std::vector<Rational>> m(rows, std::vector<Rational>(k + 1));
    for (std::size_t c = 0; c < dim_; ++c) {
      for (std::size_t j = 0; j < k; ++j) {
        m[2 * c][j] = l.generators[j][c].rational_part();
        m[2 * c + 1][j] = l.generators[j][c].alpha_part();
      }
      m[2 * c][k] = v[c].rational_part();
      m[2 * c + 1][k] = v[c].alpha_part();
    }
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t col = 0; col < k && r < rows; ++col) {
      std::size_t piv = r;
      while (piv < rows && m[piv][col].is_zero()) ++piv;
      if (piv == rows) continue;
      std::swap(m[piv], m[r]);
      Rational d = m[r][col];
      for (auto& e : m[r]) e /= d;
      for (std::size_t i = 0; i < rows; ++i) {
        if (i == r || m[i][col].is_zero()) continue;
        Rational f = m[i][col];
        for (std::size_t j = 0; j <= k; ++j) m[i][j] -= f * m[r][j];
      }
      pivots.push_back(col);
      ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
      if (!m[i][k].is_zero()) return std::vector<Rational>{};
    if (pivots.size() < k) return std::nullopt;
    std::vector<Rational> sol(k);
    for (std::size_t i = 0; i < pivots.size(); ++i) sol[pivots[i]] = m[i][k];
    if (k == 0) return std::nullopt;
    return sol;
  }

  std::size_t dim_;
  Kind kind_;
};

/// γ ∈ enumerate(Γ, bound) with γ·x = y, if any. Absence is inconclusive.
inline std::optional<AffineElement> orbit_witness(const QVector& x, const QVector& y, const GroupPresentation& group,
                                                  int bound, int hard_cap = GroupPresentation::default_hard_cap) {
  if (x.size() != group.dimension() || y.size() != group.dimension())
    throw Error("dimension-mismatch", "orbit witness");
  for (const auto& g : group.enumerate(bound, hard_cap))
    if (affine_apply(g, x) == y) return g;
  return std::nullopt;
}

}  // namespace quasifold
