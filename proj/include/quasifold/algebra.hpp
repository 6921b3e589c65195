#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "quasifold/affine.hpp"
#include "quasifold/alpha_witness.hpp"
#include "quasifold/error.hpp"
#include "quasifold/group.hpp"
#include "quasifold/groupoid.hpp"
#include "quasifold/piecewise_poly.hpp"
#include "quasifold/trig_poly.hpp"

namespace quasifold {

/// line: translations of ℝ; circle: rotations of ℝ/ℤ (labels reduced mod 1);
/// general: any group of affine maps of ℝ.
enum class AlgebraShape { line, circle, general };

inline std::string to_string(AlgebraShape s) {
  switch (s) {
    case AlgebraShape::line: return "line";
    case AlgebraShape::circle: return "circle";
    case AlgebraShape::general: return "general";
  }
  return "?";
}

/// Convolution algebra of the transformation groupoid Γ ⋉ X, X = ℝ or ℝ/ℤ.
/// An arrow is (x, h): x → h(x) and an element is a finitely supported
/// family h ↦ f_h of coefficient functions, f(x, h) = f_h(x).
class ConvolutionAlgebra {
 public:
  ConvolutionAlgebra(std::string name, AlgebraShape shape, GroupPresentation group,
                     AlphaWitness witness = AlphaWitness::standard())
      : name_(std::move(name)), shape_(shape), group_(std::move(group)), witness_(std::move(witness)) {
    if (group_.dimension() != 1) throw Error("dimension-mismatch", "convolution algebras act on one real variable");
    if (shape_ != AlgebraShape::general && !group_.is_translation_group())
      throw Error("unsupported-groupoid-shape", "line and circle algebras need translation groups");
  }

  /// 𝔄: ℝ ⋊ ℚ with compactly supported piecewise-polynomial coefficients.
  static std::shared_ptr<const ConvolutionAlgebra> line_rationals(const AlphaWitness& w = AlphaWitness::standard()) {
    return std::make_shared<const ConvolutionAlgebra>("R/Q", AlgebraShape::line, GroupPresentation::rationals(), w);
  }
  /// ℝ ⋊ (ℤ + αℤ), the lift of T_α.
  static std::shared_ptr<const ConvolutionAlgebra> line_torus(const AlphaWitness& w = AlphaWitness::standard()) {
    return std::make_shared<const ConvolutionAlgebra>("T_alpha", AlgebraShape::line, GroupPresentation::z_plus_alpha_z(),
                                                      w);
  }
  /// 𝔖_α: S¹ ⋊ αℤ modelled on ℝ/ℤ.
  static std::shared_ptr<const ConvolutionAlgebra> circle_alpha(const AlphaWitness& w = AlphaWitness::standard()) {
    return std::make_shared<const ConvolutionAlgebra>("S_alpha", AlgebraShape::circle,
                                                      GroupPresentation::z_plus_alpha_z(), w);
  }
  /// 𝔖_ℚ: S¹ ⋊ ℚ/ℤ modelled on ℝ/ℤ.
  static std::shared_ptr<const ConvolutionAlgebra> circle_rationals(const AlphaWitness& w = AlphaWitness::standard()) {
    return std::make_shared<const ConvolutionAlgebra>("S_Q", AlgebraShape::circle, GroupPresentation::rationals(), w);
  }
  /// ℝ ⋊ {±1}; only the general convolution applies.
  static std::shared_ptr<const ConvolutionAlgebra> reflection_line(const AlphaWitness& w = AlphaWitness::standard()) {
    return std::make_shared<const ConvolutionAlgebra>("R/{+-1}", AlgebraShape::general,
                                                      GroupPresentation::reflection_1d(), w);
  }

  const std::string& name() const noexcept { return name_; }
  AlgebraShape shape() const noexcept { return shape_; }
  const GroupPresentation& group() const noexcept { return group_; }
  const AlphaWitness& witness() const noexcept { return witness_; }

  /// Canonical label: circle rotations are reduced into [0, 1).
  AffineElement canonical(const AffineElement& h) const {
    if (h.dim() != 1) throw Error("dimension-mismatch", "labels are maps of one variable");
    return shape_ == AlgebraShape::circle ? AffineElement::translation(h.shift()[0].mod_one()) : h;
  }

  /// canonical(h), after checking that h lies in the group.
  AffineElement normalize(const AffineElement& h) const {
    AffineElement r = canonical(h);
    if (group_.contains(r) == false) throw Error("invalid-label", r.str() + " is not in " + group_.kind_name());
    return r;
  }

  template <class C>
  bool accepts() const {
    if (shape_ == AlgebraShape::line) return std::is_same_v<C, PiecewisePoly>;
    if (shape_ == AlgebraShape::circle) return std::is_same_v<C, TrigPoly>;
    return true;
  }

 private:
  std::string name_;
  AlgebraShape shape_;
  GroupPresentation group_;
  AlphaWitness witness_;
};

using AlgebraRef = std::shared_ptr<const ConvolutionAlgebra>;

/// Finitely supported element h ↦ f_h with C-valued coefficients.
template <class C>
class Element {
 public:
  using coefficient_type = C;

  explicit Element(AlgebraRef algebra) : alg_(std::move(algebra)) {
    if (!alg_) throw Error("invalid-element", "element without an algebra");
    if (!alg_->template accepts<C>())
      throw Error("mixed-coefficient-kind", std::string(C::kind_name) + " coefficients do not fit " + alg_->name());
  }

  Element(AlgebraRef algebra, std::vector<std::pair<AffineElement, C>> terms) : Element(std::move(algebra)) {
    for (auto& [h, c] : terms) add_term(h, c);
  }

  const AlgebraRef& algebra() const noexcept { return alg_; }
  const std::map<AffineElement, C>& support() const noexcept { return supp_; }
  std::size_t size() const noexcept { return supp_.size(); }
  bool is_zero() const noexcept { return supp_.empty(); }

  std::set<AffineElement> labels() const {
    std::set<AffineElement> out;
    for (const auto& [h, c] : supp_) out.insert(h);
    return out;
  }

  /// Coefficient at h (zero when h is outside the support).
  C at(const AffineElement& h) const {
    auto it = supp_.find(alg_->canonical(h));
    return it == supp_.end() ? C{} : it->second;
  }

  void add_term(const AffineElement& h, const C& c) {
    auto key = alg_->normalize(h);
    auto it = supp_.find(key);
    C v = it == supp_.end() ? c : it->second.plus(c, alg_->witness());
    if (v.is_zero()) {
      if (it != supp_.end()) supp_.erase(it);
    } else {
      supp_.insert_or_assign(key, std::move(v));
    }
  }

  Element plus(const Element& o) const {
    require_same(o);
    Element r = *this;
    for (const auto& [h, c] : o.supp_) r.add_term(h, c);
    return r;
  }

  Element minus(const Element& o) const { return plus(o.scaled(-1.0)); }

  Element scaled(Complex s) const {
    Element r(alg_);
    for (const auto& [h, c] : supp_) r.add_term(h, c.scaled(s));
    return r;
  }

  void require_same(const Element& o) const {
    if (alg_ != o.alg_ && alg_->name() != o.alg_->name())
      throw Error("mixed-algebra", "elements of " + alg_->name() + " and " + o.alg_->name());
  }

 private:
  AlgebraRef alg_;
  std::map<AffineElement, C> supp_;
};

/// max over labels of the coefficient distance bound; support differences count.
template <class C>
double distance(const Element<C>& f, const Element<C>& g) {
  f.require_same(g);
  const auto& w = f.algebra()->witness();
  double d = 0.0;
  for (const auto& [h, c] : f.support()) d = std::max(d, c.minus(g.at(h), w).norm_bound(w));
  for (const auto& [h, c] : g.support())
    if (!f.support().contains(h)) d = std::max(d, c.norm_bound(w));
  return d;
}

namespace detail {

inline const ChartId& algebra_chart() {
  static const ChartId id = "X";
  return id;
}

template <class C>
std::set<AffineElement> product_labels(const Element<C>& f, const Element<C>& g) {
  std::set<AffineElement> out;
  for (const auto& [a, fa] : f.support())
    for (const auto& [k, gk] : g.support()) out.insert(f.algebra()->normalize(affine_compose(a, k)));
  return out;
}

}  // namespace detail

/// f*g(γ) = Σ_{β ∈ G^x} f(β·γ) g(β⁻¹), summed over the finite support of g.
///
/// β⁻¹ = (x, k) runs over the arrows out of x labelled by supp g; β·γ is then
/// the arrow (k(x), c∘k⁻¹), read off by composing arrows, and its coefficient
/// is f_{c∘k⁻¹} pulled back along k.
template <class C>
Element<C> convolve_general(const Element<C>& f, const Element<C>& g) {
  f.require_same(g);
  const auto& alg = *f.algebra();
  const auto& w = alg.witness();
  Element<C> out(f.algebra());
  const NebulaPoint base{detail::algebra_chart(), {QAlpha(0)}};
  for (const auto& c : detail::product_labels(f, g)) {
    const Arrow gamma{base, c, detail::algebra_chart()};
    C acc{};
    for (const auto& [k, gk] : g.support()) {
      const Arrow beta_inv{base, k, detail::algebra_chart()};
      const Arrow beta = arrow_invert(beta_inv);
      const Arrow beta_gamma = arrow_compose(beta, gamma);
      auto it = f.support().find(alg.normalize(beta_gamma.map));
      if (it == f.support().end()) continue;
      acc = acc.plus(it->second.pullback(beta_inv.map, w).times(gk, w), w);
    }
    out.add_term(c, acc);
  }
  return out;
}

/// (f*g)_r(x) = Σ_s f_{r−s}(x+s) g_s(x) on ℝ, and the same with rotations
/// and labels mod 1 on ℝ/ℤ.
template <class C>
Element<C> convolve_closed_form(const Element<C>& f, const Element<C>& g) {
  f.require_same(g);
  const auto& alg = *f.algebra();
  if (alg.shape() == AlgebraShape::general)
    throw Error("unsupported-groupoid-shape", alg.name() + " has no closed-form kernel");
  const auto& w = alg.witness();
  const bool circle = alg.shape() == AlgebraShape::circle;
  std::map<QAlpha, const C*> fs;
  for (const auto& [a, fa] : f.support()) fs.emplace(a.shift()[0], &fa);
  std::set<QAlpha> out_labels;
  for (const auto& [a, fa] : f.support())
    for (const auto& [s, gs] : g.support()) {
      QAlpha r = a.shift()[0] + s.shift()[0];
      out_labels.insert(circle ? r.mod_one() : r);
    }
  Element<C> out(f.algebra());
  for (const auto& r : out_labels) {
    C acc{};
    for (const auto& [s, gs] : g.support()) {
      QAlpha d = r - s.shift()[0];
      auto it = fs.find(circle ? d.mod_one() : d);
      if (it == fs.end()) continue;
      C shifted;
      if constexpr (std::is_same_v<C, TrigPoly>)
        shifted = it->second->rotated(s.shift()[0], w);
      else
        shifted = it->second->translated(s.shift()[0]);
      acc = acc.plus(shifted.times(gs, w), w);
    }
    out.add_term(AffineElement::translation(r), acc);
  }
  return out;
}

/// f*(γ) = conj f(γ⁻¹): the coefficient at h⁻¹ is conj(f_h ∘ h⁻¹).
template <class C>
Element<C> involute(const Element<C>& f) {
  const auto& w = f.algebra()->witness();
  Element<C> out(f.algebra());
  for (const auto& [h, fh] : f.support()) {
    AffineElement inv = affine_invert(h);
    out.add_term(inv, fh.pullback(inv, w).conjugate());
  }
  return out;
}

/// Coefficient-kind-erased element, as read from JSON or the CLI.
using AnyElement = std::variant<Element<PiecewisePoly>, Element<TrigPoly>>;

namespace detail {

template <class F>
AnyElement visit_pair(const AnyElement& a, const AnyElement& b, F&& fn) {
  if (a.index() != b.index()) throw Error("mixed-coefficient-kind", "cannot combine piecewise and trig coefficients");
  return std::visit(
      [&](const auto& x) -> AnyElement {
        using E = std::decay_t<decltype(x)>;
        return fn(x, std::get<E>(b));
      },
      a);
}

}  // namespace detail

inline AnyElement convolve_general(const AnyElement& f, const AnyElement& g) {
  return detail::visit_pair(f, g, [](const auto& x, const auto& y) { return convolve_general(x, y); });
}

inline AnyElement convolve_closed_form(const AnyElement& f, const AnyElement& g) {
  return detail::visit_pair(f, g, [](const auto& x, const auto& y) { return convolve_closed_form(x, y); });
}

inline AnyElement involute(const AnyElement& f) {
  return std::visit([](const auto& x) -> AnyElement { return involute(x); }, f);
}

/// Arrows of a bounded fiber whose label lies in supp f.
template <class C>
std::vector<Arrow> support_on_fiber(const Element<C>& f, const std::vector<Arrow>& fiber) {
  std::vector<Arrow> out;
  for (const auto& a : fiber)
    if (f.support().contains(f.algebra()->normalize(a.map))) out.push_back(a);
  return out;
}

// --- random elements -------------------------------------------------------

namespace sampling {

inline int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Complex complex_normal(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  double re = n(rng);
  return {re, n(rng)};
}

/// Continuous, compactly supported, degree ≤ 8: node interpolation plus
/// bumps t(len − t)·q(t) with deg q ≤ 6.
inline PiecewisePoly random_piecewise(std::mt19937_64& rng, const AlphaWitness& w = AlphaWitness::standard()) {
  QAlpha start(Rational(uniform(rng, -8, 8), 4), Rational(uniform(rng, -1, 1), 4));
  int pieces = uniform(rng, 1, 3);
  std::vector<QAlpha> bp{start};
  for (int i = 0; i < pieces; ++i) bp.push_back(bp.back() + QAlpha(Rational(uniform(rng, 1, 4), 4)));
  std::vector<Complex> node(bp.size(), 0.0);
  for (std::size_t i = 1; i + 1 < node.size(); ++i) node[i] = complex_normal(rng);
  std::vector<poly::Poly> ps;
  for (int i = 0; i < pieces; ++i) {
    double len = w.evaluate(bp[i + 1] - bp[i]);
    poly::Poly lin{node[i], (node[i + 1] - node[i]) / len};
    poly::Poly q(static_cast<std::size_t>(uniform(rng, 0, 6)) + 1);
    for (auto& c : q) c = complex_normal(rng);
    ps.push_back(poly::add(lin, poly::mul(poly::Poly{0.0, len, -1.0}, q)));
  }
  return PiecewisePoly(std::move(bp), std::move(ps), w);
}

inline TrigPoly random_trig(std::mt19937_64& rng, int max_mode = 4) {
  std::map<int, Complex> c;
  int terms = uniform(rng, 1, 4);
  for (int i = 0; i < terms; ++i) c[uniform(rng, -max_mode, max_mode)] = complex_normal(rng);
  return TrigPoly(std::move(c));
}

inline AffineElement random_label(std::mt19937_64& rng, const ConvolutionAlgebra& alg) {
  const auto& g = alg.group();
  if (alg.shape() == AlgebraShape::general) {
    auto els = g.enumerate(2);
    return els[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(els.size()) - 1))];
  }
  if (g.kind_name() == "rational_translations")
    return AffineElement::translation(QAlpha(Rational(uniform(rng, -6, 6), uniform(rng, 1, 4))));
  auto els = g.enumerate(3);
  return els[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(els.size()) - 1))];
}

/// Support size 1..max_support with coefficients of the algebra's kind.
template <class C>
Element<C> random_element(std::mt19937_64& rng, const AlgebraRef& alg, int max_support = 5) {
  Element<C> f(alg);
  int n = uniform(rng, 1, max_support);
  for (int i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<C, TrigPoly>)
      f.add_term(random_label(rng, *alg), random_trig(rng));
    else
      f.add_term(random_label(rng, *alg), random_piecewise(rng, alg->witness()));
  }
  return f;
}

}  // namespace sampling

}  // namespace quasifold
