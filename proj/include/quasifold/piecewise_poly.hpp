#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "quasifold/affine.hpp"
#include "quasifold/alpha_witness.hpp"
#include "quasifold/error.hpp"
#include "quasifold/qalpha.hpp"

namespace quasifold {

using Complex = std::complex<double>;

namespace poly {

using Poly = std::vector<Complex>;

inline void trim(Poly& p) {
  while (!p.empty() && p.back() == Complex(0.0)) p.pop_back();
}

inline Poly add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

inline Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

inline Complex eval(const Poly& p, double t) {
  Complex acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * t + *it;
  return acc;
}

/// t ↦ p(t + d).
inline Poly shift(Poly p, double d) {
  if (d == 0.0 || p.size() < 2) return p;
  const std::size_t n = p.size() - 1;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = n; j-- > i;) p[j] += d * p[j + 1];
  return p;
}

/// t ↦ p(a·t).
inline Poly scale(Poly p, double a) {
  double f = 1.0;
  for (auto& c : p) {
    c *= f;
    f *= a;
  }
  trim(p);
  return p;
}

}  // namespace poly

/// Compactly supported piecewise polynomial ℝ → ℂ with exact breakpoints.
///
/// Piece i lives on [b_i, b_{i+1}] and is stored in the local variable
/// t = x − b_i. Outside [b_0, b_n] the function is zero. Translations move
/// breakpoints exactly; products and sums merge breakpoint lists, ordering
/// them through the α witness.
class PiecewisePoly {
 public:
  using Poly = poly::Poly;
  static constexpr const char* kind_name = "piecewise";

  PiecewisePoly() = default;

  PiecewisePoly(std::vector<QAlpha> breakpoints, std::vector<Poly> pieces,
                const AlphaWitness& w = AlphaWitness::standard())
      : bp_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (bp_.empty() && pieces_.empty()) return;
    if (bp_.size() != pieces_.size() + 1)
      throw Error("invalid-piecewise", "need exactly one more breakpoint than pieces");
    for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
      if (!w.less(bp_[i], bp_[i + 1])) throw Error("invalid-piecewise", "breakpoints must increase strictly");
    normalize();
  }

  static PiecewisePoly constant(const QAlpha& a, const QAlpha& b, Complex c,
                                const AlphaWitness& w = AlphaWitness::standard()) {
    return PiecewisePoly({a, b}, {Poly{c}}, w);
  }

  /// Continuous tent: 0 at a, `height` at m, 0 at b.
  static PiecewisePoly tent(const QAlpha& a, const QAlpha& m, const QAlpha& b, Complex height,
                            const AlphaWitness& w = AlphaWitness::standard()) {
    double l = w.evaluate(m - a), r = w.evaluate(b - m);
    return PiecewisePoly({a, m, b}, {Poly{0.0, height / l}, Poly{height, -height / r}}, w);
  }

  const std::vector<QAlpha>& breakpoints() const noexcept { return bp_; }
  const std::vector<Poly>& pieces() const noexcept { return pieces_; }
  bool is_zero() const noexcept { return pieces_.empty(); }

  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& p : pieces_) d = std::max(d, p.empty() ? std::size_t{0} : p.size() - 1);
    return d;
  }

  Complex evaluate(double x, const AlphaWitness& w = AlphaWitness::standard()) const {
    if (is_zero()) return 0.0;
    std::vector<double> b(bp_.size());
    for (std::size_t i = 0; i < bp_.size(); ++i) b[i] = w.evaluate(bp_[i]);
    if (x < b.front() || x > b.back()) return 0.0;
    auto k = static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), x) - b.begin());
    k = std::min(k == 0 ? 0 : k - 1, pieces_.size() - 1);
    return poly::eval(pieces_[k], x - b[k]);
  }

  Complex evaluate(const QAlpha& x, const AlphaWitness& w = AlphaWitness::standard()) const {
    if (is_zero() || w.less(x, bp_.front()) || w.less(bp_.back(), x)) return 0.0;
    std::size_t k = 0;
    while (k + 1 < pieces_.size() && !w.less(x, bp_[k + 1])) ++k;
    return poly::eval(pieces_[k], w.evaluate(x - bp_[k]));
  }

  /// x ↦ f(x + s); breakpoints move by −s exactly.
  PiecewisePoly translated(const QAlpha& s) const {
    PiecewisePoly r = *this;
    for (auto& b : r.bp_) b -= s;
    return r;
  }

  /// x ↦ f(g(x)) for a one-dimensional affine g.
  PiecewisePoly pullback(const AffineElement& g, const AlphaWitness& w = AlphaWitness::standard()) const {
    if (g.dim() != 1) throw Error("dimension-mismatch", "piecewise pullback needs a 1-D map");
    if (g.is_translation()) return translated(g.shift()[0]);
    if (is_zero()) return {};
    const Rational a = g.linear()(0, 0);
    const QAlpha& b = g.shift()[0];
    const Rational inv = Rational(1) / a;
    PiecewisePoly r;
    const std::size_t n = pieces_.size();
    if (a > Rational(0)) {
      for (const auto& x : bp_) r.bp_.push_back(inv * (x - b));
      for (const auto& p : pieces_) r.pieces_.push_back(poly::scale(p, a.to_double()));
    } else {
      for (std::size_t i = bp_.size(); i-- > 0;) r.bp_.push_back(inv * (bp_[i] - b));
      for (std::size_t i = n; i-- > 0;) {
        double len = w.evaluate(bp_[i + 1] - bp_[i]);
        r.pieces_.push_back(poly::scale(poly::shift(pieces_[i], len), a.to_double()));
      }
    }
    r.normalize();
    return r;
  }

  PiecewisePoly conjugate() const {
    PiecewisePoly r = *this;
    for (auto& p : r.pieces_)
      for (auto& c : p) c = std::conj(c);
    return r;
  }

  PiecewisePoly scaled(Complex s) const {
    if (s == Complex(0.0)) return {};
    PiecewisePoly r = *this;
    for (auto& p : r.pieces_)
      for (auto& c : p) c *= s;
    r.normalize();
    return r;
  }

  PiecewisePoly plus(const PiecewisePoly& o, const AlphaWitness& w = AlphaWitness::standard()) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    auto grid = merge(bp_, o.bp_, w);
    auto a = on_grid(grid, w), b = o.on_grid(grid, w);
    PiecewisePoly r;
    r.bp_ = std::move(grid);
    for (std::size_t i = 0; i < a.size(); ++i) r.pieces_.push_back(poly::add(a[i], b[i]));
    r.normalize();
    return r;
  }

  PiecewisePoly minus(const PiecewisePoly& o, const AlphaWitness& w = AlphaWitness::standard()) const {
    return plus(o.scaled(-1.0), w);
  }

  PiecewisePoly times(const PiecewisePoly& o, const AlphaWitness& w = AlphaWitness::standard()) const {
    if (is_zero() || o.is_zero()) return {};
    const QAlpha& lo = w.less(bp_.front(), o.bp_.front()) ? o.bp_.front() : bp_.front();
    const QAlpha& hi = w.less(bp_.back(), o.bp_.back()) ? bp_.back() : o.bp_.back();
    if (!w.less(lo, hi)) return {};
    std::vector<QAlpha> grid;
    for (const auto& x : merge(bp_, o.bp_, w))
      if (!w.less(x, lo) && !w.less(hi, x)) grid.push_back(x);
    auto a = on_grid(grid, w), b = o.on_grid(grid, w);
    PiecewisePoly r;
    r.bp_ = std::move(grid);
    for (std::size_t i = 0; i < a.size(); ++i) r.pieces_.push_back(poly::mul(a[i], b[i]));
    r.normalize();
    return r;
  }

  /// max over pieces of Σ|c_k|·len^k, an upper bound for the sup norm.
  double norm_bound(const AlphaWitness& w = AlphaWitness::standard()) const {
    double m = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      double len = w.evaluate(bp_[i + 1] - bp_[i]), f = 1.0, s = 0.0;
      for (const auto& c : pieces_[i]) {
        s += std::abs(c) * f;
        f *= len;
      }
      m = std::max(m, s);
    }
    return m;
  }

  /// Largest jump between adjacent pieces at interior breakpoints.
  double max_interior_jump(const AlphaWitness& w = AlphaWitness::standard()) const {
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      double len = w.evaluate(bp_[i + 1] - bp_[i]);
      m = std::max(m, std::abs(poly::eval(pieces_[i], len) - poly::eval(pieces_[i + 1], 0.0)));
    }
    return m;
  }

  friend bool operator==(const PiecewisePoly&, const PiecewisePoly&) = default;

 private:
  void normalize() {
    for (auto& p : pieces_) poly::trim(p);
    std::size_t first = 0, last = pieces_.size();
    while (first < last && pieces_[first].empty()) ++first;
    while (last > first && pieces_[last - 1].empty()) --last;
    if (first == last) {
      bp_.clear();
      pieces_.clear();
      return;
    }
    pieces_ = std::vector<Poly>(pieces_.begin() + static_cast<std::ptrdiff_t>(first),
                                pieces_.begin() + static_cast<std::ptrdiff_t>(last));
    bp_ = std::vector<QAlpha>(bp_.begin() + static_cast<std::ptrdiff_t>(first),
                              bp_.begin() + static_cast<std::ptrdiff_t>(last + 1));
  }

  static std::vector<QAlpha> merge(const std::vector<QAlpha>& a, const std::vector<QAlpha>& b,
                                   const AlphaWitness& w) {
    std::vector<QAlpha> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      const QAlpha* next;
      if (j == b.size() || (i < a.size() && !w.less(b[j], a[i])))
        next = &a[i++];
      else
        next = &b[j++];
      if (out.empty() || !(out.back() == *next)) out.push_back(*next);
    }
    return out;
  }

  /// Pieces re-expanded on a refinement of the breakpoint list.
  std::vector<Poly> on_grid(const std::vector<QAlpha>& grid, const AlphaWitness& w) const {
    std::vector<Poly> out(grid.size() > 0 ? grid.size() - 1 : 0);
    if (is_zero()) return out;
    std::size_t j = 0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      if (w.less(grid[k], bp_.front()) || !w.less(grid[k], bp_.back())) continue;
      while (j + 1 < pieces_.size() && !w.less(grid[k], bp_[j + 1])) ++j;
      out[k] = poly::shift(pieces_[j], w.evaluate(grid[k] - bp_[j]));
    }
    return out;
  }

  std::vector<QAlpha> bp_;
  std::vector<Poly> pieces_;
};

}  // namespace quasifold
