#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "quasifold/error.hpp"
#include "quasifold/qalpha.hpp"
#include "quasifold/rational.hpp"

namespace quasifold {

/// Square rational matrix, row-major.
class RationalMatrix {
 public:
  RationalMatrix() = default;
  explicit RationalMatrix(std::size_t n) : n_(n), a_(n * n, Rational(0)) {}
  RationalMatrix(std::size_t n, std::vector<Rational> entries) : n_(n), a_(std::move(entries)) {
    if (a_.size() != n * n) throw Error("dimension-mismatch", "matrix entry count");
  }

  static RationalMatrix identity(std::size_t n) {
    RationalMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Rational(1);
    return m;
  }
  static RationalMatrix scalar(std::size_t n, Rational s) {
    RationalMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
  }

  std::size_t dim() const noexcept { return n_; }
  Rational& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  bool is_identity() const { return *this == identity(n_); }

  friend RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y) {
    if (x.n_ != y.n_) throw Error("dimension-mismatch", "matrix product");
    RationalMatrix r(x.n_);
    for (std::size_t i = 0; i < x.n_; ++i)
      for (std::size_t k = 0; k < x.n_; ++k) {
        if (x(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < x.n_; ++j) r(i, j) += x(i, k) * y(k, j);
      }
    return r;
  }

  friend QVector operator*(const RationalMatrix& m, const QVector& v) {
    if (m.n_ != v.size()) throw Error("dimension-mismatch", "matrix-vector product");
    QVector r(m.n_);
    for (std::size_t i = 0; i < m.n_; ++i)
      for (std::size_t j = 0; j < m.n_; ++j)
        if (!m(i, j).is_zero()) r[i] += m(i, j) * v[j];
    return r;
  }

  /// Exact determinant by fraction-valued Gaussian elimination.
  Rational determinant() const {
    RationalMatrix m = *this;
    Rational det(1);
    for (std::size_t c = 0; c < n_; ++c) {
      std::size_t piv = c;
      while (piv < n_ && m(piv, c).is_zero()) ++piv;
      if (piv == n_) return Rational(0);
      if (piv != c) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(m(piv, j), m(c, j));
        det = -det;
      }
      det *= m(c, c);
      for (std::size_t r = c + 1; r < n_; ++r) {
        if (m(r, c).is_zero()) continue;
        Rational f = m(r, c) / m(c, c);
        for (std::size_t j = c; j < n_; ++j) m(r, j) -= f * m(c, j);
      }
    }
    return det;
  }

  /// Gauss-Jordan inverse; throws "singular-matrix".
  RationalMatrix inverse() const {
    RationalMatrix m = *this;
    RationalMatrix inv = identity(n_);
    for (std::size_t c = 0; c < n_; ++c) {
      std::size_t piv = c;
      while (piv < n_ && m(piv, c).is_zero()) ++piv;
      if (piv == n_) throw Error("singular-matrix", "matrix is not invertible");
      if (piv != c)
        for (std::size_t j = 0; j < n_; ++j) {
          std::swap(m(piv, j), m(c, j));
          std::swap(inv(piv, j), inv(c, j));
        }
      Rational d = m(c, c);
      for (std::size_t j = 0; j < n_; ++j) {
        m(c, j) /= d;
        inv(c, j) /= d;
      }
      for (std::size_t r = 0; r < n_; ++r) {
        if (r == c || m(r, c).is_zero()) continue;
        Rational f = m(r, c);
        for (std::size_t j = 0; j < n_; ++j) {
          m(r, j) -= f * m(c, j);
          inv(r, j) -= f * inv(c, j);
        }
      }
    }
    return inv;
  }

  friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;
  friend std::strong_ordering operator<=>(const RationalMatrix& x, const RationalMatrix& y) {
    if (auto c = x.n_ <=> y.n_; c != 0) return c;
    for (std::size_t i = 0; i < x.a_.size(); ++i)
      if (auto c = x.a_[i] <=> y.a_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Rational> a_;
};

/// Exact affine map X ↦ AX + b with A rational invertible and b ∈ (ℚ + ℚα)ⁿ.
class AffineElement {
 public:
  AffineElement() = default;
  AffineElement(RationalMatrix a, QVector b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_.dim() != b_.size()) throw Error("dimension-mismatch", "affine element matrix/vector sizes");
    if (a_.determinant().is_zero()) throw Error("singular-matrix", "affine element with det(A) = 0");
  }

  static AffineElement identity(std::size_t n) { return {RationalMatrix::identity(n), QVector(n)}; }
  static AffineElement translation(QVector t) {
    auto n = t.size();
    return {RationalMatrix::identity(n), std::move(t)};
  }
  static AffineElement translation(QAlpha t) { return translation(QVector{std::move(t)}); }
  /// One-dimensional x ↦ a·x + b.
  static AffineElement line(Rational a, QAlpha b) { return {RationalMatrix(1, {a}), QVector{std::move(b)}}; }

  std::size_t dim() const noexcept { return b_.size(); }
  const RationalMatrix& linear() const noexcept { return a_; }
  const QVector& shift() const noexcept { return b_; }

  bool is_identity() const {
    return a_.is_identity() && std::all_of(b_.begin(), b_.end(), [](const QAlpha& c) { return c.is_zero(); });
  }
  bool is_translation() const { return a_.is_identity(); }

  friend bool operator==(const AffineElement&, const AffineElement&) = default;
  friend std::strong_ordering operator<=>(const AffineElement& x, const AffineElement& y) {
    if (auto c = x.a_ <=> y.a_; c != 0) return c;
    return std::lexicographical_compare_three_way(x.b_.begin(), x.b_.end(), y.b_.begin(), y.b_.end());
  }

  std::string str() const {
    std::string s = "[A=";
    for (std::size_t i = 0; i < a_.dim(); ++i) {
      s += i ? ";" : "";
      for (std::size_t j = 0; j < a_.dim(); ++j) s += (j ? "," : "") + a_(i, j).str();
    }
    return s + " b=" + to_string(b_) + "]";
  }

 private:
  RationalMatrix a_;
  QVector b_;
};

/// (A, b)∘(A', b') = (AA', Ab' + b): apply h first, then g.
inline AffineElement affine_compose(const AffineElement& g, const AffineElement& h) {
  if (g.dim() != h.dim()) throw Error("dimension-mismatch", "affine compose");
  return {g.linear() * h.linear(), g.linear() * h.shift() + g.shift()};
}

/// (A, b)⁻¹ = (A⁻¹, −A⁻¹b).
inline AffineElement affine_invert(const AffineElement& g) {
  RationalMatrix inv = g.linear().inverse();
  QVector nb = inv * g.shift();
  for (auto& c : nb) c = -c;
  return {std::move(inv), std::move(nb)};
}

inline QVector affine_apply(const AffineElement& g, const QVector& x) {
  if (g.dim() != x.size()) throw Error("dimension-mismatch", "affine apply");
  return g.linear() * x + g.shift();
}

}  // namespace quasifold
