#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>

#include "quasifold/affine.hpp"
#include "quasifold/alpha_witness.hpp"
#include "quasifold/error.hpp"
#include "quasifold/piecewise_poly.hpp"

namespace quasifold {

/// e^{2πi·θ}, with θ reduced mod 1 in extended precision first.
inline Complex unit_phase(const QAlpha& theta, const AlphaWitness& w = AlphaWitness::standard()) {
  return std::polar(1.0, 2.0 * std::numbers::pi * w.fractional(theta));
}

/// Trigonometric polynomial Σ c_k e^{2πikx} on ℝ/ℤ.
class TrigPoly {
 public:
  static constexpr const char* kind_name = "trig";

  TrigPoly() = default;
  explicit TrigPoly(std::map<int, Complex> coeffs) : c_(std::move(coeffs)) { prune(); }

  static TrigPoly constant(Complex c) { return TrigPoly({{0, c}}); }
  static TrigPoly mode(int k, Complex c = 1.0) { return TrigPoly({{k, c}}); }

  const std::map<int, Complex>& coefficients() const noexcept { return c_; }
  bool is_zero() const noexcept { return c_.empty(); }

  Complex coefficient(int k) const {
    auto it = c_.find(k);
    return it == c_.end() ? Complex(0.0) : it->second;
  }

  int degree() const {
    int d = 0;
    for (const auto& [k, c] : c_) d = std::max(d, std::abs(k));
    return d;
  }

  Complex evaluate(double x, const AlphaWitness& = AlphaWitness::standard()) const {
    Complex s = 0.0;
    for (const auto& [k, c] : c_) s += c * std::polar(1.0, 2.0 * std::numbers::pi * k * x);
    return s;
  }

  Complex evaluate(const QAlpha& x, const AlphaWitness& w = AlphaWitness::standard()) const {
    Complex s = 0.0;
    for (const auto& [k, c] : c_) s += c * unit_phase(Rational(k) * x, w);
    return s;
  }

  /// x ↦ f(x + θ).
  TrigPoly rotated(const QAlpha& theta, const AlphaWitness& w = AlphaWitness::standard()) const {
    TrigPoly r;
    for (const auto& [k, c] : c_) r.c_[k] = c * unit_phase(Rational(k) * theta, w);
    r.prune();
    return r;
  }

  /// x ↦ f(±x + b); only the isometries of the circle are allowed.
  TrigPoly pullback(const AffineElement& g, const AlphaWitness& w = AlphaWitness::standard()) const {
    if (g.dim() != 1) throw Error("dimension-mismatch", "trig pullback needs a 1-D map");
    const Rational a = g.linear()(0, 0);
    if (a != Rational(1) && a != Rational(-1))
      throw Error("unsupported-groupoid-shape", "circle maps must be x -> ±x + b");
    TrigPoly r = rotated(g.shift()[0], w);
    if (a == Rational(-1)) {
      std::map<int, Complex> flipped;
      for (const auto& [k, c] : r.c_) flipped[-k] = c;
      r.c_ = std::move(flipped);
    }
    return r;
  }

  TrigPoly conjugate() const {
    TrigPoly r;
    for (const auto& [k, c] : c_) r.c_[-k] = std::conj(c);
    return r;
  }

  TrigPoly scaled(Complex s) const {
    TrigPoly r = *this;
    for (auto& [k, c] : r.c_) c *= s;
    r.prune();
    return r;
  }

  TrigPoly plus(const TrigPoly& o, const AlphaWitness& = AlphaWitness::standard()) const {
    TrigPoly r = *this;
    for (const auto& [k, c] : o.c_) r.c_[k] += c;
    r.prune();
    return r;
  }

  TrigPoly minus(const TrigPoly& o, const AlphaWitness& w = AlphaWitness::standard()) const {
    return plus(o.scaled(-1.0), w);
  }

  TrigPoly times(const TrigPoly& o, const AlphaWitness& = AlphaWitness::standard()) const {
    TrigPoly r;
    for (const auto& [k, a] : c_)
      for (const auto& [j, b] : o.c_) r.c_[k + j] += a * b;
    r.prune();
    return r;
  }

  /// Σ|c_k|, an upper bound for the sup norm.
  double norm_bound(const AlphaWitness& = AlphaWitness::standard()) const {
    double s = 0.0;
    for (const auto& [k, c] : c_) s += std::abs(c);
    return s;
  }

  friend bool operator==(const TrigPoly&, const TrigPoly&) = default;

 private:
  void prune() { std::erase_if(c_, [](const auto& kv) { return kv.second == Complex(0.0); }); }

  std::map<int, Complex> c_;
};

}  // namespace quasifold
