#pragma once

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <cmath>
#include <compare>
#include <string>

#include "quasifold/error.hpp"
#include "quasifold/qalpha.hpp"

namespace quasifold {

/// Numeric stand-in for the formal irrational α.
///
/// Only ever used to order values or to evaluate them numerically; exact
/// equality of QAlpha never consults it. The value is held to `digits`
/// decimal digits, so any evaluation p + q·α̂ carries an error of at most
/// |q|·10^-digits.
class AlphaWitness {
 public:
  using big_float = boost::multiprecision::cpp_dec_float_100;

  /// Golden-ratio conjugate (√5 − 1)/2 to 50 digits.
  AlphaWitness() : AlphaWitness(golden_digits(), 1e-40) {}

  AlphaWitness(const std::string& decimal, double safety_margin)
      : value_(parse_decimal(decimal)),
        digits_(count_digits(decimal)),
        margin_(safety_margin),
        alpha_double_(value_.convert_to<double>()) {
    if (!(margin_ > 0.0)) throw Error("invalid-witness", "safety margin must be positive");
    if (std::log10(margin_) <= -static_cast<double>(digits_))
      throw Error("invalid-witness", "witness precision does not exceed the safety margin");
    if (value_ <= 0 && value_ >= 0) throw Error("invalid-witness", "α witness must be nonzero");
  }

  static const AlphaWitness& standard() {
    static const AlphaWitness w;
    return w;
  }

  static std::string golden_digits() { return "0.61803398874989484820458683436563811772030917980576"; }

  const big_float& value() const noexcept { return value_; }
  int digits() const noexcept { return digits_; }
  double safety_margin() const noexcept { return margin_; }
  double to_double() const noexcept { return alpha_double_; }

  big_float evaluate_big(const QAlpha& x) const {
    return rat(x.rational_part()) + rat(x.alpha_part()) * value_;
  }

  double evaluate(const QAlpha& x) const {
    return x.rational_part().to_double() + x.alpha_part().to_double() * to_double();
  }

  /// Fractional part of the value of x, in [0, 1), rounded to double after
  /// reduction so large integer parts cost no precision.
  double fractional(const QAlpha& x) const {
    big_float v = evaluate_big(x);
    v -= floor(v);
    return v.convert_to<double>();
  }

  /// Real-value ordering of x and y. Throws "precision-insufficient" when the
  /// difference is too close to zero to be ordered reliably.
  std::strong_ordering compare(const QAlpha& x, const QAlpha& y) const {
    if (x == y) return std::strong_ordering::equal;
    QAlpha d = x - y;
    if (d.is_rational()) return d.rational_part() <=> Rational(0);
    // Double evaluation is off by far less than 1e-9·scale; beyond that the
    // sign is certain.
    const double p = d.rational_part().to_double(), q = d.alpha_part().to_double();
    const double approx = p + q * alpha_double_;
    const double guard_fast = std::max({1e-9 * (1.0 + std::abs(p) + std::abs(q)), margin_,
                                        4.0 * std::abs(q) * std::pow(10.0, -digits_)});
    if (std::abs(approx) > guard_fast)
      return approx > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
    big_float v = evaluate_big(d);
    big_float err = abs(rat(d.alpha_part())) * pow(big_float(10), -digits_);
    big_float guard = big_float(margin_) > 2 * err ? big_float(margin_) : big_float(2 * err);
    if (abs(v) <= guard)
      throw Error("precision-insufficient",
                  "cannot order " + x.str() + " and " + y.str() + " at the configured witness precision");
    return v > 0 ? std::strong_ordering::greater : std::strong_ordering::less;
  }

  bool less(const QAlpha& x, const QAlpha& y) const { return compare(x, y) < 0; }

 private:
  static big_float rat(const Rational& r) { return big_float(r.num()) / big_float(r.den()); }

  static big_float parse_decimal(const std::string& s) {
    try {
      return big_float(s);
    } catch (const std::exception&) {
      throw Error("invalid-witness", "malformed decimal '" + s + "'");
    }
  }

  static int count_digits(const std::string& s) {
    auto dot = s.find('.');
    if (dot == std::string::npos) return 0;
    int n = 0;
    for (std::size_t i = dot + 1; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) ++n;
    return n;
  }

  big_float value_;
  int digits_;
  double margin_;
  double alpha_double_;
};

/// Real-value ordering under the standard witness.
inline std::strong_ordering compare(const QAlpha& x, const QAlpha& y,
                                    const AlphaWitness& w = AlphaWitness::standard()) {
  return w.compare(x, y);
}

}  // namespace quasifold
