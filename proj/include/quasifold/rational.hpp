#pragma once

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>

#include "quasifold/error.hpp"

namespace quasifold {

/// Reduced fraction with 64-bit numerator/denominator. Intermediate products
/// are formed in 128 bits; a result that does not fit throws "overflow".
class Rational {
 public:
  using int_type = std::int64_t;

  constexpr Rational() = default;
  constexpr Rational(int_type n) : num_(n), den_(1) {}  // NOLINT: implicit from integers
  Rational(int_type n, int_type d) { assign(n, d); }

  int_type num() const noexcept { return num_; }
  int_type den() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_ == 0; }
  bool is_integer() const noexcept { return den_ == 1; }

  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
    __int128 d = static_cast<__int128>(a.den_) * b.den_;
    return from_wide(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from_wide(static_cast<__int128>(a.num_) * b.num_,
                     static_cast<__int128>(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw Error("division-by-zero", "rational division by zero");
    return from_wide(static_cast<__int128>(a.num_) * b.den_,
                     static_cast<__int128>(a.den_) * b.num_);
  }
  Rational operator-() const {
    if (num_ == std::numeric_limits<int_type>::min()) throw Error("overflow", "rational negation");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    __int128 l = static_cast<__int128>(a.num_) * b.den_;
    __int128 r = static_cast<__int128>(b.num_) * a.den_;
    return l <=> r;
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

  /// Largest integer not exceeding the value.
  int_type floor() const noexcept {
    int_type q = num_ / den_;
    if (num_ % den_ != 0 && num_ < 0) --q;
    return q;
  }

  /// Representative of the class modulo 1, in [0, 1).
  Rational frac() const { return *this - Rational(floor()); }

  /// Canonical text "p/q"; the denominator is always written.
  std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

  /// Accepts "p/q" or a bare integer "p".
  static Rational parse(std::string_view s) {
    auto trim = [](std::string_view v) {
      while (!v.empty() && (v.front() == ' ')) v.remove_prefix(1);
      while (!v.empty() && (v.back() == ' ')) v.remove_suffix(1);
      return v;
    };
    s = trim(s);
    if (s.empty()) throw Error("parse-error", "empty rational");
    auto slash = s.find('/');
    auto to_int = [&](std::string_view v) -> int_type {
      v = trim(v);
      std::string t(v);
      if (t.empty()) throw Error("parse-error", "malformed rational '" + std::string(s) + "'");
      std::size_t pos = 0;
      long long value = 0;
      try {
        value = std::stoll(t, &pos);
      } catch (const std::exception&) {
        throw Error("parse-error", "malformed rational '" + std::string(s) + "'");
      }
      if (pos != t.size()) throw Error("parse-error", "malformed rational '" + std::string(s) + "'");
      return value;
    };
    if (slash == std::string_view::npos) return Rational(to_int(s));
    return Rational(to_int(s.substr(0, slash)), to_int(s.substr(slash + 1)));
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void assign(__int128 n, __int128 d) {
    if (d == 0) throw Error("division-by-zero", "zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 lo = std::numeric_limits<int_type>::min() + 1;
    constexpr __int128 hi = std::numeric_limits<int_type>::max();
    if (n < lo || n > hi || d > hi) throw Error("overflow", "rational out of 64-bit range");
    num_ = static_cast<int_type>(n);
    den_ = static_cast<int_type>(d);
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  static Rational from_wide(__int128 n, __int128 d) {
    Rational r;
    r.assign(n, d);
    return r;
  }

  int_type num_ = 0;
  int_type den_ = 1;
};

}  // namespace quasifold

template <>
struct std::hash<quasifold::Rational> {
  std::size_t operator()(const quasifold::Rational& r) const noexcept {
    return std::hash<std::int64_t>{}(r.num()) * 1000003u ^ std::hash<std::int64_t>{}(r.den());
  }
};
