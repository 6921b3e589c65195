#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "quasifold/error.hpp"
#include "quasifold/rational.hpp"

namespace quasifold {

/// Exact element p + q·α of ℚ + ℚα, α a formal irrational.
///
/// Only addition and rational scaling are provided, so the ring is never
/// asked to form α². Because α is irrational, p + qα = 0 iff p = q = 0 and
/// equality is decided on coefficients alone.
///
/// operator<=> is a *structural* (lexicographic on coefficients) order used
/// for deterministic containers; the order of real values needs an
/// AlphaWitness, see compare().
class QAlpha {
 public:
  QAlpha() = default;
  QAlpha(Rational p) : p_(p) {}  // NOLINT: implicit from rationals
  QAlpha(Rational::int_type p) : p_(p) {}  // NOLINT: implicit from integers
  QAlpha(Rational p, Rational q) : p_(p), q_(q) {}

  static QAlpha alpha() { return QAlpha(Rational(0), Rational(1)); }

  const Rational& rational_part() const noexcept { return p_; }
  const Rational& alpha_part() const noexcept { return q_; }

  bool is_zero() const noexcept { return p_.is_zero() && q_.is_zero(); }
  bool is_rational() const noexcept { return q_.is_zero(); }

  friend QAlpha operator+(const QAlpha& a, const QAlpha& b) { return {a.p_ + b.p_, a.q_ + b.q_}; }
  friend QAlpha operator-(const QAlpha& a, const QAlpha& b) { return {a.p_ - b.p_, a.q_ - b.q_}; }
  QAlpha operator-() const { return {-p_, -q_}; }
  friend QAlpha operator*(const Rational& r, const QAlpha& x) { return {r * x.p_, r * x.q_}; }
  friend QAlpha operator*(const QAlpha& x, const Rational& r) { return r * x; }
  QAlpha& operator+=(const QAlpha& o) { return *this = *this + o; }
  QAlpha& operator-=(const QAlpha& o) { return *this = *this - o; }

  friend bool operator==(const QAlpha&, const QAlpha&) = default;
  friend std::strong_ordering operator<=>(const QAlpha& a, const QAlpha& b) {
    if (auto c = a.p_ <=> b.p_; c != 0) return c;
    return a.q_ <=> b.q_;
  }

  /// Same class in ℝ/ℤ: rational part reduced into [0, 1).
  QAlpha mod_one() const { return {p_.frac(), q_}; }

  /// Canonical text "p/q+α*r/s"; parse(str()) == *this.
  std::string str() const { return p_.str() + "+α*" + q_.str(); }

  /// Accepts the canonical form and the looser spellings "3", "1/2",
  /// "α", "-α/2", "2-3α", "1+2*alpha", "α*1/3".
  static QAlpha parse(std::string_view text) {
    std::string s;
    for (char c : text)
      if (c != ' ') s.push_back(c);
    if (s.empty()) throw Error("parse-error", "empty QAlpha literal");
    // Normalise the α symbol to a single byte marker.
    std::string norm;
    for (std::size_t i = 0; i < s.size();) {
      if (s.compare(i, 2, "\xCE\xB1") == 0) {
        norm.push_back('@');
        i += 2;
      } else if (s.compare(i, 5, "alpha") == 0) {
        norm.push_back('@');
        i += 5;
      } else {
        norm.push_back(s[i]);
        ++i;
      }
    }
    // Split into signed terms; a sign directly after '*' or '/' belongs to a number.
    std::vector<std::string> terms;
    std::string cur;
    for (std::size_t i = 0; i < norm.size(); ++i) {
      char c = norm[i];
      bool sign = (c == '+' || c == '-');
      bool attached = i == 0 || norm[i - 1] == '*' || norm[i - 1] == '/';
      if (sign && !attached) {
        if (!cur.empty()) terms.push_back(cur);
        cur.clear();
        if (c == '-') cur.push_back('-');
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) terms.push_back(cur);
    if (terms.empty() || terms.size() > 2) throw Error("parse-error", "malformed QAlpha '" + std::string(text) + "'");

    Rational p, q;
    bool seen_p = false, seen_q = false;
    for (std::string t : terms) {
      auto at = t.find('@');
      if (at == std::string::npos) {
        if (seen_p) throw Error("parse-error", "two rational terms in '" + std::string(text) + "'");
        p = Rational::parse(t);
        seen_p = true;
        continue;
      }
      if (seen_q) throw Error("parse-error", "two α terms in '" + std::string(text) + "'");
      seen_q = true;
      // Forms: [-]@, [-]@*r, [-]@/d, r*@, r@, -@*r
      bool neg = false;
      if (!t.empty() && t[0] == '-' && at == 1) {
        neg = true;
        t.erase(0, 1);
        at = 0;
      }
      std::string before = t.substr(0, at);
      std::string after = t.substr(at + 1);
      Rational coeff(1);
      if (!before.empty()) {
        if (before.back() == '*') before.pop_back();
        coeff = before == "-" ? Rational(-1) : Rational::parse(before);
        if (!after.empty()) {
          if (after[0] != '/') throw Error("parse-error", "malformed α term in '" + std::string(text) + "'");
          coeff = coeff / Rational::parse(after.substr(1));
        }
      } else if (!after.empty()) {
        if (after[0] == '*')
          coeff = Rational::parse(after.substr(1));
        else if (after[0] == '/')
          coeff = Rational(1) / Rational::parse(after.substr(1));
        else
          throw Error("parse-error", "malformed α term in '" + std::string(text) + "'");
      }
      q = neg ? -coeff : coeff;
    }
    return {p, q};
  }

  friend std::ostream& operator<<(std::ostream& os, const QAlpha& x) { return os << x.str(); }

 private:
  Rational p_{0};
  Rational q_{0};
};

using QVector = std::vector<QAlpha>;

inline QVector operator+(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) throw Error("dimension-mismatch", "vector sum");
  QVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline QVector operator-(const QVector& a, const QVector& b) {
  if (a.size() != b.size()) throw Error("dimension-mismatch", "vector difference");
  QVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline std::string to_string(const QVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i].str();
  }
  return s + ")";
}

}  // namespace quasifold

template <>
struct std::hash<quasifold::QAlpha> {
  std::size_t operator()(const quasifold::QAlpha& x) const noexcept {
    std::hash<quasifold::Rational> h;
    return h(x.rational_part()) * 31u ^ h(x.alpha_part());
  }
};
