#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "quasifold/algebra.hpp"
#include "quasifold/rotation_algebra.hpp"

namespace quasifold {

enum class CheckStatus { pass, fail, inconclusive };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::inconclusive:
      return "inconclusive";
  }
  return "?";
}

/// One named check over a batch of instances.
struct CheckResult {
  CheckResult() = default;
  explicit CheckResult(std::string n) : name(std::move(n)) {}

  std::string name;
  CheckStatus status = CheckStatus::pass;
  std::size_t instances = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> counterexamples;  // at most `max_counterexamples`

  static constexpr std::size_t max_counterexamples = 5;

  /// Records one measured error against the tolerance.
  void record(double err, const std::string& what = {}) {
    ++instances;
    max_error = std::max(max_error, err);
    if (!(err <= tolerance)) fail(what.empty() ? "error " + std::to_string(err) : what);
  }

  void fail(const std::string& what) {
    status = CheckStatus::fail;
    if (counterexamples.size() < max_counterexamples) counterexamples.push_back(what);
  }
};

inline CheckStatus overall(const std::vector<CheckResult>& checks) {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (c.status == CheckStatus::fail) return CheckStatus::fail;
    inconclusive = inconclusive || c.status == CheckStatus::inconclusive;
  }
  return inconclusive ? CheckStatus::inconclusive : CheckStatus::pass;
}

namespace sampling {

/// Random element of the S_ℚ algebra supported in U_p = {0, 1/p, ..., (p−1)/p}.
inline Element<TrigPoly> random_up_element(std::mt19937_64& rng, int p) {
  Element<TrigPoly> f(ConvolutionAlgebra::circle_rationals());
  int n = uniform(rng, 1, std::min(p, 5));
  for (int i = 0; i < n; ++i)
    f.add_term(AffineElement::translation(QAlpha(Rational(uniform(rng, 0, p - 1), p))), random_trig(rng));
  return f;
}

}  // namespace sampling

/// Convolution consistency and *-algebra axioms on `trials` random triples.
inline std::vector<CheckResult> algebra_checks(const AlgebraRef& alg, int trials, std::mt19937_64& rng,
                                               double tol = 1e-9, double consistency_tol = 1e-12) {
  auto run = [&](auto tag) {
    using C = typename decltype(tag)::type;
    const std::string prefix = alg->name() + ": ";
    CheckResult closed{prefix + "closed-form-matches-general"}, assoc{prefix + "associativity"},
        bilinear{prefix + "bilinearity"}, anti{prefix + "involution-reverses-products"},
        invol{prefix + "involution-is-involutive"}, conj{prefix + "involution-is-antilinear"};
    closed.tolerance = consistency_tol;
    for (auto* c : {&assoc, &bilinear, &anti, &invol, &conj}) c->tolerance = tol;
    const bool has_closed_form = alg->shape() != AlgebraShape::general;
    for (int i = 0; i < trials; ++i) {
      auto f = sampling::random_element<C>(rng, alg), g = sampling::random_element<C>(rng, alg),
           h = sampling::random_element<C>(rng, alg);
      Complex lam = sampling::complex_normal(rng);
      auto fg = convolve_general(f, g);
      if (has_closed_form) {
        auto cf = convolve_closed_form(f, g);
        if (cf.labels() != fg.labels())
          closed.fail("support sets differ at trial " + std::to_string(i));
        else
          closed.record(distance(cf, fg));
      }
      assoc.record(distance(convolve_general(fg, h), convolve_general(f, convolve_general(g, h))));
      bilinear.record(distance(convolve_general(f.scaled(lam).plus(h), g),
                               fg.scaled(lam).plus(convolve_general(h, g))));
      bilinear.record(distance(convolve_general(f, g.plus(h.scaled(lam))), fg.plus(convolve_general(f, h).scaled(lam))));
      anti.record(distance(involute(fg), convolve_general(involute(g), involute(f))));
      auto ff = involute(involute(f));
      if (ff.labels() != f.labels())
        invol.fail("support changed at trial " + std::to_string(i));
      else
        invol.record(distance(ff, f));
      conj.record(distance(involute(f.scaled(lam)), involute(f).scaled(std::conj(lam))));
    }
    std::vector<CheckResult> out;
    if (has_closed_form) out.push_back(closed);
    for (auto* c : {&assoc, &bilinear, &anti, &invol, &conj}) out.push_back(*c);
    return out;
  };
  if (alg->shape() == AlgebraShape::circle) return run(std::type_identity<TrigPoly>{});
  return run(std::type_identity<PiecewisePoly>{});
}

/// ‖M(f★g)(z) − M(f)(z)M(g)(z)‖∞ over random U_p-supported pairs and the
/// sample points z = s/z_count.
inline CheckResult representation_check(int p, int pairs, int z_count, std::mt19937_64& rng, double tol = 1e-9) {
  CheckResult r{"matrix-representation p=" + std::to_string(p)};
  r.tolerance = tol;
  for (int i = 0; i < pairs; ++i) {
    auto f = sampling::random_up_element(rng, p), g = sampling::random_up_element(rng, p);
    auto fg = representation_product(f, g);
    for (int s = 0; s < z_count; ++s) {
      QAlpha z(Rational(s, z_count));
      auto err = (matrix_representation(fg, p, z) - matrix_representation(f, p, z) * matrix_representation(g, p, z))
                     .cwiseAbs()
                     .maxCoeff();
      r.record(err, "pair " + std::to_string(i) + " at z=" + z.str());
    }
  }
  return r;
}

}  // namespace quasifold
