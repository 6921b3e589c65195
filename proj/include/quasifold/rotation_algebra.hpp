#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "quasifold/algebra.hpp"

namespace quasifold {

struct RotationReport {
  QAlpha angle;
  int degree_bound = 0;
  Element<TrigPoly> uv;
  Element<TrigPoly> vu;
  Complex lambda;
  Complex expected;  // e^{−2πi·angle}
  double lambda_error = 0.0;
  /// max over 1 ≤ a, b ≤ degree_bound of dist(V^b U^a, λ^{ab} U^a V^b)
  double power_deviation = 0.0;
};

namespace detail {

template <class C>
Element<C> power(const Element<C>& x, int n) {
  Element<C> r = x;
  for (int i = 1; i < n; ++i) r = convolve_general(r, x);
  return r;
}

}  // namespace detail

/// U = δ_0 ⊗ e^{2πix}, V = δ_angle ⊗ 1 in the rotation algebra of ℝ/ℤ by
/// ℤ·angle; reports the scalar λ with V*U = λ·U*V.
inline RotationReport rotation_relation(const QAlpha& angle, const AlphaWitness& w = AlphaWitness::standard(),
                                        int degree_bound = 3) {
  auto group = angle.is_rational() ? GroupPresentation::rationals() : GroupPresentation::lattice_1d({QAlpha(1), angle});
  auto alg = std::make_shared<const ConvolutionAlgebra>("rotation", AlgebraShape::circle, std::move(group), w);
  Element<TrigPoly> u(alg, {{AffineElement::identity(1), TrigPoly::mode(1)}});
  Element<TrigPoly> v(alg, {{AffineElement::translation(angle), TrigPoly::constant(1.0)}});

  RotationReport rep{angle, degree_bound, convolve_general(u, v), convolve_general(v, u), {}, {}, 0.0, 0.0};
  Complex num = 0.0;
  double den = 0.0;
  for (const auto& [h, c] : rep.uv.support()) {
    TrigPoly other = rep.vu.at(h);
    for (const auto& [k, a] : c.coefficients()) {
      num += std::conj(a) * other.coefficient(k);
      den += std::norm(a);
    }
  }
  rep.lambda = den > 0 ? num / den : Complex(0.0);
  rep.expected = unit_phase(-angle, w);
  rep.lambda_error = std::abs(rep.lambda - rep.expected);
  for (int a = 1; a <= degree_bound; ++a)
    for (int b = 1; b <= degree_bound; ++b) {
      auto lhs = convolve_general(detail::power(v, b), detail::power(u, a));
      auto rhs = convolve_general(detail::power(u, a), detail::power(v, b)).scaled(std::pow(rep.lambda, a * b));
      rep.power_deviation = std::max(rep.power_deviation, distance(lhs, rhs));
    }
  return rep;
}

using ComplexMatrix = Eigen::MatrixXcd;

/// Which product M intertwines with convolution. Determined by comparing
/// M(f*g) with M(f)M(g) and M(g)M(f) on random U_p-supported elements;
/// see the matrix representation tests.
enum class RepresentationOrder { same, reversed };
inline constexpr RepresentationOrder representation_order = RepresentationOrder::reversed;

/// The convolution f★g with M(f★g) = M(f)·M(g) under the locked order.
inline Element<TrigPoly> representation_product(const Element<TrigPoly>& f, const Element<TrigPoly>& g) {
  return representation_order == RepresentationOrder::same ? convolve_general(f, g) : convolve_general(g, f);
}

/// M(z)[σ][τ] = f_{τ−σ}(z + σ) for σ, τ ∈ U_p = {0, 1/p, …, (p−1)/p} ⊂ ℝ/ℤ.
inline ComplexMatrix matrix_representation(const Element<TrigPoly>& f, int p, const QAlpha& z) {
  if (p < 1) throw Error("invalid-argument", "p must be positive");
  if (f.algebra()->shape() != AlgebraShape::circle)
    throw Error("unsupported-groupoid-shape", "matrix representation needs a circle algebra");
  for (const auto& [h, c] : f.support()) {
    const QAlpha& s = h.shift()[0];
    if (!s.is_rational() || !(s.rational_part() * Rational(p)).is_integer())
      throw Error("support-escapes-U_p", h.str() + " is not a p-th root of unity for p = " + std::to_string(p));
  }
  const auto& w = f.algebra()->witness();
  ComplexMatrix m(p, p);
  for (int i = 0; i < p; ++i) {
    Rational sigma(i, p);
    for (int j = 0; j < p; ++j) {
      Rational tau(j, p);
      m(i, j) = f.at(AffineElement::translation(QAlpha(tau - sigma))).evaluate(z + QAlpha(sigma), w);
    }
  }
  return m;
}

}  // namespace quasifold
