#pragma once

#include <random>
#include <vector>

#include "quasifold/affine.hpp"
#include "quasifold/group.hpp"
#include "quasifold/qalpha.hpp"

namespace testing_support {

using namespace quasifold;

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Rational random_rational(std::mt19937_64& rng, int max_abs) {
  return Rational(uniform_int(rng, -max_abs, max_abs), uniform_int(rng, 1, 12));
}

inline QAlpha random_qalpha(std::mt19937_64& rng, int max_abs) {
  return {random_rational(rng, max_abs), random_rational(rng, max_abs)};
}

/// One group of each presentation kind, including a 2-D finite group.
inline std::vector<GroupPresentation> sample_groups() {
  std::vector<GroupPresentation> out;
  out.push_back(GroupPresentation::z_plus_alpha_z());
  out.push_back(GroupPresentation::rationals());
  out.push_back(GroupPresentation::reflection_1d());
  // Rotations by quarter turns about the origin.
  RationalMatrix r(2, {0, -1, 1, 0});
  std::vector<AffineElement> quarter{AffineElement::identity(2)};
  for (int i = 0; i < 3; ++i) quarter.push_back(affine_compose(AffineElement(r, QVector(2)), quarter.back()));
  out.push_back(GroupPresentation(2, FiniteMatrixGroup{quarter}));
  out.push_back(GroupPresentation(1, GeneratedGroup{{AffineElement::line(2, QAlpha(0)), AffineElement::line(1, QAlpha(1))}}));
  return out;
}

}  // namespace testing_support
