#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "quasifold/lifting.hpp"
#include "test_support.hpp"

using namespace quasifold;
using testing_support::random_qalpha;
using testing_support::uniform_int;

namespace {

const QAlpha alpha = QAlpha::alpha();

Ball unit_ball_1d() { return {{0.0}, 2.0}; }

/// Exact samples in (−2, 2) of the form p + qα with small p, q.
std::vector<QVector> exact_points(std::mt19937_64& rng, int count) {
  const auto& w = AlphaWitness::standard();
  std::vector<QVector> out;
  while (static_cast<int>(out.size()) < count) {
    QAlpha x(Rational(uniform_int(rng, -23, 23), 12), Rational(uniform_int(rng, -12, 12), 12));
    if (std::abs(w.evaluate(x)) < 1.9) out.push_back({x});
  }
  return out;
}

SampledMap sample_exact(const StitchedMap& f, const std::vector<QVector>& pts) {
  std::vector<QVector> vals;
  for (const auto& p : pts) vals.push_back(f(p));
  return SampledMap::exact(unit_ball_1d(), pts, vals);
}

std::vector<RealVector> grid(double lo, double hi, int count) {
  std::vector<RealVector> out;
  for (int i = 0; i < count; ++i) out.push_back({lo + (hi - lo) * (i + 0.5) / count});
  return out;
}

const AffinePiece* piece_for(const AffinePieceReport& rep, const AffineElement& g) {
  for (const auto& p : rep.pieces)
    if (p.gamma == g) return &p;
  return nullptr;
}

}  // namespace

TEST(SampledMap, RejectsPointsOutsideBall) {
  EXPECT_THROW(SampledMap::numeric({{0.0}, 1.0}, {{1.5}}, {{0.0}}), Error);
  EXPECT_THROW(SampledMap::numeric({{0.0}, 1.0}, {{0.5}}, {{0.0, 1.0}}), Error);
  EXPECT_NO_THROW(SampledMap::numeric({{0.0}, 1.0}, {{0.5}}, {{7.0}}));
}

TEST(DetectPieces, SingleTranslationCoversEverything) {
  std::mt19937_64 rng(3);
  StitchedMap f{{AffineElement::translation(QAlpha(2) + alpha * Rational(3))}, {}};
  auto rep = detect_pieces(sample_exact(f, exact_points(rng, 40)), GroupPresentation::z_plus_alpha_z(), 5);
  ASSERT_EQ(rep.pieces.size(), 1u);
  EXPECT_EQ(rep.pieces[0].gamma, f.gammas[0]);
  EXPECT_EQ(rep.coverage, 1.0);
  EXPECT_TRUE(rep.unmatched.empty());
}

TEST(DetectPieces, StitchedTranslationsSplitAtCut) {
  std::mt19937_64 rng(4);
  StitchedMap f{{AffineElement::translation(QAlpha(1)), AffineElement::translation(alpha)}, {QAlpha(0)}};
  auto pts = exact_points(rng, 60);
  auto rep = detect_pieces(sample_exact(f, pts), GroupPresentation::z_plus_alpha_z(), 3);
  ASSERT_EQ(rep.pieces.size(), 2u);
  const auto* neg = piece_for(rep, f.gammas[0]);
  const auto* pos = piece_for(rep, f.gammas[1]);
  ASSERT_TRUE(neg && pos);
  const auto& w = AlphaWitness::standard();
  for (auto i : neg->samples) EXPECT_TRUE(w.less(pts[i][0], QAlpha(0)));
  for (auto i : pos->samples) EXPECT_FALSE(w.less(pts[i][0], QAlpha(0)));
  EXPECT_EQ(neg->samples.size() + pos->samples.size(), pts.size());
  EXPECT_EQ(rep.coverage, 1.0);
}

TEST(DetectPieces, HalfAlphaShiftIsNoMatch) {
  std::mt19937_64 rng(5);
  StitchedMap f{{AffineElement::translation(alpha * Rational(1, 2))}, {}};
  auto rep = detect_pieces(sample_exact(f, exact_points(rng, 30)), GroupPresentation::z_plus_alpha_z(), 6);
  EXPECT_TRUE(rep.pieces.empty());
  EXPECT_EQ(rep.coverage, 0.0);
  EXPECT_EQ(rep.unmatched.size(), 30u);
}

TEST(DetectPieces, NumericToleranceAndAllMatchesRecorded) {
  // Over ℚ, t_0 and t_{1/2} both match within a tolerance above 1/2.
  auto pts = grid(-1.0, 1.0, 10);
  std::vector<RealVector> vals;
  for (auto p : pts) vals.push_back({p[0] + 0.5 + 1e-12});
  auto f = SampledMap::numeric(unit_ball_1d(), pts, vals);
  auto tight = detect_pieces(f, GroupPresentation::rationals(), 2, 1e-9);
  ASSERT_EQ(tight.pieces.size(), 1u);
  EXPECT_EQ(tight.pieces[0].gamma, AffineElement::translation(QAlpha(Rational(1, 2))));
  EXPECT_LT(tight.max_residual, 1e-11);
  auto loose = detect_pieces(f, GroupPresentation::rationals(), 2, 0.6);
  for (const auto& m : loose.matches) EXPECT_GE(m.size(), 2u);
}

TEST(FitAffine, RecoversAffineMap) {
  auto f = SampledMap::from_function(unit_ball_1d(), grid(-1.5, 1.5, 12),
                                     [](const RealVector& x) { return RealVector{3 * x[0] - 1}; });
  auto fit = fit_affine(f);
  EXPECT_TRUE(fit.accepted);
  EXPECT_NEAR(fit.map.A(0, 0), 3.0, 1e-12);
  EXPECT_NEAR(fit.map.b(0), -1.0, 1e-12);
  EXPECT_LT(fit.second_derivative, 1e-8);
  ASSERT_TRUE(reconstruct_affine(f).has_value());
}

TEST(FitAffine, RejectsSquare) {
  auto f = SampledMap::from_function(unit_ball_1d(), grid(-1.5, 1.5, 12),
                                     [](const RealVector& x) { return RealVector{x[0] * x[0]}; });
  auto fit = fit_affine(f);
  EXPECT_FALSE(fit.accepted);
  EXPECT_GT(fit.max_residual, 1e-3);
  EXPECT_NEAR(fit.second_derivative, 2.0, 1e-6);
  EXPECT_FALSE(reconstruct_affine(f).has_value());
}

TEST(FitAffine, DegenerateConfigurations) {
  auto line = [](const RealVector& x) { return x; };
  EXPECT_THROW(fit_affine(SampledMap::from_function(unit_ball_1d(), grid(0, 1, 2), line)), Error);
  Ball b2{{0.0, 0.0}, 2.0};
  std::vector<RealVector> collinear;
  for (int i = 0; i < 8; ++i) collinear.push_back({0.1 * i, 0.2 * i});
  try {
    fit_affine(SampledMap::from_function(b2, collinear, line));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degenerate-sample-configuration");
  }
}

TEST(FitAffine, StitchedPiecesFitSeparately) {
  StitchedMap f{{AffineElement::translation(QAlpha(1)), AffineElement::translation(alpha)}, {QAlpha(0)}};
  auto cb = [&](const RealVector& x) { return f(x); };
  auto sm = SampledMap::from_function(unit_ball_1d(), grid(-1.8, 1.8, 40), cb);
  auto rep = detect_pieces(sm, GroupPresentation::z_plus_alpha_z(), 2);
  ASSERT_EQ(rep.pieces.size(), 2u);
  EXPECT_FALSE(fit_affine(sm).accepted);
  const double a = AlphaWitness::standard().evaluate(alpha);
  for (const auto& p : rep.pieces) {
    auto fit = fit_affine(sm.restricted(p.samples));
    EXPECT_TRUE(fit.accepted);
    EXPECT_NEAR(fit.map.A(0, 0), 1.0, 1e-6);
    double expected = p.gamma == f.gammas[0] ? 1.0 : a;
    EXPECT_NEAR(fit.map.b(0), expected, 1e-6);
  }
}

TEST(FitAffineProperty, SecondDifferencesVanishOnAffineMaps) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
    Eigen::MatrixXd A(n, n);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
      b(i) = u(rng);
      for (std::size_t j = 0; j < n; ++j) A(i, j) = u(rng);
    }
    NumericAffine g{A, b};
    Ball ball{RealVector(n, 0.0), 1.0};
    std::vector<RealVector> pts;
    std::uniform_real_distribution<double> c(-0.5, 0.5);
    for (std::size_t k = 0; k < 4 * (n + 1) * (n + 2); ++k) {
      RealVector p(n);
      for (auto& v : p) v = c(rng) / std::sqrt(static_cast<double>(n));
      pts.push_back(p);
    }
    auto fit = fit_affine(SampledMap::from_function(ball, pts, g));
    EXPECT_LT(fit.second_derivative, 1e-8);
    EXPECT_TRUE(fit.accepted);
    EXPECT_LT((fit.map.A - A).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(DetectPiecesProperty, StitchedMapsAreRecoveredExactly) {
  std::mt19937_64 rng(12);
  const auto& w = AlphaWitness::standard();
  for (const auto& group : {GroupPresentation::z_plus_alpha_z(), GroupPresentation::rationals()}) {
    auto pool = group.enumerate(2);
    for (int trial = 0; trial < 100; ++trial) {
      const int k = uniform_int(rng, 1, 4);
      std::vector<AffineElement> gammas;
      std::vector<std::size_t> picks(pool.size());
      for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = i;
      std::shuffle(picks.begin(), picks.end(), rng);
      for (int i = 0; i < k; ++i) gammas.push_back(pool[picks[static_cast<std::size_t>(i)]]);
      std::vector<QAlpha> cuts;
      for (int i = 1; i < k; ++i) cuts.push_back(QAlpha(Rational(4 * i - 2 * k, k)));  // increasing in (−2, 2)
      StitchedMap f{gammas, cuts};
      auto pts = exact_points(rng, 50);
      auto rep = detect_pieces(sample_exact(f, pts), group, 2);
      EXPECT_EQ(rep.coverage, 1.0);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        ASSERT_EQ(rep.matches[i].size(), 1u);
        EXPECT_EQ(rep.candidates[rep.matches[i][0]], gammas[f.piece_of(pts[i], w)]);
      }
      for (const auto& p : rep.pieces)
        EXPECT_NE(std::find(gammas.begin(), gammas.end(), p.gamma), gammas.end());
    }
  }
}

TEST(LiftDiffeo, IdentitySeedOnTorus) {
  auto r = lift_diffeo(AffineElement::identity(1), GroupPresentation::z_plus_alpha_z(), {QAlpha(0)},
                       {QAlpha(1) + alpha}, 3);
  EXPECT_EQ(r.lift, AffineElement::translation(QAlpha(1) + alpha));
}

TEST(LiftDiffeo, TwoScaleLink) {
  auto bi = two_scale_biatlas();
  auto r = lift_diffeo(bi, 0, {QAlpha(0)}, {QAlpha(Rational(1, 2))}, 3);
  EXPECT_EQ(r.lift, AffineElement::line(Rational(1, 2), QAlpha(Rational(1, 2))));
  EXPECT_EQ(affine_apply(r.lift, QVector{QAlpha(0)}), QVector{QAlpha(Rational(1, 2))});
}

TEST(LiftDiffeo, WrongFiberIsIncompatible) {
  try {
    lift_diffeo(AffineElement::identity(1), GroupPresentation::z_plus_alpha_z(), {QAlpha(0)},
                {QAlpha(Rational(1, 3))}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "fibers-incompatible");
  }
}

TEST(LiftDiffeoProperty, LiftsHitTargetAndStayEvCompatible) {
  std::mt19937_64 rng(13);
  auto bi = two_scale_biatlas();
  Bimodule m(bi);
  const auto& right_group = bi.right.chart("half").group;
  auto pool = right_group.enumerate(2);
  for (int pair = 0; pair < 50; ++pair) {
    QVector r{random_qalpha(rng, 3)};
    const auto& g = pool[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(pool.size()) - 1))];
    QVector rp = affine_apply(affine_compose(g, bi.links[0].map), r);
    auto lift = lift_diffeo(bi, 0, r, rp, 4);
    ASSERT_EQ(affine_apply(lift.lift, r), rp);
    for (int k = 0; k < 100; ++k) {
      LinkingGerm z{{"class", {random_qalpha(rng, 4)}}, lift.lift, "half"};
      ASSERT_EQ(m.ev_compatible(z, 6), Tri::equal) << z.str();
    }
  }
}

TEST(FlipDemo, ParityTable) {
  auto rep = nonliftable_demo(6, 20, 1e-10);
  EXPECT_TRUE(rep.outside_unit_disk_zero);
  ASSERT_EQ(rep.rows.size(), 6u);
  for (const auto& row : rep.rows) {
    EXPECT_EQ(row.h, row.n % 2 == 0 ? "1" : "tau");
    EXPECT_TRUE(row.passed) << "n=" << row.n << " abs=" << row.max_abs_error << " rel=" << row.max_rel_error;
    EXPECT_GT(row.other_rel_gap, 1e-3) << "n=" << row.n;
  }
  EXPECT_TRUE(rep.passed());
}

TEST(FlipDemo, MapVanishesAtOriginAndOutside) {
  auto z0 = flip_map({Big(0), Big(0)});
  EXPECT_EQ(z0.re, 0);
  auto z1 = flip_map({Big(0), Big(3)});
  EXPECT_EQ(z1.im, 0);
  // r = 1 is in annulus 1 but ρ_1 vanishes at its endpoint.
  auto z2 = flip_map({Big(1), Big(0)});
  EXPECT_EQ(z2.re, 0);
}
