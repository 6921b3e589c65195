#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "quasifold/atlas.hpp"
#include "quasifold/groupoid.hpp"
#include "quasifold/structure_groupoid.hpp"
#include "test_support.hpp"

using namespace quasifold;

namespace {

QAlpha qa(Rational p, Rational q = 0) { return {p, q}; }
AffineElement t(QAlpha x) { return AffineElement::translation(std::move(x)); }
NebulaPoint pt(const char* chart, QAlpha x) { return {chart, {x}}; }

std::set<Arrow> as_set(const std::vector<Arrow>& v) { return {v.begin(), v.end()}; }

}  // namespace

// --- groupoid-core --------------------------------------------------------

TEST(Arrow, SourceAndTarget) {
  Arrow a{pt("class", qa(0)), t(qa(1, 1)), "class"};
  EXPECT_EQ(arrow_src(a), pt("class", qa(0)));
  EXPECT_EQ(arrow_trg(a), pt("class", qa(1, 1)));
  EXPECT_EQ(arrow_trg(unit_arrow(pt("class", qa(5, -2)))), pt("class", qa(5, -2)));
}

TEST(Arrow, TranslationComposition) {
  Arrow a{pt("class", qa(0)), t(qa(1, 1)), "class"};
  Arrow b{pt("class", qa(1, 1)), t(qa(2, 3)), "class"};
  EXPECT_EQ(arrow_compose(a, b), (Arrow{pt("class", qa(0)), t(qa(3, 4)), "class"}));
  EXPECT_EQ(arrow_compose(a, unit_arrow(arrow_trg(a))), a);
  EXPECT_EQ(arrow_compose(unit_arrow(a.src), a), a);
}

TEST(Arrow, NotComposable) {
  Arrow a{pt("class", qa(0)), t(qa(1)), "class"};
  Arrow b{pt("class", qa(5)), t(qa(1)), "class"};
  try {
    (void)arrow_compose(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "not-composable");
  }
}

TEST(Arrow, Inverse) {
  Arrow a{pt("class", qa(Rational(1, 3))), t(qa(2, -1)), "class"};
  EXPECT_EQ(arrow_invert(a), (Arrow{pt("class", qa(Rational(7, 3), -1)), t(qa(-2, 1)), "class"}));
  auto u = unit_arrow(pt("class", qa(1)));
  EXPECT_EQ(arrow_invert(u), u);
  EXPECT_EQ(arrow_invert(arrow_invert(a)), a);
  EXPECT_TRUE(is_unit(arrow_compose(a, arrow_invert(a))));
}

TEST(FiberOver, IrrationalTorusAtZero) {
  auto g = build_groupoid(irrational_torus_atlas());
  auto fiber = g.fiber_over(pt("class", qa(0)), 1);
  // Brute force: solve γ·r = 0 for each γ = t_{n+αm}, |n|,|m| ≤ 1.
  std::set<Arrow> expected;
  for (int n = -1; n <= 1; ++n)
    for (int m = -1; m <= 1; ++m) expected.insert(Arrow{pt("class", qa(-n, -m)), t(qa(n, m)), "class"});
  EXPECT_EQ(fiber.size(), 9u);
  EXPECT_EQ(as_set(fiber), expected);
}

TEST(FiberOver, ReflectionFixedPoint) {
  auto g = build_groupoid(reflection_single_chart_atlas());
  auto fiber = g.fiber_over(pt("R", qa(0)), 3);
  ASSERT_EQ(fiber.size(), 2u);
  for (const auto& a : fiber) EXPECT_EQ(a.src, pt("R", qa(0)));
}

TEST(FiberOver, ReflectionTwoPointOrbit) {
  auto g = build_groupoid(reflection_single_chart_atlas());
  auto fiber = g.fiber_over(pt("R", qa(1)), 3);
  std::set<NebulaPoint> sources;
  for (const auto& a : fiber) sources.insert(a.src);
  EXPECT_EQ(sources, (std::set<NebulaPoint>{pt("R", qa(1)), pt("R", qa(-1))}));
}

TEST(FiberOver, MonotoneInBound) {
  auto g = build_groupoid(duplicated_atlas(irrational_torus_atlas()));
  auto p = pt("class", qa(Rational(1, 2), 1));
  for (int b = 0; b < 3; ++b) {
    auto small = as_set(g.fiber_over(p, b));
    auto big = as_set(g.fiber_over(p, b + 1));
    EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end())) << b;
  }
}

TEST(GroupoidAxioms, AssociativityUnitsInverses) {
  std::vector<StructureGroupoid> groupoids{build_groupoid(irrational_torus_atlas()),
                                           build_groupoid(duplicated_atlas(irrational_torus_atlas())),
                                           build_groupoid(reflection_orbifold_atlas())};
  std::vector<NebulaPoint> bases{pt("class", qa(Rational(1, 3))), pt("class", qa(0, 1)), pt("U", qa(Rational(3, 2)))};
  for (std::size_t i = 0; i < groupoids.size(); ++i) {
    const auto& g = groupoids[i];
    auto first = g.arrows_from(bases[i], 1);
    std::size_t triples = 0;
    for (const auto& a : first) {
      EXPECT_EQ(arrow_compose(unit_arrow(a.src), a), a);
      EXPECT_EQ(arrow_compose(a, unit_arrow(arrow_trg(a))), a);
      EXPECT_TRUE(is_unit(arrow_compose(a, arrow_invert(a))));
      EXPECT_TRUE(is_unit(arrow_compose(arrow_invert(a), a)));
      auto second = g.arrows_from(arrow_trg(a), 1);
      for (std::size_t j = 0; j < second.size(); j += 3) {
        const auto& b = second[j];
        auto third = g.arrows_from(arrow_trg(b), 1);
        for (std::size_t k = 0; k < third.size(); k += 5) {
          const auto& c = third[k];
          ASSERT_EQ(arrow_compose(arrow_compose(a, b), c), arrow_compose(a, arrow_compose(b, c)));
          ++triples;
        }
      }
    }
    EXPECT_GT(triples, 0u);
  }
}

TEST(GermIdentification, AffineRigidity) {
  // Two affine maps agreeing at n+1 affinely independent exact points are
  // equal. Oracle: recover (A, b) from the n+1 images by exact elimination.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    RationalMatrix m(2, {testing_support::random_rational(rng, 5) + 3, testing_support::random_rational(rng, 2),
                         testing_support::random_rational(rng, 2), testing_support::random_rational(rng, 5) + 7});
    if (m.determinant().is_zero()) continue;
    AffineElement f(m, {testing_support::random_qalpha(rng, 6), testing_support::random_qalpha(rng, 6)});
    std::vector<QVector> pts{{qa(0), qa(0)}, {qa(1), qa(0)}, {qa(0), qa(1)}};
    std::vector<QVector> img;
    for (const auto& p : pts) img.push_back(affine_apply(f, p));
    QVector b = img[0];
    QVector c1 = img[1] - b, c2 = img[2] - b;
    ASSERT_TRUE(c1[0].is_rational() && c1[1].is_rational() && c2[0].is_rational() && c2[1].is_rational());
    AffineElement g(RationalMatrix(2, {c1[0].rational_part(), c2[0].rational_part(), c1[1].rational_part(),
                                       c2[1].rational_part()}),
                    b);
    Arrow af{{"c", pts[0]}, f, "c"}, ag{{"c", pts[0]}, g, "c"};
    EXPECT_EQ(af, ag);
  }
}

// --- atlas ----------------------------------------------------------------

TEST(BuildGroupoid, IrrationalTorusMorphisms) {
  auto g = build_groupoid(irrational_torus_atlas());
  auto x = pt("class", qa(Rational(2, 7), 3));
  std::set<AffineElement> maps;
  for (const auto& a : g.arrows_from(x, 2)) {
    EXPECT_EQ(a.src, x);
    EXPECT_EQ(a.dst_chart, "class");
    maps.insert(a.map);
  }
  auto els = GroupPresentation::z_plus_alpha_z().enumerate(2);
  EXPECT_EQ(maps, std::set<AffineElement>(els.begin(), els.end()));
}

TEST(BuildGroupoid, RationalQuotientMorphisms) {
  auto g = build_groupoid(rational_quotient_atlas());
  for (const auto& a : g.arrows_from(pt("class", qa(0, 1)), 3)) {
    EXPECT_TRUE(a.map.is_translation());
    EXPECT_TRUE(a.map.shift()[0].is_rational());
  }
}

TEST(BuildGroupoid, DuplicatedChartHasCrossUnits) {
  auto g = build_groupoid(duplicated_atlas(irrational_torus_atlas()));
  auto from = g.arrows_from(pt("class", qa(1)), 1);
  Arrow cross{pt("class", qa(1)), AffineElement::identity(1), "class'"};
  EXPECT_NE(std::find(from.begin(), from.end(), cross), from.end());
}

TEST(BuildGroupoid, InconsistentTransitionRejected) {
  auto a = duplicated_atlas(irrational_torus_atlas());
  a.transitions[0].map = t(qa(0, Rational(1, 2)));
  try {
    (void)build_groupoid(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "inconsistent-transition");
  }
}

TEST(BuildGroupoid, InconsistentChartGroupRejected) {
  auto a = irrational_torus_atlas();
  a.charts[0].group = GroupPresentation::rationals();
  EXPECT_THROW((void)build_groupoid(a), Error);
}

TEST(Evaluate, SameOrbit) {
  auto g = build_groupoid(irrational_torus_atlas());
  EXPECT_EQ(evaluate(pt("class", qa(0)), g).equals(evaluate(pt("class", qa(1, 1)), g), 1), Tri::equal);
}

TEST(Evaluate, CoefficientObstruction) {
  auto g = build_groupoid(irrational_torus_atlas());
  for (int b : {0, 2, 6})
    EXPECT_EQ(evaluate(pt("class", qa(0)), g).equals(evaluate(pt("class", qa(0, Rational(1, 2))), g), b),
              Tri::not_equal);
}

TEST(Evaluate, DuplicatedCharts) {
  auto g = build_groupoid(duplicated_atlas(irrational_torus_atlas()));
  EXPECT_EQ(evaluate(pt("class", qa(3)), g).equals(evaluate(pt("class'", qa(3)), g), 1), Tri::equal);
}

TEST(Evaluate, WithoutModelUsesStructureGroupReduction) {
  auto atlas = duplicated_atlas(irrational_torus_atlas());
  atlas.model.reset();
  auto g = build_groupoid(atlas);
  auto r = g.same_point(pt("class", qa(0)), pt("class'", qa(40, -31)), 1);
  EXPECT_EQ(r.result, Tri::equal);
  EXPECT_EQ(r.route, "reference-arrow");
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(arrow_trg(*r.witness), pt("class'", qa(40, -31)));
  auto r2 = g.same_point(pt("class", qa(0)), pt("class'", qa(0, Rational(1, 3))), 1);
  EXPECT_EQ(r2.result, Tri::not_equal);
}

TEST(Evaluate, WithoutModelClosedComponentForOrbifold) {
  auto atlas = reflection_orbifold_atlas();
  atlas.model.reset();
  auto g = build_groupoid(atlas);
  auto r = g.same_point(pt("U", qa(Rational(1, 2))), pt("W", qa(Rational(3, 2))), 3);
  EXPECT_EQ(r.result, Tri::not_equal);
  EXPECT_EQ(r.route, "closed-component");
  EXPECT_EQ(g.same_point(pt("U", qa(Rational(-3, 2))), pt("W", qa(Rational(3, 2))), 3).result, Tri::equal);
}

TEST(Evaluate, GeneratedGroupWithoutModelIsInconclusive) {
  Atlas a;
  a.name = "affine";
  a.charts.push_back({"c", GroupPresentation(1, GeneratedGroup{{AffineElement::line(2, qa(0)), AffineElement::line(1, qa(1))}}),
                      Box::whole(), std::nullopt, ""});
  auto g = build_groupoid(a);
  EXPECT_EQ(g.same_point(pt("c", qa(0)), pt("c", qa(0, 1)), 2).result, Tri::inconclusive);
}

TEST(ArrowsBetween, TorusNeedsBoundThree) {
  auto g = build_groupoid(irrational_torus_atlas());
  Arrow want{pt("class", qa(0)), t(qa(2, 3)), "class"};
  EXPECT_TRUE(g.arrows_between(pt("class", qa(0)), pt("class", qa(2, 3)), 2).empty());
  auto found = g.arrows_between(pt("class", qa(0)), pt("class", qa(2, 3)), 3);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0], want);
}

TEST(ArrowsBetween, ReflectionSwapsOneAndMinusOne) {
  auto g = build_groupoid(reflection_single_chart_atlas());
  auto found = g.arrows_between(pt("R", qa(1)), pt("R", qa(-1)), 1);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].map, AffineElement::line(-1, qa(0)));
}

TEST(ArrowsBetween, EmptyAcrossFibers) {
  auto g = build_groupoid(irrational_torus_atlas());
  for (int b = 0; b < 5; ++b)
    EXPECT_TRUE(g.arrows_between(pt("class", qa(0)), pt("class", qa(0, Rational(1, 2))), b).empty());
}

TEST(ArrowsBetween, OrbifoldAcrossCharts) {
  auto g = build_groupoid(reflection_orbifold_atlas());
  // −3/2 in U reaches 3/2 in W via reflection then the gluing map.
  auto found = g.arrows_between(pt("U", qa(Rational(-3, 2))), pt("W", qa(Rational(3, 2))), 1);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].map, AffineElement::line(-1, qa(0)));
  EXPECT_TRUE(g.arrows_between(pt("U", qa(Rational(-3, 2))), pt("W", qa(Rational(3, 2))), 0).empty());
}

TEST(Assembly, IrrationalTorusAtZero) {
  auto g = build_groupoid(irrational_torus_atlas());
  auto rep = g.isotropy_and_assembly(pt("class", qa(0)), 1);
  ASSERT_EQ(rep.blocks.size(), 1u);
  const auto& block = rep.blocks[0];
  EXPECT_EQ(block.objects.size(), 9u);
  EXPECT_EQ(block.arrows.size(), 81u);
  std::set<Arrow> expected;
  for (int n = -1; n <= 1; ++n)
    for (int m = -1; m <= 1; ++m)
      for (int n2 = -1; n2 <= 1; ++n2)
        for (int m2 = -1; m2 <= 1; ++m2) expected.insert(Arrow{pt("class", qa(n, m)), t(qa(n2, m2)), "class"});
  EXPECT_EQ(as_set(block.arrows), expected);
  EXPECT_TRUE(rep.connections.empty());
  ASSERT_EQ(rep.isotropy.size(), 1u);
}

TEST(Assembly, ReflectionFixedPoint) {
  auto g = build_groupoid(reflection_orbifold_atlas());
  auto rep = g.isotropy_and_assembly(pt("U", qa(0)), 2);
  ASSERT_EQ(rep.blocks.size(), 1u);
  EXPECT_EQ(rep.blocks[0].objects.size(), 1u);
  EXPECT_EQ(rep.isotropy.size(), 2u);
}

TEST(Assembly, DuplicatedChartsJoinedByIdentity) {
  auto g = build_groupoid(duplicated_atlas(irrational_torus_atlas()));
  auto rep = g.isotropy_and_assembly(pt("class", qa(0)), 1);
  ASSERT_EQ(rep.blocks.size(), 2u);
  EXPECT_EQ(rep.blocks[0].chart, "class");
  EXPECT_EQ(rep.blocks[1].chart, "class'");
  ASSERT_EQ(rep.connections.size(), 1u);
  EXPECT_EQ(rep.connections[0], (Arrow{pt("class", qa(0)), AffineElement::identity(1), "class'"}));
}

TEST(Assembly, OrbifoldTwoCharts) {
  auto g = build_groupoid(reflection_orbifold_atlas());
  auto rep = g.isotropy_and_assembly(pt("U", qa(Rational(3, 2))), 1);
  ASSERT_EQ(rep.blocks.size(), 2u);
  EXPECT_EQ(rep.blocks[0].objects.size(), 2u);  // ±3/2
  EXPECT_EQ(rep.blocks[1].objects.size(), 1u);  // 3/2 in W
  ASSERT_EQ(rep.connections.size(), 1u);
  EXPECT_EQ(arrow_trg(rep.connections[0]).chart, "W");
}

TEST(AtlasInvariants, ArrowsAreEvAbsorbed) {
  for (const auto& atlas : {irrational_torus_atlas(), duplicated_atlas(irrational_torus_atlas()),
                            reflection_orbifold_atlas(), two_scale_torus_atlas(), rational_quotient_atlas()}) {
    auto g = build_groupoid(atlas);
    auto base = NebulaPoint{atlas.charts[0].id, {atlas.charts[0].domain.sample_points(1)[0][0]}};
    for (const auto& a : g.arrows_from(base, 2))
      ASSERT_EQ(g.same_point(a.src, arrow_trg(a), 2).result, Tri::equal) << atlas.name << " " << a.str();
  }
}

TEST(AtlasInvariants, FibersAreTransitivityComponents) {
  // Constructed pairs with connecting words of known length ≤ 2.
  auto g = build_groupoid(irrational_torus_atlas());
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    QAlpha x = testing_support::random_qalpha(rng, 6);
    bool related = trial % 2 == 0;
    QAlpha y = related ? x + qa(testing_support::uniform_int(rng, -2, 2), testing_support::uniform_int(rng, -2, 2))
                       : x + qa(testing_support::random_rational(rng, 3), Rational(1, 3));
    bool arrows = !g.arrows_between(pt("class", x), pt("class", y), 2).empty();
    auto ev = evaluate(pt("class", x), g).equals(evaluate(pt("class", y), g), 2);
    ASSERT_NE(ev, Tri::inconclusive);
    EXPECT_EQ(arrows, ev == Tri::equal);
  }
}

TEST(AtlasInvariants, DuplicationPreservesPoints) {
  auto g = build_groupoid(irrational_torus_atlas());
  auto gg = build_groupoid(duplicated_atlas(irrational_torus_atlas()));
  std::vector<QAlpha> sample{qa(0), qa(1, 1), qa(Rational(1, 2)), qa(Rational(3, 2), -1), qa(0, Rational(1, 2))};
  for (const auto& x : sample)
    for (const auto& y : sample) {
      auto base = g.same_point(pt("class", x), pt("class", y), 2).result;
      EXPECT_EQ(gg.same_point(pt("class", x), pt("class'", y), 2).result, base);
      EXPECT_EQ(gg.same_point(pt("class'", x), pt("class'", y), 2).result, base);
    }
}

TEST(AtlasInvariants, InvalidPointRejected) {
  auto g = build_groupoid(reflection_orbifold_atlas());
  EXPECT_THROW((void)g.arrows_from(pt("W", qa(0)), 1), Error);
  EXPECT_THROW((void)g.arrows_from(pt("nope", qa(0)), 1), Error);
}
