#include <gtest/gtest.h>

#include <random>
#include <string>

#include "quasifold/io.hpp"
#include "test_support.hpp"

using namespace quasifold;
using testing_support::random_qalpha;

namespace {

const std::string data_dir = QUASIFOLD_DATA_DIR;

Atlas parse_atlas(const std::string& text) {
  auto j = io::parse_text(text, "inline");
  return io::atlas_from(io::Node(j, "$"));
}

Atlas without_descriptions(Atlas a) {
  for (auto& c : a.charts) c.description.clear();
  return a;
}

std::string canonical(const Atlas& a) { return io::to_json(without_descriptions(a)).dump(); }

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Display, RoundTripsThroughParse) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    QAlpha x = random_qalpha(rng, 40);
    ASSERT_EQ(QAlpha::parse(io::display(x)), x) << io::display(x);
  }
}

TEST(Display, CompactForms) {
  EXPECT_EQ(io::display(QAlpha(2) + QAlpha::alpha() * Rational(3)), "2+3α");
  EXPECT_EQ(io::display(QAlpha(Rational(0), Rational(-1, 2))), "-α/2");
  EXPECT_EQ(io::display(QAlpha(Rational(1, 3), Rational(-1))), "1/3-α");
  EXPECT_EQ(io::display(AffineElement::line(Rational(1, 2), QAlpha(Rational(1, 2)))), "(1/2)x+1/2");
  EXPECT_EQ(io::display(AffineElement::line(Rational(-1), QAlpha(0))), "-x");
}

TEST(AtlasJson, BuiltinsRoundTrip) {
  for (const auto& a : {irrational_torus_atlas(), rational_quotient_atlas(), reflection_orbifold_atlas(),
                        reflection_single_chart_atlas(), duplicated_atlas(irrational_torus_atlas()),
                        two_scale_torus_atlas()}) {
    auto j = io::to_json(a);
    auto back = io::atlas_from(io::Node(j, "$"));
    EXPECT_EQ(io::to_json(back).dump(), j.dump()) << a.name;
  }
}

TEST(AtlasJson, DataFilesMatchBuiltins) {
  auto load = [](const std::string& f) {
    auto j = io::read_file(data_dir + "/" + f);
    return io::atlas_from(io::Node(j, "$"));
  };
  EXPECT_EQ(canonical(load("torus.json")), canonical(irrational_torus_atlas()));
  EXPECT_EQ(canonical(load("rq.json")), canonical(rational_quotient_atlas()));
  EXPECT_EQ(canonical(load("reflection.json")), canonical(reflection_orbifold_atlas()));
  EXPECT_EQ(canonical(load("duplicated.json")), canonical(duplicated_atlas(irrational_torus_atlas())));
}

TEST(BiAtlasJson, DataFilesMatchBuiltins) {
  auto load = [](const std::string& f) {
    auto j = io::read_file(data_dir + "/" + f);
    return io::biatlas_from(io::Node(j, "$"), data_dir);
  };
  auto check = [](const BiAtlas& got, const BiAtlas& want) {
    EXPECT_EQ(canonical(got.left), canonical(want.left));
    EXPECT_EQ(canonical(got.right), canonical(want.right));
    ASSERT_EQ(got.links.size(), want.links.size());
    for (std::size_t i = 0; i < got.links.size(); ++i)
      EXPECT_EQ(io::to_json(got.links[i]).dump(), io::to_json(want.links[i]).dump());
  };
  check(load("twoscale.json"), two_scale_biatlas());
  check(load("duplicated_biatlas.json"), duplicated_biatlas());
}

TEST(AtlasJson, ShorthandForms) {
  auto a = parse_atlas(R"({"charts": [{"id": "c", "group": {"kind": "generated", "generators": [{"A": 2}, "1"]}}]})");
  const auto& g = std::get<GeneratedGroup>(a.charts[0].group.kind());
  EXPECT_EQ(g.generators[0], AffineElement::line(Rational(2), QAlpha(0)));
  EXPECT_EQ(g.generators[1], AffineElement::translation(QAlpha(1)));
  EXPECT_TRUE(a.charts[0].domain.is_whole());
}

TEST(AtlasJson, TwoDimensional) {
  auto a = parse_atlas(R"({"dimension": 2, "charts": [{"id": "c", "group": {"kind": "finite", "elements": [
      {"A": [["1", "0"], ["0", "1"]]}, {"A": [["-1", "0"], ["0", "-1"]], "b": ["0", "0"]}]},
      "domain": [["-1", "1"], [null, "α"]]}]})");
  EXPECT_EQ(a.dimension, 2u);
  EXPECT_EQ(a.charts[0].domain.factors.size(), 2u);
  EXPECT_FALSE(a.charts[0].domain.factors[1].lo.has_value());
}

TEST(AtlasJson, FieldPathDiagnostics) {
  EXPECT_NE(error_of([] { parse_atlas(R"({"charts": [{"id": "a", "group": {"kind": "translation_lattice", "generators": ["1", "2x"]}}]})"); })
                .find("$.charts[0].group.generators[1]"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_atlas(R"({"charts": [{"id": "a"}]})"); }).find("missing field 'group'"), std::string::npos);
  EXPECT_NE(error_of([] { parse_atlas(R"({"charts": [{"id": "a", "group": {"kind": "nope"}}]})"); }).find("$.charts[0].group.kind"),
            std::string::npos);
  EXPECT_NE(error_of([] {
              parse_atlas(R"({"charts": [{"id": "a", "group": {"kind": "rational_translations"}}],
                              "transitions": [{"from": "a", "to": "b", "map": "0"}]})");
            }).find("unknown chart"),
            std::string::npos);
  EXPECT_NE(error_of([] { parse_atlas(R"({"charts": [{"id": "a", "group": {"kind": "rational_translations"}, "domain": [["0"]]}]})"); })
                .find("expected [lo, hi]"),
            std::string::npos);
}

TEST(AtlasJson, SyntaxErrorsCarryLineAndColumn) {
  std::string msg = error_of([] { io::parse_text("{\n  \"a\": 1,\n  \"b\" 2\n}", "f.json"); });
  EXPECT_NE(msg.find("f.json:3:"), std::string::npos) << msg;
}

TEST(Points, ParseFromText) {
  auto p = io::point_from_text("class:1+α");
  EXPECT_EQ(p.chart, "class");
  EXPECT_EQ(p.coords, (QVector{QAlpha(1) + QAlpha::alpha()}));
  auto q = io::point_from_text("c:(1/2, -α)");
  EXPECT_EQ(q.coords.size(), 2u);
  EXPECT_THROW(io::point_from_text("nochart"), Error);
  EXPECT_THROW(io::point_from_text("c:"), Error);
}
