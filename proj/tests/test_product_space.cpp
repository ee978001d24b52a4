#include <gtest/gtest.h>

#include <cmath>

#include "cat0bd/product_space.hpp"
#include "oracles.hpp"

using namespace cat0bd;

namespace {
SpacePoint P(const char* w, Rational h) { return space_point(Word(std::string(w)), h); }
BoundaryPoint B(const char* s) { return BoundaryPoint::parse(s); }
}  // namespace

TEST(SpacePoint, Distances) {
  EXPECT_EQ(dist_sq(P("", 0), P("ab", 2)), Rational(8));
  EXPECT_NEAR(dist(P("", 0), P("ab", 2)), 2.828427, 1e-6);
  EXPECT_EQ(dist(P("", 0), P("", 5)), 5.0);
  EXPECT_EQ(dist(P("a", 1), P("b", 1)), 2.0);
}

TEST(SpacePoint, ParseAndPrint) {
  EXPECT_EQ(to_string(P("ab", Rational(3, 2))), "(ab+0/1, h=3/2)");
  EXPECT_EQ(parse_space_point("(ab+0/1, h=3/2)"), P("ab", Rational(3, 2)));
  EXPECT_EQ(parse_space_point("(ab, h=1)"), P("ab", 1));
}

TEST(BoundaryPoint, ParseForms) {
  EXPECT_EQ(B("[a^inf,0/1]"), BoundaryPoint::directional(TreeEnd::parse("a^inf"), 0));
  EXPECT_EQ(B("[(ab)^inf, slope=1/2]").dir().slope, Rational(1, 2));
  EXPECT_EQ(B("[pole,+]"), BoundaryPoint::pole(1));
  EXPECT_EQ(B("[pole, -]").to_string(), "[pole, -]");
  EXPECT_EQ(B(B("[b(a)^inf,-2]").to_string().c_str()), B("[b(a)^inf,-2]"));
  EXPECT_THROW(B("a^inf,0"), std::invalid_argument);
  EXPECT_THROW(BoundaryPoint::pole(0), std::invalid_argument);
}

TEST(BoundaryPoint, Angles) {
  EXPECT_NEAR(B("[(ab)^inf,1]").angle(), std::acos(-1.0) / 4, 1e-15);
  EXPECT_EQ(B("[a^inf,0]").angle(), 0.0);
  EXPECT_NEAR(B("[pole,-]").angle(), -std::acos(0.0), 1e-15);
}

TEST(SegmentEval, Examples) {
  EXPECT_EQ(segment_eval({P("", 0), P("aabb", 4)}, Rational(1, 2)), P("aa", 2));
  EXPECT_EQ(segment_eval({P("", 0), P("", 2)}, Rational(1, 4)), P("", Rational(1, 2)));
  EXPECT_EQ(segment_eval({P("a", 0), P("b", 2)}, Rational(1, 2)), P("", 1));
  EXPECT_THROW(segment_eval({P("", 0), P("a", 0)}, Rational(2)), OutOfRange);
}

TEST(RayEval, Examples) {
  const SpacePoint o = P("", 0);
  auto p = ray_eval({o, B("[a^inf,0]")}, 4);
  EXPECT_EQ(p.tree.anchor.str(), "aaaa");
  EXPECT_EQ(p.tree.offset, 0.0);
  EXPECT_EQ(p.height, 0.0);
  p = ray_eval({o, B("[pole,+]")}, 3);
  EXPECT_TRUE(p.tree.anchor.empty());
  EXPECT_EQ(p.height, 3.0);
  p = ray_eval({o, B("[a^inf,1]")}, std::sqrt(2.0));
  EXPECT_NEAR(tree_dist(p.tree, TreePointF::vertex(Word("a"))), 0.0, 1e-9);
  EXPECT_NEAR(p.height, 1.0, 1e-9);
  EXPECT_THROW(ray_eval({o, B("[a^inf,0]")}, -1), OutOfRange);
}

TEST(RayEvalTreeParam, IsExact) {
  const SpacePoint o = P("b", 1);
  EXPECT_EQ(ray_eval_tree_param({o, B("[a^inf,1/2]")}, Rational(3)), P("aa", Rational(5, 2)));
  EXPECT_EQ(ray_eval_tree_param({o, B("[pole,-]")}, Rational(2)), P("b", -1));
}

TEST(DistPointToSegment, PointOnSegment) {
  const GeodesicSegment seg{P("", 0), P("aabb", 4)};
  for (int j = 0; j <= 8; ++j) {
    const Rational t(j, 8);
    const auto r = dist_point_to_segment(segment_eval(seg, t), seg);
    EXPECT_EQ(r.d_sq, Rational(0));
    EXPECT_EQ(r.t, t);
  }
}

TEST(DistPointToSegment, TwoLetterExample) {
  const auto r = dist_point_to_segment(P("aa", 0), {P("", 0), P("aabb", 4)});
  EXPECT_EQ(r.d_sq, Rational(2));
  EXPECT_EQ(r.t, Rational(1, 4));
  EXPECT_EQ(oracle::piecewise_segment_min(P("aa", 0), P("", 0), P("aabb", 4)), Rational(2));
}

TEST(DistPointToSegment, CanonicalFamilyIHalfSquared) {
  // X = (a^i, 0), segment [(e, 0), (a^i b^i, 2i)]: min over s of (i - s)^2 + s^2.
  for (int i = 1; i <= 12; ++i) {
    const std::string ai(static_cast<std::size_t>(i), 'a'), bi(static_cast<std::size_t>(i), 'b');
    const SpacePoint x = P(ai.c_str(), 0), q = P((ai + bi).c_str(), 2 * i);
    const auto r = dist_point_to_segment(x, {P("", 0), q});
    EXPECT_EQ(r.d_sq, Rational(i * i, 2)) << i;
    EXPECT_EQ(r.d_sq, oracle::piecewise_segment_min(x, P("", 0), q));
  }
}

TEST(DistPointToSegment, DegenerateSegments) {
  auto r = dist_point_to_segment(P("a", 3), {P("", 0), P("", 2)});
  EXPECT_EQ(r.d_sq, Rational(2));
  EXPECT_EQ(r.t, Rational(1));
  r = dist_point_to_segment(P("a", 3), {P("b", 1), P("b", 1)});
  EXPECT_EQ(r.d_sq, Rational(8));
}

TEST(SegmentMeetsBall, Examples) {
  const GeodesicSegment seg{P("", 0), P("aabb", 4)};
  EXPECT_TRUE(segment_meets_ball(seg, P("aa", 2), 0));
  EXPECT_FALSE(segment_meets_ball(seg, P("aa", 0), 1));
  EXPECT_TRUE(segment_meets_ball(seg, P("aa", 0), 2));
  EXPECT_THROW(segment_meets_ball(seg, P("aa", 0), -1), std::invalid_argument);
}

TEST(Asymptotic, SameTargetOnly) {
  EXPECT_TRUE(asymptotic({P("", 0), B("[a^inf,0]")}, {P("ab", 5), B("[a^inf,0]")}));
  EXPECT_FALSE(asymptotic({P("", 0), B("[a^inf,0]")}, {P("", 0), B("[a^inf,1]")}));
  EXPECT_FALSE(asymptotic({P("", 0), B("[a^inf,0]")}, {P("", 0), B("[b^inf,0]")}));
}

TEST(DistPointToRay, ExactAgainstLongSegments) {
  // The ray distance equals the segment distance once the segment is long
  // enough to pass the minimizer.
  oracle::Gen gen(21);
  const char* targets[] = {"[a^inf,0]", "[(ab)^inf,1]", "[b(a)^inf,-1/2]", "[(aB)^inf,2]"};
  for (int i = 0; i < 100; ++i) {
    const SpacePoint x = {TreePoint::vertex(gen.word(4)), Rational(gen.uniform(-6, 6))};
    const BoundaryPoint t = B(targets[i % 4]);
    const auto ray = dist_point_to_ray(x, P("", 0), t);
    const SpacePoint far = ray_eval_tree_param({P("", 0), t}, Rational(40));
    EXPECT_EQ(ray.value, dist_point_to_segment(x, P("", 0), far).d_sq);
  }
  const auto pole = dist_point_to_ray(P("ab", -3), P("", 0), B("[pole,+]"));
  EXPECT_EQ(pole.value, Rational(13));
  EXPECT_EQ(pole.param, Rational(0));
}
