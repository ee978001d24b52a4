#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cat0bd/condition_star.hpp"
#include "oracles.hpp"

using namespace cat0bd;

namespace {
const ActionSpec dot = ActionSpec::dot(), star = ActionSpec::star(), scaled2 = ActionSpec::scaled2();
GroupElement G(const char* s) { return GroupElement::parse(s); }
}  // namespace

TEST(ConditionStar, SameActionHolds) {
  const auto v = check_condition_star(dot, dot, 1, 1, 5);
  EXPECT_TRUE(v.holds_on_ball);
  EXPECT_TRUE(v.witnesses.empty());
  EXPECT_LE(v.minimal_M_sq, Rational(1));
  EXPECT_EQ(v.group_elements, static_cast<std::uint64_t>(ball_size(5)));
}

TEST(ConditionStar, DotToStarFailsWithTheTwoLetterWitness) {
  const auto v = check_condition_star(dot, star, 1, 1, 8);
  EXPECT_FALSE(v.holds_on_ball);
  const auto it = std::find_if(v.witnesses.begin(), v.witnesses.end(), [](const StarWitness& w) {
    return w.g == G("aabb:0") && w.a == G("aa:0");
  });
  ASSERT_NE(it, v.witnesses.end());
  EXPECT_EQ(it->d_sq_x, Rational(0));
  EXPECT_EQ(it->d_sq_y, Rational(2));
  EXPECT_TRUE(std::is_sorted(v.witnesses.begin(), v.witnesses.end(), canonical_less));
  for (const auto& w : v.witnesses) {
    EXPECT_LE(w.d_sq_x, Rational(1));
    EXPECT_GT(w.d_sq_y, Rational(1));
  }
}

TEST(ConditionStar, DotToScaledHeightsHolds) {
  const auto v = check_condition_star(dot, scaled2, 1, 3, 6);
  EXPECT_TRUE(v.holds_on_ball);
  EXPECT_LE(v.minimal_M_sq, Rational(9));
}

TEST(ConditionStar, ConstantsBelowCoveringRadiusAreRejected) {
  try {
    check_condition_star(dot, dot, Rational(1, 2), 1, 2);
    FAIL() << "expected InvalidConstants";
  } catch (const InvalidConstants& e) {
    EXPECT_NEAR(e.covering_radius, std::sqrt(2.0) / 2, 1e-12);
  }
  EXPECT_THROW(check_condition_star(dot, scaled2, 1, 1, 2), InvalidConstants);
}

TEST(ConditionStar, WitnessesAreExactlyThePairsAboveM) {
  const auto v = check_condition_star(dot, star, 1, 2, 5);
  // Recount from the definition.
  const auto B = ball(5);
  std::size_t expected = 0;
  const SpacePoint o{};
  for (const auto& g : B)
    for (const auto& a : B) {
      if (Rational(1) < dist_point_to_segment(act(dot, a, o), o, act(dot, g, o)).d_sq) continue;
      if (Rational(4) < dist_point_to_segment(act(star, a, o), o, act(star, g, o)).d_sq) ++expected;
    }
  EXPECT_EQ(v.witnesses.size(), expected);
}

TEST(MinimalM, MatchesNaiveEnumeration) {
  const ActionSpec half(Rational(1, 2), Rational(1, 2), 1);
  struct Case {
    ActionSpec x, y;
    Rational N;
  } cases[] = {{dot, star, 1}, {dot, scaled2, 1}, {star, dot, 1}, {half, dot, 1}, {dot, star, Rational(3, 2)}};
  for (const auto& c : cases) {
    EXPECT_EQ(minimal_M_on_ball(c.x, c.y, c.N, 3), oracle::naive_minimal_M_sq(c.x, c.y, c.N, 3))
        << c.x.name << " -> " << c.y.name;
  }
}

TEST(MinimalM, DotToStarGrowsWithTheBall) {
  // Frozen from the scan; L = 4 is re-derived by the naive enumeration.
  const Rational m4 = minimal_M_on_ball(dot, star, 1, 4);
  EXPECT_EQ(m4, Rational(121, 5));
  EXPECT_EQ(m4, oracle::naive_minimal_M_sq(dot, star, 1, 4));
  const Rational m8 = minimal_M_on_ball(dot, star, 1, 8);
  EXPECT_EQ(m8, Rational(1369, 17));
  EXPECT_GE(m4, Rational(1, 2));
  EXPECT_GE(m8, Rational(2));
  EXPECT_LT(m4, m8);
}

TEST(MinimalM, SameSpaceIsAtMostNSquared) {
  for (int L = 1; L <= 5; ++L) EXPECT_LE(minimal_M_on_ball(star, star, 1, L), Rational(1));
}

TEST(MinimalM, ThreadCountDoesNotChangeTheResult) {
  StarOptions one, three;
  three.threads = 3;
  const auto a = check_condition_star(dot, star, 1, 3, 6, {}, {}, one);
  const auto b = check_condition_star(dot, star, 1, 3, 6, {}, {}, three);
  EXPECT_EQ(a.minimal_M_sq, b.minimal_M_sq);
  EXPECT_EQ(a.witnesses.size(), b.witnesses.size());
  EXPECT_EQ(a.candidates_tested, b.candidates_tested);
  ASSERT_TRUE(a.maximizer && b.maximizer);
  EXPECT_EQ(a.maximizer->g, b.maximizer->g);
  EXPECT_EQ(a.maximizer->a, b.maximizer->a);
}

TEST(WitnessGrowth, ClosedFormIHalfSquared) {
  const auto rows = witness_growth_scan(dot, star, 1, canonical_family, 16);
  ASSERT_EQ(rows.size(), 17u);
  EXPECT_EQ(rows[0].d_sq_x, Rational(0));
  EXPECT_EQ(rows[0].d_sq_y, Rational(0));
  EXPECT_EQ(rows[1].d_sq_y, Rational(1, 2));
  EXPECT_EQ(rows[4].d_sq_y, Rational(8));
  for (const auto& r : rows) {
    EXPECT_EQ(r.d_sq_x, Rational(0));
    EXPECT_TRUE(r.meets_x);
    EXPECT_EQ(r.d_sq_y, Rational(r.i * r.i, 2));
  }
}
