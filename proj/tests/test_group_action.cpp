#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cat0bd/group_action.hpp"
#include "oracles.hpp"

using namespace cat0bd;

namespace {
SpacePoint P(const char* w, Rational h) { return space_point(Word(std::string(w)), h); }
GroupElement G(const char* s) { return GroupElement::parse(s); }
BoundaryPoint B(const char* s) { return BoundaryPoint::parse(s); }

/// Largest distance from a sampled point of T x R to the orbit of (e, 0):
/// points on the edges at the root (enough by transitivity on vertices with
/// matching height class) and on one period of heights.
double covering_radius_oracle(const ActionSpec& spec, int grid) {
  const double zeta = spec.z_shift.to_double();
  std::vector<std::pair<TreePointF, double>> orbit_vertices;  // vertex, psi
  for (const auto& w : oracle::reduced_words(4))
    orbit_vertices.push_back({TreePointF::vertex(Word(w)), psi(spec, Word(w)).to_double()});
  double worst = 0;
  for (const char* first : {"a", "b", "A", "B"}) {
    for (int i = 0; i <= grid; ++i) {
      const double s = static_cast<double>(i) / grid;
      const TreePointF x = s == 0 ? TreePointF::vertex(Word()) : s == 1 ? TreePointF::vertex(Word(first))
                                                                         : TreePointF(Word(first), s);
      for (int j = 0; j <= grid; ++j) {
        const double h = zeta * j / grid;
        double best = 1e9;
        for (const auto& [v, ps] : orbit_vertices) {
          const double dt = tree_dist(x, v);
          if (dt > 3) continue;
          const double off = std::remainder(h - ps, zeta);
          best = std::min(best, dt * dt + off * off);
        }
        worst = std::max(worst, best);
      }
    }
  }
  return std::sqrt(worst);
}
}  // namespace

TEST(ActionSpec, Presets) {
  EXPECT_EQ(ActionSpec::star().weight_b, Rational(2));
  EXPECT_EQ(ActionSpec::scaled2().z_shift, Rational(2));
  EXPECT_TRUE(load_spec("dot").same_action(ActionSpec(0, 0, 1)));
  EXPECT_THROW(ActionSpec(0, 0, 0), std::invalid_argument);
  EXPECT_THROW(load_spec("no-such-preset-or-file"), std::invalid_argument);
}

TEST(ActionSpec, ConfigText) {
  const auto s = parse_spec_config("# comment\nweight_a = 1/2\nweight_b=3\n z_shift = 2 \nname = odd\n");
  EXPECT_EQ(s.weight_a, Rational(1, 2));
  EXPECT_EQ(s.weight_b, Rational(3));
  EXPECT_EQ(s.z_shift, Rational(2));
  EXPECT_EQ(s.name, "odd");
  EXPECT_THROW(parse_spec_config("weight_c = 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_spec_config("weight_a 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_spec_config("z_shift = -1\n"), std::invalid_argument);
}

TEST(ActionSpec, LoadFromFile) {
  const std::string path = ::testing::TempDir() + "half.action";
  {
    std::ofstream out(path);
    out << "weight_b = 1/2\n";
  }
  const auto s = load_spec(path);
  EXPECT_EQ(s.weight_b, Rational(1, 2));
  EXPECT_EQ(s.z_shift, Rational(1));
  std::remove(path.c_str());
}

TEST(Act, Examples) {
  EXPECT_EQ(act(ActionSpec::star(), G("b:0"), P("", 0)), P("b", 2));
  EXPECT_EQ(act(ActionSpec::dot(), G(":1"), P("", 0)), P("", 1));
  EXPECT_EQ(act(ActionSpec::scaled2(), G("aB:3"), P("b", 1)), P("a", 7));
  for (const auto& spec : {ActionSpec::dot(), ActionSpec::star(), ActionSpec::scaled2()})
    EXPECT_EQ(act(spec, GroupElement::identity(), P("ab", Rational(1, 3))), P("ab", Rational(1, 3)));
}

TEST(Act, EdgePointsFollowTheirEdge) {
  // (a+1/4) is a quarter of the way from e to a. A maps that edge onto the
  // edge from A to e, so the image is 3/4 from e.
  const SpacePoint x{TreePoint(Word("a"), Rational(1, 4)), 0};
  const SpacePoint y = act(ActionSpec::dot(), G("A:0"), x);
  EXPECT_EQ(y.tree, TreePoint(Word("A"), Rational(3, 4)));
  EXPECT_EQ(tree_dist(y.tree, TreePoint::vertex(Word())), Rational(3, 4));
}

TEST(ActBoundary, Examples) {
  EXPECT_EQ(act_boundary(ActionSpec::star(), G("a:0"), B("[b^inf,1]")), B("[a(b)^inf,1]"));
  EXPECT_EQ(act_boundary(ActionSpec::dot(), G("ab:5"), B("[pole,+]")), B("[pole,+]"));
  EXPECT_EQ(act_boundary(ActionSpec::dot(), G("A:0"), B("[a^inf,0]")), B("[a^inf,0]"));
}

TEST(OrbitLimit, CanonicalFamilyLimits) {
  EXPECT_EQ(orbit_limit(ActionSpec::star(), G("ab:0")), B("[(ab)^inf,1]"));
  for (int i = 1; i <= 6; ++i) {
    const std::string w = std::string(static_cast<std::size_t>(i), 'a') + std::string(static_cast<std::size_t>(i), 'b');
    EXPECT_EQ(orbit_limit(ActionSpec::dot(), GroupElement(Word(w), 0)).dir().slope, Rational(0));
  }
  EXPECT_EQ(orbit_limit(ActionSpec::star(), G("a:0")), B("[a^inf,0]"));
}

TEST(OrbitLimit, ConjugatesAndPoles) {
  EXPECT_EQ(orbit_limit(ActionSpec::star(), G("abA:0")), B("[a(b)^inf,2]"));
  EXPECT_EQ(orbit_limit(ActionSpec::dot(), G("ab:1")), B("[(ab)^inf,1/2]"));
  EXPECT_EQ(orbit_limit(ActionSpec::dot(), G(":3")), B("[pole,+]"));
  EXPECT_EQ(orbit_limit(ActionSpec::star(), G(":-1")), B("[pole,-]"));
  EXPECT_THROW(orbit_limit(ActionSpec::dot(), GroupElement::identity()), NoLimit);
}

TEST(OrbitLimit, MatchesLongOrbitDirection) {
  // Direction of g^n . x0 for large n: tree distance grows like n|c|, height
  // like n * shift.
  oracle::Gen gen(8);
  const ActionSpec spec(Rational(1, 2), Rational(-1), Rational(1, 3));
  for (int i = 0; i < 100; ++i) {
    const GroupElement g = gen.element(4, 2);
    if (cyclic_reduce(g.word).core.empty()) continue;
    const BoundaryPoint lim = orbit_limit(spec, g);
    const SpacePoint far = act(spec, power(g, 400), SpacePoint{});
    const double ratio = far.height.to_double() / tree_dist(TreePoint{}, far.tree).to_double();
    EXPECT_NEAR(ratio, lim.dir().slope.to_double(), 0.05);
    EXPECT_EQ(common_prefix_length(lim.dir().end, power_end(power(g, 400).word)), std::nullopt);
  }
}

TEST(CoveringRadius, UniformWeights) {
  const auto dot = covering_radius(ActionSpec::dot());
  EXPECT_TRUE(dot.exact);
  EXPECT_EQ(*dot.value_sq, Rational(1, 2));
  EXPECT_NEAR(dot.value, std::sqrt(2.0) / 2, 1e-15);
  EXPECT_EQ(*covering_radius(ActionSpec::star()).value_sq, Rational(1, 2));
  EXPECT_EQ(*covering_radius(ActionSpec::scaled2()).value_sq, Rational(5, 4));
  EXPECT_NEAR(covering_radius(ActionSpec::dot()).value, covering_radius_oracle(ActionSpec::dot(), 40), 1e-12);
  EXPECT_NEAR(covering_radius(ActionSpec::scaled2()).value, covering_radius_oracle(ActionSpec::scaled2(), 40),
              1e-12);
}

TEST(CoveringRadius, MixedClassesAgreeWithGridOracle) {
  // Each edge joins height classes offset by 1/2. The worst point sits on the
  // edge 3/8 from one end, level with the far class: d^2 = 9/64 + 1/4.
  const ActionSpec half(Rational(1, 2), Rational(1, 2), 1);
  const auto cr = covering_radius(half);
  EXPECT_NEAR(cr.value, 0.625, 1e-6);
  EXPECT_NEAR(cr.value, covering_radius_oracle(half, 64), 1e-6);
  // Only b mixes classes; a-edges keep the uniform value.
  const ActionSpec b_half(0, Rational(1, 2), 1);
  EXPECT_NEAR(covering_radius(b_half).value, std::sqrt(2.0) / 2, 1e-6);
}

TEST(ConstantsLedger, Formulas) {
  const auto l = ConstantsLedger::make(1, 2, 2, 0);
  EXPECT_EQ(l.N_tilde, Rational(2));
  EXPECT_EQ(l.M_tilde, Rational(8));
  EXPECT_EQ(l.M_prime, Rational(10));
  EXPECT_EQ(l.c_bar, Rational(28));
  EXPECT_EQ(l.continuity_r(2), Rational(24));
  EXPECT_EQ(l.spread_r(1), Rational(7));
  EXPECT_EQ(l.image_cover_radius(), Rational(33));
  EXPECT_EQ(l.separation_bound(40), Rational(-23));
  auto broken = l;
  broken.M_prime = Rational(11);
  EXPECT_THROW(broken.verify(), std::logic_error);
  EXPECT_THROW(ConstantsLedger::make(1, 1, Rational(1, 2), 0), std::invalid_argument);
}
