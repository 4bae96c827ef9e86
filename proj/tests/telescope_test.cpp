// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "twosided/telescope.hpp"

using namespace twosided;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;
}

std::int64_t factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

// sum_{j <= N} j!, the forced m_1 for k = 1 and d_n = n + 1
std::int64_t factorial_sum(int N) {
  std::int64_t s = 0;
  for (int j = 1; j <= N; ++j) s += factorial(j);
  return s;
}

}  // namespace

TEST(Tower, DegreesAndTails) {
  const TelescopeTower canon;
  EXPECT_EQ(canon.degree(1), 2);
  EXPECT_EQ(canon.degree(5), 6);
  const TelescopeTower mixed({7, 3}, TailRule::parse("constant:4"));
  EXPECT_EQ(mixed.degree(1), 7);
  EXPECT_EQ(mixed.degree(2), 3);
  EXPECT_EQ(mixed.degree(9), 4);
  EXPECT_EQ(TailRule::parse("constant:4").str(), "constant:4");
  EXPECT_EQ(kind_of([] { TailRule::parse("geometric"); }), ErrorKind::UnsupportedTail);
  EXPECT_EQ(kind_of([] { TailRule::parse("constant:1"); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { TelescopeTower({2, 1}); }), ErrorKind::InvalidInput);
}

TEST(Tower, LevelSizesAndCap) {
  const TelescopeTower canon;
  const auto s = canon.level_sizes(4);
  EXPECT_EQ(s, (std::vector<std::size_t>{144, 72, 24, 6}));
  for (std::size_t n = 1; n < 4; ++n) EXPECT_EQ(s[n - 1], s[n] * canon.degree(n));
  EXPECT_NO_THROW(canon.level_sizes(7));
  EXPECT_EQ(kind_of([&] { canon.level_sizes(8); }), ErrorKind::SizeCap);
}

TEST(Gluing, NormalForm) {
  EXPECT_EQ(GluingData({1, 0, 0}, 0).support, (std::vector<std::int64_t>{1}));
  EXPECT_EQ(GluingData({1, 2, 2}, 2).support, (std::vector<std::int64_t>{1}));
  const GluingData g({4, 5}, 1);
  EXPECT_EQ(g.k(1), 4);
  EXPECT_EQ(g.k(2), 5);
  EXPECT_EQ(g.k(3), 1);
}

TEST(Truncation, SingleCircle) {
  const Truncation t = build_truncation(TelescopeTower{}, 1);
  EXPECT_EQ(t.complex->vertex_count(), 6u);
  EXPECT_EQ(t.complex->triangle_count(), 0u);
  EXPECT_TRUE(t.h2->is_zero());
  EXPECT_EQ(t.h1->free_rank, 1u);
}

TEST(Truncation, CohomologyOfCircle) {
  const Truncation t = build_truncation(TelescopeTower({2, 3}), 3);
  EXPECT_EQ(t.h1->describe(), "Z");
  EXPECT_TRUE(t.h2->is_zero());
  for (std::size_t N = 1; N <= 5; ++N) {
    const Truncation c = build_truncation(TelescopeTower{}, N);
    EXPECT_TRUE(c.h2->is_zero()) << N;
    EXPECT_EQ(c.complex->euler_characteristic(), 0) << N;
  }
}

TEST(Truncation, CylinderBlocksHaveZeroEuler) {
  const Truncation t = build_truncation(TelescopeTower{}, 4);
  for (std::size_t n = 1; n < 4; ++n) {
    const Subcomplex b = cylinder_block(t, n);
    EXPECT_EQ(b.complex->euler_characteristic(), 0) << n;
    EXPECT_EQ(b.complex->triangle_count(), 2 * t.sizes[n - 1]);
  }
}

TEST(Truncation, DegreeMapIsSimplicial) {
  // every level-n edge maps onto a level-(n+1) edge under j -> j mod L_{n+1}
  const Truncation t = build_truncation(TelescopeTower({3, 2}), 3);
  for (std::size_t n = 1; n < 3; ++n)
    for (std::size_t j = 0; j < t.sizes[n - 1]; ++j)
      EXPECT_TRUE(t.complex->edge(t.vertex(n + 1, j), t.vertex(n + 1, j + 1)).has_value());
}

TEST(Bundle, ZeroGluingIsConstant) {
  const TelescopeTower tw;
  const Truncation t = build_truncation(tw, 3);
  const PhaseSection s = bundle_from_gluing(tw, t, GluingData{});
  for (const auto& v : s.values) EXPECT_NEAR(std::abs(v(0, 0) - 1.0), 0.0, 1e-15);
  const ChernCocycle cc = chern_cocycle(s);
  EXPECT_EQ(cc.total(), 0);
  EXPECT_TRUE(std::all_of(cc.w.begin(), cc.w.end(), [](auto x) { return x == 0; }));
}

TEST(Bundle, SingleCylinderWinding) {
  const TelescopeTower tw;
  const Truncation t = build_truncation(tw, 2);
  const PhaseSection s = bundle_from_gluing(tw, t, GluingData({1}));
  EXPECT_EQ(extract_gluing(tw, t, s), GluingData({1}));
  EXPECT_EQ(level_winding(s, t, 1) - 2 * level_winding(s, t, 2), 1);
  EXPECT_TRUE(chern_class(chern_cocycle(s)).is_zero());
}

TEST(Bundle, RoundtripRandomGluing) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> kd(-3, 3);
  for (const auto& tw : {TelescopeTower{}, TelescopeTower({2, 2, 2}), TelescopeTower({5, 2, 3})})
    for (std::size_t N = 1; N <= 4; ++N) {
      const Truncation t = build_truncation(tw, N, false);
      for (int trial = 0; trial < 25; ++trial) {
        std::vector<std::int64_t> k;
        for (std::size_t n = 1; n < N; ++n) k.push_back(kd(rng));
        const GluingData g(k);
        EXPECT_EQ(extract_gluing(tw, t, bundle_from_gluing(tw, t, g)), g);
      }
    }
}

TEST(Trivialization, BackSubstitution) {
  const TelescopeTower tw({2, 3, 4, 5});
  const auto m = truncation_trivialization(tw, 4, GluingData({1, 1, 1, 1}));
  ASSERT_EQ(m.size(), 5u);
  EXPECT_EQ(m, (std::vector<BigInt>{33, 16, 5, 1, 0}));
  EXPECT_EQ(m.front(), BigInt(factorial_sum(4)));
  for (const auto& x : truncation_trivialization(tw, 4, GluingData{})) EXPECT_EQ(x, 0);
}

TEST(Trivialization, RecurrenceProperty) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> kd(-5, 5);
  const TelescopeTower tw;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> k;
    for (int n = 0; n < 6; ++n) k.push_back(kd(rng));
    const GluingData g(k, kd(rng));
    const auto m = truncation_trivialization(tw, 8, g);
    EXPECT_EQ(m.back(), 0);
    for (std::size_t n = 1; n <= 8; ++n) EXPECT_EQ(m[n - 1], BigInt(g.k(n)) + BigInt(tw.degree(n)) * m[n]);
  }
}

TEST(Decision, FiniteSupportIsTrivial) {
  const TelescopeTower tw;
  const GluingData g({3, -1, 0, 2});
  const TowerDecision d = is_globally_trivial(tw, g);
  ASSERT_TRUE(d.trivial);
  EXPECT_EQ(d.tail_gauge, 0);
  for (std::size_t n = 1; n <= 30; ++n)
    EXPECT_EQ(d.gauge_at(n), BigInt(g.k(n)) + BigInt(tw.degree(n)) * d.gauge_at(n + 1)) << n;
  EXPECT_EQ(d.gauge_at(5), 0);
  EXPECT_EQ(tower_verdict(d).kind, VerdictKind::InTM0);
}

TEST(Decision, ConstantTailOneIsPhantom) {
  const TelescopeTower tw;
  const TowerDecision d = is_globally_trivial(tw, GluingData({}, 1));
  ASSERT_FALSE(d.trivial);
  ASSERT_TRUE(d.contradiction.has_value());
  EXPECT_EQ(d.contradiction->first, 4u);
  EXPECT_EQ(d.contradiction->second, 5u);
  const auto& w4 = d.windows[3];
  const auto& w5 = d.windows[4];
  EXPECT_EQ(w4.residue, 33);
  EXPECT_EQ(w4.modulus, 120);
  EXPECT_EQ(w5.residue, 153);
  EXPECT_EQ(w5.modulus, 720);
  // both sums sit below their modulus, so each window pins m_1 exactly
  EXPECT_LT(w4.sum, w4.modulus);
  EXPECT_LT(w5.sum, w5.modulus);
  EXPECT_EQ(d.excluded_radius, 87);
  for (int N = 1; N <= 5; ++N) EXPECT_EQ(d.windows[N - 1].sum, BigInt(factorial_sum(N)));
  EXPECT_EQ(tower_verdict(d).kind, VerdictKind::InClosureNotTM0);
}

TEST(Decision, ExhaustiveSearchAgreesWithResidues) {
  const TelescopeTower tw;
  // windows up to 5 leave exactly the residue class of 153 mod 720
  const auto s5 = exhaustive_gauge_search(tw, GluingData({}, 1), 5, 2000);
  EXPECT_EQ(s5, (std::vector<std::int64_t>{-1287, -567, 153, 873, 1593}));
  // the radius excluded by the certificate pair really is empty
  for (auto m : exhaustive_gauge_search(tw, GluingData({}, 1), 5, 86)) ADD_FAILURE() << m;
  // ten windows leave nothing within 10^6 for either tail
  EXPECT_TRUE(exhaustive_gauge_search(tw, GluingData({}, 1), 10, 1000000).empty());
  EXPECT_TRUE(exhaustive_gauge_search(tw, GluingData({}, -2), 10, 1000000).empty());
}

TEST(Decision, ConstantTailMinusTwo) {
  const TowerDecision d = is_globally_trivial(TelescopeTower{}, GluingData({}, -2));
  EXPECT_FALSE(d.trivial);
  EXPECT_EQ(d.windows[3].sum, -2 * factorial_sum(4));
}

TEST(Decision, ConstantDegreeTail) {
  const TelescopeTower three({}, TailRule::parse("constant:3"));
  const TowerDecision yes = is_globally_trivial(three, GluingData({1, 1}, 4));
  ASSERT_TRUE(yes.trivial);
  EXPECT_EQ(yes.tail_gauge, -2);
  for (std::size_t n = 1; n <= 20; ++n)
    EXPECT_EQ(yes.gauge_at(n), BigInt(GluingData({1, 1}, 4).k(n)) + 3 * yes.gauge_at(n + 1));
  EXPECT_FALSE(is_globally_trivial(three, GluingData({}, 1)).trivial);
  EXPECT_TRUE(is_globally_trivial(TelescopeTower({}, TailRule::parse("constant:2")), GluingData({}, 7)).trivial);
}

TEST(Demo, PhantomFamily) {
  const DemoReport r = phantom_operator_demo(TelescopeTower{}, 4, GluingData({}, 1));
  ASSERT_EQ(r.stages.size(), 4u);
  const std::vector<BigInt> expect{1, 3, 9, 33};
  for (std::size_t i = 0; i < 4; ++i) {
    const DemoStage& s = r.stages[i];
    EXPECT_EQ(s.m1, expect[i]);
    EXPECT_TRUE(s.lengths_one);
    EXPECT_TRUE(s.completely_positive);
    EXPECT_TRUE(s.gluing_roundtrip);
    EXPECT_EQ(s.approximants.size(), i + 1);
    for (const auto& ap : s.approximants) EXPECT_LE(ap.error, 2.0 * ap.delta);
    if (i) {
      // gap is prod_{i<=N-1} d_i k_N
      EXPECT_EQ(s.m1 - r.stages[i - 1].m1, BigInt(factorial(static_cast<int>(i) + 1)));
    }
  }
  EXPECT_TRUE(r.m1_increasing);
  EXPECT_TRUE(r.errors_within);
}

TEST(Demo, TrivialFamilyStabilizes) {
  const DemoReport r = phantom_operator_demo(TelescopeTower{}, 3, GluingData({1}));
  EXPECT_FALSE(r.m1_increasing);
  for (const auto& s : r.stages) EXPECT_EQ(s.m1, 1);
}
