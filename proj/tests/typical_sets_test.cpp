#include <cmath>

#include <gtest/gtest.h>

#include "idkit/sampling.hpp"
#include "idkit/typical_sets.hpp"

using namespace idkit;

TEST(TypicalBounds, FairBitLevelSeven) {
  const auto b = typical_set_bounds(MarkovSpec(IidSpec{0.5, 0.5}), 1, 0.7);
  EXPECT_NEAR(b.lower, 0.35, 1e-12);
  EXPECT_NEAR(b.upper, 1.0 / 1.4, 1e-12);
}

TEST(TypicalBounds, LevelOneHasNoSlack) {
  const Bits h = entropy({0.7, 0.3});
  for (std::size_t t = 1; t < 20; ++t) {
    const auto b = typical_set_bounds(h, t, 1.0);
    EXPECT_EQ(b.lower, b.upper);
    EXPECT_NEAR(b.lower, std::exp2(-static_cast<double>(t) * h), 1e-15);
    const auto a = aep_bounds(h, t, 1.0);
    EXPECT_EQ(a.lower, a.upper);
  }
  EXPECT_THROW(typical_set_bounds(h, 1, 0.0), DomainError);
  EXPECT_THROW(typical_set_bounds(h, 1, 1.1), DomainError);
}

TEST(TypicalBounds, GeometricDecay) {
  const Bits h = entropy({0.2, 0.3, 0.5});
  for (std::size_t t = 1; t < 30; ++t) {
    const auto a = typical_set_bounds(h, t, 0.6), b = typical_set_bounds(h, t + 1, 0.6);
    EXPECT_NEAR(b.lower / a.lower, std::exp2(-h), 1e-12);
    EXPECT_NEAR(b.upper / a.upper, std::exp2(-h), 1e-12);
  }
}

TEST(TypicalBounds, AepSlackGrowsPerSymbol) {
  const auto b = aep_bounds(1.0, 10, 0.5);
  EXPECT_DOUBLE_EQ(b.log2_lower, -20.0);
  EXPECT_DOUBLE_EQ(b.log2_upper, 0.0);
}

TEST(WarmUp, CeilingOfRateMinusLog2Q) {
  EXPECT_EQ(warm_up_threshold(1.0, 0.5), 2u);
  EXPECT_EQ(warm_up_threshold(0.5, 0.5), 2u);
  EXPECT_EQ(warm_up_threshold(0.0, 1.0), 0u);
  EXPECT_EQ(warm_up_threshold(1.0, 0.0), std::numeric_limits<std::size_t>::max());
}

TEST(Membership, UniformSourceMakesEverySequenceTypical) {
  const MarkovSpec fair(IidSpec{0.5, 0.5});
  for (std::size_t t : {10u, 50u, 500u}) {
    const Sequence zeros(t, 0);
    for (double q : {0.01, 0.5, 0.99, 1.0}) EXPECT_EQ(typical_membership(fair, zeros, q).region, TypicalRegion::Typical);
  }
}

TEST(Membership, ImprobableSequence) {
  const Sequence ones(100, 1);
  const auto m = typical_membership(MarkovSpec(IidSpec{0.9, 0.1}), ones, 0.6);
  EXPECT_EQ(m.region, TypicalRegion::AtypicalImprobable);
  EXPECT_NEAR(m.surprisal, 100 * std::log2(10.0), 1e-9);
}

TEST(Membership, ProbableSequence) {
  const Sequence zeros(100, 0);
  EXPECT_EQ(typical_membership(MarkovSpec(IidSpec{0.6, 0.4}), zeros, 0.9).region, TypicalRegion::AtypicalProbable);
}

TEST(Membership, UndeterminedBeforeWarmUp) {
  const MarkovSpec spec(IidSpec{0.9, 0.1});
  const Sequence one{1};
  const auto m = typical_membership(spec, one, 0.1);
  EXPECT_FALSE(m.warmed_up);
  EXPECT_EQ(m.region, TypicalRegion::Undetermined);
  EXPECT_EQ(m.warm_up, warm_up_threshold(entropy({0.9, 0.1}), 0.1));
}

TEST(Membership, OwnSamplesAreTypical) {
  const MarkovSpec spec(IidSpec{0.3, 0.7});
  int typical = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    BitSource src(seed);
    const auto s = iid_sample(IidSpec{0.3, 0.7}, 1000, src);
    if (typical_membership(spec, s, 0.6).region == TypicalRegion::Typical) ++typical;
  }
  EXPECT_GE(typical, 190);
}

TEST(Region, Classification) {
  EXPECT_EQ(aep_region(10.0, 10, 1.0, 0.1), TypicalRegion::Typical);
  EXPECT_EQ(aep_region(12.0, 10, 1.0, 0.1), TypicalRegion::AtypicalImprobable);
  EXPECT_EQ(aep_region(8.0, 10, 1.0, 0.1), TypicalRegion::AtypicalProbable);
  EXPECT_STREQ(to_string(TypicalRegion::AtypicalProbable), "atypical-probable");
}

TEST(ThresholdTable, ThresholdTable) {
  const MarkovSpec spec(IidSpec{0.5, 0.5});
  const auto rows = threshold_table(spec, 0.7, 0.3, 10);
  ASSERT_EQ(rows.size(), 10u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    EXPECT_EQ(r.t, i + 1);
    EXPECT_NEAR(r.centre, std::exp2(-static_cast<double>(r.t)), 1e-15);
    // the q band contains the p band, which contains the centre
    EXPECT_LE(r.q_bounds.lower, r.p_bounds.lower);
    EXPECT_LE(r.p_bounds.lower, r.centre);
    EXPECT_LE(r.centre, r.p_bounds.upper);
    EXPECT_LE(r.p_bounds.upper, r.q_bounds.upper);
    if (i > 0) { EXPECT_NEAR(r.centre / rows[i - 1].centre, 0.5, 1e-15); }
  }
  EXPECT_THROW(threshold_table(spec, 0.3, 0.7, 3), DomainError);
}
