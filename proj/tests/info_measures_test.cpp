#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "idkit/info_measures.hpp"
#include "idkit/process_spec.hpp"
#include "idkit/sequence_measures.hpp"

using namespace idkit;

namespace {

// Reference values computed to 30 digits with mpmath.
constexpr double kH07 = 0.881290899230692618224819224243;
constexpr double kKl07Half = 0.118709100769307381775180775757;
constexpr double kRateChain = 0.553306427355308263459166030085;
constexpr double kJointH = 1.72192809488736234787031942949;
constexpr double kJointI = 0.278071905112637652129680570511;

ProbVector random_dist(std::mt19937_64& rng, std::size_t k, bool allow_zero) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(k);
  double total = 0.0;
  for (auto& x : v) {
    x = (allow_zero && u(rng) < 0.2) ? 0.0 : u(rng) + 1e-3;
    total += x;
  }
  if (total == 0.0) v[0] = total = 1.0;
  for (auto& x : v) x /= total;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) s += v[i];
  v[k - 1] = std::max(0.0, 1.0 - s);
  return ProbVector(v);
}

}  // namespace

TEST(Surprisal, PowersOfTwo) {
  EXPECT_DOUBLE_EQ(surprisal(0.5), 1.0);
  EXPECT_DOUBLE_EQ(surprisal(1.0), 0.0);
  EXPECT_DOUBLE_EQ(surprisal(0.25), 2.0);
}

TEST(Surprisal, ZeroIsInfiniteNotAnError) { EXPECT_EQ(surprisal(0.0), kInfiniteBits); }

TEST(Surprisal, OutsideUnitIntervalIsDomainError) {
  EXPECT_THROW(surprisal(-0.1), DomainError);
  EXPECT_THROW(surprisal(1.5), DomainError);
  EXPECT_THROW(surprisal(std::nan("")), DomainError);
}

TEST(ProbVector, RejectsBadSimplexPoints) {
  EXPECT_THROW(ProbVector({0.5, 0.6}), DomainError);
  EXPECT_THROW(ProbVector({1.2, -0.2}), DomainError);
  EXPECT_THROW(ProbVector(std::vector<double>{}), DomainError);
  EXPECT_NO_THROW(ProbVector({0.5, 0.5 + 1e-13}));
}

TEST(ProbVector, DyadicAndCounts) {
  const std::vector<std::uint64_t> num{1, 3};
  const auto p = ProbVector::from_dyadic(num, 2);
  EXPECT_EQ(p[0], 0.25);
  EXPECT_EQ(p[1], 0.75);
  const std::vector<std::uint64_t> counts{2, 6};
  EXPECT_EQ(ProbVector::from_counts(counts)[1], 0.75);
  const std::vector<std::uint64_t> none{0, 0};
  EXPECT_THROW(ProbVector::from_counts(none), UndefinedDistributionError);
}

TEST(Entropy, Examples) {
  EXPECT_DOUBLE_EQ(entropy({0.5, 0.5}), 1.0);
  EXPECT_EQ(entropy({1.0, 0.0}), 0.0);
  EXPECT_NEAR(entropy({0.7, 0.3}), kH07, 1e-15);
}

TEST(Divergences, Examples) {
  auto d = divergences({0.5, 0.5}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(d.cross_entropy, 1.0);
  EXPECT_EQ(d.kl, 0.0);
  d = divergences({1.0, 0.0}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(d.cross_entropy, 1.0);
  EXPECT_DOUBLE_EQ(d.kl, 1.0);
  d = divergences({0.7, 0.3}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(d.cross_entropy, 1.0);
  EXPECT_NEAR(d.kl, kKl07Half, 1e-15);
}

TEST(Divergences, AbsoluteContinuityViolationIsInfinite) {
  const auto d = divergences({0.5, 0.5}, {1.0, 0.0});
  EXPECT_EQ(d.kl, kInfiniteBits);
  EXPECT_EQ(d.cross_entropy, kInfiniteBits);
  EXPECT_THROW(divergences({0.5, 0.5}, {0.2, 0.3, 0.5}), DomainError);
}

TEST(JointMeasures, Examples) {
  auto m = joint_measures(JointTable({{0.25, 0.25}, {0.25, 0.25}}));
  EXPECT_DOUBLE_EQ(m.joint_entropy, 2.0);
  EXPECT_DOUBLE_EQ(m.conditional_entropy, 1.0);
  EXPECT_NEAR(m.mutual_information, 0.0, 1e-15);
  m = joint_measures(JointTable({{0.5, 0.0}, {0.0, 0.5}}));
  EXPECT_DOUBLE_EQ(m.joint_entropy, 1.0);
  EXPECT_NEAR(m.conditional_entropy, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(m.mutual_information, 1.0);
  m = joint_measures(JointTable({{0.4, 0.1}, {0.1, 0.4}}));
  EXPECT_NEAR(m.joint_entropy, kJointH, 1e-14);
  EXPECT_NEAR(m.mutual_information, kJointI, 1e-14);
}

TEST(JointMeasures, InvalidTables) {
  EXPECT_THROW(JointTable({{0.5, 0.5}, {0.5, 0.5}}), DomainError);
  EXPECT_THROW(JointTable({{0.5, 0.5}, {0.0}}), DomainError);
  EXPECT_THROW(JointTable({{-0.1, 1.1}}), DomainError);
}

TEST(Properties, NonnegativityAndChainIdentities) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  for (int n = 0; n < 10000; ++n) {
    const std::size_t k = size(rng);
    const auto p = random_dist(rng, k, true);
    const auto q = random_dist(rng, k, true);
    const auto d = divergences(p, q);
    EXPECT_GE(d.kl, 0.0);
    EXPECT_LE(entropy(p), std::log2(static_cast<double>(k)) + 1e-12);
    if (std::isfinite(d.kl)) {
      EXPECT_NEAR(d.kl, d.cross_entropy - entropy(p), 1e-9);
    }

    const std::size_t rows = size(rng), cols = size(rng);
    const auto flat = random_dist(rng, rows * cols, true);
    std::vector<std::vector<double>> table(rows, std::vector<double>(cols));
    for (std::size_t x = 0; x < rows; ++x)
      for (std::size_t y = 0; y < cols; ++y) table[x][y] = flat[x * cols + y];
    const JointTable j(table);
    const auto m = joint_measures(j);
    const Bits hx = entropy(j.marginal_x()), hy = entropy(j.marginal_y());
    EXPECT_GE(m.mutual_information, 0.0);
    EXPECT_NEAR(m.joint_entropy, hy + m.conditional_entropy, 1e-9);
    EXPECT_NEAR(m.mutual_information, hx - m.conditional_entropy, 1e-9);
    EXPECT_NEAR(m.mutual_information, hx + hy - m.joint_entropy, 1e-9);
  }
}

TEST(BlockEntropy, Examples) {
  EXPECT_NEAR(block_entropy(SequenceDist(IidSpec{0.5, 0.5}, 3)), 3.0, 1e-12);
  EXPECT_EQ(block_entropy(SequenceDist(IidSpec{1.0, 0.0}, 10)), 0.0);
  EXPECT_NEAR(block_entropy(SequenceDist(IidSpec{0.7, 0.3}, 2)), 2 * kH07, 1e-12);
}

TEST(BlockEntropy, RefusesLargeHorizons) {
  EXPECT_THROW(block_entropy(SequenceDist(IidSpec{0.5, 0.5}, 21)), RefusalError);
  EXPECT_NO_THROW(SequenceDist(IidSpec{0.5, 0.5}, 20).for_each([](const Sequence&, double) {}));
}

TEST(BlockEntropy, AdditiveForIid) {
  std::mt19937_64 rng(2);
  for (int n = 0; n < 20; ++n) {
    const auto p = random_dist(rng, 3, false);
    for (std::size_t t = 1; t <= 12; ++t)
      EXPECT_NEAR(block_entropy(SequenceDist(IidSpec(p), t)), static_cast<double>(t) * entropy(p), 1e-9);
  }
}

TEST(BlockEntropy, MassSumsToOne) {
  const MarkovSpec m(2, 2, {IidSpec{0.9, 0.1}, IidSpec{0.4, 0.6}, IidSpec{0.3, 0.7}, IidSpec{0.5, 0.5}}, StationaryInit{});
  double mass = 0.0;
  SequenceDist(m, 12).for_each([&](const Sequence&, double p) { mass += p; });
  EXPECT_NEAR(mass, 1.0, 1e-9);
}

TEST(EntropyRate, Examples) {
  EXPECT_DOUBLE_EQ(entropy_rate(IidSpec{0.5, 0.5}), 1.0);
  const MarkovSpec alternator(2, 1, {IidSpec{0.0, 1.0}, IidSpec{1.0, 0.0}}, StationaryInit{});
  EXPECT_EQ(entropy_rate(alternator), 0.0);
  const MarkovSpec chain(2, 1, {IidSpec{0.9, 0.1}, IidSpec{0.2, 0.8}}, StationaryInit{});
  EXPECT_NEAR(entropy_rate(chain), kRateChain, 1e-12);
}

TEST(EntropyRate, EqualsBlockEntropyDifference) {
  std::mt19937_64 rng(3);
  for (std::size_t L = 1; L <= 3; ++L) {
    for (int n = 0; n < 5; ++n) {
      std::vector<IidSpec> delta;
      for (std::size_t c = 0; c < (std::size_t{1} << L); ++c) delta.emplace_back(random_dist(rng, 2, false));
      const MarkovSpec m(2, L, delta, StationaryInit{});
      // the first emitted block of a stationary-initialised chain is a stationary block
      const Bits diff = block_entropy(SequenceDist(m, L + 1)) - block_entropy(SequenceDist(m, L));
      EXPECT_NEAR(entropy_rate(m), diff, 1e-6);
    }
  }
}

TEST(EntropyRate, NonErgodicNamesUnreachableContexts) {
  // two absorbing contexts: 0 stays 0, 1 stays 1
  const MarkovSpec m(2, 1, {IidSpec{1.0, 0.0}, IidSpec{0.0, 1.0}}, ProbVector{0.5, 0.5});
  EXPECT_FALSE(m.is_ergodic());
  try {
    entropy_rate(m);
    FAIL() << "expected a diagnostic";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("unreachable"), std::string::npos) << e.what();
  }
}
