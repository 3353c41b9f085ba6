#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "idkit/process_io.hpp"
#include "idkit/process_spec.hpp"
#include "idkit/sequence_measures.hpp"

using namespace idkit;

namespace {

MarkovSpec chain(double a, double b) { return MarkovSpec(2, 1, {IidSpec{1 - a, a}, IidSpec{b, 1 - b}}); }

}  // namespace

TEST(IidSpec, DyadicRounding) {
  const IidSpec exact{0.25, 0.75};
  EXPECT_EQ(exact.rounding_error(), 0.0);
  EXPECT_EQ(exact.precision_bits(), 2);
  const IidSpec third{1.0 / 3, 2.0 / 3};
  EXPECT_LE(third.rounding_error(), std::ldexp(1.0, -53));
  EXPECT_GT(third.precision_bits(), 40);
  const std::uint64_t num[] = {1, 2, 5};
  const auto d = IidSpec::from_dyadic(num, 3);
  EXPECT_EQ(d[2], 0.625);
  const std::uint64_t bad[] = {1, 1};
  EXPECT_THROW(IidSpec::from_dyadic(bad, 3), DomainError);
}

TEST(MarkovSpec, ValidatesDelta) {
  EXPECT_THROW(MarkovSpec(2, 1, {IidSpec{0.5, 0.5}}), DomainError);
  EXPECT_THROW(MarkovSpec(2, 1, {IidSpec{0.5, 0.5}, IidSpec{0.2, 0.3, 0.5}}), DomainError);
  EXPECT_THROW(MarkovSpec(2, 17, std::vector<IidSpec>{}), RefusalError);
  EXPECT_THROW(MarkovSpec(0, 0, std::vector<IidSpec>{}), DomainError);
}

TEST(MarkovSpec, ContextCodes) {
  const MarkovSpec m(3, 2, std::vector<IidSpec>(9, IidSpec{0.2, 0.3, 0.5}));
  const Sequence ctx{2, 1};
  EXPECT_EQ(m.context_code(ctx), 7u);
  EXPECT_EQ(m.context_symbols(7), ctx);
  // emitting 0 after "21" leaves context "10"
  EXPECT_EQ(m.shift(7, 0), 3u);
  for (std::size_t c = 0; c < 9; ++c) EXPECT_EQ(m.context_code(m.context_symbols(c)), c);
  const Sequence short_ctx{1};
  EXPECT_THROW(m.context_code(short_ctx), PreconditionError);
  const Sequence bad{3, 0};
  EXPECT_THROW(m.context_code(bad), DomainError);
  EXPECT_THROW(m.step(9), PreconditionError);
}

TEST(MarkovSpec, StationaryOfTwoStateChain) {
  // pi_1 = a / (a + b)
  const auto m = chain(0.1, 0.2);
  const auto& pi = m.stationary_distribution();
  EXPECT_NEAR(pi[0], 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(pi[1], 1.0 / 3.0, 1e-10);
}

TEST(MarkovSpec, StationaryIsFixedPoint) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int n = 0; n < 30; ++n) {
    const std::size_t k = 2 + n % 2, L = 1 + n % 3;
    std::size_t contexts = 1;
    for (std::size_t i = 0; i < L; ++i) contexts *= k;
    std::vector<IidSpec> delta;
    for (std::size_t c = 0; c < contexts; ++c) {
      std::vector<double> v(k);
      double s = 0;
      for (auto& x : v) s += x = u(rng);
      for (auto& x : v) x /= s;
      delta.emplace_back(ProbVector(v));
    }
    const MarkovSpec m(k, L, delta);
    const auto& pi = m.stationary_distribution();
    std::vector<double> next(contexts, 0.0);
    for (std::size_t c = 0; c < contexts; ++c)
      for (Symbol x = 0; x < k; ++x) next[m.shift(c, static_cast<Symbol>(x))] += pi[c] * m.step(c)[x];
    for (std::size_t c = 0; c < contexts; ++c) EXPECT_NEAR(next[c], pi[c], 1e-9);
  }
}

TEST(MarkovSpec, PeriodicAlternator) {
  const MarkovSpec alt(2, 1, {IidSpec{0.0, 1.0}, IidSpec{1.0, 0.0}});
  EXPECT_TRUE(alt.is_ergodic());
  EXPECT_NEAR(alt.stationary_distribution()[0], 0.5, 1e-10);
  const Sequence s{0, 1, 0, 1};
  EXPECT_NEAR(sequence_log_probability(alt, s), 1.0, 1e-12);
  const Sequence broken{0, 0};
  EXPECT_EQ(sequence_log_probability(alt, broken), kInfiniteBits);
}

TEST(MarkovSpec, ExplicitAndDistributionInit) {
  const auto base = chain(0.1, 0.2);
  const MarkovSpec pinned(2, 1, {IidSpec{0.9, 0.1}, IidSpec{0.2, 0.8}}, ExplicitContext{{1}});
  EXPECT_EQ(pinned.initial_distribution()[1], 1.0);
  EXPECT_NEAR(std::exp2(-sequence_log_probability(pinned, Sequence{1})), 0.8, 1e-12);
  EXPECT_THROW(MarkovSpec(2, 1, {IidSpec{0.9, 0.1}, IidSpec{0.2, 0.8}}, ProbVector{0.5, 0.5}), DomainError);
  EXPECT_NO_THROW(MarkovSpec(2, 1, {IidSpec{0.9, 0.1}, IidSpec{0.2, 0.8}}, base.stationary_distribution()));
}

TEST(MarkovSpec, NonErgodicReportsUnreachable) {
  const MarkovSpec m(2, 1, {IidSpec{1.0, 0.0}, IidSpec{0.0, 1.0}}, ProbVector{0.5, 0.5});
  EXPECT_FALSE(m.is_ergodic());
  EXPECT_EQ(m.unreachable_contexts().size(), 1u);
  EXPECT_THROW(m.stationary_distribution(), DomainError);
}

TEST(MarkovSpec, WithMemoryPreservesSequenceLaw) {
  const auto m = chain(0.3, 0.6);
  const auto lifted = m.with_memory(3);
  EXPECT_EQ(lifted.num_contexts(), 8u);
  double diff = 0.0;
  SequenceDist(m, 6).for_each([&](const Sequence& s, double p) {
    diff = std::max(diff, std::abs(p - std::exp2(-sequence_log_probability(lifted, s))));
  });
  EXPECT_LT(diff, 1e-12);
  EXPECT_EQ(m.with_memory(1), m);
  EXPECT_THROW(lifted.with_memory(1), DomainError);

  const MarkovSpec iid(IidSpec{0.3, 0.7});
  const auto iid2 = iid.with_memory(2);
  EXPECT_NEAR(entropy_rate(iid2), entropy({0.3, 0.7}), 1e-12);
}

TEST(ContextBelief, HiddenPrehistoryMixes) {
  const auto m = chain(0.1, 0.2);
  ContextBelief belief(m);
  EXPECT_FALSE(belief.context_known());
  // P(X1 = 1) = pi_0 * 0.1 + pi_1 * 0.8
  EXPECT_NEAR(belief.predictive(m, 1), 2.0 / 3 * 0.1 + 1.0 / 3 * 0.8, 1e-10);
  belief.observe(m, 1);
  EXPECT_TRUE(belief.context_known());
  EXPECT_NEAR(belief.predictive(m, 1), 0.8, 1e-12);
}

TEST(SequenceDist, SupportAndRefusal) {
  const SequenceDist d(IidSpec{0.5, 0.5}, 4);
  EXPECT_EQ(d.support_size(), 16.0);
  EXPECT_TRUE(d.enumerable());
  EXPECT_FALSE(SequenceDist(IidSpec{0.2, 0.3, 0.5}, 20).enumerable());
}

TEST(ProcessJson, RoundTrip) {
  const std::vector<MarkovSpec> specs{
      MarkovSpec(IidSpec{0.25, 0.75}),
      chain(0.1, 0.2),
      MarkovSpec(2, 1, {IidSpec{0.9, 0.1}, IidSpec{0.2, 0.8}}, ExplicitContext{{0}}),
      MarkovSpec(2, 1, {IidSpec{0.9, 0.1}, IidSpec{0.2, 0.8}}, chain(0.1, 0.2).stationary_distribution()),
  };
  for (const auto& m : specs) EXPECT_EQ(process_from_json(process_to_json(m)), m);
}

TEST(ProcessJson, Parsing) {
  const auto m = process_from_json(nlohmann::json::parse(
      R"({"alphabet": 2, "L": 1, "delta": [[0.9, 0.1], [0.2, 0.8]], "init": {"context": [1]}})"));
  EXPECT_EQ(m.memory(), 1u);
  EXPECT_EQ(m.initial_distribution()[1], 1.0);
  EXPECT_THROW(process_from_json(nlohmann::json::parse(R"({"L": 1})")), DomainError);
  EXPECT_THROW(process_from_json(nlohmann::json::parse(R"([0.5, "x"])")), DomainError);
  EXPECT_THROW(process_from_json(nlohmann::json::parse(R"({"delta": [[1.0]], "init": "bogus"})")), DomainError);
  EXPECT_THROW(process_from_json(nlohmann::json::parse("3")), DomainError);
}
