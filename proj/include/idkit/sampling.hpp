#pragma once
// Sampling from process specs with fair coin flips, empirical processes, and
// the cyclic spread code.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "idkit/bit_source.hpp"
#include "idkit/bitstring.hpp"
#include "idkit/errors.hpp"
#include "idkit/info_measures.hpp"
#include "idkit/process_spec.hpp"

namespace idkit {

struct DiscreteSample {
  Symbol symbol = 0;
  std::uint64_t bits_used = 0;
};

/// Inverse CDF on a binary fraction U = 0.b1 b2 ... read from `src` one bit at
/// a time until the dyadic interval holding U fits inside a single CDF cell.
/// Never reads more than 53 bits because every boundary is a multiple of 2^-53.
inline DiscreteSample sample_discrete(const IidSpec& spec, BitSource& src) {
  const auto bounds = spec.boundaries();
  std::uint64_t a = 0;
  int n = 0;
  for (;;) {
    const int shift = IidSpec::kDyadicBits - n;
    const std::uint64_t lo = a << shift;
    const std::uint64_t hi = (a + 1) << shift;
    // cell s holds lo: bounds[s] <= lo < bounds[s + 1]
    const auto it = std::upper_bound(bounds.begin(), bounds.end(), lo);
    const auto s = static_cast<std::size_t>(it - bounds.begin()) - 1;
    if (hi <= bounds[s + 1]) return {static_cast<Symbol>(s), static_cast<std::uint64_t>(n)};
    a = (a << 1) | src.next_bit();
    ++n;
  }
}

inline Sequence iid_sample(const IidSpec& spec, std::size_t t, BitSource& src) {
  Sequence out;
  out.reserve(t);
  for (std::size_t k = 0; k < t; ++k) out.push_back(sample_discrete(spec, src).symbol);
  return out;
}

inline const IidSpec& markov_step(const MarkovSpec& m, std::span<const Symbol> context) { return m.step(context); }

/// Draws the hidden prehistory from the initial-context distribution, then t
/// emitted symbols. Only the emitted symbols are returned; the prehistory's
/// context code is written to `prehistory` when given.
inline Sequence markov_sample(const MarkovSpec& m, std::size_t t, BitSource& src, std::size_t* prehistory = nullptr) {
  std::size_t ctx = 0;
  if (m.num_contexts() > 1) ctx = sample_discrete(IidSpec(m.initial_distribution()), src).symbol;
  if (prehistory) *prehistory = ctx;
  Sequence out;
  out.reserve(t);
  for (std::size_t k = 0; k < t; ++k) {
    const Symbol x = sample_discrete(m.step(ctx), src).symbol;
    out.push_back(x);
    ctx = m.shift(ctx, x);
  }
  return out;
}

/// Per-context symbol counts of an observed stream. The first L symbols only
/// build the context; counting starts once a full context is available.
class EmpiricalProcess {
 public:
  EmpiricalProcess(std::size_t alphabet, std::size_t memory) : alphabet_(alphabet), memory_(memory) {
    if (alphabet_ == 0) throw DomainError("alphabet must contain at least one symbol");
    double contexts = std::pow(static_cast<double>(alphabet_), static_cast<double>(memory_));
    if (contexts > static_cast<double>(MarkovSpec::kMaxContexts)) throw RefusalError("too many contexts");
    num_contexts_ = static_cast<std::size_t>(contexts);
    counts_.assign(num_contexts_ * alphabet_, 0);
  }

  std::size_t alphabet_size() const noexcept { return alphabet_; }
  std::size_t memory() const noexcept { return memory_; }
  std::size_t num_contexts() const noexcept { return num_contexts_; }
  /// Symbols counted (excludes the context-building prefix).
  std::uint64_t observations() const noexcept { return total_; }

  /// Counts `symbol` under the explicit context code.
  void record(std::size_t context, Symbol symbol) {
    if (context >= num_contexts_) throw PreconditionError("context code outside the process");
    if (symbol >= alphabet_) throw DomainError("symbol outside alphabet");
    ++counts_[context * alphabet_ + symbol];
    ++total_;
  }

  /// Streams one symbol, tracking the context from the stream itself.
  void observe(Symbol symbol) {
    if (symbol >= alphabet_) throw DomainError("symbol outside alphabet");
    if (seen_ >= memory_) record(window_, symbol);
    if (memory_ > 0) window_ = (window_ * alphabet_ + symbol) % num_contexts_;
    ++seen_;
  }

  std::uint64_t count(std::size_t context, Symbol symbol) const { return counts_.at(context * alphabet_ + symbol); }

  std::uint64_t context_count(std::size_t context) const {
    std::uint64_t n = 0;
    for (std::size_t x = 0; x < alphabet_; ++x) n += counts_.at(context * alphabet_ + x);
    return n;
  }

  /// Relative frequencies in `context`; throws UndefinedDistributionError if
  /// the context never occurred.
  ProbVector distribution(std::size_t context) const {
    if (context >= num_contexts_) throw PreconditionError("context code outside the process");
    return ProbVector::from_counts(
        std::span<const std::uint64_t>(counts_.data() + context * alphabet_, alphabet_));
  }

  std::size_t context_code(std::span<const Symbol> context) const {
    if (context.size() != memory_) throw PreconditionError("context length differs from memory L");
    std::size_t code = 0;
    for (Symbol s : context) {
      if (s >= alphabet_) throw DomainError("context symbol outside alphabet");
      code = code * alphabet_ + s;
    }
    return code;
  }

  friend bool operator==(const EmpiricalProcess&, const EmpiricalProcess&) = default;

 private:
  std::size_t alphabet_;
  std::size_t memory_;
  std::size_t num_contexts_ = 1;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::uint64_t seen_ = 0;
  std::size_t window_ = 0;
};

inline EmpiricalProcess empirical_update(EmpiricalProcess e, std::span<const Symbol> context, Symbol symbol) {
  e.record(e.context_code(context), symbol);
  return e;
}

inline ProbVector empirical_dist(const EmpiricalProcess& e, std::span<const Symbol> context) {
  return e.distribution(e.context_code(context));
}

inline EmpiricalProcess empirical_process(std::size_t alphabet, std::size_t memory, std::span<const Symbol> seq) {
  EmpiricalProcess e(alphabet, memory);
  for (Symbol x : seq) e.observe(x);
  return e;
}

/// Context-frequency weighted relative entropy sum_c w_c D(Xi_c || delta_c).
/// Zero observations give 0; infinite when Xi puts mass where the spec has none.
inline Bits empirical_divergence(const EmpiricalProcess& e, const MarkovSpec& spec) {
  if (e.alphabet_size() != spec.alphabet_size() || e.memory() != spec.memory())
    throw DomainError("empirical process and spec differ in alphabet or memory");
  if (e.observations() == 0) return 0.0;
  Bits d = 0.0;
  for (std::size_t c = 0; c < e.num_contexts(); ++c) {
    const auto n = e.context_count(c);
    if (n == 0) continue;
    d += static_cast<double>(n) / static_cast<double>(e.observations()) *
         kl_divergence(e.distribution(c), spec.step(c).distribution());
  }
  return d;
}

/// Cyclic spread code: message bit b selects component b, and position j of the
/// observation stream carries message bit (j mod length).
class SpreadCode {
 public:
  SpreadCode(std::size_t message_length, IidSpec zero, IidSpec one)
      : length_(message_length), components_{std::move(zero), std::move(one)} {
    if (length_ < 1) throw DomainError("message length must be at least 1");
    if (components_[0].alphabet_size() != components_[1].alphabet_size())
      throw DomainError("spread components over different alphabets");
    if (kl_divergence(components_[0].distribution(), components_[1].distribution()) <= 0.0 &&
        kl_divergence(components_[1].distribution(), components_[0].distribution()) <= 0.0)
      throw DomainError("spread components are identical and carry no information");
  }

  std::size_t message_length() const noexcept { return length_; }
  const IidSpec& component(std::size_t bit) const { return components_.at(bit); }

 private:
  std::size_t length_;
  std::array<IidSpec, 2> components_;
};

inline Sequence spread_encode(const SpreadCode& code, const BitString& message, std::size_t t, BitSource& src) {
  if (t < 1) throw DomainError("spread encoding needs t >= 1");
  if (message.length() != code.message_length()) throw DomainError("message length differs from the code's");
  Sequence out;
  out.reserve(t);
  for (std::size_t j = 0; j < t; ++j)
    out.push_back(sample_discrete(code.component(message[j % message.length()]), src).symbol);
  return out;
}

struct SpreadDecoding {
  std::vector<std::optional<std::uint8_t>> bits;  // nullopt: undetermined
  std::vector<Bits> llr;                           // log2 P(obs | 1) / P(obs | 0)

  bool complete() const {
    return std::all_of(bits.begin(), bits.end(), [](const auto& b) { return b.has_value(); });
  }

  /// Undetermined bits read as 0.
  BitString decoded() const {
    std::vector<std::uint8_t> out;
    out.reserve(bits.size());
    for (const auto& b : bits) out.push_back(b.value_or(0));
    return BitString(std::move(out));
  }

  /// Posterior probability that at least one bit is wrong under a uniform prior
  /// per bit; undetermined bits count as coin flips.
  double message_error_probability() const {
    double correct = 1.0;
    for (std::size_t m = 0; m < bits.size(); ++m) {
      if (!bits[m]) {
        correct *= 0.5;
        continue;
      }
      const double a = std::abs(llr[m]);
      correct *= std::isinf(a) ? 1.0 : 1.0 - 1.0 / (1.0 + std::exp2(a));
    }
    return 1.0 - correct;
  }
};

/// Per-index maximum likelihood over the positions that carry each bit.
inline SpreadDecoding spread_decode(std::span<const Symbol> observations, std::size_t message_length,
                                   const SpreadCode& code) {
  if (message_length < 1) throw DomainError("message length must be at least 1");
  std::vector<Bits> ll0(message_length, 0.0), ll1(message_length, 0.0);
  std::vector<std::size_t> seen(message_length, 0);
  const auto& p0 = code.component(0).distribution();
  const auto& p1 = code.component(1).distribution();
  for (std::size_t j = 0; j < observations.size(); ++j) {
    const Symbol x = observations[j];
    if (x >= p0.size()) throw DomainError("observation outside the components' alphabet");
    const std::size_t m = j % message_length;
    ll0[m] -= surprisal(p0[x]);
    ll1[m] -= surprisal(p1[x]);
    ++seen[m];
  }
  SpreadDecoding out;
  out.bits.resize(message_length);
  out.llr.resize(message_length, 0.0);
  for (std::size_t m = 0; m < message_length; ++m) {
    if (seen[m] == 0) continue;
    const bool impossible0 = std::isinf(ll0[m]);
    const bool impossible1 = std::isinf(ll1[m]);
    if (impossible0 && impossible1) continue;
    if (impossible0) out.llr[m] = kInfiniteBits;
    else if (impossible1) out.llr[m] = -kInfiniteBits;
    else out.llr[m] = ll1[m] - ll0[m];
    if (out.llr[m] > 0.0) out.bits[m] = 1;
    else if (out.llr[m] < 0.0) out.bits[m] = 0;
  }
  return out;
}

}  // namespace idkit
