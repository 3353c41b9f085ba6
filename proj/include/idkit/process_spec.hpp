#pragma once
// Descriptions of data-generating processes: i.i.d. symbol distributions with exact
// dyadic cumulative boundaries, and finite-memory (L-context) processes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "idkit/errors.hpp"
#include "idkit/info_measures.hpp"

namespace idkit {

using Symbol = std::uint32_t;
using Sequence = std::vector<Symbol>;

/// Distribution of one symbol. Probabilities are held as dyadic rationals
/// m / 2^53 so that inverse-CDF sampling from fair coin flips is exact.
class IidSpec {
 public:
  static constexpr int kDyadicBits = 53;
  static constexpr std::uint64_t kOne = std::uint64_t{1} << kDyadicBits;

  IidSpec() : IidSpec(ProbVector{}) {}

  /// Rounds each cumulative boundary to the nearest multiple of 2^-53.
  explicit IidSpec(const ProbVector& dist) {
    boundaries_.reserve(dist.size() + 1);
    boundaries_.push_back(0);
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
      cumulative += dist[i];
      const double scaled = std::nearbyint(std::min(cumulative, 1.0) * static_cast<double>(kOne));
      boundaries_.push_back(std::max(boundaries_.back(), static_cast<std::uint64_t>(scaled)));
    }
    boundaries_.push_back(kOne);
    finish(&dist);
  }

  IidSpec(std::initializer_list<double> probs) : IidSpec(ProbVector(probs)) {}

  /// Exact dyadic entries numerators[i] / 2^exponent (exponent <= 53).
  static IidSpec from_dyadic(std::span<const std::uint64_t> numerators, int exponent) {
    if (exponent < 0 || exponent > kDyadicBits) throw DomainError("dyadic exponent must be in [0, 53]");
    IidSpec spec;
    spec.boundaries_.assign(1, 0);
    std::uint64_t total = 0;
    for (auto n : numerators) {
      total += n << (kDyadicBits - exponent);
      spec.boundaries_.push_back(total);
    }
    if (numerators.empty() || total != kOne) throw DomainError("dyadic numerators do not sum to 2^exponent");
    spec.finish(nullptr);
    return spec;
  }

  std::size_t alphabet_size() const noexcept { return dist_.size(); }
  const ProbVector& distribution() const noexcept { return dist_; }
  double operator[](std::size_t symbol) const { return dist_[symbol]; }

  /// Cumulative boundaries B_0 = 0 < ... <= B_k = 2^53 in units of 2^-53.
  std::span<const std::uint64_t> boundaries() const noexcept { return boundaries_; }

  /// Largest absolute change any probability suffered in the dyadic rounding.
  double rounding_error() const noexcept { return rounding_error_; }

  /// Smallest D such that every boundary is a multiple of 2^-D.
  int precision_bits() const noexcept { return precision_bits_; }

  friend bool operator==(const IidSpec& a, const IidSpec& b) { return a.boundaries_ == b.boundaries_; }

 private:
  void finish(const ProbVector* requested) {
    std::vector<double> probs;
    probs.reserve(boundaries_.size() - 1);
    for (std::size_t i = 1; i < boundaries_.size(); ++i)
      probs.push_back(std::ldexp(static_cast<double>(boundaries_[i] - boundaries_[i - 1]), -kDyadicBits));
    dist_ = ProbVector(std::move(probs));
    rounding_error_ = 0.0;
    if (requested) {
      for (std::size_t i = 0; i < dist_.size(); ++i)
        rounding_error_ = std::max(rounding_error_, std::abs(dist_[i] - (*requested)[i]));
    }
    std::uint64_t all = 0;
    for (auto b : boundaries_) all |= b;
    precision_bits_ = 0;
    if (all != 0) {
      int trailing = 0;
      while (((all >> trailing) & 1u) == 0) ++trailing;
      precision_bits_ = kDyadicBits - trailing;
    }
  }

  std::vector<std::uint64_t> boundaries_;
  ProbVector dist_;
  double rounding_error_ = 0.0;
  int precision_bits_ = 0;
};

/// Initial-context options for a MarkovSpec.
struct StationaryInit {};
struct ExplicitContext {
  Sequence context;  // oldest symbol first
};
using InitialContext = std::variant<StationaryInit, ExplicitContext, ProbVector>;

/// A process whose next symbol depends on the previous L symbols through delta,
/// a total map from the k^L contexts to symbol distributions. L = 0 is i.i.d.
class MarkovSpec {
 public:
  MarkovSpec() : MarkovSpec(IidSpec{}) {}

  /// The i.i.d. process emitting `spec` at every step.
  MarkovSpec(const IidSpec& spec)  // NOLINT(google-explicit-constructor)
      : MarkovSpec(spec.alphabet_size(), 0, std::vector<IidSpec>{spec}, StationaryInit{}) {}

  MarkovSpec(std::size_t alphabet, std::size_t memory, std::vector<IidSpec> delta,
             InitialContext init = StationaryInit{})
      : alphabet_(alphabet), memory_(memory), delta_(std::move(delta)) {
    if (alphabet_ == 0) throw DomainError("alphabet must contain at least one symbol");
    const double contexts = std::pow(static_cast<double>(alphabet_), static_cast<double>(memory_));
    if (contexts > static_cast<double>(kMaxContexts)) throw RefusalError("too many contexts (k^L > 2^16)");
    num_contexts_ = 1;
    for (std::size_t i = 0; i < memory_; ++i) num_contexts_ *= alphabet_;
    if (delta_.size() != num_contexts_)
      throw DomainError("delta must map all " + std::to_string(num_contexts_) + " contexts");
    for (const auto& d : delta_)
      if (d.alphabet_size() != alphabet_) throw DomainError("delta entry over a different alphabet");
    analyse_ergodicity();
    resolve_initial(init);
  }

  static constexpr std::size_t kMaxContexts = std::size_t{1} << 16;

  std::size_t alphabet_size() const noexcept { return alphabet_; }
  std::size_t memory() const noexcept { return memory_; }
  std::size_t num_contexts() const noexcept { return num_contexts_; }
  bool is_iid() const noexcept { return memory_ == 0; }

  /// Pure lookup of delta for a context code.
  const IidSpec& step(std::size_t context) const {
    if (context >= num_contexts_) throw PreconditionError("context code outside delta");
    return delta_[context];
  }
  /// Pure lookup of delta for an explicit context (oldest symbol first).
  const IidSpec& step(std::span<const Symbol> context) const { return step(context_code(context)); }

  std::span<const IidSpec> delta() const noexcept { return delta_; }

  std::size_t context_code(std::span<const Symbol> context) const {
    if (context.size() != memory_) throw PreconditionError("context length differs from memory L");
    std::size_t code = 0;
    for (Symbol s : context) {
      if (s >= alphabet_) throw DomainError("context symbol outside alphabet");
      code = code * alphabet_ + s;
    }
    return code;
  }

  Sequence context_symbols(std::size_t code) const {
    Sequence ctx(memory_);
    for (std::size_t i = memory_; i-- > 0;) {
      ctx[i] = static_cast<Symbol>(code % alphabet_);
      code /= alphabet_;
    }
    return ctx;
  }

  /// Context after emitting `symbol` in `context`.
  std::size_t shift(std::size_t context, Symbol symbol) const noexcept {
    if (memory_ == 0) return 0;
    return (context * alphabet_ + symbol) % num_contexts_;
  }

  /// Distribution of the hidden prehistory (the L symbols before the first output).
  const ProbVector& initial_distribution() const noexcept { return initial_; }
  const InitialContext& initial_context() const noexcept { return init_; }

  bool is_ergodic() const noexcept { return stationary_.has_value(); }

  /// Stationary context distribution; throws for non-ergodic delta.
  const ProbVector& stationary_distribution() const {
    if (!stationary_) throw DomainError(ergodicity_diagnostic_);
    return *stationary_;
  }

  /// Contexts outside the first closed class when the chain has several.
  std::span<const std::size_t> unreachable_contexts() const noexcept { return unreachable_; }

  /// The same process described with a longer memory (older symbols ignored).
  MarkovSpec with_memory(std::size_t memory) const {
    if (memory < memory_) throw DomainError("cannot shorten the memory of a process");
    if (memory == memory_) return *this;
    std::size_t contexts = 1;
    for (std::size_t i = 0; i < memory; ++i) contexts *= alphabet_;
    std::vector<IidSpec> delta;
    delta.reserve(contexts);
    for (std::size_t c = 0; c < contexts; ++c) delta.push_back(delta_[c % num_contexts_]);
    std::vector<double> init(contexts, 0.0);
    std::size_t extra = contexts / num_contexts_;
    // prehistory extended with uniformly drawn older symbols
    for (std::size_t c = 0; c < contexts; ++c) init[c] = initial_[c % num_contexts_] / static_cast<double>(extra);
    if (std::holds_alternative<StationaryInit>(init_)) return MarkovSpec(alphabet_, memory, std::move(delta));
    MarkovSpec lifted(alphabet_, memory, std::move(delta), StationaryInit{});
    lifted.initial_ = ProbVector(std::move(init));
    lifted.init_ = lifted.initial_;
    return lifted;
  }

  friend bool operator==(const MarkovSpec& a, const MarkovSpec& b) {
    return a.alphabet_ == b.alphabet_ && a.memory_ == b.memory_ && a.delta_ == b.delta_ &&
           a.initial_ == b.initial_;
  }

 private:
  std::vector<std::vector<std::size_t>> successors() const {
    std::vector<std::vector<std::size_t>> next(num_contexts_);
    for (std::size_t c = 0; c < num_contexts_; ++c)
      for (Symbol x = 0; x < alphabet_; ++x)
        if (delta_[c][x] > 0.0) next[c].push_back(shift(c, x));
    return next;
  }

  // Kosaraju's strongly connected components, iterative.
  static std::vector<std::size_t> components(const std::vector<std::vector<std::size_t>>& next,
                                             std::size_t& count) {
    const std::size_t n = next.size();
    std::vector<std::vector<std::size_t>> prev(n);
    for (std::size_t u = 0; u < n; ++u)
      for (auto v : next[u]) prev[v].push_back(u);
    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      std::vector<std::pair<std::size_t, std::size_t>> stack{{s, 0}};
      seen[s] = 1;
      while (!stack.empty()) {
        auto& [u, i] = stack.back();
        if (i < next[u].size()) {
          const std::size_t v = next[u][i++];
          if (!seen[v]) {
            seen[v] = 1;
            stack.emplace_back(v, 0);
          }
        } else {
          order.push_back(u);
          stack.pop_back();
        }
      }
    }
    constexpr auto kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> comp(n, kNone);
    count = 0;
    for (std::size_t k = n; k-- > 0;) {
      const std::size_t s = order[k];
      if (comp[s] != kNone) continue;
      std::vector<std::size_t> stack{s};
      comp[s] = count;
      while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (auto v : prev[u])
          if (comp[v] == kNone) {
            comp[v] = count;
            stack.push_back(v);
          }
      }
      ++count;
    }
    return comp;
  }

  void analyse_ergodicity() {
    const auto next = successors();
    std::size_t count = 0;
    const auto comp = components(next, count);
    std::vector<char> closed(count, 1);
    for (std::size_t u = 0; u < num_contexts_; ++u)
      for (auto v : next[u])
        if (comp[v] != comp[u]) closed[comp[u]] = 0;
    std::vector<std::size_t> closed_ids;
    for (std::size_t u = 0; u < num_contexts_; ++u)
      if (closed[comp[u]] && std::find(closed_ids.begin(), closed_ids.end(), comp[u]) == closed_ids.end())
        closed_ids.push_back(comp[u]);
    if (closed_ids.size() == 1) {
      stationary_ = solve_stationary();
      return;
    }
    for (std::size_t u = 0; u < num_contexts_; ++u)
      if (closed[comp[u]] && comp[u] != closed_ids.front()) unreachable_.push_back(u);
    ergodicity_diagnostic_ = "non-ergodic delta: contexts unreachable from context " +
                             describe(static_cast<std::size_t>(std::find_if(comp.begin(), comp.end(),
                                                                            [&](std::size_t c) {
                                                                              return c == closed_ids.front();
                                                                            }) -
                                                               comp.begin())) +
                             ":";
    for (auto u : unreachable_) ergodicity_diagnostic_ += " " + describe(u);
  }

  std::string describe(std::size_t code) const {
    std::string s = "[";
    for (auto sym : context_symbols(code)) s += std::to_string(sym);
    return s + "]";
  }

  // Power iteration on the lazy chain (I + T) / 2, which shares T's fixed point
  // and converges for periodic chains too.
  ProbVector solve_stationary() const {
    std::vector<double> pi(num_contexts_, 1.0 / static_cast<double>(num_contexts_));
    std::vector<double> next(num_contexts_);
    constexpr std::size_t kMaxIterations = 10'000'000;
    for (std::size_t iter = 0; iter < kMaxIterations; ++iter) {
      std::fill(next.begin(), next.end(), 0.0);
      for (std::size_t c = 0; c < num_contexts_; ++c) {
        if (pi[c] == 0.0) continue;
        next[c] += 0.5 * pi[c];
        for (Symbol x = 0; x < alphabet_; ++x) next[shift(c, x)] += 0.5 * pi[c] * delta_[c][x];
      }
      double change = 0.0;
      for (std::size_t c = 0; c < num_contexts_; ++c) change += std::abs(next[c] - pi[c]);
      pi.swap(next);
      if (change < tolerance::kPowerIteration) break;
    }
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    for (double& v : pi) v = std::clamp(v / total, 0.0, 1.0);
    return ProbVector(std::move(pi));
  }

  void resolve_initial(const InitialContext& init) {
    init_ = init;
    if (std::holds_alternative<StationaryInit>(init)) {
      initial_ = stationary_distribution();
    } else if (const auto* explicit_ctx = std::get_if<ExplicitContext>(&init)) {
      initial_ = ProbVector::point_mass(num_contexts_, context_code(explicit_ctx->context));
    } else {
      const auto& dist = std::get<ProbVector>(init);
      if (dist.size() != num_contexts_) throw DomainError("initial distribution must cover every context");
      std::vector<double> shifted(num_contexts_, 0.0);
      for (std::size_t c = 0; c < num_contexts_; ++c)
        for (Symbol x = 0; x < alphabet_; ++x) shifted[shift(c, x)] += dist[c] * delta_[c][x];
      for (std::size_t c = 0; c < num_contexts_; ++c)
        if (std::abs(shifted[c] - dist[c]) > tolerance::kStationary)
          throw DomainError("initial context distribution is not stationary under delta");
      initial_ = dist;
    }
  }

  std::size_t alphabet_ = 1;
  std::size_t memory_ = 0;
  std::size_t num_contexts_ = 1;
  std::vector<IidSpec> delta_;
  InitialContext init_;
  ProbVector initial_;
  std::optional<ProbVector> stationary_;
  std::vector<std::size_t> unreachable_;
  std::string ergodicity_diagnostic_;
};

/// Forward filter over the current context of a MarkovSpec. While fewer than L
/// symbols have been seen the context is uncertain (hidden prehistory); after
/// that it is pinned to the last L symbols.
class ContextBelief {
 public:
  explicit ContextBelief(const MarkovSpec& spec) {
    const auto& init = spec.initial_distribution();
    weights_.assign(init.begin(), init.end());
    pin_if_certain();
  }

  /// P(next symbol = x | symbols so far).
  double predictive(const MarkovSpec& spec, Symbol x) const {
    if (x >= spec.alphabet_size()) throw DomainError("symbol outside alphabet");
    if (known_) return spec.step(context_)[x];
    double p = 0.0;
    for (std::size_t c = 0; c < weights_.size(); ++c)
      if (weights_[c] > 0.0) p += weights_[c] * spec.step(c)[x];
    return p;
  }

  /// Conditions on `x`; returns P(x | symbols so far). A zero return leaves the
  /// belief unchanged since the history is impossible.
  double observe(const MarkovSpec& spec, Symbol x) {
    const double p = predictive(spec, x);
    if (p == 0.0) return 0.0;
    if (known_) {
      context_ = spec.shift(context_, x);
      return p;
    }
    std::vector<double> next(weights_.size(), 0.0);
    for (std::size_t c = 0; c < weights_.size(); ++c)
      if (weights_[c] > 0.0) next[spec.shift(c, x)] += weights_[c] * spec.step(c)[x] / p;
    weights_.swap(next);
    pin_if_certain();
    return p;
  }

  bool context_known() const noexcept { return known_; }

 private:
  void pin_if_certain() {
    std::size_t support = 0;
    std::size_t last = 0;
    for (std::size_t c = 0; c < weights_.size(); ++c)
      if (weights_[c] > 0.0) {
        ++support;
        last = c;
      }
    if (support == 1) {
      known_ = true;
      context_ = last;
      weights_.clear();
    }
  }

  std::vector<double> weights_;
  std::size_t context_ = 0;
  bool known_ = false;
};

/// -log2 P(X^t = sequence) under the process; kInfiniteBits when impossible.
inline Bits sequence_log_probability(const MarkovSpec& spec, std::span<const Symbol> sequence) {
  ContextBelief belief(spec);
  Bits bits = 0.0;
  for (Symbol x : sequence) {
    const double p = belief.observe(spec, x);
    if (p == 0.0) return kInfiniteBits;
    bits -= std::log2(p);
  }
  return bits;
}

}  // namespace idkit
