#pragma once
// Block distributions over length-t sequences and the entropy rate.

#include <cmath>
#include <cstddef>
#include <functional>

#include "idkit/errors.hpp"
#include "idkit/info_measures.hpp"
#include "idkit/process_spec.hpp"

namespace idkit {

/// Distribution of the first t emitted symbols of a process.
class SequenceDist {
 public:
  SequenceDist(MarkovSpec spec, std::size_t horizon) : spec_(std::move(spec)), t_(horizon) {}

  const MarkovSpec& spec() const noexcept { return spec_; }
  std::size_t horizon() const noexcept { return t_; }

  /// |X|^t, saturating.
  double support_size() const {
    return std::pow(static_cast<double>(spec_.alphabet_size()), static_cast<double>(t_));
  }
  bool enumerable() const { return support_size() <= static_cast<double>(kMaxEnumeratedSequences); }

  /// Calls fn(sequence, probability) for every sequence of positive probability,
  /// in lexicographic order.
  void for_each(const std::function<void(const Sequence&, double)>& fn) const {
    if (!enumerable()) throw RefusalError("horizon too large to enumerate (|X|^t > 2^20)");
    Sequence seq;
    seq.reserve(t_);
    walk(ContextBelief(spec_), 1.0, seq, fn);
  }

 private:
  void walk(const ContextBelief& belief, double prob, Sequence& seq,
            const std::function<void(const Sequence&, double)>& fn) const {
    if (seq.size() == t_) {
      fn(seq, prob);
      return;
    }
    for (Symbol x = 0; x < spec_.alphabet_size(); ++x) {
      ContextBelief next = belief;
      const double p = next.observe(spec_, x);
      if (p == 0.0) continue;
      seq.push_back(x);
      walk(next, prob * p, seq, fn);
      seq.pop_back();
    }
  }

  MarkovSpec spec_;
  std::size_t t_;
};

/// H(X_1 ... X_t) by enumeration.
inline Bits block_entropy(const SequenceDist& dist) {
  Bits h = 0.0;
  double mass = 0.0;
  dist.for_each([&](const Sequence&, double p) {
    h -= detail::plog2p(p);
    mass += p;
  });
  if (std::abs(mass - 1.0) > tolerance::kSequenceMass) throw Error("enumerated block mass drifted from 1");
  return std::max(h, 0.0);
}

/// Stationary-context-weighted conditional entropy of the next symbol.
inline Bits entropy_rate(const MarkovSpec& m) {
  const ProbVector& pi = m.stationary_distribution();
  Bits h = 0.0;
  for (std::size_t c = 0; c < m.num_contexts(); ++c)
    if (pi[c] > 0.0) h += pi[c] * entropy(m.step(c).distribution());
  return h;
}

}  // namespace idkit
