#pragma once
// Expected sample complexity of Bayesian identification (evaluator and
// predictor views), moments of the posterior surprisal, falsification bounds,
// and Monte Carlo stopping-time simulation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "idkit/bayes.hpp"
#include "idkit/bit_source.hpp"
#include "idkit/errors.hpp"
#include "idkit/info_measures.hpp"
#include "idkit/process_spec.hpp"
#include "idkit/sampling.hpp"
#include "idkit/sc_distributions.hpp"
#include "idkit/sequence_measures.hpp"

namespace idkit {

namespace detail {

inline std::vector<double> log2_weights(const ProbVector& prior) {
  std::vector<double> w;
  for (double p : prior) w.push_back(p > 0.0 ? std::log2(p) : -kInfiniteBits);
  return w;
}

inline bool all_iid(const HypothesisSet& set, const MarkovSpec& ideal) {
  if (!ideal.is_iid()) return false;
  return std::all_of(set.members().begin(), set.members().end(), [](const MarkovSpec& m) {
    return m.is_iid();
  });
}

/// Visits every length-t sequence with P_ideal > 0 (or every sequence when
/// `all_sequences`), passing P_ideal and each member's log2 likelihood.
class JointEnumerator {
 public:
  using Visit = std::function<void(double p_ideal, std::span<const double> log2_lik)>;

  JointEnumerator(const MarkovSpec& ideal, const HypothesisSet& set, std::size_t t, bool all_sequences = false)
      : ideal_(ideal), set_(set), t_(t), all_(all_sequences) {
    if (ideal.alphabet_size() != set.alphabet_size()) throw DomainError("ideal and hypotheses differ in alphabet");
    const double n = std::pow(static_cast<double>(set.alphabet_size()), static_cast<double>(t));
    if (n > static_cast<double>(kMaxEnumeratedSequences)) throw RefusalError("horizon too large to enumerate (|X|^t > 2^20)");
  }

  void run(const Visit& visit) const {
    std::vector<ContextBelief> beliefs;
    for (const auto& m : set_.members()) beliefs.emplace_back(m);
    std::vector<double> loglik(set_.size(), 0.0);
    walk(0, ContextBelief(ideal_), 1.0, beliefs, loglik, visit);
  }

 private:
  void walk(std::size_t depth, const ContextBelief& ideal_belief, double p_ideal,
            const std::vector<ContextBelief>& beliefs, const std::vector<double>& loglik, const Visit& visit) const {
    if (depth == t_) {
      visit(p_ideal, loglik);
      return;
    }
    for (Symbol x = 0; x < set_.alphabet_size(); ++x) {
      ContextBelief ib = ideal_belief;
      const double px = ib.observe(ideal_, x);
      if (px == 0.0 && !all_) continue;
      std::vector<ContextBelief> nb = beliefs;
      std::vector<double> nl = loglik;
      for (std::size_t i = 0; i < nb.size(); ++i) {
        if (std::isinf(nl[i])) continue;
        const double p = nb[i].observe(set_[i], x);
        nl[i] = p > 0.0 ? nl[i] + std::log2(p) : -kInfiniteBits;
      }
      walk(depth + 1, ib, p_ideal * px, nb, nl, visit);
    }
  }

  const MarkovSpec& ideal_;
  const HypothesisSet& set_;
  std::size_t t_;
  bool all_;
};

/// Calls visit(p_type, log2_lik) once per count vector of length-t i.i.d.
/// sequences; p_type is the total ideal probability of that type class.
inline void for_each_type(const MarkovSpec& ideal, const HypothesisSet& set, std::size_t t,
                          const std::function<void(double, std::span<const double>)>& visit) {
  const std::size_t k = set.alphabet_size();
  std::vector<std::size_t> counts(k, 0);
  const auto& phi = ideal.step(0).distribution();
  std::vector<double> loglik(set.size());
  const double lg_t = std::lgamma(static_cast<double>(t) + 1.0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t sym, std::size_t left) {
    if (sym + 1 == k) {
      counts[sym] = left;
      double log_mult = lg_t;
      double log2_p = 0.0;
      for (std::size_t x = 0; x < k; ++x) {
        log_mult -= std::lgamma(static_cast<double>(counts[x]) + 1.0);
        if (counts[x] == 0) continue;
        if (phi[x] == 0.0) return;
        log2_p += static_cast<double>(counts[x]) * std::log2(phi[x]);
      }
      for (std::size_t i = 0; i < set.size(); ++i) {
        const auto& d = set[i].step(0).distribution();
        double l = 0.0;
        for (std::size_t x = 0; x < k && !std::isinf(l); ++x)
          if (counts[x]) l = d[x] > 0.0 ? l + static_cast<double>(counts[x]) * std::log2(d[x]) : -kInfiniteBits;
        loglik[i] = l;
      }
      visit(std::exp2(log_mult / std::log(2.0) + log2_p), loglik);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      counts[sym] = c;
      rec(sym + 1, left - c);
    }
  };
  rec(0, t);
}

// -log2 posterior of member `phi` given member log-likelihoods
inline Bits posterior_surprisal(std::size_t phi, std::span<const double> log2_prior, std::span<const double> loglik) {
  std::vector<double> joint(loglik.size());
  for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = log2_prior[i] + loglik[i];
  return log2_sum_exp2(joint) - joint[phi];
}

inline std::size_t require_member(const HypothesisSet& set, const MarkovSpec& ideal) {
  const auto idx = set.find(ideal);
  if (!idx) throw PreconditionError("the ideal process is not a member of the hypothesis set");
  return *idx;
}

}  // namespace detail

/// E[(-log2 P(Theta_t = phi | X^t))^m] over X^t drawn from phi, by enumerating
/// every length-t sequence (|X|^t <= 2^20).
inline double surprisal_moment(const MarkovSpec& ideal, const HypothesisSet& set, const ProbVector& prior,
                               std::size_t t, unsigned m) {
  if (m < 1) throw DomainError("moment order must be at least 1");
  if (prior.size() != set.size()) throw DomainError("prior must have one entry per hypothesis");
  const std::size_t phi = detail::require_member(set, ideal);
  const auto lp = detail::log2_weights(prior);
  double acc = 0.0;
  detail::JointEnumerator(set[phi], set, t).run([&](double p, std::span<const double> ll) {
    acc += p * std::pow(detail::posterior_surprisal(phi, lp, ll), m);
  });
  return acc;
}

/// Same expectation summed over type classes; i.i.d. sets only, any horizon.
inline double surprisal_moment_by_types(const MarkovSpec& ideal, const HypothesisSet& set, const ProbVector& prior,
                                        std::size_t t, unsigned m) {
  if (m < 1) throw DomainError("moment order must be at least 1");
  if (!detail::all_iid(set, ideal)) throw PreconditionError("type-class enumeration needs i.i.d. processes");
  const std::size_t phi = detail::require_member(set, ideal);
  const auto lp = detail::log2_weights(prior);
  double acc = 0.0;
  detail::for_each_type(set[phi], set, t, [&](double p, std::span<const double> ll) {
    acc += p * std::pow(detail::posterior_surprisal(phi, lp, ll), m);
  });
  return acc;
}

/// The pieces of E[-log2 P(Theta_t = phi)] = I(Theta_0 = phi) + H(X^t) - H_x(X^t || Xhat^t).
struct SurprisalDecomposition {
  Bits prior_surprisal = 0.0;  // I(Theta_0 = phi)
  Bits block_entropy = 0.0;    // H(X^t)
  Bits cross_entropy = 0.0;    // H_x(X^t || Xhat^t), Xhat the prior mixture
  Bits expected() const { return prior_surprisal + block_entropy - cross_entropy; }
};

inline SurprisalDecomposition surprisal_decomposition(const MarkovSpec& ideal, const HypothesisSet& set,
                                                      const ProbVector& prior, std::size_t t) {
  const std::size_t phi = detail::require_member(set, ideal);
  const auto lp = detail::log2_weights(prior);
  SurprisalDecomposition d;
  d.prior_surprisal = surprisal(prior[phi]);
  auto visit = [&](double p, std::span<const double> ll) {
    std::vector<double> joint(ll.size());
    for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = lp[i] + ll[i];
    d.block_entropy -= p * ll[phi];
    d.cross_entropy -= p * detail::log2_sum_exp2(joint);
  };
  if (detail::all_iid(set, ideal)) detail::for_each_type(set[phi], set, t, visit);
  else detail::JointEnumerator(set[phi], set, t).run(visit);
  return d;
}

/// The closed-form m-th moment expression built from I(Theta_0 = phi), t H(X),
/// the block cross entropy, and unweighted surprisal sums over all sequences.
inline double closed_form_moment_expression(const MarkovSpec& ideal, const HypothesisSet& set,
                                            const ProbVector& prior, std::size_t t, unsigned m) {
  if (m < 1) throw DomainError("moment order must be at least 1");
  const std::size_t phi = detail::require_member(set, ideal);
  if (!detail::all_iid(set, ideal)) throw PreconditionError("the closed form assumes i.i.d. processes");
  const auto lp = detail::log2_weights(prior);
  const Bits info = surprisal(prior[phi]);
  const Bits h = entropy(ideal.step(0).distribution());
  Bits cross = 0.0, sum_ideal = 0.0, sum_mix = 0.0;
  detail::JointEnumerator(set[phi], set, t, true).run([&](double p, std::span<const double> ll) {
    std::vector<double> joint(ll.size());
    for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = lp[i] + ll[i];
    const Bits mix = detail::log2_sum_exp2(joint);
    if (p > 0.0) cross -= p * mix;
    sum_ideal -= ll[phi];
    sum_mix -= mix;
  });
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
  const double first = -sign * (static_cast<double>(t) * h + info) + sign * cross;
  const double e = static_cast<double>(m - 1);
  const double second = -sign * (std::pow(info, e) + std::pow(sum_ideal, e)) + sign * std::pow(sum_mix, e);
  return first * second;
}

struct SurprisalMomentEstimate {
  std::vector<double> moments;          // index m-1
  std::vector<double> standard_errors;  // index m-1
  std::uint64_t samples = 0;
};

/// Monte Carlo estimate of the first `max_m` raw moments of -log2 P(Theta_t = phi).
inline SurprisalMomentEstimate mc_surprisal_moments(const MarkovSpec& ideal, const HypothesisSet& set,
                                                    const ProbVector& prior, std::size_t t, unsigned max_m,
                                                    std::uint64_t samples, std::uint64_t seed) {
  if (samples < 2) throw DomainError("Monte Carlo moments need at least two samples");
  auto shared = std::make_shared<const HypothesisSet>(set);
  const std::size_t phi = detail::require_member(set, ideal);
  std::vector<double> sum(max_m, 0.0), sum_sq(max_m, 0.0);
  BitSource src(seed);
  for (std::uint64_t s = 0; s < samples; ++s) {
    PosteriorState st(shared, prior);
    for (Symbol x : markov_sample(set[phi], t, src)) st.update(x);
    const double v = -st.log2_posterior()[phi];
    double pw = 1.0;
    for (unsigned m = 0; m < max_m; ++m) {
      pw *= v;
      sum[m] += pw;
      sum_sq[m] += pw * pw;
    }
  }
  SurprisalMomentEstimate est;
  est.samples = samples;
  const double n = static_cast<double>(samples);
  for (unsigned m = 0; m < max_m; ++m) {
    const double mean = sum[m] / n;
    const double var = std::max(0.0, (sum_sq[m] - n * mean * mean) / (n - 1.0));
    est.moments.push_back(mean);
    est.standard_errors.push_back(std::sqrt(var / n));
  }
  return est;
}

struct ExpectedSampleComplexity {
  bool reachable = true;
  double expected_t = 0.0;         // interpolated crossing time; inf when unreachable
  std::size_t t_ceil = 0;          // first integer t meeting the threshold
  Bits threshold = 0.0;            // -log2 p
  Bits limit = 0.0;                // limiting criterion value as t grows
  std::vector<Bits> trajectory;    // criterion value at t = 0, 1, ...
  std::string method;              // "types", "sequences" or "monte-carlo"
  double ci_half_width = 0.0;      // Monte Carlo only
  double formula_value = 0.0;      // closed-form right-hand side at t_ceil
};

struct SearchOptions {
  std::size_t max_t = 5000;
  std::uint64_t mc_samples = 20000;
  std::uint64_t mc_seed = 0x5eed;
};

namespace detail {

// Limiting posterior of phi: its share of the prior among identical members.
inline double posterior_ceiling(std::size_t phi, const HypothesisSet& set, const ProbVector& prior) {
  double same = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (set[i] == set[phi]) same += prior[i];
  return prior[phi] / same;
}

inline bool enumerable_at(const HypothesisSet& set, const MarkovSpec& ideal, std::size_t t) {
  if (all_iid(set, ideal)) return true;
  return std::pow(static_cast<double>(set.alphabet_size()), static_cast<double>(t)) <=
         static_cast<double>(kMaxEnumeratedSequences);
}

// E[-log2 P(Theta_t = phi)] with X^t ~ phi, by type classes or sequences.
inline Bits enumerated_surprisal(std::size_t phi, const HypothesisSet& set, std::span<const double> lp, std::size_t t) {
  double s = 0.0;
  auto visit = [&](double p, std::span<const double> ll) { s += p * posterior_surprisal(phi, lp, ll); };
  if (all_iid(set, set[phi])) for_each_type(set[phi], set, t, visit);
  else JointEnumerator(set[phi], set, t).run(visit);
  return s;
}

// Simulated paths of member phi advanced one symbol at a time.
class SurprisalTracker {
 public:
  SurprisalTracker(std::size_t phi, std::shared_ptr<const HypothesisSet> set, const ProbVector& prior,
                   std::uint64_t samples, std::uint64_t seed)
      : phi_(phi), set_(std::move(set)) {
    const MarkovSpec& m = (*set_)[phi_];
    for (std::uint64_t s = 0; s < samples; ++s) {
      states_.emplace_back(set_, prior);
      sources_.emplace_back(derive_seed(seed, s));
      std::size_t ctx = 0;
      if (m.num_contexts() > 1) ctx = sample_discrete(IidSpec(m.initial_distribution()), sources_.back()).symbol;
      contexts_.push_back(ctx);
    }
  }

  std::size_t t() const noexcept { return t_; }

  void advance_to(std::size_t t) {
    const MarkovSpec& m = (*set_)[phi_];
    for (; t_ < t; ++t_)
      for (std::size_t s = 0; s < states_.size(); ++s) {
        const Symbol x = sample_discrete(m.step(contexts_[s]), sources_[s]).symbol;
        contexts_[s] = m.shift(contexts_[s], x);
        states_[s].update(x);
      }
  }

  // mean and standard error of -log2 P(Theta_t = phi)
  std::pair<double, double> estimate() const {
    double sum = 0.0, sq = 0.0;
    for (const auto& st : states_) {
      const double v = -st.log2_posterior()[phi_];
      sum += v;
      sq += v * v;
    }
    const double n = static_cast<double>(states_.size());
    const double mean = sum / n;
    return {mean, std::sqrt(std::max(0.0, sq / n - mean * mean) / n)};
  }

 private:
  std::size_t phi_;
  std::shared_ptr<const HypothesisSet> set_;
  std::vector<PosteriorState> states_;
  std::vector<BitSource> sources_;
  std::vector<std::size_t> contexts_;
  std::size_t t_ = 0;
};

inline void mark_unreachable(ExpectedSampleComplexity& r) {
  r.reachable = false;
  r.expected_t = std::numeric_limits<double>::infinity();
}

// First t where the trajectory meets the threshold, interpolated linearly.
inline bool locate_crossing(ExpectedSampleComplexity& r) {
  const auto& s = r.trajectory;
  const std::size_t t = s.size() - 1;
  if (s[t] > r.threshold + tolerance::kCompare) return false;
  r.t_ceil = t;
  r.expected_t = t == 0 ? 0.0 : static_cast<double>(t - 1) + (s[t - 1] - r.threshold) / (s[t - 1] - s[t]);
  return true;
}

// Prior-weighted sum of member trajectories (weights in `w`) until it meets the
// threshold; members switch to simulation past the enumeration horizon.
inline void search(ExpectedSampleComplexity& r, const HypothesisSet& set, const ProbVector& prior,
                   const std::vector<std::pair<std::size_t, double>>& w, const SearchOptions& opt) {
  const auto lp = log2_weights(prior);
  auto shared = std::make_shared<const HypothesisSet>(set);
  std::vector<std::optional<SurprisalTracker>> trackers(w.size());
  bool enumerated = true;
  r.method = all_iid(set, set[w.front().first]) ? "types" : "sequences";
  for (std::size_t t = 0; t <= opt.max_t; ++t) {
    double value = 0.0, var = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      const auto [phi, weight] = w[k];
      if (enumerated && enumerable_at(set, set[phi], t)) {
        value += weight * enumerated_surprisal(phi, set, lp, t);
        continue;
      }
      enumerated = false;
      r.method = "monte-carlo";
      if (!trackers[k]) trackers[k].emplace(phi, shared, prior, opt.mc_samples, derive_seed(opt.mc_seed, phi));
      trackers[k]->advance_to(t);
      const auto [mean, se] = trackers[k]->estimate();
      value += weight * mean;
      var += weight * weight * se * se;
    }
    r.trajectory.push_back(value);
    if (locate_crossing(r)) {
      if (!enumerated) r.ci_half_width = 1.96 * std::sqrt(var);
      return;
    }
  }
  mark_unreachable(r);
  r.t_ceil = r.trajectory.size();
}

}  // namespace detail

/// Expected observations until the posterior of the ideal phi is expected to
/// reach p: the smallest t with E[-log2 P(Theta_t = phi)] <= -log2 p,
/// interpolated linearly between integer horizons.
inline ExpectedSampleComplexity expected_sc_evaluator(const MarkovSpec& ideal, const HypothesisSet& set,
                                                      const ProbVector& prior, double p,
                                                      const SearchOptions& opt = {}) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  if (prior.size() != set.size()) throw DomainError("prior must have one entry per hypothesis");
  const std::size_t phi = detail::require_member(set, ideal);
  if (prior[phi] == 0.0) throw PreconditionError("the ideal has zero prior weight");
  ExpectedSampleComplexity r;
  r.threshold = 0.0 - std::log2(p);
  r.limit = 0.0 - std::log2(detail::posterior_ceiling(phi, set, prior));
  if (r.limit > r.threshold + tolerance::kCompare) {
    detail::mark_unreachable(r);
    r.method = "ceiling";
    return r;
  }
  detail::search(r, set, prior, {{phi, 1.0}}, opt);
  if (r.reachable && r.method == "types") {
    const auto d = surprisal_decomposition(ideal, set, prior, r.t_ceil);
    const Bits h = entropy(ideal.step(0).distribution());
    r.formula_value = h > 0.0 ? (-d.prior_surprisal + d.cross_entropy + r.threshold) / h : 0.0;
  }
  return r;
}

/// Predictor's view: the smallest t with H(Theta | Xhat^t) <= -log2 p, the
/// data drawn from the prior predictive mixture. formula_value holds
/// (H(Theta_0) - H(Theta | Xhat^t) - log2 p) / H(Xhat_1) at t_ceil.
inline ExpectedSampleComplexity expected_sc_predictive(const HypothesisSet& set, const ProbVector& prior, double p,
                                                       const SearchOptions& opt = {}) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("p must lie in (0, 1]");
  if (prior.size() != set.size()) throw DomainError("prior must have one entry per hypothesis");
  ExpectedSampleComplexity r;
  r.threshold = 0.0 - std::log2(p);
  // the conditional entropy cannot drop below the spread within identical members
  std::vector<char> done(set.size(), 0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (done[i]) continue;
    double mass = 0.0;
    std::vector<double> ws;
    for (std::size_t j = i; j < set.size(); ++j)
      if (set[j] == set[i]) {
        done[j] = 1;
        mass += prior[j];
        ws.push_back(prior[j]);
      }
    for (double w : ws)
      if (w > 0.0) r.limit -= w * std::log2(w / mass);
  }
  if (r.limit > r.threshold + tolerance::kCompare) {
    detail::mark_unreachable(r);
    r.method = "ceiling";
    return r;
  }
  std::vector<std::pair<std::size_t, double>> w;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (prior[i] > 0.0) w.emplace_back(i, prior[i]);
  detail::search(r, set, prior, w, opt);
  if (r.reachable) {
    std::vector<double> mix(set.alphabet_size(), 0.0);
    for (std::size_t i = 0; i < set.size(); ++i) {
      ContextBelief b(set[i]);
      for (Symbol x = 0; x < mix.size(); ++x) mix[x] += prior[i] * b.predictive(set[i], x);
    }
    double total = 0.0;
    for (double v : mix) total += v;
    for (double& v : mix) v = std::min(1.0, v / total);
    const Bits hx = entropy(ProbVector(mix));
    r.formula_value = hx > 0.0 ? (entropy(prior) - r.trajectory[r.t_ceil] + r.threshold) / hx : 0.0;
  }
  return r;
}

struct FalsificationBounds {
  double t_lower = 0.0;
  double t_upper = std::numeric_limits<double>::infinity();  // inf: unbounded
  Bits cross_entropy_rate = 0.0;  // per-symbol H_x(ideal || hypothesis)
  Bits entropy_rate = 0.0;        // per-symbol entropy rate of the ideal
  Bits eps_q = 0.0;
  bool upper_bounded() const { return std::isfinite(t_upper); }
};

/// Per-symbol cross-entropy rate: stationary weighting of the ideal's contexts.
inline Bits cross_entropy_rate(const MarkovSpec& ideal, const MarkovSpec& hypothesis) {
  const std::size_t L = std::max(ideal.memory(), hypothesis.memory());
  const MarkovSpec a = ideal.with_memory(L);
  const MarkovSpec b = hypothesis.with_memory(L);
  const ProbVector& w = a.stationary_distribution();
  Bits h = 0.0;
  for (std::size_t c = 0; c < a.num_contexts(); ++c) {
    if (w[c] == 0.0) continue;
    const Bits x = cross_entropy(a.step(c).distribution(), b.step(c).distribution());
    if (std::isinf(x)) return kInfiniteBits;
    h += w[c] * x;
  }
  return h;
}

/// H_x / (H + eps_q) <= t <= H_x / (H - eps_q) with eps_q = -log2 q.
inline FalsificationBounds falsification_bounds(const MarkovSpec& ideal, const MarkovSpec& hypothesis, double q) {
  if (q == 0.0) throw RefusalError("q = 0: falsification with certainty never happens in finitely many observations");
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("q must lie in (0, 1]");
  FalsificationBounds b;
  b.cross_entropy_rate = cross_entropy_rate(ideal, hypothesis);
  if (std::isinf(b.cross_entropy_rate)) throw DomainError("cross-entropy rate is infinite");
  b.entropy_rate = entropy_rate(ideal);
  b.eps_q = -std::log2(q);
  const double lo_den = b.entropy_rate + b.eps_q;
  b.t_lower = lo_den > 0.0 ? b.cross_entropy_rate / lo_den : 0.0;
  const double hi_den = b.entropy_rate - b.eps_q;
  if (hi_den > 0.0) b.t_upper = b.cross_entropy_rate / hi_den;
  return b;
}

/// Interval for falsifying every member: the latest lower and upper bounds.
inline FalsificationBounds falsification_bounds(const MarkovSpec& ideal, const HypothesisSet& set, double q) {
  FalsificationBounds out;
  bool first = true;
  for (const auto& m : set.members()) {
    const auto b = falsification_bounds(ideal, m, q);
    if (first) {
      out = b;
      first = false;
      continue;
    }
    if (b.t_lower > out.t_lower) {
      out.t_lower = b.t_lower;
      out.cross_entropy_rate = b.cross_entropy_rate;
    }
    out.t_upper = std::max(out.t_upper, b.t_upper);
  }
  return out;
}

struct MCOptions {
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t max_steps = 100000;  // censoring budget when the config has no cap
  bool record_trace = false;       // posterior after every step of trial 0
};

struct MCResult {
  EmpiricalSCDist stopping_times;  // decided trials; censored counted apart
  std::map<std::string, std::uint64_t> decision_histogram;
  std::uint64_t correct_verifications = 0;  // identified group contains the ideal
  std::uint64_t verifications = 0;
  std::vector<std::vector<double>> trace;   // t, posterior... for trial 0

  double mean() const { return stopping_times.mean(); }
  double moment(unsigned m) const { return stopping_times.moment(m); }
  /// 95% normal-approximation interval half-width of the mean stopping time.
  double ci95_half_width() const {
    const double n = static_cast<double>(stopping_times.completed());
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double var = stopping_times.variance() * n / (n - 1.0);
    return 1.96 * std::sqrt(var / n);
  }
};

namespace detail {

struct TrialOutcome {
  Decision decision;
  bool censored = false;
};

inline TrialOutcome run_trial(const MarkovSpec& ideal, const std::shared_ptr<const HypothesisSet>& set,
                              const ProbVector& prior, const StoppingRule& rule, std::uint64_t seed,
                              std::size_t max_steps, std::vector<std::vector<double>>* trace) {
  BitSource src(seed);
  PosteriorState state(set, prior);
  std::size_t ctx = 0;
  if (ideal.num_contexts() > 1) ctx = sample_discrete(IidSpec(ideal.initial_distribution()), src).symbol;
  const std::size_t budget = rule.cap() ? std::min(*rule.cap(), max_steps) : max_steps;
  for (;;) {
    Decision d = rule.check(state);
    if (trace) {
      std::vector<double> row{static_cast<double>(state.t())};
      row.insert(row.end(), d.posterior.begin(), d.posterior.end());
      trace->push_back(std::move(row));
    }
    if (d.decided()) return {std::move(d), false};
    if (d.terminal || state.t() >= budget) return {std::move(d), true};
    const Symbol x = sample_discrete(ideal.step(ctx), src).symbol;
    ctx = ideal.shift(ctx, x);
    state.update(x);
  }
}

}  // namespace detail

/// Streams the ideal process through posterior_update and the stopping rule,
/// recording when and how each trial stops. Trial k uses seed derive_seed(seed, k),
/// so results do not depend on the thread count.
inline MCResult mc_sample_complexity(const MarkovSpec& ideal, const HypothesisSet& set, const ProbVector& prior,
                                     const StoppingConfig& cfg, const MCOptions& opt) {
  if (opt.trials == 0) throw DomainError("Monte Carlo needs at least one trial");
  if (prior.size() != set.size()) throw DomainError("prior must have one entry per hypothesis");
  if (ideal.alphabet_size() != set.alphabet_size()) throw DomainError("ideal and hypotheses differ in alphabet");
  auto shared = std::make_shared<const HypothesisSet>(set);
  const StoppingRule rule(*shared, cfg);
  const auto phi = set.find(ideal);
  const unsigned threads = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(opt.trials)));
  std::vector<MCResult> shards(threads);
  auto work = [&](unsigned w) {
    MCResult& out = shards[w];
    const std::uint64_t begin = opt.trials * w / threads;
    const std::uint64_t end = opt.trials * (w + 1) / threads;
    for (std::uint64_t k = begin; k < end; ++k) {
      auto* trace = (opt.record_trace && k == 0) ? &out.trace : nullptr;
      const auto res = detail::run_trial(ideal, shared, prior, rule, derive_seed(opt.seed, k), opt.max_steps, trace);
      if (res.censored) {
        out.stopping_times.add_censored();
        ++out.decision_histogram["censored"];
        continue;
      }
      out.stopping_times.add(res.decision.t);
      ++out.decision_histogram[to_string(res.decision.status)];
      const bool identified = res.decision.status == DecisionStatus::Verified ||
                              res.decision.status == DecisionStatus::PartiallyIdentified;
      if (identified) {
        ++out.verifications;
        const auto& g = res.decision.members;
        if (phi && std::find(g.begin(), g.end(), *phi) != g.end()) ++out.correct_verifications;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  MCResult total;
  for (auto& s : shards) {
    total.stopping_times.merge(s.stopping_times);
    for (const auto& [k, v] : s.decision_histogram) total.decision_histogram[k] += v;
    total.correct_verifications += s.correct_verifications;
    total.verifications += s.verifications;
    if (!s.trace.empty()) total.trace = std::move(s.trace);
  }
  return total;
}

}  // namespace idkit
