#pragma once
// Sequential Bayesian identification over a finite set of process
// descriptions and the (p, q, eps_D, r) stopping rule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "idkit/bitstring.hpp"
#include "idkit/errors.hpp"
#include "idkit/info_measures.hpp"
#include "idkit/process_spec.hpp"
#include "idkit/sampling.hpp"
#include "idkit/sequence_measures.hpp"
#include "idkit/typical_sets.hpp"

namespace idkit {

/// Finite list of process descriptions over one alphabet. Members with a
/// shorter memory are restated with the longest memory in the set, which
/// leaves the processes unchanged.
class HypothesisSet {
 public:
  HypothesisSet(std::vector<MarkovSpec> members, std::vector<std::string> labels = {})
      : labels_(std::move(labels)) {
    if (members.empty()) throw DomainError("hypothesis set must have at least one member");
    std::size_t memory = 0;
    for (const auto& m : members) {
      if (m.alphabet_size() != members.front().alphabet_size()) throw DomainError("hypotheses over different alphabets");
      memory = std::max(memory, m.memory());
    }
    for (auto& m : members) members_.push_back(m.with_memory(memory));
    if (labels_.empty())
      for (std::size_t i = 0; i < members_.size(); ++i) labels_.push_back("h" + std::to_string(i));
    if (labels_.size() != members_.size()) throw DomainError("one label per hypothesis required");
  }

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t alphabet_size() const noexcept { return members_.front().alphabet_size(); }
  std::size_t memory() const noexcept { return members_.front().memory(); }
  const MarkovSpec& operator[](std::size_t i) const { return members_.at(i); }
  const std::vector<MarkovSpec>& members() const noexcept { return members_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Index of a member describing the same process as `spec`, if any.
  std::optional<std::size_t> find(const MarkovSpec& spec) const {
    const MarkovSpec lifted = spec.memory() <= memory() ? spec.with_memory(memory()) : spec;
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (members_[i] == lifted) return i;
    return std::nullopt;
  }

  /// Pairs of members with identical descriptions.
  std::vector<std::pair<std::size_t, std::size_t>> identical_pairs() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = i + 1; j < size(); ++j)
        if (members_[i] == members_[j]) out.emplace_back(i, j);
    return out;
  }

 private:
  std::vector<MarkovSpec> members_;
  std::vector<std::string> labels_;
};

namespace detail {
inline Bits log2_sum_exp2(std::span<const double> v) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : v) hi = std::max(hi, x);
  if (std::isinf(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp2(x - hi);
  return hi + std::log2(s);
}
}  // namespace detail

/// Posterior over a HypothesisSet after t observations, held in log2 space.
class PosteriorState {
 public:
  PosteriorState(std::shared_ptr<const HypothesisSet> set, const ProbVector& prior) : set_(std::move(set)) {
    if (!set_) throw PreconditionError("posterior needs a hypothesis set");
    if (prior.size() != set_->size()) throw DomainError("prior must have one entry per hypothesis");
    for (double w : prior) log2_prior_.push_back(w > 0.0 ? std::log2(w) : -kInfiniteBits);
    log2_likelihood_.assign(set_->size(), 0.0);
    for (const auto& m : set_->members()) beliefs_.emplace_back(m);
    empirical_.emplace(set_->alphabet_size(), set_->memory());
    renormalise();
  }

  static PosteriorState uniform(std::shared_ptr<const HypothesisSet> set) {
    const std::size_t n = set->size();
    return PosteriorState(std::move(set), ProbVector::uniform(n));
  }

  const HypothesisSet& set() const noexcept { return *set_; }
  std::shared_ptr<const HypothesisSet> set_ptr() const noexcept { return set_; }
  std::size_t t() const noexcept { return t_; }

  /// Every member gave the observations probability zero: the posterior is undefined.
  bool all_falsified() const noexcept { return all_falsified_; }

  std::span<const double> log2_prior() const noexcept { return log2_prior_; }
  /// log2 P(x^t | member); -inf when the member cannot produce the observations.
  std::span<const double> log2_likelihood() const noexcept { return log2_likelihood_; }
  std::span<const double> log2_posterior() const {
    if (all_falsified_) throw UndefinedDistributionError("all hypotheses falsified; posterior undefined");
    return log2_posterior_;
  }

  ProbVector posterior() const {
    const auto lp = log2_posterior();
    std::vector<double> w;
    w.reserve(lp.size());
    double total = 0.0;
    for (double x : lp) {
      w.push_back(std::exp2(x));
      total += w.back();
    }
    for (double& x : w) x = std::min(1.0, x / total);
    return ProbVector(std::move(w));
  }

  /// log2 of the summed posterior over `members`.
  Bits log2_group_posterior(std::span<const std::size_t> members) const {
    const auto lp = log2_posterior();
    std::vector<double> v;
    for (auto i : members) v.push_back(lp[i]);
    return detail::log2_sum_exp2(v);
  }

  const ContextBelief& belief(std::size_t member) const { return beliefs_.at(member); }
  const EmpiricalProcess& empirical() const noexcept { return *empirical_; }

  /// In-place Bayes update with one observed symbol.
  void update(Symbol x) {
    if (x >= set_->alphabet_size()) throw DomainError("symbol outside alphabet");
    if (all_falsified_) throw PreconditionError("update of a terminal all-falsified posterior");
    for (std::size_t i = 0; i < beliefs_.size(); ++i) {
      if (std::isinf(log2_likelihood_[i])) continue;
      const double p = beliefs_[i].observe((*set_)[i], x);
      log2_likelihood_[i] = p > 0.0 ? log2_likelihood_[i] + std::log2(p) : -kInfiniteBits;
    }
    empirical_->observe(x);
    ++t_;
    renormalise();
  }

 private:
  void renormalise() {
    std::vector<double> joint(log2_prior_.size());
    for (std::size_t i = 0; i < joint.size(); ++i) joint[i] = log2_prior_[i] + log2_likelihood_[i];
    const Bits z = detail::log2_sum_exp2(joint);
    all_falsified_ = std::isinf(z);
    log2_posterior_.resize(joint.size());
    for (std::size_t i = 0; i < joint.size(); ++i) log2_posterior_[i] = all_falsified_ ? -kInfiniteBits : joint[i] - z;
  }

  std::shared_ptr<const HypothesisSet> set_;
  std::vector<double> log2_prior_;
  std::vector<double> log2_likelihood_;
  std::vector<double> log2_posterior_;
  std::vector<ContextBelief> beliefs_;
  std::optional<EmpiricalProcess> empirical_;
  std::size_t t_ = 0;
  bool all_falsified_ = false;
};

inline PosteriorState posterior_update(PosteriorState state, Symbol x) {
  state.update(x);
  return state;
}

/// Posterior-weighted mixture of the members' next-symbol distributions.
inline ProbVector posterior_predictive(const PosteriorState& state) {
  if (state.all_falsified()) throw UndefinedDistributionError("no predictive distribution after all hypotheses failed");
  const ProbVector w = state.posterior();
  const auto& set = state.set();
  std::vector<double> mix(set.alphabet_size(), 0.0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (w[i] == 0.0) continue;
    for (Symbol x = 0; x < mix.size(); ++x) mix[x] += w[i] * state.belief(i).predictive(set[i], x);
  }
  double total = 0.0;
  for (double v : mix) total += v;
  for (double& v : mix) v = std::min(1.0, v / total);
  return ProbVector(std::move(mix));
}

/// Per-symbol relative entropy rate D(a || b): stationary-weighted for ergodic
/// a, initial-context weighted otherwise.
inline Bits divergence_rate(const MarkovSpec& a, const MarkovSpec& b) {
  if (a.alphabet_size() != b.alphabet_size()) throw DomainError("processes over different alphabets");
  const std::size_t L = std::max(a.memory(), b.memory());
  const MarkovSpec la = a.with_memory(L);
  const MarkovSpec lb = b.with_memory(L);
  const ProbVector& w = la.is_ergodic() ? la.stationary_distribution() : la.initial_distribution();
  Bits d = 0.0;
  for (std::size_t c = 0; c < la.num_contexts(); ++c) {
    if (w[c] == 0.0) continue;
    const Bits k = kl_divergence(la.step(c).distribution(), lb.step(c).distribution());
    if (std::isinf(k)) return kInfiniteBits;
    d += w[c] * k;
  }
  return d;
}

/// max(D(a||b), D(b||a)).
inline Bits symmetric_divergence(const MarkovSpec& a, const MarkovSpec& b) {
  return std::max(divergence_rate(a, b), divergence_rate(b, a));
}

/// Greedy partition in member order: a member joins the first group whose
/// every member lies within eps_d of it, else it opens a new group.
inline std::vector<std::vector<std::size_t>> equivalence_groups(const HypothesisSet& set, Bits eps_d) {
  if (!(eps_d >= 0.0)) throw DomainError("eps_D must be nonnegative");
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < set.size(); ++i) {
    bool placed = false;
    for (auto& g : groups) {
      const bool close = std::all_of(g.begin(), g.end(), [&](std::size_t j) {
        const Bits d = symmetric_divergence(set[i], set[j]);
        return eps_d == 0.0 ? d == 0.0 : d <= eps_d;
      });
      if (close) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

struct StoppingConfig {
  double p = 0.9;   // verification probability
  double q = 0.0;   // falsification probability
  Bits eps_d = 0.0;
  double r = 0.0;   // resolution; 0 = no cap

  void validate() const {
    if (!(q >= 0.0 && q <= p && p <= 1.0)) throw DomainError("stopping config needs 0 <= q <= p <= 1");
    if (!(eps_d >= 0.0)) throw DomainError("eps_D must be nonnegative");
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("resolution must lie in [0, 1]");
  }
  std::optional<std::size_t> cap() const { return Resolution(r).cap(); }
};

enum class DecisionStatus { Verified, PartiallyIdentified, Falsified, Undetermined };

inline const char* to_string(DecisionStatus s) {
  switch (s) {
    case DecisionStatus::Verified: return "verified";
    case DecisionStatus::PartiallyIdentified: return "partially_identified";
    case DecisionStatus::Falsified: return "falsified";
    case DecisionStatus::Undetermined: return "undetermined";
  }
  return "?";
}

struct Decision {
  DecisionStatus status = DecisionStatus::Undetermined;
  std::vector<std::size_t> members;  // verified member or identified group (0-based)
  std::size_t t = 0;
  std::vector<double> posterior;     // empty when all members were falsified outright
  bool terminal = false;             // a decision was made or the cap was reached
  std::vector<Bits> empirical_kl;    // D(Xi_t || member), diagnostic

  bool decided() const noexcept { return status != DecisionStatus::Undetermined; }
};

/// Precomputed pieces of the stopping rule for one (set, config) pair.
class StoppingRule {
 public:
  StoppingRule(const HypothesisSet& set, StoppingConfig cfg) : cfg_(cfg) {
    cfg_.validate();
    groups_ = equivalence_groups(set, cfg_.eps_d);
    cap_ = cfg_.cap();
    for (const auto& m : set.members()) {
      rates_.push_back(entropy_rate(m));
      warm_up_.push_back(warm_up_threshold(rates_.back(), cfg_.q));
    }
    log2_p_ = cfg_.p > 0.0 ? std::log2(cfg_.p) : -kInfiniteBits;
    eps_p_ = cfg_.p > 0.0 ? -std::log2(cfg_.p) : kInfiniteBits;
    eps_q_ = cfg_.q > 0.0 ? -std::log2(cfg_.q) : kInfiniteBits;
  }

  const StoppingConfig& config() const noexcept { return cfg_; }
  const std::vector<std::vector<std::size_t>>& groups() const noexcept { return groups_; }
  std::span<const Bits> entropy_rates() const noexcept { return rates_; }
  std::span<const std::size_t> warm_up() const noexcept { return warm_up_; }
  std::optional<std::size_t> cap() const noexcept { return cap_; }

  Decision check(const PosteriorState& state, bool with_diagnostics = false) const {
    Decision d;
    d.t = state.t();
    const auto& set = state.set();
    if (with_diagnostics) {
      for (const auto& m : set.members()) d.empirical_kl.push_back(empirical_divergence(state.empirical(), m));
    }
    if (state.all_falsified()) {
      d.status = DecisionStatus::Falsified;
      d.terminal = true;
      return d;
    }
    const ProbVector post = state.posterior();
    d.posterior.assign(post.begin(), post.end());
    const auto loglik = state.log2_likelihood();

    // highest-posterior group, ties to the earliest
    std::size_t best = 0;
    Bits best_mass = -kInfiniteBits;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const Bits m = state.log2_group_posterior(groups_[g]);
      if (m > best_mass) {
        best_mass = m;
        best = g;
      }
    }
    const auto& group = groups_[best];
    if (reaches_p(state, group, best_mass) && typical_for_some(group, loglik, state.t())) {
      d.status = group.size() == 1 ? DecisionStatus::Verified : DecisionStatus::PartiallyIdentified;
      d.members = group;
      d.terminal = true;
      return d;
    }
    if (cfg_.q > 0.0 && all_atypical(loglik, state.t())) {
      d.status = DecisionStatus::Falsified;
      d.terminal = true;
      return d;
    }
    d.terminal = cap_ && state.t() >= *cap_;
    return d;
  }

 private:
  bool reaches_p(const PosteriorState& state, const std::vector<std::size_t>& group, Bits log2_mass) const {
    if (cfg_.p < 1.0) return log2_mass >= log2_p_;
    // p = 1 needs the rest of the set to be impossible, not merely negligible
    const auto lp = state.log2_posterior();
    for (std::size_t i = 0; i < lp.size(); ++i)
      if (std::find(group.begin(), group.end(), i) == group.end() && !std::isinf(lp[i])) return false;
    return true;
  }

  bool typical_for_some(const std::vector<std::size_t>& group, std::span<const double> loglik, std::size_t t) const {
    if (t == 0) return true;
    for (auto i : group)
      if (!std::isinf(loglik[i]) && aep_region(-loglik[i], t, rates_[i], eps_p_) == TypicalRegion::Typical) return true;
    return false;
  }

  bool all_atypical(std::span<const double> loglik, std::size_t t) const {
    for (std::size_t i = 0; i < loglik.size(); ++i) {
      if (std::isinf(loglik[i])) continue;
      if (t < warm_up_[i]) return false;
      if (aep_region(-loglik[i], t, rates_[i], eps_q_) == TypicalRegion::Typical) return false;
    }
    return true;
  }

  StoppingConfig cfg_;
  std::vector<std::vector<std::size_t>> groups_;
  std::optional<std::size_t> cap_;
  std::vector<Bits> rates_;
  std::vector<std::size_t> warm_up_;
  Bits log2_p_ = 0.0;
  Bits eps_p_ = 0.0;
  Bits eps_q_ = 0.0;
};

inline Decision check_stop(const PosteriorState& state, const StoppingConfig& cfg) {
  return StoppingRule(state.set(), cfg).check(state, true);
}

}  // namespace idkit
