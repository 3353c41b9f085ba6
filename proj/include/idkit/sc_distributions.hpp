#pragma once
// Sample-complexity distributions of pairwise string comparison in random
// order: finite strings without resampling, infinite strings (geometric), and
// their enumeration / Monte Carlo oracles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <unordered_set>
#include <variant>
#include <vector>

#include "idkit/bit_source.hpp"
#include "idkit/bitstring.hpp"
#include "idkit/errors.hpp"
#include "idkit/format.hpp"
#include "idkit/rational.hpp"

namespace idkit {

/// Number of comparisons needed to tell apart two length-L strings that differ
/// in K positions when positions are inspected in uniformly random order.
/// Support is [1, L-K+1] for K >= 1; K = 0 is a point mass at L (verification).
class PairwiseSCDist {
 public:
  static constexpr std::uint64_t kExactLimit = 20;

  PairwiseSCDist(std::uint64_t length, std::uint64_t differing) : L_(length), K_(differing) {
    if (L_ < 1) throw DomainError("string length must be at least 1");
    if (K_ > L_) throw DomainError("differing positions exceed string length");
  }

  std::uint64_t length() const noexcept { return L_; }
  std::uint64_t differing() const noexcept { return K_; }
  std::uint64_t min_support() const noexcept { return K_ == 0 ? L_ : 1; }
  std::uint64_t max_support() const noexcept { return K_ == 0 ? L_ : L_ - K_ + 1; }

  Rational pmf_exact(std::uint64_t i) const {
    if (i < min_support() || i > max_support()) return 0;
    if (K_ == 0) return 1;
    if (i == L_ - K_ + 1) return 1 - cdf_exact(L_ - K_);
    // (L-K)!/L! * ((L-i+1)!/(L-K-i+1)! - (L-i)!/(L-K-i)!)
    const Rational scale(factorial(L_ - K_), factorial(L_));
    const BigInt a = falling_ratio(L_ - i + 1, L_ - K_ - i + 1);
    const BigInt b = falling_ratio(L_ - i, L_ - K_ - i);
    return scale * Rational(a - b);
  }

  Rational cdf_exact(std::uint64_t i) const {
    if (i < min_support()) return 0;
    if (i >= max_support()) return 1;
    // 1 - (L-K)!(L-i)! / (L!(L-K-i)!)
    return 1 - Rational(factorial(L_ - K_) * factorial(L_ - i), factorial(L_) * factorial(L_ - K_ - i));
  }

  double pmf(std::uint64_t i) const {
    if (L_ <= kExactLimit) return to_double(pmf_exact(i));
    if (i < min_support() || i > max_support()) return 0.0;
    return std::max(0.0, cdf(i) - cdf(i - 1));
  }

  double cdf(std::uint64_t i) const {
    if (L_ <= kExactLimit) return to_double(cdf_exact(i));
    if (i < min_support()) return 0.0;
    if (i >= max_support()) return 1.0;
    const auto lf = [](std::uint64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); };
    return 1.0 - std::exp(lf(L_ - K_) + lf(L_ - i) - lf(L_) - lf(L_ - K_ - i));
  }

  Rational moment_exact(unsigned m) const {
    if (m < 1) throw DomainError("moment order must be at least 1");
    Rational sum = 0;
    for (std::uint64_t i = min_support(); i <= max_support(); ++i) sum += Rational(boost::multiprecision::pow(BigInt(i), m)) * pmf_exact(i);
    return sum;
  }

 private:
  std::uint64_t L_;
  std::uint64_t K_;
};

inline Rational pairwise_pmf_exact(std::uint64_t L, std::uint64_t K, std::uint64_t i) {
  return PairwiseSCDist(L, K).pmf_exact(i);
}
inline Rational pairwise_cdf_exact(std::uint64_t L, std::uint64_t K, std::uint64_t i) {
  return PairwiseSCDist(L, K).cdf_exact(i);
}
inline double pairwise_pmf(std::uint64_t L, std::uint64_t K, std::uint64_t i) { return PairwiseSCDist(L, K).pmf(i); }
inline double pairwise_cdf(std::uint64_t L, std::uint64_t K, std::uint64_t i) { return PairwiseSCDist(L, K).cdf(i); }

/// Identical strings: every one of the L comparisons is needed.
inline PairwiseSCDist pairwise_verification(std::uint64_t L) { return PairwiseSCDist(L, 0); }

/// Comparisons until the first differing symbol when each comparison differs
/// independently with probability p.
class GeometricSCDist {
 public:
  explicit GeometricSCDist(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("geometric parameter outside [0, 1]");
  }

  double p() const noexcept { return p_; }
  bool halts() const noexcept { return p_ > 0.0; }

  /// nullopt when p = 0: the comparison never stops.
  std::optional<double> pmf(std::uint64_t i) const {
    if (p_ == 0.0) return std::nullopt;
    if (i < 1) return 0.0;
    return std::pow(1.0 - p_, static_cast<double>(i - 1)) * p_;
  }

  std::optional<double> cdf(std::uint64_t i) const {
    if (p_ == 0.0) return std::nullopt;
    return 1.0 - std::pow(1.0 - p_, static_cast<double>(i));
  }

  /// P(i > n).
  std::optional<double> survival(std::uint64_t n) const {
    if (p_ == 0.0) return std::nullopt;
    return std::pow(1.0 - p_, static_cast<double>(n));
  }

  /// E[i^m] by summing the series until the tail is below 1e-12.
  double moment(unsigned m) const {
    if (m < 1) throw DomainError("moment order must be at least 1");
    if (p_ == 0.0) throw UndefinedDistributionError("moments of a never-halting comparison are undefined");
    if (p_ == 1.0) return 1.0;
    const double q = 1.0 - p_;
    double sum = 0.0;
    for (std::uint64_t i = 1;; ++i) {
      const double term = std::pow(static_cast<double>(i), m) * std::pow(q, static_cast<double>(i - 1)) * p_;
      sum += term;
      // terms past the mode shrink by at least the ratio below; bound the tail geometrically
      const double ratio = std::pow(static_cast<double>(i + 1) / static_cast<double>(i), m) * q;
      if (ratio < 1.0 && term * ratio / (1.0 - ratio) < tolerance::kSeriesTruncation * std::max(1.0, sum)) break;
      if (i > 100'000'000) throw RefusalError("geometric moment series did not converge");
    }
    return sum;
  }

 private:
  double p_;
};

inline std::optional<double> geometric_pmf(double p, std::uint64_t i) { return GeometricSCDist(p).pmf(i); }

/// Observed stopping indices. Censored trials (no stop within the budget) are
/// counted apart; counts plus censored equals trials.
class EmpiricalSCDist {
 public:
  void add(std::uint64_t i, std::uint64_t count = 1) {
    counts_[i] += count;
    trials_ += count;
  }
  void add_censored(std::uint64_t count = 1) {
    censored_ += count;
    trials_ += count;
  }
  void merge(const EmpiricalSCDist& other) {
    for (const auto& [i, c] : other.counts_) counts_[i] += c;
    censored_ += other.censored_;
    trials_ += other.trials_;
  }

  std::uint64_t trials() const noexcept { return trials_; }
  std::uint64_t censored() const noexcept { return censored_; }
  std::uint64_t completed() const noexcept { return trials_ - censored_; }
  const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }

  std::uint64_t count(std::uint64_t i) const {
    auto it = counts_.find(i);
    return it == counts_.end() ? 0 : it->second;
  }

  /// Fraction of all trials stopping at i.
  double pmf(std::uint64_t i) const {
    if (trials_ == 0) throw UndefinedDistributionError("empirical distribution of zero trials");
    return static_cast<double>(count(i)) / static_cast<double>(trials_);
  }
  Rational pmf_exact(std::uint64_t i) const {
    if (trials_ == 0) throw UndefinedDistributionError("empirical distribution of zero trials");
    return Rational(count(i), trials_);
  }

  /// Raw moment over completed trials.
  double moment(unsigned m) const {
    if (m < 1) throw DomainError("moment order must be at least 1");
    if (completed() == 0) throw UndefinedDistributionError("no completed trials");
    double sum = 0.0;
    for (const auto& [i, c] : counts_) sum += std::pow(static_cast<double>(i), m) * static_cast<double>(c);
    return sum / static_cast<double>(completed());
  }
  Rational moment_exact(unsigned m) const {
    if (m < 1) throw DomainError("moment order must be at least 1");
    if (completed() == 0) throw UndefinedDistributionError("no completed trials");
    Rational sum = 0;
    for (const auto& [i, c] : counts_) sum += Rational(boost::multiprecision::pow(BigInt(i), m) * c);
    return sum / Rational(completed());
  }
  /// Smallest i with P(stop <= i) >= level over all trials, censored trials
  /// counting as later than every index; nullopt when the level falls in the
  /// censored mass.
  std::optional<std::uint64_t> quantile(double level) const {
    if (trials_ == 0) throw UndefinedDistributionError("empirical distribution of zero trials");
    if (!(level > 0.0 && level <= 1.0)) throw DomainError("quantile level must lie in (0, 1]");
    const double need = level * static_cast<double>(trials_);
    std::uint64_t acc = 0;
    for (const auto& [i, c] : counts_) {
      acc += c;
      if (static_cast<double>(acc) >= need) return i;
    }
    return std::nullopt;
  }
  std::optional<std::uint64_t> median() const { return quantile(0.5); }

  double mean() const { return moment(1); }
  double variance() const {
    const double mu = moment(1);
    return std::max(0.0, moment(2) - mu * mu);
  }

  /// Total variation distance to a reference pmf, over the union of supports
  /// up to `max_i` (the reference's mass beyond max_i is added as well).
  template <class Pmf>
  double total_variation(Pmf&& reference, std::uint64_t max_i) const {
    double tv = 0.0;
    double ref_mass = 0.0;
    for (std::uint64_t i = 0; i <= max_i; ++i) {
      const double r = reference(i);
      ref_mass += r;
      tv += std::abs(pmf(i) - r);
    }
    for (const auto& [i, c] : counts_)
      if (i > max_i) tv += static_cast<double>(c) / static_cast<double>(trials_);
    tv += static_cast<double>(censored_) / static_cast<double>(trials_);
    tv += std::max(0.0, 1.0 - ref_mass);
    return tv / 2.0;
  }

  friend bool operator==(const EmpiricalSCDist&, const EmpiricalSCDist&) = default;

 private:
  std::map<std::uint64_t, std::uint64_t> counts_;
  std::uint64_t trials_ = 0;
  std::uint64_t censored_ = 0;
};

using SCDist = std::variant<PairwiseSCDist, GeometricSCDist, EmpiricalSCDist>;

/// m-th raw moment; exact for finite-support distributions.
inline double dist_moments(const SCDist& dist, unsigned m) {
  return std::visit(
      [m](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PairwiseSCDist>) return to_double(d.moment_exact(m));
        else return d.moment(m);
      },
      dist);
}

namespace detail {
inline std::uint64_t hamming(const BitString& a, const BitString& b) {
  std::uint64_t k = 0;
  for (std::size_t i = 0; i < a.length(); ++i) k += a[i] != b[i];
  return k;
}

// comparisons until the first differing position along `order`
inline std::uint64_t stop_index(const BitString& a, const BitString& b, const std::vector<std::size_t>& order) {
  for (std::size_t n = 0; n < order.size(); ++n)
    if (a[order[n]] != b[order[n]]) return n + 1;
  return order.size();
}
}  // namespace detail

/// Exact distribution by running every one of the L! comparison orders.
inline EmpiricalSCDist enumerate_orderings_oracle(const BitString& a, const BitString& b) {
  if (a.length() != b.length()) throw RefusalError("strings of different lengths");
  if (a.length() > 10) throw RefusalError("enumeration limited to length 10");
  if (a.empty()) throw DomainError("strings must be non-empty");
  std::vector<std::size_t> order(a.length());
  std::iota(order.begin(), order.end(), std::size_t{0});
  EmpiricalSCDist dist;
  do {
    dist.add(detail::stop_index(a, b, order));
  } while (std::next_permutation(order.begin(), order.end()));
  return dist;
}

/// Uniformly random comparison orders (without resampling positions).
inline EmpiricalSCDist mc_pairwise_oracle(const BitString& a, const BitString& b, std::uint64_t trials,
                                          std::uint64_t seed) {
  if (trials == 0) throw DomainError("Monte Carlo oracle needs at least one trial");
  if (a.length() != b.length()) throw DomainError("strings of different lengths");
  if (a.empty()) throw DomainError("strings must be non-empty");
  BitSource src(seed);
  EmpiricalSCDist dist;
  std::vector<std::size_t> remaining(a.length());
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::uint64_t n = 0;
    std::size_t left = remaining.size();
    bool stopped = false;
    while (left > 0) {
      const auto pick = static_cast<std::size_t>(src.uniform_below(left));
      const std::size_t pos = remaining[pick];
      remaining[pick] = remaining[--left];
      ++n;
      if (a[pos] != b[pos]) {
        stopped = true;
        break;
      }
    }
    dist.add(stopped ? n : a.length());
  }
  return dist;
}

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
inline double hash_unit(std::uint64_t a, std::uint64_t b) {
  return static_cast<double>(splitmix64(splitmix64(a) ^ b) >> 11) * 0x1.0p-53;
}
}  // namespace detail

/// A pair of effectively infinite strings in which each position differs with
/// probability p, generated from a key so any position can be read on demand.
struct InfinitePair {
  StreamString first;
  StreamString second;

  static InfinitePair make(double p, std::uint64_t key) {
    constexpr std::size_t kCap = std::size_t{1} << 62;
    auto base = [key](std::size_t pos) {
      return static_cast<std::uint8_t>(detail::hash_unit(key, 2 * pos) < 0.5 ? 0 : 1);
    };
    auto other = [key, p, base](std::size_t pos) {
      const bool differ = detail::hash_unit(key, 2 * pos + 1) < p;
      return static_cast<std::uint8_t>(base(pos) ^ (differ ? 1 : 0));
    };
    return {StreamString(base, kCap), StreamString(other, kCap)};
  }
};

/// Random-order comparison of infinite string pairs. A trial that has not met
/// a differing symbol after `budget` comparisons is censored.
inline EmpiricalSCDist mc_infinite_pair_oracle(double p, std::uint64_t trials, std::uint64_t seed,
                                               std::uint64_t budget = std::uint64_t{1} << 20) {
  if (trials == 0) throw DomainError("Monte Carlo oracle needs at least one trial");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("difference probability outside [0, 1]");
  BitSource src(seed);
  EmpiricalSCDist dist;
  std::unordered_set<std::uint64_t> seen;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto pair = InfinitePair::make(p, derive_seed(seed, t));
    seen.clear();
    bool stopped = false;
    std::uint64_t n = 0;
    while (n < budget) {
      const std::uint64_t pos = src.next_bits(62);
      if (!seen.insert(pos).second) continue;
      ++n;
      if (pair.first.at(pos) != pair.second.at(pos)) {
        stopped = true;
        break;
      }
    }
    if (stopped) dist.add(n);
    else dist.add_censored();
  }
  return dist;
}

struct SCRow {
  std::uint64_t i;
  double pmf;
  double cdf;
};

inline std::vector<SCRow> sc_table(const PairwiseSCDist& d) {
  std::vector<SCRow> rows;
  for (std::uint64_t i = d.min_support(); i <= d.max_support(); ++i) rows.push_back({i, d.pmf(i), d.cdf(i)});
  return rows;
}

/// Rows until the survival drops below `tail` or `max_rows` rows are written.
inline std::vector<SCRow> sc_table(const GeometricSCDist& d, double tail = 1e-12, std::uint64_t max_rows = 10'000) {
  if (!d.halts()) throw RefusalError("p = 0: the comparison never stops, no table exists");
  std::vector<SCRow> rows;
  for (std::uint64_t i = 1; i <= max_rows; ++i) {
    rows.push_back({i, *d.pmf(i), *d.cdf(i)});
    if (*d.survival(i) < tail) break;
  }
  return rows;
}

inline void write_sc_csv(std::ostream& out, const std::vector<SCRow>& rows) {
  out << "i,pmf,cdf\n";
  for (const auto& r : rows) out << r.i << ',' << format_double(r.pmf) << ',' << format_double(r.cdf) << '\n';
}

}  // namespace idkit
