#pragma once
// Information measures over finite discrete distributions. All results are in bits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "idkit/errors.hpp"

namespace idkit {

/// A point on the probability simplex over a finite alphabet {0, ..., k-1}.
class ProbVector {
 public:
  ProbVector() : probs_{1.0} {}

  explicit ProbVector(std::vector<double> probs) : probs_(std::move(probs)) { validate(); }
  ProbVector(std::initializer_list<double> probs) : probs_(probs) { validate(); }

  /// Entries numerators[i] / 2^exponent; exact whenever exponent <= 53.
  static ProbVector from_dyadic(std::span<const std::uint64_t> numerators, int exponent) {
    std::vector<double> probs;
    probs.reserve(numerators.size());
    for (auto n : numerators) probs.push_back(std::ldexp(static_cast<double>(n), -exponent));
    return ProbVector(std::move(probs));
  }

  /// Relative frequencies; throws UndefinedDistributionError when all counts are zero.
  static ProbVector from_counts(std::span<const std::uint64_t> counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw UndefinedDistributionError("relative frequencies of zero observations");
    std::vector<double> probs;
    probs.reserve(counts.size());
    for (auto c : counts) probs.push_back(static_cast<double>(c) / static_cast<double>(total));
    return ProbVector(std::move(probs));
  }

  static ProbVector uniform(std::size_t k) {
    if (k == 0) throw DomainError("alphabet size must be at least 1");
    return ProbVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  static ProbVector point_mass(std::size_t k, std::size_t symbol) {
    if (symbol >= k) throw DomainError("point mass symbol outside alphabet");
    std::vector<double> probs(k, 0.0);
    probs[symbol] = 1.0;
    return ProbVector(std::move(probs));
  }

  std::size_t alphabet_size() const noexcept { return probs_.size(); }
  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  auto begin() const noexcept { return probs_.begin(); }
  auto end() const noexcept { return probs_.end(); }

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  void validate() const {
    if (probs_.empty()) throw DomainError("probability vector must have at least one entry");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0 && p <= 1.0)) throw DomainError("probability entry outside [0, 1]");
      total += p;
    }
    if (std::abs(total - 1.0) > tolerance::kSimplexMass)
      throw DomainError("probabilities sum to " + std::to_string(total) + ", not 1");
  }

  std::vector<double> probs_;
};

/// -log2(p). Returns kInfiniteBits for p = 0.
inline Bits surprisal(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("surprisal of a value outside [0, 1]");
  if (p == 0.0) return kInfiniteBits;
  if (p == 1.0) return 0.0;
  return -std::log2(p);
}

namespace detail {
// p * log2(p) with 0 log 0 = 0
inline double plog2p(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }
}  // namespace detail

inline Bits entropy(const ProbVector& dist) {
  Bits h = 0.0;
  for (double p : dist) h -= detail::plog2p(p);
  return std::max(h, 0.0);
}

struct Divergences {
  Bits cross_entropy = 0.0;
  Bits kl = 0.0;
};

/// Cross entropy H(P||Q) and relative entropy D(P||Q); both infinite when P is not
/// absolutely continuous with respect to Q.
inline Divergences divergences(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) throw DomainError("divergence between different alphabets");
  Divergences d;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return {kInfiniteBits, kInfiniteBits};
    d.cross_entropy -= p[i] * std::log2(q[i]);
    d.kl += p[i] * std::log2(p[i] / q[i]);
  }
  d.kl = std::max(d.kl, 0.0);
  return d;
}

inline Bits cross_entropy(const ProbVector& p, const ProbVector& q) { return divergences(p, q).cross_entropy; }
inline Bits kl_divergence(const ProbVector& p, const ProbVector& q) { return divergences(p, q).kl; }

/// Joint distribution P(X = x, Y = y); rows index X, columns index Y.
class JointTable {
 public:
  JointTable(std::vector<std::vector<double>> table) : table_(std::move(table)) { validate(); }

  std::size_t rows() const noexcept { return table_.size(); }
  std::size_t cols() const noexcept { return table_.front().size(); }
  double operator()(std::size_t x, std::size_t y) const { return table_[x][y]; }

  ProbVector marginal_x() const {
    std::vector<double> m(rows(), 0.0);
    for (std::size_t x = 0; x < rows(); ++x)
      for (double v : table_[x]) m[x] += v;
    return ProbVector(normalized(std::move(m)));
  }

  ProbVector marginal_y() const {
    std::vector<double> m(cols(), 0.0);
    for (const auto& row : table_)
      for (std::size_t y = 0; y < cols(); ++y) m[y] += row[y];
    return ProbVector(normalized(std::move(m)));
  }

 private:
  // absorbs rounding so marginals pass the simplex check
  static std::vector<double> normalized(std::vector<double> m) {
    double total = 0.0;
    for (double v : m) total += v;
    for (double& v : m) v = std::min(1.0, v / total);
    return m;
  }

  void validate() const {
    if (table_.empty() || table_.front().empty()) throw DomainError("joint table must be non-empty");
    double total = 0.0;
    for (const auto& row : table_) {
      if (row.size() != table_.front().size()) throw DomainError("joint table rows differ in length");
      for (double v : row) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("joint probability outside [0, 1]");
        total += v;
      }
    }
    if (std::abs(total - 1.0) > tolerance::kSimplexMass) throw DomainError("joint table mass is not 1");
  }

  std::vector<std::vector<double>> table_;
};

struct JointMeasures {
  Bits joint_entropy = 0.0;
  Bits conditional_entropy = 0.0;  // H(X | Y)
  Bits mutual_information = 0.0;
};

inline JointMeasures joint_measures(const JointTable& joint) {
  const ProbVector px = joint.marginal_x();
  const ProbVector py = joint.marginal_y();
  JointMeasures m;
  for (std::size_t x = 0; x < joint.rows(); ++x) {
    for (std::size_t y = 0; y < joint.cols(); ++y) {
      const double pxy = joint(x, y);
      if (pxy == 0.0) continue;
      m.joint_entropy -= pxy * std::log2(pxy);
      m.conditional_entropy -= pxy * std::log2(pxy / py[y]);
      m.mutual_information += pxy * std::log2(pxy / (px[x] * py[y]));
    }
  }
  m.conditional_entropy = std::max(m.conditional_entropy, 0.0);
  m.mutual_information = std::max(m.mutual_information, 0.0);
  return m;
}

}  // namespace idkit
