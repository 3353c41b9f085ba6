#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace idkit {

/// Information quantities are always in bits (log base 2).
using Bits = double;

/// Distinguished value for infinite surprisal / divergence.
inline constexpr Bits kInfiniteBits = std::numeric_limits<double>::infinity();

namespace tolerance {
inline constexpr double kSimplexMass = 1e-12;   // ProbVector / JointTable mass
inline constexpr double kSequenceMass = 1e-9;   // enumerated block distributions
inline constexpr double kCompare = 1e-9;        // measure comparisons
inline constexpr double kStationary = 1e-9;     // shift consistency
inline constexpr double kPowerIteration = 1e-12;
inline constexpr double kSeriesTruncation = 1e-12;
}  // namespace tolerance

/// Enumeration is only permitted up to this many sequences.
inline constexpr std::size_t kMaxEnumeratedSequences = std::size_t{1} << 20;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The computation is well defined but refused (too large, non-halting).
class RefusalError : public Error {
 public:
  using Error::Error;
};

/// The empirical or posterior distribution is undefined for the request.
class UndefinedDistributionError : public Error {
 public:
  using Error::Error;
};

/// Sorted set construction found members out of order.
class SortednessError : public PreconditionError {
 public:
  SortednessError(std::size_t index, const std::string& what)
      : PreconditionError(what), index_(index) {}
  /// 1-based position of the first member that is not greater than its predecessor.
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace idkit
