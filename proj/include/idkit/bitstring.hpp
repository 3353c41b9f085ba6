#pragma once
// Binary query strings, generator-backed streams, and the observation cap.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idkit/errors.hpp"

namespace idkit {

/// Finite string over {0, 1}. Ordering is lexicographic with a proper prefix
/// sorting before its extensions ("1" < "10" < "11").
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw DomainError("bit strings hold only 0 and 1");
  }

  static BitString from_string(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
      if (c != '0' && c != '1') throw DomainError("bit string contains '" + std::string(1, c) + "'");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BitString(std::move(bits));
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  std::size_t length() const noexcept { return bits_.size(); }
  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  /// Symbols [start, start + len), 0-based.
  BitString slice(std::size_t start, std::size_t len) const {
    if (start + len > bits_.size()) throw DomainError("slice exceeds string length");
    return BitString(std::vector<std::uint8_t>(bits_.begin() + static_cast<std::ptrdiff_t>(start),
                                               bits_.begin() + static_cast<std::ptrdiff_t>(start + len)));
  }

  BitString prefix(std::size_t len) const { return slice(0, std::min(len, bits_.size())); }

  bool starts_with(const BitString& p) const {
    return p.length() <= length() && std::equal(p.bits_.begin(), p.bits_.end(), bits_.begin());
  }

  friend auto operator<=>(const BitString&, const BitString&) = default;
  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Probability resolution r. Observations are capped at ceil(-log2 r) symbols;
/// r = 0 removes the cap and r = 1 forbids any observation.
class Resolution {
 public:
  Resolution() = default;
  explicit Resolution(double r) : r_(r) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError("resolution must lie in [0, 1]");
  }

  double value() const noexcept { return r_; }

  std::optional<std::size_t> cap() const {
    if (r_ == 0.0) return std::nullopt;
    const double bits = -std::log2(r_);
    const double nearest = std::round(bits);
    // powers of two map exactly
    if (std::abs(bits - nearest) < 1e-12) return static_cast<std::size_t>(nearest);
    return static_cast<std::size_t>(std::ceil(bits));
  }

  /// Resolution whose cap is exactly `symbols`.
  static Resolution from_cap(std::size_t symbols) { return Resolution(std::ldexp(1.0, -static_cast<int>(symbols))); }

 private:
  double r_ = 0.0;
};

/// Conceptually infinite string produced by a deterministic generator. Only
/// `cap` symbols can ever be read.
class StreamString {
 public:
  using Generator = std::function<std::uint8_t(std::size_t)>;

  StreamString(Generator gen, std::size_t cap) : gen_(std::move(gen)), cap_(cap) {}
  StreamString(Generator gen, Resolution r) : gen_(std::move(gen)) {
    const auto c = r.cap();
    if (!c) throw RefusalError("a stream string needs a positive resolution to bound its reads");
    cap_ = *c;
  }

  std::size_t cap() const noexcept { return cap_; }

  std::uint8_t at(std::size_t i) const {
    if (i >= cap_) throw PreconditionError("read beyond the stream's materialization cap");
    const auto b = gen_(i);
    if (b > 1) throw DomainError("stream generator produced a non-binary symbol");
    return b;
  }

  BitString materialize(std::size_t n) const {
    if (n > cap_) throw PreconditionError("materialization beyond the stream's cap");
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = at(i);
    return BitString(std::move(bits));
  }

 private:
  Generator gen_;
  std::size_t cap_ = 0;
};

}  // namespace idkit
