#pragma once
// Typical-set thresholds on sequence probabilities.
//
// Two slack conventions are provided:
//   typical_set_bounds  fixed slack:      2^(-t*H +/- log2 level)
//   aep_bounds          per-symbol slack: 2^(-t*(H +/- eps)),  eps = -log2 level
// Membership and the stopping rule use the per-symbol form.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "idkit/errors.hpp"
#include "idkit/process_spec.hpp"
#include "idkit/sequence_measures.hpp"

namespace idkit {

struct TypicalBounds {
  double lower = 0.0;  // probability
  double upper = 0.0;
  Bits log2_lower = 0.0;
  Bits log2_upper = 0.0;
};

namespace detail {
inline void check_level(double level) {
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("typical-set level must lie in (0, 1]");
}
inline TypicalBounds bounds_from_log2(Bits lo, Bits hi) { return {std::exp2(lo), std::exp2(hi), lo, hi}; }
}  // namespace detail

/// Slack -log2(level) is added once, independent of t.
inline TypicalBounds typical_set_bounds(Bits entropy_rate_bits, std::size_t t, double level) {
  detail::check_level(level);
  const double centre = -static_cast<double>(t) * entropy_rate_bits;
  const double slack = -std::log2(level);
  return detail::bounds_from_log2(centre - slack, centre + slack);
}
inline TypicalBounds typical_set_bounds(const MarkovSpec& spec, std::size_t t, double level) {
  return typical_set_bounds(entropy_rate(spec), t, level);
}

/// Slack -log2(level) per symbol.
inline TypicalBounds aep_bounds(Bits entropy_rate_bits, std::size_t t, double level) {
  detail::check_level(level);
  const double n = static_cast<double>(t);
  const double eps = -std::log2(level);
  return detail::bounds_from_log2(-n * (entropy_rate_bits + eps), -n * (entropy_rate_bits - eps));
}
inline TypicalBounds aep_bounds(const MarkovSpec& spec, std::size_t t, double level) {
  return aep_bounds(entropy_rate(spec), t, level);
}

/// Observations needed before a typicality comparison at level q is trusted:
/// ceil(H - log2 q). q = 0 never warms up.
inline std::size_t warm_up_threshold(Bits entropy_rate_bits, double q) {
  if (q <= 0.0) return std::numeric_limits<std::size_t>::max();
  return static_cast<std::size_t>(std::ceil(entropy_rate_bits - std::log2(q) - 1e-12));
}

enum class TypicalRegion { Typical, AtypicalImprobable, AtypicalProbable, Undetermined };

inline const char* to_string(TypicalRegion r) {
  switch (r) {
    case TypicalRegion::Typical: return "typical";
    case TypicalRegion::AtypicalImprobable: return "atypical-improbable";
    case TypicalRegion::AtypicalProbable: return "atypical-probable";
    case TypicalRegion::Undetermined: return "undetermined";
  }
  return "?";
}

/// Region of a sequence with surprisal `bits` (= -log2 P) after t symbols under
/// per-symbol slack eps. Comparisons allow 1e-9 bits of rounding per symbol.
inline TypicalRegion aep_region(Bits bits, std::size_t t, Bits entropy_rate_bits, Bits eps) {
  const double n = static_cast<double>(t);
  const double fuzz = tolerance::kCompare * std::max(1.0, n);
  if (bits > n * (entropy_rate_bits + eps) + fuzz) return TypicalRegion::AtypicalImprobable;
  if (bits < n * (entropy_rate_bits - eps) - fuzz) return TypicalRegion::AtypicalProbable;
  return TypicalRegion::Typical;
}

struct Membership {
  TypicalRegion region = TypicalRegion::Undetermined;
  Bits surprisal = 0.0;
  TypicalBounds bounds;
  std::size_t warm_up = 0;
  bool warmed_up = false;  // false: region is Undetermined because t < warm_up
};

inline Membership typical_membership(const MarkovSpec& spec, std::span<const Symbol> observations, double q) {
  detail::check_level(q);
  const Bits h = entropy_rate(spec);
  Membership m;
  m.surprisal = sequence_log_probability(spec, observations);
  m.bounds = aep_bounds(h, observations.size(), q);
  m.warm_up = warm_up_threshold(h, q);
  m.warmed_up = observations.size() >= m.warm_up;
  m.region = m.warmed_up ? aep_region(m.surprisal, observations.size(), h, -std::log2(q)) : TypicalRegion::Undetermined;
  return m;
}

struct ThresholdRow {
  std::size_t t = 0;
  TypicalBounds p_bounds;
  TypicalBounds q_bounds;
  double centre = 0.0;  // 2^(-t H)
};

/// Threshold table for t = 1..t_max with fixed-slack bounds at levels p and q.
inline std::vector<ThresholdRow> threshold_table(const MarkovSpec& spec, double p, double q, std::size_t t_max) {
  if (!(q <= p)) throw DomainError("figure table needs q <= p");
  const Bits h = entropy_rate(spec);
  std::vector<ThresholdRow> rows;
  for (std::size_t t = 1; t <= t_max; ++t)
    rows.push_back({t, typical_set_bounds(h, t, p), typical_set_bounds(h, t, q), std::exp2(-static_cast<double>(t) * h)});
  return rows;
}

}  // namespace idkit
