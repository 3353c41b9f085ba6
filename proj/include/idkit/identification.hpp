#pragma once
// Identification of a query bit string against a finite hypothesis set:
// sorted scan, depth-first scan over an unsorted list, and trie walk.
//
// Indices reported in IdOutcome (h and partial_subset) are 1-based positions in
// the list handed to the procedure; 0 means "no member".

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "idkit/bitstring.hpp"
#include "idkit/errors.hpp"

namespace idkit {

enum class IdStatus { Verified, Falsified, Undetermined };

inline const char* to_string(IdStatus s) {
  switch (s) {
    case IdStatus::Verified: return "verified";
    case IdStatus::Falsified: return "falsified";
    case IdStatus::Undetermined: return "undetermined";
  }
  return "?";
}

struct IdOutcome {
  IdStatus status = IdStatus::Undetermined;
  std::size_t h = 0;  // best-match member index
  std::size_t i = 0;  // query symbols consumed
  std::vector<std::size_t> partial_subset;

  friend bool operator==(const IdOutcome&, const IdOutcome&) = default;
};

inline nlohmann::json to_json(const IdOutcome& o) {
  return {{"status", to_string(o.status)}, {"h", o.h}, {"i", o.i}, {"partial_subset", o.partial_subset}};
}

/// Duplicate-free members in BitString order.
class SortedHypothesisSet {
 public:
  SortedHypothesisSet() = default;

  /// Validates order in one pass; throws SortednessError at the first violation.
  static SortedHypothesisSet from_sorted(std::vector<BitString> members) {
    if (auto bad = first_violation(members))
      throw SortednessError(*bad, "member " + std::to_string(*bad) + " is not greater than its predecessor");
    SortedHypothesisSet s;
    s.members_ = std::move(members);
    return s;
  }

  /// Sorts and removes duplicates.
  static SortedHypothesisSet sort(std::vector<BitString> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    SortedHypothesisSet s;
    s.members_ = std::move(members);
    return s;
  }

  /// 1-based index of the first member not strictly greater than its predecessor.
  static std::optional<std::size_t> first_violation(const std::vector<BitString>& members) {
    for (std::size_t k = 1; k < members.size(); ++k)
      if (!(members[k - 1] < members[k])) return k + 1;
    return std::nullopt;
  }

  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const BitString& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<BitString>& members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(const BitString& s) const { return std::binary_search(members_.begin(), members_.end(), s); }

  friend bool operator==(const SortedHypothesisSet&, const SortedHypothesisSet&) = default;

 private:
  std::vector<BitString> members_;
};

/// The part of a query that a procedure may look at.
struct ObservedQuery {
  BitString symbols;      // first min(length, cap) symbols
  bool complete = true;   // false when the cap cut the query short

  static ObservedQuery of(const BitString& q, Resolution r) {
    const auto cap = r.cap();
    if (cap && *cap < q.length()) return {q.prefix(*cap), false};
    return {q, true};
  }
  static ObservedQuery of(const StreamString& q, Resolution r) {
    const auto cap = r.cap();
    const std::size_t n = cap ? std::min(*cap, q.cap()) : q.cap();
    return {q.materialize(n), false};
  }
};

using Query = std::variant<BitString, StreamString>;

inline ObservedQuery observe(const Query& q, Resolution r) {
  return std::visit([&](const auto& s) { return ObservedQuery::of(s, r); }, q);
}

namespace detail {

// Compares psi's first n symbols against query's first n in BitString order.
inline int compare_prefix(const BitString& psi, const BitString& query, std::size_t n) {
  const std::size_t a = std::min(n, psi.length());
  const std::size_t b = std::min(n, query.length());
  const auto& pb = psi.bits();
  const auto& qb = query.bits();
  const auto c = std::lexicographical_compare_three_way(pb.begin(), pb.begin() + static_cast<std::ptrdiff_t>(a),
                                                        qb.begin(), qb.begin() + static_cast<std::ptrdiff_t>(b));
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace detail

/// Sorted-set scan. Advances a single candidate pointer through the set while
/// observing one more query symbol per round.
inline IdOutcome identify_sorted(const SortedHypothesisSet& set, const ObservedQuery& q) {
  IdOutcome out;
  if (set.empty()) {
    out.status = IdStatus::Falsified;
    return out;
  }
  const BitString& theta = q.symbols;
  const std::size_t n = set.size();
  std::size_t j = 1;
  std::size_t h = 0;
  for (std::size_t i = 1; i <= theta.length(); ++i) {
    h = j;
    out.i = i;
    while (detail::compare_prefix(set[j - 1], theta, i) < 0) {
      ++j;
      if (j > n || detail::compare_prefix(set[j - 1], theta, i) > 0) {
        out.status = IdStatus::Falsified;
        out.h = h;
        return out;
      }
    }
    // a candidate that already exceeds the query falsifies everything after it
    if (detail::compare_prefix(set[j - 1], theta, i) > 0) {
      out.status = IdStatus::Falsified;
      out.h = h;
      return out;
    }
  }
  // set[j-1] extends the observed symbols; so may its successors
  for (std::size_t k = j; k <= n && set[k - 1].starts_with(theta); ++k) out.partial_subset.push_back(k);
  if (out.partial_subset.empty()) {
    out.status = IdStatus::Falsified;
    out.h = h;
    return out;
  }
  if (q.complete) {
    if (set[j - 1].length() == theta.length()) {
      out.status = IdStatus::Verified;
      out.h = j;
      out.partial_subset = {j};
      return out;
    }
    // the query is a proper prefix of the remaining candidates
    out.status = IdStatus::Falsified;
    out.h = j;
    return out;
  }
  out.status = IdStatus::Undetermined;
  out.h = j;
  return out;
}

inline IdOutcome identify_sorted(const SortedHypothesisSet& set, const Query& query, Resolution r) {
  return identify_sorted(set, observe(query, r));
}

/// Depth-first scan over an unsorted, duplicate-free list. Each member is
/// compared symbol by symbol until its first mismatch.
inline IdOutcome identify_depth_first(const std::vector<BitString>& list, const ObservedQuery& q) {
  const BitString& theta = q.symbols;
  std::size_t i = 1;
  std::size_t h = 0;
  std::size_t j = 0;
  bool compared = false;
  std::vector<std::size_t> extending;
  for (const BitString& psi : list) {
    ++j;
    bool mismatch = false;
    for (std::size_t k = 1; k <= theta.length(); ++k) {
      compared = true;
      if (k > i) {
        i = k;
        h = j;
      }
      if (k > psi.length() || psi[k - 1] != theta[k - 1]) {
        mismatch = true;
        break;
      }
    }
    if (mismatch) continue;
    if (q.complete && psi.length() == theta.length()) return {IdStatus::Verified, j, theta.length(), {j}};
    extending.push_back(j);
  }
  IdOutcome out;
  out.h = h;
  out.i = compared ? i : 0;
  if (!q.complete && !extending.empty()) {
    out.status = IdStatus::Undetermined;
    out.partial_subset = std::move(extending);
  } else {
    out.status = IdStatus::Falsified;
    if (q.complete) out.partial_subset = std::move(extending);
  }
  return out;
}

inline IdOutcome identify_depth_first(const std::vector<BitString>& list, const Query& query, Resolution r) {
  return identify_depth_first(list, observe(query, r));
}

/// Binary trie over a member list; each terminal node records its member's
/// 1-based index in that list.
class ContextTree {
 public:
  struct Node {
    std::size_t member = 0;  // nonzero when a member ends here
    std::unique_ptr<Node> child[2];
  };

  ContextTree() : root_(std::make_unique<Node>()) {}

  static ContextTree build(const std::vector<BitString>& members) {
    ContextTree tree;
    for (std::size_t m = 0; m < members.size(); ++m) {
      Node* node = tree.root_.get();
      for (auto b : members[m].bits()) {
        if (!node->child[b]) {
          node->child[b] = std::make_unique<Node>();
          ++tree.nodes_;
        }
        node = node->child[b].get();
      }
      if (node->member != 0) throw PreconditionError("duplicate member " + members[m].to_string());
      node->member = m + 1;
      ++tree.size_;
    }
    return tree;
  }

  const Node& root() const noexcept { return *root_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t node_count() const noexcept { return nodes_; }

  /// Member indices in the subtree, in trie (BitString) order.
  static void collect(const Node& node, std::vector<std::size_t>& out) {
    if (node.member) out.push_back(node.member);
    for (const auto& c : node.child)
      if (c) collect(*c, out);
  }

  /// Root-to-terminal paths paired with their member indices.
  std::vector<std::pair<BitString, std::size_t>> paths() const {
    std::vector<std::pair<BitString, std::size_t>> out;
    std::vector<std::uint8_t> path;
    walk_paths(*root_, path, out);
    return out;
  }

 private:
  static void walk_paths(const Node& node, std::vector<std::uint8_t>& path,
                         std::vector<std::pair<BitString, std::size_t>>& out) {
    if (node.member) out.emplace_back(BitString(path), node.member);
    for (std::uint8_t b = 0; b < 2; ++b) {
      if (!node.child[b]) continue;
      path.push_back(b);
      walk_paths(*node.child[b], path, out);
      path.pop_back();
    }
  }

  std::unique_ptr<Node> root_;
  std::size_t size_ = 0;
  std::size_t nodes_ = 1;
};

inline ContextTree build_context_tree(const std::vector<BitString>& members) { return ContextTree::build(members); }
inline ContextTree build_context_tree(const SortedHypothesisSet& set) { return ContextTree::build(set.members()); }

/// Walks the trie along the observed symbols; i is the depth reached.
inline IdOutcome identify_tree(const ContextTree& tree, const ObservedQuery& q) {
  IdOutcome out;
  const ContextTree::Node* node = &tree.root();
  if (tree.size() == 0) {
    out.status = IdStatus::Falsified;
    return out;
  }
  for (std::size_t d = 0; d < q.symbols.length(); ++d) {
    out.i = d + 1;
    node = node->child[q.symbols[d]].get();
    if (!node) {
      out.status = IdStatus::Falsified;
      return out;
    }
  }
  if (q.complete && node->member) {
    out.status = IdStatus::Verified;
    out.h = node->member;
    out.partial_subset = {node->member};
    return out;
  }
  std::vector<std::size_t> below;
  ContextTree::collect(*node, below);
  std::sort(below.begin(), below.end());
  out.h = below.empty() ? 0 : below.front();
  out.status = q.complete ? IdStatus::Falsified : IdStatus::Undetermined;
  out.partial_subset = std::move(below);
  return out;
}

inline IdOutcome identify_tree(const ContextTree& tree, const Query& query, Resolution r) {
  return identify_tree(tree, observe(query, r));
}

struct SubstringResult {
  IdOutcome outcome;  // indices refer to `slices`
  SortedHypothesisSet slices;
};

/// Identifies query[start, start + window) against the same window of every
/// member long enough to have one. `start` is 1-based.
inline SubstringResult substring_identify(const SortedHypothesisSet& set, const BitString& query, std::size_t start,
                                          std::size_t window, Resolution r = Resolution{}) {
  if (start < 1 || window < 1) throw DomainError("substring start and window must be at least 1");
  if (start - 1 + window > query.length()) throw DomainError("substring window exceeds the query length");
  std::vector<BitString> sliced;
  for (const auto& m : set)
    if (m.length() >= start - 1 + window) sliced.push_back(m.slice(start - 1, window));
  SubstringResult res;
  res.slices = SortedHypothesisSet::sort(std::move(sliced));
  res.outcome = identify_sorted(res.slices, ObservedQuery::of(query.slice(start - 1, window), r));
  return res;
}

struct GrowResult {
  SortedHypothesisSet set;
  bool inserted = false;  // false: the query was already a member (no-op)
};

/// Adds a falsified query to the known set at its sorted position.
inline GrowResult grow_known_set(const SortedHypothesisSet& set, const BitString& query) {
  auto members = set.members();
  const auto pos = std::lower_bound(members.begin(), members.end(), query);
  if (pos != members.end() && *pos == query) return {set, false};
  members.insert(pos, query);
  return {SortedHypothesisSet::from_sorted(std::move(members)), true};
}

/// Newline-delimited 0/1 strings. A first line reading "sorted" asserts order,
/// which is then validated instead of sorted; otherwise the members are sorted.
/// Blank lines and lines starting with '#' are skipped.
inline SortedHypothesisSet parse_hypothesis_set(std::istream& in) {
  std::vector<BitString> members;
  std::string line;
  bool sorted_header = false;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto lead = line.find_first_not_of(" \t");
    line = lead == std::string::npos ? std::string{} : line.substr(lead);
    if (line.empty() || line.front() == '#') continue;
    if (first && line == "sorted") {
      sorted_header = true;
      first = false;
      continue;
    }
    first = false;
    try {
      members.push_back(BitString::from_string(line));
    } catch (const DomainError& e) {
      throw DomainError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return sorted_header ? SortedHypothesisSet::from_sorted(std::move(members))
                       : SortedHypothesisSet::sort(std::move(members));
}

inline SortedHypothesisSet load_hypothesis_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open hypothesis set file " + path);
  return parse_hypothesis_set(in);
}

}  // namespace idkit
