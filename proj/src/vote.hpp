#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "hirank/field.hpp"

namespace hirank::detail {

struct Tally {
  explicit Tally(uint32_t q) : counts(q, 0) {}
  void add(Elem v) {
    ++counts[v];
    ++total;
  }
  Elem top() const { return static_cast<Elem>(std::max_element(counts.begin(), counts.end()) - counts.begin()); }
  uint64_t top_count() const { return counts[top()]; }
  double margin() const { return total ? static_cast<double>(top_count()) / static_cast<double>(total) : 0.0; }
  bool strict_majority() const { return total && 2 * top_count() > total; }

  std::vector<uint64_t> counts;
  uint64_t total = 0;
};

struct VoteOutcome {
  Elem value = 0;
  bool majority = false;  // strict > 1/2
  double margin = 0;
  uint64_t votes = 0;
};

// Adaptive vote: at least min_votes, stop once the leader reaches `margin`,
// never more than max_votes. draw() returns nullopt when no configuration was found;
// max_misses = 0 means 64 * max_votes + 256.
template <class Draw>
VoteOutcome adaptive_vote(uint32_t q, uint32_t min_votes, uint32_t max_votes, double margin, Draw&& draw,
                          uint64_t max_misses = 0) {
  Tally t(q);
  uint64_t misses = 0;
  if (max_misses == 0) max_misses = 64ULL * max_votes + 256;
  while (t.total < max_votes && misses < max_misses) {
    std::optional<Elem> v = draw();
    if (!v) {
      ++misses;
      continue;
    }
    t.add(*v);
    if (t.total >= min_votes && t.margin() >= margin) break;
  }
  return {t.top(), t.strict_majority(), t.margin(), t.total};
}

}  // namespace hirank::detail
