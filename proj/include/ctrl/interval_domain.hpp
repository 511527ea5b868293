#pragma once

#include <optional>
#include <vector>

#include "ctrl/bits.hpp"
#include "ctrl/state.hpp"

namespace ctrl {

enum class Guarantee { Strong, Weak };

struct ControlInterval {
  Word lo = 0;
  Word hi = 0;
  Guarantee guarantee = Guarantee::Weak;

  bool operator==(const ControlInterval&) const = default;
};

// Sorted disjoint intervals over [0, 2^width - 1]; adjacency occurs only
// across differing guarantees (same-guarantee neighbors are coalesced). An
// optional fixed-bits pattern restricts the represented set to values with
// v & mask == bits. `exact` means the represented set is the feasible set:
// all intervals Strong and no split budget exhaustion.
struct ControlDomain {
  unsigned width = 0;
  std::vector<ControlInterval> intervals;
  std::optional<FixedBits> fixed_bits;
  bool exact = false;
  unsigned splits_used = 0;
  bool budget_exhausted = false;

  static ControlDomain from_values(unsigned width,
                                   const std::vector<Word>& sorted_values);

  bool all_strong() const;
  bool empty() const { return intervals.empty(); }
  bool contains(Word v) const;
  bool is_full() const;
  BigCount count() const;           // fixed-bits corrected
  BigCount count_strong() const;    // Strong intervals only
  // Enumerates the represented set; throws BudgetError beyond `limit`.
  std::vector<Word> expand(std::size_t limit = std::size_t{1} << 22) const;
  // Coalesces overlapping/adjacent same-guarantee intervals.
  void normalize();
};

// Set union of the represented sets. A merged point is Strong iff it was in
// a Strong region of at least one input. Matching fixed-bits survive;
// otherwise patterns are dissolved into intervals first (bounded by the
// expansion limit). Exactness is preserved when both inputs are exact.
ControlDomain merge_domains(const ControlDomain& a, const ControlDomain& b);

// Modular shift of the represented set (value -> value + offset mod 2^w),
// splitting intervals that wrap. Dissolves fixed bits when offset != 0.
ControlDomain shift_domain(const ControlDomain& d, std::int64_t offset);

// Represented-set inclusion (a subset of b).
bool domain_subset(const ControlDomain& a, const ControlDomain& b);

// Represented set as an interval list with patterns applied (used by merge
// and subset checks); may be large, bounded by `limit` runs.
std::vector<std::pair<Word, Word>> domain_runs(const ControlDomain& d,
                                               std::size_t limit = std::size_t{1}
                                                                   << 22);

}  // namespace ctrl
