#pragma once

#include <optional>
#include <string>

#include "ctrl/expr.hpp"

namespace ctrl {

// Counts can reach 2^64 (the full 64-bit domain), one past Word range.
using BigCount = unsigned __int128;

std::string big_to_string(BigCount v);

struct FixedBits {
  Word mask = 0;
  Word bits = 0;

  bool matches(Word v) const { return (v & mask) == bits; }
  bool operator==(const FixedBits&) const = default;
};

// Smallest y >= from with y & mask == bits, restricted to `width` bits.
// Returns nullopt when no such value exists below 2^width.
std::optional<Word> next_matching(Word from, const FixedBits& fb, unsigned width);

// Exact number of v in [lo, hi] with v & mask == bits (digit walk, no
// enumeration). Requires bits & ~mask == 0.
BigCount count_matching(Word lo, Word hi, const FixedBits& fb, unsigned width);

inline BigCount interval_count(Word lo, Word hi) {
  return static_cast<BigCount>(hi - lo) + 1;
}

}  // namespace ctrl
