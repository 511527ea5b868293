#include "ctrl/bits.hpp"

#include <algorithm>

namespace ctrl {

std::string big_to_string(BigCount v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

namespace {

// Scatter the low bits of g into the free (zero) positions of `mask`,
// low positions first. Monotone in g.
Word scatter_free(Word g, Word mask, unsigned width) {
  Word out = 0;
  for (unsigned p = 0; p < width; ++p) {
    if ((mask >> p) & 1) continue;
    if (g & 1) out |= Word{1} << p;
    g >>= 1;
  }
  return out;
}

}  // namespace

std::optional<Word> next_matching(Word from, const FixedBits& fb,
                                  unsigned width) {
  const Word wm = mask_of(width);
  const Word mask = fb.mask & wm;
  const Word bits = fb.bits & wm;
  if ((bits & ~mask) != 0) throw Error("fixed bits outside mask");
  if (from > wm) return std::nullopt;

  const unsigned free_count = static_cast<unsigned>(
      __builtin_popcountll(~mask & wm));
  // Candidates are bits | scatter(g); value is monotone in g, so binary
  // search for the smallest candidate >= from.
  const Word g_max = free_count >= 64 ? ~Word{0} : ((Word{1} << free_count) - 1);
  auto value_at = [&](Word g) { return bits | scatter_free(g, mask, width); };
  if (value_at(g_max) < from) return std::nullopt;
  Word lo = 0, hi = g_max;
  while (lo < hi) {
    Word mid = lo + (hi - lo) / 2;
    if (value_at(mid) >= from)
      hi = mid;
    else
      lo = mid + 1;
  }
  return value_at(lo);
}

namespace {

// Number of valid v <= x (inclusive) with v & mask == bits.
BigCount count_upto(Word x, Word mask, Word bits, unsigned width) {
  BigCount total = 0;
  // Free-bit population below each position, for suffix counting.
  // Walk from the top: at each position where we can place a smaller bit
  // than x's, all lower free positions are unconstrained.
  bool tight = true;
  for (int p = static_cast<int>(width) - 1; p >= 0 && tight; --p) {
    const Word bit = Word{1} << p;
    const bool x_bit = (x & bit) != 0;
    const bool fixed = (mask & bit) != 0;
    const Word lower_free_mask = ~mask & (bit - 1) & mask_of(width);
    const unsigned lower_free =
        static_cast<unsigned>(__builtin_popcountll(lower_free_mask));
    if (fixed) {
      const bool b = (bits & bit) != 0;
      if (x_bit && !b) {
        // v's bit is 0 < 1: everything below is free.
        total += BigCount{1} << lower_free;
        tight = false;
      } else if (!x_bit && b) {
        // v's bit would be 1 > 0: no tight continuation.
        tight = false;
        return total;
      }
      // else bits agree; stay tight
    } else {
      if (x_bit) {
        // place 0 here, lower positions free
        total += BigCount{1} << lower_free;
      }
      // stay tight with v's bit = x's bit
    }
  }
  if (tight) total += 1;  // v == x (fixed bits all matched x along the way)
  return total;
}

}  // namespace

BigCount count_matching(Word lo, Word hi, const FixedBits& fb, unsigned width) {
  const Word wm = mask_of(width);
  const Word mask = fb.mask & wm;
  const Word bits = fb.bits & wm;
  if ((fb.bits & ~fb.mask) != 0) throw Error("fixed bits outside mask");
  if (lo > hi) return 0;
  lo &= wm;
  hi &= wm;
  BigCount upto_hi = count_upto(hi, mask, bits, width);
  BigCount below_lo = lo == 0 ? 0 : count_upto(lo - 1, mask, bits, width);
  return upto_hi - below_lo;
}

}  // namespace ctrl
