#include <doctest.h>

#include "ctrl/bits.hpp"
#include "helpers.hpp"

using namespace ctrl;
using testutil::TestRng;

TEST_SUITE("bits") {

TEST_CASE("next_matching against brute force") {
  TestRng rng(42);
  for (int round = 0; round < 200; ++round) {
    const unsigned width = 1 + rng.below(10);
    const Word wm = mask_of(width);
    const Word mask = rng.next() & wm;
    const Word bits = rng.next() & mask;
    const Word from = rng.next() & wm;
    const FixedBits fb{mask, bits};

    std::optional<Word> expected;
    for (Word v = from; v <= wm; ++v) {
      if ((v & mask) == bits) {
        expected = v;
        break;
      }
      if (v == wm) break;
    }
    auto got = next_matching(from, fb, width);
    CHECK(got == expected);
  }
}

TEST_CASE("next_matching at full width") {
  const FixedBits fb{0x8000000000000000ull, 0x8000000000000000ull};
  auto got = next_matching(0, fb, 64);
  REQUIRE(got.has_value());
  CHECK(*got == 0x8000000000000000ull);
  CHECK(next_matching(0x8000000000000001ull, FixedBits{1, 0}, 64).value() ==
        0x8000000000000002ull);
}

TEST_CASE("count_matching examples") {
  CHECK(count_matching(0, 255, FixedBits{1, 0}, 8) == 128);
  CHECK(count_matching(0, 255, FixedBits{0, 0}, 8) == 256);
  CHECK(count_matching(3, 9, FixedBits{1, 0}, 8) == 3);  // 4, 6, 8
  CHECK(count_matching(0, ~Word{0}, FixedBits{0, 0}, 64) ==
        (BigCount{1} << 64));
}

TEST_CASE("count_matching against brute force") {
  TestRng rng(7);
  for (int round = 0; round < 300; ++round) {
    const unsigned width = 1 + rng.below(10);
    const Word wm = mask_of(width);
    const Word mask = rng.next() & wm;
    const Word bits = rng.next() & mask;
    Word a = rng.next() & wm;
    Word b = rng.next() & wm;
    if (a > b) std::swap(a, b);

    BigCount expected = 0;
    for (Word v = a;; ++v) {
      if ((v & mask) == bits) ++expected;
      if (v == b) break;
    }
    CHECK(count_matching(a, b, FixedBits{mask, bits}, width) == expected);
  }
}

TEST_CASE("value set operations") {
  ValueSet full = ValueSet::full(8);
  CHECK(full.count() == 256);
  CHECK(full.contains(0));
  CHECK(full.contains(255));
  CHECK(!full.empty_set());

  ValueSet evens = ValueSet::full(8);
  evens.fixed = FixedBits{1, 0};
  CHECK(evens.count() == 128);
  CHECK(evens.contains(4));
  CHECK(!evens.contains(5));
  CHECK(evens.first_at_least(3).value() == 4);

  ValueSet gap = ValueSet::single_interval(8, 10, 20);
  gap.intervals.push_back({30, 40});
  CHECK(gap.count() == 22);
  CHECK(!gap.contains(25));
  CHECK(gap.first_at_least(21).value() == 30);

  ValueSet none = ValueSet::single_interval(8, 3, 3);
  none.fixed = FixedBits{1, 0};  // 3 is odd
  CHECK(none.empty_set());
}

TEST_CASE("value set membership expression") {
  ValueSet set = ValueSet::single_interval(8, 10, 20);
  set.fixed = FixedBits{1, 0};
  ExprPtr v = mk_var("v", 8);
  ExprPtr member = set.membership(v);
  for (Word x = 0; x < 256; ++x) {
    CHECK(eval(member, {{"v", x}}) == (set.contains(x) ? 1u : 0u));
  }
}

TEST_CASE("big count printing") {
  CHECK(big_to_string(0) == "0");
  CHECK(big_to_string(BigCount{1} << 64) == "18446744073709551616");
}

}  // TEST_SUITE
