#include "ctrl/fixtures.hpp"

namespace ctrl::toy {

namespace {

// Scaled message parser with a header/size confusion: an unchecked length
// field underflows (small input_size) or a stack-resident header byte leaks
// into an uninitialized length (large input_size). Header 8 bytes scaled to
// 1, buffer 256 scaled to 16, 64-bit sizes scaled to 8.
const char* kMotexScaled = R"(
# header byte lands on the stack, the length check trusts input_size
input hdr:8
input input_size:8
mem 64

store #x20 hdr
header := load #x20
ok := (bvule header #x29)
if ok {
  size := load #x20
  small := (bvule input_size #x18)
  if small {
    size := (bvsub input_size #x08)
  }
  oob := (bvugt size #x10)
  if oob {
    sink of_wsize size
  }
}
)";

// Full-width variant with the original constants: header 40, buffer 256,
// header field limit 296. Needs an external solver.
const char* kMotexFull = R"(
input hdr:64
input input_size:64
mem 512

store #x020 ((_ extract 7 0) hdr)
store #x021 ((_ extract 15 8) hdr)
store #x022 ((_ extract 23 16) hdr)
store #x023 ((_ extract 31 24) hdr)
store #x024 ((_ extract 39 32) hdr)
store #x025 ((_ extract 47 40) hdr)
store #x026 ((_ extract 55 48) hdr)
store #x027 ((_ extract 63 56) hdr)
b0 := load #x020
b1 := load #x021
b2 := load #x022
b3 := load #x023
b4 := load #x024
b5 := load #x025
b6 := load #x026
b7 := load #x027
header := (concat b7 b6 b5 b4 b3 b2 b1 b0)
ok := (bvule header #x0000000000000128)
if ok {
  size := (concat b7 b6 b5 b4 b3 b2 b1 b0)
  small := (bvule input_size #x0000000000000128)
  if small {
    size := (bvsub input_size #x0000000000000028)
  }
  oob := (bvugt size #x0000000000000100)
  if oob {
    sink of_wsize size
  }
}
)";

// Tag propagation keeps both sinks tainted while the path constraints pin
// one of them to a single value.
const char* kListing3 = R"(
input x:8
input y:8
z := (bvadd x y)
nonneg := (bvsle #x00 x)
if nonneg {
  nonpos := (bvsle x #x00)
  if nonpos {
    sink line6_x x
  }
}
w := (bvsub z x)
sink line8_w w
)";

const char* kSuppress = R"(
input x:8
input y:8
q := (bvsub x x)
r := (bvmul y #x00)
sink q_sink q
sink r_sink r
)";

const char* kCopy = R"(
input x:8
v := x
sink copied v
)";

const char* kMul = R"(
input x:8
v := (bvmul x #x02)
sink doubled v
)";

const char* kDiv = R"(
input x:8
v := (bvudiv x #x02)
sink halved v
)";

const char* kMixdup = R"(
input x:4
v := (concat x x)
sink mixed v
)";

const char* kPopcnt = R"(
input x:8
v := (bvadd ((_ zero_extend 7) ((_ extract 0 0) x)) ((_ zero_extend 7) ((_ extract 1 1) x)) ((_ zero_extend 7) ((_ extract 2 2) x)) ((_ zero_extend 7) ((_ extract 3 3) x)) ((_ zero_extend 7) ((_ extract 4 4) x)) ((_ zero_extend 7) ((_ extract 5 5) x)) ((_ zero_extend 7) ((_ extract 6 6) x)) ((_ zero_extend 7) ((_ extract 7 7) x)))
sink bitcount v
)";

const char* kImpflow = R"(
input x:8
v := #x00
is5 := (= x #x05)
if is5 {
  v := #x01
}
sink flag v
)";

const char* kHoles = R"(
input x:8
n1 := (distinct x #x64)
if n1 {
  n2 := (distinct x #xc8)
  if n2 {
    sink holey x
  }
}
)";

const char* kSum = R"(
input x:8
input y:8
v := (bvadd x y)
sink total v
)";

const char* kMasked = R"(
input x:8
v := (bvor (bvand x #xa5) #x42)
sink masked v
)";

std::vector<Fixture> make_fixtures() {
  std::vector<Fixture> out;
  // Underflow path: input_size below the header size wraps the length.
  out.push_back({"motex1-8bit",
                 "scaled parser, length underflow (wraparound write sizes)",
                 kMotexScaled,
                 {{"hdr", 0}, {"input_size", 7}},
                 -16});
  // Residue path: the length stays uninitialized and aliases the header.
  out.push_back({"motex2-8bit",
                 "scaled parser, uninitialized length aliases the header byte",
                 kMotexScaled,
                 {{"hdr", 17}, {"input_size", 25}},
                 -16});
  out.push_back({"motex1-64bit",
                 "full-width parser, length underflow (external solver)",
                 kMotexFull,
                 {{"hdr", 0}, {"input_size", 39}},
                 -256});
  out.push_back({"motex2-64bit",
                 "full-width parser, uninitialized length (external solver)",
                 kMotexFull,
                 {{"hdr", 257}, {"input_size", 297}},
                 -256});
  out.push_back({"listing3-8bit",
                 "tainted-but-pinned sinks (tag false positives)",
                 kListing3,
                 {{"x", 0}, {"y", 5}},
                 0});
  out.push_back({"suppress-8bit",
                 "self-cancelling assignments for tag suppression",
                 kSuppress,
                 {{"x", 3}, {"y", 9}},
                 0});
  out.push_back({"copy-8bit", "direct copy, full domain", kCopy, {{"x", 1}}, 0});
  out.push_back({"mul-8bit", "doubling, even values only", kMul, {{"x", 1}}, 0});
  out.push_back({"div-8bit", "halving, low half of the domain", kDiv, {{"x", 9}}, 0});
  out.push_back({"mixdup-8bit",
                 "nibble duplication, sparse stride-17 domain",
                 kMixdup,
                 {{"x", 3}},
                 0});
  out.push_back({"popcnt-8bit", "population count, nine values", kPopcnt,
                 {{"x", 0xff}}, 0});
  out.push_back({"impflow-8bit",
                 "implicit flow through a branch, pinned per path",
                 kImpflow,
                 {{"x", 5}},
                 0});
  out.push_back({"holes-8bit", "two excluded values", kHoles, {{"x", 0}}, 0});
  out.push_back({"sum-8bit", "two-input sum, full domain", kSum,
                 {{"x", 1}, {"y", 2}}, 0});
  out.push_back({"masked-8bit",
                 "masked-or pattern with six fixed bits",
                 kMasked,
                 {{"x", 0}},
                 0});
  return out;
}

}  // namespace

const std::vector<Fixture>& builtin_fixtures() {
  static const std::vector<Fixture> all = make_fixtures();
  return all;
}

const Fixture& fixture_by_name(const std::string& name) {
  for (const auto& f : builtin_fixtures())
    if (f.name == name) return f;
  throw Error("unknown fixture: " + name);
}

}  // namespace ctrl::toy
