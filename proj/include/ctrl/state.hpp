#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctrl/bits.hpp"
#include "ctrl/expr.hpp"

namespace ctrl {

struct Input {
  std::string name;
  unsigned width;
};

// A conjunction of boolean bitvector constraints over declared inputs.
// Array-sorted declarations and asserts from input files are carried as raw
// passthrough text: they are forwarded verbatim to external solvers and never
// interpreted internally.
struct SymState {
  std::vector<Input> inputs;
  std::vector<ExprPtr> constraints;
  std::vector<std::pair<std::string, std::string>> array_decls;  // name, sort text
  std::vector<std::string> array_asserts;  // raw assert terms

  bool has_arrays() const {
    return !array_decls.empty() || !array_asserts.empty();
  }
  const Input* find_input(const std::string& name) const;
  bool is_array_name(const std::string& name) const;
  unsigned total_input_bits() const;
};

// Appends a boolean constraint; all its variables must be declared.
SymState conjoin(const SymState& s, const ExprPtr& c);

// A concrete subset of [0, 2^width - 1]: a union of sorted disjoint
// intervals, optionally intersected with a fixed-bits pattern.
struct ValueSet {
  unsigned width = 0;
  std::vector<std::pair<Word, Word>> intervals;
  std::optional<FixedBits> fixed;

  static ValueSet full(unsigned width);
  static ValueSet single_interval(unsigned width, Word lo, Word hi);

  bool contains(Word v) const;
  bool empty_set() const;
  BigCount count() const;
  // Smallest member >= from, or nullopt.
  std::optional<Word> first_at_least(Word from) const;
  // Membership predicate over an expression of matching width.
  ExprPtr membership(const ExprPtr& v) const;
  void normalize();  // sort + coalesce intervals
};

struct TargetSpec {
  ExprPtr expr;
  unsigned width = 0;
  std::optional<ValueSet> assumption;
  // Affine rendering transform applied before scoring: value -> value + offset
  // (mod 2^width). Scale is fixed at 1.
  std::int64_t offset = 0;
};

// Fresh copy of the state with renamed variables plus the target rewritten
// over them. The suffix counter is chosen deterministically and
// collision-checked against both states.
std::pair<SymState, TargetSpec> duplicate(const SymState& s,
                                          const TargetSpec& target);

// As duplicate, additionally avoiding the given names (for queries stacking
// several copies).
std::pair<SymState, TargetSpec> duplicate_avoiding(
    const SymState& s, const TargetSpec& target,
    const std::set<std::string>& avoid);

ExprPtr conjunction(const std::vector<ExprPtr>& cs);  // true for empty list

}  // namespace ctrl
