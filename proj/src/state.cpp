#include "ctrl/state.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

namespace ctrl {

const Input* SymState::find_input(const std::string& name) const {
  for (const auto& in : inputs)
    if (in.name == name) return &in;
  return nullptr;
}

bool SymState::is_array_name(const std::string& name) const {
  for (const auto& [n, sort] : array_decls)
    if (n == name) return true;
  return false;
}

unsigned SymState::total_input_bits() const {
  unsigned total = 0;
  for (const auto& in : inputs) total += in.width;
  return total;
}

SymState conjoin(const SymState& s, const ExprPtr& c) {
  if (!c->is_bool()) throw WidthError("conjoin: constraint must be boolean");
  for (const auto& v : vars_of(c))
    if (!s.find_input(v))
      throw Error("conjoin: undeclared variable " + v);
  SymState out = s;
  out.constraints.push_back(c);
  return out;
}

ValueSet ValueSet::full(unsigned width) {
  ValueSet e;
  e.width = width;
  e.intervals = {{0, mask_of(width)}};
  return e;
}

ValueSet ValueSet::single_interval(unsigned width, Word lo, Word hi) {
  if (lo > hi || hi > mask_of(width))
    throw Error("value set interval out of range");
  ValueSet e;
  e.width = width;
  e.intervals = {{lo, hi}};
  return e;
}

bool ValueSet::contains(Word v) const {
  if (v > mask_of(width)) return false;
  if (fixed && !fixed->matches(v)) return false;
  for (const auto& [lo, hi] : intervals)
    if (v >= lo && v <= hi) return true;
  return false;
}

bool ValueSet::empty_set() const {
  if (intervals.empty()) return true;
  if (!fixed) return false;
  for (const auto& [lo, hi] : intervals) {
    auto nxt = next_matching(lo, *fixed, width);
    if (nxt && *nxt <= hi) return false;
  }
  return true;
}

BigCount ValueSet::count() const {
  BigCount total = 0;
  for (const auto& [lo, hi] : intervals) {
    if (fixed)
      total += count_matching(lo, hi, *fixed, width);
    else
      total += interval_count(lo, hi);
  }
  return total;
}

std::optional<Word> ValueSet::first_at_least(Word from) const {
  for (const auto& [lo, hi] : intervals) {
    Word start = std::max(from, lo);
    if (start > hi) continue;
    if (!fixed) return start;
    auto nxt = next_matching(start, *fixed, width);
    if (nxt && *nxt <= hi) return nxt;
  }
  return std::nullopt;
}

ExprPtr ValueSet::membership(const ExprPtr& v) const {
  if (v->width != width) throw WidthError("membership width mismatch");
  ExprPtr ranges;
  for (const auto& [lo, hi] : intervals) {
    ExprPtr one = mk_and(mk_ule(mk_const(lo, width), v),
                         mk_ule(v, mk_const(hi, width)));
    if (lo == 0 && hi == mask_of(width)) one = mk_bool(true);
    ranges = ranges ? mk_or(ranges, one) : one;
  }
  if (!ranges) ranges = mk_bool(false);
  if (fixed && fixed->mask != 0) {
    ExprPtr pat = mk_eq(mk_bin(Op::And, v, mk_const(fixed->mask, width)),
                        mk_const(fixed->bits, width));
    ranges = mk_and(ranges, pat);
  }
  return ranges;
}

void ValueSet::normalize() {
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<Word, Word>> out;
  for (const auto& iv : intervals) {
    bool joins = false;
    if (!out.empty()) {
      const Word prev_hi = out.back().second;
      joins = iv.first <= prev_hi ||
              (prev_hi != mask_of(width) && iv.first == prev_hi + 1);
    }
    if (joins)
      out.back().second = std::max(out.back().second, iv.second);
    else
      out.push_back(iv);
  }
  intervals = std::move(out);
}

ExprPtr conjunction(const std::vector<ExprPtr>& cs) {
  if (cs.empty()) return mk_bool(true);
  ExprPtr acc = cs[0];
  for (std::size_t i = 1; i < cs.size(); ++i) acc = mk_and(acc, cs[i]);
  return acc;
}

namespace {

// Token-level rename inside passthrough text. Symbols are replaced only when
// they appear as standalone tokens.
std::string rename_raw(const std::string& text,
                       const std::map<std::string, std::string>& names) {
  std::string out;
  std::size_t i = 0;
  auto is_sym = [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
           ch == '.' || ch == '!' || ch == '-' || ch == '?' || ch == '$' ||
           ch == '@';
  };
  while (i < text.size()) {
    if (is_sym(text[i])) {
      std::size_t j = i;
      while (j < text.size() && is_sym(text[j])) ++j;
      std::string tok = text.substr(i, j - i);
      auto it = names.find(tok);
      out += (it == names.end()) ? tok : it->second;
      i = j;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

}  // namespace

std::pair<SymState, TargetSpec> duplicate_avoiding(
    const SymState& s, const TargetSpec& target,
    const std::set<std::string>& avoid) {
  std::set<std::string> taken;
  for (const auto& in : s.inputs) taken.insert(in.name);
  for (const auto& [n, sort] : s.array_decls) taken.insert(n);
  std::set<std::string> reserved = taken;
  reserved.insert(avoid.begin(), avoid.end());

  unsigned counter = 1;
  auto all_fresh = [&](unsigned k) {
    for (const auto& name : taken)
      if (reserved.count(name + "!" + std::to_string(k))) return false;
    return true;
  };
  while (!all_fresh(counter)) ++counter;
  const std::string suffix = "!" + std::to_string(counter);

  std::map<std::string, std::string> names;
  for (const auto& name : taken) names[name] = name + suffix;

  SymState out;
  for (const auto& in : s.inputs)
    out.inputs.push_back({in.name + suffix, in.width});
  for (const auto& c : s.constraints)
    out.constraints.push_back(rename_vars(c, names));
  for (const auto& [n, sort] : s.array_decls)
    out.array_decls.emplace_back(n + suffix, sort);
  for (const auto& a : s.array_asserts)
    out.array_asserts.push_back(rename_raw(a, names));

  TargetSpec t2 = target;
  t2.expr = rename_vars(target.expr, names);
  return {std::move(out), std::move(t2)};
}

std::pair<SymState, TargetSpec> duplicate(const SymState& s,
                                          const TargetSpec& target) {
  return duplicate_avoiding(s, target, {});
}

}  // namespace ctrl
