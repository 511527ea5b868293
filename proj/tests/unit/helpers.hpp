#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "ctrl/solver.hpp"
#include "ctrl/state.hpp"

namespace testutil {

using namespace ctrl;

// Independent ground truth used throughout the tests: straight enumeration
// of input assignments through the tree-walking evaluator. It deliberately
// avoids the solver's compiled path and caches.
inline std::vector<Word> brute_enum(const SymState& state,
                                    const ExprPtr& target) {
  std::vector<Word> out;
  unsigned total_bits = 0;
  for (const auto& in : state.inputs) total_bits += in.width;
  if (total_bits > 24) throw std::runtime_error("brute_enum: too many bits");
  const std::uint64_t count = 1ull << total_bits;
  for (std::uint64_t assignment = 0; assignment < count; ++assignment) {
    Model m;
    std::uint64_t rest = assignment;
    for (const auto& in : state.inputs) {
      m[in.name] = rest & mask_of(in.width);
      rest >>= in.width;
    }
    bool ok = true;
    for (const auto& c : state.constraints)
      if (!eval(c, m)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(eval(target, m));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline SymState one_var_state(const std::string& name, unsigned width) {
  SymState s;
  s.inputs.push_back({name, width});
  return s;
}

inline TargetSpec var_target(const SymState& s, const std::string& name) {
  const Input* in = s.find_input(name);
  TargetSpec t;
  t.expr = mk_var(name, in->width);
  t.width = in->width;
  return t;
}

// Deterministic generator state for the randomized suites.
struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed ^ 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }
  std::uint64_t below(std::uint64_t n) { return next() % n; }
};

// Random constraint systems over 1-2 small inputs with structured targets;
// produces the corpus for the oracle-equivalence properties.
struct RandomSystem {
  SymState state;
  TargetSpec target;
};

inline RandomSystem random_system(TestRng& rng) {
  RandomSystem sys;
  const unsigned n_inputs = 1 + rng.below(2);
  unsigned total = 0;
  for (unsigned i = 0; i < n_inputs; ++i) {
    const unsigned width = 4 + rng.below(5);  // 4..8
    sys.state.inputs.push_back({"v" + std::to_string(i), width});
    total += width;
  }
  auto var = [&](unsigned i) {
    return mk_var(sys.state.inputs[i].name, sys.state.inputs[i].width);
  };
  auto rand_var = [&]() { return var(rng.below(n_inputs)); };
  auto rand_const = [&](unsigned width) {
    return mk_const(rng.next(), width);
  };

  // target: a small expression over one input (width 4..8 after ops)
  ExprPtr t = rand_var();
  switch (rng.below(6)) {
    case 0: t = mk_bin(Op::Add, t, rand_const(t->width)); break;
    case 1: t = mk_bin(Op::Mul, t, mk_const(1 + rng.below(7), t->width)); break;
    case 2: t = mk_bin(Op::And, t, rand_const(t->width)); break;
    case 3: t = mk_bin(Op::Or, t, rand_const(t->width)); break;
    case 4: t = mk_bin(Op::LShr, t, mk_const(rng.below(3), t->width)); break;
    default: break;
  }
  sys.target.expr = t;
  sys.target.width = t->width;

  const unsigned n_constraints = rng.below(4);
  for (unsigned i = 0; i < n_constraints; ++i) {
    ExprPtr lhs = rand_var();
    switch (rng.below(3)) {
      case 0: lhs = mk_bin(Op::Add, lhs, rand_const(lhs->width)); break;
      case 1: lhs = mk_bin(Op::And, lhs, rand_const(lhs->width)); break;
      default: break;
    }
    ExprPtr rhs = rand_const(lhs->width);
    ExprPtr c;
    switch (rng.below(4)) {
      case 0: c = mk_ule(lhs, rhs); break;
      case 1: c = mk_ule(rhs, lhs); break;
      case 2: c = mk_eq(mk_bin(Op::And, lhs, rand_const(lhs->width)),
                        mk_bin(Op::And, rhs, rand_const(lhs->width))); break;
      default: c = mk_not(mk_eq(lhs, rhs)); break;
    }
    sys.state.constraints.push_back(c);
  }
  return sys;
}

}  // namespace testutil
