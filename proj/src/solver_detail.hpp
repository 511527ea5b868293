#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "ctrl/solver.hpp"

namespace ctrl::detail {

// Flattened postorder program with structural subexpression sharing; the
// enumeration hot loop evaluates it without pointer chasing.
struct Prog {
  struct Node {
    Op op;
    unsigned width;
    Word value = 0;
    int a = -1, b = -1, c = -1;
    unsigned hi = 0, lo = 0, ext = 0;
    int var_slot = -1;
  };
  std::vector<Node> nodes;
  std::vector<int> constraint_roots;
  int target_root = -1;
};

struct ExprKey {
  ExprPtr e;
  bool operator==(const ExprKey& o) const { return expr_equal(e, o.e); }
};
struct ExprKeyHash {
  std::size_t operator()(const ExprKey& k) const { return k.e->hash; }
};

class ProgBuilder {
 public:
  explicit ProgBuilder(const std::vector<Input>& inputs);
  int add(const ExprPtr& e);
  void add_constraint(const ExprPtr& e) { prog_.constraint_roots.push_back(add(e)); }
  void set_target(const ExprPtr& e) { prog_.target_root = add(e); }
  Prog take() { return std::move(prog_); }

 private:
  Prog prog_;
  std::unordered_map<ExprKey, int, ExprKeyHash> memo_;
  std::unordered_map<std::string, int> slots_;
};

// Enumerated feasible values of one target under a residual constraint set,
// with one witness input assignment per value.
struct EnumEntry {
  std::vector<Input> inputs;
  std::vector<ExprPtr> residual;
  ExprPtr target;

  std::vector<Word> values;          // sorted
  std::vector<Word> witness_words;   // values.size() * inputs.size()

  Model witness_for(std::size_t idx) const;
};

// Range/equality restriction on the target value recognized from state
// constraints, so derived states share one enumeration.
struct TargetRestriction {
  Word lo = 0;
  Word hi = ~Word{0};
  bool contradiction = false;

  void add_lo(Word v) { if (v > lo) lo = v; }
  void add_hi(Word v) { if (v < hi) hi = v; }
  void add_eq(Word v) { add_lo(v); add_hi(v); }
};

// A filtered view over a cached enumeration.
struct ValueView {
  std::shared_ptr<const EnumEntry> entry;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool empty() const { return begin >= end; }
  std::size_t size() const { return end - begin; }
  Word value_at(std::size_t i) const { return entry->values[begin + i]; }
  Word min() const { return entry->values[begin]; }
  Word max() const { return entry->values[end - 1]; }
  bool contains(Word v) const;
  std::vector<Word> materialize() const;
};

}  // namespace ctrl::detail
