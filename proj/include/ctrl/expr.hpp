#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ctrl/errors.hpp"

namespace ctrl {

using Word = std::uint64_t;

// Bitvector widths run from 1 to 64; width 0 denotes the boolean sort.
constexpr unsigned kMaxWidth = 64;

inline Word mask_of(unsigned width) {
  return width >= 64 ? ~Word{0} : ((Word{1} << width) - 1);
}

enum class Op {
  Var,
  Const,
  Not,
  Neg,
  Add,
  Sub,
  Mul,
  UDiv,
  URem,
  And,
  Or,
  Xor,
  Shl,
  LShr,
  AShr,
  Eq,
  Ult,
  Ule,
  Slt,
  Sle,
  Implies,
  Ite,
  Extract,
  ZeroExt,
  SignExt,
  Concat,
  Forall,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct BoundVar {
  std::string name;
  unsigned width;
};

struct Expr {
  Op op;
  unsigned width = 0;  // 0 = Bool
  Word value = 0;      // Const
  std::string name;    // Var
  unsigned hi = 0;     // Extract
  unsigned lo = 0;     // Extract
  unsigned ext = 0;    // Zero/SignExt amount
  std::vector<BoundVar> bound;  // Forall
  std::vector<ExprPtr> args;
  std::size_t hash = 0;

  bool is_bool() const { return width == 0; }
  bool is_const(Word v) const { return op == Op::Const && value == v; }
};

// Node constructors. Width rules are enforced here; all downstream code may
// assume well-formed trees.
ExprPtr mk_var(std::string name, unsigned width);
ExprPtr mk_const(Word value, unsigned width);
ExprPtr mk_bool(bool value);
ExprPtr mk_not(ExprPtr a);
ExprPtr mk_neg(ExprPtr a);
ExprPtr mk_bin(Op op, ExprPtr a, ExprPtr b);
ExprPtr mk_ite(ExprPtr cond, ExprPtr then_e, ExprPtr else_e);
ExprPtr mk_extract(ExprPtr a, unsigned hi, unsigned lo);
ExprPtr mk_zext(ExprPtr a, unsigned by);
ExprPtr mk_sext(ExprPtr a, unsigned by);
ExprPtr mk_concat(ExprPtr a, ExprPtr b);
ExprPtr mk_forall(std::vector<BoundVar> bound, ExprPtr body);

inline ExprPtr mk_eq(ExprPtr a, ExprPtr b) { return mk_bin(Op::Eq, a, b); }
inline ExprPtr mk_distinct(ExprPtr a, ExprPtr b) { return mk_not(mk_eq(a, b)); }
inline ExprPtr mk_ule(ExprPtr a, ExprPtr b) { return mk_bin(Op::Ule, a, b); }
inline ExprPtr mk_ult(ExprPtr a, ExprPtr b) { return mk_bin(Op::Ult, a, b); }
inline ExprPtr mk_and(ExprPtr a, ExprPtr b) { return mk_bin(Op::And, a, b); }
inline ExprPtr mk_or(ExprPtr a, ExprPtr b) { return mk_bin(Op::Or, a, b); }

// Assignment of concrete values to variables.
using Model = std::map<std::string, Word>;

// Bottom-up evaluation with standard bitvector semantics: arithmetic is
// modular, udiv by zero yields all-ones, urem by zero yields the dividend,
// shifts of `width` or more bits saturate. Booleans evaluate to 0/1.
// Throws EvalError for unassigned variables and quantified nodes.
Word eval(const ExprPtr& e, const Model& model);

void collect_vars(const ExprPtr& e, std::set<std::string>& out);
std::set<std::string> vars_of(const ExprPtr& e);

// Structural substitution of variables; entries must match variable widths.
ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub);
ExprPtr rename_vars(const ExprPtr& e, const std::map<std::string, std::string>& names);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// SMT-LIB2 term text.
std::string to_smt2(const ExprPtr& e);
std::string const_smt2(Word value, unsigned width);

}  // namespace ctrl
