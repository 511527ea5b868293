#include "ctrl/expr.hpp"

#include <functional>
#include <sstream>
#include <unordered_map>

namespace ctrl {

namespace {

std::size_t hash_mix(std::size_t h, std::size_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::size_t node_hash(const Expr& e) {
  std::size_t h = hash_mix(static_cast<std::size_t>(e.op) * 0x100000001b3ull,
                           e.width);
  h = hash_mix(h, std::hash<Word>{}(e.value));
  if (!e.name.empty()) h = hash_mix(h, std::hash<std::string>{}(e.name));
  h = hash_mix(h, (std::size_t{e.hi} << 16) ^ e.lo ^ (std::size_t{e.ext} << 32));
  for (const auto& bv : e.bound) {
    h = hash_mix(h, std::hash<std::string>{}(bv.name));
    h = hash_mix(h, bv.width);
  }
  for (const auto& a : e.args) h = hash_mix(h, a->hash);
  return h;
}

ExprPtr finish(Expr e) {
  e.hash = node_hash(e);
  return std::make_shared<const Expr>(std::move(e));
}

void require_bv(const ExprPtr& a, const char* what) {
  if (a->is_bool()) throw WidthError(std::string(what) + ": expected bitvector operand");
}

void require_bool(const ExprPtr& a, const char* what) {
  if (!a->is_bool()) throw WidthError(std::string(what) + ": expected boolean operand");
}

Word sext64(Word v, unsigned width) {
  if (width >= 64) return v;
  if (v & (Word{1} << (width - 1))) return v | ~mask_of(width);
  return v;
}

}  // namespace

// Width 0 declares a boolean variable; those appear only transiently (the
// toy pipeline substitutes them away before states are emitted).
ExprPtr mk_var(std::string name, unsigned width) {
  if (width > kMaxWidth)
    throw WidthError("variable width must be at most 64: " + name);
  Expr e;
  e.op = Op::Var;
  e.width = width;
  e.name = std::move(name);
  return finish(std::move(e));
}

ExprPtr mk_const(Word value, unsigned width) {
  if (width == 0 || width > kMaxWidth)
    throw WidthError("constant width must be in [1,64]");
  Expr e;
  e.op = Op::Const;
  e.width = width;
  e.value = value & mask_of(width);
  return finish(std::move(e));
}

ExprPtr mk_bool(bool value) {
  Expr e;
  e.op = Op::Const;
  e.width = 0;
  e.value = value ? 1 : 0;
  return finish(std::move(e));
}

ExprPtr mk_not(ExprPtr a) {
  Expr e;
  e.op = Op::Not;
  e.width = a->width;
  e.args = {std::move(a)};
  return finish(std::move(e));
}

ExprPtr mk_neg(ExprPtr a) {
  require_bv(a, "bvneg");
  Expr e;
  e.op = Op::Neg;
  e.width = a->width;
  e.args = {std::move(a)};
  return finish(std::move(e));
}

ExprPtr mk_bin(Op op, ExprPtr a, ExprPtr b) {
  if (a->width != b->width)
    throw WidthError("operand width mismatch: " + std::to_string(a->width) +
                     " vs " + std::to_string(b->width));
  Expr e;
  e.op = op;
  switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::UDiv:
    case Op::URem:
    case Op::Shl:
    case Op::LShr:
    case Op::AShr:
      require_bv(a, "bitvector op");
      e.width = a->width;
      break;
    case Op::And:
    case Op::Or:
    case Op::Xor:
      e.width = a->width;  // bool or bv, same width either way
      break;
    case Op::Eq:
      e.width = 0;
      break;
    case Op::Ult:
    case Op::Ule:
    case Op::Slt:
    case Op::Sle:
      require_bv(a, "comparison");
      e.width = 0;
      break;
    case Op::Implies:
      require_bool(a, "=>");
      e.width = 0;
      break;
    default:
      throw Error("mk_bin: not a binary op");
  }
  e.args = {std::move(a), std::move(b)};
  return finish(std::move(e));
}

ExprPtr mk_ite(ExprPtr cond, ExprPtr then_e, ExprPtr else_e) {
  require_bool(cond, "ite");
  if (then_e->width != else_e->width)
    throw WidthError("ite branch width mismatch");
  Expr e;
  e.op = Op::Ite;
  e.width = then_e->width;
  e.args = {std::move(cond), std::move(then_e), std::move(else_e)};
  return finish(std::move(e));
}

ExprPtr mk_extract(ExprPtr a, unsigned hi, unsigned lo) {
  require_bv(a, "extract");
  if (hi < lo || hi >= a->width)
    throw WidthError("extract bounds out of range");
  Expr e;
  e.op = Op::Extract;
  e.width = hi - lo + 1;
  e.hi = hi;
  e.lo = lo;
  e.args = {std::move(a)};
  return finish(std::move(e));
}

ExprPtr mk_zext(ExprPtr a, unsigned by) {
  require_bv(a, "zero_extend");
  if (a->width + by > kMaxWidth) throw WidthError("zero_extend beyond 64 bits");
  Expr e;
  e.op = Op::ZeroExt;
  e.width = a->width + by;
  e.ext = by;
  e.args = {std::move(a)};
  return finish(std::move(e));
}

ExprPtr mk_sext(ExprPtr a, unsigned by) {
  require_bv(a, "sign_extend");
  if (a->width + by > kMaxWidth) throw WidthError("sign_extend beyond 64 bits");
  Expr e;
  e.op = Op::SignExt;
  e.width = a->width + by;
  e.ext = by;
  e.args = {std::move(a)};
  return finish(std::move(e));
}

ExprPtr mk_concat(ExprPtr a, ExprPtr b) {
  require_bv(a, "concat");
  require_bv(b, "concat");
  if (a->width + b->width > kMaxWidth) throw WidthError("concat beyond 64 bits");
  Expr e;
  e.op = Op::Concat;
  e.width = a->width + b->width;
  e.args = {std::move(a), std::move(b)};
  return finish(std::move(e));
}

ExprPtr mk_forall(std::vector<BoundVar> bound, ExprPtr body) {
  require_bool(body, "forall");
  if (bound.empty()) throw Error("forall with no bound variables");
  Expr e;
  e.op = Op::Forall;
  e.width = 0;
  e.bound = std::move(bound);
  e.args = {std::move(body)};
  return finish(std::move(e));
}

Word eval(const ExprPtr& e, const Model& model) {
  const unsigned w = e->width;
  const Word m = w == 0 ? 1 : mask_of(w);
  switch (e->op) {
    case Op::Var: {
      auto it = model.find(e->name);
      if (it == model.end()) throw EvalError("unassigned variable: " + e->name);
      return it->second & m;
    }
    case Op::Const:
      return e->value;
    case Op::Not:
      return (~eval(e->args[0], model)) & m;
    case Op::Neg:
      return (-eval(e->args[0], model)) & m;
    case Op::Ite:
      return eval(e->args[0], model) ? eval(e->args[1], model)
                                     : eval(e->args[2], model);
    case Op::Extract:
      return (eval(e->args[0], model) >> e->lo) & m;
    case Op::ZeroExt:
      return eval(e->args[0], model);
    case Op::SignExt:
      return sext64(eval(e->args[0], model), e->args[0]->width) & m;
    case Op::Concat:
      return ((eval(e->args[0], model) << e->args[1]->width) |
              eval(e->args[1], model)) & m;
    case Op::Forall:
      throw EvalError("cannot evaluate quantified term against a model");
    default:
      break;
  }
  const Word a = eval(e->args[0], model);
  const Word b = eval(e->args[1], model);
  const unsigned aw = e->args[0]->width;
  switch (e->op) {
    case Op::Add: return (a + b) & m;
    case Op::Sub: return (a - b) & m;
    case Op::Mul: return (a * b) & m;
    case Op::UDiv: return b == 0 ? m : (a / b) & m;
    case Op::URem: return b == 0 ? a : (a % b) & m;
    case Op::And: return a & b;
    case Op::Or: return a | b;
    case Op::Xor: return (a ^ b) & m;
    case Op::Shl: return b >= aw ? 0 : (a << b) & m;
    case Op::LShr: return b >= aw ? 0 : a >> b;
    case Op::AShr: {
      const Word sign = a & (Word{1} << (aw - 1));
      if (b >= aw) return sign ? m : 0;
      return (static_cast<Word>(static_cast<std::int64_t>(sext64(a, aw)) >>
                                b)) & m;
    }
    case Op::Eq: return a == b ? 1 : 0;
    case Op::Ult: return a < b ? 1 : 0;
    case Op::Ule: return a <= b ? 1 : 0;
    case Op::Slt:
      return static_cast<std::int64_t>(sext64(a, aw)) <
                     static_cast<std::int64_t>(sext64(b, aw))
                 ? 1 : 0;
    case Op::Sle:
      return static_cast<std::int64_t>(sext64(a, aw)) <=
                     static_cast<std::int64_t>(sext64(b, aw))
                 ? 1 : 0;
    case Op::Implies: return (!a || b) ? 1 : 0;
    default:
      throw EvalError("eval: unhandled op");
  }
}

void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
  if (e->op == Op::Var) {
    out.insert(e->name);
    return;
  }
  for (const auto& a : e->args) collect_vars(a, out);
}

std::set<std::string> vars_of(const ExprPtr& e) {
  std::set<std::string> s;
  collect_vars(e, s);
  return s;
}

namespace {

ExprPtr substitute_memo(const ExprPtr& e,
                        const std::map<std::string, ExprPtr>& sub,
                        std::unordered_map<const Expr*, ExprPtr>& memo) {
  if (e->op == Op::Var) {
    auto it = sub.find(e->name);
    if (it == sub.end()) return e;
    if (it->second->width != e->width)
      throw WidthError("substitution width mismatch for " + e->name);
    return it->second;
  }
  if (e->args.empty()) return e;
  auto found = memo.find(e.get());
  if (found != memo.end()) return found->second;

  std::vector<ExprPtr> args;
  args.reserve(e->args.size());
  bool changed = false;
  for (const auto& a : e->args) {
    auto na = substitute_memo(a, sub, memo);
    changed |= na.get() != a.get();
    args.push_back(std::move(na));
  }
  ExprPtr result;
  if (!changed) {
    result = e;
  } else {
    switch (e->op) {
      case Op::Not: result = mk_not(args[0]); break;
      case Op::Neg: result = mk_neg(args[0]); break;
      case Op::Ite: result = mk_ite(args[0], args[1], args[2]); break;
      case Op::Extract: result = mk_extract(args[0], e->hi, e->lo); break;
      case Op::ZeroExt: result = mk_zext(args[0], e->ext); break;
      case Op::SignExt: result = mk_sext(args[0], e->ext); break;
      case Op::Concat: result = mk_concat(args[0], args[1]); break;
      case Op::Forall: result = mk_forall(e->bound, args[0]); break;
      default: result = mk_bin(e->op, args[0], args[1]); break;
    }
  }
  memo.emplace(e.get(), result);
  return result;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& sub) {
  std::unordered_map<const Expr*, ExprPtr> memo;
  return substitute_memo(e, sub, memo);
}

ExprPtr rename_vars(const ExprPtr& e,
                    const std::map<std::string, std::string>& names) {
  std::map<std::string, ExprPtr> sub;
  std::set<std::string> used = vars_of(e);
  for (const auto& [from, to] : names) {
    if (!used.count(from)) continue;
    // Width is recovered lazily below; renaming must preserve it.
    sub[from] = nullptr;
  }
  if (sub.empty()) return e;
  // Resolve widths by walking the tree once.
  std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& n) {
    if (n->op == Op::Var) {
      auto it = sub.find(n->name);
      if (it != sub.end() && !it->second)
        it->second = mk_var(names.at(n->name), n->width);
      return;
    }
    for (const auto& a : n->args) walk(a);
  };
  walk(e);
  return substitute(e, sub);
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash) return false;
  if (a->op != b->op || a->width != b->width || a->value != b->value ||
      a->name != b->name || a->hi != b->hi || a->lo != b->lo ||
      a->ext != b->ext || a->args.size() != b->args.size() ||
      a->bound.size() != b->bound.size())
    return false;
  for (std::size_t i = 0; i < a->bound.size(); ++i)
    if (a->bound[i].name != b->bound[i].name ||
        a->bound[i].width != b->bound[i].width)
      return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  return true;
}

std::string const_smt2(Word value, unsigned width) {
  std::ostringstream os;
  if (width % 4 == 0) {
    os << "#x";
    for (int nib = static_cast<int>(width) / 4 - 1; nib >= 0; --nib)
      os << "0123456789abcdef"[(value >> (nib * 4)) & 0xf];
  } else {
    os << "#b";
    for (int bit = static_cast<int>(width) - 1; bit >= 0; --bit)
      os << (((value >> bit) & 1) ? '1' : '0');
  }
  return os.str();
}

namespace {

const char* op_name(Op op, bool bool_args) {
  switch (op) {
    case Op::Add: return "bvadd";
    case Op::Sub: return "bvsub";
    case Op::Mul: return "bvmul";
    case Op::UDiv: return "bvudiv";
    case Op::URem: return "bvurem";
    case Op::And: return bool_args ? "and" : "bvand";
    case Op::Or: return bool_args ? "or" : "bvor";
    case Op::Xor: return bool_args ? "xor" : "bvxor";
    case Op::Shl: return "bvshl";
    case Op::LShr: return "bvlshr";
    case Op::AShr: return "bvashr";
    case Op::Eq: return "=";
    case Op::Ult: return "bvult";
    case Op::Ule: return "bvule";
    case Op::Slt: return "bvslt";
    case Op::Sle: return "bvsle";
    case Op::Implies: return "=>";
    default: return nullptr;
  }
}

void emit(const ExprPtr& e, std::ostream& os) {
  switch (e->op) {
    case Op::Var:
      os << e->name;
      return;
    case Op::Const:
      if (e->is_bool())
        os << (e->value ? "true" : "false");
      else
        os << const_smt2(e->value, e->width);
      return;
    case Op::Not:
      os << (e->args[0]->is_bool() ? "(not " : "(bvnot ");
      emit(e->args[0], os);
      os << ")";
      return;
    case Op::Neg:
      os << "(bvneg ";
      emit(e->args[0], os);
      os << ")";
      return;
    case Op::Ite:
      os << "(ite ";
      emit(e->args[0], os);
      os << " ";
      emit(e->args[1], os);
      os << " ";
      emit(e->args[2], os);
      os << ")";
      return;
    case Op::Extract:
      os << "((_ extract " << e->hi << " " << e->lo << ") ";
      emit(e->args[0], os);
      os << ")";
      return;
    case Op::ZeroExt:
      os << "((_ zero_extend " << e->ext << ") ";
      emit(e->args[0], os);
      os << ")";
      return;
    case Op::SignExt:
      os << "((_ sign_extend " << e->ext << ") ";
      emit(e->args[0], os);
      os << ")";
      return;
    case Op::Concat:
      os << "(concat ";
      emit(e->args[0], os);
      os << " ";
      emit(e->args[1], os);
      os << ")";
      return;
    case Op::Forall: {
      os << "(forall (";
      bool first = true;
      for (const auto& bv : e->bound) {
        if (!first) os << " ";
        first = false;
        os << "(" << bv.name << " (_ BitVec " << bv.width << "))";
      }
      os << ") ";
      emit(e->args[0], os);
      os << ")";
      return;
    }
    default: {
      const char* name = op_name(e->op, e->args[0]->is_bool());
      os << "(" << name << " ";
      emit(e->args[0], os);
      os << " ";
      emit(e->args[1], os);
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_smt2(const ExprPtr& e) {
  std::ostringstream os;
  emit(e, os);
  return os.str();
}

}  // namespace ctrl
