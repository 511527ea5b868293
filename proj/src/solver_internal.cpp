#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "ctrl/solver.hpp"
#include "solver_detail.hpp"

namespace ctrl {

namespace detail {

ProgBuilder::ProgBuilder(const std::vector<Input>& inputs) {
  for (std::size_t i = 0; i < inputs.size(); ++i)
    slots_[inputs[i].name] = static_cast<int>(i);
}

int ProgBuilder::add(const ExprPtr& e) {
  auto found = memo_.find(ExprKey{e});
  if (found != memo_.end()) return found->second;

  Prog::Node n;
  n.op = e->op;
  n.width = e->width;
  switch (e->op) {
    case Op::Var: {
      auto it = slots_.find(e->name);
      if (it == slots_.end()) throw EvalError("unassigned variable: " + e->name);
      n.var_slot = it->second;
      break;
    }
    case Op::Const:
      n.value = e->value;
      break;
    case Op::Forall:
      throw UnsupportedError("quantified constraint in the internal backend");
    default:
      n.a = add(e->args[0]);
      if (e->args.size() > 1) n.b = add(e->args[1]);
      if (e->args.size() > 2) n.c = add(e->args[2]);
      n.hi = e->hi;
      n.lo = e->lo;
      n.ext = e->ext;
      break;
  }
  prog_.nodes.push_back(n);
  int id = static_cast<int>(prog_.nodes.size()) - 1;
  memo_.emplace(ExprKey{e}, id);
  return id;
}

Model EnumEntry::witness_for(std::size_t idx) const {
  Model m;
  const std::size_t stride = inputs.size();
  for (std::size_t i = 0; i < stride; ++i)
    m[inputs[i].name] = witness_words[idx * stride + i];
  return m;
}

bool ValueView::contains(Word v) const {
  auto first = entry->values.begin() + static_cast<std::ptrdiff_t>(begin);
  auto last = entry->values.begin() + static_cast<std::ptrdiff_t>(end);
  return std::binary_search(first, last, v);
}

std::vector<Word> ValueView::materialize() const {
  return {entry->values.begin() + static_cast<std::ptrdiff_t>(begin),
          entry->values.begin() + static_cast<std::ptrdiff_t>(end)};
}

Word sext64(Word v, unsigned width) {
  if (width >= 64) return v;
  if (v & (Word{1} << (width - 1))) return v | ~mask_of(width);
  return v;
}

void run_prog(const Prog& prog, const std::vector<Word>& slots,
              std::vector<Word>& out) {
  out.resize(prog.nodes.size());
  for (std::size_t i = 0; i < prog.nodes.size(); ++i) {
    const auto& n = prog.nodes[i];
    const Word m = n.width == 0 ? 1 : mask_of(n.width);
    switch (n.op) {
      case Op::Var: out[i] = slots[static_cast<std::size_t>(n.var_slot)]; break;
      case Op::Const: out[i] = n.value; break;
      case Op::Not: out[i] = (~out[n.a]) & m; break;
      case Op::Neg: out[i] = (-out[n.a]) & m; break;
      case Op::Add: out[i] = (out[n.a] + out[n.b]) & m; break;
      case Op::Sub: out[i] = (out[n.a] - out[n.b]) & m; break;
      case Op::Mul: out[i] = (out[n.a] * out[n.b]) & m; break;
      case Op::UDiv: out[i] = out[n.b] == 0 ? m : (out[n.a] / out[n.b]) & m; break;
      case Op::URem: out[i] = out[n.b] == 0 ? out[n.a] : (out[n.a] % out[n.b]) & m; break;
      case Op::And: out[i] = out[n.a] & out[n.b]; break;
      case Op::Or: out[i] = out[n.a] | out[n.b]; break;
      case Op::Xor: out[i] = (out[n.a] ^ out[n.b]) & m; break;
      case Op::Shl: {
        const unsigned aw = n.width;
        out[i] = out[n.b] >= aw ? 0 : (out[n.a] << out[n.b]) & m;
        break;
      }
      case Op::LShr: {
        const unsigned aw = n.width;
        out[i] = out[n.b] >= aw ? 0 : out[n.a] >> out[n.b];
        break;
      }
      case Op::AShr: {
        const unsigned aw = n.width;
        const Word sign = out[n.a] & (Word{1} << (aw - 1));
        out[i] = out[n.b] >= aw
                     ? (sign ? m : 0)
                     : (static_cast<Word>(
                            static_cast<std::int64_t>(sext64(out[n.a], aw)) >>
                            out[n.b])) & m;
        break;
      }
      case Op::Eq: out[i] = out[n.a] == out[n.b]; break;
      case Op::Ult: out[i] = out[n.a] < out[n.b]; break;
      case Op::Ule: out[i] = out[n.a] <= out[n.b]; break;
      case Op::Slt: {
        const unsigned aw = prog.nodes[static_cast<std::size_t>(n.a)].width;
        out[i] = static_cast<std::int64_t>(sext64(out[n.a], aw)) <
                 static_cast<std::int64_t>(sext64(out[n.b], aw));
        break;
      }
      case Op::Sle: {
        const unsigned aw = prog.nodes[static_cast<std::size_t>(n.a)].width;
        out[i] = static_cast<std::int64_t>(sext64(out[n.a], aw)) <=
                 static_cast<std::int64_t>(sext64(out[n.b], aw));
        break;
      }
      case Op::Implies: out[i] = !out[n.a] || out[n.b]; break;
      case Op::Ite: out[i] = out[n.a] ? out[n.b] : out[n.c]; break;
      case Op::Extract: out[i] = (out[n.a] >> n.lo) & m; break;
      case Op::ZeroExt: out[i] = out[n.a]; break;
      case Op::SignExt: {
        const unsigned aw = n.width - n.ext;
        out[i] = sext64(out[n.a], aw) & m;
        break;
      }
      case Op::Concat: {
        const unsigned bw = prog.nodes[static_cast<std::size_t>(n.b)].width;
        out[i] = ((out[n.a] << bw) | out[n.b]) & m;
        break;
      }
      case Op::Forall:
        throw UnsupportedError("quantified constraint in the internal backend");
    }
  }
}

// Recognizes constraints whose truth depends only on the target's value.
bool match_restriction(const ExprPtr& c, const ExprPtr& target,
                       TargetRestriction& r) {
  const Word wmask = mask_of(target->width);
  auto cval = [](const ExprPtr& e) -> std::optional<Word> {
    if (e->op == Op::Const) return e->value;
    return std::nullopt;
  };
  if (c->op == Op::Ule || c->op == Op::Ult) {
    const bool strict = c->op == Op::Ult;
    if (auto v = cval(c->args[0]); v && expr_equal(c->args[1], target)) {
      Word lo = *v;
      if (strict) {
        if (lo == wmask) { r.contradiction = true; return true; }
        lo += 1;
      }
      r.add_lo(lo);
      return true;
    }
    if (auto v = cval(c->args[1]); v && expr_equal(c->args[0], target)) {
      Word hi = *v;
      if (strict) {
        if (hi == 0) { r.contradiction = true; return true; }
        hi -= 1;
      }
      r.add_hi(hi);
      return true;
    }
    return false;
  }
  if (c->op == Op::Eq && !c->args[0]->is_bool()) {
    if (auto v = cval(c->args[0]); v && expr_equal(c->args[1], target)) {
      r.add_eq(*v);
      return true;
    }
    if (auto v = cval(c->args[1]); v && expr_equal(c->args[0], target)) {
      r.add_eq(*v);
      return true;
    }
  }
  return false;
}

struct Component {
  std::vector<Input> inputs;
  std::vector<ExprPtr> constraints;
  unsigned bits() const {
    unsigned total = 0;
    for (const auto& in : inputs) total += in.width;
    return total;
  }
};

}  // namespace detail

namespace {

using detail::EnumEntry;
using detail::Prog;
using detail::ProgBuilder;
using detail::TargetRestriction;
using detail::ValueView;

class InternalSolver final : public Solver {
 public:
  explicit InternalSolver(SolverConfig config) : Solver(std::move(config)) {}

  Verdict check_sat(const SymState& state) override {
    ++stats_.sat_queries;
    if (state.has_arrays()) return fail("arrays unsupported by internal backend");

    // Variable-free constraints decide immediately.
    SymState pruned;
    pruned.inputs = state.inputs;
    for (const auto& c : state.constraints) {
      if (vars_of(c).empty()) {
        try {
          if (!eval(c, {})) return Verdict::unsat();
        } catch (const EvalError&) {
          return fail("unevaluable closed constraint");
        }
        continue;
      }
      pruned.constraints.push_back(c);
    }

    // Fast path: restrictions against a pinned expression share the base
    // enumeration (newsome value probes, binary-search range conjuncts).
    if (auto pinned = find_pinned_target(pruned)) {
      try {
        ValueView view = values_for(pruned, *pinned);
        if (view.empty()) return Verdict::unsat();
        auto idx = view.begin;
        return Verdict::sat(view.entry->witness_for(idx));
      } catch (const BudgetError&) {
        // fall through to decomposition
      } catch (const UnsupportedError& e) {
        return fail(e.what());
      }
    }
    return check_sat_decomposed(pruned);
  }

  OptResult minimize(const SymState& state, const ExprPtr& target) override {
    return optimize(state, target, false);
  }

  OptResult maximize(const SymState& state, const ExprPtr& target) override {
    return optimize(state, target, true);
  }

  ScResult sc_counterexample(const SymState& state, const ExprPtr& target,
                             const ValueSet& assumption) override {
    ++stats_.quantified_queries;
    if (assumption.empty_set())
      throw Error("sc_counterexample: empty assumption set");
    ValueView view;
    try {
      view = values_for(state, target);
    } catch (const Error& e) {
      ++stats_.unknowns;
      return {ScResult::Unknown, 0, e.what()};
    }
    for (const auto& [elo, ehi] : assumption.intervals) {
      const FixedBits fb =
          assumption.fixed ? *assumption.fixed : FixedBits{0, 0};
      // Walk the gaps of the feasible set inside [elo, ehi]; the first
      // pattern value inside a gap is the least infeasible member.
      Word cursor = elo;
      bool done = false;
      for (std::size_t i = view.begin; i < view.end && !done; ++i) {
        const Word fv = view.entry->values[i];
        if (fv < cursor) continue;
        if (fv > ehi) break;
        if (cursor < fv) {
          auto y = next_matching(cursor, fb, assumption.width);
          if (y && *y <= std::min<Word>(fv - 1, ehi))
            return {ScResult::Counterexample, *y, ""};
        }
        if (fv == mask_of(assumption.width)) done = true;
        else cursor = fv + 1;
      }
      if (!done && cursor <= ehi) {
        auto y = next_matching(cursor, fb, assumption.width);
        if (y && *y <= ehi) return {ScResult::Counterexample, *y, ""};
      }
    }
    return {ScResult::Proved, 0, ""};
  }

  std::optional<FixedBits> solve_fixed_bits(const SymState& state,
                                            const ExprPtr& target,
                                            unsigned width) override {
    ++stats_.quantified_queries;
    ValueView view;
    try {
      view = values_for(state, target);
    } catch (const Error&) {
      ++stats_.unknowns;
      return std::nullopt;
    }
    if (view.empty()) return std::nullopt;
    const Word wmask = mask_of(width);
    const Word v0 = view.min();
    Word agree = wmask;
    for (std::size_t i = view.begin; i < view.end; ++i)
      agree &= ~(view.entry->values[i] ^ v0);
    agree &= wmask;
    if (agree == 0) return FixedBits{0, 0};
    // The agreement query is satisfiable iff some feasible pair differs in
    // every non-fixed position; otherwise it degrades to (0, 0).
    const Word free_mask = ~agree & wmask;
    std::unordered_set<Word> present(view.size() * 2);
    for (std::size_t i = view.begin; i < view.end; ++i)
      present.insert(view.entry->values[i]);
    for (std::size_t i = view.begin; i < view.end; ++i) {
      const Word a = view.entry->values[i];
      if (present.count((a ^ free_mask) & wmask))
        return FixedBits{agree, v0 & agree};
    }
    return std::nullopt;
  }

  std::vector<Word> enumerate_feasible(const SymState& state,
                                       const ExprPtr& target) override {
    return values_for(state, target).materialize();
  }

 private:
  Verdict fail(std::string why) {
    ++stats_.unknowns;
    return Verdict::unknown(std::move(why));
  }

  OptResult optimize(const SymState& state, const ExprPtr& target,
                     bool want_max) {
    ++stats_.opt_queries;
    if (config_.opt_mode == OptMode::BinarySearch)
      return binary_search_opt(*this, state, target, want_max);
    ValueView view;
    try {
      view = values_for(state, target);
    } catch (const Error& e) {
      ++stats_.unknowns;
      return {Status::Unknown, 0, std::nullopt, e.what()};
    }
    if (view.empty()) return {Status::Unknown, 0, std::nullopt, "unsat"};
    return {Status::Sat, want_max ? view.max() : view.min(), std::nullopt, ""};
  }

  // Finds an expression pinned by a trailing range/equality constraint, to
  // key the shared-enumeration fast path.
  std::optional<ExprPtr> find_pinned_target(const SymState& state) const {
    for (auto it = state.constraints.rbegin(); it != state.constraints.rend();
         ++it) {
      const ExprPtr& c = *it;
      if ((c->op == Op::Ule || c->op == Op::Ult ||
           (c->op == Op::Eq && !c->args[0]->is_bool()))) {
        if (c->args[0]->op == Op::Const && c->args[1]->op != Op::Const)
          return c->args[1];
        if (c->args[1]->op == Op::Const && c->args[0]->op != Op::Const)
          return c->args[0];
      }
    }
    return std::nullopt;
  }

  ValueView values_for(const SymState& state, const ExprPtr& target) {
    if (state.has_arrays())
      throw UnsupportedError("arrays unsupported by internal backend");
    if (state.total_input_bits() > config_.enum_budget_bits)
      throw BudgetError("state exceeds the enumeration budget (" +
                        std::to_string(state.total_input_bits()) + " > " +
                        std::to_string(config_.enum_budget_bits) + " bits)");

    TargetRestriction restriction;
    std::vector<ExprPtr> residual;
    for (const auto& c : state.constraints)
      if (!detail::match_restriction(c, target, restriction))
        residual.push_back(c);
    restriction.add_hi(mask_of(target->width));

    auto entry = base_enumeration(state.inputs, residual, target);
    ValueView view;
    view.entry = entry;
    if (restriction.contradiction || restriction.lo > restriction.hi) {
      view.begin = view.end = 0;
      return view;
    }
    const auto& vals = entry->values;
    view.begin = static_cast<std::size_t>(
        std::lower_bound(vals.begin(), vals.end(), restriction.lo) -
        vals.begin());
    view.end = static_cast<std::size_t>(
        std::upper_bound(vals.begin(), vals.end(), restriction.hi) -
        vals.begin());
    return view;
  }

  std::shared_ptr<const EnumEntry> base_enumeration(
      const std::vector<Input>& inputs, const std::vector<ExprPtr>& residual,
      const ExprPtr& target) {
    std::size_t key = target->hash;
    for (const auto& in : inputs) {
      key ^= std::hash<std::string>{}(in.name) + 0x9e3779b97f4a7c15ull +
             (key << 6) + (key >> 2);
      key ^= in.width;
    }
    for (const auto& c : residual)
      key ^= c->hash + 0x9e3779b97f4a7c15ull + (key << 6) + (key >> 2);

    auto range = cache_.equal_range(key);
    for (auto it = range.first; it != range.second; ++it) {
      const EnumEntry& e = *it->second;
      if (e.inputs.size() != inputs.size() ||
          e.residual.size() != residual.size() ||
          !expr_equal(e.target, target))
        continue;
      bool same = true;
      for (std::size_t i = 0; same && i < inputs.size(); ++i)
        same = e.inputs[i].name == inputs[i].name &&
               e.inputs[i].width == inputs[i].width;
      for (std::size_t i = 0; same && i < residual.size(); ++i)
        same = expr_equal(e.residual[i], residual[i]);
      if (same) return it->second;
    }

    auto entry = std::make_shared<EnumEntry>();
    entry->inputs = inputs;
    entry->residual = residual;
    entry->target = target;
    enumerate_into(*entry);
    cache_.emplace(key, entry);
    return entry;
  }

  void enumerate_into(EnumEntry& entry) {
    ProgBuilder builder(entry.inputs);
    for (const auto& c : entry.residual) builder.add_constraint(c);
    builder.set_target(entry.target);
    const Prog prog = builder.take();

    const std::size_t n_inputs = entry.inputs.size();
    unsigned total_bits = 0;
    for (const auto& in : entry.inputs) total_bits += in.width;

    std::map<Word, std::vector<Word>> found;  // value -> witness slots
    std::vector<Word> slots(n_inputs, 0);
    std::vector<Word> scratch;
    const Word count = total_bits >= 64 ? 0 : (Word{1} << total_bits);
    for (Word assignment = 0;; ++assignment) {
      if (count != 0 && assignment >= count) break;
      Word rest = assignment;
      for (std::size_t i = 0; i < n_inputs; ++i) {
        const unsigned w = entry.inputs[i].width;
        slots[i] = rest & mask_of(w);
        rest >>= w;
      }
      run_prog(prog, slots, scratch);
      bool ok = true;
      for (int root : prog.constraint_roots)
        if (!scratch[static_cast<std::size_t>(root)]) {
          ok = false;
          break;
        }
      if (ok) {
        const Word v = scratch[static_cast<std::size_t>(prog.target_root)];
        found.emplace(v, slots);  // keeps the first (lowest) witness
      }
      if (count == 0 && assignment == ~Word{0}) break;
    }

    entry.values.reserve(found.size());
    entry.witness_words.reserve(found.size() * n_inputs);
    for (auto& [v, w] : found) {
      entry.values.push_back(v);
      entry.witness_words.insert(entry.witness_words.end(), w.begin(), w.end());
    }
  }

  // --- component decomposition for states beyond the direct budget ---

  Verdict check_sat_decomposed(const SymState& state) {
    // Union-find over inputs; every constraint links its variables.
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < state.inputs.size(); ++i)
      index[state.inputs[i].name] = i;
    std::vector<std::size_t> parent(state.inputs.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
      parent[find(a)] = find(b);
    };

    std::vector<std::set<std::string>> cvars(state.constraints.size());
    for (std::size_t ci = 0; ci < state.constraints.size(); ++ci) {
      cvars[ci] = vars_of(state.constraints[ci]);
      std::optional<std::size_t> first;
      for (const auto& v : cvars[ci]) {
        auto it = index.find(v);
        if (it == index.end())
          return fail("constraint over undeclared variable " + v);
        if (!first) first = it->second;
        else unite(*first, it->second);
      }
    }

    std::map<std::size_t, detail::Component> comps;
    for (std::size_t i = 0; i < state.inputs.size(); ++i)
      comps[find(i)].inputs.push_back(state.inputs[i]);
    for (std::size_t ci = 0; ci < state.constraints.size(); ++ci) {
      const std::size_t root = find(index.at(*cvars[ci].begin()));
      comps[root].constraints.push_back(state.constraints[ci]);
    }

    Model model;
    for (auto& [root, comp] : comps) {
      if (comp.constraints.empty()) {
        for (const auto& in : comp.inputs) model[in.name] = 0;
        continue;
      }
      if (comp.bits() <= config_.enum_budget_bits) {
        SymState sub;
        sub.inputs = comp.inputs;
        sub.constraints = comp.constraints;
        ExprPtr probe = mk_var(sub.inputs[0].name, sub.inputs[0].width);
        ValueView view = values_for(sub, probe);
        if (view.empty()) return Verdict::unsat();
        Model sub_model = view.entry->witness_for(view.begin);
        model.insert(sub_model.begin(), sub_model.end());
        continue;
      }
      Verdict bridged = solve_bridge(comp);
      if (bridged.status == Status::Sat) {
        model.insert(bridged.model.begin(), bridged.model.end());
        continue;
      }
      return bridged;  // Unsat or Unknown
    }
    return Verdict::sat(std::move(model));
  }

  // A component too large to enumerate may still split along one relational
  // constraint whose operand trees live in otherwise-disjoint halves; the
  // relation is then decided on the two value sets.
  Verdict solve_bridge(const detail::Component& comp) {
    for (std::size_t bi = 0; bi < comp.constraints.size(); ++bi) {
      ExprPtr c = comp.constraints[bi];
      bool negated = false;
      if (c->op == Op::Not && c->args[0]->op != Op::Const &&
          !c->args[0]->args.empty()) {
        c = c->args[0];
        negated = true;
      }
      if (c->op != Op::Eq && c->op != Op::Ult && c->op != Op::Ule &&
          c->op != Op::Slt && c->op != Op::Sle)
        continue;
      if (c->args[0]->is_bool()) continue;

      auto left_vars = vars_of(c->args[0]);
      auto right_vars = vars_of(c->args[1]);
      if (left_vars.empty() || right_vars.empty()) continue;

      // Regroup the remaining constraints around the two operand supports.
      std::map<std::string, int> side;  // 0 left, 1 right
      for (const auto& v : left_vars) side[v] = 0;
      bool overlap = false;
      for (const auto& v : right_vars) {
        if (side.count(v)) overlap = true;
        side[v] = 1;
      }
      if (overlap) continue;

      bool grew = true;
      bool conflict = false;
      std::vector<int> cside(comp.constraints.size(), -1);
      while (grew && !conflict) {
        grew = false;
        for (std::size_t ci = 0; ci < comp.constraints.size(); ++ci) {
          if (ci == bi || cside[ci] >= 0) continue;
          int want = -1;
          for (const auto& v : vars_of(comp.constraints[ci])) {
            auto it = side.find(v);
            if (it == side.end()) continue;
            if (want == -1) want = it->second;
            else if (want != it->second) conflict = true;
          }
          if (conflict) break;
          if (want >= 0) {
            cside[ci] = want;
            for (const auto& v : vars_of(comp.constraints[ci])) {
              if (!side.count(v)) {
                side[v] = want;
                grew = true;
              }
            }
          }
        }
      }
      if (conflict) continue;

      SymState sub[2];
      for (const auto& in : comp.inputs) {
        auto it = side.find(in.name);
        const int s = it == side.end() ? 0 : it->second;
        sub[s].inputs.push_back(in);
      }
      bool leftover = false;
      for (std::size_t ci = 0; ci < comp.constraints.size(); ++ci) {
        if (ci == bi) continue;
        if (cside[ci] < 0) { leftover = true; break; }
        sub[cside[ci]].constraints.push_back(comp.constraints[ci]);
      }
      if (leftover) continue;
      if (sub[0].total_input_bits() > config_.enum_budget_bits ||
          sub[1].total_input_bits() > config_.enum_budget_bits)
        continue;

      ValueView lhs, rhs;
      try {
        lhs = values_for(sub[0], c->args[0]);
        rhs = values_for(sub[1], c->args[1]);
      } catch (const Error& e) {
        return fail(e.what());
      }
      if (lhs.empty() || rhs.empty()) return Verdict::unsat();

      auto witness = pick_pair(lhs, rhs, c->op, negated,
                               c->args[0]->width);
      if (!witness) return Verdict::unsat();
      Model model = lhs.entry->witness_for(witness->first);
      Model rm = rhs.entry->witness_for(witness->second);
      model.insert(rm.begin(), rm.end());
      for (const auto& in : comp.inputs)
        model.emplace(in.name, 0);  // anything untouched
      return Verdict::sat(std::move(model));
    }
    return fail("component exceeds the enumeration budget and has no usable bridge");
  }

  // Picks (index into lhs entry, index into rhs entry) satisfying the
  // (possibly negated) relation, or nullopt when none exists. Order
  // relations are decided on the relevant extremes; equality intersects the
  // sorted value lists.
  std::optional<std::pair<std::size_t, std::size_t>> pick_pair(
      const ValueView& lhs, const ValueView& rhs, Op op, bool negated,
      unsigned width) {
    auto index_of = [](const ValueView& view, Word v) {
      const auto& vals = view.entry->values;
      auto it = std::lower_bound(vals.begin() + view.begin,
                                 vals.begin() + view.end, v);
      return static_cast<std::size_t>(it - vals.begin());
    };
    // Positions of the signed extremes within a sorted-unsigned view: the
    // negative region (values >= 2^(width-1)) precedes the nonnegative one
    // in signed order.
    const Word sign_split = width >= 64 ? (Word{1} << 63) : (Word{1} << (width - 1));
    auto signed_min_idx = [&](const ValueView& v) {
      std::size_t split = index_of(v, sign_split);
      return split < v.end ? split : v.begin;  // first negative else smallest
    };
    auto signed_max_idx = [&](const ValueView& v) {
      std::size_t split = index_of(v, sign_split);
      return split > v.begin ? split - 1 : v.end - 1;  // last nonnegative else largest
    };

    if (negated) {
      // Only disequality reaches here in negated form.
      if (op != Op::Eq) return std::nullopt;
      if (lhs.size() == 1 && rhs.size() == 1)
        return lhs.min() != rhs.min()
                   ? std::make_optional(std::make_pair(lhs.begin, rhs.begin))
                   : std::nullopt;
      if (rhs.size() > 1) {
        std::size_t ri = rhs.value_at(0) != lhs.min() ? rhs.begin : rhs.begin + 1;
        return std::make_pair(lhs.begin, ri);
      }
      std::size_t li = lhs.value_at(0) != rhs.min() ? lhs.begin : lhs.begin + 1;
      return std::make_pair(li, rhs.begin);
    }

    switch (op) {
      case Op::Eq: {
        for (std::size_t i = 0; i < lhs.size(); ++i) {
          const Word v = lhs.value_at(i);
          if (rhs.contains(v))
            return std::make_pair(lhs.begin + i, index_of(rhs, v));
        }
        return std::nullopt;
      }
      case Op::Ult:
        if (lhs.min() < rhs.max())
          return std::make_pair(lhs.begin, rhs.end - 1);
        return std::nullopt;
      case Op::Ule:
        if (lhs.min() <= rhs.max())
          return std::make_pair(lhs.begin, rhs.end - 1);
        return std::nullopt;
      case Op::Slt:
      case Op::Sle: {
        const std::size_t li = signed_min_idx(lhs);
        const std::size_t ri = signed_max_idx(rhs);
        auto signed_of = [&](Word v) {
          return static_cast<std::int64_t>(v & sign_split ? v | ~mask_of(width)
                                                          : v);
        };
        const std::int64_t a = signed_of(lhs.entry->values[li]);
        const std::int64_t b = signed_of(rhs.entry->values[ri]);
        if (op == Op::Slt ? a < b : a <= b) return std::make_pair(li, ri);
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  }

  std::unordered_multimap<std::size_t, std::shared_ptr<const EnumEntry>> cache_;
};

}  // namespace

std::unique_ptr<Solver> make_internal_solver(const SolverConfig& config) {
  return std::make_unique<InternalSolver>(config);
}

}  // namespace ctrl
