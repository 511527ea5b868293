#include "ctrl/smt2.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ctrl {

namespace {

constexpr const char* kAssumeVar = "ctrl.v";

struct Token {
  enum Kind { LParen, RParen, Symbol, End } kind;
  std::string text;
  int line = 0;
  int col = 0;
};

struct Annotation {
  std::string payload;
  int line;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  // Comment lines may carry tool annotations.
  std::vector<Annotation> target_notes;
  std::vector<Annotation> assume_notes;

  Token next() {
    skip_space();
    if (pos_ >= text_.size()) return {Token::End, "", line_, col_};
    const char c = text_[pos_];
    if (c == '(') {
      Token t{Token::LParen, "(", line_, col_};
      advance();
      return t;
    }
    if (c == ')') {
      Token t{Token::RParen, ")", line_, col_};
      advance();
      return t;
    }
    if (c == '|') {
      throw ParseError("quoted symbols are not supported", line_, col_);
    }
    Token t{Token::Symbol, "", line_, col_};
    while (pos_ < text_.size() && !is_delim(text_[pos_])) {
      t.text.push_back(text_[pos_]);
      advance();
    }
    if (t.text.empty())
      throw ParseError("unexpected character", line_, col_);
    return t;
  }

  Token peek() {
    const std::size_t p = pos_;
    const int l = line_, c = col_;
    Token t = next();
    pos_ = p;
    line_ = l;
    col_ = c;
    return t;
  }

 private:
  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ';' ||
           std::isspace(static_cast<unsigned char>(c));
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        std::size_t eol = text_.find('\n', pos_);
        std::string comment = text_.substr(
            pos_ + 1, (eol == std::string::npos ? text_.size() : eol) - pos_ - 1);
        record_annotation(comment, line_);
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void record_annotation(const std::string& comment, int line) {
    auto trimmed = comment;
    auto l = trimmed.find_first_not_of(" \t");
    if (l == std::string::npos) return;
    trimmed = trimmed.substr(l);
    const std::string target_tag = "ctrl-target:";
    const std::string assume_tag = "ctrl-assume:";
    if (trimmed.rfind(target_tag, 0) == 0)
      target_notes.push_back({trimmed.substr(target_tag.size()), line});
    else if (trimmed.rfind(assume_tag, 0) == 0)
      assume_notes.push_back({trimmed.substr(assume_tag.size()), line});
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// S-expression tree used while parsing.
struct Sexp {
  bool atom = true;
  std::string text;
  std::vector<Sexp> items;
  int line = 0;
  int col = 0;
};

Sexp read_sexp(Lexer& lex) {
  Token t = lex.next();
  if (t.kind == Token::End)
    throw ParseError("unexpected end of input", t.line, t.col);
  if (t.kind == Token::RParen)
    throw ParseError("unexpected ')'", t.line, t.col);
  if (t.kind == Token::Symbol) {
    Sexp s;
    s.atom = true;
    s.text = t.text;
    s.line = t.line;
    s.col = t.col;
    return s;
  }
  Sexp s;
  s.atom = false;
  s.line = t.line;
  s.col = t.col;
  for (;;) {
    Token p = lex.peek();
    if (p.kind == Token::End)
      throw ParseError("missing ')'", s.line, s.col);
    if (p.kind == Token::RParen) {
      lex.next();
      return s;
    }
    s.items.push_back(read_sexp(lex));
  }
}

std::string sexp_text(const Sexp& s) {
  if (s.atom) return s.text;
  std::string out = "(";
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += " ";
    out += sexp_text(s.items[i]);
  }
  out += ")";
  return out;
}

bool parse_uint(const std::string& s, Word& out) {
  if (s.empty()) return false;
  Word v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    Word nv = v * 10 + static_cast<Word>(c - '0');
    if (nv < v) return false;
    v = nv;
  }
  out = v;
  return true;
}

std::optional<ExprPtr> parse_literal(const Sexp& s) {
  if (!s.atom) {
    // (_ bvN w)
    if (s.items.size() == 3 && s.items[0].atom && s.items[0].text == "_" &&
        s.items[1].atom && s.items[1].text.rfind("bv", 0) == 0 &&
        s.items[2].atom) {
      Word value = 0, width = 0;
      if (!parse_uint(s.items[1].text.substr(2), value) ||
          !parse_uint(s.items[2].text, width) || width == 0 ||
          width > kMaxWidth)
        throw ParseError("malformed bitvector literal", s.line, s.col);
      return mk_const(value, static_cast<unsigned>(width));
    }
    return std::nullopt;
  }
  const std::string& t = s.text;
  if (t == "true") return mk_bool(true);
  if (t == "false") return mk_bool(false);
  if (t.rfind("#x", 0) == 0) {
    const std::string digits = t.substr(2);
    if (digits.empty() || digits.size() > 16)
      throw ParseError("malformed hex literal", s.line, s.col);
    Word v = 0;
    for (char c : digits) {
      int d;
      if (c >= '0' && c <= '9') d = c - '0';
      else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
      else throw ParseError("malformed hex literal", s.line, s.col);
      v = (v << 4) | static_cast<Word>(d);
    }
    return mk_const(v, static_cast<unsigned>(digits.size() * 4));
  }
  if (t.rfind("#b", 0) == 0) {
    const std::string digits = t.substr(2);
    if (digits.empty() || digits.size() > 64)
      throw ParseError("malformed binary literal", s.line, s.col);
    Word v = 0;
    for (char c : digits) {
      if (c != '0' && c != '1')
        throw ParseError("malformed binary literal", s.line, s.col);
      v = (v << 1) | static_cast<Word>(c - '0');
    }
    return mk_const(v, static_cast<unsigned>(digits.size()));
  }
  return std::nullopt;
}

struct TermEnv {
  const SymState* state;

  unsigned lookup(const std::string& name, int line, int col) const {
    if (const Input* in = state->find_input(name)) return in->width;
    if (state->is_array_name(name))
      throw ParseError("array symbol used in a bitvector term: " + name, line,
                       col);
    throw ParseError("undeclared variable: " + name, line, col);
  }
};

ExprPtr parse_term(const Sexp& s, const TermEnv& env);

ExprPtr parse_app(const Sexp& s, const TermEnv& env) {
  if (s.items.empty())
    throw ParseError("empty application", s.line, s.col);
  const Sexp& head = s.items[0];

  // Indexed operators: ((_ extract hi lo) t), ((_ zero_extend n) t), ...
  if (!head.atom) {
    if (head.items.size() >= 1 && head.items[0].atom &&
        head.items[0].text == "_") {
      if (head.items.size() == 4 && head.items[1].text == "extract") {
        Word hi = 0, lo = 0;
        if (!parse_uint(head.items[2].text, hi) ||
            !parse_uint(head.items[3].text, lo))
          throw ParseError("malformed extract indices", s.line, s.col);
        if (s.items.size() != 2)
          throw ParseError("extract takes one operand", s.line, s.col);
        return mk_extract(parse_term(s.items[1], env),
                          static_cast<unsigned>(hi), static_cast<unsigned>(lo));
      }
      if (head.items.size() == 3 && (head.items[1].text == "zero_extend" ||
                                     head.items[1].text == "sign_extend")) {
        Word by = 0;
        if (!parse_uint(head.items[2].text, by))
          throw ParseError("malformed extend amount", s.line, s.col);
        if (s.items.size() != 2)
          throw ParseError("extend takes one operand", s.line, s.col);
        ExprPtr a = parse_term(s.items[1], env);
        return head.items[1].text == "zero_extend"
                   ? mk_zext(a, static_cast<unsigned>(by))
                   : mk_sext(a, static_cast<unsigned>(by));
      }
    }
    throw ParseError("unsupported operator form", head.line, head.col);
  }

  const std::string& op = head.text;
  std::vector<ExprPtr> args;
  for (std::size_t i = 1; i < s.items.size(); ++i)
    args.push_back(parse_term(s.items[i], env));

  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw ParseError("operator " + op + " expects " + std::to_string(n) +
                           " operands",
                       s.line, s.col);
  };
  auto fold = [&](Op o) {
    if (args.size() < 2)
      throw ParseError("operator " + op + " expects >= 2 operands", s.line,
                       s.col);
    ExprPtr acc = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) acc = mk_bin(o, acc, args[i]);
    return acc;
  };

  try {
    if (op == "bvadd") return fold(Op::Add);
    if (op == "bvsub") { need(2); return mk_bin(Op::Sub, args[0], args[1]); }
    if (op == "bvmul") return fold(Op::Mul);
    if (op == "bvudiv") { need(2); return mk_bin(Op::UDiv, args[0], args[1]); }
    if (op == "bvurem") { need(2); return mk_bin(Op::URem, args[0], args[1]); }
    if (op == "bvand") return fold(Op::And);
    if (op == "bvor") return fold(Op::Or);
    if (op == "bvxor") return fold(Op::Xor);
    if (op == "bvshl") { need(2); return mk_bin(Op::Shl, args[0], args[1]); }
    if (op == "bvlshr") { need(2); return mk_bin(Op::LShr, args[0], args[1]); }
    if (op == "bvashr") { need(2); return mk_bin(Op::AShr, args[0], args[1]); }
    if (op == "bvnot") { need(1); return mk_not(args[0]); }
    if (op == "bvneg") { need(1); return mk_neg(args[0]); }
    if (op == "=") { need(2); return mk_eq(args[0], args[1]); }
    if (op == "distinct") { need(2); return mk_distinct(args[0], args[1]); }
    if (op == "bvult") { need(2); return mk_bin(Op::Ult, args[0], args[1]); }
    if (op == "bvule") { need(2); return mk_bin(Op::Ule, args[0], args[1]); }
    if (op == "bvugt") { need(2); return mk_bin(Op::Ult, args[1], args[0]); }
    if (op == "bvuge") { need(2); return mk_bin(Op::Ule, args[1], args[0]); }
    if (op == "bvslt") { need(2); return mk_bin(Op::Slt, args[0], args[1]); }
    if (op == "bvsle") { need(2); return mk_bin(Op::Sle, args[0], args[1]); }
    if (op == "bvsgt") { need(2); return mk_bin(Op::Slt, args[1], args[0]); }
    if (op == "bvsge") { need(2); return mk_bin(Op::Sle, args[1], args[0]); }
    if (op == "and") return args.size() == 1 ? args[0] : fold(Op::And);
    if (op == "or") return args.size() == 1 ? args[0] : fold(Op::Or);
    if (op == "xor") return fold(Op::Xor);
    if (op == "not") { need(1); return mk_not(args[0]); }
    if (op == "=>") { need(2); return mk_bin(Op::Implies, args[0], args[1]); }
    if (op == "ite") { need(3); return mk_ite(args[0], args[1], args[2]); }
    if (op == "concat") {
      if (args.size() < 2)
        throw ParseError("concat expects >= 2 operands", s.line, s.col);
      ExprPtr acc = args[0];
      for (std::size_t i = 1; i < args.size(); ++i)
        acc = mk_concat(acc, args[i]);
      return acc;
    }
  } catch (const WidthError& we) {
    throw ParseError(we.what(), s.line, s.col);
  }
  if (op == "let" || op == "forall" || op == "exists" || op == "select" ||
      op == "store")
    throw ParseError("unsupported construct in internal term: " + op, s.line,
                     s.col);
  throw ParseError("unsupported operator: " + op, s.line, s.col);
}

ExprPtr parse_term(const Sexp& s, const TermEnv& env) {
  if (auto lit = parse_literal(s)) return *lit;
  if (s.atom) return mk_var(s.text, env.lookup(s.text, s.line, s.col));
  return parse_app(s, env);
}

// True when the term references arrays and must be handled as passthrough.
bool touches_arrays(const Sexp& s, const SymState& state) {
  if (s.atom) {
    if (s.text == "select" || s.text == "store") return true;
    return state.is_array_name(s.text);
  }
  for (const auto& item : s.items)
    if (touches_arrays(item, state)) return true;
  return false;
}

// Every atom in a passthrough term must still resolve to something known.
void check_passthrough_symbols(const Sexp& s, const SymState& state) {
  static const std::set<std::string> known = {
      "select", "store",  "bvadd",  "bvsub", "bvmul",  "bvudiv", "bvurem",
      "bvand",  "bvor",   "bvxor",  "bvshl", "bvlshr", "bvashr", "bvnot",
      "bvneg",  "=",      "distinct", "bvult", "bvule", "bvugt", "bvuge",
      "bvslt",  "bvsle",  "bvsgt",  "bvsge", "and",    "or",     "xor",
      "not",    "=>",     "ite",    "concat", "_",     "extract",
      "zero_extend", "sign_extend", "true", "false"};
  if (s.atom) {
    const std::string& t = s.text;
    if (known.count(t)) return;
    if (t.rfind("#x", 0) == 0 || t.rfind("#b", 0) == 0) return;
    if (t.rfind("bv", 0) == 0 && t.size() > 2 &&
        std::isdigit(static_cast<unsigned char>(t[2])))
      return;
    Word dummy;
    if (parse_uint(t, dummy)) return;
    if (state.find_input(t) || state.is_array_name(t)) return;
    throw ParseError("undeclared variable: " + t, s.line, s.col);
  }
  for (const auto& item : s.items) check_passthrough_symbols(item, state);
}

struct SortInfo {
  bool is_array = false;
  unsigned width = 0;
  std::string text;  // original sort text for arrays
};

SortInfo parse_sort(const Sexp& s) {
  if (!s.atom && s.items.size() == 3 && s.items[0].atom &&
      s.items[0].text == "_" && s.items[1].text == "BitVec") {
    Word w = 0;
    if (!parse_uint(s.items[2].text, w) || w == 0 || w > kMaxWidth)
      throw ParseError("unsupported bitvector width", s.line, s.col);
    return {false, static_cast<unsigned>(w), ""};
  }
  if (!s.atom && !s.items.empty() && s.items[0].atom &&
      s.items[0].text == "Array") {
    return {true, 0, sexp_text(s)};
  }
  throw ParseError("unsupported sort: " + sexp_text(s), s.line, s.col);
}

// Extracts a ValueSet from the restricted assume grammar over ctrl.v:
// conjunctions of bounds/equalities on ctrl.v, a fixed-bits equation
// (= (bvand ctrl.v M) B), and disjunctions of pure range constraints.
struct AssumeBuilder {
  unsigned width;

  std::optional<std::pair<Word, Word>> as_range(const ExprPtr& e) const {
    auto cval = [&](const ExprPtr& x) -> std::optional<Word> {
      if (x->op == Op::Const) return x->value;
      return std::nullopt;
    };
    auto is_v = [&](const ExprPtr& x) {
      return x->op == Op::Var && x->name == kAssumeVar;
    };
    if (e->op == Op::Ule || e->op == Op::Ult) {
      const bool strict = e->op == Op::Ult;
      if (is_v(e->args[0])) {
        if (auto c = cval(e->args[1])) {
          Word hi = *c;
          if (strict) {
            if (hi == 0) return std::nullopt;
            hi -= 1;
          }
          return std::make_pair(Word{0}, hi);
        }
      }
      if (is_v(e->args[1])) {
        if (auto c = cval(e->args[0])) {
          Word lo = *c;
          if (strict) {
            if (lo == mask_of(width)) return std::nullopt;
            lo += 1;
          }
          return std::make_pair(lo, mask_of(width));
        }
      }
    }
    if (e->op == Op::Eq) {
      if (is_v(e->args[0]))
        if (auto c = cval(e->args[1])) return std::make_pair(*c, *c);
      if (is_v(e->args[1]))
        if (auto c = cval(e->args[0])) return std::make_pair(*c, *c);
    }
    return std::nullopt;
  }

  std::optional<FixedBits> as_fixed(const ExprPtr& e) const {
    if (e->op != Op::Eq) return std::nullopt;
    for (int side = 0; side < 2; ++side) {
      const ExprPtr& l = e->args[side];
      const ExprPtr& r = e->args[1 - side];
      if (l->op == Op::And && !l->is_bool() && r->op == Op::Const) {
        const ExprPtr& a = l->args[0];
        const ExprPtr& b = l->args[1];
        if (a->op == Op::Var && a->name == kAssumeVar && b->op == Op::Const)
          return FixedBits{b->value, r->value};
        if (b->op == Op::Var && b->name == kAssumeVar && a->op == Op::Const)
          return FixedBits{a->value, r->value};
      }
    }
    return std::nullopt;
  }

  // Collects interval union from an or-tree of ranges.
  bool collect_union(const ExprPtr& e, std::vector<std::pair<Word, Word>>& out) const {
    if (e->op == Op::Or && e->is_bool()) {
      return collect_union(e->args[0], out) && collect_union(e->args[1], out);
    }
    if (e->op == Op::And && e->is_bool()) {
      // range conjunction like lo <= v && v <= hi
      std::vector<std::pair<Word, Word>> parts;
      if (!collect_conj_ranges(e, parts)) return false;
      Word lo = 0, hi = mask_of(width);
      for (auto& [l, h] : parts) {
        lo = std::max(lo, l);
        hi = std::min(hi, h);
      }
      if (lo <= hi) out.emplace_back(lo, hi);
      return true;
    }
    if (auto r = as_range(e)) {
      out.push_back(*r);
      return true;
    }
    return false;
  }

  bool collect_conj_ranges(const ExprPtr& e,
                           std::vector<std::pair<Word, Word>>& out) const {
    if (e->op == Op::And && e->is_bool())
      return collect_conj_ranges(e->args[0], out) &&
             collect_conj_ranges(e->args[1], out);
    if (auto r = as_range(e)) {
      out.push_back(*r);
      return true;
    }
    return false;
  }

  ValueSet build(const ExprPtr& e) const {
    ValueSet set;
    set.width = width;
    Word lo = 0, hi = mask_of(width);
    std::vector<std::pair<Word, Word>> unions;
    std::optional<FixedBits> fixed;

    std::function<void(const ExprPtr&)> visit = [&](const ExprPtr& n) {
      if (n->op == Op::And && n->is_bool()) {
        // fixed-bits and ranges may mix at the top-level conjunction
        if (auto fb = as_fixed(n->args[0])) {
          if (fixed) throw UnsupportedError("multiple fixed-bits assumptions");
          fixed = fb;
          visit(n->args[1]);
          return;
        }
        if (auto fb = as_fixed(n->args[1])) {
          if (fixed) throw UnsupportedError("multiple fixed-bits assumptions");
          fixed = fb;
          visit(n->args[0]);
          return;
        }
        if (n->args[0]->op == Op::Or || n->args[1]->op == Op::Or) {
          // (or ...) under the conjunction: treat as the union part
          for (const auto& part : n->args) {
            if (part->op == Op::Or) {
              if (!collect_union(part, unions))
                throw UnsupportedError("unsupported assumption shape");
            } else {
              visit(part);
            }
          }
          return;
        }
        visit(n->args[0]);
        visit(n->args[1]);
        return;
      }
      if (auto fb = as_fixed(n)) {
        if (fixed) throw UnsupportedError("multiple fixed-bits assumptions");
        fixed = fb;
        return;
      }
      if (n->op == Op::Or && n->is_bool()) {
        if (!collect_union(n, unions))
          throw UnsupportedError("unsupported assumption shape");
        return;
      }
      if (auto r = as_range(n)) {
        lo = std::max(lo, r->first);
        hi = std::min(hi, r->second);
        return;
      }
      if (n->op == Op::Const && n->is_bool() && n->value == 1) return;
      throw UnsupportedError("unsupported assumption shape: " + to_smt2(n));
    };
    visit(e);

    if (unions.empty()) {
      if (lo <= hi) set.intervals.emplace_back(lo, hi);
    } else {
      for (auto& [ulo, uhi] : unions) {
        Word l = std::max(ulo, lo), h = std::min(uhi, hi);
        if (l <= h) set.intervals.emplace_back(l, h);
      }
    }
    if (fixed) {
      if ((fixed->bits & ~fixed->mask) != 0)
        throw UnsupportedError("assumption fixed bits fall outside the mask");
      set.fixed = *fixed;
    }
    set.normalize();
    return set;
  }
};

}  // namespace

ParsedFile parse_smt2(const std::string& text) {
  Lexer lex(text);
  ParsedFile out;
  std::vector<Sexp> commands;
  for (;;) {
    Token p = lex.peek();
    if (p.kind == Token::End) break;
    commands.push_back(read_sexp(lex));
  }

  for (const auto& cmd : commands) {
    if (cmd.atom || cmd.items.empty() || !cmd.items[0].atom)
      throw ParseError("expected a command", cmd.line, cmd.col);
    const std::string& head = cmd.items[0].text;
    if (head == "set-logic" || head == "set-info" || head == "set-option" ||
        head == "check-sat" || head == "exit" || head == "get-model" ||
        head == "get-value")
      continue;
    if (head == "declare-const" || head == "declare-fun") {
      std::size_t sort_index;
      if (head == "declare-const") {
        if (cmd.items.size() != 3)
          throw ParseError("declare-const takes a name and a sort", cmd.line,
                           cmd.col);
        sort_index = 2;
      } else {
        if (cmd.items.size() != 4 || cmd.items[2].atom ||
            !cmd.items[2].items.empty())
          throw ParseError("only zero-arity declare-fun is supported",
                           cmd.line, cmd.col);
        sort_index = 3;
      }
      if (!cmd.items[1].atom)
        throw ParseError("declaration name must be a symbol", cmd.line,
                         cmd.col);
      const std::string& name = cmd.items[1].text;
      if (out.state.find_input(name) || out.state.is_array_name(name))
        throw ParseError("duplicate declaration: " + name, cmd.line, cmd.col);
      SortInfo sort = parse_sort(cmd.items[sort_index]);
      if (sort.is_array)
        out.state.array_decls.emplace_back(name, sort.text);
      else
        out.state.inputs.push_back({name, sort.width});
      continue;
    }
    if (head == "assert") {
      if (cmd.items.size() != 2)
        throw ParseError("assert takes one term", cmd.line, cmd.col);
      const Sexp& term = cmd.items[1];
      if (touches_arrays(term, out.state)) {
        check_passthrough_symbols(term, out.state);
        out.state.array_asserts.push_back(sexp_text(term));
        continue;
      }
      TermEnv env{&out.state};
      ExprPtr e = parse_term(term, env);
      if (!e->is_bool())
        throw ParseError("asserted term is not boolean", term.line, term.col);
      out.state.constraints.push_back(e);
      continue;
    }
    throw ParseError("unsupported command: " + head, cmd.line, cmd.col);
  }

  if (lex.target_notes.size() > 1)
    throw ParseError("multiple ctrl-target annotations",
                     lex.target_notes[1].line, 1);
  if (!lex.target_notes.empty()) {
    const auto& note = lex.target_notes[0];
    const std::string marker = " width=";
    auto at = note.payload.rfind(marker);
    if (at == std::string::npos)
      throw ParseError("ctrl-target annotation is missing width=", note.line, 1);
    Word w = 0;
    std::string wtext = note.payload.substr(at + marker.size());
    while (!wtext.empty() && std::isspace(static_cast<unsigned char>(wtext.back())))
      wtext.pop_back();
    if (!parse_uint(wtext, w) || w == 0 || w > kMaxWidth)
      throw ParseError("malformed ctrl-target width", note.line, 1);

    std::string term_text = note.payload.substr(0, at);
    Lexer term_lex(term_text);
    Sexp term = read_sexp(term_lex);
    TermEnv env{&out.state};
    TargetSpec target;
    target.expr = parse_term(term, env);
    target.width = static_cast<unsigned>(w);
    if (target.expr->width != target.width)
      throw ParseError("ctrl-target width disagrees with the term width",
                       note.line, 1);

    if (lex.assume_notes.size() > 1)
      throw ParseError("multiple ctrl-assume annotations",
                       lex.assume_notes[1].line, 1);
    if (!lex.assume_notes.empty()) {
      SymState pseudo;
      pseudo.inputs.push_back({kAssumeVar, target.width});
      Lexer assume_lex(lex.assume_notes[0].payload);
      Sexp assume_term = read_sexp(assume_lex);
      TermEnv assume_env{&pseudo};
      ExprPtr e = parse_term(assume_term, assume_env);
      if (!e->is_bool())
        throw ParseError("ctrl-assume term is not boolean",
                         lex.assume_notes[0].line, 1);
      AssumeBuilder builder{target.width};
      target.assumption = builder.build(e);
      if (target.assumption->empty_set())
        throw ParseError("ctrl-assume denotes the empty set",
                         lex.assume_notes[0].line, 1);
    }
    out.target = std::move(target);
  } else if (!lex.assume_notes.empty()) {
    throw ParseError("ctrl-assume without ctrl-target",
                     lex.assume_notes[0].line, 1);
  }

  return out;
}

ExprPtr parse_smt2_term(const std::string& text, const SymState& state) {
  Lexer lex(text);
  Sexp s = read_sexp(lex);
  TermEnv env{&state};
  return parse_term(s, env);
}

std::string serialize_smt2(const SymState& state,
                           const std::vector<ExprPtr>& extras) {
  std::ostringstream os;
  os << "(set-logic " << (state.has_arrays() ? "ABV" : "BV") << ")\n";
  for (const auto& in : state.inputs)
    os << "(declare-const " << in.name << " (_ BitVec " << in.width << "))\n";
  for (const auto& [name, sort] : state.array_decls)
    os << "(declare-const " << name << " " << sort << ")\n";
  for (const auto& c : state.constraints)
    os << "(assert " << to_smt2(c) << ")\n";
  for (const auto& raw : state.array_asserts) os << "(assert " << raw << ")\n";
  for (const auto& e : extras) os << "(assert " << to_smt2(e) << ")\n";
  return os.str();
}

std::string assumption_to_smt2(const ValueSet& set) {
  ExprPtr v = mk_var(kAssumeVar, set.width);
  return to_smt2(set.membership(v));
}

std::string to_file_text(const SymState& state, const TargetSpec& target) {
  std::ostringstream os;
  os << serialize_smt2(state);
  os << "; ctrl-target: " << to_smt2(target.expr) << " width=" << target.width
     << "\n";
  if (target.assumption)
    os << "; ctrl-assume: " << assumption_to_smt2(*target.assumption) << "\n";
  return os.str();
}

}  // namespace ctrl
