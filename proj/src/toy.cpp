#include "ctrl/toy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ctrl/smt2.hpp"

namespace ctrl::toy {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct LineParser {
  std::vector<std::pair<int, std::string>> lines;  // line number, text
  std::size_t pos = 0;
  SymState env;  // tracks declared inputs and assigned variable widths

  ExprPtr term(const std::string& text, int line) {
    try {
      return parse_smt2_term(text, env);
    } catch (const ParseError& e) {
      throw ParseError(std::string("toy term: ") + e.what(), line, 1);
    }
  }

  void define_var(const std::string& name, unsigned width, int line) {
    if (const Input* in = env.find_input(name)) {
      if (in->width != width)
        throw ParseError("variable " + name + " re-assigned at width " +
                             std::to_string(width) + " (was " +
                             std::to_string(in->width) + ")",
                         line, 1);
      return;
    }
    env.inputs.push_back({name, width});
  }

  StmtList block(bool top_level) {
    StmtList body;
    while (pos < lines.size()) {
      auto [line, text] = lines[pos];
      if (text == "}" || text.rfind("} else", 0) == 0) {
        if (top_level) throw ParseError("unmatched '}'", line, 1);
        return body;
      }
      ++pos;
      body.push_back(statement(line, text));
    }
    if (!top_level) throw ParseError("missing '}'", lines.back().first, 1);
    return body;
  }

  Stmt statement(int line, const std::string& text) {
    Stmt st;
    st.line = line;
    std::istringstream is(text);
    std::string head;
    is >> head;

    if (head == "store") {
      st.kind = Stmt::Store;
      auto rest = trim(text.substr(text.find("store") + 5));
      auto [addr, value] = split_two_terms(rest, line);
      st.expr = term(addr, line);
      st.value = term(value, line);
      if (st.expr->is_bool() || st.value->width != 8)
        throw ParseError("store takes a bitvector address and a byte value",
                         line, 1);
      return st;
    }
    if (head == "sink") {
      st.kind = Stmt::Sink;
      is >> st.name;
      if (st.name.empty()) throw ParseError("sink needs a label", line, 1);
      std::string rest;
      std::getline(is, rest);
      st.expr = term(trim(rest), line);
      if (st.expr->is_bool())
        throw ParseError("sink expression must be a bitvector", line, 1);
      return st;
    }
    if (head == "if") {
      st.kind = Stmt::If;
      auto brace = text.rfind('{');
      if (brace == std::string::npos)
        throw ParseError("if needs an opening '{'", line, 1);
      st.expr = term(trim(text.substr(2, brace - 2)), line);
      if (!st.expr->is_bool())
        throw ParseError("if condition must be boolean", line, 1);
      st.then_body = std::make_shared<StmtList>(block(false));
      st.else_body = std::make_shared<StmtList>();
      // closing line: '}' or '} else {'
      auto [close_line, close_text] = lines[pos];
      ++pos;
      if (close_text.rfind("} else", 0) == 0) {
        if (close_text.find('{') == std::string::npos)
          throw ParseError("else needs an opening '{'", close_line, 1);
        *st.else_body = block(false);
        ++pos;  // consume final '}'
      }
      return st;
    }
    if (head == "repeat") {
      st.kind = Stmt::Repeat;
      std::string count_text;
      is >> count_text;
      auto brace = text.rfind('{');
      if (brace == std::string::npos)
        throw ParseError("repeat needs an opening '{'", line, 1);
      try {
        st.count = std::stoull(count_text);
      } catch (...) {
        throw ParseError("repeat needs a constant trip count", line, 1);
      }
      st.then_body = std::make_shared<StmtList>(block(false));
      ++pos;  // consume '}'
      return st;
    }

    // assignment: <name> := <term>  |  <name> := load <term>
    auto assign = text.find(":=");
    if (assign == std::string::npos)
      throw ParseError("unrecognized statement: " + text, line, 1);
    st.name = trim(text.substr(0, assign));
    if (st.name.empty() || st.name.find(' ') != std::string::npos)
      throw ParseError("malformed assignment target", line, 1);
    std::string rhs = trim(text.substr(assign + 2));
    if (rhs.rfind("load", 0) == 0 &&
        (rhs.size() == 4 || rhs[4] == ' ' || rhs[4] == '(')) {
      st.kind = Stmt::Load;
      st.expr = term(trim(rhs.substr(4)), line);
      if (st.expr->is_bool())
        throw ParseError("load address must be a bitvector", line, 1);
      define_var(st.name, 8, line);
      return st;
    }
    st.kind = Stmt::Assign;
    st.expr = term(rhs, line);
    define_var(st.name, st.expr->width, line);
    return st;
  }

  // Splits "TERM TERM" where the first may be parenthesized or atomic.
  static std::pair<std::string, std::string> split_two_terms(
      const std::string& text, int line) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    if (i >= text.size()) throw ParseError("expected two terms", line, 1);
    std::size_t start = i;
    if (text[i] == '(') {
      int depth = 0;
      for (; i < text.size(); ++i) {
        if (text[i] == '(') ++depth;
        if (text[i] == ')' && --depth == 0) {
          ++i;
          break;
        }
      }
    } else {
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])))
        ++i;
    }
    std::string first = text.substr(start, i - start);
    std::string second = trim(text.substr(i));
    if (second.empty()) throw ParseError("expected two terms", line, 1);
    return {first, second};
  }
};

}  // namespace

ToyProgram parse_toy(const std::string& text) {
  LineParser parser;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  ToyProgram program;
  bool saw_stmt = false;

  std::vector<std::pair<int, std::string>> body_lines;
  while (std::getline(is, raw)) {
    ++line_no;
    // '#' opens a comment only when not part of a #x/#b literal: at the line
    // start or followed by whitespace/end.
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '#') continue;
      if (i + 1 >= raw.size() || raw[i + 1] == ' ' || raw[i + 1] == '\t' ||
          raw[i + 1] == '#') {
        raw = raw.substr(0, i);
        break;
      }
    }
    std::string text_line = trim(raw);
    if (text_line.empty()) continue;

    std::istringstream ls(text_line);
    std::string head;
    ls >> head;
    if (head == "input") {
      if (saw_stmt)
        throw ParseError("inputs must precede statements", line_no, 1);
      std::string decl;
      ls >> decl;
      auto colon = decl.find(':');
      if (colon == std::string::npos)
        throw ParseError("input syntax: input name:width", line_no, 1);
      const std::string name = decl.substr(0, colon);
      unsigned width = 0;
      try {
        width = static_cast<unsigned>(std::stoul(decl.substr(colon + 1)));
      } catch (...) {
        throw ParseError("malformed input width", line_no, 1);
      }
      if (width == 0 || width > kMaxWidth)
        throw ParseError("input width must be in [1,64]", line_no, 1);
      if (parser.env.find_input(name))
        throw ParseError("duplicate input: " + name, line_no, 1);
      program.inputs.push_back({name, width});
      parser.env.inputs.push_back({name, width});
      continue;
    }
    if (head == "mem") {
      if (saw_stmt)
        throw ParseError("mem must precede statements", line_no, 1);
      std::string size_text;
      ls >> size_text;
      try {
        program.mem_bytes = std::stoull(size_text);
      } catch (...) {
        throw ParseError("malformed mem size", line_no, 1);
      }
      continue;
    }
    saw_stmt = true;
    body_lines.emplace_back(line_no, text_line);
  }

  parser.lines = std::move(body_lines);
  program.body = parser.block(true);
  return program;
}

namespace {

// Shared walk for concrete execution, symbolic replay and taint: the
// concrete store drives branches and addresses everywhere.
struct Walk {
  const ToyProgram& program;
  Model env;                             // concrete values
  std::vector<Word> memory;              // concrete bytes
  bool do_symbolic = false;
  std::map<std::string, ExprPtr> sym;    // symbolic values per variable
  std::vector<ExprPtr> path;             // taken branch conditions
  std::vector<ExprPtr> sym_memory;       // symbolic bytes
  bool do_taint = false;
  TaintOptions taint_opts;
  std::map<std::string, bool> taint;     // per-variable tags
  std::vector<bool> mem_taint;           // per-byte tags
  std::vector<bool> branch_taint_stack;  // active control-flow tags

  ConcreteTrace trace;
  std::vector<SinkState> sink_states;
  std::vector<SinkTaint> sink_taints;
  bool trapped = false;

  explicit Walk(const ToyProgram& p, const Model& input) : program(p) {
    for (const auto& in : p.inputs) {
      auto it = input.find(in.name);
      if (it == input.end())
        throw EvalError("toy input not assigned: " + in.name);
      env[in.name] = it->second & mask_of(in.width);
      sym[in.name] = mk_var(in.name, in.width);
      taint[in.name] = true;  // inputs are the taint sources
    }
    memory.assign(p.mem_bytes, 0);
    sym_memory.assign(p.mem_bytes, mk_const(0, 8));
    mem_taint.assign(p.mem_bytes, false);
  }

  ExprPtr symbolize(const ExprPtr& e) { return substitute(e, sym); }

  bool expr_taint(const ExprPtr& e) {
    bool t = false;
    for (const auto& v : vars_of(e)) {
      auto it = taint.find(v);
      t = t || (it != taint.end() && it->second);
    }
    return t;
  }

  bool guard_taint() const {
    for (bool t : branch_taint_stack)
      if (t) return true;
    return false;
  }

  // Suppression rules: v := e * 0, v := e - e.
  bool suppressed(const ExprPtr& e) const {
    if (e->op == Op::Mul &&
        (e->args[0]->is_const(0) || e->args[1]->is_const(0)))
      return true;
    if (e->op == Op::Sub && expr_equal(e->args[0], e->args[1])) return true;
    return false;
  }

  void run() { exec_block(program.body); }

  void exec_block(const StmtList& body) {
    for (const auto& st : body) {
      if (trapped) return;
      exec(st);
    }
  }

  void exec(const Stmt& st) {
    trace.executed_lines.push_back(st.line);
    switch (st.kind) {
      case Stmt::Assign: {
        env[st.name] = eval(st.expr, env);
        if (do_symbolic) sym[st.name] = symbolize(st.expr);
        if (do_taint) {
          bool t = expr_taint(st.expr);
          if (taint_opts.suppression && suppressed(st.expr)) t = false;
          if (taint_opts.control_flow) t = t || guard_taint();
          taint[st.name] = t;
        }
        return;
      }
      case Stmt::Load: {
        const Word addr = eval(st.expr, env);
        if (addr >= memory.size()) {
          trap(addr, st.line);
          return;
        }
        env[st.name] = memory[addr];
        if (do_symbolic) sym[st.name] = sym_memory[addr];
        if (do_taint) {
          bool t;
          if (taint_opts.address_overapprox && expr_taint(st.expr)) {
            t = false;
            for (bool cell : mem_taint) t = t || cell;
          } else {
            t = mem_taint[addr];
          }
          if (taint_opts.control_flow) t = t || guard_taint();
          taint[st.name] = t;
        }
        return;
      }
      case Stmt::Store: {
        const Word addr = eval(st.expr, env);
        if (addr >= memory.size()) {
          trap(addr, st.line);
          return;
        }
        memory[addr] = eval(st.value, env);
        if (do_symbolic) sym_memory[addr] = symbolize(st.value);
        if (do_taint) {
          bool t = expr_taint(st.value);
          if (taint_opts.control_flow) t = t || guard_taint();
          if (taint_opts.address_overapprox && expr_taint(st.expr)) {
            for (std::size_t i = 0; i < mem_taint.size(); ++i)
              mem_taint[i] = mem_taint[i] || t;
          } else {
            mem_taint[addr] = t;
          }
        }
        return;
      }
      case Stmt::If: {
        const bool taken = eval(st.expr, env) != 0;
        if (do_symbolic) {
          ExprPtr cond = symbolize(st.expr);
          path.push_back(taken ? cond : mk_not(cond));
        }
        if (do_taint) {
          branch_taint_stack.push_back(expr_taint(st.expr));
          // if (v = const) pins v on the taken branch
          if (taint_opts.suppression && taken && st.expr->op == Op::Eq) {
            const ExprPtr& a = st.expr->args[0];
            const ExprPtr& b = st.expr->args[1];
            if (a->op == Op::Var && b->op == Op::Const) taint[a->name] = false;
            if (b->op == Op::Var && a->op == Op::Const) taint[b->name] = false;
          }
        }
        exec_block(taken ? *st.then_body : *st.else_body);
        if (do_taint) branch_taint_stack.pop_back();
        return;
      }
      case Stmt::Repeat: {
        for (std::uint64_t i = 0; i < st.count && !trapped; ++i)
          exec_block(*st.then_body);
        return;
      }
      case Stmt::Sink: {
        const Word value = eval(st.expr, env);
        trace.sinks.push_back({st.name, value, st.line});
        if (do_symbolic) {
          SinkState ss;
          ss.label = st.name;
          ss.state.inputs = program.inputs;
          ss.state.constraints = path;
          ss.target.expr = symbolize(st.expr);
          ss.target.width = st.expr->width;
          ss.concrete_value = value;
          ss.line = st.line;
          sink_states.push_back(std::move(ss));
        }
        if (do_taint) {
          bool t = expr_taint(st.expr);
          if (taint_opts.control_flow) t = t || guard_taint();
          sink_taints.push_back({st.name, t, st.line});
        }
        return;
      }
    }
  }

  void trap(Word addr, int line) {
    trapped = true;
    trace.trap = Trap{addr, line};
  }
};

}  // namespace

ConcreteTrace execute_concrete(const ToyProgram& program, const Model& input) {
  Walk walk(program, input);
  walk.run();
  walk.trace.final_env = walk.env;
  return walk.trace;
}

std::vector<SinkState> symbolic_single_path(const ToyProgram& program,
                                            const Model& input) {
  Walk walk(program, input);
  walk.do_symbolic = true;
  walk.run();
  return walk.sink_states;
}

std::vector<SinkTaint> taint_propagate(const ToyProgram& program,
                                       const Model& input,
                                       const TaintOptions& options) {
  Walk walk(program, input);
  walk.do_taint = true;
  walk.taint_opts = options;
  walk.run();
  return walk.sink_taints;
}

}  // namespace ctrl::toy
