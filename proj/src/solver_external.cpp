#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>

#include "ctrl/smt2.hpp"
#include "ctrl/solver.hpp"

namespace ctrl {

// Defined in state.cpp via duplicate(); this variant also avoids extra names
// (needed when a query stacks several duplicates).
std::pair<SymState, TargetSpec> duplicate_avoiding(
    const SymState& s, const TargetSpec& t,
    const std::set<std::string>& avoid);

namespace {

struct ProcessResult {
  bool launched = false;
  bool timed_out = false;
  int exit_code = -1;
  std::string output;
};

// One query per process: writes the text to stdin, reads stdout to EOF.
ProcessResult run_process(const std::string& command, const std::string& input,
                          int timeout_ms) {
  ProcessResult result;
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0) return result;
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    return result;
  }

  pid_t pid = fork();
  if (pid < 0) return result;
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  result.launched = true;

  std::size_t written = 0;
  while (written < input.size()) {
    ssize_t n =
        write(in_pipe[1], input.data() + written, input.size() - written);
    if (n <= 0) break;
    written += static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  int waited = 0;
  std::string out;
  char buf[4096];
  for (;;) {
    struct pollfd pfd{out_pipe[0], POLLIN, 0};
    const int step = 50;
    int r = poll(&pfd, 1, step);
    if (r > 0) {
      ssize_t n = read(out_pipe[0], buf, sizeof buf);
      if (n > 0) {
        out.append(buf, static_cast<std::size_t>(n));
        continue;
      }
      break;  // EOF
    }
    waited += step;
    if (timeout_ms > 0 && waited >= timeout_ms) {
      result.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
  }
  close(out_pipe[0]);
  int status = 0;
  waitpid(pid, &status, 0);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.output = std::move(out);
  return result;
}

// Minimal reader for solver responses: a status word followed by optional
// ((name value) ...) blocks from get-value.
struct ResponseReader {
  std::string status;
  std::map<std::string, Word> values;

  static std::optional<Word> parse_value(const std::string& tok) {
    if (tok.rfind("#x", 0) == 0) {
      Word v = 0;
      for (char c : tok.substr(2)) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
        else return std::nullopt;
        v = (v << 4) | static_cast<Word>(d);
      }
      return v;
    }
    if (tok.rfind("#b", 0) == 0) {
      Word v = 0;
      for (char c : tok.substr(2)) {
        if (c != '0' && c != '1') return std::nullopt;
        v = (v << 1) | static_cast<Word>(c - '0');
      }
      return v;
    }
    if (tok == "true") return 1;
    if (tok == "false") return 0;
    return std::nullopt;
  }

  bool parse(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == ';') {
        while (i < text.size() && text[i] != '\n') ++i;
        continue;
      }
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) {
          tokens.push_back(cur);
          cur.clear();
        }
        if (c == '(' || c == ')') tokens.push_back(std::string(1, c));
        continue;
      }
      cur.push_back(c);
    }
    if (!cur.empty()) tokens.push_back(cur);
    if (tokens.empty()) return false;

    std::size_t i = 0;
    status = tokens[i++];
    if (status != "sat" && status != "unsat" && status != "unknown")
      return false;
    // Remaining: value pairs in any parenthesized nesting; recognize the
    // pattern `( name value )` and `( name ( _ bvN w ) )`.
    while (i < tokens.size()) {
      if (tokens[i] == "(" && i + 1 < tokens.size() && tokens[i + 1] != "(" &&
          tokens[i + 1] != ")") {
        const std::string name = tokens[i + 1];
        const std::size_t j = i + 2;
        if (j + 4 < tokens.size() && tokens[j] == "(" && tokens[j + 1] == "_" &&
            tokens[j + 2].rfind("bv", 0) == 0 && tokens[j + 4] == ")") {
          // ( name ( _ bvN w ) )
          Word v = 0;
          bool ok = !tokens[j + 2].substr(2).empty();
          for (char c : tokens[j + 2].substr(2)) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
              ok = false;
              break;
            }
            v = v * 10 + static_cast<Word>(c - '0');
          }
          if (ok) {
            values[name] = v;
            i = j + 5;
            continue;
          }
        } else if (j < tokens.size()) {
          if (auto v = parse_value(tokens[j])) {
            values[name] = *v;
            i = j + 1;
            continue;
          }
        }
      }
      ++i;
    }
    return true;
  }
};

std::string fresh_name(const SymState& state, const std::string& base) {
  std::string name = base;
  unsigned k = 0;
  while (state.find_input(name) || state.is_array_name(name))
    name = base + std::to_string(++k);
  return name;
}

class ExternalSolver final : public Solver {
 public:
  explicit ExternalSolver(SolverConfig config) : Solver(std::move(config)) {
    if (config_.command.empty()) {
      const char* env = std::getenv("CTRL_SOLVER_CMD");
      if (env) config_.command = env;
    }
    if (config_.command.empty())
      throw Error("external backend needs a solver command "
                  "(--solver-cmd or CTRL_SOLVER_CMD)");
  }

  Verdict check_sat(const SymState& state) override {
    ++stats_.sat_queries;
    std::ostringstream q;
    q << serialize_smt2(state);
    q << "(check-sat)\n";
    if (!state.inputs.empty()) {
      q << "(get-value (";
      for (std::size_t i = 0; i < state.inputs.size(); ++i) {
        if (i) q << " ";
        q << state.inputs[i].name;
      }
      q << "))\n";
    }
    auto resp = run(q.str());
    if (!resp) return fail("solver process failure or timeout");
    if (resp->status == "unsat") return Verdict::unsat();
    if (resp->status != "sat") return fail("solver returned unknown");

    Model model;
    for (const auto& in : state.inputs) {
      auto it = resp->values.find(in.name);
      if (it == resp->values.end())
        return fail("model is missing " + in.name);
      model[in.name] = it->second & mask_of(in.width);
    }
    // Guard against wire-format slips: a claimed model must evaluate true.
    if (!state.has_arrays()) {
      for (const auto& c : state.constraints)
        if (!eval(c, model)) return fail("model validation failed");
    }
    return Verdict::sat(std::move(model));
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
    const std::string y = fresh_name(state, "ctrl.y");
    ExprPtr yv = mk_var(y, assumption.width);

    std::ostringstream q;
    q << "(set-logic " << (state.has_arrays() ? "ABV" : "BV") << ")\n";
    q << "(declare-const " << y << " (_ BitVec " << assumption.width << "))\n";
    q << "(assert " << to_smt2(assumption.membership(yv)) << ")\n";
    q << "(assert " << quantified_infeasibility(state, target, yv) << ")\n";
    q << "(check-sat)\n(get-value (" << y << "))\n";

    auto resp = run(q.str());
    if (!resp) {
      ++stats_.unknowns;
      return {ScResult::Unknown, 0, "solver process failure or timeout"};
    }
    if (resp->status == "unsat") return {ScResult::Proved, 0, ""};
    if (resp->status != "sat") {
      ++stats_.unknowns;
      return {ScResult::Unknown, 0, "solver returned unknown"};
    }
    auto it = resp->values.find(y);
    if (it == resp->values.end()) {
      ++stats_.unknowns;
      return {ScResult::Unknown, 0, "counterexample extraction failed"};
    }
    return {ScResult::Counterexample, it->second & mask_of(assumption.width), ""};
  }

  std::optional<FixedBits> solve_fixed_bits(const SymState& state,
                                            const ExprPtr& target,
                                            unsigned width) override {
    ++stats_.quantified_queries;
    std::set<std::string> avoid;
    TargetSpec tspec{target, width, std::nullopt, 0};
    auto [dup1, t1] = duplicate_avoiding(state, tspec, avoid);
    for (const auto& in : dup1.inputs) avoid.insert(in.name);
    for (const auto& [n, s] : dup1.array_decls) avoid.insert(n);
    auto [dup2, t2] = duplicate_avoiding(state, tspec, avoid);

    const std::string mask_name = fresh_name(state, "ctrl.mask");
    const std::string bits_name = fresh_name(state, "ctrl.bits");

    std::ostringstream q;
    q << "(set-logic " << (state.has_arrays() ? "ABV" : "BV") << ")\n";
    auto decls = [&](const SymState& s) {
      for (const auto& in : s.inputs)
        q << "(declare-const " << in.name << " (_ BitVec " << in.width << "))\n";
      for (const auto& [n, sort] : s.array_decls)
        q << "(declare-const " << n << " " << sort << ")\n";
    };
    decls(state);
    decls(dup1);
    decls(dup2);
    q << "(declare-const " << mask_name << " (_ BitVec " << width << "))\n";
    q << "(declare-const " << bits_name << " (_ BitVec " << width << "))\n";
    auto asserts = [&](const SymState& s) {
      for (const auto& c : s.constraints) q << "(assert " << to_smt2(c) << ")\n";
      for (const auto& raw : s.array_asserts) q << "(assert " << raw << ")\n";
    };
    asserts(state);
    asserts(dup1);
    asserts(dup2);
    q << "(assert (= " << mask_name << " (bvnot (bvxor " << to_smt2(t1.expr)
      << " " << to_smt2(t2.expr) << "))))\n";
    q << "(assert (= " << bits_name << " (bvand " << to_smt2(t1.expr) << " "
      << to_smt2(t2.expr) << ")))\n";
    // No feasible value may violate the candidate pattern.
    ExprPtr mv = mk_var(mask_name, width);
    ExprPtr bv = mk_var(bits_name, width);
    q << "(assert " << quantified_pattern_bound(state, target, mv, bv) << ")\n";
    q << "(check-sat)\n(get-value (" << mask_name << " " << bits_name << "))\n";

    auto resp = run(q.str());
    if (!resp || resp->status == "unknown") {
      ++stats_.unknowns;
      return std::nullopt;
    }
    if (resp->status == "unsat") return std::nullopt;
    auto mi = resp->values.find(mask_name);
    auto bi = resp->values.find(bits_name);
    if (mi == resp->values.end() || bi == resp->values.end()) {
      ++stats_.unknowns;
      return std::nullopt;
    }
    return FixedBits{mi->second & mask_of(width), bi->second & mask_of(width)};
  }

  std::vector<Word> enumerate_feasible(const SymState&, const ExprPtr&) override {
    throw UnsupportedError("enumeration requires the internal backend");
  }

 private:
  Verdict fail(std::string why) {
    ++stats_.unknowns;
    return Verdict::unknown(std::move(why));
  }

  std::optional<ResponseReader> run(const std::string& query) {
    ProcessResult r = run_process(config_.command, query, config_.timeout_ms);
    if (!r.launched || r.timed_out) return std::nullopt;
    ResponseReader reader;
    if (!reader.parse(r.output)) return std::nullopt;
    return reader;
  }

  OptResult optimize(const SymState& state, const ExprPtr& target,
                     bool want_max) {
    ++stats_.opt_queries;
    if (config_.opt_mode == OptMode::BinarySearch)
      return binary_search_opt(*this, state, target, want_max);

    const std::string obj = fresh_name(state, "ctrl.obj");
    std::ostringstream q;
    q << serialize_smt2(state);
    q << "(define-fun " << obj << " () (_ BitVec " << target->width << ") "
      << to_smt2(target) << ")\n";
    q << "(" << (want_max ? "maximize" : "minimize") << " " << obj << ")\n";
    q << "(check-sat)\n(get-value (" << obj << "))\n";
    auto resp = run(q.str());
    if (!resp) {
      ++stats_.unknowns;
      return {Status::Unknown, 0, std::nullopt, "solver process failure or timeout"};
    }
    if (resp->status == "unsat")
      return {Status::Unknown, 0, std::nullopt, "unsat"};
    if (resp->status != "sat") {
      ++stats_.unknowns;
      return {Status::Unknown, 0, std::nullopt, "solver returned unknown"};
    }
    auto it = resp->values.find(obj);
    if (it == resp->values.end()) {
      ++stats_.unknowns;
      return {Status::Unknown, 0, std::nullopt, "objective extraction failed"};
    }
    return {Status::Sat, it->second & mask_of(target->width), std::nullopt, ""};
  }

  // (forall (inputs... arrays...) (=> constraints (distinct target y)))
  std::string quantified_infeasibility(const SymState& state,
                                       const ExprPtr& target,
                                       const ExprPtr& yv) {
    std::ostringstream os;
    os << "(forall (";
    bool first = true;
    for (const auto& in : state.inputs) {
      if (!first) os << " ";
      first = false;
      os << "(" << in.name << " (_ BitVec " << in.width << "))";
    }
    for (const auto& [n, sort] : state.array_decls) {
      if (!first) os << " ";
      first = false;
      os << "(" << n << " " << sort << ")";
    }
    os << ") (=> " << conj_text(state) << " (distinct " << to_smt2(target)
       << " " << to_smt2(yv) << ")))";
    return os.str();
  }

  std::string quantified_pattern_bound(const SymState& state,
                                       const ExprPtr& target,
                                       const ExprPtr& mask,
                                       const ExprPtr& bits) {
    std::ostringstream os;
    os << "(forall (";
    bool first = true;
    for (const auto& in : state.inputs) {
      if (!first) os << " ";
      first = false;
      os << "(" << in.name << " (_ BitVec " << in.width << "))";
    }
    for (const auto& [n, sort] : state.array_decls) {
      if (!first) os << " ";
      first = false;
      os << "(" << n << " " << sort << ")";
    }
    os << ") (=> " << conj_text(state) << " (= (bvand " << to_smt2(target)
       << " " << to_smt2(mask) << ") " << to_smt2(bits) << ")))";
    return os.str();
  }

  std::string conj_text(const SymState& state) {
    std::vector<std::string> parts;
    for (const auto& c : state.constraints) parts.push_back(to_smt2(c));
    for (const auto& raw : state.array_asserts) parts.push_back(raw);
    if (parts.empty()) return "true";
    if (parts.size() == 1) return parts[0];
    std::string out = "(and";
    for (const auto& p : parts) out += " " + p;
    return out + ")";
  }
};

}  // namespace

std::unique_ptr<Solver> make_external_solver(const SolverConfig& config) {
  return std::make_unique<ExternalSolver>(config);
}

}  // namespace ctrl
