#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctrl/state.hpp"

namespace ctrl {

enum class Status { Sat, Unsat, Unknown };

struct Verdict {
  Status status = Status::Unknown;
  Model model;
  std::string reason;

  static Verdict sat(Model m) { return {Status::Sat, std::move(m), ""}; }
  static Verdict unsat() { return {Status::Unsat, {}, ""}; }
  static Verdict unknown(std::string why) {
    return {Status::Unknown, {}, std::move(why)};
  }
};

struct OptResult {
  Status status = Status::Unknown;
  Word value = 0;
  // Best bound reached before a timeout/unknown, when any progress was made.
  std::optional<Word> best_bound;
  std::string reason;
};

struct ScResult {
  enum Kind { Proved, Counterexample, Unknown } kind = Unknown;
  Word witness = 0;
  std::string reason;
};

enum class Backend { Internal, External };
enum class OptMode { Native, BinarySearch };

struct SolverConfig {
  Backend backend = Backend::Internal;
  std::string command;  // external backend process command line
  int timeout_ms = 300000;
  unsigned enum_budget_bits = 20;
  OptMode opt_mode = OptMode::Native;
};

struct SolverStats {
  std::uint64_t sat_queries = 0;
  std::uint64_t opt_queries = 0;
  std::uint64_t quantified_queries = 0;
  std::uint64_t unknowns = 0;
};

// Uniform query interface. Each instance is single-owner: one in-flight
// query at a time; run concurrent analyses on separate instances.
class Solver {
 public:
  virtual ~Solver() = default;

  // Sat with a genuine model (validated by evaluation where possible),
  // unsat only when no model exists. Failures surface as Unknown.
  virtual Verdict check_sat(const SymState& state) = 0;

  // Feasible extremum of the target. Unknown(reason="unsat") for
  // unsatisfiable states; best_bound carries partial progress.
  virtual OptResult minimize(const SymState& state, const ExprPtr& target) = 0;
  virtual OptResult maximize(const SymState& state, const ExprPtr& target) = 0;

  // Proved when every value of `assumption` is feasible for the target;
  // otherwise one infeasible witness from the set.
  virtual ScResult sc_counterexample(const SymState& state,
                                     const ExprPtr& target,
                                     const ValueSet& assumption) = 0;

  // (mask, bits) such that every feasible target value v satisfies
  // v & mask == bits, extracted from a two-duplicate agreement query.
  // nullopt when the query is unsat or unknown.
  virtual std::optional<FixedBits> solve_fixed_bits(const SymState& state,
                                                    const ExprPtr& target,
                                                    unsigned width) = 0;

  // Exact sorted feasible value list. Internal backend only.
  virtual std::vector<Word> enumerate_feasible(const SymState& state,
                                               const ExprPtr& target) = 0;

  const SolverStats& stats() const { return stats_; }
  const SolverConfig& config() const { return config_; }

 protected:
  explicit Solver(SolverConfig config) : config_(std::move(config)) {}
  SolverConfig config_;
  SolverStats stats_;
};

std::unique_ptr<Solver> make_solver(const SolverConfig& config);

// Model evaluation of an expression (deterministic, modular semantics).
inline Word eval_model(const Model& model, const ExprPtr& expr) {
  return eval(expr, model);
}

// Generic binary-search optimization on top of any check_sat implementation:
// at most ceil(log2 |Dom|) + 1 sat queries, each conjoining a half-range
// bound on the target.
OptResult binary_search_opt(Solver& solver, const SymState& state,
                            const ExprPtr& target, bool maximize);

}  // namespace ctrl
