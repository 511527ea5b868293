#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ctrl/state.hpp"

namespace ctrl::toy {

// Line-oriented IR: one statement per line, blocks braced.
//
//   input <name>:<width>
//   mem <bytes>
//   <name> := <smt2-term>
//   <name> := load <smt2-term>
//   store <smt2-term> <smt2-term>      ; address, byte value
//   if <smt2-term> { ... } else { ... }
//   repeat <count> { ... }
//   sink <label> <smt2-term>
//
// Terms use SMT-LIB2 syntax over inputs and previously assigned variables.
// Memory is a flat byte array of the declared size; loads of never-written
// cells read zero.

struct Stmt;
using StmtList = std::vector<Stmt>;

struct Stmt {
  enum Kind { Assign, Load, Store, If, Repeat, Sink } kind;
  std::string name;      // Assign/Load target, Sink label
  ExprPtr expr;          // Assign value, Load/Store address, If condition, Sink expr
  ExprPtr value;         // Store value
  std::uint64_t count = 0;  // Repeat
  std::shared_ptr<StmtList> then_body;
  std::shared_ptr<StmtList> else_body;
  int line = 0;
};

struct ToyProgram {
  std::vector<Input> inputs;
  std::size_t mem_bytes = 0;
  StmtList body;
};

ToyProgram parse_toy(const std::string& text);

struct SinkValue {
  std::string label;
  Word value;
  int line;
};

struct Trap {
  Word address;
  int line;
};

struct ConcreteTrace {
  std::vector<int> executed_lines;
  Model final_env;
  std::vector<SinkValue> sinks;
  std::optional<Trap> trap;  // out-of-range memory access ends the run
};

// Deterministic big-step execution; requires every input assigned.
ConcreteTrace execute_concrete(const ToyProgram& program, const Model& input);

struct SinkState {
  std::string label;
  SymState state;      // branch conditions along the replayed path
  TargetSpec target;   // sink expression over the inputs
  Word concrete_value;
  int line;
};

// Replays the concrete path with symbolic inputs; branch conditions are
// conjoined as taken and memory addresses follow the concrete replay. The
// triggering input satisfies every emitted state.
std::vector<SinkState> symbolic_single_path(const ToyProgram& program,
                                            const Model& input);

struct TaintOptions {
  bool control_flow = false;     // branch condition taints guarded writes
  bool address_overapprox = false;  // tainted address taints whole memory
  bool suppression = false;      // e*0, e-e, if (v = const) clear taint
};

struct SinkTaint {
  std::string label;
  bool tainted;
  int line;
};

// Tag propagation along the concrete path; inputs are the sources.
std::vector<SinkTaint> taint_propagate(const ToyProgram& program,
                                       const Model& input,
                                       const TaintOptions& options);

}  // namespace ctrl::toy
