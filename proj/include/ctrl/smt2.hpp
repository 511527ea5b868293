#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrl/state.hpp"

namespace ctrl {

// Result of parsing an input file. The target is resolved from the
// `; ctrl-target: <name-or-term> width=<w>` annotation line; the optional
// `; ctrl-assume: <term over ctrl.v>` line restricts the analyzed value set.
struct ParsedFile {
  SymState state;
  std::optional<TargetSpec> target;
};

// Parses the supported SMT-LIB2 subset: (set-logic ...), (declare-const ...)
// / (declare-fun name () ...) over (_ BitVec w) sorts, (assert <QF_BV term>),
// (check-sat) and (exit) are tolerated. Array-sorted declarations and asserts
// that touch arrays are kept as passthrough text for external solvers.
// Anything else is rejected with a position-carrying ParseError.
ParsedFile parse_smt2(const std::string& text);

// Parses a single term against the given state's declarations.
ExprPtr parse_smt2_term(const std::string& text, const SymState& state);

// Declarations followed by asserts followed by the extra terms, each
// asserted. Round-trips through parse_smt2.
std::string serialize_smt2(const SymState& state,
                           const std::vector<ExprPtr>& extras = {});

// Full input-file text including the target annotation.
std::string to_file_text(const SymState& state, const TargetSpec& target);

// Serializes the assumption back to the annotation grammar (over ctrl.v).
std::string assumption_to_smt2(const ValueSet& set);

}  // namespace ctrl
