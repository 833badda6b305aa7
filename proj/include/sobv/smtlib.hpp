#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <vector>

#include "sobv/bv.hpp"

/// SMT-LIB 2 text for quantified bit-vector formulas: a printer, a parser for
/// the printed subset, and a runner for external solvers.
namespace sobv::smtlib {

struct EmittedScript {
  std::string text;
  std::string logic;
  /// Quantified variables in binder order, followed by free variables.
  std::vector<bv::Variable> declarations;
};

/// Constants up to this width print as #b literals, wider ones as (_ bvN w).
inline constexpr std::uint64_t kMaxBinaryLiteralWidth = 4096;

/// Prints one script: set-logic BV, a declare-const per free variable, a
/// single assert and check-sat. Leading quantifiers go one per line, two
/// spaces deeper each. Throws Error for unlowered dynamic index nodes and
/// SortError for ill-sorted input.
EmittedScript emit_smt2(const bv::Formula& f);

/// Parses the subset emit_smt2 produces: set-logic, set-info, set-option,
/// declare-const, nullary declare-fun, assert (several are conjoined),
/// check-sat and exit. Throws SyntaxError for anything else and SortError for
/// ill-sorted assertions.
bv::Formula parse_smt2(std::string_view text);

struct SolverConfig {
  std::string executable;
  std::vector<std::string> arguments;
  std::chrono::milliseconds timeout{10000};
};

struct ExternalVerdict {
  enum class Result { Sat, Unsat, Unknown, Error };
  Result result = Result::Error;
  std::string solver;
  std::chrono::milliseconds wall_time{0};
  std::string diagnostic;
};

std::string_view to_string(ExternalVerdict::Result r);

/// Writes the script to a temporary file and runs `executable arguments...
/// file`. The first non-empty stdout line must read sat, unsat or unknown;
/// anything else is Error. A timeout kills the process and yields Unknown.
ExternalVerdict run_external_solver(const EmittedScript& script, const SolverConfig& config);

}  // namespace sobv::smtlib
