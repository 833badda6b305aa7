#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sobv/verdict.hpp"

/// Second-order Boolean logic: quantified Boolean formulas extended with
/// quantification over Boolean function symbols.
namespace sobv::so2 {

struct FunctionSymbol {
  std::string name;
  unsigned arity = 0;

  bool is_proposition() const { return arity == 0; }
  bool operator==(const FunctionSymbol&) const = default;
};

enum class Kind { And, Not, Apply, Exists, Forall, Literal };

/// Immutable formula handle. Copies share structure.
///
/// Children are exposed uniformly through children(): two operands for And,
/// one for Not, the arguments for Apply (leftmost first) and the body for the
/// quantifiers.
class Formula {
 public:
  static Formula conj(Formula lhs, Formula rhs);
  static Formula negate(Formula operand);
  static Formula apply(FunctionSymbol symbol, std::vector<Formula> args);
  static Formula exists(FunctionSymbol symbol, Formula body);
  static Formula forall(FunctionSymbol symbol, Formula body);
  static Formula literal(bool value);

  // Sugar, expanded into And/Not at construction.
  static Formula disj(Formula lhs, Formula rhs);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula iff(Formula lhs, Formula rhs);

  Kind kind() const;
  /// Applied or bound symbol. Only meaningful for Apply, Exists and Forall.
  const FunctionSymbol& symbol() const;
  const std::vector<Formula>& children() const;
  const Formula& child(std::size_t i) const { return children().at(i); }
  /// Only meaningful for Literal.
  bool value() const;

  bool is_quantifier() const { return kind() == Kind::Exists || kind() == Kind::Forall; }

  /// Structural equality.
  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Quantifier {
  bool universal = false;
  FunctionSymbol symbol;

  bool operator==(const Quantifier&) const = default;
};

/// Leading quantifiers of f, outermost first.
std::vector<Quantifier> prefix(const Formula& f);
/// f with its leading quantifiers stripped.
Formula matrix(const Formula& f);
/// Rebuilds prefix + matrix.
Formula with_prefix(const std::vector<Quantifier>& quantifiers, Formula body);
/// The formula with every prefix quantifier swapped and the matrix negated.
Formula dualize(const Formula& f);

/// Truth table of a Boolean function. Entry k holds f(b_{n-1},...,b_0) where
/// k = sum of 2^i * b_i.
class TruthTable {
 public:
  TruthTable() = default;
  /// All-zeros table.
  explicit TruthTable(unsigned arity);
  /// Table whose entry k is bit k of `packed`. Requires arity <= 6.
  static TruthTable from_packed(unsigned arity, std::uint64_t packed);
  /// Bits written most-significant entry first, e.g. "10010110" for arity 3
  /// puts f(1,1,1) first. Throws Error if the length is not 2^arity.
  static TruthTable from_msb_string(unsigned arity, std::string_view bits);

  unsigned arity() const { return arity_; }
  std::uint64_t size() const { return bits_.size(); }
  bool at(std::uint64_t index) const { return bits_.at(index); }
  void set(std::uint64_t index, bool v) { bits_.at(index) = v; }
  std::string to_msb_string() const;

  bool operator==(const TruthTable&) const = default;

 private:
  unsigned arity_ = 0;
  std::vector<bool> bits_ = std::vector<bool>(1, false);
};

using Interpretation = std::map<std::string, TruthTable>;

// ---------------------------------------------------------------------------
// Surface syntax

struct ParseOptions {
  /// Accept symbols that no quantifier binds. Their arity is fixed by their
  /// first use.
  bool allow_free_symbols = false;
};

/// Parses the `.so2` text format. Throws SyntaxError, ArityError or
/// UnboundSymbolError.
Formula parse(std::string_view text, const ParseOptions& options = {});

/// Prints f in the `.so2` text format; parse(to_string(f)) == f.
std::string to_string(const Formula& f);

// ---------------------------------------------------------------------------
// Validation

struct Diagnostic {
  enum class Code {
    FreeSymbol,
    QuantifierInMatrix,
    OrderingViolation,
    DuplicateBinder,
    ArityMismatch,
  };
  Code code;
  bool warning = false;
  std::string message;
};

struct ValidateOptions {
  /// Report "proper function quantified after a proposition" as a warning
  /// instead of an error.
  bool relax_ordering = false;
};

/// Checks that f is closed, prenex, free of shadowing and that proper
/// functions are quantified before propositions.
std::vector<Diagnostic> validate_prenex_closed(const Formula& f,
                                               const ValidateOptions& options = {});

/// True when none of the diagnostics is an error.
bool passes(const std::vector<Diagnostic>& diagnostics);

// ---------------------------------------------------------------------------
// Semantics

struct Limits {
  /// Largest arity a quantified symbol may have.
  unsigned max_quantified_arity = 4;
  /// Largest sum of 2^arity over all quantified symbols.
  std::uint64_t bit_budget = 24;
  bool relax_ordering = false;
};

/// Value of f under I. Quantifiers enumerate every table of their symbol.
/// Throws ResourceExceeded when a quantified arity exceeds the cap and
/// UnboundSymbolError when a symbol is neither bound nor in I.
bool eval(const Formula& f, const Interpretation& interpretation, const Limits& limits = {});

/// Decides a closed prenex formula by exhaustive search. Tables are tried in
/// increasing packed order, so the witness for the outermost existential
/// block is the least one.
Verdict decide_bruteforce(const Formula& f, const Limits& limits = {});

/// Sum of 2^arity over every quantifier in f.
std::uint64_t quantified_bits(const Formula& f);

/// Size measure: literals and propositions count 1, connectives and
/// applications 1 plus their operands, quantifiers 1 + L(arity) plus body.
std::uint64_t formula_size(const Formula& f);

}  // namespace sobv::so2
