#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sobv/natural.hpp"
#include "sobv/verdict.hpp"

/// Quantified fixed-size bit-vector formulas with binary-encoded scalars.
namespace sobv::bv {

enum class Op {
  Const,
  Var,
  Add,
  Mul,
  Udiv,
  Not,
  And,
  Or,
  Xor,
  Shl,
  Lshr,
  Concat,
  Extract,
  IndexDynamic,
};

std::string_view op_name(Op op);

/// Immutable bit-vector term. Construction never fails; every node carries the
/// width its operator derives from the operands, and check_sorts() decides
/// whether the operands actually fit together.
class Term {
 public:
  static Term constant(Natural value, Natural width);
  static Term var(std::string name, Natural width);
  static Term unary(Op op, Term operand);
  static Term binary(Op op, Term lhs, Term rhs);
  /// Bits hi down to lo, width hi - lo + 1.
  static Term extract(Term operand, Natural hi, Natural lo);
  /// Bit s of t, width 1. Kept as its own node until lower_indexing().
  static Term index(Term t, Term s);

  Op op() const;
  const Natural& width() const;
  /// Variable name. Empty for other nodes.
  const std::string& name() const;
  /// Constant value.
  const Natural& value() const;
  /// Extraction bounds.
  const Natural& hi() const;
  const Natural& lo() const;
  const std::vector<Term>& operands() const;
  const Term& operand(std::size_t i) const { return operands().at(i); }

  friend bool operator==(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

inline Term operator+(Term a, Term b) { return Term::binary(Op::Add, std::move(a), std::move(b)); }
inline Term operator*(Term a, Term b) { return Term::binary(Op::Mul, std::move(a), std::move(b)); }
inline Term operator/(Term a, Term b) { return Term::binary(Op::Udiv, std::move(a), std::move(b)); }
inline Term operator~(Term a) { return Term::unary(Op::Not, std::move(a)); }
inline Term operator&(Term a, Term b) { return Term::binary(Op::And, std::move(a), std::move(b)); }
inline Term operator|(Term a, Term b) { return Term::binary(Op::Or, std::move(a), std::move(b)); }
inline Term operator^(Term a, Term b) { return Term::binary(Op::Xor, std::move(a), std::move(b)); }
inline Term operator<<(Term a, Term b) { return Term::binary(Op::Shl, std::move(a), std::move(b)); }
inline Term operator>>(Term a, Term b) { return Term::binary(Op::Lshr, std::move(a), std::move(b)); }
/// a in the high bits, b in the low bits.
inline Term concat(Term a, Term b) { return Term::binary(Op::Concat, std::move(a), std::move(b)); }

struct Variable {
  std::string name;
  Natural width;

  bool operator==(const Variable&) const = default;
};

enum class FKind { Eq, Ule, Sle, And, Or, Not, Exists, Forall };

class Formula {
 public:
  static Formula eq(Term lhs, Term rhs);
  static Formula ule(Term lhs, Term rhs);
  static Formula sle(Term lhs, Term rhs);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula negate(Formula operand);
  static Formula exists(Variable var, Formula body);
  static Formula forall(Variable var, Formula body);
  static Formula quantifier(bool universal, Variable var, Formula body) {
    return universal ? forall(std::move(var), std::move(body)) : exists(std::move(var), std::move(body));
  }

  FKind kind() const;
  bool is_atom() const { return kind() <= FKind::Sle; }
  bool is_quantifier() const { return kind() == FKind::Exists || kind() == FKind::Forall; }
  /// Operands of an atom.
  const std::vector<Term>& terms() const;
  /// Operands of a connective, or the body of a quantifier.
  const std::vector<Formula>& children() const;
  const Formula& child(std::size_t i) const { return children().at(i); }
  /// Bound variable of a quantifier.
  const Variable& variable() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Structure

struct Binder {
  bool universal = false;
  Variable var;

  bool operator==(const Binder&) const = default;
};

std::vector<Binder> prefix(const Formula& f);
Formula matrix(const Formula& f);
Formula with_prefix(const std::vector<Binder>& binders, Formula body);
/// Prefix quantifiers swapped, matrix negated.
Formula dualize(const Formula& f);

/// Variables occurring free, in order of first occurrence.
std::vector<Variable> free_variables(const Formula& f);

/// Equal up to consistent renaming of bound variables.
bool alpha_equivalent(const Formula& a, const Formula& b);

/// Readable infix rendering, used for diagnostics and the CLI.
std::string to_string(const Term& t);
std::string to_string(const Formula& f);

// ---------------------------------------------------------------------------
// Size

/// Scalar-aware size: constants L(c)+L(n), variables 1+L(n), every operator,
/// predicate and connective 1 plus its operands plus L of each scalar
/// argument, quantifiers |x^[n]| plus the body. Dynamic indexing is measured
/// as its lowering (t >> s)[0].
std::uint64_t formula_size(const Term& t);
std::uint64_t formula_size(const Formula& f);

// ---------------------------------------------------------------------------
// Sorts

struct SortDiagnostic {
  /// Slash-separated route from the root, e.g. "exists x/eq/lhs/bvadd.1".
  std::string path;
  std::string message;
};

/// First sort violation, or nullopt when well-sorted. Covers operand widths,
/// zero widths, constant range, extraction bounds and variables used at two
/// different widths.
std::optional<SortDiagnostic> check_sorts(const Term& t);
std::optional<SortDiagnostic> check_sorts(const Formula& f);

/// Throws SortError carrying the first violation.
void require_well_sorted(const Formula& f);

// ---------------------------------------------------------------------------
// Concrete semantics

/// A concrete bit-vector of a given width; bit 0 is least significant.
class BvValue {
 public:
  BvValue() = default;
  /// value is reduced modulo 2^width.
  BvValue(std::uint64_t width, Natural value);
  /// Bits written most-significant first.
  static BvValue from_bits(std::string_view msb_first);

  std::uint64_t width() const { return width_; }
  const Natural& value() const { return value_; }
  bool bit(std::uint64_t i) const;
  std::string to_bits() const;

  bool operator==(const BvValue&) const = default;

 private:
  std::uint64_t width_ = 1;
  Natural value_ = 0;
};

using Assignment = std::map<std::string, BvValue>;

struct Limits {
  /// Widest node evaluation will touch.
  std::uint64_t max_width = std::uint64_t{1} << 20;
  /// Largest sum of quantified widths the solver expands.
  std::uint64_t bit_budget = 24;
  /// Evaluate with machine words when every width fits in 64 bits.
  bool word_fast_path = true;
};

/// Throws ResourceExceeded past max_width, UnboundSymbolError for a missing
/// variable and SortError when an assigned value has the wrong width.
BvValue eval_term(const Term& t, const Assignment& a, const Limits& limits = {});

/// Quantifier-free formulas only.
bool eval_formula(const Formula& f, const Assignment& a, const Limits& limits = {});

// ---------------------------------------------------------------------------
// Transformations

/// (t >> s)[0]. Throws SortError if the widths differ.
Term lower_index(const Term& t, const Term& s);
/// Replaces every dynamic index node by its shift-and-extract form.
Term lower_indexing(const Term& t);
Formula lower_indexing(const Formula& f);

/// Renames bound variables so that no name is bound twice or also occurs
/// free. First binders keep their names.
Formula rename_apart(const Formula& f);

/// Equivalent prenex formula. Binders are renamed apart, negation flips the
/// quantifiers it crosses, and prefixes of conjuncts are concatenated left
/// then right.
Formula prenex(const Formula& f);

// ---------------------------------------------------------------------------
// Decision procedure

/// Decides a closed formula by expanding every quantifier over all values of
/// its variable, smallest value first. On Sat the witness lists the
/// outermost existential block. Budget violations give ResourceExceeded
/// before any expansion.
Verdict solve(const Formula& f, const Limits& limits = {});

/// Sum of the widths of all quantified variables.
Natural quantified_bits(const Formula& f);

}  // namespace sobv::bv
