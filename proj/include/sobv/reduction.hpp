#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sobv/bv.hpp"
#include "sobv/so2.hpp"

/// Compilation of second-order Boolean formulas into quantified bit-vector
/// formulas. A symbol f of arity n becomes a variable x_f of width 2^n whose
/// bit k is f(b_{n-1},...,b_0) for k = sum of 2^i * b_i.
namespace sobv::reduction {

/// Function symbol to bit-vector variable. Names are "x_" + symbol name, with
/// a numeric suffix when that name is taken.
class SymbolMap {
 public:
  SymbolMap() = default;
  /// Names in `reserved` are never generated.
  explicit SymbolMap(std::set<std::string> reserved) : taken_(std::move(reserved)) {}

  /// Maps every symbol of f, binders in prefix order first, then free
  /// symbols in order of first occurrence.
  static SymbolMap for_formula(const so2::Formula& f);

  /// Adds a symbol; a no-op if it is already present with the same arity.
  const bv::Variable& add(const so2::FunctionSymbol& symbol);

  bool contains(const std::string& symbol) const { return entries_.count(symbol) != 0; }
  const bv::Variable& at(const std::string& symbol) const;
  const so2::FunctionSymbol& symbol(const std::string& symbol) const;
  std::vector<std::string> symbols() const;

 private:
  struct Entry {
    so2::FunctionSymbol symbol;
    bv::Variable var;
  };
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
  std::set<std::string> taken_;
};

/// Width-1 term equal to the matrix under the table encoding. Throws
/// UnboundSymbolError for unmapped symbols and Error for quantifiers.
bv::Term reduce_matrix(const so2::Formula& matrix, const SymbolMap& symbols);

struct Result {
  bv::Formula formula;
  SymbolMap symbols;
};

struct Options {
  bool relax_ordering = false;
};

/// Q1 x_f1 ... Qk x_fk . (matrix^BV = 1^[1]). Dynamic index nodes are left
/// in place; run bv::lower_indexing() before emitting or solving with a tool
/// that lacks them. Throws Error when f is not closed and prenex.
Result reduce(const so2::Formula& f, const Options& options = {});

/// x_f takes the table of f bit for bit.
bv::Assignment interp_to_assignment(const so2::Interpretation& interpretation,
                                    const SymbolMap& symbols);

}  // namespace sobv::reduction
