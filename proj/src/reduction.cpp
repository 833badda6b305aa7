#include "sobv/reduction.hpp"

#include "sobv/errors.hpp"

namespace sobv::reduction {

namespace {

void collect_symbols(const so2::Formula& f, std::vector<so2::FunctionSymbol>& out) {
  if (f.kind() == so2::Kind::Apply) out.push_back(f.symbol());
  for (const auto& c : f.children()) collect_symbols(c, out);
}

}  // namespace

SymbolMap SymbolMap::for_formula(const so2::Formula& f) {
  SymbolMap m;
  for (const auto& q : so2::prefix(f)) m.add(q.symbol);
  std::vector<so2::FunctionSymbol> used;
  collect_symbols(so2::matrix(f), used);
  for (const auto& s : used) {
    if (!m.contains(s.name)) m.add(s);
  }
  return m;
}

const bv::Variable& SymbolMap::add(const so2::FunctionSymbol& symbol) {
  if (auto it = entries_.find(symbol.name); it != entries_.end()) {
    if (it->second.symbol.arity != symbol.arity) {
      throw ArityError("symbol '" + symbol.name + "' mapped with arity " +
                       std::to_string(it->second.symbol.arity) + " and " +
                       std::to_string(symbol.arity));
    }
    return it->second.var;
  }
  std::string name = "x_" + symbol.name;
  for (std::size_t k = 1; taken_.count(name); ++k) {
    name = "x_" + symbol.name + "_" + std::to_string(k);
  }
  taken_.insert(name);
  order_.push_back(symbol.name);
  auto [it, _] = entries_.emplace(symbol.name, Entry{symbol, {name, pow2(symbol.arity)}});
  return it->second.var;
}

const bv::Variable& SymbolMap::at(const std::string& symbol) const {
  auto it = entries_.find(symbol);
  if (it == entries_.end()) throw UnboundSymbolError("symbol '" + symbol + "' has no variable");
  return it->second.var;
}

const so2::FunctionSymbol& SymbolMap::symbol(const std::string& symbol) const {
  auto it = entries_.find(symbol);
  if (it == entries_.end()) throw UnboundSymbolError("symbol '" + symbol + "' has no variable");
  return it->second.symbol;
}

std::vector<std::string> SymbolMap::symbols() const { return order_; }

bv::Term reduce_matrix(const so2::Formula& f, const SymbolMap& symbols) {
  using so2::Kind;
  switch (f.kind()) {
    case Kind::Literal:
      return bv::Term::constant(f.value() ? 1 : 0, 1);
    case Kind::And:
      return reduce_matrix(f.child(0), symbols) & reduce_matrix(f.child(1), symbols);
    case Kind::Not:
      return ~reduce_matrix(f.child(0), symbols);
    case Kind::Exists:
    case Kind::Forall:
      throw Error("quantifier over '" + f.symbol().name + "' inside the matrix");
    case Kind::Apply:
      break;
  }
  const auto& s = f.symbol();
  const bv::Variable& x = symbols.at(s.name);
  if (symbols.symbol(s.name).arity != s.arity || f.children().size() != s.arity) {
    throw ArityError("'" + s.name + "' applied with the wrong number of arguments");
  }
  if (s.arity == 0) return bv::Term::var(x.name, 1);

  // Index term 0^[2^n - n] . rho_{n-1} . ... . rho_0, nested to the right.
  const auto& args = f.children();
  bv::Term index = reduce_matrix(args.back(), symbols);
  for (std::size_t i = args.size() - 1; i-- > 0;) {
    index = bv::concat(reduce_matrix(args[i], symbols), std::move(index));
  }
  Natural padding = x.width - s.arity;
  index = bv::concat(bv::Term::constant(0, padding), std::move(index));
  return bv::Term::index(bv::Term::var(x.name, x.width), std::move(index));
}

Result reduce(const so2::Formula& f, const Options& options) {
  auto diags = so2::validate_prenex_closed(f, {options.relax_ordering});
  if (!so2::passes(diags)) {
    std::string msg = "reduction needs a closed prenex formula:";
    for (const auto& d : diags) {
      if (!d.warning) msg += " " + d.message + ";";
    }
    throw Error(msg);
  }
  SymbolMap symbols = SymbolMap::for_formula(f);
  bv::Term body = reduce_matrix(so2::matrix(f), symbols);
  bv::Formula out = bv::Formula::eq(std::move(body), bv::Term::constant(1, 1));
  auto q = so2::prefix(f);
  for (auto it = q.rbegin(); it != q.rend(); ++it) {
    out = bv::Formula::quantifier(it->universal, symbols.at(it->symbol.name), std::move(out));
  }
  return {std::move(out), std::move(symbols)};
}

bv::Assignment interp_to_assignment(const so2::Interpretation& interpretation,
                                    const SymbolMap& symbols) {
  bv::Assignment a;
  for (const auto& name : symbols.symbols()) {
    auto it = interpretation.find(name);
    if (it == interpretation.end()) {
      throw UnboundSymbolError("interpretation has no table for '" + name + "'");
    }
    const auto& table = it->second;
    const auto& var = symbols.at(name);
    if (table.arity() != symbols.symbol(name).arity || Natural(table.size()) != var.width) {
      throw SortError("table for '" + name + "' has " + std::to_string(table.size()) +
                      " entries but " + var.name + " has width " + to_decimal(var.width));
    }
    Natural value = 0;
    for (std::uint64_t k = 0; k < table.size(); ++k) {
      if (table.at(k)) boost::multiprecision::bit_set(value, static_cast<unsigned>(k));
    }
    a.emplace(var.name, bv::BvValue(table.size(), std::move(value)));
  }
  return a;
}

}  // namespace sobv::reduction
