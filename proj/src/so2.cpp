#include "sobv/so2.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>
#include <sstream>

#include "sobv/errors.hpp"
#include "sobv/natural.hpp"

namespace sobv::so2 {

struct Formula::Node {
  Kind kind;
  FunctionSymbol symbol;
  bool value = false;
  std::vector<Formula> children;
};

Formula Formula::conj(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::And, {}, false, {std::move(lhs), std::move(rhs)}}));
}

Formula Formula::negate(Formula operand) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, false, {std::move(operand)}}));
}

Formula Formula::apply(FunctionSymbol symbol, std::vector<Formula> args) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::Apply, std::move(symbol), false, std::move(args)}));
}

Formula Formula::exists(FunctionSymbol symbol, Formula body) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::Exists, std::move(symbol), false, {std::move(body)}}));
}

Formula Formula::forall(FunctionSymbol symbol, Formula body) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::Forall, std::move(symbol), false, {std::move(body)}}));
}

Formula Formula::literal(bool value) {
  return Formula(std::make_shared<const Node>(Node{Kind::Literal, {}, value, {}}));
}

Formula Formula::disj(Formula lhs, Formula rhs) {
  return negate(conj(negate(std::move(lhs)), negate(std::move(rhs))));
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  return negate(conj(std::move(lhs), negate(std::move(rhs))));
}

Formula Formula::iff(Formula lhs, Formula rhs) {
  return conj(implies(lhs, rhs), implies(rhs, lhs));
}

Kind Formula::kind() const { return node_->kind; }
const FunctionSymbol& Formula::symbol() const { return node_->symbol; }
const std::vector<Formula>& Formula::children() const { return node_->children; }
bool Formula::value() const { return node_->value; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Kind::Literal:
      return a.value() == b.value();
    case Kind::Apply:
    case Kind::Exists:
    case Kind::Forall:
      if (a.symbol() != b.symbol()) return false;
      break;
    default:
      break;
  }
  return a.children() == b.children();
}

std::vector<Quantifier> prefix(const Formula& f) {
  std::vector<Quantifier> out;
  const Formula* cur = &f;
  while (cur->is_quantifier()) {
    out.push_back({cur->kind() == Kind::Forall, cur->symbol()});
    cur = &cur->child(0);
  }
  return out;
}

Formula matrix(const Formula& f) {
  Formula cur = f;
  while (cur.is_quantifier()) cur = cur.child(0);
  return cur;
}

Formula with_prefix(const std::vector<Quantifier>& quantifiers, Formula body) {
  for (auto it = quantifiers.rbegin(); it != quantifiers.rend(); ++it) {
    body = it->universal ? Formula::forall(it->symbol, std::move(body))
                         : Formula::exists(it->symbol, std::move(body));
  }
  return body;
}

Formula dualize(const Formula& f) {
  auto q = prefix(f);
  for (auto& e : q) e.universal = !e.universal;
  return with_prefix(q, Formula::negate(matrix(f)));
}

// ---------------------------------------------------------------------------
// TruthTable

TruthTable::TruthTable(unsigned arity) : arity_(arity) {
  if (arity >= 48) throw ResourceExceeded("truth table of arity " + std::to_string(arity));
  bits_.clear();
  bits_.resize(std::size_t{1} << arity, false);
}

TruthTable TruthTable::from_packed(unsigned arity, std::uint64_t packed) {
  if (arity > 6) throw Error("packed truth tables hold at most arity 6");
  TruthTable t(arity);
  for (std::uint64_t k = 0; k < t.size(); ++k) t.bits_[k] = (packed >> k) & 1U;
  return t;
}

TruthTable TruthTable::from_msb_string(unsigned arity, std::string_view bits) {
  TruthTable t(arity);
  if (bits.size() != t.size()) {
    throw Error("truth table for arity " + std::to_string(arity) + " needs " +
                std::to_string(t.size()) + " bits, got " + std::to_string(bits.size()));
  }
  for (std::size_t i = 0; i < bits.size(); ++i) {
    char c = bits[i];
    if (c != '0' && c != '1') throw Error("truth table bits must be 0 or 1");
    t.bits_[bits.size() - 1 - i] = c == '1';
  }
  return t;
}

std::string TruthTable::to_msb_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t k = 0; k < bits_.size(); ++k) {
    if (bits_[k]) s[bits_.size() - 1 - k] = '1';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok { Ident, Nat, LParen, RParen, Comma, Dot, Colon, Bang, Amp, Pipe, Arrow, DArrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    std::size_t l = line, cc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\'')) {
        ++j;
      }
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, cc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Nat, std::string(src.substr(i, j - i)), l, cc});
      advance(j - i);
      continue;
    }
    if (src.substr(i, 3) == "<->") {
      out.push_back({Tok::DArrow, "<->", l, cc});
      advance(3);
      continue;
    }
    if (src.substr(i, 2) == "->") {
      out.push_back({Tok::Arrow, "->", l, cc});
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Dot; break;
      case ':': k = Tok::Colon; break;
      case '!': k = Tok::Bang; break;
      case '&': k = Tok::Amp; break;
      case '|': k = Tok::Pipe; break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", l, cc);
    }
    out.push_back({k, std::string(1, c), l, cc});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) { return s == "exists" || s == "forall"; }

// Matrix before symbol resolution; keeps source positions for diagnostics.
struct Raw {
  enum class K { Lit, Sym, Not, And, Or, Imp, Iff } kind;
  std::string name;
  bool value = false;
  std::vector<Raw> kids;
  std::size_t line = 0;
  std::size_t column = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  std::vector<Quantifier> quantifiers() {
    std::vector<Quantifier> out;
    while (peek().kind == Tok::Ident && is_keyword(peek().text)) {
      bool universal = next().text == "forall";
      const Token& name = expect(Tok::Ident, "symbol name");
      if (is_keyword(name.text)) fail("keyword used as symbol name", name);
      expect(Tok::Colon, "':'");
      const Token& ar = expect(Tok::Nat, "arity");
      auto arity = parse_decimal(ar.text);
      if (!arity || *arity > 63) fail("arity out of range", ar);
      expect(Tok::Dot, "'.'");
      out.push_back({universal, {name.text, static_cast<unsigned>(*arity)}});
    }
    return out;
  }

  Raw matrix_to_end() {
    Raw r = iff();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'", peek());
    return r;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }

  [[noreturn]] static void fail(const std::string& msg, const Token& at) {
    throw SyntaxError(msg, at.line, at.column);
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) {
      fail(std::string("expected ") + what + (peek().kind == Tok::End ? " at end of input"
                                                                       : ", found '" + peek().text + "'"),
           peek());
    }
    return next();
  }

  static Raw binary(Raw::K k, Raw lhs, Raw rhs, const Token& at) {
    Raw r{k, {}, false, {}, at.line, at.column};
    r.kids.push_back(std::move(lhs));
    r.kids.push_back(std::move(rhs));
    return r;
  }

  Raw iff() {
    Raw lhs = imp();
    while (peek().kind == Tok::DArrow) {
      const Token& op = next();
      lhs = binary(Raw::K::Iff, std::move(lhs), imp(), op);
    }
    return lhs;
  }

  // Implication associates to the right.
  Raw imp() {
    Raw lhs = disj();
    if (peek().kind == Tok::Arrow) {
      const Token& op = next();
      return binary(Raw::K::Imp, std::move(lhs), imp(), op);
    }
    return lhs;
  }

  Raw disj() {
    Raw lhs = conj();
    while (peek().kind == Tok::Pipe) {
      const Token& op = next();
      lhs = binary(Raw::K::Or, std::move(lhs), conj(), op);
    }
    return lhs;
  }

  Raw conj() {
    Raw lhs = unary();
    while (peek().kind == Tok::Amp) {
      const Token& op = next();
      lhs = binary(Raw::K::And, std::move(lhs), unary(), op);
    }
    return lhs;
  }

  Raw unary() {
    if (peek().kind == Tok::Bang) {
      const Token& op = next();
      Raw r{Raw::K::Not, {}, false, {}, op.line, op.column};
      r.kids.push_back(unary());
      return r;
    }
    return atom();
  }

  Raw atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Nat:
        if (t.text != "0" && t.text != "1") fail("only 0 and 1 are literals", t);
        next();
        return Raw{Raw::K::Lit, {}, t.text == "1", {}, t.line, t.column};
      case Tok::LParen: {
        next();
        Raw r = iff();
        expect(Tok::RParen, "')'");
        return r;
      }
      case Tok::Ident: {
        if (is_keyword(t.text)) fail("quantifier inside the matrix; only prenex input is accepted", t);
        next();
        Raw r{Raw::K::Sym, t.text, false, {}, t.line, t.column};
        if (peek().kind == Tok::LParen) {
          next();
          if (peek().kind != Tok::RParen) {
            r.kids.push_back(iff());
            while (peek().kind == Tok::Comma) {
              next();
              r.kids.push_back(iff());
            }
          }
          expect(Tok::RParen, "')' or ','");
        }
        return r;
      }
      default:
        fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'", t);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string where(const Raw& r) {
  return std::to_string(r.line) + ":" + std::to_string(r.column) + ": ";
}

class Resolver {
 public:
  Resolver(const std::vector<Quantifier>& q, const ParseOptions& options) : options_(options) {
    for (const auto& e : q) bound_[e.symbol.name] = e.symbol.arity;
  }

  // Pre-order, so an application's own arity is checked before its arguments.
  Formula resolve(const Raw& r) {
    using K = Raw::K;
    switch (r.kind) {
      case K::Lit:
        return Formula::literal(r.value);
      case K::Not:
        return Formula::negate(resolve(r.kids[0]));
      case K::And:
        return Formula::conj(resolve(r.kids[0]), resolve(r.kids[1]));
      case K::Or:
        return Formula::disj(resolve(r.kids[0]), resolve(r.kids[1]));
      case K::Imp:
        return Formula::implies(resolve(r.kids[0]), resolve(r.kids[1]));
      case K::Iff:
        return Formula::iff(resolve(r.kids[0]), resolve(r.kids[1]));
      case K::Sym:
        break;
    }
    unsigned arity = static_cast<unsigned>(r.kids.size());
    if (auto it = bound_.find(r.name); it != bound_.end()) {
      if (it->second != arity) {
        throw ArityError(where(r) + "symbol '" + r.name + "' has arity " +
                         std::to_string(it->second) + " but is applied to " +
                         std::to_string(arity) + " argument(s)");
      }
    } else if (auto ft = free_.find(r.name); ft != free_.end()) {
      if (ft->second != arity) {
        throw ArityError(where(r) + "free symbol '" + r.name + "' used with arity " +
                         std::to_string(ft->second) + " and " + std::to_string(arity));
      }
    } else if (options_.allow_free_symbols) {
      free_[r.name] = arity;
    } else {
      throw UnboundSymbolError(where(r) + "symbol '" + r.name + "' is not bound by any quantifier");
    }
    std::vector<Formula> args;
    args.reserve(r.kids.size());
    for (const auto& k : r.kids) args.push_back(resolve(k));
    return Formula::apply({r.name, arity}, std::move(args));
  }

 private:
  const ParseOptions& options_;
  std::map<std::string, unsigned> bound_;
  std::map<std::string, unsigned> free_;
};

}  // namespace

Formula parse(std::string_view text, const ParseOptions& options) {
  Parser p(text);
  auto q = p.quantifiers();
  Raw m = p.matrix_to_end();
  Resolver r(q, options);
  return with_prefix(q, r.resolve(m));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(const Formula& f, std::ostream& os, bool parenthesize_and) {
  switch (f.kind()) {
    case Kind::Literal:
      os << (f.value() ? '1' : '0');
      return;
    case Kind::Not:
      os << '!';
      print(f.child(0), os, true);
      return;
    case Kind::And:
      if (parenthesize_and) os << '(';
      print(f.child(0), os, false);
      os << " & ";
      print(f.child(1), os, true);
      if (parenthesize_and) os << ')';
      return;
    case Kind::Apply:
      os << f.symbol().name;
      if (!f.children().empty()) {
        os << '(';
        for (std::size_t i = 0; i < f.children().size(); ++i) {
          if (i) os << ", ";
          print(f.child(i), os, false);
        }
        os << ')';
      }
      return;
    case Kind::Exists:
    case Kind::Forall:
      os << '(';
      os << (f.kind() == Kind::Exists ? "exists " : "forall ") << f.symbol().name << ':'
         << f.symbol().arity << " . ";
      print(f.child(0), os, false);
      os << ')';
      return;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream os;
  for (const auto& q : prefix(f)) {
    os << (q.universal ? "forall " : "exists ") << q.symbol.name << ':' << q.symbol.arity << " . ";
  }
  print(matrix(f), os, false);
  return os.str();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_matrix(const Formula& f, std::map<std::string, unsigned>& bound,
                  std::set<std::string>& reported, std::vector<Diagnostic>& out) {
  switch (f.kind()) {
    case Kind::Literal:
      return;
    case Kind::Exists:
    case Kind::Forall: {
      out.push_back({Diagnostic::Code::QuantifierInMatrix, false,
                     "quantifier over '" + f.symbol().name + "' inside the matrix"});
      auto saved = bound;
      bound[f.symbol().name] = f.symbol().arity;
      check_matrix(f.child(0), bound, reported, out);
      bound = std::move(saved);
      return;
    }
    case Kind::Apply: {
      const auto& s = f.symbol();
      if (s.arity != f.children().size()) {
        out.push_back({Diagnostic::Code::ArityMismatch, false,
                       "'" + s.name + "' declared with arity " + std::to_string(s.arity) +
                           " applied to " + std::to_string(f.children().size()) + " argument(s)"});
      }
      auto it = bound.find(s.name);
      if (it == bound.end()) {
        if (reported.insert(s.name).second) {
          out.push_back({Diagnostic::Code::FreeSymbol, false, "free symbol '" + s.name + "'"});
        }
      } else if (it->second != s.arity) {
        out.push_back({Diagnostic::Code::ArityMismatch, false,
                       "'" + s.name + "' bound with arity " + std::to_string(it->second) +
                           " but used with arity " + std::to_string(s.arity)});
      }
      break;
    }
    default:
      break;
  }
  for (const auto& c : f.children()) check_matrix(c, bound, reported, out);
}

}  // namespace

std::vector<Diagnostic> validate_prenex_closed(const Formula& f, const ValidateOptions& options) {
  std::vector<Diagnostic> out;
  std::map<std::string, unsigned> bound;
  bool seen_proposition = false;
  for (const auto& q : prefix(f)) {
    if (bound.count(q.symbol.name)) {
      out.push_back({Diagnostic::Code::DuplicateBinder, false,
                     "'" + q.symbol.name + "' is quantified more than once"});
    }
    bound[q.symbol.name] = q.symbol.arity;
    if (q.symbol.is_proposition()) {
      seen_proposition = true;
    } else if (seen_proposition) {
      out.push_back({Diagnostic::Code::OrderingViolation, options.relax_ordering,
                     "proper function '" + q.symbol.name +
                         "' is quantified after a proposition"});
    }
  }
  std::set<std::string> reported;
  check_matrix(matrix(f), bound, reported, out);
  return out;
}

bool passes(const std::vector<Diagnostic>& diagnostics) {
  return std::all_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.warning; });
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

constexpr unsigned kMaxEnumerableArity = 6;

// Formula flattened into an array with every symbol occurrence resolved to a
// table slot. Slots are mutated during quantifier enumeration, so one instance
// serves one evaluation.
class Machine {
 public:
  Machine(const Formula& f, const Interpretation& interp, const Limits& limits)
      : interp_(interp), limits_(limits) {
    root_ = compile(f);
  }

  bool run() { return value(root_); }

  // Slots are allocated in binder order, so the outermost quantifiers own the
  // lowest slots.
  TruthTable table(std::size_t slot) const {
    const auto& s = slots_[slot];
    TruthTable t(s.arity);
    for (std::uint64_t k = 0; k < t.size(); ++k) t.set(k, (s.words[k >> 6] >> (k & 63)) & 1U);
    return t;
  }

 private:
  enum class Op { And, Not, Apply, Exists, Forall, Lit };
  struct Node {
    Op op;
    std::size_t slot = 0;
    bool value = false;
    std::vector<std::size_t> kids;
  };
  struct Slot {
    unsigned arity;
    std::vector<std::uint64_t> words;
  };

  std::size_t compile(const Formula& f) {
    Node n{};
    switch (f.kind()) {
      case Kind::Literal:
        n.op = Op::Lit;
        n.value = f.value();
        break;
      case Kind::Not:
        n.op = Op::Not;
        break;
      case Kind::And:
        n.op = Op::And;
        break;
      case Kind::Exists:
      case Kind::Forall: {
        const auto& s = f.symbol();
        if (s.arity > limits_.max_quantified_arity || s.arity > kMaxEnumerableArity) {
          throw ResourceExceeded("quantified symbol '" + s.name + "' has arity " +
                                 std::to_string(s.arity) + ", cap is " +
                                 std::to_string(std::min(limits_.max_quantified_arity,
                                                         kMaxEnumerableArity)));
        }
        n.op = f.kind() == Kind::Exists ? Op::Exists : Op::Forall;
        n.slot = slots_.size();
        slots_.push_back({s.arity, {0}});
        scope_[s.name].push_back(n.slot);
        n.kids.push_back(compile(f.child(0)));
        scope_[s.name].pop_back();
        nodes_.push_back(std::move(n));
        return nodes_.size() - 1;
      }
      case Kind::Apply:
        n.op = Op::Apply;
        n.slot = lookup(f);
        break;
    }
    for (const auto& c : f.children()) n.kids.push_back(compile(c));
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::size_t lookup(const Formula& f) {
    const auto& s = f.symbol();
    if (s.arity != f.children().size()) {
      throw ArityError("'" + s.name + "' has arity " + std::to_string(s.arity) + " but " +
                       std::to_string(f.children().size()) + " argument(s)");
    }
    if (auto it = scope_.find(s.name); it != scope_.end() && !it->second.empty()) {
      std::size_t slot = it->second.back();
      if (slots_[slot].arity != s.arity) {
        throw ArityError("'" + s.name + "' bound with arity " +
                         std::to_string(slots_[slot].arity) + " used with arity " +
                         std::to_string(s.arity));
      }
      return slot;
    }
    if (auto it = free_.find(s.name); it != free_.end()) return it->second;
    auto it = interp_.find(s.name);
    if (it == interp_.end()) throw UnboundSymbolError("no interpretation for '" + s.name + "'");
    const TruthTable& t = it->second;
    if (t.arity() != s.arity) {
      throw ArityError("interpretation of '" + s.name + "' has arity " +
                       std::to_string(t.arity()) + ", formula uses " + std::to_string(s.arity));
    }
    Slot slot{t.arity(), std::vector<std::uint64_t>((t.size() + 63) / 64, 0)};
    for (std::uint64_t k = 0; k < t.size(); ++k) {
      if (t.at(k)) slot.words[k >> 6] |= std::uint64_t{1} << (k & 63);
    }
    slots_.push_back(std::move(slot));
    free_[s.name] = slots_.size() - 1;
    return slots_.size() - 1;
  }

  bool value(std::size_t i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Lit:
        return n.value;
      case Op::Not:
        return !value(n.kids[0]);
      case Op::And:
        return value(n.kids[0]) && value(n.kids[1]);
      case Op::Apply: {
        // Leftmost argument is the most significant index bit.
        std::uint64_t index = 0;
        for (std::size_t k : n.kids) index = (index << 1) | (value(k) ? 1U : 0U);
        return (slots_[n.slot].words[index >> 6] >> (index & 63)) & 1U;
      }
      case Op::Exists:
      case Op::Forall: {
        bool want = n.op == Op::Exists;
        unsigned entries = 1U << slots_[n.slot].arity;
        std::uint64_t last = entries == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << entries) - 1;
        std::uint64_t& table = slots_[n.slot].words[0];
        for (std::uint64_t v = 0;; ++v) {
          table = v;
          // The slot keeps the deciding table, which is the witness.
          if (value(n.kids[0]) == want) return want;
          if (v == last) break;
        }
        return !want;
      }
    }
    return false;
  }

  const Interpretation& interp_;
  const Limits& limits_;
  std::vector<Node> nodes_;
  std::vector<Slot> slots_;
  std::map<std::string, std::vector<std::size_t>> scope_;
  std::map<std::string, std::size_t> free_;
  std::size_t root_ = 0;
};

}  // namespace

bool eval(const Formula& f, const Interpretation& interpretation, const Limits& limits) {
  Machine m(f, interpretation, limits);
  return m.run();
}

std::uint64_t quantified_bits(const Formula& f) {
  std::uint64_t total = 0;
  auto add = [&](unsigned arity) {
    std::uint64_t bits = arity >= 63 ? std::numeric_limits<std::uint64_t>::max()
                                     : std::uint64_t{1} << arity;
    total = total > std::numeric_limits<std::uint64_t>::max() - bits
                ? std::numeric_limits<std::uint64_t>::max()
                : total + bits;
  };
  auto walk = [&](const Formula& g, auto& self) -> void {
    if (g.is_quantifier()) add(g.symbol().arity);
    for (const auto& c : g.children()) self(c, self);
  };
  walk(f, walk);
  return total;
}

Verdict decide_bruteforce(const Formula& f, const Limits& limits) {
  auto diags = validate_prenex_closed(f, {limits.relax_ordering});
  if (!passes(diags)) {
    std::string msg = "formula is not a closed prenex formula:";
    for (const auto& d : diags) {
      if (!d.warning) msg += " " + d.message + ";";
    }
    throw Error(msg);
  }
  Verdict v;
  std::uint64_t bits = quantified_bits(f);
  if (bits > limits.bit_budget) {
    v.status = Status::ResourceExceeded;
    v.diagnostic = "quantified tables need " + std::to_string(bits) + " bits, budget is " +
                   std::to_string(limits.bit_budget);
    return v;
  }
  Interpretation none;
  try {
    Machine m(f, none, limits);
    bool sat = m.run();
    v.status = sat ? Status::Sat : Status::Unsat;
    if (sat) {
      std::size_t slot = 0;
      for (const auto& q : prefix(f)) {
        if (q.universal) break;
        v.witness.push_back({q.symbol.name, m.table(slot++).to_msb_string()});
      }
    }
  } catch (const ResourceExceeded& e) {
    v.status = Status::ResourceExceeded;
    v.diagnostic = e.what();
  }
  return v;
}

std::uint64_t formula_size(const Formula& f) {
  std::uint64_t n = 1;
  if (f.is_quantifier()) n += scalar_length(f.symbol().arity);
  for (const auto& c : f.children()) n += formula_size(c);
  return n;
}

}  // namespace sobv::so2
