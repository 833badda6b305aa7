#include "sobv/bv.hpp"

#include <limits>
#include <set>
#include <sstream>

#include "sobv/errors.hpp"

namespace sobv::bv {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "var";
    case Op::Add: return "bvadd";
    case Op::Mul: return "bvmul";
    case Op::Udiv: return "bvudiv";
    case Op::Not: return "bvnot";
    case Op::And: return "bvand";
    case Op::Or: return "bvor";
    case Op::Xor: return "bvxor";
    case Op::Shl: return "bvshl";
    case Op::Lshr: return "bvlshr";
    case Op::Concat: return "concat";
    case Op::Extract: return "extract";
    case Op::IndexDynamic: return "index";
  }
  return "?";
}

namespace {

std::string_view fkind_name(FKind k) {
  switch (k) {
    case FKind::Eq: return "=";
    case FKind::Ule: return "bvule";
    case FKind::Sle: return "bvsle";
    case FKind::And: return "and";
    case FKind::Or: return "or";
    case FKind::Not: return "not";
    case FKind::Exists: return "exists";
    case FKind::Forall: return "forall";
  }
  return "?";
}

bool is_binary(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Mul:
    case Op::Udiv:
    case Op::And:
    case Op::Or:
    case Op::Xor:
    case Op::Shl:
    case Op::Lshr:
    case Op::Concat:
      return true;
    default:
      return false;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Term

struct Term::Node {
  Op op;
  Natural width;
  std::string name;
  Natural value;
  Natural hi;
  Natural lo;
  std::vector<Term> kids;
};

Term Term::constant(Natural value, Natural width) {
  return Term(std::make_shared<const Node>(
      Node{Op::Const, std::move(width), {}, std::move(value), 0, 0, {}}));
}

Term Term::var(std::string name, Natural width) {
  return Term(std::make_shared<const Node>(Node{Op::Var, std::move(width), std::move(name), 0, 0, 0, {}}));
}

Term Term::unary(Op op, Term operand) {
  if (op != Op::Not) throw Error(std::string(op_name(op)) + " is not a unary operator");
  Natural w = operand.width();
  return Term(std::make_shared<const Node>(Node{op, std::move(w), {}, 0, 0, 0, {std::move(operand)}}));
}

Term Term::binary(Op op, Term lhs, Term rhs) {
  if (!is_binary(op)) throw Error(std::string(op_name(op)) + " is not a binary operator");
  Natural w = op == Op::Concat ? Natural(lhs.width() + rhs.width()) : lhs.width();
  return Term(std::make_shared<const Node>(
      Node{op, std::move(w), {}, 0, 0, 0, {std::move(lhs), std::move(rhs)}}));
}

Term Term::extract(Term operand, Natural hi, Natural lo) {
  Natural w = hi >= lo ? Natural(hi - lo + 1) : Natural(0);
  return Term(std::make_shared<const Node>(
      Node{Op::Extract, std::move(w), {}, 0, std::move(hi), std::move(lo), {std::move(operand)}}));
}

Term Term::index(Term t, Term s) {
  return Term(std::make_shared<const Node>(
      Node{Op::IndexDynamic, 1, {}, 0, 0, 0, {std::move(t), std::move(s)}}));
}

Op Term::op() const { return node_->op; }
const Natural& Term::width() const { return node_->width; }
const std::string& Term::name() const { return node_->name; }
const Natural& Term::value() const { return node_->value; }
const Natural& Term::hi() const { return node_->hi; }
const Natural& Term::lo() const { return node_->lo; }
const std::vector<Term>& Term::operands() const { return node_->kids; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.op == y.op && x.width == y.width && x.name == y.name && x.value == y.value &&
         x.hi == y.hi && x.lo == y.lo && x.kids == y.kids;
}

// ---------------------------------------------------------------------------
// Formula

struct Formula::Node {
  FKind kind;
  std::vector<Term> terms;
  std::vector<Formula> kids;
  Variable var;
};

Formula Formula::eq(Term lhs, Term rhs) {
  return Formula(std::make_shared<const Node>(Node{FKind::Eq, {std::move(lhs), std::move(rhs)}, {}, {}}));
}
Formula Formula::ule(Term lhs, Term rhs) {
  return Formula(std::make_shared<const Node>(Node{FKind::Ule, {std::move(lhs), std::move(rhs)}, {}, {}}));
}
Formula Formula::sle(Term lhs, Term rhs) {
  return Formula(std::make_shared<const Node>(Node{FKind::Sle, {std::move(lhs), std::move(rhs)}, {}, {}}));
}
Formula Formula::conj(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{FKind::And, {}, {std::move(lhs), std::move(rhs)}, {}}));
}
Formula Formula::disj(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{FKind::Or, {}, {std::move(lhs), std::move(rhs)}, {}}));
}
Formula Formula::negate(Formula operand) {
  return Formula(std::make_shared<const Node>(Node{FKind::Not, {}, {std::move(operand)}, {}}));
}
Formula Formula::exists(Variable var, Formula body) {
  return Formula(std::make_shared<const Node>(Node{FKind::Exists, {}, {std::move(body)}, std::move(var)}));
}
Formula Formula::forall(Variable var, Formula body) {
  return Formula(std::make_shared<const Node>(Node{FKind::Forall, {}, {std::move(body)}, std::move(var)}));
}

FKind Formula::kind() const { return node_->kind; }
const std::vector<Term>& Formula::terms() const { return node_->terms; }
const std::vector<Formula>& Formula::children() const { return node_->kids; }
const Variable& Formula::variable() const { return node_->var; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  return a.kind() == b.kind() && a.variable() == b.variable() && a.terms() == b.terms() &&
         a.children() == b.children();
}

// ---------------------------------------------------------------------------
// Structure

std::vector<Binder> prefix(const Formula& f) {
  std::vector<Binder> out;
  const Formula* cur = &f;
  while (cur->is_quantifier()) {
    out.push_back({cur->kind() == FKind::Forall, cur->variable()});
    cur = &cur->child(0);
  }
  return out;
}

Formula matrix(const Formula& f) {
  Formula cur = f;
  while (cur.is_quantifier()) cur = cur.child(0);
  return cur;
}

Formula with_prefix(const std::vector<Binder>& binders, Formula body) {
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
    body = Formula::quantifier(it->universal, it->var, std::move(body));
  }
  return body;
}

Formula dualize(const Formula& f) {
  auto p = prefix(f);
  for (auto& b : p) b.universal = !b.universal;
  return with_prefix(p, Formula::negate(matrix(f)));
}

namespace {

void collect_free(const Term& t, const std::multiset<std::string>& bound, std::set<std::string>& seen,
                  std::vector<Variable>& out) {
  if (t.op() == Op::Var) {
    if (!bound.count(t.name()) && seen.insert(t.name()).second) out.push_back({t.name(), t.width()});
    return;
  }
  for (const auto& k : t.operands()) collect_free(k, bound, seen, out);
}

void collect_free(const Formula& f, std::multiset<std::string>& bound, std::set<std::string>& seen,
                  std::vector<Variable>& out) {
  for (const auto& t : f.terms()) collect_free(t, bound, seen, out);
  if (f.is_quantifier()) {
    auto it = bound.insert(f.variable().name);
    collect_free(f.child(0), bound, seen, out);
    bound.erase(it);
    return;
  }
  for (const auto& c : f.children()) collect_free(c, bound, seen, out);
}

void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.op() == Op::Var) out.insert(t.name());
  for (const auto& k : t.operands()) collect_names(k, out);
}

void collect_names(const Formula& f, std::set<std::string>& out) {
  if (f.is_quantifier()) out.insert(f.variable().name);
  for (const auto& t : f.terms()) collect_names(t, out);
  for (const auto& c : f.children()) collect_names(c, out);
}

}  // namespace

std::vector<Variable> free_variables(const Formula& f) {
  std::vector<Variable> out;
  std::multiset<std::string> bound;
  std::set<std::string> seen;
  collect_free(f, bound, seen, out);
  return out;
}

namespace {

class AlphaEq {
 public:
  bool formula(const Formula& a, const Formula& b) {
    if (a.kind() != b.kind()) return false;
    if (a.is_quantifier()) {
      if (a.variable().width != b.variable().width) return false;
      std::size_t id = next_id_++;
      left_[a.variable().name].push_back(id);
      right_[b.variable().name].push_back(id);
      bool r = formula(a.child(0), b.child(0));
      left_[a.variable().name].pop_back();
      right_[b.variable().name].pop_back();
      return r;
    }
    if (a.terms().size() != b.terms().size() || a.children().size() != b.children().size()) return false;
    for (std::size_t i = 0; i < a.terms().size(); ++i) {
      if (!term(a.terms()[i], b.terms()[i])) return false;
    }
    for (std::size_t i = 0; i < a.children().size(); ++i) {
      if (!formula(a.child(i), b.child(i))) return false;
    }
    return true;
  }

  bool term(const Term& a, const Term& b) {
    if (a.op() != b.op() || a.width() != b.width()) return false;
    switch (a.op()) {
      case Op::Const:
        return a.value() == b.value();
      case Op::Var: {
        auto ia = lookup(left_, a.name());
        auto ib = lookup(right_, b.name());
        if (ia || ib) return ia == ib;
        return a.name() == b.name();
      }
      case Op::Extract:
        if (a.hi() != b.hi() || a.lo() != b.lo()) return false;
        break;
      default:
        break;
    }
    for (std::size_t i = 0; i < a.operands().size(); ++i) {
      if (!term(a.operand(i), b.operand(i))) return false;
    }
    return true;
  }

 private:
  using Env = std::map<std::string, std::vector<std::size_t>>;
  static std::optional<std::size_t> lookup(const Env& env, const std::string& name) {
    auto it = env.find(name);
    if (it == env.end() || it->second.empty()) return std::nullopt;
    return it->second.back();
  }
  Env left_;
  Env right_;
  std::size_t next_id_ = 0;
};

}  // namespace

bool alpha_equivalent(const Formula& a, const Formula& b) { return AlphaEq().formula(a, b); }

namespace {

void print(const Term& t, std::ostream& os) {
  auto infix = [&](const char* sym) {
    os << '(';
    print(t.operand(0), os);
    os << ' ' << sym << ' ';
    print(t.operand(1), os);
    os << ')';
  };
  switch (t.op()) {
    case Op::Const:
      os << t.value() << "^[" << t.width() << ']';
      return;
    case Op::Var:
      os << t.name();
      return;
    case Op::Add: infix("+"); return;
    case Op::Mul: infix("*"); return;
    case Op::Udiv: infix("/"); return;
    case Op::And: infix("&"); return;
    case Op::Or: infix("|"); return;
    case Op::Xor: infix("^"); return;
    case Op::Shl: infix("<<"); return;
    case Op::Lshr: infix(">>"); return;
    case Op::Not:
      os << '~';
      print(t.operand(0), os);
      return;
    case Op::Concat: {
      // Concatenation is associative; print the whole chain flat.
      std::vector<const Term*> parts;
      auto flatten = [&](const Term& u, auto& self) -> void {
        if (u.op() == Op::Concat) {
          self(u.operand(0), self);
          self(u.operand(1), self);
        } else {
          parts.push_back(&u);
        }
      };
      flatten(t, flatten);
      os << '(';
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) os << " . ";
        print(*parts[i], os);
      }
      os << ')';
      return;
    }
    case Op::Extract:
      print(t.operand(0), os);
      os << '[' << t.hi() << ':' << t.lo() << ']';
      return;
    case Op::IndexDynamic:
      print(t.operand(0), os);
      os << '[';
      print(t.operand(1), os);
      os << ']';
      return;
  }
}

void print(const Formula& f, std::ostream& os) {
  auto atom = [&](const char* sym) {
    os << '(';
    print(f.terms()[0], os);
    os << ' ' << sym << ' ';
    print(f.terms()[1], os);
    os << ')';
  };
  switch (f.kind()) {
    case FKind::Eq: atom("="); return;
    case FKind::Ule: atom("<=u"); return;
    case FKind::Sle: atom("<=s"); return;
    case FKind::And:
    case FKind::Or:
      os << '(';
      print(f.child(0), os);
      os << (f.kind() == FKind::And ? " && " : " || ");
      print(f.child(1), os);
      os << ')';
      return;
    case FKind::Not:
      os << '!';
      print(f.child(0), os);
      return;
    case FKind::Exists:
    case FKind::Forall:
      os << (f.kind() == FKind::Exists ? "exists " : "forall ") << f.variable().name << ':'
         << f.variable().width << " . ";
      print(f.child(0), os);
      return;
  }
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print(t, os);
  return os.str();
}

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print(f, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Size

std::uint64_t formula_size(const Term& t) {
  switch (t.op()) {
    case Op::Const:
      return scalar_length(t.value()) + scalar_length(t.width());
    case Op::Var:
      return 1 + scalar_length(t.width());
    case Op::Extract:
      return 1 + formula_size(t.operand(0)) + scalar_length(t.hi()) + scalar_length(t.lo());
    case Op::IndexDynamic:
      // extract(bvlshr(t, s), 0, 0)
      return 1 + (1 + formula_size(t.operand(0)) + formula_size(t.operand(1))) + 2 * scalar_length(0);
    default: {
      std::uint64_t n = 1;
      for (const auto& k : t.operands()) n += formula_size(k);
      return n;
    }
  }
}

std::uint64_t formula_size(const Formula& f) {
  if (f.is_quantifier()) {
    return 1 + scalar_length(f.variable().width) + formula_size(f.child(0));
  }
  std::uint64_t n = 1;
  for (const auto& t : f.terms()) n += formula_size(t);
  for (const auto& c : f.children()) n += formula_size(c);
  return n;
}

// ---------------------------------------------------------------------------
// Sorts

namespace {

class SortChecker {
 public:
  std::optional<SortDiagnostic> term(const Term& t, const std::string& parent) {
    std::string path = parent + "/" + std::string(op_name(t.op()));
    if (t.op() == Op::Var) path = parent + "/" + t.name();
    auto fail = [&](std::string msg) { return SortDiagnostic{path, std::move(msg)}; };
    for (std::size_t i = 0; i < t.operands().size(); ++i) {
      if (auto d = term(t.operand(i), path + (t.operands().size() > 1 ? "." + std::to_string(i) : "")))
        return d;
    }
    switch (t.op()) {
      case Op::Const:
        if (t.width() < 1) return fail("constant width must be at least 1");
        if (t.value() < 0 || (t.value() > 0 && scalar_length(t.value()) > t.width())) {
          return fail("constant " + to_decimal(t.value()) + " does not fit in " +
                      to_decimal(t.width()) + " bits");
        }
        break;
      case Op::Var:
        if (t.width() < 1) return fail("variable '" + t.name() + "' has width 0");
        if (auto it = bound_.find(t.name()); it != bound_.end() && !it->second.empty()) {
          if (it->second.back() != t.width()) {
            return fail("variable '" + t.name() + "' is bound at width " +
                        to_decimal(it->second.back()) + " but used at width " + to_decimal(t.width()));
          }
        } else if (auto [ft, inserted] = free_.emplace(t.name(), t.width()); !inserted && ft->second != t.width()) {
          return fail("free variable '" + t.name() + "' used at widths " + to_decimal(ft->second) +
                      " and " + to_decimal(t.width()));
        }
        break;
      case Op::Not:
      case Op::Concat:
        break;
      case Op::Extract:
        if (t.hi() < t.lo()) {
          return fail("extract upper bound " + to_decimal(t.hi()) + " is below lower bound " +
                      to_decimal(t.lo()));
        }
        if (t.hi() >= t.operand(0).width()) {
          return fail("extract bound " + to_decimal(t.hi()) + " out of range for width " +
                      to_decimal(t.operand(0).width()));
        }
        break;
      default:
        if (t.operand(0).width() != t.operand(1).width()) {
          return fail("width mismatch: " + to_decimal(t.operand(0).width()) + " vs " +
                      to_decimal(t.operand(1).width()));
        }
        break;
    }
    return std::nullopt;
  }

  std::optional<SortDiagnostic> formula(const Formula& f, const std::string& parent) {
    std::string path = parent.empty() ? std::string(fkind_name(f.kind()))
                                      : parent + "/" + std::string(fkind_name(f.kind()));
    if (f.is_quantifier()) {
      const auto& v = f.variable();
      path += " " + v.name;
      if (v.width < 1) return SortDiagnostic{path, "quantified variable '" + v.name + "' has width 0"};
      bound_[v.name].push_back(v.width);
      auto d = formula(f.child(0), path);
      bound_[v.name].pop_back();
      return d;
    }
    for (std::size_t i = 0; i < f.terms().size(); ++i) {
      if (auto d = term(f.terms()[i], path + "." + std::to_string(i))) return d;
    }
    if (f.is_atom() && f.terms()[0].width() != f.terms()[1].width()) {
      return SortDiagnostic{path, "width mismatch: " + to_decimal(f.terms()[0].width()) + " vs " +
                                      to_decimal(f.terms()[1].width())};
    }
    for (std::size_t i = 0; i < f.children().size(); ++i) {
      if (auto d = formula(f.child(i), path + (f.children().size() > 1 ? "." + std::to_string(i) : "")))
        return d;
    }
    return std::nullopt;
  }

 private:
  std::map<std::string, std::vector<Natural>> bound_;
  std::map<std::string, Natural> free_;
};

}  // namespace

std::optional<SortDiagnostic> check_sorts(const Term& t) { return SortChecker().term(t, ""); }
std::optional<SortDiagnostic> check_sorts(const Formula& f) { return SortChecker().formula(f, ""); }

void require_well_sorted(const Formula& f) {
  if (auto d = check_sorts(f)) throw SortError(d->path + ": " + d->message);
}

// ---------------------------------------------------------------------------
// Concrete semantics

namespace {

Natural mask_of(std::uint64_t width) { return pow2(width) - 1; }

}  // namespace

BvValue::BvValue(std::uint64_t width, Natural value) : width_(width), value_(std::move(value)) {
  if (width_ == 0) throw Error("bit-vector values need width >= 1");
  Natural m = pow2(width_);
  if (value_ < 0 || value_ >= m) {
    value_ %= m;
    if (value_ < 0) value_ += m;
  }
}

BvValue BvValue::from_bits(std::string_view msb_first) {
  if (msb_first.empty()) throw Error("empty bit string");
  Natural v = 0;
  for (char c : msb_first) {
    if (c != '0' && c != '1') throw Error("bit strings contain only 0 and 1");
    v <<= 1;
    if (c == '1') v |= 1;
  }
  return BvValue(msb_first.size(), v);
}

bool BvValue::bit(std::uint64_t i) const {
  return i < width_ && boost::multiprecision::bit_test(value_, static_cast<unsigned>(i));
}

std::string BvValue::to_bits() const {
  std::string s(width_, '0');
  for (std::uint64_t i = 0; i < width_; ++i) {
    if (bit(i)) s[width_ - 1 - i] = '1';
  }
  return s;
}

namespace {

std::uint64_t checked_width(const Term& t, const Limits& limits) {
  auto w = to_u64(t.width());
  if (!w || *w > limits.max_width) {
    throw ResourceExceeded("width " + to_decimal(t.width()) + " exceeds the evaluation cap of " +
                           std::to_string(limits.max_width));
  }
  if (*w == 0) throw SortError("zero-width term");
  return *w;
}

Natural eval_natural(const Term& t, const Assignment& a, const Limits& limits) {
  std::uint64_t n = checked_width(t, limits);
  auto arg = [&](std::size_t i) { return eval_natural(t.operand(i), a, limits); };
  switch (t.op()) {
    case Op::Const:
      return t.value() & mask_of(n);
    case Op::Var: {
      auto it = a.find(t.name());
      if (it == a.end()) throw UnboundSymbolError("no value for variable '" + t.name() + "'");
      if (it->second.width() != n) {
        throw SortError("variable '" + t.name() + "' has width " + std::to_string(n) +
                        " but is assigned a " + std::to_string(it->second.width()) + "-bit value");
      }
      return it->second.value();
    }
    case Op::Add:
      return (arg(0) + arg(1)) & mask_of(n);
    case Op::Mul:
      return (arg(0) * arg(1)) & mask_of(n);
    case Op::Udiv: {
      Natural d = arg(1);
      if (d == 0) return mask_of(n);
      return arg(0) / d;
    }
    case Op::Not:
      return arg(0) ^ mask_of(n);
    case Op::And:
      return arg(0) & arg(1);
    case Op::Or:
      return arg(0) | arg(1);
    case Op::Xor:
      return arg(0) ^ arg(1);
    case Op::Shl: {
      Natural s = arg(1);
      if (s >= n) return 0;
      return (arg(0) << static_cast<unsigned>(s)) & mask_of(n);
    }
    case Op::Lshr: {
      Natural s = arg(1);
      if (s >= n) return 0;
      return arg(0) >> static_cast<unsigned>(s);
    }
    case Op::Concat: {
      std::uint64_t low = checked_width(t.operand(1), limits);
      return ((arg(0) << static_cast<unsigned>(low)) | arg(1)) & mask_of(n);
    }
    case Op::Extract: {
      checked_width(t.operand(0), limits);
      Natural v = arg(0);
      if (t.lo() >= t.operand(0).width()) return 0;
      return (v >> static_cast<unsigned>(t.lo())) & mask_of(n);
    }
    case Op::IndexDynamic: {
      std::uint64_t m = checked_width(t.operand(0), limits);
      Natural s = arg(1);
      if (s >= m) return 0;
      return (arg(0) >> static_cast<unsigned>(s)) & 1;
    }
  }
  return 0;
}

Natural flip_sign(const Natural& v, std::uint64_t width) { return v ^ pow2(width - 1); }

}  // namespace

BvValue eval_term(const Term& t, const Assignment& a, const Limits& limits) {
  Natural v = eval_natural(t, a, limits);
  return BvValue(checked_width(t, limits), std::move(v));
}

bool eval_formula(const Formula& f, const Assignment& a, const Limits& limits) {
  switch (f.kind()) {
    case FKind::Eq:
      return eval_natural(f.terms()[0], a, limits) == eval_natural(f.terms()[1], a, limits);
    case FKind::Ule:
      return eval_natural(f.terms()[0], a, limits) <= eval_natural(f.terms()[1], a, limits);
    case FKind::Sle: {
      std::uint64_t n = checked_width(f.terms()[0], limits);
      return flip_sign(eval_natural(f.terms()[0], a, limits), n) <=
             flip_sign(eval_natural(f.terms()[1], a, limits), n);
    }
    case FKind::And:
      return eval_formula(f.child(0), a, limits) && eval_formula(f.child(1), a, limits);
    case FKind::Or:
      return eval_formula(f.child(0), a, limits) || eval_formula(f.child(1), a, limits);
    case FKind::Not:
      return !eval_formula(f.child(0), a, limits);
    case FKind::Exists:
    case FKind::Forall:
      break;
  }
  throw Error("eval_formula expects a quantifier-free formula; use solve() for quantifiers");
}

// ---------------------------------------------------------------------------
// Transformations

Term lower_index(const Term& t, const Term& s) {
  if (t.width() != s.width()) {
    throw SortError("dynamic index operands differ in width: " + to_decimal(t.width()) + " vs " +
                    to_decimal(s.width()));
  }
  return Term::extract(t >> s, 0, 0);
}

Term lower_indexing(const Term& t) {
  switch (t.op()) {
    case Op::Const:
    case Op::Var:
      return t;
    case Op::Not:
      return Term::unary(Op::Not, lower_indexing(t.operand(0)));
    case Op::Extract:
      return Term::extract(lower_indexing(t.operand(0)), t.hi(), t.lo());
    case Op::IndexDynamic:
      return lower_index(lower_indexing(t.operand(0)), lower_indexing(t.operand(1)));
    default:
      return Term::binary(t.op(), lower_indexing(t.operand(0)), lower_indexing(t.operand(1)));
  }
}

namespace {

template <typename TermFn>
Formula map_terms(const Formula& f, TermFn&& fn) {
  switch (f.kind()) {
    case FKind::Eq:
      return Formula::eq(fn(f.terms()[0]), fn(f.terms()[1]));
    case FKind::Ule:
      return Formula::ule(fn(f.terms()[0]), fn(f.terms()[1]));
    case FKind::Sle:
      return Formula::sle(fn(f.terms()[0]), fn(f.terms()[1]));
    case FKind::And:
      return Formula::conj(map_terms(f.child(0), fn), map_terms(f.child(1), fn));
    case FKind::Or:
      return Formula::disj(map_terms(f.child(0), fn), map_terms(f.child(1), fn));
    case FKind::Not:
      return Formula::negate(map_terms(f.child(0), fn));
    case FKind::Exists:
    case FKind::Forall:
      return Formula::quantifier(f.kind() == FKind::Forall, f.variable(), map_terms(f.child(0), fn));
  }
  return f;
}

class Renamer {
 public:
  explicit Renamer(const Formula& f) {
    collect_names(f, taken_);
    for (const auto& v : free_variables(f)) claimed_.insert(v.name);
  }

  Formula formula(const Formula& f) {
    if (!f.is_quantifier()) {
      if (f.is_atom()) {
        return map_terms(f, [&](const Term& t) { return term(t); });
      }
      if (f.kind() == FKind::Not) return Formula::negate(formula(f.child(0)));
      Formula l = formula(f.child(0));
      Formula r = formula(f.child(1));
      return f.kind() == FKind::And ? Formula::conj(l, r) : Formula::disj(l, r);
    }
    const auto& v = f.variable();
    std::string name = v.name;
    if (!claimed_.insert(name).second) {
      for (std::size_t k = 1;; ++k) {
        std::string candidate = v.name + "_" + std::to_string(k);
        if (!taken_.count(candidate)) {
          name = candidate;
          break;
        }
      }
      taken_.insert(name);
      claimed_.insert(name);
    }
    scope_[v.name].push_back(name);
    Formula body = formula(f.child(0));
    scope_[v.name].pop_back();
    return Formula::quantifier(f.kind() == FKind::Forall, {name, v.width}, std::move(body));
  }

  Term term(const Term& t) {
    switch (t.op()) {
      case Op::Const:
        return t;
      case Op::Var: {
        auto it = scope_.find(t.name());
        if (it == scope_.end() || it->second.empty() || it->second.back() == t.name()) return t;
        return Term::var(it->second.back(), t.width());
      }
      case Op::Not:
        return Term::unary(Op::Not, term(t.operand(0)));
      case Op::Extract:
        return Term::extract(term(t.operand(0)), t.hi(), t.lo());
      case Op::IndexDynamic:
        return Term::index(term(t.operand(0)), term(t.operand(1)));
      default:
        return Term::binary(t.op(), term(t.operand(0)), term(t.operand(1)));
    }
  }

 private:
  std::set<std::string> taken_;
  std::set<std::string> claimed_;
  std::map<std::string, std::vector<std::string>> scope_;
};

// Assumes binders are already renamed apart.
std::pair<std::vector<Binder>, Formula> hoist(const Formula& f) {
  switch (f.kind()) {
    case FKind::Exists:
    case FKind::Forall: {
      auto [p, m] = hoist(f.child(0));
      p.insert(p.begin(), Binder{f.kind() == FKind::Forall, f.variable()});
      return {std::move(p), std::move(m)};
    }
    case FKind::Not: {
      auto [p, m] = hoist(f.child(0));
      for (auto& b : p) b.universal = !b.universal;
      return {std::move(p), Formula::negate(std::move(m))};
    }
    case FKind::And:
    case FKind::Or: {
      auto [pl, ml] = hoist(f.child(0));
      auto [pr, mr] = hoist(f.child(1));
      pl.insert(pl.end(), pr.begin(), pr.end());
      Formula m = f.kind() == FKind::And ? Formula::conj(std::move(ml), std::move(mr))
                                         : Formula::disj(std::move(ml), std::move(mr));
      return {std::move(pl), std::move(m)};
    }
    default:
      return {{}, f};
  }
}

}  // namespace

Formula lower_indexing(const Formula& f) {
  return map_terms(f, [](const Term& t) { return lower_indexing(t); });
}

Formula rename_apart(const Formula& f) { return Renamer(f).formula(f); }

Formula prenex(const Formula& f) {
  auto [p, m] = hoist(rename_apart(f));
  return with_prefix(p, std::move(m));
}

// ---------------------------------------------------------------------------
// Decision procedure

Natural quantified_bits(const Formula& f) {
  Natural total = 0;
  if (f.is_quantifier()) total += f.variable().width;
  for (const auto& c : f.children()) total += quantified_bits(c);
  return total;
}

namespace {

bool fits_in_word(const Term& t) {
  if (t.width() > 64) return false;
  if (t.op() == Op::Const && t.value() > std::numeric_limits<std::uint64_t>::max()) return false;
  for (const auto& k : t.operands()) {
    if (!fits_in_word(k)) return false;
  }
  return true;
}

bool fits_in_word(const Formula& f) {
  if (f.is_quantifier() && f.variable().width > 64) return false;
  for (const auto& t : f.terms()) {
    if (!fits_in_word(t)) return false;
  }
  for (const auto& c : f.children()) {
    if (!fits_in_word(c)) return false;
  }
  return true;
}

constexpr std::uint64_t word_mask(std::uint64_t width) {
  return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

// Closed, renamed-apart, well-sorted formula with every width <= 64, compiled
// into flat arrays over machine words. Bound variables live in slots that the
// quantifier loops overwrite; after a Sat run the slots of the outermost
// existential block still hold the witness.
class WordMachine {
 public:
  explicit WordMachine(const Formula& f) { root_ = formula(f); }

  bool run() { return holds(root_); }
  std::uint64_t slot(std::size_t i) const { return slots_[i]; }

 private:
  struct TNode {
    Op op;
    std::uint64_t width;
    std::uint64_t value;  // constant value or slot index
    std::uint64_t lo;
    std::uint32_t a;
    std::uint32_t b;
  };
  struct FNode {
    FKind kind;
    std::uint64_t width;  // atom operand width or quantified width
    std::uint32_t a;
    std::uint32_t b;
    std::size_t slot;
  };

  std::uint32_t term(const Term& t) {
    TNode n{t.op(), static_cast<std::uint64_t>(t.width()), 0, 0, 0, 0};
    switch (t.op()) {
      case Op::Const:
        n.value = static_cast<std::uint64_t>(t.value());
        break;
      case Op::Var: {
        auto it = scope_.find(t.name());
        if (it == scope_.end() || it->second.empty()) {
          throw UnboundSymbolError("no value for variable '" + t.name() + "'");
        }
        n.value = it->second.back();
        break;
      }
      case Op::Not:
        n.a = term(t.operand(0));
        break;
      case Op::Extract:
        n.a = term(t.operand(0));
        n.lo = static_cast<std::uint64_t>(t.lo());
        break;
      case Op::IndexDynamic:
        n.a = term(t.operand(0));
        n.b = term(t.operand(1));
        // Shift range is the operand width, not the node's width of 1.
        n.lo = static_cast<std::uint64_t>(t.operand(0).width());
        break;
      case Op::Concat:
        n.a = term(t.operand(0));
        n.b = term(t.operand(1));
        n.lo = static_cast<std::uint64_t>(t.operand(1).width());
        break;
      default:
        n.a = term(t.operand(0));
        n.b = term(t.operand(1));
        break;
    }
    terms_.push_back(n);
    return static_cast<std::uint32_t>(terms_.size() - 1);
  }

  std::uint32_t formula(const Formula& f) {
    FNode n{f.kind(), 0, 0, 0, 0};
    if (f.is_atom()) {
      n.width = static_cast<std::uint64_t>(f.terms()[0].width());
      n.a = term(f.terms()[0]);
      n.b = term(f.terms()[1]);
    } else if (f.is_quantifier()) {
      n.width = static_cast<std::uint64_t>(f.variable().width);
      n.slot = slots_.size();
      slots_.push_back(0);
      scope_[f.variable().name].push_back(n.slot);
      n.a = formula(f.child(0));
      scope_[f.variable().name].pop_back();
    } else {
      n.a = formula(f.child(0));
      if (f.children().size() > 1) n.b = formula(f.child(1));
    }
    formulas_.push_back(n);
    return static_cast<std::uint32_t>(formulas_.size() - 1);
  }

  std::uint64_t value(std::uint32_t i) const {
    const TNode& n = terms_[i];
    const std::uint64_t m = word_mask(n.width);
    switch (n.op) {
      case Op::Const:
        return n.value;
      case Op::Var:
        return slots_[n.value];
      case Op::Add:
        return (value(n.a) + value(n.b)) & m;
      case Op::Mul:
        return (value(n.a) * value(n.b)) & m;
      case Op::Udiv: {
        std::uint64_t d = value(n.b);
        return d == 0 ? m : value(n.a) / d;
      }
      case Op::Not:
        return ~value(n.a) & m;
      case Op::And:
        return value(n.a) & value(n.b);
      case Op::Or:
        return value(n.a) | value(n.b);
      case Op::Xor:
        return value(n.a) ^ value(n.b);
      case Op::Shl: {
        std::uint64_t s = value(n.b);
        return s >= n.width ? 0 : (value(n.a) << s) & m;
      }
      case Op::Lshr: {
        std::uint64_t s = value(n.b);
        return s >= n.width ? 0 : value(n.a) >> s;
      }
      case Op::Concat:
        return (value(n.a) << n.lo) | value(n.b);
      case Op::Extract:
        return (value(n.a) >> n.lo) & m;
      case Op::IndexDynamic: {
        std::uint64_t s = value(n.b);
        return s >= n.lo ? 0 : (value(n.a) >> s) & 1U;
      }
    }
    return 0;
  }

  bool holds(std::uint32_t i) {
    const FNode& n = formulas_[i];
    switch (n.kind) {
      case FKind::Eq:
        return value(n.a) == value(n.b);
      case FKind::Ule:
        return value(n.a) <= value(n.b);
      case FKind::Sle: {
        std::uint64_t sign = std::uint64_t{1} << (n.width - 1);
        return (value(n.a) ^ sign) <= (value(n.b) ^ sign);
      }
      case FKind::And:
        return holds(n.a) && holds(n.b);
      case FKind::Or:
        return holds(n.a) || holds(n.b);
      case FKind::Not:
        return !holds(n.a);
      case FKind::Exists:
      case FKind::Forall: {
        bool want = n.kind == FKind::Exists;
        std::uint64_t last = word_mask(n.width);
        std::uint64_t& var = slots_[n.slot];
        for (std::uint64_t v = 0;; ++v) {
          var = v;
          if (holds(n.a) == want) return want;
          if (v == last) break;
        }
        return !want;
      }
    }
    return false;
  }

  std::vector<TNode> terms_;
  std::vector<FNode> formulas_;
  std::vector<std::uint64_t> slots_;
  std::map<std::string, std::vector<std::size_t>> scope_;
  std::uint32_t root_ = 0;
};

// Reference expansion over eval_formula, for formulas the word machine cannot
// hold. Leaves the deciding values in the assignment.
bool holds_generic(const Formula& f, Assignment& a, const Limits& limits) {
  switch (f.kind()) {
    case FKind::And:
      return holds_generic(f.child(0), a, limits) && holds_generic(f.child(1), a, limits);
    case FKind::Or:
      return holds_generic(f.child(0), a, limits) || holds_generic(f.child(1), a, limits);
    case FKind::Not:
      return !holds_generic(f.child(0), a, limits);
    case FKind::Exists:
    case FKind::Forall: {
      bool want = f.kind() == FKind::Exists;
      const auto& v = f.variable();
      auto width = static_cast<std::uint64_t>(v.width);
      Natural count = pow2(width);
      for (Natural x = 0; x < count; ++x) {
        a[v.name] = BvValue(width, x);
        if (holds_generic(f.child(0), a, limits) == want) return want;
      }
      a.erase(v.name);
      return !want;
    }
    default:
      return eval_formula(f, a, limits);
  }
}

}  // namespace

Verdict solve(const Formula& f, const Limits& limits) {
  if (auto free = free_variables(f); !free.empty()) {
    throw Error("formula is not closed: '" + free.front().name + "' is free");
  }
  require_well_sorted(f);

  Verdict v;
  Natural bits = quantified_bits(f);
  if (bits > limits.bit_budget) {
    v.status = Status::ResourceExceeded;
    v.diagnostic = "quantified variables need " + to_decimal(bits) + " bits, budget is " +
                   std::to_string(limits.bit_budget);
    return v;
  }

  Formula g = rename_apart(f);
  auto leading = prefix(g);
  try {
    if (limits.word_fast_path && fits_in_word(g)) {
      WordMachine m(g);
      if (m.run()) {
        v.status = Status::Sat;
        for (std::size_t i = 0; i < leading.size() && !leading[i].universal; ++i) {
          BvValue val(static_cast<std::uint64_t>(leading[i].var.width), m.slot(i));
          v.witness.push_back({leading[i].var.name, val.to_bits()});
        }
      } else {
        v.status = Status::Unsat;
      }
    } else {
      Assignment a;
      if (holds_generic(g, a, limits)) {
        v.status = Status::Sat;
        for (std::size_t i = 0; i < leading.size() && !leading[i].universal; ++i) {
          v.witness.push_back({leading[i].var.name, a.at(leading[i].var.name).to_bits()});
        }
      } else {
        v.status = Status::Unsat;
      }
    }
  } catch (const ResourceExceeded& e) {
    v.status = Status::ResourceExceeded;
    v.diagnostic = e.what();
  }
  return v;
}

}  // namespace sobv::bv
