#pragma once

// Test-only reference implementations. Nothing here calls the solver or the
// word-level evaluator; formulas are decided by tabulating every assignment.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobv/bv.hpp"
#include "sobv/so2.hpp"

namespace sobv::testing {

// ---------------------------------------------------------------------------
// Plain-integer semantics of each operator, written from the conventions:
// x / 0 is all ones, shifts by >= width give 0, concat puts the first operand
// high, signed comparison reads two's complement.

inline std::uint64_t mask(unsigned w) { return w >= 64 ? ~0ULL : (1ULL << w) - 1; }

inline std::int64_t as_signed(std::uint64_t v, unsigned w) {
  if (w < 64 && (v >> (w - 1)) & 1U) return static_cast<std::int64_t>(v) - static_cast<std::int64_t>(1ULL << w);
  return static_cast<std::int64_t>(v);
}

inline std::uint64_t ref_binary(bv::Op op, std::uint64_t a, std::uint64_t b, unsigned w) {
  switch (op) {
    case bv::Op::Add: return (a + b) & mask(w);
    case bv::Op::Mul: return (a * b) & mask(w);
    case bv::Op::Udiv: return b == 0 ? mask(w) : a / b;
    case bv::Op::And: return a & b;
    case bv::Op::Or: return a | b;
    case bv::Op::Xor: return a ^ b;
    case bv::Op::Shl: {
      std::uint64_t r = a;
      for (std::uint64_t i = 0; i < b && r; ++i) r = (r * 2) & mask(w);
      return r;
    }
    case bv::Op::Lshr: {
      std::uint64_t r = a;
      for (std::uint64_t i = 0; i < b && r; ++i) r /= 2;
      return r;
    }
    default:
      throw std::logic_error("not a same-width binary operator");
  }
}

inline std::uint64_t ref_not(std::uint64_t a, unsigned w) { return mask(w) - a; }

inline std::uint64_t ref_concat(std::uint64_t hi, std::uint64_t lo, unsigned lo_width) {
  return hi * (1ULL << lo_width) + lo;
}

inline std::uint64_t ref_extract(std::uint64_t a, unsigned hi, unsigned lo) {
  return (a / (1ULL << lo)) % (1ULL << (hi - lo + 1));
}

inline bool ref_bit(std::uint64_t t, std::uint64_t s, unsigned w) { return s < w && ((t >> s) & 1U); }

inline bool ref_ule(std::uint64_t a, std::uint64_t b) { return a <= b; }
inline bool ref_sle(std::uint64_t a, std::uint64_t b, unsigned w) { return as_signed(a, w) <= as_signed(b, w); }

inline const std::vector<bv::Op>& same_width_binary_ops() {
  static const std::vector<bv::Op> ops = {bv::Op::Add, bv::Op::Mul, bv::Op::Udiv, bv::Op::And,
                                          bv::Op::Or,  bv::Op::Xor, bv::Op::Shl,  bv::Op::Lshr};
  return ops;
}

inline bv::Term c(std::uint64_t v, unsigned w) { return bv::Term::constant(v, w); }

// ---------------------------------------------------------------------------
// Truth-table oracle for closed BV formulas whose bound variables all have
// distinct names. Tabulates every subformula over the joint assignment space
// of all variables; a quantifier projects its variable out with max or min.

class TabulationOracle {
 public:
  explicit TabulationOracle(const bv::Formula& f) : root_(f) { collect(f); }

  std::uint64_t total_bits() const { return total_bits_; }

  bool decide() {
    if (total_bits_ > 16) throw std::logic_error("oracle limited to 16 bits");
    auto v = table(root_);
    for (bool b : v) {
      if (b != v[0]) throw std::logic_error("closed formula tabulated to a non-constant");
    }
    return v[0];
  }

 private:
  struct Slot {
    unsigned offset;
    unsigned width;
  };

  void collect(const bv::Formula& f) {
    if (f.is_quantifier()) {
      const auto& v = f.variable();
      if (slots_.count(v.name)) throw std::logic_error("oracle needs distinct bound names");
      auto w = static_cast<unsigned>(v.width);
      slots_[v.name] = {total_bits_, w};
      total_bits_ += w;
    }
    for (const auto& c : f.children()) collect(c);
  }

  bv::Assignment assignment(std::uint64_t k) const {
    bv::Assignment a;
    for (const auto& [name, s] : slots_) a[name] = bv::BvValue(s.width, (k >> s.offset) & mask(s.width));
    return a;
  }

  std::vector<bool> table(const bv::Formula& f) {
    std::uint64_t n = 1ULL << total_bits_;
    std::vector<bool> out(n);
    switch (f.kind()) {
      case bv::FKind::And:
      case bv::FKind::Or: {
        auto l = table(f.child(0));
        auto r = table(f.child(1));
        for (std::uint64_t k = 0; k < n; ++k) out[k] = f.kind() == bv::FKind::And ? (l[k] && r[k]) : (l[k] || r[k]);
        return out;
      }
      case bv::FKind::Not: {
        auto l = table(f.child(0));
        for (std::uint64_t k = 0; k < n; ++k) out[k] = !l[k];
        return out;
      }
      case bv::FKind::Exists:
      case bv::FKind::Forall: {
        auto body = table(f.child(0));
        const Slot& s = slots_.at(f.variable().name);
        bool any = f.kind() == bv::FKind::Exists;
        std::uint64_t field = mask(s.width) << s.offset;
        for (std::uint64_t k = 0; k < n; ++k) {
          bool acc = !any;
          for (std::uint64_t v = 0; v <= mask(s.width); ++v) {
            bool b = body[(k & ~field) | (v << s.offset)];
            acc = any ? (acc || b) : (acc && b);
          }
          out[k] = acc;
        }
        return out;
      }
      default:
        for (std::uint64_t k = 0; k < n; ++k) out[k] = bv::eval_formula(f, assignment(k));
        return out;
    }
  }

  bv::Formula root_;
  std::map<std::string, Slot> slots_;
  unsigned total_bits_ = 0;
};

// ---------------------------------------------------------------------------
// Random closed BV formulas: widths 1..4, distinct bound names, quantifiers
// both in the prefix and under connectives.

class RandomBv {
 public:
  RandomBv(std::uint64_t seed, unsigned bit_budget) : rng_(seed), budget_(bit_budget) {}

  bv::Formula closed() {
    std::vector<bv::Variable> scope;
    return quantified(scope, 3);
  }

 private:
  std::uint64_t below(std::uint64_t n) { return rng_() % n; }

  bv::Formula quantified(std::vector<bv::Variable>& scope, unsigned depth) {
    unsigned count = 1 + static_cast<unsigned>(below(3));
    std::vector<bv::Binder> binders;
    for (unsigned i = 0; i < count && used_ < budget_; ++i) {
      unsigned w = 1 + static_cast<unsigned>(below(std::min<std::uint64_t>(4, budget_ - used_)));
      used_ += w;
      bv::Variable v{"v" + std::to_string(next_++), w};
      binders.push_back({below(2) == 1, v});
      scope.push_back(v);
    }
    bv::Formula body = connective(scope, depth);
    scope.resize(scope.size() - binders.size());
    return bv::with_prefix(binders, body);
  }

  bv::Formula connective(std::vector<bv::Variable>& scope, unsigned depth) {
    if (depth == 0) return atom(scope);
    switch (below(6)) {
      case 0:
        return bv::Formula::conj(connective(scope, depth - 1), connective(scope, depth - 1));
      case 1:
        return bv::Formula::disj(connective(scope, depth - 1), connective(scope, depth - 1));
      case 2:
        return bv::Formula::negate(connective(scope, depth - 1));
      case 3:
        if (used_ < budget_) return quantified(scope, depth - 1);
        [[fallthrough]];
      default:
        return atom(scope);
    }
  }

  bv::Formula atom(const std::vector<bv::Variable>& scope) {
    unsigned w = scope.empty() ? 1 + static_cast<unsigned>(below(4))
                               : static_cast<unsigned>(scope[below(scope.size())].width);
    bv::Term l = term(scope, w, 2);
    bv::Term r = term(scope, w, 2);
    switch (below(3)) {
      case 0: return bv::Formula::eq(l, r);
      case 1: return bv::Formula::ule(l, r);
      default: return bv::Formula::sle(l, r);
    }
  }

  bv::Term leaf(const std::vector<bv::Variable>& scope, unsigned w) {
    std::vector<const bv::Variable*> fit;
    for (const auto& v : scope) {
      if (v.width == w) fit.push_back(&v);
    }
    if (!fit.empty() && below(10) < 7) {
      const auto* v = fit[below(fit.size())];
      return bv::Term::var(v->name, v->width);
    }
    return c(below(1ULL << w), w);
  }

  bv::Term term(const std::vector<bv::Variable>& scope, unsigned w, unsigned depth) {
    if (depth == 0) return leaf(scope, w);
    switch (below(8)) {
      case 0:
      case 1: {
        const auto& ops = same_width_binary_ops();
        return bv::Term::binary(ops[below(ops.size())], term(scope, w, depth - 1), term(scope, w, depth - 1));
      }
      case 2:
        return ~term(scope, w, depth - 1);
      case 3:
        if (w >= 2) {
          unsigned hi = 1 + static_cast<unsigned>(below(w - 1));
          return bv::concat(term(scope, hi, depth - 1), term(scope, w - hi, depth - 1));
        }
        break;
      case 4: {
        unsigned from = w + static_cast<unsigned>(below(5 - w));
        unsigned lo = static_cast<unsigned>(below(from - w + 1));
        return bv::Term::extract(term(scope, from, depth - 1), lo + w - 1, lo);
      }
      case 5:
        if (w == 1) {
          unsigned n = 1 + static_cast<unsigned>(below(4));
          return bv::Term::index(term(scope, n, depth - 1), term(scope, n, depth - 1));
        }
        break;
      default:
        break;
    }
    return leaf(scope, w);
  }

  std::mt19937_64 rng_;
  unsigned budget_;
  unsigned used_ = 0;
  unsigned next_ = 0;
};

// ---------------------------------------------------------------------------
// SO2 helpers

/// Every interpretation of the given symbols, enumerated by packed tables.
template <typename Fn>
void for_each_interpretation(const std::vector<so2::FunctionSymbol>& symbols, Fn&& fn) {
  std::vector<std::uint64_t> packed(symbols.size(), 0);
  for (;;) {
    so2::Interpretation interp;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      interp[symbols[i].name] = so2::TruthTable::from_packed(symbols[i].arity, packed[i]);
    }
    fn(interp);
    std::size_t i = 0;
    for (; i < symbols.size(); ++i) {
      std::uint64_t entries = 1ULL << symbols[i].arity;
      std::uint64_t last = entries >= 64 ? ~0ULL : (1ULL << entries) - 1;
      if (packed[i] < last) {
        ++packed[i];
        break;
      }
      packed[i] = 0;
    }
    if (i == symbols.size()) return;
  }
}

/// Scaling family at a fixed arity: exists f. forall p. forall q.
/// m_0 = p, m_d = f(m_{d-1}, q & !p, p, ...) with arity-1 extra arguments.
inline so2::Formula scaling_formula(unsigned depth, unsigned arity) {
  so2::FunctionSymbol f{"f", arity}, p{"p", 0}, q{"q", 0};
  auto P = so2::Formula::apply(p, {});
  auto Q = so2::Formula::apply(q, {});
  so2::Formula m = P;
  for (unsigned d = 0; d < depth; ++d) {
    std::vector<so2::Formula> args{m};
    for (unsigned i = 1; i < arity; ++i) {
      args.push_back(i % 2 ? so2::Formula::conj(Q, so2::Formula::negate(P)) : P);
    }
    m = so2::Formula::apply(f, std::move(args));
  }
  return so2::with_prefix({{false, f}, {true, p}, {true, q}}, m);
}

}  // namespace sobv::testing
