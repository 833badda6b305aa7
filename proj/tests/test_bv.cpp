#include <gtest/gtest.h>

#include <functional>

#include "sobv/bv.hpp"
#include "sobv/errors.hpp"
#include "support/oracles.hpp"

using namespace sobv;
using namespace sobv::bv;
using sobv::testing::c;

namespace {

Term x(unsigned w, const char* name = "x") { return Term::var(name, w); }

bool quantifier_free(const Formula& f) {
  if (f.is_quantifier()) return false;
  for (const auto& ch : f.children()) {
    if (!quantifier_free(ch)) return false;
  }
  return true;
}

std::uint64_t val(const Term& t, const Assignment& a = {}, const Limits& lim = {}) {
  auto v = eval_term(t, a, lim);
  EXPECT_EQ(Natural(v.width()), t.width());
  return static_cast<std::uint64_t>(v.value());
}

}  // namespace

TEST(Scalar, Length) {
  EXPECT_EQ(scalar_length(0), 1U);
  EXPECT_EQ(scalar_length(1), 1U);
  EXPECT_EQ(scalar_length(5), 3U);
  EXPECT_EQ(scalar_length(pow2(1000)), 1001U);
  EXPECT_EQ(scalar_length(pow2(1000) - 1), 1000U);
}

TEST(Scalar, Decimal) {
  EXPECT_EQ(*parse_decimal("1267650600228229401496703205376"), pow2(100));
  EXPECT_FALSE(parse_decimal("12a").has_value());
  EXPECT_FALSE(parse_decimal("").has_value());
}

TEST(BvSize, TableRows) {
  EXPECT_EQ(formula_size(c(7, 4)), 6U);
  EXPECT_EQ(formula_size(x(6)), 4U);
  EXPECT_EQ(formula_size(Term::extract(x(6), 1, 1)), 7U);
  EXPECT_EQ(formula_size(Formula::exists({"x", 6}, Formula::eq(x(6), x(6)))), 4U + 9U);
}

TEST(BvSize, AstronomicalWidthsMeasureWithoutEvaluation) {
  Natural w = pow2(1000);
  auto t = Term::var("w", w);
  EXPECT_EQ(formula_size(t), 1U + 1001U);
  auto f = Formula::eq(Term::extract(t, 5, 3), c(5, 3));
  EXPECT_FALSE(check_sorts(f).has_value());
  EXPECT_EQ(formula_size(f), 1U + (1 + 1002 + 3 + 2) + 5);
}

TEST(BvSize, DynamicIndexMeasuredAsLowering) {
  auto t = Term::index(x(4), x(4, "s"));
  EXPECT_EQ(formula_size(t), formula_size(lower_index(x(4), x(4, "s"))));
}

TEST(BvSorts, Examples) {
  EXPECT_FALSE(check_sorts(Formula::eq(x(3), x(3, "y"))).has_value());
  auto mismatch = check_sorts(Formula::eq(x(3), x(4, "y")));
  ASSERT_TRUE(mismatch.has_value());
  EXPECT_NE(mismatch->message.find("width"), std::string::npos);
  EXPECT_TRUE(check_sorts(c(9, 3)).has_value());
  EXPECT_TRUE(check_sorts(c(0, 0)).has_value());
  EXPECT_TRUE(check_sorts(Term::extract(x(3), 3, 0)).has_value());
  EXPECT_TRUE(check_sorts(Term::extract(x(3), 0, 1)).has_value());
  EXPECT_TRUE(check_sorts(Formula::conj(Formula::eq(x(3), x(3)), Formula::eq(x(2), x(2)))).has_value());
  EXPECT_THROW(require_well_sorted(Formula::eq(x(3), x(4, "y"))), SortError);
}

TEST(BvSorts, PathNamesTheNode) {
  auto d = check_sorts(Formula::exists({"x", 3}, Formula::eq(x(3) + c(1, 2), x(3))));
  ASSERT_TRUE(d.has_value());
  EXPECT_FALSE(d->path.empty());
}

TEST(BvEval, Examples) {
  Assignment a{{"x", BvValue::from_bits("000010")}};
  EXPECT_EQ(val(Term::extract(x(6), 1, 1), a), 1U);
  EXPECT_EQ(val(c(5, 4) / c(0, 4)), 15U);
  auto low = concat(c(1, 1), concat(c(0, 1), c(1, 1)));
  auto t = concat(c(0, 5), low);
  EXPECT_EQ(t.width(), 8);
  EXPECT_EQ(eval_term(t, {}).to_bits(), "00000101");
  EXPECT_TRUE(eval_formula(Formula::eq(c(1, 1), c(1, 1)), {}));
  EXPECT_FALSE(eval_formula(Formula::ule(c(7, 3), c(0, 3)), {}));
  EXPECT_TRUE(eval_formula(Formula::sle(c(7, 3), c(0, 3)), {}));
}

TEST(BvEval, Errors) {
  EXPECT_THROW(eval_term(x(3), {}), UnboundSymbolError);
  EXPECT_THROW(eval_term(x(3), {{"x", BvValue(4, 1)}}), SortError);
  Limits lim;
  lim.max_width = 8;
  EXPECT_THROW(eval_term(c(0, 9), {}, lim), ResourceExceeded);
  EXPECT_THROW(eval_formula(Formula::exists({"x", 1}, Formula::eq(x(1), x(1))), {}), Error);
}

TEST(BvEval, WideArithmetic) {
  // 2^100 - 1 + 1 wraps to 0 at width 100; concat of two 80-bit halves.
  EXPECT_EQ(eval_term(Term::constant(pow2(100) - 1, 100) + c(1, 100), {}).value(), 0);
  auto hi = Term::constant(pow2(80) - 1, 80);
  auto v = eval_term(concat(hi, c(0, 80)), {});
  EXPECT_EQ(v.value(), (pow2(80) - 1) * pow2(80));
  EXPECT_EQ(eval_term(Term::constant(3, 100) << Term::constant(pow2(99), 100), {}).value(), 0);
  EXPECT_TRUE(eval_formula(Formula::sle(Term::constant(pow2(99), 100), c(0, 100)), {}));
}

// Exhaustive totality and reference semantics at widths 1..4, with and
// without the machine-word evaluator.
TEST(BvProperty, EvalMatchesReferenceAtSmallWidths) {
  for (bool fast : {true, false}) {
    Limits lim;
    lim.word_fast_path = fast;
    for (unsigned w = 1; w <= 4; ++w) {
      for (std::uint64_t a = 0; a < (1U << w); ++a) {
        EXPECT_EQ(val(~c(a, w), {}, lim), sobv::testing::ref_not(a, w));
        for (unsigned hi = 0; hi < w; ++hi) {
          for (unsigned lo = 0; lo <= hi; ++lo) {
            EXPECT_EQ(val(Term::extract(c(a, w), hi, lo), {}, lim), sobv::testing::ref_extract(a, hi, lo));
          }
        }
        for (std::uint64_t b = 0; b < (1U << w); ++b) {
          for (Op op : sobv::testing::same_width_binary_ops()) {
            EXPECT_EQ(val(Term::binary(op, c(a, w), c(b, w)), {}, lim), sobv::testing::ref_binary(op, a, b, w))
                << op_name(op) << " " << a << " " << b << " w" << w;
          }
          EXPECT_EQ(val(Term::index(c(a, w), c(b, w)), {}, lim), sobv::testing::ref_bit(a, b, w) ? 1U : 0U);
          EXPECT_EQ(eval_formula(Formula::ule(c(a, w), c(b, w)), {}, lim), sobv::testing::ref_ule(a, b));
          EXPECT_EQ(eval_formula(Formula::sle(c(a, w), c(b, w)), {}, lim), sobv::testing::ref_sle(a, b, w));
          EXPECT_EQ(eval_formula(Formula::eq(c(a, w), c(b, w)), {}, lim), a == b);
          for (unsigned v = 1; v <= 4; ++v) {
            for (std::uint64_t d = 0; d < (1U << v); ++d) {
              EXPECT_EQ(val(concat(c(a, w), c(d, v)), {}, lim), sobv::testing::ref_concat(a, d, v));
            }
          }
        }
      }
    }
  }
}

TEST(BvLowerIndex, Examples) {
  EXPECT_EQ(val(lower_index(c(4, 3), c(2, 3))), 1U);
  EXPECT_EQ(val(lower_index(c(4, 3), c(5, 3))), 0U);
  for (std::uint64_t t = 0; t < 8; ++t) {
    EXPECT_EQ(val(lower_index(c(t, 3), c(0, 3))), val(Term::extract(c(t, 3), 0, 0)));
  }
  EXPECT_THROW(lower_index(x(3), x(4, "s")), SortError);
  auto l = lower_index(x(3), x(3, "s"));
  EXPECT_EQ(l.op(), Op::Extract);
  EXPECT_EQ(l.operand(0).op(), Op::Lshr);
}

TEST(BvProperty, IndexingLawExhaustive) {
  for (unsigned n = 1; n <= 6; ++n) {
    for (std::uint64_t t = 0; t < (1U << n); ++t) {
      for (std::uint64_t s = 0; s < (1U << n); ++s) {
        Assignment a{{"t", BvValue(n, t)}, {"s", BvValue(n, s)}};
        auto lowered = lower_index(Term::var("t", n), Term::var("s", n));
        ASSERT_EQ(val(lowered, a), sobv::testing::ref_bit(t, s, n) ? 1U : 0U) << n << " " << t << " " << s;
      }
    }
  }
}

TEST(BvLowering, RemovesEveryIndexNode) {
  auto bit = Term::index(x(4), x(4, "s"));
  auto f = Formula::eq(concat(bit, Term::index(concat(bit, c(0, 1)), c(1, 2))), c(1, 2));
  auto g = lower_indexing(f);
  std::function<bool(const Term&)> has = [&](const Term& t) {
    if (t.op() == Op::IndexDynamic) return true;
    for (const auto& o : t.operands()) {
      if (has(o)) return true;
    }
    return false;
  };
  EXPECT_TRUE(has(f.terms()[0]));
  EXPECT_FALSE(has(g.terms()[0]));
}

TEST(BvPrenex, AlreadyPrenexIsFixpoint) {
  auto f = Formula::exists({"x", 2}, Formula::forall({"y", 2}, Formula::ule(x(2), x(2, "y"))));
  EXPECT_TRUE(alpha_equivalent(prenex(f), f));
}

TEST(BvPrenex, NegationSwapsQuantifier) {
  auto psi = Formula::eq(x(2), c(1, 2));
  auto f = prenex(Formula::negate(Formula::exists({"x", 2}, psi)));
  EXPECT_TRUE(alpha_equivalent(f, Formula::forall({"x", 2}, Formula::negate(psi))));
}

TEST(BvPrenex, ConjunctionRenamesApart) {
  auto p1 = Formula::eq(x(2), c(1, 2));
  auto p2 = Formula::eq(x(2), c(2, 2));
  auto f = prenex(Formula::conj(Formula::exists({"x", 2}, p1), Formula::exists({"x", 2}, p2)));
  auto q = prefix(f);
  ASSERT_EQ(q.size(), 2U);
  EXPECT_NE(q[0].var.name, q[1].var.name);
  auto expected = Formula::exists(
      {"x", 2}, Formula::exists({"x2", 2}, Formula::conj(p1, Formula::eq(x(2, "x2"), c(2, 2)))));
  EXPECT_TRUE(alpha_equivalent(f, expected));
}

TEST(BvSolve, Examples) {
  auto v = solve(Formula::exists({"x", 1}, Formula::eq(x(1), c(1, 1))));
  ASSERT_TRUE(v.sat());
  EXPECT_EQ(v.witness, (std::vector<WitnessEntry>{{"x", "1"}}));
  EXPECT_TRUE(solve(Formula::forall({"x", 2}, Formula::ule(x(2), c(2, 2)))).unsat());
}

TEST(BvSolve, LeastWitnessAndBudget) {
  auto f = Formula::exists({"x", 3}, Formula::ule(c(5, 3), x(3)));
  for (bool fast : {true, false}) {
    Limits lim;
    lim.word_fast_path = fast;
    auto v = solve(f, lim);
    ASSERT_TRUE(v.sat());
    EXPECT_EQ(v.witness[0].bits, "101");
  }
  Limits tight;
  tight.bit_budget = 2;
  EXPECT_EQ(solve(f, tight).status, Status::ResourceExceeded);
  EXPECT_THROW(solve(Formula::eq(x(1), c(1, 1))), Error);
  EXPECT_THROW(solve(Formula::exists({"x", 1}, Formula::eq(x(1), c(1, 2)))), SortError);
}

TEST(BvSolve, WideUnquantifiedConstantsUseGenericPath) {
  auto big = Term::constant(pow2(90), 91);
  auto f = Formula::exists({"b", 1}, Formula::conj(Formula::eq(Term::var("b", 1), c(1, 1)),
                                                   Formula::ule(big, big + big)));
  EXPECT_TRUE(solve(f).unsat());  // 2^91 wraps to 0 < 2^90
}

// --- properties over the random corpus -----------------------------------------

class BvCorpus : public ::testing::Test {
 protected:
  static std::vector<Formula> corpus() {
    std::vector<Formula> out;
    for (std::uint64_t s = 0; s < 200; ++s) out.push_back(sobv::testing::RandomBv(s, 12).closed());
    return out;
  }
};

TEST_F(BvCorpus, SolverMatchesTabulationOracle) {
  for (const auto& f : corpus()) {
    ASSERT_FALSE(check_sorts(f).has_value()) << to_string(f);
    bool expected = sobv::testing::TabulationOracle(f).decide();
    for (bool fast : {true, false}) {
      Limits lim;
      lim.word_fast_path = fast;
      auto v = solve(f, lim);
      ASSERT_NE(v.status, Status::ResourceExceeded);
      EXPECT_EQ(v.sat(), expected) << to_string(f);
    }
  }
}

TEST_F(BvCorpus, PrenexPreservesVerdict) {
  for (const auto& f : corpus()) {
    auto p = prenex(f);
    EXPECT_TRUE(quantifier_free(matrix(p)));
    EXPECT_EQ(solve(p).status, solve(f).status) << to_string(f);
  }
}

TEST_F(BvCorpus, Duality) {
  for (const auto& f : corpus()) {
    auto p = prenex(f);
    EXPECT_EQ(solve(dualize(p)).sat(), solve(p).unsat()) << to_string(f);
  }
}

TEST(BvValueTest, Bits) {
  auto v = BvValue::from_bits("0110");
  EXPECT_EQ(v.width(), 4U);
  EXPECT_EQ(v.value(), 6);
  EXPECT_TRUE(v.bit(1));
  EXPECT_FALSE(v.bit(3));
  EXPECT_EQ(v.to_bits(), "0110");
  EXPECT_EQ(BvValue(3, 9).value(), 1);
}
