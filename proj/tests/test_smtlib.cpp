#include <gtest/gtest.h>

#include <cstdlib>

#include "sobv/errors.hpp"
#include "sobv/harness.hpp"
#include "sobv/reduction.hpp"
#include "sobv/smtlib.hpp"
#include "support/oracles.hpp"

using namespace sobv;
using bv::Term;
using sobv::testing::c;
using Res = smtlib::ExternalVerdict::Result;

namespace {

const char* kExample = "exists f:3 . forall p:0 . forall q:0 . !f(p,p,q) & f(p, q & !q, q)";

bv::Formula lowered_example() {
  return bv::lower_indexing(reduction::reduce(so2::parse(kExample)).formula);
}

std::vector<bv::Formula> golden_corpus() {
  auto x = Term::var("x", 4), y = Term::var("y", 4);
  std::vector<bv::Formula> out{
      bv::Formula::exists({"x", 1}, bv::Formula::eq(Term::var("x", 1), c(1, 1))),
      lowered_example(),
      bv::Formula::forall({"x", 4}, bv::Formula::exists({"y", 4}, bv::Formula::disj(
          bv::Formula::ule(x * y, x / y), bv::Formula::negate(bv::Formula::sle(x ^ y, (x << y) | (x >> y)))))),
      bv::Formula::exists({"x", 4}, bv::Formula::eq(bv::concat(Term::extract(x, 3, 2), ~Term::extract(x, 1, 0)), x + c(3, 4))),
      bv::Formula::exists({"z", 5000}, bv::Formula::eq(Term::var("z", 5000), Term::constant(pow2(4999), 5000))),
      bv::Formula::eq(Term::var("free", 2) & c(1, 2), c(0, 2)),
  };
  return out;
}

std::optional<std::string> solver_path() {
  const char* p = std::getenv("SOBV_TEST_SOLVER");
  if (p == nullptr || *p == '\0') return std::nullopt;
  return std::string(p);
}

}  // namespace

TEST(Emit, MinimalFormula) {
  auto s = smtlib::emit_smt2(bv::Formula::exists({"x", 1}, bv::Formula::eq(Term::var("x", 1), c(1, 1))));
  EXPECT_EQ(s.logic, "BV");
  EXPECT_EQ(s.text,
            "(set-logic BV)\n"
            "(assert\n"
            "  (exists ((x (_ BitVec 1)))\n"
            "    (= x #b1)))\n"
            "(check-sat)\n");
}

TEST(Emit, ExampleShape) {
  auto s = smtlib::emit_smt2(lowered_example());
  ASSERT_EQ(s.declarations.size(), 3U);
  EXPECT_EQ(s.declarations[0], (bv::Variable{"x_f", 8}));
  EXPECT_NE(s.text.find("(exists ((x_f (_ BitVec 8)))"), std::string::npos);
  EXPECT_NE(s.text.find("(forall ((x_p (_ BitVec 1)))"), std::string::npos);
  EXPECT_NE(s.text.find("bvlshr"), std::string::npos);
  EXPECT_NE(s.text.find("(_ extract 0 0)"), std::string::npos);
}

TEST(Emit, RejectsUnloweredIndexAndIllSorted) {
  EXPECT_THROW(smtlib::emit_smt2(reduction::reduce(so2::parse(kExample)).formula), Error);
  EXPECT_THROW(smtlib::emit_smt2(bv::Formula::eq(c(1, 2), c(1, 3))), SortError);
}

TEST(Emit, WideConstantsUseDecimal) {
  auto s = smtlib::emit_smt2(bv::Formula::eq(Term::constant(7, pow2(20)), Term::constant(7, pow2(20))));
  EXPECT_NE(s.text.find("(_ bv7 1048576)"), std::string::npos);
}

TEST(RoundTrip, GoldenCorpus) {
  for (const auto& f : golden_corpus()) {
    auto s = smtlib::emit_smt2(f);
    auto g = smtlib::parse_smt2(s.text);
    EXPECT_TRUE(bv::alpha_equivalent(f, g)) << s.text;
    EXPECT_EQ(smtlib::emit_smt2(g).text, s.text);
  }
}

TEST(RoundTrip, RandomReductions) {
  harness::GeneratorConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    cfg.seed = seed;
    auto f = bv::lower_indexing(reduction::reduce(harness::gen_random_so2(cfg)).formula);
    auto s = smtlib::emit_smt2(f);
    EXPECT_TRUE(bv::alpha_equivalent(f, smtlib::parse_smt2(s.text))) << s.text;
  }
}

TEST(RoundTrip, RandomBvFormulas) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto f = bv::lower_indexing(sobv::testing::RandomBv(seed, 12).closed());
    auto s = smtlib::emit_smt2(f);
    EXPECT_TRUE(bv::alpha_equivalent(f, smtlib::parse_smt2(s.text))) << s.text;
  }
}

TEST(Parse, HandWritten) {
  auto f = smtlib::parse_smt2(
      "; comment\n(set-info :status sat)\n(declare-fun y () (_ BitVec 8))\n"
      "(assert (exists ((a (_ BitVec 8)) (b (_ BitVec 8))) (and (= (bvadd a b y) #x10) (bvule a (_ bv3 8)))))\n"
      "(check-sat)\n(exit)\n");
  EXPECT_EQ(bv::free_variables(f).size(), 1U);
  EXPECT_EQ(bv::prefix(f).size(), 2U);
}

TEST(Parse, UnsupportedOperation) {
  try {
    smtlib::parse_smt2("(declare-const a (_ BitVec 4))\n(assert (= (bvsrem a a) a))\n");
    FAIL() << "expected a syntax error";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2U);
  }
  EXPECT_THROW(smtlib::parse_smt2("(push 1)"), SyntaxError);
  EXPECT_THROW(smtlib::parse_smt2("(assert (= #b1 #b1)"), SyntaxError);
}

TEST(Parse, SortError) {
  EXPECT_THROW(smtlib::parse_smt2("(declare-const a (_ BitVec 4))\n(declare-const b (_ BitVec 3))\n"
                                  "(assert (= a b))\n(check-sat)\n"),
               SortError);
}

TEST(Runner, MissingExecutable) {
  smtlib::SolverConfig cfg;
  cfg.executable = "/nonexistent/solver-binary";
  auto v = smtlib::run_external_solver(smtlib::emit_smt2(lowered_example()), cfg);
  EXPECT_EQ(v.result, Res::Error);
  EXPECT_FALSE(v.diagnostic.empty());
}

TEST(Runner, TimeoutGivesUnknown) {
  smtlib::SolverConfig cfg;
  cfg.executable = "/bin/sh";
  cfg.arguments = {"-c", "sleep 5; echo sat", "sh"};
  cfg.timeout = std::chrono::milliseconds(1);
  auto v = smtlib::run_external_solver(smtlib::emit_smt2(lowered_example()), cfg);
  EXPECT_EQ(v.result, Res::Unknown);
  EXPECT_LT(v.wall_time.count(), 2000);
}

TEST(Runner, StrictStatusLine) {
  smtlib::SolverConfig cfg;
  cfg.executable = "/bin/sh";
  auto script = smtlib::emit_smt2(lowered_example());
  cfg.arguments = {"-c", "echo; echo unsat", "sh"};
  EXPECT_EQ(smtlib::run_external_solver(script, cfg).result, Res::Unsat);
  cfg.arguments = {"-c", "echo 'sat maybe'", "sh"};
  EXPECT_EQ(smtlib::run_external_solver(script, cfg).result, Res::Error);
  cfg.arguments = {"-c", "echo unknown", "sh"};
  EXPECT_EQ(smtlib::run_external_solver(script, cfg).result, Res::Unknown);
  // The script path is the last argument.
  cfg.arguments = {"-c", "test -s \"$1\" && grep -q check-sat \"$1\" && echo sat", "sh"};
  EXPECT_EQ(smtlib::run_external_solver(script, cfg).result, Res::Sat);
}

TEST(Runner, ExternalSolverAgrees) {
  auto path = solver_path();
  if (!path) GTEST_SKIP() << "no external solver configured";
  smtlib::SolverConfig cfg;
  cfg.executable = *path;
  EXPECT_EQ(smtlib::run_external_solver(smtlib::emit_smt2(lowered_example()), cfg).result, Res::Unsat);
  auto sat = smtlib::emit_smt2(bv::lower_indexing(reduction::reduce(so2::parse("exists p:0 . p()")).formula));
  EXPECT_EQ(smtlib::run_external_solver(sat, cfg).result, Res::Sat);
}
