#include <gtest/gtest.h>

#include <set>

#include "support/fixtures.hpp"
#include "wul/oracle.hpp"

using namespace wul;
using namespace wul::testing;

namespace {

Term prog(const std::string& text, const Rtg& g = Rtg{}) { return parse_term(parse_sexpr(text), g); }

std::set<std::string> printed(const std::vector<Term>& ts) {
  std::set<std::string> out;
  for (const auto& t : ts) out.insert(to_string(t));
  return out;
}

}  // namespace

TEST(Exec, Expressions) {
  auto s = exec(prog("(+ 2 (+ x 1))"), {{"x", Val::scalar(4)}}, 8);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->at("e_t"), Val::scalar(7));
  EXPECT_EQ(s->at("x"), Val::scalar(4));
  s = exec(prog("(and (< x 5) (not (= x 1)))"), {{"x", Val::scalar(4)}}, 8);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->at("b_t"), Val::scalar(1, Sort::Bool));
}

TEST(Exec, Statements) {
  auto s = exec(prog("(seq (:= x 1) (ite (< x 2) (:= y (+ x x)) skip))"), {{"x", Val::scalar(0)}, {"y", Val::scalar(9)}}, 8);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->at("x"), Val::scalar(1));
  EXPECT_EQ(s->at("y"), Val::scalar(2));
  s = exec(prog("(while (< x 5) (:= x (+ x 1)))"), {{"x", Val::scalar(0)}}, 8);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->at("x"), Val::scalar(5));
}

TEST(Exec, FuelBoundsLoops) {
  Term t = prog("(while (< x 5) (:= x (+ x 1)))");
  EXPECT_FALSE(exec(t, {{"x", Val::scalar(0)}}, 4));
  EXPECT_TRUE(exec(t, {{"x", Val::scalar(0)}}, 5));
  EXPECT_FALSE(exec(prog("(while true skip)"), {}, 100));
}

TEST(Exec, VectorStatesRunPerElement) {
  State s{{"x", Val::vec({0, 4, 1})}, {"y", Val::vec({1, 1, 1})}};
  auto out = exec(prog("(ite (< x 2) (:= x (+ x y)) skip)"), s, 8, 3);
  ASSERT_TRUE(out);
  EXPECT_EQ(out->at("x"), Val::vec({1, 4, 2}));
  EXPECT_EQ(out->at("y"), Val::vec({1, 1, 1}));
  // One element diverging makes the whole run diverge.
  EXPECT_FALSE(exec(prog("(while (< x 3) (:= x (+ x y)))"), {{"x", Val::vec({0, 0})}, {"y", Val::vec({1, 0})}}, 10, 2));
}

TEST(Exec, UnboundVariable) { EXPECT_THROW(exec(prog("(+ z 1)"), {}, 8), EvalError); }

TEST(Enumerate, PlusTwoToDepthThree) {
  Built f = build(kPlusTwo);
  EXPECT_EQ(printed(enumerate_programs(f.bench.grammar, "N", 3)),
            (std::set<std::string>{"2", "(+ 2 2)", "(+ 2 (+ 2 2))"}));
  EXPECT_EQ(enumerate_programs(f.bench.grammar, "N", 1).size(), 1u);
  EXPECT_THROW(enumerate_programs(f.bench.grammar, "N", 50, 10), Error);
}

TEST(Enumerate, DeduplicatesAndCompletes) {
  Rtg g = parse_grammar("(nonterm E IntExpr 1 1 (+ E E) x)");
  auto ps = enumerate_programs(g, "E", 2);
  EXPECT_EQ(ps.size(), printed(ps).size());
  EXPECT_EQ(ps.size(), 2u + 4u);
  for (const auto& p : ps) EXPECT_EQ(to_string(p).find('E'), std::string::npos);
}

TEST(Triple, PlusTwoHolds) {
  Built f = build(kPlusTwo);
  OracleConfig c;
  c.depth = 6;
  TripleResult r = check_triple(f.bench.pre, f.bench.grammar, f.bench.program, f.bench.post, c);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.programs, 6u);
}

TEST(Triple, CounterexampleReported) {
  Built f = build("(nonterm N IntExpr 2 (+ 2 N))\n(start N)\n(post (not (= e_t 4)))\n");
  TripleResult r = check_triple(f.bench.pre, f.bench.grammar, f.bench.program, f.bench.post, OracleConfig{});
  ASSERT_FALSE(r.holds);
  ASSERT_TRUE(r.cex);
  EXPECT_EQ(to_string(r.cex->program), "(+ 2 2)");
  EXPECT_EQ(r.cex->final_state.at("e_t"), Val::scalar(4));
}

TEST(Triple, PreconditionFiltersStates) {
  Built f = build("(nonterm S Stmt (:= x (+ x 1)))\n(start S)\n(pre (< x 2))\n(post (< x 3))\n");
  OracleConfig c;
  c.lo = -2;
  c.hi = 5;
  TripleResult r = check_triple(f.bench.pre, f.bench.grammar, f.bench.program, f.bench.post, c);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.runs, 4u);  // x in -2..1
  auto st = initial_states(parse_formula("(= x 3)"), f.bench.post, f.bench.grammar, f.bench.program, c);
  ASSERT_EQ(st.size(), 1u);
  EXPECT_EQ(st[0].at("x"), Val::scalar(3));
}

TEST(Triple, DivergenceIsVacuous) {
  Built f = build("(nonterm S Stmt (while (< x 10) skip))\n(start S)\n(post (= x 100))\n");
  OracleConfig c;
  c.fuel = 5;
  TripleResult r = check_triple(f.bench.pre, f.bench.grammar, f.bench.program, f.bench.post, c);
  EXPECT_TRUE(r.holds);
  EXPECT_EQ(r.diverged, r.runs);
}

TEST(Triple, VectorIte) {
  OracleConfig c;
  c.k = 3;
  c.depth = 5;
  // With N unbounded the grammar can produce x := y elementwise.
  Built f = build(kVecIte);
  TripleResult r = check_triple(f.bench.pre, f.bench.grammar, f.bench.program, f.bench.post, c);
  ASSERT_FALSE(r.holds);
  EXPECT_EQ(r.cex->final_state.at("x"), Val::vec({0, 1, 2}));
  Benchmark b = load_benchmark(std::string(WUL_SOURCE_DIR) + "/benchmarks/vector-ite.ul");
  r = check_triple(b.pre, b.grammar, b.program, b.post, c);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.programs, 10u);
}

TEST(Eval, QuantifiersOverDomain) {
  EvalOptions o;
  o.lo = -2;
  o.hi = 2;
  EXPECT_TRUE(holds(parse_formula("(forall ((a Int)) (<= (* a a) 4))"), {}, o));
  EXPECT_FALSE(holds(parse_formula("(forall ((a Int)) (<= (* a a) 3))"), {}, o));
  EXPECT_TRUE(holds(parse_formula("(exists ((a Int)) (= (+ a a) -4))"), {}, o));
  o.k = 2;
  State s{{"x", Val::vec({3, 1})}};
  ParseContext c;
  c.vars["x"] = Sort::IntVec;
  EXPECT_TRUE(holds(parse_formula("(exists ((i Index)) (= (select x i) 1))", c), s, o));
  EXPECT_FALSE(holds(parse_formula("(forall ((i Index)) (= (select x i) 1))", c), s, o));
}

TEST(Eval, EuclideanDivision) {
  EXPECT_EQ(euclid_mod(-7, 2), 1);
  EXPECT_EQ(euclid_div(-7, 2), -4);
  EXPECT_EQ(euclid_mod(7, -2), 1);
  EXPECT_EQ(euclid_div(7, -2), -3);
  EXPECT_EQ(euclid_mod(-7, -2), 1);
  EXPECT_EQ(euclid_div(-7, -2), 4);
}
