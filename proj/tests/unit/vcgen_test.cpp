#include <gtest/gtest.h>

#include <algorithm>

#include "support/fixtures.hpp"
#include "support/random_bench.hpp"
#include "wul/oracle.hpp"
#include "wul/vcgen.hpp"

using namespace wul;
using namespace wul::testing;

namespace {

ParseContext q_ctx() {
  ParseContext c;
  c.params = {"Q_N"};
  return c;
}

Pvc make_pvc(const std::string& lhs, const std::string& rhs, const ParseContext& c = {}) {
  Pvc p;
  p.id = "t";
  p.origin = "t";
  p.lhs = parse_formula(lhs, c);
  p.rhs = parse_formula(rhs, c);
  return p;
}

}  // namespace

TEST(Extract, PlusTwo) {
  Built f = build(kPlusTwo, false);
  ASSERT_EQ(f.pipe.original.size(), 2u);
  EXPECT_TRUE(alpha_equal(f.pipe.original[0].closed(),
                          parse_formula("(=> true (forall ((a Int)) (=> (Q_N a) (not (= a 3)))))", q_ctx())));
  EXPECT_TRUE(alpha_equal(f.pipe.original[1].closed(),
                          parse_formula("(=> true (and (Q_N 2) (forall ((a Int)) (=> (Q_N a) (Q_N (+ 2 a))))))", q_ctx())));
  EXPECT_EQ(f.pipe.original[0].id, "weaken0");
  EXPECT_EQ(f.pipe.original[1].id, "weaken0.adapt0.weaken0");
}

TEST(Extract, NoWeakenNoPvcs) {
  Rtg g = parse_grammar("(nonterm N IntExpr 2)");
  SkeletonBuilder b(g, 0);
  Skel s = b.w_skel(std::make_shared<Context>(), term::int_lit(2), parse_formula("(= e_t 2)"));
  EXPECT_TRUE(extract_pvcs(s).empty());
}

TEST(Extract, OnePerWeaken) {
  BenchGen gen(4242);
  for (int i = 0; i < 60; ++i) {
    Built f = build(gen.next().text(), false);
    EXPECT_EQ(f.pipe.original.size(), count_rule(f.pipe.root, Rule::Weaken));
  }
}

TEST(Extract, VectorIteTopWeaken) {
  Built f = build(kVecIte, false);
  const Pvc& top = f.pipe.original.at(0);
  EXPECT_TRUE(equal(top.lhs, f.bench.pre));
  ASSERT_EQ(top.rhs->kind, FK::Forall);
  const Formula& body = top.rhs->kids.back();
  ASSERT_EQ(body->kind, FK::Implies);
  EXPECT_EQ(body->kids[0]->kind, FK::ParamApp);
  EXPECT_EQ(body->kids[0]->name, "Q_S");
  // Q_S(x', y, x): the poststate vector, the read-only y, then the prestate.
  std::string app = to_string(body->kids[0]);
  EXPECT_NE(app.find("y[1] y[2] y[3] x[1] x[2] x[3]"), std::string::npos) << app;
}

TEST(Optimize, PlusTwo) {
  Built f = build(kPlusTwo);
  ASSERT_EQ(f.pipe.pvcs.size(), 3u);
  const char* want[] = {"(forall ((a Int)) (=> (and true (Q_N a)) (not (= a 3))))", "(=> true (Q_N 2))",
                        "(forall ((a Int)) (=> (and true (Q_N a)) (Q_N (+ 2 a))))"};
  for (int i = 0; i < 3; ++i)
    EXPECT_TRUE(alpha_equal(f.pipe.pvcs[i].closed(), parse_formula(want[i], q_ctx()))) << print_pvc(f.pipe.pvcs[i]);
}

TEST(Optimize, FixpointOnPlainPvc) {
  Pvc p = make_pvc("(< x 1)", "(< x 2)");
  auto out = optimize_pvcs({p});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_TRUE(equal(out[0].body(), p.body()));
}

TEST(Optimize, SplitAndFlatten) {
  ParseContext c;
  for (const char* v : {"A", "B", "C", "D"}) c.vars[v] = Sort::Bool;
  Pvc p = make_pvc("A", "(and B (=> C D))", c);
  auto out = optimize_pvcs({p});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(alpha_equal(out[0].body(), parse_formula("(=> A B)", c))) << print_pvc(out[0]);
  EXPECT_TRUE(alpha_equal(out[1].body(), parse_formula("(=> (and A C) D)", c))) << print_pvc(out[1]);
  for (int m = 0; m < 16; ++m) {
    State s;
    const char* names[] = {"A", "B", "C", "D"};
    for (int i = 0; i < 4; ++i) s[names[i]] = Val::scalar((m >> i) & 1, Sort::Bool);
    bool split = holds(out[0].body(), s) && holds(out[1].body(), s);
    EXPECT_EQ(split, holds(p.body(), s));
  }
}

TEST(Optimize, PullsLeftExistentials) {
  Pvc p = make_pvc("(exists ((k Int)) (= x (* 2 k)))", "(forall ((y Int)) (=> (= y (+ x 2)) (= (mod y 2) 0)))");
  auto out = optimize_pvcs({p});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].universals.size(), 2u);
  EXPECT_FALSE(out[0].lhs->kind == FK::Exists);
  EvalOptions eo;
  eo.lo = -3;
  eo.hi = 3;
  EXPECT_EQ(holds(out[0].closed(), {}, eo), holds(p.closed(), {}, eo));
}

TEST(Optimize, ConservativeOnRandomBenchmarks) {
  BenchGen gen(31337);
  EvalOptions eo;
  for (int i = 0; i < 40; ++i) {
    Built f = build(gen.next().text());
    for (const char* body : {"true", "false", "(= (mod V 2) 0)", "(<= V 2)"}) {
      Assignment a;
      for (const auto& s : f.pipe.sigs) {
        ParseContext c;
        for (const auto& fm : s.formals) c.vars[fm.name] = fm.sort;
        std::string b = body;
        auto pos = b.find('V');
        auto iv = std::find_if(s.formals.begin(), s.formals.end(), [](const Binder& fm) { return fm.sort == Sort::Int; });
        if (pos != std::string::npos) {
          if (iv == s.formals.end()) continue;
          b.replace(pos, 1, iv->name);
        }
        a[s.name] = {s.formals, parse_formula(b, c)};
      }
      auto all = [&](const std::vector<Pvc>& ps) {
        for (const auto& p : ps)
          if (!holds(plug_pvc(p, a).closed(), {}, eo)) return false;
        return true;
      };
      EXPECT_EQ(all(f.pipe.original), all(f.pipe.pvcs)) << body;
    }
  }
}

TEST(Skolemize, RightExistential) {
  Pvc p = make_pvc("(= (mod (+ a b) 2) 0)", "(exists ((k Int)) (= (+ a b) (* 2 k)))");
  p.universals = {{"a", Sort::Int}, {"b", Sort::Int}};
  NameSupply names;
  Pvc s = skolemize_rhs_existentials(p, names);
  ASSERT_EQ(s.skolems.size(), 1u);
  const auto& [fn, inputs] = s.skolems[0];
  ASSERT_EQ(inputs.size(), 2u);
  EXPECT_EQ(inputs[0].name, "a");
  EXPECT_EQ(inputs[1].name, "b");
  EXPECT_FALSE(s.rhs->kind == FK::Exists);
  EXPECT_TRUE(has_funs(s.rhs));
  // With f(a, b) = (a + b) div 2 the skolemized form is valid, hence so is
  // the original.
  EvalOptions eo;
  eo.lo = -4;
  eo.hi = 4;
  eo.funs[fn] = [](const std::vector<std::int64_t>& v) { return euclid_div(v[0] + v[1], 2); };
  EXPECT_TRUE(holds(s.closed(), {}, eo));
  EXPECT_TRUE(holds(p.closed(), {}, eo));
}

TEST(Skolemize, IdentityWithoutExistentials) {
  Pvc p = make_pvc("(< x 1)", "(< x 2)");
  NameSupply names;
  Pvc s = skolemize_rhs_existentials(p, names);
  EXPECT_TRUE(s.skolems.empty());
  EXPECT_TRUE(equal(s.body(), p.body()));
}

TEST(Skolemize, NegatedExistentialUntouched) {
  Pvc p = make_pvc("(< x 1)", "(not (exists ((k Int)) (= x (* 2 k))))");
  NameSupply names;
  Pvc s = skolemize_rhs_existentials(p, names);
  EXPECT_TRUE(s.skolems.empty());
  EXPECT_TRUE(equal(s.rhs, p.rhs));
}

TEST(PlugIn, PlusTwo) {
  Built f = build(kPlusTwo);
  auto a = plus_two_assignment();
  EXPECT_EQ(to_string(plug_pvc(f.pipe.pvcs[1], a).body()), "(=> true (= (mod 2 2) 0))");
  Skel s = plug_in(f.pipe.root, plus_two_assignment("true"));
  EXPECT_TRUE(check_syntactic(s, f.bench.grammar, 0).empty());
}

TEST(PlugIn, Errors) {
  Built f = build(kPlusTwo);
  EXPECT_THROW(plug_pvc(f.pipe.pvcs[1], Assignment{}), Error);
  Assignment bad;
  bad["Q_N"] = {{{"a", Sort::Int}, {"b", Sort::Int}}, parse_formula("(= a b)")};
  EXPECT_THROW(plug_pvc(f.pipe.pvcs[1], bad), Error);
  EXPECT_THROW(plug_in(f.pipe.root, Assignment{}), Error);
  // Partial plugging keeps unknown parameters.
  Pvc kept = plug_pvc(f.pipe.pvcs[1], Assignment{}, 0, true);
  EXPECT_TRUE(has_params(kept.body()));
}

TEST(PlugIn, VectorIteWithBoundSummary) {
  Built f = build(kVecIte);
  Assignment a;
  for (const auto& s : f.pipe.sigs) {
    ParseContext c;
    for (const auto& fm : s.formals) c.vars[fm.name] = fm.sort;
    const std::string v = s.formals.front().name;
    a[s.name] = {s.formals,
                 parse_formula("(exists ((n Int)) (forall ((i Index)) (< (select " + v + " i) n)))", c)};
  }
  Skel s = plug_in(f.pipe.root, a, 3);
  EXPECT_TRUE(check_syntactic(s, f.bench.grammar, 3).empty());
}
