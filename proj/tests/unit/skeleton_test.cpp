#include <gtest/gtest.h>

#include <set>

#include "support/fixtures.hpp"
#include "support/random_bench.hpp"
#include "wul/skeleton.hpp"
#include "wul/vcgen.hpp"

using namespace wul;
using namespace wul::testing;

namespace {

ParseContext q_ctx() {
  ParseContext c;
  c.params = {"Q_N"};
  return c;
}

const SkelNode* find(const Skel& root, Rule r) {
  const SkelNode* hit = nullptr;
  visit_preorder(root, [&](const Skel& n) {
    if (!hit && n->rule == r) hit = n.get();
  });
  return hit;
}

}  // namespace

TEST(Skeleton, IntLiteral) {
  Rtg g = parse_grammar("(nonterm N IntExpr 2 (+ 2 N))");
  SkeletonBuilder b(g, 0);
  Skel s = b.w_skel(std::make_shared<Context>(), term::int_lit(2), parse_formula("(Q_N e_t)", q_ctx()));
  EXPECT_EQ(s->rule, Rule::Int);
  EXPECT_EQ(to_string(s->pre), "(Q_N 2)");
  EXPECT_TRUE(s->kids.empty());
}

TEST(Skeleton, PlusTwoShape) {
  Built f = build(kPlusTwo);
  const Skel& root = f.pipe.root;
  EXPECT_EQ(root->rule, Rule::Weaken);
  EXPECT_EQ(to_string(root->pre), "true");
  EXPECT_EQ(to_string(root->post), "(not (= e_t 3))");
  const Skel& adapt = root->kids.at(0);
  EXPECT_EQ(adapt->rule, Rule::Adapt);
  EXPECT_TRUE(alpha_equal(adapt->pre, parse_formula("(forall ((a Int)) (=> (Q_N a) (not (= a 3))))", q_ctx())));
  const Skel& inner = adapt->kids.at(0);
  EXPECT_EQ(inner->rule, Rule::Weaken);
  EXPECT_EQ(to_string(inner->post), "(Q_N e_t)");
  const Skel& hp = inner->kids.at(0);
  EXPECT_EQ(hp->rule, Rule::HP);
  ASSERT_EQ(hp->kids.size(), 2u);
  EXPECT_EQ(rule_label(*hp->kids[1]), "Bin-Plus");
  const SkelNode* bin = hp->kids[1].get();
  EXPECT_EQ(to_string(bin->kids[1]->post), "(Q_N (+ x1 e_t))");
  EXPECT_EQ(bin->kids[1]->kids.at(0)->rule, Rule::ApplyHP);
  EXPECT_EQ(f.pipe.sigs.size(), 1u);
  EXPECT_EQ(f.pipe.sigs[0].name, "Q_N");
  std::vector<std::string> want = {"Int", "Int", "ApplyHP", "Adapt", "Bin-Plus", "HP", "Weaken", "Adapt", "Weaken"};
  EXPECT_EQ(rule_sequence(root), want);
}

TEST(Skeleton, AssignConstant) {
  Rtg g = parse_grammar("(nonterm S Stmt (:= x 0))");
  SkeletonBuilder b(g, 0);
  Skel s = b.w_skel(std::make_shared<Context>(), parse_term(parse_sexpr("(:= x 0)"), g), parse_formula("(= x 0)"));
  EXPECT_EQ(s->rule, Rule::Assign);
  EXPECT_EQ(s->kids.at(0)->rule, Rule::Int);
  EXPECT_EQ(to_string(s->pre), "(= 0 0)");
}

TEST(Skeleton, PSkelExactWeakenIsTrivial) {
  Built f = build("(nonterm S Stmt (:= x 0))\n(pre (= 0 0))\n(post (= x 0))\n");
  ASSERT_EQ(f.pipe.original.size(), 1u);
  EXPECT_EQ(to_string(f.pipe.original[0].body()), "(=> (= 0 0) (= 0 0))");
}

TEST(Skeleton, VectorIteShape) {
  Built f = build(kVecIte);
  EXPECT_TRUE(check_syntactic(f.pipe.root, f.bench.grammar, 3).empty());
  std::vector<Rule> top;
  const SkelNode* n = f.pipe.root.get();
  for (int i = 0; i < 4 && n; ++i) {
    top.push_back(n->rule);
    n = n->kids.empty() ? nullptr : n->kids[0].get();
  }
  std::vector<Rule> want = {Rule::Weaken, Rule::Adapt, Rule::Weaken, Rule::HP};
  EXPECT_EQ(top, want);
  const SkelNode* hp = find(f.pipe.root, Rule::HP);
  ASSERT_TRUE(hp);
  ASSERT_EQ(hp->kids.size(), 2u);
  EXPECT_EQ(hp->kids[0]->rule, Rule::VSIf);
  // Summaries for S and N; B and A are non-recursive.
  std::set<std::string> names;
  for (const auto& s : f.pipe.sigs) names.insert(s.site);
  EXPECT_EQ(names, (std::set<std::string>{"S", "N"}));
}

TEST(Skeleton, CheckSyntacticOnRandomBenchmarks) {
  BenchGen gen(99);
  for (int i = 0; i < 100; ++i) {
    RandomBench rb = gen.next();
    Built f = build(rb.text());
    auto v = check_syntactic(f.pipe.root, f.bench.grammar, 0);
    EXPECT_TRUE(v.empty()) << rb.text() << v.front().path << ": " << v.front().message;
  }
}

TEST(Skeleton, CorruptedSeqIsReported) {
  Built f = build("(nonterm S Stmt (seq (:= x 1) (:= x 2)))\n(post (= x 2))\n");
  Skel seq;
  visit_preorder(f.pipe.root, [&](const Skel& n) {
    if (!seq && n->rule == Rule::Seq) seq = n;
  });
  ASSERT_TRUE(seq);
  std::swap(seq->kids[0]->post, seq->kids[1]->post);
  auto v = check_syntactic(f.pipe.root, f.bench.grammar, 0);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().path, seq->path);
}

TEST(Skeleton, PlugInKeepsSyntax) {
  Built f = build(kPlusTwo);
  Skel plugged = plug_in(f.pipe.root, plus_two_assignment());
  EXPECT_TRUE(check_syntactic(plugged, f.bench.grammar, 0).empty());
  visit_preorder(plugged, [](const Skel& n) {
    EXPECT_FALSE(has_params(n->pre)) << n->path;
    EXPECT_FALSE(has_params(n->post)) << n->path;
  });
}

TEST(Skeleton, ScalarUsesSimpleRules) {
  Built f = build("(nonterm S Stmt (ite (< x 1) (:= x 0) (:= x 1)) (while (< x 3) (:= x (+ x 1))))\n(post (< x 4))\n");
  EXPECT_EQ(count_rule(f.pipe.root, Rule::SimpleIf), 1u);  // the loop body is not wrapped in the scalar rule
  EXPECT_EQ(count_rule(f.pipe.root, Rule::VSIf), 0u);
  EXPECT_EQ(count_rule(f.pipe.root, Rule::SimpleWhile), 1u);
  RuleSet rs = vs_rules_selector(0);
  EXPECT_EQ(rs.conditional, Rule::SimpleIf);
  EXPECT_EQ(vs_rules_selector(2).loop, Rule::VSWhile);
}

TEST(Skeleton, VectorConditional) {
  Built f = build("(set-vector-length 2)\n(nonterm S Stmt (ite (= y 0) (:= x 0) (:= x 1)))\n(post (= x[1] 0))\n");
  const SkelNode* vs = find(f.pipe.root, Rule::VSIf);
  ASSERT_TRUE(vs);
  const std::string guard = to_string(vs->kids.at(0)->post);
  EXPECT_NE(guard.find("(= (select " + vs->aux + " i) (select b_t i))"), std::string::npos) << guard;
  EXPECT_TRUE(check_syntactic(f.pipe.root, f.bench.grammar, 2).empty());
}

TEST(Skeleton, VectorLoop) {
  Built f = build("(set-vector-length 2)\n(nonterm S Stmt (while (< x 3) (:= x (+ x 1))))\n(post (= x[1] x[2]))\n");
  const SkelNode* w = find(f.pipe.root, Rule::VSWhile);
  ASSERT_TRUE(w);
  ASSERT_EQ(w->kids.size(), 2u);
  EXPECT_EQ(to_string(w->kids[1]->prog), "(ite (< x 3) (:= x (+ x 1)) skip)");
  EXPECT_EQ(w->kids[1]->pre->kind, FK::ParamApp);
  EXPECT_TRUE(check_syntactic(f.pipe.root, f.bench.grammar, 2).empty());
}

TEST(Skeleton, ParameterCount) {
  Built f = build(
      "(nonterm S Stmt (seq L L) (seq T S))\n"
      "(nonterm L Stmt (while (< x 3) (:= x E)))\n"
      "(nonterm T Stmt (:= x E))\n"
      "(nonterm E IntExpr 1 (+ E x))\n"
      "(post (< 0 x))\n");
  std::size_t loops = count_rule(f.pipe.root, Rule::SimpleWhile);
  std::size_t summaries = 0, invariants = 0;
  for (const auto& s : f.pipe.sigs) (s.kind == ParamSig::Kind::Summary ? summaries : invariants)++;
  EXPECT_EQ(invariants, loops);
  EXPECT_EQ(summaries, 2u);  // S and E
  // One HP node per use site, all sharing the nonterminal's parameter.
  std::set<std::string> hp;
  visit_preorder(f.pipe.root, [&](const Skel& n) {
    if (n->rule == Rule::HP) hp.insert(to_string(n->prog));
  });
  EXPECT_EQ(hp, (std::set<std::string>{"E", "S"}));
}

TEST(Skeleton, AdaptFollowsApplyHP) {
  Built f = build(kVecIte);
  visit_preorder(f.pipe.root, [](const Skel& n) {
    for (const auto& k : n->kids)
      if (k->rule == Rule::ApplyHP) EXPECT_EQ(n->rule, Rule::Adapt) << k->path;
  });
}

TEST(Skeleton, Deterministic) {
  Built a = build(kVecIte), b = build(kVecIte);
  EXPECT_EQ(render(a.pipe.root), render(b.pipe.root));
}
