#include <gtest/gtest.h>
#include <signal.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <random>
#include <thread>

#include "support/fixtures.hpp"
#include "wul/oracle.hpp"
#include "wul/solver.hpp"

using namespace wul;
using namespace wul::testing;

namespace {

SolverConfig z3_only() {
  SolverConfig c = SolverConfig::defaults();
  c.sygus.clear();
  c.timeout = 10;
  return c;
}

std::string temp_path(const std::string& tag) {
  return ::testing::TempDir() + "wul_" + tag + "_" + std::to_string(::getpid());
}

// Runs sh with a script; the query file becomes $1.
std::vector<std::string> sh(const std::string& script) { return {"/bin/sh", "-c", script, "sh", "{file}"}; }

int read_pid(const std::string& path) {
  for (int i = 0; i < 200; ++i) {
    std::ifstream in(path);
    int pid = 0;
    if (in >> pid && pid > 0) return pid;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return 0;
}

bool alive(int pid) { return ::kill(pid, 0) == 0 || errno != ESRCH; }

}  // namespace

TEST(EmitSmt, Deterministic) {
  Formula g = parse_formula("(forall ((a Int)) (=> (= (mod a 2) 0) (not (= a 3))))");
  SolverQuery a = emit_smt(g), b = emit_smt(g);
  EXPECT_EQ(a.text, b.text);
  EXPECT_NE(a.text.find("(check-sat)"), std::string::npos);
  EXPECT_EQ(choose_logic(parse_formula("(< x 1)")), choose_logic(parse_formula("(< y 2)")));
}

TEST(EmitSmt, RefusesParameters) {
  ParseContext c;
  c.params = {"Q"};
  EXPECT_THROW(emit_smt(parse_formula("(Q 1)", c)), Error);
}

TEST(EmitSmt, VectorsAreScalarized) {
  SolverQuery q = emit_smt(parse_formula("(forall ((i Index)) (<= 0 (select x i)))", {{{"x", Sort::IntVec}}, {}, {}}), 2);
  EXPECT_NE(q.text.find("x[1]"), std::string::npos);
  EXPECT_EQ(q.text.find("Index"), std::string::npos);
}

TEST(Backend, Verdicts) {
  SolverBackend b(z3_only());
  EXPECT_EQ(b.check(emit_smt(parse_formula("(=> (= (mod a 2) 0) (not (= a 3)))"))).outcome, Outcome::Valid);
  SolverVerdict v = b.check(emit_smt(parse_formula("(= 0 1)")));
  EXPECT_EQ(v.outcome, Outcome::Invalid);
  v = b.check(emit_smt(parse_formula("(not (= a 3))")));
  ASSERT_EQ(v.outcome, Outcome::Invalid);
  auto m = parse_model(v.model);
  ASSERT_TRUE(m.count("a")) << v.model;
  EXPECT_EQ(to_string(m.at("a")), "3");
  EXPECT_EQ(b.calls(), 3);
}

TEST(Backend, MissingExecutable) {
  SolverConfig c = z3_only();
  c.smt = {"/nonexistent/solver", "{file}"};
  SolverBackend b(c);
  EXPECT_EQ(b.check(emit_smt(parse_formula("(= 0 0)"))).outcome, Outcome::SolverError);
}

TEST(Backend, GarbageOutputIsError) {
  SolverConfig c = z3_only();
  c.smt = sh("echo hello");
  SolverBackend b(c);
  Outcome o = b.check(emit_smt(parse_formula("(= 0 0)"))).outcome;
  EXPECT_TRUE(o == Outcome::SolverError || o == Outcome::Unknown) << to_string(o);
}

TEST(Backend, TimeoutKillsChild) {
  std::string pidfile = temp_path("timeout");
  SolverConfig c = z3_only();
  c.smt = sh("echo $$ > " + pidfile + "; exec sleep 30");
  SolverBackend b(c);
  SolverQuery q = emit_smt(parse_formula("(= 0 0)"), 0, 0.5);
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(b.check(q).outcome, Outcome::Timeout);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
  int pid = read_pid(pidfile);
  ASSERT_GT(pid, 0);
  EXPECT_FALSE(alive(pid));
  std::remove(pidfile.c_str());
}

TEST(Backend, RaceCancelsLoser) {
  std::string pidfile = temp_path("race");
  SolverConfig c = z3_only();
  c.smt = sh("sleep 0.3; echo unsat");
  c.sygus = sh("echo $$ > " + pidfile + "; exec sleep 30");
  SolverBackend b(c);
  SolverQuery smt = emit_smt(parse_formula("(= 0 0)"), 0, 10);
  SolverQuery sy;
  sy.kind = QueryKind::SygusSynthesis;
  sy.text = "(check-synth)\n";
  sy.timeout = 10;
  auto t0 = std::chrono::steady_clock::now();
  SolverVerdict v = b.race(smt, sy);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 5.0);
  EXPECT_EQ(v.outcome, Outcome::Valid);
  EXPECT_EQ(v.winner, "smt");
  int pid = read_pid(pidfile);
  ASSERT_GT(pid, 0);
  EXPECT_FALSE(alive(pid));
  EXPECT_EQ(b.calls(), 2);
  std::remove(pidfile.c_str());
}

TEST(ParseModel, Z3Format) {
  auto m = parse_model(
      "sat\n(\n  (define-fun y () Int\n    (- 2))\n  (define-fun b () Bool\n    true)\n  (define-fun x () Int\n    3)\n)\n");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(to_string(m.at("x")), "3");
  EXPECT_EQ(to_string(m.at("y")), "(- 2)");
  EXPECT_EQ(to_string(m.at("b")), "true");
  EXPECT_TRUE(parse_model("unsat\n").empty());
}

TEST(EmitSygus, Errors) {
  Built f = build(kPlusTwo);
  // No grammar for a parameter of the PVCs.
  EXPECT_THROW(emit_sygus(f.pipe.pvcs, {}), Error);
  SynthTarget wrong{"Q_N", {{"a", Sort::Int}, {"b", Sort::Int}}, Sort::Bool, std::nullopt};
  EXPECT_THROW(emit_sygus(f.pipe.pvcs, {wrong}), Error);
  SynthTarget ok{"Q_N", {{"e_t", Sort::Int}}, Sort::Bool,
                 parse_sexpr("((B Bool ((= (mod e_t C) 0))) (C Int (2 3)))")};
  SolverQuery q = emit_sygus(f.pipe.pvcs, {ok});
  EXPECT_EQ(q.kind, QueryKind::SygusSynthesis);
  EXPECT_NE(q.text.find("(synth-fun Q_N"), std::string::npos) << q.text;
  EXPECT_NE(q.text.find("(check-synth)"), std::string::npos);
}

TEST(Arithmetic, ModDivAgreeWithZ3) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-20, 20);
  std::vector<Formula> facts, wrong;
  while (facts.size() < 60) {
    std::int64_t a = d(rng), b = d(rng);
    if (b == 0) continue;
    facts.push_back(f::eq(f::mod(f::num(a), f::num(b)), f::num(euclid_mod(a, b))));
    facts.push_back(f::eq(f::div(f::num(a), f::num(b)), f::num(euclid_div(a, b))));
    EXPECT_EQ(eval(f::mod(f::num(a), f::num(b)), {}), euclid_mod(a, b));
    EXPECT_EQ(a, b * euclid_div(a, b) + euclid_mod(a, b));
    EXPECT_GE(euclid_mod(a, b), 0);
    if (wrong.size() < 3) wrong.push_back(f::eq(f::mod(f::num(a), f::num(b)), f::num(euclid_mod(a, b) + 1)));
  }
  SolverBackend backend(z3_only());
  EXPECT_EQ(backend.check(emit_smt(f::land(facts))).outcome, Outcome::Valid);
  for (const auto& w : wrong) EXPECT_EQ(backend.check(emit_smt(w)).outcome, Outcome::Invalid) << to_string(w);
  EXPECT_THROW(eval(f::mod(f::num(1), f::num(0)), {}), EvalError);
}

TEST(ParallelMap, PreservesOrder) {
  auto out = parallel_map<int>(20, 4, [](std::size_t i) { return static_cast<int>(i * i); });
  ASSERT_EQ(out.size(), 20u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], static_cast<int>(i * i));
}

TEST(SolverConfig, LoadAndReject) {
  std::string p = temp_path("cfg");
  {
    std::ofstream o(p);
    o << R"({"smt": ["z3", "-model", "{file}"], "timeout": 5, "jobs": 2})";
  }
  SolverConfig c = SolverConfig::load(p);
  EXPECT_EQ(c.timeout, 5);
  EXPECT_EQ(c.effective_jobs(), 2);
  {
    std::ofstream o(p);
    o << R"({"smt": [], "timeout": 5})";
  }
  EXPECT_THROW(SolverConfig::load(p), Error);
  {
    std::ofstream o(p);
    o << "{not json";
  }
  EXPECT_THROW(SolverConfig::load(p), Error);
  std::remove(p.c_str());
}
