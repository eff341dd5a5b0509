// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "support/random_bench.hpp"
#include "wul/driver.hpp"
#include "wul/oracle.hpp"
#include "wul/store.hpp"
#include "wul/synth.hpp"

using namespace wul;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kRoot = WUL_SOURCE_DIR;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Check {
  bool pass = true;
  std::string detail;
  void note(const std::string& s) {
    if (!detail.empty()) detail += "; ";
    detail += s;
  }
  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

Benchmark bench(const std::string& name) { return load_benchmark(kRoot + "/benchmarks/" + name); }

SolverConfig quick_config(double timeout, double total) {
  SolverConfig c = SolverConfig::defaults();
  c.timeout = timeout;
  c.total_timeout = total;
  return c;
}

ParseContext summary_ctx(const std::vector<std::string>& params) {
  ParseContext c;
  c.vars["e_t"] = Sort::Int;
  for (const auto& p : params) c.params.insert(p);
  return c;
}

// Plus-two grammar: PVC shapes before/after optimization and an end-to-end proof.
Check criterion1() {
  Check o;
  auto t0 = Clock::now();
  Benchmark b = bench("plus-two.ul");
  Pipeline p = build_pipeline(b, true);
  ParseContext c = summary_ctx({"Q_N"});
  const char* original[] = {
      "(=> true (forall ((a Int)) (=> (Q_N a) (not (= a 3)))))",
      "(=> true (and (Q_N 2) (forall ((a Int)) (=> (Q_N a) (Q_N (+ 2 a))))))",
  };
  const char* optimized[] = {
      "(forall ((a Int)) (=> (and true (Q_N a)) (not (= a 3))))",
      "(=> true (Q_N 2))",
      "(forall ((a Int)) (=> (and true (Q_N a)) (Q_N (+ 2 a))))",
  };
  if (p.original.size() != 2) o.fail("expected 2 PVCs, got " + std::to_string(p.original.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(2, p.original.size()); ++i)
    if (!alpha_equal(p.original[i].closed(), parse_formula(original[i], c)))
      o.fail("PVC " + std::to_string(i) + " is " + to_string(p.original[i].closed()));
  if (p.pvcs.size() != 3) o.fail("expected 3 optimized PVCs, got " + std::to_string(p.pvcs.size()));
  for (std::size_t i = 0; i < std::min<std::size_t>(3, p.pvcs.size()); ++i)
    if (!alpha_equal(p.pvcs[i].closed(), parse_formula(optimized[i], c)))
      o.fail("optimized PVC " + std::to_string(i) + " is " + to_string(p.pvcs[i].closed()));

  RunOptions ro;
  ro.dump_vcs = true;
  std::ostringstream out;
  RunStats st;
  int rc = cmd_prove(b, ro, out, &st);
  if (rc != kExitProven) o.fail("prove exit " + std::to_string(rc) + ":\n" + out.str());
  if (out.str().find("; pvcs (2)") == std::string::npos || out.str().find("; optimized pvcs (3)") == std::string::npos)
    o.fail("--dump-vcs output lacks the PVC sections");
  std::size_t valid = 0;
  for (const auto& v : st.vcs) valid += v.verdict.outcome == wul::Outcome::Valid;
  if (valid != 3) o.fail(std::to_string(valid) + "/3 VCs valid");
  double t = since(t0);
  if (t >= 5) o.fail("took " + std::to_string(t) + " s");
  o.note(std::to_string(valid) + "/3 valid in " + std::to_string(t).substr(0, 5) + " s");
  return o;
}

Check criterion2() {
  Check o;
  Benchmark b = bench("plus-two.ul");
  Pipeline p = build_pipeline(b, true);
  std::vector<std::string> want = {"Int", "Int", "ApplyHP", "Adapt", "Bin-Plus", "HP", "Weaken", "Adapt", "Weaken"};
  auto got = rule_sequence(p.root);
  std::string s;
  for (const auto& r : got) s += (s.empty() ? "" : " ") + r;
  if (got != want) o.fail("rule sequence: " + s);
  auto viol = check_syntactic(p.root, b.grammar, 0);
  if (!viol.empty()) o.fail("skeleton check: " + viol.front().message);
  o.note(s);
  return o;
}

std::optional<std::int64_t> modulus_of(const Formula& g) {
  // (= (mod e_t n) 0) in either orientation
  if (g->kind != FK::Eq || g->kids.size() != 2) return std::nullopt;
  for (int side = 0; side < 2; ++side) {
    const Formula& m = g->kids[side];
    const Formula& z = g->kids[1 - side];
    if (m->kind == FK::Mod && m->kids[1]->kind == FK::IntConst && z->kind == FK::IntConst && z->value == 0)
      return m->kids[1]->value;
  }
  return std::nullopt;
}

Check criterion3() {
  Check o;
  Benchmark b = bench("plus-two-synth.ul");
  std::string methods;
  for (bool sygus : {true, false}) {
    auto t0 = Clock::now();
    Pipeline p = build_pipeline(b, true);
    std::map<std::string, TemplateGrammar> gs;
    gs["Q_N"] = parse_template(b.grammars.front().rules, p.sigs.front(), b.grammars.front().size_bound);
    SolverBackend backend(SolverConfig::defaults());
    SynthOptions so;
    so.use_sygus = sygus;
    SynthResult r = synthesize(p.pvcs, p.sigs, gs, backend, so);
    double t = since(t0);
    if (!r.assignment) {
      o.fail(std::string(sygus ? "sygus" : "enumerative") + " found nothing: " + r.detail);
      continue;
    }
    const Formula& body = r.assignment->at("Q_N").body;
    auto n = modulus_of(body);
    // Re-check from scratch.
    auto reports = discharge(p.pvcs, *r.assignment, 0, false, backend);
    bool ok = std::all_of(reports.begin(), reports.end(),
                          [](const VcReport& v) { return v.verdict.outcome == wul::Outcome::Valid; });
    if (!ok) o.fail("returned summary does not re-verify: " + to_string(body));
    if (!n || *n != 2) o.fail("returned " + to_string(body));
    if (t >= 10) o.fail(r.method + " took " + std::to_string(t) + " s");
    methods += (methods.empty() ? "" : ", ") + r.method + " " + to_string(body) + " in " + std::to_string(t).substr(0, 4) + " s";
  }
  // Through the command as well.
  std::ostringstream out;
  RunStats st;
  int rc = cmd_synth(b, RunOptions{}, out, &st);
  if (rc != kExitProven || out.str().find("Q_N(e_t) := (= (mod e_t 2) 0)") == std::string::npos)
    o.fail("synth command output:\n" + out.str());
  o.note(methods);
  return o;
}

Check criterion4() {
  Check o;
  Benchmark b = bench("vector-ite.ul");
  std::ostringstream out;
  RunStats st;
  int rc = cmd_prove(b, RunOptions{}, out, &st);
  if (rc != kExitProven) o.fail("prove exit " + std::to_string(rc) + ":\n" + out.str());
  OracleConfig c;
  c.k = b.k;
  c.depth = 5;
  TripleResult tr = check_triple(b.pre, b.grammar, b.program, b.post, c);
  if (!tr.holds) o.fail("oracle counterexample " + to_string(tr.cex->program));
  if (tr.programs == 0) o.fail("oracle enumerated no programs");
  o.note(std::to_string(st.vcs.size()) + " VCs, oracle " + std::to_string(tr.programs) + " programs at depth 5");
  return o;
}

// Template over the formals of a summary: small comparisons and parities.
std::string template_for(const ParamSig& sig) {
  std::string vars;
  for (const auto& f : sig.formals) vars += " " + f.name;
  return "((B Bool (true (<= V C) (<= C V) (= (mod V 2) D) (= V W) (= (mod V 2) (mod W 2)) (and B B)))"
         " (V Int (" + vars + "))"
         " (W Int (" + vars + "))"
         " (C Int (0 1 2 3 4 5 6))"
         " (D Int (0 1)))";
}

Check criterion5() {
  Check o;
  testing::BenchGen gen(20240501);
  int proven = 0, closed = 0, violations = 0, holds = 0;
  SolverConfig cfg = quick_config(2, 8);
  for (int i = 0; i < 200; ++i) {
    std::string text = gen.next().text();
    Benchmark b = parse_benchmark(text, "random" + std::to_string(i));
    OracleConfig oc;
    oc.depth = 4;
    TripleResult tr = check_triple(b.pre, b.grammar, b.program, b.post, oc);
    holds += tr.holds;
    Pipeline p = build_pipeline(b, true);
    std::ostringstream out;
    RunOptions ro;
    ro.config = cfg;
    RunStats st;
    int rc;
    if (p.sigs.empty()) {
      ++closed;
      rc = cmd_prove(b, ro, out, &st);
    } else {
      std::string extra;
      for (const auto& s : p.sigs) extra += "(summary-grammar " + s.site + " " + template_for(s) + " 7)\n";
      Benchmark b2 = parse_benchmark(text + extra, b.path);
      rc = cmd_synth(b2, ro, out, &st);
    }
    if (rc == kExitProven) {
      ++proven;
      if (!tr.holds) {
        ++violations;
        o.fail("benchmark " + std::to_string(i) + " proven but oracle found " + to_string(tr.cex->program) + "\n" + text +
               out.str());
      }
    }
  }
  o.note(std::to_string(proven) + " proven (" + std::to_string(closed) + " closed), " + std::to_string(holds) +
             " hold by oracle, " + std::to_string(violations) + " violations");
  if (proven == 0) o.fail("nothing proven; the property is vacuous");
  return o;
}

std::vector<Formula> summary_pool(const ParamSig& sig) {
  ParseContext c;
  std::vector<std::string> ints, bools;
  for (const auto& f : sig.formals) {
    c.vars[f.name] = f.sort;
    (f.sort == Sort::Bool ? bools : ints).push_back(f.name);
  }
  std::vector<std::string> src = {"true", "false"};
  for (const auto& b : bools) {
    src.push_back(b);
    src.push_back("(not " + b + ")");
  }
  if (!ints.empty()) {
    const std::string v = ints.front();
    for (const auto& t : {"(= (mod " + v + " 2) 0)", "(= (mod " + v + " 2) 1)", "(<= " + v + " 3)", "(<= 2 " + v + ")"})
      src.push_back(t);
    if (ints.size() > 1) {
      const std::string w = ints[1];
      src.push_back("(= " + v + " " + w + ")");
      src.push_back("(<= " + w + " " + v + ")");
    }
  }
  std::vector<Formula> out;
  for (const auto& s : src) out.push_back(parse_formula(s, c));
  return out;
}

bool all_hold(const std::vector<Pvc>& pvcs, const Assignment& a) {
  EvalOptions eo;
  eo.lo = 0;
  eo.hi = 3;
  for (const auto& v : pvcs) {
    try {
      if (!holds(plug_pvc(v, a).closed(), {}, eo)) return false;
    } catch (const EvalError&) {
      return false;
    }
  }
  return true;
}

Check criterion6() {
  Check o;
  testing::BenchGen gen(777);
  int sets = 0, sat = 0, discrepancies = 0, pointwise = 0;
  while (sets < 50) {
    Benchmark b = parse_benchmark(gen.next().text(), "pvcs");
    Pipeline p = build_pipeline(b, true);
    if (p.sigs.empty()) continue;
    ++sets;
    std::vector<std::vector<Formula>> pools;
    for (const auto& s : p.sigs) pools.push_back(summary_pool(s));
    bool sat_orig = false, sat_opt = false;
    std::vector<std::size_t> idx(pools.size(), 0);
    for (;;) {
      Assignment a;
      for (std::size_t i = 0; i < idx.size(); ++i) a[p.sigs[i].name] = {p.sigs[i].formals, pools[i][idx[i]]};
      bool x = all_hold(p.original, a), y = all_hold(p.pvcs, a);
      sat_orig |= x;
      sat_opt |= y;
      pointwise += x != y;
      std::size_t d = 0;
      while (d < idx.size() && ++idx[d] == pools[d].size()) idx[d++] = 0;
      if (d == idx.size()) break;
    }
    sat += sat_orig;
    if (sat_orig != sat_opt) {
      ++discrepancies;
      o.fail("set " + std::to_string(sets) + ": original " + (sat_orig ? "sat" : "unsat") + ", optimized " +
             (sat_opt ? "sat" : "unsat"));
    }
  }
  o.note(std::to_string(sets) + " sets, " + std::to_string(sat) + " satisfiable, " + std::to_string(discrepancies) +
             " discrepancies, " + std::to_string(pointwise) + " per-assignment differences");
  return o;
}

// A family of templates over a shared "even numbers" nonterminal. The
// nonterminal name alternates to exercise fingerprint renaming.
std::vector<std::string> reuse_templates() {
  std::vector<std::string> out;
  for (int i = 0; i < 24; ++i) {
    std::string e = i % 2 ? "M" : "E";
    std::string grammar = "(nonterm " + e + " IntExpr 2 (+ 2 " + e + "))\n";
    int c = i % 4;
    std::string start, post;
    switch (i % 6) {
      case 0:
        start = "(nonterm S Stmt (:= x (+ " + e + " " + std::to_string(c) + ")))";
        post = "(= (mod x 2) " + std::to_string(c % 2) + ")";
        break;
      case 1:
        start = "(nonterm S Stmt (:= x (+ " + e + " " + std::to_string(c) + ")) (:= x " + std::to_string(c + 1) + "))";
        post = "(= (mod x 2) " + std::to_string(c % 2) + ")";  // the second production breaks it
        break;
      case 2:
        start = "(nonterm S Stmt (seq (:= x " + e + ") (:= x (+ x " + std::to_string(c) + "))))";
        post = "(not (= x " + std::to_string(2 * c + 1) + "))";
        break;
      case 3:
        start = "(nonterm S IntExpr (+ " + e + " " + e + ") (+ " + e + " " + std::to_string(2 * c) + "))";
        post = "(= (mod e_t 2) 0)";
        break;
      case 4:
        start = "(nonterm S Stmt (ite (< x " + std::to_string(c) + ") (:= x " + e + ") (:= x (+ " + e + " 2))))";
        post = "(not (= x 5))";
        break;
      default:
        start = "(nonterm S IntExpr (+ " + e + " 1))";
        post = "(= e_t 3)";  // false for 5, 7, ...
        break;
    }
    out.push_back(start + "\n" + grammar + "(start S)\n(post " + post + ")\n(summary " + e + " (= (mod e_t 2) 0))\n");
  }
  return out;
}

Check criterion7() {
  Check o;
  char tmpl[] = "/tmp/wul-store-XXXXXX";
  int fd = ::mkstemp(tmpl);
  ::close(fd);
  std::string store = tmpl;
  {
    // Pre-prove the shared summary.
    RunOptions ro;
    ro.save_store = store;
    std::ostringstream out;
    if (cmd_synth(bench("plus-two-synth.ul"), ro, out) != kExitProven) o.fail("could not seed the store:\n" + out.str());
  }
  int n = 0, hits = 0, agree = 0, proven = 0;
  int calls_ctx = 0, calls_no = 0;
  for (const auto& text : reuse_templates()) {
    Benchmark b = parse_benchmark(text, "reuse-" + std::to_string(n));
    RunOptions no, ctx;
    ctx.ctx_store = store;
    std::ostringstream o1, o2;
    RunStats s1, s2;
    int r1 = cmd_prove(b, no, o1, &s1);
    int r2 = cmd_prove(b, ctx, o2, &s2);
    ++n;
    agree += r1 == r2;
    proven += r1 == kExitProven;
    calls_no += s1.solver_calls;
    calls_ctx += s2.solver_calls;
    if (r1 != r2) o.fail("template " + std::to_string(n) + " verdicts differ:\n" + text);
    if (s2.store_hits > 0) {
      ++hits;
      if (s2.solver_calls >= s1.solver_calls)
        o.fail("template " + std::to_string(n) + ": ctx used " + std::to_string(s2.solver_calls) + " calls vs " +
               std::to_string(s1.solver_calls));
    }
  }
  fs::remove(store);
  if (hits == 0) o.fail("no store hits");
  o.note(std::to_string(n) + " templates, " + std::to_string(proven) +
              " proven, " + std::to_string(hits) + " store hits, solver calls " + std::to_string(calls_ctx) +
              " (ctx) vs " + std::to_string(calls_no) + " (no ctx)");
  return o;
}

Check criterion8() {
  Check o;
  ParseContext c;
  c.vars["x"] = Sort::IntVec;
  c.vars["y"] = Sort::IntVec;
  c.vars["b_loop"] = Sort::BoolVec;
  Formula q = parse_formula("(= x[1] x[2])", c);
  Formula t = t_transform(q, "b_loop", {{"x", "y"}});
  Formula want = parse_formula(
      "(and (=> (and b_loop[1] b_loop[2]) (= y[1] y[2]))"
      "     (=> (and b_loop[1] (not b_loop[2])) (= y[1] x[2]))"
      "     (=> (and (not b_loop[1]) b_loop[2]) (= x[1] y[2]))"
      "     (=> (and (not b_loop[1]) (not b_loop[2])) (= x[1] x[2])))",
      c);
  if (!alpha_equal(t, want)) o.fail("got " + to_string(t));
  Formula qy = substitute(q, [] {
    Subst s;
    s.rename_vector("x", "y");
    return s;
  }());
  int states = 0;
  EvalOptions eo;
  eo.k = 2;
  for (std::int64_t a = 0; a <= 3; ++a)
    for (std::int64_t b = 0; b <= 3; ++b)
      for (std::int64_t ya = 0; ya <= 3; ++ya)
        for (std::int64_t yb = 0; yb <= 3; ++yb)
          for (bool on : {false, true}) {
            State s{{"x", Val::vec({a, b})}, {"y", Val::vec({ya, yb})}, {"b_loop", Val::vec({on, on}, Sort::Bool)}};
            bool expect = holds(on ? qy : q, s, eo);
            if (holds(t, s, eo) != expect) {
              o.fail("differs at " + to_string(s));
              return o;
            }
            ++states;
          }
  o.note("four cases; equivalent on " + std::to_string(states) + " states with b_loop all-false / all-true");
  return o;
}

Check criterion9() {
  Check o;
  Benchmark b = bench("plus-two-negative.ul");
  Pipeline p = build_pipeline(b, true);
  SolverBackend backend(SolverConfig::defaults());
  // Every template instance fails the re-check.
  int refuted = 0;
  for (int n = 2; n <= 8; ++n) {
    Assignment a;
    a["Q_N"] = {p.sigs.front().formals, f::eq(f::mod(f::var("e_t"), f::num(n)), f::num(0))};
    auto rs = discharge(p.pvcs, a, 0, false, backend);
    bool all = std::all_of(rs.begin(), rs.end(), [](const VcReport& v) { return v.verdict.outcome == wul::Outcome::Valid; });
    if (all) o.fail("n=" + std::to_string(n) + " verifies");
    else ++refuted;
  }
  for (bool sygus : {true, false}) {
    std::map<std::string, TemplateGrammar> gs;
    gs["Q_N"] = parse_template(b.grammars.front().rules, p.sigs.front(), b.grammars.front().size_bound);
    SynthOptions so;
    so.use_sygus = sygus;
    SynthResult r = synthesize(p.pvcs, p.sigs, gs, backend, so);
    if (r.assignment) o.fail("synthesis returned " + to_string(*r.assignment));
  }
  std::ostringstream out;
  if (cmd_synth(b, RunOptions{}, out) != kExitUnproven || out.str().find("none found") == std::string::npos)
    o.fail("synth command:\n" + out.str());
  OracleConfig oc;
  TripleResult tr = check_triple(b.pre, b.grammar, b.program, b.post, oc);
  std::string cex = tr.cex ? to_string(tr.cex->program) : "none";
  if (tr.holds || cex != "(+ 2 2)") o.fail("oracle counterexample: " + cex);
  o.note(std::to_string(refuted) + "/7 moduli refuted, oracle counterexample " + cex);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  std::vector<Criterion> all = {
      {"plus-two end-to-end", criterion1},
      {"skeleton rule sequence", criterion2},
      {"template synthesis", criterion3},
      {"bounded vector example", criterion4},
      {"random soundness", criterion5},
      {"optimization conservativity", criterion6},
      {"summary reuse", criterion7},
      {"t transform", criterion8},
      {"negative control", criterion9},
  };
  int failed = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    Check r;
    auto t0 = Clock::now();
    try {
      r = all[i].run();
    } catch (const std::exception& e) {
      r.fail(std::string("exception: ") + e.what());
    }
    failed += !r.pass;
    std::printf("%s %zu %s (%.1fs): %s\n", r.pass ? "PASS" : "FAIL", i + 1, all[i].name, since(t0), r.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
