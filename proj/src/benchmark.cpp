#include "wul/benchmark.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace wul {

ParseContext Benchmark::formula_context() const {
  ParseContext c;
  Sort i = k > 0 ? Sort::IntVec : Sort::Int;
  for (const auto& nt : grammar.nonterminals())
    for (const auto& v : program_vars(grammar, term::nonterminal(nt.name))) c.vars[v] = i;
  if (program)
    for (const auto& v : program_vars(grammar, program)) c.vars[v] = i;
  c.vars[kIntResult] = i;
  c.vars[kBoolResult] = k > 0 ? Sort::BoolVec : Sort::Bool;
  return c;
}

namespace {

void expect_size(const Sexpr& e, std::size_t n, const char* shape) {
  if (e.size() != n) fail_at(e, std::string("expected ") + shape);
}

struct Example {
  std::vector<std::pair<std::string, std::int64_t>> in, out;
};

std::vector<std::pair<std::string, std::int64_t>> bindings(const Sexpr& e, bool out_side) {
  std::vector<std::pair<std::string, std::int64_t>> r;
  for (std::size_t i = 1; i < e.size(); ++i) {
    const Sexpr& b = e[i];
    if (b.is_int() && out_side) {
      r.push_back({kIntResult, b.as_int()});
      continue;
    }
    if (!b.is_list() || b.size() != 2 || !b[0].is_atom() || !b[1].is_int())
      fail_at(b, "expected (VAR INTEGER)");
    r.push_back({b[0].atom, b[1].as_int()});
  }
  return r;
}

}  // namespace

Benchmark parse_benchmark(const std::string& text, const std::string& path) {
  auto forms = parse_sexprs(text);
  Benchmark b;
  b.path = path;
  std::vector<Sexpr> nts;
  const Sexpr* start = nullptr;
  const Sexpr* program = nullptr;
  const Sexpr* pre = nullptr;
  const Sexpr* post = nullptr;
  const Sexpr* examples = nullptr;
  bool k_set = false;
  for (const auto& f : forms) {
    const std::string& h = f.head();
    if (h == "nonterm") {
      nts.push_back(f);
    } else if (h == "set-vector-length") {
      expect_size(f, 2, "(set-vector-length K)");
      if (!f[1].is_int() || f[1].as_int() < 1) fail_at(f[1], "vector length must be a positive integer");
      b.k = static_cast<int>(f[1].as_int());
      k_set = true;
    } else if (h == "start") {
      expect_size(f, 2, "(start NAME)");
      start = &f;
    } else if (h == "program") {
      expect_size(f, 2, "(program TERM)");
      program = &f;
    } else if (h == "pre") {
      expect_size(f, 2, "(pre FORMULA)");
      pre = &f;
    } else if (h == "post") {
      expect_size(f, 2, "(post FORMULA)");
      post = &f;
    } else if (h == "summary" || h == "invariant") {
      expect_size(f, 3, "(summary NAME FORMULA)");
      (h == "summary" ? b.summaries : b.invariants).push_back({f[1], f[2]});
    } else if (h == "summary-grammar") {
      if ((f.size() != 3 && f.size() != 4) || !f[1].is_atom()) fail_at(f, "expected (summary-grammar NAME RULES [SIZE])");
      Benchmark::GrammarDecl d{f[1].atom, f[2], 16};
      if (f.size() == 4) {
        if (!f[3].is_int() || f[3].as_int() < 1) fail_at(f[3], "size bound must be a positive integer");
        d.size_bound = static_cast<std::size_t>(f[3].as_int());
      }
      b.grammars.push_back(std::move(d));
    } else if (h == "examples") {
      examples = &f;
    } else {
      fail_at(f, "unknown directive '" + (h.empty() ? to_string(f) : h) + "'");
    }
  }
  if (nts.empty()) throw Error(path + ": benchmark declares no nonterminals");
  b.grammar = parse_grammar(nts);
  if (start && program) fail_at(*program, "give either (start ...) or (program ...), not both");
  if (start) {
    if (!(*start)[1].is_atom() || !b.grammar.has((*start)[1].atom)) fail_at((*start)[1], "unknown start nonterminal");
    b.grammar.set_start((*start)[1].atom);
    b.program = term::nonterminal((*start)[1].atom);
  } else if (program) {
    b.program = parse_term((*program)[1], b.grammar);
    b.grammar.sort_of(b.program);
  } else {
    b.program = term::nonterminal(b.grammar.start());
  }

  std::vector<Example> exs;
  if (examples) {
    for (std::size_t i = 1; i < examples->size(); ++i) {
      const Sexpr& e = (*examples)[i];
      if (!e.is_list() || e.size() != 2 || e[0].head() != "in" || e[1].head() != "out")
        fail_at(e, "expected ((in ...) (out ...))");
      exs.push_back({bindings(e[0], false), bindings(e[1], true)});
    }
    if (exs.empty()) fail_at(*examples, "no examples given");
    int n = static_cast<int>(exs.size());
    if (k_set && b.k != n) fail_at(*examples, "vector length disagrees with the number of examples");
    b.k = n;
  }

  ParseContext ctx = b.formula_context();
  b.pre = pre ? parse_formula((*pre)[1], ctx) : f::tru();
  b.post = post ? parse_formula((*post)[1], ctx) : f::tru();

  if (!exs.empty()) {
    // {x = [in...]} S {x != [out...]}: pin every input, ask for a mismatch
    // in some example.
    std::vector<Formula> pins, miss;
    for (int i = 1; i <= b.k; ++i) {
      const Example& e = exs[static_cast<std::size_t>(i - 1)];
      for (const auto& [v, val] : e.in) pins.push_back(f::eq(f::vref(v, i), f::num(val)));
      for (const auto& [v, val] : e.out) miss.push_back(f::lnot(f::eq(f::vref(v, i), f::num(val))));
    }
    b.pre = pre ? f::land(b.pre, f::land(pins)) : f::land(pins);
    b.post = post ? f::land(b.post, f::lor(miss)) : f::lor(miss);
  }
  return b;
}

Benchmark load_benchmark(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_benchmark(ss.str(), path);
}

}  // namespace wul
