#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wul/formula.hpp"
#include "wul/gimp.hpp"
#include "wul/sexpr.hpp"

namespace wul {

/// A parsed benchmark file.
///
///   (set-vector-length k)
///   (nonterm NAME SORT rhs...)
///   (start NAME) | (program TERM)
///   (pre FORMULA) (post FORMULA)
///   (summary NAME FORMULA)            NAME: nonterminal or parameter
///   (invariant SITE FORMULA)          SITE: parameter name or loop term
///   (summary-grammar NAME RULES [SIZE])
///   (examples ((in (x 0) ...) (out (x 1) ...)) ...)
///
/// Summary and invariant formulas are kept as s-expressions until the
/// skeleton fixes the parameter formals.
struct Benchmark {
  struct Provided {
    Sexpr target;
    Sexpr formula;
  };
  struct GrammarDecl {
    std::string target;
    Sexpr rules;
    std::size_t size_bound = 16;
  };

  std::string path;
  Rtg grammar;
  int k = 0;
  Formula pre;
  Formula post;
  Term program;
  std::vector<Provided> summaries;
  std::vector<Provided> invariants;
  std::vector<GrammarDecl> grammars;

  /// Sorts of program variables and e_t / b_t under this vector length.
  ParseContext formula_context() const;
};

Benchmark parse_benchmark(const std::string& text, const std::string& path = "<input>");
Benchmark load_benchmark(const std::string& path);

}  // namespace wul
