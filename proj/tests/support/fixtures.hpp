#pragma once

#include <string>

#include "wul/benchmark.hpp"
#include "wul/driver.hpp"

namespace wul::testing {

inline const char* kPlusTwo = "(nonterm N IntExpr 2 (+ 2 N))\n(start N)\n(post (not (= e_t 3)))\n";

inline const char* kVecIte =
    "(set-vector-length 3)\n"
    "(nonterm S Stmt (ite B A S) A)\n"
    "(nonterm B BoolExpr (= y N))\n"
    "(nonterm N IntExpr 0 (+ N 1))\n"
    "(nonterm A Stmt (:= x N))\n"
    "(start S)\n"
    "(pre (and (= x[1] 0) (= x[2] 0) (= x[3] 0) (= y[1] 0) (= y[2] 1) (= y[3] 2)))\n"
    "(post (exists ((i Index)) (not (= (select x i) (select y i)))))\n";

struct Built {
  Benchmark bench;
  Pipeline pipe;
};

inline Built build(const std::string& text, bool optimize = true) {
  Built b{parse_benchmark(text, "test"), {}};
  b.pipe = build_pipeline(b.bench, optimize);
  return b;
}

inline Assignment plus_two_assignment(const std::string& body = "(= (mod e_t 2) 0)") {
  Assignment a;
  a["Q_N"] = {{{"e_t", Sort::Int}}, parse_formula(body)};
  return a;
}

}  // namespace wul::testing
