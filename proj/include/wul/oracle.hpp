#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wul/formula.hpp"
#include "wul/gimp.hpp"

namespace wul {

class EvalError : public Error {
 public:
  using Error::Error;
};

/// A variable's value: one element for scalars, k elements for vectors.
/// Booleans are stored as 0/1.
struct Val {
  Sort sort = Sort::Int;
  std::vector<std::int64_t> elems;

  static Val scalar(std::int64_t v, Sort s = Sort::Int) { return {s, {v}}; }
  static Val vec(std::vector<std::int64_t> v, Sort elem = Sort::Int) { return {vector_of(elem), std::move(v)}; }
  bool operator==(const Val& o) const { return sort == o.sort && elems == o.elems; }
};

using State = std::map<std::string, Val>;
std::string to_string(const State& s);

std::int64_t euclid_div(std::int64_t a, std::int64_t b);
std::int64_t euclid_mod(std::int64_t a, std::int64_t b);

using FunInterp = std::function<std::int64_t(const std::vector<std::int64_t>&)>;

/// Finite interpretation used to evaluate quantifiers: Int binders range over
/// lo..hi, Index binders over 1..k, vector binders over all k-tuples.
struct EvalOptions {
  int k = 0;
  std::int64_t lo = 0;
  std::int64_t hi = 3;
  const Assignment* params = nullptr;
  std::map<std::string, FunInterp> funs;
};

/// Integer value of a term, or 0/1 for a predicate.
std::int64_t eval(const Formula& g, const State& s, const EvalOptions& o = {});
bool holds(const Formula& g, const State& s, const EvalOptions& o = {});

struct Diverged {};

/// Big-step execution. With k > 0 every vector entry runs the program on
/// its own element; the run diverges if any element exceeds `fuel` loop
/// iterations in one While.
std::optional<State> exec(const Term& p, const State& s, int fuel, int k = 0);

/// All complete programs derivable from `t` whose derivation trees have
/// height at most `depth`, deduplicated, in production order. Throws when
/// more than `limit` programs would be produced.
std::vector<Term> enumerate_programs(const Rtg& g, const Term& t, int depth, std::size_t limit = 200000);
std::vector<Term> enumerate_programs(const Rtg& g, const std::string& n, int depth,
                                     std::size_t limit = 200000);

struct OracleConfig {
  int k = 0;
  std::int64_t lo = 0;
  std::int64_t hi = 3;
  int depth = 4;
  int fuel = 64;
  std::size_t max_programs = 200000;
  std::size_t max_states = 2000000;
};

struct Counterexample {
  Term program;
  State state;
  State final_state;
};

struct TripleResult {
  bool holds = true;
  std::optional<Counterexample> cex;
  std::size_t programs = 0;
  std::size_t runs = 0;
  std::size_t diverged = 0;
};

/// Initial states: every free variable of p and q plus the program
/// variables of `s`, each over lo..hi (vectors over all k-tuples), filtered
/// by p. Top-level equalities with constants in p pin their variable.
std::vector<State> initial_states(const Formula& p, const Formula& q, const Rtg& g, const Term& s,
                                  const OracleConfig& c);

/// Partial-correctness check of {p} s {q} for every program of height at
/// most c.depth and every initial state. Diverging runs are vacuous.
TripleResult check_triple(const Formula& p, const Rtg& g, const Term& s, const Formula& q,
                          const OracleConfig& c);

}  // namespace wul
