#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "wul/formula.hpp"
#include "wul/oracle.hpp"
#include "wul/sexpr.hpp"
#include "wul/skeleton.hpp"
#include "wul/solver.hpp"
#include "wul/vcgen.hpp"

namespace wul {

/// Candidate space for one parameter: SyGuS-style grouped rules whose
/// productions mention the parameter's formals, constants and other rule
/// names. The first rule is the (Boolean) start symbol.
struct TemplateGrammar {
  struct NT {
    std::string name;
    Sort sort = Sort::Bool;
    std::vector<Sexpr> productions;
  };
  std::string param;
  std::vector<Binder> formals;
  std::vector<NT> rules;
  std::size_t size_bound = 16;
  /// Keep one term per evaluation signature on sample points (only used for
  /// the built-in unconstrained grammar).
  bool observational = false;
  /// Whether the grouped rules are passed to a SyGuS solver.
  bool send_to_sygus = true;

  /// `((NAME SORT (productions...)) ...)`
  Sexpr rules_sexpr() const;
};

/// Reads the rule list of `(summary-grammar NAME RULES [SIZE])`.
TemplateGrammar parse_template(const Sexpr& rules, const ParamSig& sig, std::size_t size_bound = 16);

/// Quantifier-free linear integer formulas over the formals with constants
/// {-1,0,1,2,3,100}, + - (mod _ 2|3) and or not = < <=, up to `size_bound`
/// nodes.
TemplateGrammar unconstrained_grammar(const ParamSig& sig, int k, std::size_t size_bound = 9);

/// Bodies derivable from the start rule, nondecreasing in size, without
/// duplicates up to commutativity of and/or/=/+/*.
std::vector<Formula> enumerate_candidates(const TemplateGrammar& g, std::size_t size_bound, int k = 0);

/// Ground valuations that falsified some PVC, keyed by PVC index.
class CexCache {
 public:
  struct Entry {
    std::size_t pvc;
    State values;
  };
  void add(std::size_t pvc, State values);
  std::vector<Entry> snapshot() const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
};

/// True when some cached valuation falsifies the PVCs plugged with `a`.
/// Quantified PVCs are never used for pruning.
bool refuted_by_cache(const std::vector<Pvc>& pvcs, const Assignment& a, const CexCache& cache, int k);

/// The candidates not refuted by any cached valuation, in order.
std::vector<Assignment> counterexample_filter(const std::vector<Assignment>& candidates,
                                              const std::vector<Pvc>& pvcs, const CexCache& cache, int k);

struct SynthOptions {
  int k = 0;
  bool use_sygus = true;
  bool use_cache = true;
  std::size_t max_candidates = 200000;
  /// Wall-clock budget for the whole search, seconds.
  double budget = 300;
};

struct SynthResult {
  std::optional<Assignment> assignment;
  std::string method;  // "sygus", "enumerative", "closed"
  std::size_t candidates = 0;
  std::size_t pruned = 0;
  int solver_calls = 0;
  std::string detail;
};

/// Finds definitions for every parameter of the PVCs from the given
/// grammars. A returned assignment has been re-verified Valid on every PVC.
SynthResult synthesize(const std::vector<Pvc>& pvcs, const std::vector<ParamSig>& sigs,
                       const std::map<std::string, TemplateGrammar>& grammars, SolverBackend& backend,
                       const SynthOptions& opt);

/// Ground valuation of a z3 model over the free variables of `scalar`;
/// variables absent from the model default to 0/false.
State model_state(const std::string& model, const Formula& scalar);

/// Converts a SyGuS solution body back into a parameter definition.
ParamDef definition_from_solution(const SynthDefinition& d, const ParamSig& sig, int k);

}  // namespace wul
