#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wul/formula.hpp"
#include "wul/sexpr.hpp"
#include "wul/vcgen.hpp"

namespace wul {

/// External solver commands. `{file}` in an argument is replaced by the
/// query file; without a placeholder the file is appended.
struct SolverConfig {
  std::vector<std::string> smt;
  std::vector<std::string> sygus;  // empty: no SyGuS solver
  double timeout = 30;             // per query, seconds
  double total_timeout = 300;      // per run, seconds
  int jobs = 0;                    // 0: hardware concurrency

  static SolverConfig defaults();
  /// Reads a JSON object with optional keys smt, sygus, timeout,
  /// total_timeout, jobs; missing keys keep their defaults.
  static SolverConfig load(const std::string& path);
  int effective_jobs() const;
};

enum class QueryKind { SmtValidity, SygusSynthesis };

struct SolverQuery {
  QueryKind kind = QueryKind::SmtValidity;
  std::string text;
  std::string logic;
  double timeout = 30;
  bool uninterpreted = false;  // SMT query with free function symbols
};

enum class Outcome { Valid, Invalid, Unknown, Timeout, SolverError };
const char* to_string(Outcome o);

struct SynthDefinition {
  std::string name;
  std::vector<Binder> params;
  Sexpr body;
};

struct SolverVerdict {
  Outcome outcome = Outcome::Unknown;
  std::string model;  // raw solver output for Invalid
  double seconds = 0;
  std::string winner;  // "smt" or "sygus"
  std::string detail;
  std::vector<SynthDefinition> definitions;  // SyGuS solutions
};

/// SMT-LIB 2.6 validity query for `vc` (free variables are universal).
/// Vector structure is scalarized with length k first.
SolverQuery emit_smt(const Formula& vc, int k = 0, double timeout = 30);

/// A function to synthesize: scalar formals and an optional SyGuS grouped
/// rule list such as `((B Bool (...)) (C Int (...)))`.
struct SynthTarget {
  std::string name;
  std::vector<Binder> formals;
  Sort result = Sort::Bool;
  std::optional<Sexpr> grammar;
};

/// One synth-fun per target and one constraint per PVC.
SolverQuery emit_sygus(const std::vector<Pvc>& pvcs, const std::vector<SynthTarget>& targets,
                       int k = 0, double timeout = 30);

/// Picks QF_/UF/LIA/NIA features of an emitted (scalar) formula.
std::string choose_logic(const Formula& scalar);

/// SMT-LIB rendering of a scalar formula; ParamApp is printed as an
/// ordinary application.
std::string smt_string(const Formula& scalar);
std::string smt_symbol(const std::string& name);

/// `name -> value` pairs from a z3-style model.
std::map<std::string, Sexpr> parse_model(const std::string& text);
std::vector<SynthDefinition> parse_synth_solution(const std::string& text);

bool command_available(const std::string& exe);

/// Drives solver processes. Thread-safe; counts solver launches.
class SolverBackend {
 public:
  explicit SolverBackend(SolverConfig cfg);

  SolverVerdict check(const SolverQuery& q);
  /// Runs both queries concurrently when a SyGuS query is given; the first
  /// definitive answer wins and the other process is killed.
  SolverVerdict race(const SolverQuery& smt, const std::optional<SolverQuery>& sygus);

  int calls() const { return calls_.load(); }
  const SolverConfig& config() const { return cfg_; }

 private:
  SolverConfig cfg_;
  std::atomic<int> calls_{0};
};

/// Runs `jobs` tasks at a time and returns results in input order.
template <typename T>
std::vector<T> parallel_map(std::size_t n, int jobs, const std::function<T(std::size_t)>& fn);

}  // namespace wul

#include "wul/detail/parallel.hpp"
