#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wul/benchmark.hpp"
#include "wul/skeleton.hpp"
#include "wul/solver.hpp"
#include "wul/vcgen.hpp"

namespace wul {

/// Exit statuses of the command-line tool.
inline constexpr int kExitProven = 0;
inline constexpr int kExitUnproven = 1;
inline constexpr int kExitError = 2;

struct RunOptions {
  bool skeleton = false;
  bool dump_vcs = false;
  bool skolemize = false;
  bool no_optimize = false;
  bool unconstrained = false;
  std::optional<std::string> ctx_store;
  std::optional<std::string> save_store;
  std::optional<double> timeout;
  std::optional<std::string> solver_config;
  /// Used instead of solver_config when set (tests).
  std::optional<SolverConfig> config;
};

struct VcReport {
  std::string id;
  SolverVerdict verdict;
};

struct RunStats {
  bool proven = false;
  int solver_calls = 0;
  int store_hits = 0;
  std::vector<VcReport> vcs;
  std::optional<Assignment> assignment;
};

/// Skeleton and obligations of a benchmark.
struct Pipeline {
  Skel root;
  std::vector<ParamSig> sigs;
  std::vector<Pvc> original;
  std::vector<Pvc> pvcs;  // optimized unless disabled
};

Pipeline build_pipeline(const Benchmark& b, bool optimize);

/// Definitions given in the benchmark file, keyed by parameter name.
Assignment provided_assignment(const Benchmark& b, const std::vector<ParamSig>& sigs);

/// PVCs that establish the summary of nonterminal `n` (the obligations at
/// and below its HP node); empty if `n` has no HP node.
std::vector<std::string> defining_origins(const Skel& root, const std::string& n);

/// Checks the plugged PVCs; verdicts come back in PVC order.
std::vector<VcReport> discharge(const std::vector<Pvc>& pvcs, const Assignment& a, int k, bool skolemize,
                                SolverBackend& backend);

int cmd_prove(const Benchmark& b, const RunOptions& o, std::ostream& out, RunStats* stats = nullptr);
int cmd_synth(const Benchmark& b, const RunOptions& o, std::ostream& out, RunStats* stats = nullptr);

struct OracleRunOptions {
  int depth = 4;
  std::int64_t lo = 0;
  std::int64_t hi = 3;
  int fuel = 64;
};

int cmd_oracle(const Benchmark& b, const OracleRunOptions& o, std::ostream& out);

/// `LO..HI`
std::pair<std::int64_t, std::int64_t> parse_domain(const std::string& s);

}  // namespace wul
