#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wul/formula.hpp"
#include "wul/gimp.hpp"

namespace wul {

class StoreError : public Error {
 public:
  using Error::Error;
};

/// Content hash of the sub-grammar reachable from `n`, with nonterminals
/// renamed N0, N1, ... in breadth-first order from `n`. The vector length
/// is part of the hash.
std::string grammar_fingerprint(const Rtg& g, const std::string& n, int k);

struct StoreRecord {
  std::string fingerprint;
  std::string nonterminal;
  std::string param;
  std::vector<Binder> formals;
  Formula summary;
  std::string status = "proven";  // or "unproven"
  std::string timestamp;
  std::string source;
  int k = 0;
};

/// Summaries on disk, one JSON object per line. Reads take a shared and
/// appends an exclusive advisory lock on the file.
class SummaryStore {
 public:
  explicit SummaryStore(std::string path) : path_(std::move(path)) {}

  /// Latest proven record with this fingerprint. Throws StoreError when the
  /// file is corrupt.
  std::optional<StoreRecord> lookup(const std::string& fingerprint) const;
  /// Appends a record stamped with the current time. Refuses to write into
  /// a corrupt file.
  void save(StoreRecord r) const;
  std::vector<StoreRecord> records() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// The stored summary re-expressed over `formals` (matched by position).
Formula summary_over(const StoreRecord& r, const std::vector<Binder>& formals);

}  // namespace wul
