#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wul/formula.hpp"
#include "wul/skeleton.hpp"

namespace wul {

/// Obligation `forall universals. lhs -> rhs` of one Weaken application.
struct Pvc {
  std::string id;
  std::vector<Binder> universals;
  Formula lhs;
  Formula rhs;
  std::string origin;
  std::vector<std::pair<std::string, std::vector<Binder>>> skolems;

  Formula body() const { return f::implies(lhs, rhs); }
  /// Universal closure over the listed universals and any other free variable.
  Formula closed() const;
};

/// One PVC per Weaken node, in pre-order.
std::vector<Pvc> extract_pvcs(const Skel& root);

/// Pulls right-hand universals and left-hand existentials to the prefix,
/// flattens nested implications and splits right-hand conjunctions, to a
/// fixpoint. With k > 0, index quantifiers are expanded first.
std::vector<Pvc> optimize_pvcs(const std::vector<Pvc>& pvcs, int k = 0);

/// Replaces positive right-hand existentials over Int by fresh function
/// symbols of the enclosing universals. `names` supplies function names.
Pvc skolemize_rhs_existentials(const Pvc& pvc, NameSupply& names, int k = 0);

/// Replaces parameters by their definitions throughout a skeleton.
Skel plug_in(const Skel& root, const Assignment& a, int k = 0);
Pvc plug_pvc(const Pvc& p, const Assignment& a, int k = 0, bool partial = false);

/// Parameters occurring anywhere in the PVCs, first-occurrence order.
std::vector<std::string> params_of(const std::vector<Pvc>& pvcs);

/// `(pvc ID FORMULA)` in the benchmark text format.
std::string print_pvc(const Pvc& p);

}  // namespace wul
