#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wul/formula.hpp"
#include "wul/gimp.hpp"

namespace wul {

enum class Rule {
  Int,
  True,
  False,
  Var,
  Not,
  Bin,
  And,
  Comp,
  Assign,
  Seq,
  Skip,
  SimpleIf,
  SimpleWhile,
  VSIf,
  VSWhile,
  GrmDisj,
  HP,
  ApplyHP,
  Adapt,
  Weaken,
};

const char* to_string(Rule r);

/// {|pre|} N {|post|} assumed while proving N's own productions.
struct SummaryTriple {
  std::string nonterminal;
  Formula pre;
  Formula post;
};
using Context = std::vector<SummaryTriple>;
using ContextPtr = std::shared_ptr<const Context>;

struct ParamSig {
  enum class Kind { Summary, Invariant };
  std::string name;
  Kind kind = Kind::Summary;
  std::string site;  // nonterminal name or loop term
  std::vector<Binder> formals;
};

struct SkelNode;
using Skel = std::shared_ptr<SkelNode>;

struct SkelNode {
  Rule rule = Rule::Weaken;
  Formula pre;
  Term prog;
  Formula post;
  ContextPtr ctx;
  std::vector<Skel> kids;
  std::string path;

  // Rule-specific data.
  std::string aux;                             // Bin/And/Comp temp, VSIf b_loop, VSWhile fresh b_t
  std::vector<Binder> ybinders;                // Adapt
  std::vector<std::string> xvars;              // Adapt x, VSIf mutable vars
  std::vector<std::string> zvars;              // Adapt z partners of the mutable prefix of x
  std::map<std::string, std::string> zmap;     // VSIf x -> z
  std::map<std::string, std::string> ymap;     // VSIf x -> y
  Formula unplugged_q;                         // VSIf postcondition before plugging
  std::shared_ptr<const Assignment> plugged;   // VSIf: assignment applied since
};

/// Program-variable conventions shared by the skeleton and the oracle.
struct VarConv {
  int k = 0;  // 0 = scalar states, otherwise vector length

  /// Reference to program-level variable `name` (scalar, or element `idx`).
  Formula ref(const std::string& name, Sort elem, const Formula* idx) const;
  /// q[name -> mk(idx)] over all elements.
  Formula subst(const Formula& q, const std::string& name,
                const std::function<Formula(const Formula* idx)>& mk,
                std::set<std::string> introduces) const;
  Formula rename(const Formula& q, const std::string& from, const std::string& to, Sort elem) const;
  /// Simultaneous renaming of several program variables.
  Formula rename_all(const Formula& q, const std::map<std::string, std::string>& m,
                     const std::map<std::string, Sort>& elems) const;
  /// Actual arguments for a formal of the given element sort (k-expanded).
  std::vector<Formula> args(const std::string& name, Sort elem) const;
  Binder binder(const std::string& name, Sort elem) const;
  /// Conjunction of name = partner over the given pairs (true when empty).
  Formula eq_all(const std::vector<std::string>& xs, const std::vector<std::string>& zs) const;
};

/// Sort of a program-level variable name (b_t is Boolean).
Sort program_var_sort(const std::string& name);

class SkeletonBuilder {
 public:
  SkeletonBuilder(const Rtg& g, int k);

  /// Reserve identifiers (from pre/post and user data) before building.
  void reserve(const Formula& g) { names_.reserve(g); }
  void reserve(const std::string& n) { names_.reserve(n); }

  Skel w_skel(const ContextPtr& ctx, const Term& s, const Formula& q);
  Skel p_skel(const ContextPtr& ctx, const Formula& p, const Term& s, const Formula& q);

  const std::vector<ParamSig>& params() const { return params_; }
  const VarConv& conv() const { return conv_; }

 private:
  Skel node(Rule r, const ContextPtr& ctx, const Term& s, Formula pre, Formula post);
  Skel nonterminal(const ContextPtr& ctx, const Term& s, const Formula& q);
  Skel adapt(const ContextPtr& ctx, const Term& s, const Formula& q, Skel premise,
             const ParamSig& sig);
  Skel loop(const ContextPtr& ctx, const Term& s, const Formula& q);
  Skel vs_if(const ContextPtr& ctx, const Term& s, const Formula& q);
  const ParamSig& summary_sig(const std::string& n);
  Formula summary_app(const ParamSig& sig) const;

  const Rtg& g_;
  VarConv conv_;
  NameSupply names_;
  std::vector<ParamSig> params_;
  std::map<std::string, std::size_t> summary_index_;
  int loops_ = 0;
};

/// Assigns stable path ids ("weaken0.adapt0.hp0") in place.
void assign_paths(const Skel& root);

struct Violation {
  std::string path;
  std::string message;
};

/// Checks every node against its rule's syntactic pattern.
std::vector<Violation> check_syntactic(const Skel& root, const Rtg& g, int k);

/// Indentation-based rendering, one node per line.
std::string render(const Skel& root);
/// Rule names in post-order (Bin nodes render as Bin-Plus etc.).
std::vector<std::string> rule_sequence(const Skel& root);
std::string rule_label(const SkelNode& n);

std::size_t count_rule(const Skel& root, Rule r);
void visit_preorder(const Skel& root, const std::function<void(const Skel&)>& fn);

/// Rule set used at conditionals and loops.
struct RuleSet {
  Rule conditional;
  Rule loop;
};
RuleSet vs_rules_selector(int k);

}  // namespace wul
