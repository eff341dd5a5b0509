#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wul/sexpr.hpp"

namespace wul {

class UndeclaredError : public Error {
 public:
  using Error::Error;
};

/// Syntactic category of a G_imp term or nonterminal.
enum class GSort { Stmt, IntExpr, BoolExpr };

const char* to_string(GSort s);
std::optional<GSort> parse_gsort(const std::string& s);

enum class Tag {
  IntLit,
  BoolLit,
  Var,
  Plus,
  Not,
  And,
  Lt,
  Eq,
  Assign,
  Seq,
  IfThenElse,
  While,
  Skip,
  NonterminalRef,
};

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

/// Immutable G_imp term whose leaves may be nonterminal references.
struct TermNode {
  Tag tag;
  std::int64_t value = 0;  // IntLit value, BoolLit as 0/1
  std::string name;        // Var, Assign target, NonterminalRef
  std::vector<Term> kids;
};

namespace term {
Term int_lit(std::int64_t v);
Term bool_lit(bool b);
Term var(std::string name);
Term nonterminal(std::string name);
Term plus(Term a, Term b);
Term lnot(Term a);
Term land(Term a, Term b);
Term lt(Term a, Term b);
Term eq(Term a, Term b);
Term assign(std::string target, Term rhs);
Term seq(Term a, Term b);
Term ite(Term c, Term t, Term e);
Term loop(Term c, Term body);
Term skip();
}  // namespace term

std::size_t arity(Tag t);
bool equal(const Term& a, const Term& b);
bool is_closed(const Term& t);  // no NonterminalRef leaves
bool has_loop(const Term& t);
std::size_t height(const Term& t);

/// Canonical s-expression rendering, e.g. `(:= x (+ x 2))`.
std::string to_string(const Term& t);

/// Reserved expression-result variables.
inline constexpr const char* kIntResult = "e_t";
inline constexpr const char* kBoolResult = "b_t";
bool is_reserved_name(const std::string& s);

struct Nonterminal {
  std::string name;
  GSort sort;
  std::vector<Term> productions;
};

/// Regular tree grammar over G_imp. Nonterminals keep declaration order and
/// production order.
class Rtg {
 public:
  Rtg() = default;

  /// Adds a nonterminal; productions may be added before or after other
  /// declarations. Call `validate()` once all declarations are in.
  void declare(std::string name, GSort sort);
  void add_production(const std::string& name, Term rhs);
  void set_start(std::string name) { start_ = std::move(name); }

  /// Checks reference, sort and reserved-name invariants. Throws on failure.
  void validate() const;

  bool has(const std::string& name) const { return index_.count(name) != 0; }
  const Nonterminal& at(const std::string& name) const;
  const std::vector<Nonterminal>& nonterminals() const { return nts_; }
  const std::string& start() const { return start_; }

  /// Sort of a term against this grammar (nonterminal refs take their
  /// declared sort). Throws SortError when ill-sorted.
  GSort sort_of(const Term& t) const;

  /// Nonterminals referenced directly by the productions of `name`.
  std::vector<std::string> successors(const std::string& name) const;
  /// All nonterminals reachable from `t` (including through productions).
  std::vector<std::string> reachable(const Term& t) const;
  std::vector<std::string> reachable_from(const std::string& name) const;

 private:
  std::vector<Nonterminal> nts_;
  std::map<std::string, std::size_t> index_;
  std::string start_;
};

/// Parses a sequence of `(nonterm NAME SORT rhs...)` declarations. Other
/// top-level forms are rejected.
Rtg parse_grammar(const std::string& text);
Rtg parse_grammar(const std::vector<Sexpr>& forms);

/// Parses a single G_imp term; symbols naming nonterminals of `g` become
/// NonterminalRef leaves, everything else a variable.
Term parse_term(const Sexpr& e, const Rtg& g);
/// Parses a production right-hand side. A one-element list `(t)` stands for
/// the atom `t`.
Term parse_production(const Sexpr& e, const Rtg& g);

/// Renders the grammar in the canonical `(nonterm ...)` format accepted by
/// `parse_grammar`.
std::string print_grammar(const Rtg& g);

/// True iff `n` can reach itself through production references.
bool is_recursive(const Rtg& g, const std::string& n);

/// Program variables read or written by some program derivable from `t`.
std::vector<std::string> program_vars(const Rtg& g, const Term& t);
/// Program variables assigned by some program derivable from `t`.
std::vector<std::string> assigned_vars(const Rtg& g, const Term& t);

/// Variable sets attached to a set of programs: mutable variables (plus the
/// expression result), read-only variables, and the ghost / poststate
/// partners of the mutable ones.
struct VarProfile {
  std::vector<std::string> x_vars;     // assigned vars, then e_t / b_t
  std::vector<std::string> read_vars;  // program vars only read
  std::vector<std::string> z_vars;     // one per assigned var
  std::vector<std::string> y_vars;     // one per x var
};

VarProfile var_profile(const Rtg& g, const std::string& n);
VarProfile var_profile(const Rtg& g, const Term& t);

}  // namespace wul
