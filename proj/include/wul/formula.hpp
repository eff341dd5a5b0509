#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wul/sexpr.hpp"

namespace wul {

/// Sorts of logical variables. Index ranges over 1..k; vector sorts bind a
/// whole vector whose elements are reached through VecRef.
enum class Sort { Int, Bool, Index, IntVec, BoolVec };

const char* to_string(Sort s);
std::optional<Sort> parse_sort(const std::string& s);
bool is_vector(Sort s);
Sort elem_sort(Sort s);  // IntVec -> Int, BoolVec -> Bool, scalars unchanged
Sort vector_of(Sort s);  // Int -> IntVec, Bool -> BoolVec

enum class FK {
  True,
  False,
  IntConst,
  Var,
  VecRef,
  Add,
  Sub,
  Mul,
  Neg,
  Div,
  Mod,
  Ite,
  Lt,
  Le,
  Eq,
  Not,
  And,
  Or,
  Implies,
  Forall,
  Exists,
  ParamApp,
  FunApp,
};

struct FNode;
using Formula = std::shared_ptr<const FNode>;

/// Immutable formula node.
///  Var: name, sort.  VecRef: name, sort = element sort, kids[0] = index.
///  Forall/Exists: name/sort of the binder, kids[0] = body.
///  ParamApp/FunApp: name, kids = arguments.  And/Or are n-ary.
struct FNode {
  FK kind;
  std::int64_t value = 0;
  std::string name;
  Sort sort = Sort::Int;
  std::vector<Formula> kids;
};

struct Binder {
  std::string name;
  Sort sort = Sort::Int;
  bool operator==(const Binder& o) const { return name == o.name && sort == o.sort; }
};

namespace f {
Formula tru();
Formula fls();
Formula boolean(bool b);
Formula num(std::int64_t n);
Formula var(std::string name, Sort sort = Sort::Int);
Formula vref(std::string vec, Formula index, Sort elem = Sort::Int);
Formula vref(std::string vec, std::int64_t index, Sort elem = Sort::Int);
Formula add(Formula a, Formula b);
Formula sub(Formula a, Formula b);
Formula mul(Formula a, Formula b);
Formula neg(Formula a);
Formula div(Formula a, Formula b);
Formula mod(Formula a, Formula b);
Formula ite(Formula c, Formula a, Formula b);
Formula lt(Formula a, Formula b);
Formula le(Formula a, Formula b);
Formula eq(Formula a, Formula b);
Formula ne(Formula a, Formula b);
Formula lnot(Formula a);
Formula land(std::vector<Formula> kids);  // {} -> true, {a} -> a
Formula land(Formula a, Formula b);
Formula lor(std::vector<Formula> kids);  // {} -> false, {a} -> a
Formula lor(Formula a, Formula b);
Formula implies(Formula a, Formula b);
Formula forall(Binder b, Formula body);
Formula forall(const std::vector<Binder>& bs, Formula body);
Formula exists(Binder b, Formula body);
Formula exists(const std::vector<Binder>& bs, Formula body);
Formula param(std::string name, std::vector<Formula> args);
Formula fun(std::string name, std::vector<Formula> args);
/// Rebuilds `n` with new children, keeping everything else.
Formula with_kids(const Formula& n, std::vector<Formula> kids);
}  // namespace f

bool is_quantifier(const Formula& g);
/// Value sort of a formula node: Int for terms (Index counts as Int), Bool
/// for predicates.
Sort value_sort(const Formula& g);

bool equal(const Formula& a, const Formula& b);
/// Equality up to consistent renaming of bound variables.
bool alpha_equal(const Formula& a, const Formula& b);
std::size_t size(const Formula& g);

/// Canonical s-expression text; parse_formula reads it back.
std::string to_string(const Formula& g);

/// Names and sorts of the free variables a parser should assume. Unknown
/// symbols default to Int; `b_t` defaults to Bool.
struct ParseContext {
  std::map<std::string, Sort> vars;
  std::set<std::string> params;  // heads parsed as ParamApp (Bool)
  std::set<std::string> funs;    // heads parsed as FunApp (Int)
};

Formula parse_formula(const Sexpr& e, const ParseContext& ctx);
Formula parse_formula(std::string_view text, const ParseContext& ctx = {});

/// Free first-order variables in first-occurrence order. Vector variables
/// are reported with their vector sort.
std::vector<Binder> free_vars(const Formula& g);
std::set<std::string> free_names(const Formula& g);
/// Every identifier mentioned, free or bound, including parameter names.
std::set<std::string> all_names(const Formula& g);
/// Parameter names applied in `g`, first-occurrence order.
std::vector<std::string> params_of(const Formula& g);
bool has_params(const Formula& g);
bool has_funs(const Formula& g);
bool mentions(const Formula& g, const std::string& name);

/// Deterministic supply of identifiers unused so far.
class NameSupply {
 public:
  void reserve(const std::string& n) { used_.insert(n); }
  void reserve(const Formula& g);
  bool used(const std::string& n) const { return used_.count(n) != 0; }
  /// `base` itself if free, otherwise `base1`, `base2`, ...
  std::string fresh(const std::string& base);
  /// Always numbered: `base1`, `base2`, ... skipping used names.
  std::string fresh_indexed(const std::string& base);

 private:
  std::set<std::string> used_;
  std::map<std::string, int> next_;
};

/// Simultaneous, capture-avoiding substitution. Vector maps receive the
/// (already substituted) index term of each occurrence `v[i]`.
struct Subst {
  struct VecMap {
    std::function<Formula(const Formula& index)> fn;
    std::set<std::string> introduces;  // free names the replacement may mention
  };
  std::map<std::string, Formula> scalars;
  std::map<std::string, VecMap> vectors;

  bool empty() const { return scalars.empty() && vectors.empty(); }
  void rename_vector(const std::string& from, const std::string& to, Sort elem = Sort::Int);
};

Formula substitute(const Formula& g, const Subst& s);
/// g[target -> replacement]; throws SortError on a sort mismatch with a
/// free occurrence of `target`.
Formula substitute(const Formula& g, const std::string& target, const Formula& replacement);
Formula vec_substitute(const Formula& g, const std::string& vec,
                       std::function<Formula(const Formula& index)> fn,
                       std::set<std::string> introduces = {});

/// Evaluates closed integer index terms to literals inside VecRef indices.
Formula fold_indices(const Formula& g);
/// Constant folding of closed integer arithmetic (Euclidean div/mod) and of
/// trivial Boolean connectives.
Formula simplify(const Formula& g);

/// Replaces Index quantifiers by finite conjunctions/disjunctions over 1..k
/// and folds index terms.
Formula expand_index(const Formula& g, int k);
/// expand_index, then turns every `v[c]` into a scalar variable named
/// "v[c]" and every vector binder into k scalar binders. Throws when an
/// index is not a literal in 1..k afterwards.
Formula scalarize(const Formula& g, int k);
std::string element_name(const std::string& vec, std::int64_t index);

/// The case-splitting transformation used by the vector-state conditional
/// rule: every atom mentioning `ymap` vectors at index terms a1..an becomes
/// the conjunction over the 2^n sign patterns of `b_loop` at a1..an, with
/// entries whose pattern is true redirected to the paired y-vector.
Formula t_transform(const Formula& q, const std::string& b_loop,
                    const std::map<std::string, std::string>& ymap);

/// A concrete interpretation of a parameter.
struct ParamDef {
  std::vector<Binder> formals;
  Formula body;
};
using Assignment = std::map<std::string, ParamDef>;

/// Number of ParamApp arguments a definition with these formals expects:
/// scalars count 1, vectors count k.
std::size_t flat_arity(const std::vector<Binder>& formals, int k);

/// Replaces every ParamApp by its definition instantiated at the actual
/// arguments. `k` is the vector length (ignored without vector formals).
/// With `partial`, parameters missing from `a` are left in place.
Formula plug_formula(const Formula& g, const Assignment& a, int k = 0, bool partial = false);
std::string to_string(const Assignment& a);

}  // namespace wul
