#include "wul/gimp.hpp"

#include <algorithm>
#include <functional>

namespace wul {

const char* to_string(GSort s) {
  switch (s) {
    case GSort::Stmt: return "Stmt";
    case GSort::IntExpr: return "IntExpr";
    case GSort::BoolExpr: return "BoolExpr";
  }
  return "?";
}

std::optional<GSort> parse_gsort(const std::string& s) {
  if (s == "Stmt") return GSort::Stmt;
  if (s == "IntExpr") return GSort::IntExpr;
  if (s == "BoolExpr") return GSort::BoolExpr;
  return std::nullopt;
}

bool is_reserved_name(const std::string& s) { return s == kIntResult || s == kBoolResult; }

namespace term {
namespace {
Term make(Tag tag, std::vector<Term> kids, std::string name = {}, std::int64_t value = 0) {
  auto n = std::make_shared<TermNode>();
  n->tag = tag;
  n->kids = std::move(kids);
  n->name = std::move(name);
  n->value = value;
  return n;
}
}  // namespace

Term int_lit(std::int64_t v) { return make(Tag::IntLit, {}, {}, v); }
Term bool_lit(bool b) { return make(Tag::BoolLit, {}, {}, b ? 1 : 0); }
Term var(std::string name) { return make(Tag::Var, {}, std::move(name)); }
Term nonterminal(std::string name) { return make(Tag::NonterminalRef, {}, std::move(name)); }
Term plus(Term a, Term b) { return make(Tag::Plus, {std::move(a), std::move(b)}); }
Term lnot(Term a) { return make(Tag::Not, {std::move(a)}); }
Term land(Term a, Term b) { return make(Tag::And, {std::move(a), std::move(b)}); }
Term lt(Term a, Term b) { return make(Tag::Lt, {std::move(a), std::move(b)}); }
Term eq(Term a, Term b) { return make(Tag::Eq, {std::move(a), std::move(b)}); }
Term assign(std::string target, Term rhs) {
  return make(Tag::Assign, {std::move(rhs)}, std::move(target));
}
Term seq(Term a, Term b) { return make(Tag::Seq, {std::move(a), std::move(b)}); }
Term ite(Term c, Term t, Term e) {
  return make(Tag::IfThenElse, {std::move(c), std::move(t), std::move(e)});
}
Term loop(Term c, Term body) { return make(Tag::While, {std::move(c), std::move(body)}); }
Term skip() { return make(Tag::Skip, {}); }
}  // namespace term

std::size_t arity(Tag t) {
  switch (t) {
    case Tag::IntLit:
    case Tag::BoolLit:
    case Tag::Var:
    case Tag::Skip:
    case Tag::NonterminalRef: return 0;
    case Tag::Not:
    case Tag::Assign: return 1;
    case Tag::Plus:
    case Tag::And:
    case Tag::Lt:
    case Tag::Eq:
    case Tag::Seq:
    case Tag::While: return 2;
    case Tag::IfThenElse: return 3;
  }
  return 0;
}

bool equal(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a->tag != b->tag || a->value != b->value || a->name != b->name ||
      a->kids.size() != b->kids.size())
    return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!equal(a->kids[i], b->kids[i])) return false;
  return true;
}

bool is_closed(const Term& t) {
  if (t->tag == Tag::NonterminalRef) return false;
  return std::all_of(t->kids.begin(), t->kids.end(), [](const Term& k) { return is_closed(k); });
}

bool has_loop(const Term& t) {
  if (t->tag == Tag::While) return true;
  return std::any_of(t->kids.begin(), t->kids.end(), [](const Term& k) { return has_loop(k); });
}

std::size_t height(const Term& t) {
  std::size_t h = 0;
  for (const auto& k : t->kids) h = std::max(h, height(k));
  return h + 1;
}

std::string to_string(const Term& t) {
  auto bin = [&](const char* op) {
    return std::string("(") + op + " " + to_string(t->kids[0]) + " " + to_string(t->kids[1]) + ")";
  };
  switch (t->tag) {
    case Tag::IntLit: return std::to_string(t->value);
    case Tag::BoolLit: return t->value ? "true" : "false";
    case Tag::Var:
    case Tag::NonterminalRef: return t->name;
    case Tag::Skip: return "skip";
    case Tag::Plus: return bin("+");
    case Tag::And: return bin("and");
    case Tag::Lt: return bin("<");
    case Tag::Eq: return bin("=");
    case Tag::Seq: return bin("seq");
    case Tag::While: return bin("while");
    case Tag::Not: return "(not " + to_string(t->kids[0]) + ")";
    case Tag::Assign: return "(:= " + t->name + " " + to_string(t->kids[0]) + ")";
    case Tag::IfThenElse:
      return "(ite " + to_string(t->kids[0]) + " " + to_string(t->kids[1]) + " " +
             to_string(t->kids[2]) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------

void Rtg::declare(std::string name, GSort sort) {
  if (index_.count(name)) throw Error("nonterminal '" + name + "' declared twice");
  if (is_reserved_name(name)) throw Error("reserved name used as nonterminal: " + name);
  index_[name] = nts_.size();
  nts_.push_back({std::move(name), sort, {}});
  if (start_.empty()) start_ = nts_.back().name;
}

void Rtg::add_production(const std::string& name, Term rhs) {
  auto it = index_.find(name);
  if (it == index_.end()) throw UndeclaredError("undeclared nonterminal '" + name + "'");
  nts_[it->second].productions.push_back(std::move(rhs));
}

const Nonterminal& Rtg::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UndeclaredError("unknown nonterminal '" + name + "'");
  return nts_[it->second];
}

GSort Rtg::sort_of(const Term& t) const {
  auto expect = [&](const Term& k, GSort s) {
    GSort got = sort_of(k);
    if (got != s)
      throw SortError("expected " + std::string(wul::to_string(s)) + " but got " +
                      wul::to_string(got) + " in " + wul::to_string(t));
  };
  if (t->kids.size() != arity(t->tag)) throw SortError("arity mismatch in " + wul::to_string(t));
  switch (t->tag) {
    case Tag::IntLit:
    case Tag::Var: return GSort::IntExpr;
    case Tag::BoolLit: return GSort::BoolExpr;
    case Tag::NonterminalRef: return at(t->name).sort;
    case Tag::Plus:
      expect(t->kids[0], GSort::IntExpr);
      expect(t->kids[1], GSort::IntExpr);
      return GSort::IntExpr;
    case Tag::Lt:
    case Tag::Eq:
      expect(t->kids[0], GSort::IntExpr);
      expect(t->kids[1], GSort::IntExpr);
      return GSort::BoolExpr;
    case Tag::Not: expect(t->kids[0], GSort::BoolExpr); return GSort::BoolExpr;
    case Tag::And:
      expect(t->kids[0], GSort::BoolExpr);
      expect(t->kids[1], GSort::BoolExpr);
      return GSort::BoolExpr;
    case Tag::Assign: expect(t->kids[0], GSort::IntExpr); return GSort::Stmt;
    case Tag::Seq:
      expect(t->kids[0], GSort::Stmt);
      expect(t->kids[1], GSort::Stmt);
      return GSort::Stmt;
    case Tag::IfThenElse:
      expect(t->kids[0], GSort::BoolExpr);
      expect(t->kids[1], GSort::Stmt);
      expect(t->kids[2], GSort::Stmt);
      return GSort::Stmt;
    case Tag::While:
      expect(t->kids[0], GSort::BoolExpr);
      expect(t->kids[1], GSort::Stmt);
      return GSort::Stmt;
    case Tag::Skip: return GSort::Stmt;
  }
  throw SortError("unknown term tag");
}

namespace {

void check_names(const Term& t) {
  if ((t->tag == Tag::Var || t->tag == Tag::Assign) && is_reserved_name(t->name))
    throw Error("reserved variable '" + t->name + "' used in a program");
  for (const auto& k : t->kids) check_names(k);
}

void collect_refs(const Term& t, std::vector<std::string>& out) {
  if (t->tag == Tag::NonterminalRef) {
    if (std::find(out.begin(), out.end(), t->name) == out.end()) out.push_back(t->name);
    return;
  }
  for (const auto& k : t->kids) collect_refs(k, out);
}

}  // namespace

void Rtg::validate() const {
  if (nts_.empty()) throw Error("grammar declares no nonterminals");
  if (!has(start_)) throw UndeclaredError("unknown start nonterminal '" + start_ + "'");
  for (const auto& nt : nts_) {
    if (nt.productions.empty()) throw Error("nonterminal '" + nt.name + "' has no productions");
    for (std::size_t i = 0; i < nt.productions.size(); ++i) {
      const Term& rhs = nt.productions[i];
      std::vector<std::string> refs;
      collect_refs(rhs, refs);
      for (const auto& r : refs)
        if (!has(r))
          throw UndeclaredError("production " + std::to_string(i + 1) + " of '" + nt.name +
                                "' references undeclared nonterminal '" + r + "'");
      check_names(rhs);
      GSort s;
      try {
        s = sort_of(rhs);
      } catch (const SortError& e) {
        throw SortError("production " + std::to_string(i + 1) + " of '" + nt.name +
                        "': " + e.what());
      }
      if (s != nt.sort)
        throw SortError("production " + std::to_string(i + 1) + " of '" + nt.name + "' (" +
                        wul::to_string(rhs) + ") has sort " + wul::to_string(s) +
                        ", declared " + wul::to_string(nt.sort));
    }
  }
}

std::vector<std::string> Rtg::successors(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& p : at(name).productions) collect_refs(p, out);
  return out;
}

std::vector<std::string> Rtg::reachable(const Term& t) const {
  std::vector<std::string> order;
  std::vector<std::string> stack;
  collect_refs(t, stack);
  std::reverse(stack.begin(), stack.end());
  std::set<std::string> seen;
  while (!stack.empty()) {
    std::string n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second) continue;
    order.push_back(n);
    auto succ = successors(n);
    for (auto it = succ.rbegin(); it != succ.rend(); ++it)
      if (!seen.count(*it)) stack.push_back(*it);
  }
  return order;
}

std::vector<std::string> Rtg::reachable_from(const std::string& name) const {
  return reachable(term::nonterminal(name));
}

// ---------------------------------------------------------------------------

namespace {

Term parse_term_impl(const Sexpr& e, const Rtg& g) {
  if (e.is_atom()) {
    if (e.is_int()) return term::int_lit(e.as_int());
    if (e.atom == "true") return term::bool_lit(true);
    if (e.atom == "false") return term::bool_lit(false);
    if (e.atom == "skip") return term::skip();
    if (g.has(e.atom)) return term::nonterminal(e.atom);
    if (is_reserved_name(e.atom)) fail_at(e, "reserved variable '" + e.atom + "' in program");
    return term::var(e.atom);
  }
  if (e.size() == 0) fail_at(e, "empty term");
  const std::string& op = e.head();
  auto need = [&](std::size_t n) {
    if (e.size() != n + 1)
      fail_at(e, "'" + op + "' expects " + std::to_string(n) + " operands");
  };
  auto kid = [&](std::size_t i) { return parse_term_impl(e[i], g); };
  if (op == "+") {
    need(2);
    return term::plus(kid(1), kid(2));
  }
  if (op == "not") {
    need(1);
    return term::lnot(kid(1));
  }
  if (op == "and") {
    need(2);
    return term::land(kid(1), kid(2));
  }
  if (op == "<") {
    need(2);
    return term::lt(kid(1), kid(2));
  }
  if (op == "=" || op == "==") {
    need(2);
    return term::eq(kid(1), kid(2));
  }
  if (op == ":=") {
    need(2);
    if (!e[1].is_atom() || e[1].is_int()) fail_at(e[1], "assignment target must be a variable");
    if (is_reserved_name(e[1].atom)) fail_at(e[1], "cannot assign reserved variable " + e[1].atom);
    if (g.has(e[1].atom)) fail_at(e[1], "assignment target is a nonterminal: " + e[1].atom);
    return term::assign(e[1].atom, kid(2));
  }
  if (op == "seq") {
    if (e.size() < 3) fail_at(e, "'seq' expects at least 2 operands");
    Term acc = kid(e.size() - 1);
    for (std::size_t i = e.size() - 1; i-- > 1;) acc = term::seq(kid(i), acc);
    return acc;
  }
  if (op == "ite" || op == "if") {
    need(3);
    return term::ite(kid(1), kid(2), kid(3));
  }
  if (op == "while") {
    need(2);
    return term::loop(kid(1), kid(2));
  }
  if (e.size() == 1) return parse_term_impl(e[0], g);
  fail_at(e, "unknown program constructor '" + op + "'");
}

}  // namespace

Term parse_term(const Sexpr& e, const Rtg& g) { return parse_term_impl(e, g); }

Term parse_production(const Sexpr& e, const Rtg& g) {
  if (e.is_list() && e.size() == 1) return parse_term_impl(e[0], g);
  return parse_term_impl(e, g);
}

Rtg parse_grammar(const std::string& text) { return parse_grammar(parse_sexprs(text)); }

Rtg parse_grammar(const std::vector<Sexpr>& forms) {
  Rtg g;
  // Declare first so productions may reference later nonterminals.
  for (const auto& f : forms) {
    if (f.head() != "nonterm") fail_at(f, "expected (nonterm NAME SORT rhs...)");
    if (f.size() < 3 || !f[1].is_atom() || !f[2].is_atom())
      fail_at(f, "malformed nonterm declaration");
    auto sort = parse_gsort(f[2].atom);
    if (!sort) fail_at(f[2], "unknown sort '" + f[2].atom + "'");
    g.declare(f[1].atom, *sort);
  }
  for (const auto& f : forms)
    for (std::size_t i = 3; i < f.size(); ++i) g.add_production(f[1].atom, parse_production(f[i], g));
  g.validate();
  return g;
}

std::string print_grammar(const Rtg& g) {
  std::string out;
  for (const auto& nt : g.nonterminals()) {
    out += "(nonterm " + nt.name + " " + to_string(nt.sort);
    for (const auto& p : nt.productions) {
      std::string s = to_string(p);
      out += " ";
      out += (s.front() == '(') ? s : "(" + s + ")";
    }
    out += ")\n";
  }
  return out;
}

bool is_recursive(const Rtg& g, const std::string& n) {
  for (const auto& s : g.successors(n)) {
    if (s == n) return true;
    auto r = g.reachable_from(s);
    if (std::find(r.begin(), r.end(), n) != r.end()) return true;
  }
  return false;
}

namespace {

void walk_vars(const Rtg& g, const Term& t, bool assigned_only, std::vector<std::string>& out,
               std::set<std::string>& visited) {
  auto add = [&](const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  switch (t->tag) {
    case Tag::Var:
      if (!assigned_only) add(t->name);
      return;
    case Tag::Assign:
      add(t->name);
      break;
    case Tag::NonterminalRef:
      if (visited.insert(t->name).second)
        for (const auto& p : g.at(t->name).productions) walk_vars(g, p, assigned_only, out, visited);
      return;
    default: break;
  }
  for (const auto& k : t->kids) walk_vars(g, k, assigned_only, out, visited);
}

std::string fresh_partner(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

}  // namespace

std::vector<std::string> program_vars(const Rtg& g, const Term& t) {
  std::vector<std::string> out;
  std::set<std::string> visited;
  walk_vars(g, t, false, out, visited);
  return out;
}

std::vector<std::string> assigned_vars(const Rtg& g, const Term& t) {
  std::vector<std::string> out;
  std::set<std::string> visited;
  walk_vars(g, t, true, out, visited);
  return out;
}

VarProfile var_profile(const Rtg& g, const Term& t) {
  VarProfile p;
  auto all = program_vars(g, t);
  auto mut = assigned_vars(g, t);
  // Names already used anywhere in the grammar are unavailable for partners.
  std::set<std::string> taken;
  for (const auto& nt : g.nonterminals()) {
    taken.insert(nt.name);
    for (const auto& v : program_vars(g, term::nonterminal(nt.name))) taken.insert(v);
  }
  for (const auto& v : all) taken.insert(v);
  p.x_vars = mut;
  GSort s = g.sort_of(t);
  if (s == GSort::IntExpr) p.x_vars.push_back(kIntResult);
  if (s == GSort::BoolExpr) p.x_vars.push_back(kBoolResult);
  for (const auto& v : all)
    if (std::find(mut.begin(), mut.end(), v) == mut.end()) p.read_vars.push_back(v);
  for (const auto& v : mut) p.z_vars.push_back(fresh_partner(v + "_z", taken));
  for (const auto& v : p.x_vars) p.y_vars.push_back(fresh_partner(v + "_y", taken));
  return p;
}

VarProfile var_profile(const Rtg& g, const std::string& n) {
  return var_profile(g, term::nonterminal(n));
}

}  // namespace wul
