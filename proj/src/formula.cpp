#include "wul/formula.hpp"

#include <algorithm>
#include <cctype>

namespace wul {

const char* to_string(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::Index: return "Index";
    case Sort::IntVec: return "IntVec";
    case Sort::BoolVec: return "BoolVec";
  }
  return "?";
}

std::optional<Sort> parse_sort(const std::string& s) {
  if (s == "Int") return Sort::Int;
  if (s == "Bool") return Sort::Bool;
  if (s == "Index") return Sort::Index;
  if (s == "IntVec") return Sort::IntVec;
  if (s == "BoolVec") return Sort::BoolVec;
  return std::nullopt;
}

bool is_vector(Sort s) { return s == Sort::IntVec || s == Sort::BoolVec; }

Sort elem_sort(Sort s) {
  if (s == Sort::IntVec) return Sort::Int;
  if (s == Sort::BoolVec) return Sort::Bool;
  return s;
}

Sort vector_of(Sort s) {
  if (s == Sort::Bool || s == Sort::BoolVec) return Sort::BoolVec;
  return Sort::IntVec;
}

namespace f {
namespace {
Formula node(FK k, std::vector<Formula> kids = {}, std::string name = {}, Sort sort = Sort::Int,
             std::int64_t value = 0) {
  auto n = std::make_shared<FNode>();
  n->kind = k;
  n->kids = std::move(kids);
  n->name = std::move(name);
  n->sort = sort;
  n->value = value;
  return n;
}
}  // namespace

Formula tru() {
  static const Formula t = node(FK::True);
  return t;
}
Formula fls() {
  static const Formula t = node(FK::False);
  return t;
}
Formula boolean(bool b) { return b ? tru() : fls(); }
Formula num(std::int64_t n) { return node(FK::IntConst, {}, {}, Sort::Int, n); }
Formula var(std::string name, Sort sort) { return node(FK::Var, {}, std::move(name), sort); }
Formula vref(std::string vec, Formula index, Sort elem) {
  return node(FK::VecRef, {std::move(index)}, std::move(vec), elem_sort(elem));
}
Formula vref(std::string vec, std::int64_t index, Sort elem) {
  return vref(std::move(vec), num(index), elem);
}
Formula add(Formula a, Formula b) { return node(FK::Add, {std::move(a), std::move(b)}); }
Formula sub(Formula a, Formula b) { return node(FK::Sub, {std::move(a), std::move(b)}); }
Formula mul(Formula a, Formula b) { return node(FK::Mul, {std::move(a), std::move(b)}); }
Formula neg(Formula a) { return node(FK::Neg, {std::move(a)}); }
Formula div(Formula a, Formula b) { return node(FK::Div, {std::move(a), std::move(b)}); }
Formula mod(Formula a, Formula b) { return node(FK::Mod, {std::move(a), std::move(b)}); }
Formula ite(Formula c, Formula a, Formula b) {
  return node(FK::Ite, {std::move(c), std::move(a), std::move(b)});
}
Formula lt(Formula a, Formula b) { return node(FK::Lt, {std::move(a), std::move(b)}); }
Formula le(Formula a, Formula b) { return node(FK::Le, {std::move(a), std::move(b)}); }
Formula eq(Formula a, Formula b) { return node(FK::Eq, {std::move(a), std::move(b)}); }
Formula ne(Formula a, Formula b) { return lnot(eq(std::move(a), std::move(b))); }
Formula lnot(Formula a) { return node(FK::Not, {std::move(a)}); }
Formula land(std::vector<Formula> kids) {
  if (kids.empty()) return tru();
  if (kids.size() == 1) return kids[0];
  return node(FK::And, std::move(kids));
}
Formula land(Formula a, Formula b) { return land(std::vector<Formula>{std::move(a), std::move(b)}); }
Formula lor(std::vector<Formula> kids) {
  if (kids.empty()) return fls();
  if (kids.size() == 1) return kids[0];
  return node(FK::Or, std::move(kids));
}
Formula lor(Formula a, Formula b) { return lor(std::vector<Formula>{std::move(a), std::move(b)}); }
Formula implies(Formula a, Formula b) { return node(FK::Implies, {std::move(a), std::move(b)}); }
Formula forall(Binder b, Formula body) {
  return node(FK::Forall, {std::move(body)}, std::move(b.name), b.sort);
}
Formula forall(const std::vector<Binder>& bs, Formula body) {
  for (auto it = bs.rbegin(); it != bs.rend(); ++it) body = forall(*it, std::move(body));
  return body;
}
Formula exists(Binder b, Formula body) {
  return node(FK::Exists, {std::move(body)}, std::move(b.name), b.sort);
}
Formula exists(const std::vector<Binder>& bs, Formula body) {
  for (auto it = bs.rbegin(); it != bs.rend(); ++it) body = exists(*it, std::move(body));
  return body;
}
Formula param(std::string name, std::vector<Formula> args) {
  return node(FK::ParamApp, std::move(args), std::move(name), Sort::Bool);
}
Formula fun(std::string name, std::vector<Formula> args) {
  return node(FK::FunApp, std::move(args), std::move(name), Sort::Int);
}
Formula with_kids(const Formula& n, std::vector<Formula> kids) {
  bool same = kids.size() == n->kids.size();
  for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i] == n->kids[i];
  if (same) return n;
  auto m = std::make_shared<FNode>(*n);
  m->kids = std::move(kids);
  return m;
}
}  // namespace f

bool is_quantifier(const Formula& g) { return g->kind == FK::Forall || g->kind == FK::Exists; }

Sort value_sort(const Formula& g) {
  switch (g->kind) {
    case FK::IntConst:
    case FK::Add:
    case FK::Sub:
    case FK::Mul:
    case FK::Neg:
    case FK::Div:
    case FK::Mod:
    case FK::FunApp: return Sort::Int;
    case FK::Var:
    case FK::VecRef: return elem_sort(g->sort) == Sort::Bool ? Sort::Bool : Sort::Int;
    case FK::Ite: return value_sort(g->kids[1]);
    default: return Sort::Bool;
  }
}

bool equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->value != b->value || a->name != b->name || a->sort != b->sort ||
      a->kids.size() != b->kids.size())
    return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!equal(a->kids[i], b->kids[i])) return false;
  return true;
}

namespace {

using BindStack = std::vector<std::pair<std::string, std::string>>;

// Depth of the innermost binding of `n` on the given side, or -1.
long lookup(const BindStack& st, const std::string& n, bool left) {
  for (long i = static_cast<long>(st.size()) - 1; i >= 0; --i)
    if ((left ? st[i].first : st[i].second) == n) return i;
  return -1;
}

bool alpha_rec(const Formula& a, const Formula& b, BindStack& st) {
  if (a->kind != b->kind || a->value != b->value || a->sort != b->sort ||
      a->kids.size() != b->kids.size())
    return false;
  switch (a->kind) {
    case FK::Var:
    case FK::VecRef: {
      long da = lookup(st, a->name, true), db = lookup(st, b->name, false);
      if (da != db) return false;
      if (da < 0 && a->name != b->name) return false;
      break;
    }
    case FK::Forall:
    case FK::Exists: {
      st.emplace_back(a->name, b->name);
      bool r = alpha_rec(a->kids[0], b->kids[0], st);
      st.pop_back();
      return r;
    }
    default:
      if (a->name != b->name) return false;
  }
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!alpha_rec(a->kids[i], b->kids[i], st)) return false;
  return true;
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
  BindStack st;
  return alpha_rec(a, b, st);
}

std::size_t size(const Formula& g) {
  std::size_t n = 1;
  for (const auto& k : g->kids) n += size(k);
  return n;
}

// ---------------------------------------------------------------------------
// Printing and parsing

namespace {

void print(const Formula& g, std::string& out);

void print_app(const char* op, const Formula& g, std::string& out) {
  out += '(';
  out += op;
  for (const auto& k : g->kids) {
    out += ' ';
    print(k, out);
  }
  out += ')';
}

void print(const Formula& g, std::string& out) {
  switch (g->kind) {
    case FK::True: out += "true"; return;
    case FK::False: out += "false"; return;
    case FK::IntConst:
      if (g->value < 0)
        out += "(- " + std::to_string(-g->value) + ")";
      else
        out += std::to_string(g->value);
      return;
    case FK::Var: out += g->name; return;
    case FK::VecRef:
      if (g->kids[0]->kind == FK::IntConst && g->kids[0]->value >= 0) {
        out += element_name(g->name, g->kids[0]->value);
      } else {
        out += "(select " + g->name + " ";
        print(g->kids[0], out);
        out += ')';
      }
      return;
    case FK::Add: print_app("+", g, out); return;
    case FK::Sub:
    case FK::Neg: print_app("-", g, out); return;
    case FK::Mul: print_app("*", g, out); return;
    case FK::Div: print_app("div", g, out); return;
    case FK::Mod: print_app("mod", g, out); return;
    case FK::Ite: print_app("ite", g, out); return;
    case FK::Lt: print_app("<", g, out); return;
    case FK::Le: print_app("<=", g, out); return;
    case FK::Eq: print_app("=", g, out); return;
    case FK::Not: print_app("not", g, out); return;
    case FK::And: print_app("and", g, out); return;
    case FK::Or: print_app("or", g, out); return;
    case FK::Implies: print_app("=>", g, out); return;
    case FK::Forall:
    case FK::Exists: {
      out += g->kind == FK::Forall ? "(forall (" : "(exists (";
      Formula cur = g;
      bool first = true;
      while (cur->kind == g->kind) {
        if (!first) out += ' ';
        first = false;
        out += "(" + cur->name + " " + to_string(cur->sort) + ")";
        cur = cur->kids[0];
      }
      out += ") ";
      print(cur, out);
      out += ')';
      return;
    }
    case FK::ParamApp:
    case FK::FunApp:
      if (g->kids.empty()) {
        out += g->name;
        return;
      }
      print_app(g->name.c_str(), g, out);
      return;
  }
}

}  // namespace

std::string to_string(const Formula& g) {
  std::string out;
  print(g, out);
  return out;
}

std::string element_name(const std::string& vec, std::int64_t index) {
  return vec + "[" + std::to_string(index) + "]";
}

namespace {

struct Parser {
  const ParseContext& ctx;
  std::vector<Binder> scope;

  std::optional<Sort> sort_of_name(const std::string& n) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->name == n) return it->sort;
    auto it = ctx.vars.find(n);
    if (it != ctx.vars.end()) return it->second;
    return std::nullopt;
  }

  Sort scalar_sort(const std::string& n) const {
    if (auto s = sort_of_name(n)) return *s;
    if (n == "b_t") return Sort::Bool;
    return Sort::Int;
  }

  Formula atom(const Sexpr& e) {
    const std::string& a = e.atom;
    if (e.is_int()) return f::num(e.as_int());
    if (a == "true") return f::tru();
    if (a == "false") return f::fls();
    auto lb = a.find('[');
    if (lb != std::string::npos && lb > 0 && a.back() == ']') {
      std::string vec = a.substr(0, lb);
      std::string idx = a.substr(lb + 1, a.size() - lb - 2);
      Sexpr ie = Sexpr::make_atom(idx);
      ie.line = e.line;
      ie.column = e.column;
      Formula index = ie.is_int() ? f::num(ie.as_int()) : f::var(idx, scalar_sort(idx));
      return f::vref(vec, index, elem_sort(scalar_sort(vec)));
    }
    if (ctx.params.count(a) && !sort_of_name(a)) return f::param(a, {});
    return f::var(a, scalar_sort(a));
  }

  enum class Cls { Int, Bool, Vec };

  static Cls cls(const Formula& g) {
    switch (g->kind) {
      case FK::True:
      case FK::False:
      case FK::Lt:
      case FK::Le:
      case FK::Eq:
      case FK::Not:
      case FK::And:
      case FK::Or:
      case FK::Implies:
      case FK::Forall:
      case FK::Exists:
      case FK::ParamApp: return Cls::Bool;
      case FK::Var:
        if (is_vector(g->sort)) return Cls::Vec;
        return g->sort == Sort::Bool ? Cls::Bool : Cls::Int;
      case FK::VecRef: return g->sort == Sort::Bool ? Cls::Bool : Cls::Int;
      case FK::Ite: return cls(g->kids[1]);
      default: return Cls::Int;
    }
  }

  Formula want(const Sexpr& at, Formula g, Cls c) {
    if (cls(g) != c)
      throw SortError(std::to_string(at.line) + ":" + std::to_string(at.column) + ": expected " +
                      (c == Cls::Bool ? "a Boolean" : "an integer") + " operand, got " + to_string(g));
    return g;
  }
  Formula num(const Sexpr& e) { return want(e, parse(e), Cls::Int); }
  Formula prop(const Sexpr& e) { return want(e, parse(e), Cls::Bool); }
  std::vector<Formula> props(const Sexpr& e) {
    std::vector<Formula> out;
    for (std::size_t i = 1; i < e.size(); ++i) out.push_back(prop(e[i]));
    return out;
  }
  std::vector<Formula> nums(const Sexpr& e) {
    std::vector<Formula> out;
    for (std::size_t i = 1; i < e.size(); ++i) out.push_back(num(e[i]));
    return out;
  }

  std::vector<Formula> args(const Sexpr& e, std::size_t from = 1) {
    std::vector<Formula> out;
    for (std::size_t i = from; i < e.size(); ++i) out.push_back(parse(e[i]));
    return out;
  }

  Formula parse(const Sexpr& e) {
    if (e.is_atom()) return atom(e);
    if (e.size() == 0) fail_at(e, "empty formula");
    if (!e[0].is_atom()) fail_at(e, "expected operator symbol");
    const std::string& op = e.head();
    std::size_t n = e.size() - 1;
    auto need = [&](std::size_t m) {
      if (n != m) fail_at(e, "'" + op + "' expects " + std::to_string(m) + " operands");
    };
    auto fold = [&](Formula (*mk)(Formula, Formula)) {
      if (n < 2) fail_at(e, "'" + op + "' expects at least 2 operands");
      auto as = nums(e);
      Formula acc = as[0];
      for (std::size_t i = 1; i < as.size(); ++i) acc = mk(acc, as[i]);
      return acc;
    };
    if (op == "+") return fold(f::add);
    if (op == "*") return fold(f::mul);
    if (op == "-") {
      if (n == 1) {
        Formula a = num(e[1]);
        if (a->kind == FK::IntConst) return f::num(-a->value);
        return f::neg(a);
      }
      return fold(f::sub);
    }
    if (op == "div") {
      need(2);
      return f::div(num(e[1]), num(e[2]));
    }
    if (op == "mod") {
      need(2);
      return f::mod(num(e[1]), num(e[2]));
    }
    if (op == "ite") {
      need(3);
      Formula c = prop(e[1]), a = parse(e[2]);
      return f::ite(c, a, want(e[3], parse(e[3]), cls(a)));
    }
    if (op == "<") {
      need(2);
      return f::lt(num(e[1]), num(e[2]));
    }
    if (op == "<=") {
      need(2);
      return f::le(num(e[1]), num(e[2]));
    }
    if (op == ">") {
      need(2);
      return f::lt(num(e[2]), num(e[1]));
    }
    if (op == ">=") {
      need(2);
      return f::le(num(e[2]), num(e[1]));
    }
    if (op == "=" || op == "distinct") {
      need(2);
      Formula a = parse(e[1]);
      Formula b = want(e[2], parse(e[2]), cls(a));
      return op == "=" ? f::eq(a, b) : f::ne(a, b);
    }
    if (op == "not") {
      need(1);
      return f::lnot(prop(e[1]));
    }
    if (op == "and") {
      if (n < 2) fail_at(e, "'and' expects at least 2 operands");
      return f::land(props(e));
    }
    if (op == "or") {
      if (n < 2) fail_at(e, "'or' expects at least 2 operands");
      return f::lor(props(e));
    }
    if (op == "=>") {
      if (n < 2) fail_at(e, "'=>' expects at least 2 operands");
      auto as = props(e);
      Formula acc = as.back();
      for (std::size_t i = as.size() - 1; i-- > 0;) acc = f::implies(as[i], acc);
      return acc;
    }
    if (op == "select") {
      need(2);
      if (!e[1].is_atom()) fail_at(e[1], "select expects a vector name");
      return f::vref(e[1].atom, num(e[2]), elem_sort(scalar_sort(e[1].atom)));
    }
    if (op == "forall" || op == "exists") {
      need(2);
      if (!e[1].is_list() || e[1].size() == 0) fail_at(e[1], "expected binder list");
      std::vector<Binder> bs;
      for (const auto& b : e[1].items) {
        if (!b.is_list() || b.size() != 2 || !b[0].is_atom() || !b[1].is_atom())
          fail_at(b, "malformed binder");
        auto s = parse_sort(b[1].atom);
        if (!s) fail_at(b[1], "unknown sort '" + b[1].atom + "'");
        bs.push_back({b[0].atom, *s});
      }
      for (const auto& b : bs) scope.push_back(b);
      Formula body = prop(e[2]);
      scope.resize(scope.size() - bs.size());
      return op == "forall" ? f::forall(bs, body) : f::exists(bs, body);
    }
    if (ctx.params.count(op)) return f::param(op, args(e));
    if (ctx.funs.count(op)) return f::fun(op, args(e));
    fail_at(e, "unknown function symbol '" + op + "'");
  }
};

}  // namespace

Formula parse_formula(const Sexpr& e, const ParseContext& ctx) {
  Parser p{ctx, {}};
  return p.parse(e);
}

Formula parse_formula(std::string_view text, const ParseContext& ctx) {
  return parse_formula(parse_sexpr(text), ctx);
}

// ---------------------------------------------------------------------------
// Variables

namespace {

void collect_free(const Formula& g, std::vector<std::string>& bound, std::vector<Binder>& out,
                  std::set<std::string>& seen) {
  auto note = [&](const std::string& n, Sort s) {
    if (std::find(bound.begin(), bound.end(), n) != bound.end()) return;
    if (seen.insert(n).second) out.push_back({n, s});
  };
  switch (g->kind) {
    case FK::Var: note(g->name, g->sort); return;
    case FK::VecRef:
      note(g->name, vector_of(g->sort));
      collect_free(g->kids[0], bound, out, seen);
      return;
    case FK::Forall:
    case FK::Exists:
      bound.push_back(g->name);
      collect_free(g->kids[0], bound, out, seen);
      bound.pop_back();
      return;
    default:
      for (const auto& k : g->kids) collect_free(k, bound, out, seen);
  }
}

void collect_all(const Formula& g, std::set<std::string>& out) {
  if (!g->name.empty()) out.insert(g->name);
  for (const auto& k : g->kids) collect_all(k, out);
}

}  // namespace

std::vector<Binder> free_vars(const Formula& g) {
  std::vector<std::string> bound;
  std::vector<Binder> out;
  std::set<std::string> seen;
  collect_free(g, bound, out, seen);
  return out;
}

std::set<std::string> free_names(const Formula& g) {
  std::set<std::string> out;
  for (const auto& b : free_vars(g)) out.insert(b.name);
  return out;
}

std::set<std::string> all_names(const Formula& g) {
  std::set<std::string> out;
  collect_all(g, out);
  return out;
}

namespace {
void collect_params(const Formula& g, std::vector<std::string>& out) {
  if (g->kind == FK::ParamApp && std::find(out.begin(), out.end(), g->name) == out.end())
    out.push_back(g->name);
  for (const auto& k : g->kids) collect_params(k, out);
}
bool any_kind(const Formula& g, FK k) {
  if (g->kind == k) return true;
  return std::any_of(g->kids.begin(), g->kids.end(), [&](const Formula& c) { return any_kind(c, k); });
}
}  // namespace

std::vector<std::string> params_of(const Formula& g) {
  std::vector<std::string> out;
  collect_params(g, out);
  return out;
}

bool has_params(const Formula& g) { return any_kind(g, FK::ParamApp); }
bool has_funs(const Formula& g) { return any_kind(g, FK::FunApp); }

bool mentions(const Formula& g, const std::string& name) {
  if (g->name == name) return true;
  return std::any_of(g->kids.begin(), g->kids.end(),
                     [&](const Formula& c) { return mentions(c, name); });
}

void NameSupply::reserve(const Formula& g) {
  for (const auto& n : all_names(g)) used_.insert(n);
}

std::string NameSupply::fresh(const std::string& base) {
  if (!used_.count(base)) {
    used_.insert(base);
    return base;
  }
  return fresh_indexed(base);
}

std::string NameSupply::fresh_indexed(const std::string& base) {
  int& i = next_[base];
  for (;;) {
    std::string cand = base + std::to_string(++i);
    if (used_.insert(cand).second) return cand;
  }
}

// ---------------------------------------------------------------------------
// Substitution

void Subst::rename_vector(const std::string& from, const std::string& to, Sort elem) {
  Sort e = elem_sort(elem);
  vectors[from] = {[to, e](const Formula& idx) { return f::vref(to, idx, e); }, {to}};
}

namespace {

std::string avoid(const std::string& base, const std::set<std::string>& taken) {
  for (int i = 1;; ++i) {
    std::string cand = base + std::to_string(i);
    if (!taken.count(cand)) return cand;
  }
}

Formula subst_rec(const Formula& g, const Subst& s, const std::set<std::string>& repl_fv) {
  switch (g->kind) {
    case FK::Var: {
      auto it = s.scalars.find(g->name);
      if (it == s.scalars.end()) return g;
      Sort want = elem_sort(g->sort) == Sort::Bool ? Sort::Bool : Sort::Int;
      if (value_sort(it->second) != want)
        throw SortError("cannot substitute " + to_string(it->second) + " for " + g->name +
                        " of sort " + to_string(g->sort));
      return it->second;
    }
    case FK::VecRef: {
      Formula idx = subst_rec(g->kids[0], s, repl_fv);
      auto it = s.vectors.find(g->name);
      if (it != s.vectors.end()) return it->second.fn(idx);
      return f::with_kids(g, {idx});
    }
    case FK::Forall:
    case FK::Exists: {
      Subst inner = s;
      inner.scalars.erase(g->name);
      inner.vectors.erase(g->name);
      if (inner.empty()) return g;
      Formula body = g->kids[0];
      auto body_free = free_names(body);
      bool relevant = false;
      for (const auto& [k, _] : inner.scalars) relevant = relevant || body_free.count(k);
      for (const auto& [k, _] : inner.vectors) relevant = relevant || body_free.count(k);
      if (!relevant) return g;
      std::string name = g->name;
      if (repl_fv.count(name)) {
        std::set<std::string> taken = repl_fv;
        for (const auto& n : all_names(body)) taken.insert(n);
        for (const auto& [k, _] : inner.scalars) taken.insert(k);
        for (const auto& [k, _] : inner.vectors) taken.insert(k);
        std::string fresh = avoid(name, taken);
        Subst ren;
        if (is_vector(g->sort))
          ren.rename_vector(name, fresh, g->sort);
        else
          ren.scalars[name] = f::var(fresh, g->sort);
        body = subst_rec(body, ren, {fresh});
        name = fresh;
      }
      body = subst_rec(body, inner, repl_fv);
      auto n = std::make_shared<FNode>(*g);
      n->name = name;
      n->kids = {body};
      return n;
    }
    default: {
      if (g->kids.empty()) return g;
      std::vector<Formula> kids;
      kids.reserve(g->kids.size());
      for (const auto& k : g->kids) kids.push_back(subst_rec(k, s, repl_fv));
      return f::with_kids(g, std::move(kids));
    }
  }
}

}  // namespace

Formula substitute(const Formula& g, const Subst& s) {
  if (s.empty()) return g;
  std::set<std::string> repl_fv;
  for (const auto& [_, r] : s.scalars)
    for (const auto& n : free_names(r)) repl_fv.insert(n);
  for (const auto& [_, v] : s.vectors) repl_fv.insert(v.introduces.begin(), v.introduces.end());
  return subst_rec(g, s, repl_fv);
}

Formula substitute(const Formula& g, const std::string& target, const Formula& replacement) {
  Subst s;
  s.scalars[target] = replacement;
  return substitute(g, s);
}

Formula vec_substitute(const Formula& g, const std::string& vec,
                       std::function<Formula(const Formula& index)> fn,
                       std::set<std::string> introduces) {
  Subst s;
  s.vectors[vec] = {std::move(fn), std::move(introduces)};
  return substitute(g, s);
}

// ---------------------------------------------------------------------------
// Folding and expansion

namespace {

std::int64_t floor_div_euclid(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b, r = a % b;
  if (r < 0) q += (b > 0) ? -1 : 1;
  return q;
}

std::int64_t mod_euclid(std::int64_t a, std::int64_t b) {
  std::int64_t r = a % b;
  if (r < 0) r += (b > 0) ? b : -b;
  return r;
}

std::optional<std::int64_t> const_int(const Formula& g) {
  auto bin = [&](auto op) -> std::optional<std::int64_t> {
    auto a = const_int(g->kids[0]);
    auto b = const_int(g->kids[1]);
    if (!a || !b) return std::nullopt;
    return op(*a, *b);
  };
  switch (g->kind) {
    case FK::IntConst: return g->value;
    case FK::Add: return bin([](auto a, auto b) { return a + b; });
    case FK::Sub: return bin([](auto a, auto b) { return a - b; });
    case FK::Mul: return bin([](auto a, auto b) { return a * b; });
    case FK::Neg: {
      auto a = const_int(g->kids[0]);
      if (!a) return std::nullopt;
      return -*a;
    }
    case FK::Div:
    case FK::Mod: {
      auto a = const_int(g->kids[0]);
      auto b = const_int(g->kids[1]);
      if (!a || !b || *b == 0) return std::nullopt;
      return g->kind == FK::Div ? floor_div_euclid(*a, *b) : mod_euclid(*a, *b);
    }
    default: return std::nullopt;
  }
}

}  // namespace

Formula fold_indices(const Formula& g) {
  if (g->kind == FK::VecRef) {
    Formula idx = fold_indices(g->kids[0]);
    if (auto c = const_int(idx)) idx = f::num(*c);
    return f::with_kids(g, {idx});
  }
  if (g->kids.empty()) return g;
  std::vector<Formula> kids;
  for (const auto& k : g->kids) kids.push_back(fold_indices(k));
  return f::with_kids(g, std::move(kids));
}

Formula simplify(const Formula& g) {
  std::vector<Formula> kids;
  for (const auto& k : g->kids) kids.push_back(simplify(k));
  Formula h = f::with_kids(g, kids);
  if (auto c = const_int(h); c && h->kind != FK::IntConst) return f::num(*c);
  auto is_t = [](const Formula& x) { return x->kind == FK::True; };
  auto is_f = [](const Formula& x) { return x->kind == FK::False; };
  switch (h->kind) {
    case FK::Lt:
    case FK::Le:
    case FK::Eq: {
      auto a = const_int(kids[0]), b = const_int(kids[1]);
      if (a && b)
        return f::boolean(h->kind == FK::Lt ? *a < *b : h->kind == FK::Le ? *a <= *b : *a == *b);
      if (h->kind == FK::Eq && (is_t(kids[0]) || is_f(kids[0])) && (is_t(kids[1]) || is_f(kids[1])))
        return f::boolean(kids[0]->kind == kids[1]->kind);
      return h;
    }
    case FK::Not:
      if (is_t(kids[0])) return f::fls();
      if (is_f(kids[0])) return f::tru();
      return h;
    case FK::And: {
      std::vector<Formula> keep;
      for (const auto& k : kids) {
        if (is_f(k)) return f::fls();
        if (!is_t(k)) keep.push_back(k);
      }
      return f::land(keep);
    }
    case FK::Or: {
      std::vector<Formula> keep;
      for (const auto& k : kids) {
        if (is_t(k)) return f::tru();
        if (!is_f(k)) keep.push_back(k);
      }
      return f::lor(keep);
    }
    case FK::Implies:
      if (is_f(kids[0]) || is_t(kids[1])) return f::tru();
      if (is_t(kids[0])) return kids[1];
      if (is_f(kids[1])) return simplify(f::lnot(kids[0]));
      return h;
    case FK::Ite:
      if (is_t(kids[0])) return kids[1];
      if (is_f(kids[0])) return kids[2];
      return h;
    default: return h;
  }
}

Formula expand_index(const Formula& g, int k) {
  if (is_quantifier(g) && g->sort == Sort::Index) {
    if (k < 1) throw Error("index quantifier without a vector length");
    Formula body = expand_index(g->kids[0], k);
    std::vector<Formula> parts;
    for (int c = 1; c <= k; ++c) {
      Subst s;
      s.scalars[g->name] = f::num(c);
      parts.push_back(fold_indices(substitute(body, s)));
    }
    return g->kind == FK::Forall ? f::land(parts) : f::lor(parts);
  }
  if (g->kind == FK::VecRef) return fold_indices(g);
  if (g->kids.empty()) return g;
  std::vector<Formula> kids;
  for (const auto& c : g->kids) kids.push_back(expand_index(c, k));
  return f::with_kids(g, std::move(kids));
}

namespace {

Formula scalarize_rec(const Formula& g, int k) {
  if (g->kind == FK::VecRef) {
    const Formula& idx = g->kids[0];
    if (idx->kind != FK::IntConst)
      throw Error("vector index is not a literal after expansion: " + to_string(g));
    if (idx->value < 1 || idx->value > k)
      throw Error("vector index out of range 1.." + std::to_string(k) + ": " + to_string(g));
    return f::var(element_name(g->name, idx->value), g->sort);
  }
  if (is_quantifier(g) && is_vector(g->sort)) {
    Formula body = scalarize_rec(g->kids[0], k);
    std::vector<Binder> bs;
    for (int c = 1; c <= k; ++c) bs.push_back({element_name(g->name, c), elem_sort(g->sort)});
    return g->kind == FK::Forall ? f::forall(bs, body) : f::exists(bs, body);
  }
  if (g->kids.empty()) return g;
  std::vector<Formula> kids;
  for (const auto& c : g->kids) kids.push_back(scalarize_rec(c, k));
  return f::with_kids(g, std::move(kids));
}

}  // namespace

Formula scalarize(const Formula& g, int k) { return scalarize_rec(expand_index(g, k), k); }

// ---------------------------------------------------------------------------
// T transformation

namespace {

void collect_indices(const Formula& g, const std::map<std::string, std::string>& ymap,
                     std::vector<Formula>& out) {
  if (g->kind == FK::VecRef && ymap.count(g->name)) {
    Formula idx = g->kids[0];
    if (auto c = const_int(idx)) idx = f::num(*c);
    bool dup = std::any_of(out.begin(), out.end(), [&](const Formula& o) { return equal(o, idx); });
    if (!dup) out.push_back(idx);
  }
  for (const auto& k : g->kids) collect_indices(k, ymap, out);
}

Formula redirect(const Formula& g, const std::map<std::string, std::string>& ymap,
                 const std::vector<Formula>& active) {
  if (g->kind == FK::VecRef) {
    Formula idx = g->kids[0];
    if (auto c = const_int(idx)) idx = f::num(*c);
    auto it = ymap.find(g->name);
    if (it != ymap.end()) {
      bool on = std::any_of(active.begin(), active.end(),
                            [&](const Formula& a) { return equal(a, idx); });
      return f::vref(on ? it->second : g->name, idx, g->sort);
    }
    return f::with_kids(g, {idx});
  }
  if (g->kids.empty()) return g;
  std::vector<Formula> kids;
  for (const auto& k : g->kids) kids.push_back(redirect(k, ymap, active));
  return f::with_kids(g, std::move(kids));
}

Formula t_rec(const Formula& q, const std::string& b_loop,
              const std::map<std::string, std::string>& ymap) {
  switch (q->kind) {
    case FK::Forall:
    case FK::Exists: {
      if (ymap.count(q->name)) {
        auto inner = ymap;
        inner.erase(q->name);
        return f::with_kids(q, {t_rec(q->kids[0], b_loop, inner)});
      }
      return f::with_kids(q, {t_rec(q->kids[0], b_loop, ymap)});
    }
    case FK::Not:
    case FK::And:
    case FK::Or:
    case FK::Implies: {
      std::vector<Formula> kids;
      for (const auto& k : q->kids) kids.push_back(t_rec(k, b_loop, ymap));
      return f::with_kids(q, std::move(kids));
    }
    default: break;
  }
  std::vector<Formula> idx;
  collect_indices(q, ymap, idx);
  if (idx.empty()) return q;
  std::size_t n = idx.size();
  if (n > 20) throw Error("too many vector indices in one atom for the case split");
  std::vector<Formula> cases;
  // Patterns run true-first, the first index varying slowest.
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Formula> guard;
    std::vector<Formula> active;
    for (std::size_t j = 0; j < n; ++j) {
      bool neg = (mask >> (n - 1 - j)) & 1;
      Formula lit = f::vref(b_loop, idx[j], Sort::Bool);
      guard.push_back(neg ? f::lnot(lit) : lit);
      if (!neg) active.push_back(idx[j]);
    }
    cases.push_back(f::implies(f::land(guard), redirect(q, ymap, active)));
  }
  return f::land(cases);
}

}  // namespace

Formula t_transform(const Formula& q, const std::string& b_loop,
                    const std::map<std::string, std::string>& ymap) {
  if (mentions(q, b_loop)) throw Error("postcondition already mentions " + b_loop);
  return t_rec(q, b_loop, ymap);
}

// ---------------------------------------------------------------------------
// Plugging

std::size_t flat_arity(const std::vector<Binder>& formals, int k) {
  std::size_t n = 0;
  for (const auto& b : formals) n += is_vector(b.sort) ? static_cast<std::size_t>(k) : 1;
  return n;
}

namespace {

Formula instantiate(const std::string& name, const ParamDef& d, const std::vector<Formula>& args,
                    int k) {
  if (flat_arity(d.formals, k) != args.size())
    throw Error("parameter " + name + " expects " + std::to_string(flat_arity(d.formals, k)) +
                " arguments, got " + std::to_string(args.size()));
  if (has_params(d.body)) throw Error("definition of " + name + " mentions a parameter");
  bool vec = std::any_of(d.formals.begin(), d.formals.end(),
                         [](const Binder& b) { return is_vector(b.sort); });
  Formula body = vec ? expand_index(d.body, k) : d.body;
  Subst s;
  std::size_t off = 0;
  for (const auto& b : d.formals) {
    if (is_vector(b.sort)) {
      std::vector<Formula> slice(args.begin() + off, args.begin() + off + k);
      std::set<std::string> intro;
      for (const auto& a : slice)
        for (const auto& n : free_names(a)) intro.insert(n);
      std::string fname = b.name;
      s.vectors[b.name] = {[slice, fname, k](const Formula& idx) {
                             if (idx->kind != FK::IntConst || idx->value < 1 || idx->value > k)
                               throw Error("non-literal index into formal " + fname);
                             return slice[idx->value - 1];
                           },
                           intro};
      off += k;
    } else {
      s.scalars[b.name] = args[off++];
    }
  }
  return substitute(body, s);
}

}  // namespace

Formula plug_formula(const Formula& g, const Assignment& a, int k, bool partial) {
  if (g->kind == FK::ParamApp) {
    auto it = a.find(g->name);
    std::vector<Formula> args;
    for (const auto& x : g->kids) args.push_back(plug_formula(x, a, k, partial));
    if (it == a.end()) {
      if (!partial) throw Error("no definition for parameter " + g->name);
      return f::with_kids(g, std::move(args));
    }
    return instantiate(g->name, it->second, args, k);
  }
  if (g->kids.empty()) return g;
  std::vector<Formula> kids;
  for (const auto& c : g->kids) kids.push_back(plug_formula(c, a, k, partial));
  return f::with_kids(g, std::move(kids));
}

std::string to_string(const Assignment& a) {
  std::string out;
  for (const auto& [name, d] : a) {
    out += name + "(";
    for (std::size_t i = 0; i < d.formals.size(); ++i) {
      if (i) out += ", ";
      out += d.formals[i].name;
    }
    out += ") := " + to_string(d.body) + "\n";
  }
  return out;
}

}  // namespace wul
