#include "wul/oracle.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace wul {

std::string to_string(const State& s) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [name, v] : s) {
    os << (first ? "" : ", ") << name << "=";
    first = false;
    bool b = elem_sort(v.sort) == Sort::Bool;
    auto one = [&](std::int64_t x) {
      if (b)
        os << (x ? "true" : "false");
      else
        os << x;
    };
    if (is_vector(v.sort)) {
      os << "[";
      for (std::size_t i = 0; i < v.elems.size(); ++i) {
        if (i) os << ",";
        one(v.elems[i]);
      }
      os << "]";
    } else {
      one(v.elems.at(0));
    }
  }
  os << "}";
  return os.str();
}

std::int64_t euclid_mod(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EvalError("division by zero");
  std::int64_t r = a % b;
  if (r < 0) r += b < 0 ? -b : b;
  return r;
}

std::int64_t euclid_div(std::int64_t a, std::int64_t b) { return (a - euclid_mod(a, b)) / b; }

// ---------------------------------------------------------------- eval

namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

struct Evaluator {
  const EvalOptions& o;

  const Val& lookup(const State& s, const std::string& n) const {
    auto it = s.find(n);
    if (it == s.end()) throw EvalError("unbound variable " + n);
    return it->second;
  }

  std::vector<std::int64_t> domain(Sort s) const {
    std::vector<std::int64_t> d;
    switch (s) {
      case Sort::Bool: return {0, 1};
      case Sort::Index:
        for (int i = 1; i <= o.k; ++i) d.push_back(i);
        return d;
      default:
        for (auto v = o.lo; v <= o.hi; ++v) d.push_back(v);
        return d;
    }
  }

  // Calls fn on every value of a binder of sort s; stops when fn returns true.
  template <typename F>
  bool any_value(Sort s, F&& fn) const {
    if (!is_vector(s)) {
      for (auto v : domain(s))
        if (fn(Val::scalar(v, s))) return true;
      return false;
    }
    if (o.k <= 0) throw EvalError("vector quantifier without a vector length");
    auto d = domain(elem_sort(s));
    std::vector<std::size_t> pos(static_cast<std::size_t>(o.k), 0);
    for (;;) {
      Val v{s, {}};
      for (auto p : pos) v.elems.push_back(d[p]);
      if (fn(v)) return true;
      std::size_t i = 0;
      while (i < pos.size() && ++pos[i] == d.size()) pos[i++] = 0;
      if (i == pos.size()) return false;
    }
  }

  std::int64_t run(const Formula& g, const State& s) const {
    switch (g->kind) {
      case FK::True: return 1;
      case FK::False: return 0;
      case FK::IntConst: return g->value;
      case FK::Var: {
        const Val& v = lookup(s, g->name);
        if (is_vector(v.sort)) throw EvalError("vector " + g->name + " used as a scalar");
        return v.elems.at(0);
      }
      case FK::VecRef: {
        const Val& v = lookup(s, g->name);
        std::int64_t i = run(g->kids[0], s);
        if (!is_vector(v.sort)) throw EvalError(g->name + " is not a vector");
        if (i < 1 || i > static_cast<std::int64_t>(v.elems.size()))
          throw EvalError("index " + std::to_string(i) + " out of range for " + g->name);
        return v.elems[static_cast<std::size_t>(i - 1)];
      }
      case FK::Add: return wrap_add(run(g->kids[0], s), run(g->kids[1], s));
      case FK::Sub: return wrap_add(run(g->kids[0], s), -run(g->kids[1], s));
      case FK::Mul: return wrap_mul(run(g->kids[0], s), run(g->kids[1], s));
      case FK::Neg: return -run(g->kids[0], s);
      case FK::Div: return euclid_div(run(g->kids[0], s), run(g->kids[1], s));
      case FK::Mod: return euclid_mod(run(g->kids[0], s), run(g->kids[1], s));
      case FK::Ite: return run(g->kids[0], s) ? run(g->kids[1], s) : run(g->kids[2], s);
      case FK::Lt: return run(g->kids[0], s) < run(g->kids[1], s);
      case FK::Le: return run(g->kids[0], s) <= run(g->kids[1], s);
      case FK::Eq: return run(g->kids[0], s) == run(g->kids[1], s);
      case FK::Not: return !run(g->kids[0], s);
      case FK::And:
        for (const auto& k : g->kids)
          if (!run(k, s)) return 0;
        return 1;
      case FK::Or:
        for (const auto& k : g->kids)
          if (run(k, s)) return 1;
        return 0;
      case FK::Implies: return !run(g->kids[0], s) || run(g->kids[1], s);
      case FK::Forall:
      case FK::Exists: {
        bool universal = g->kind == FK::Forall;
        State t = s;
        bool hit = any_value(g->sort, [&](const Val& v) {
          t[g->name] = v;
          bool b = run(g->kids[0], t) != 0;
          return universal ? !b : b;
        });
        return universal ? !hit : hit;
      }
      case FK::ParamApp: {
        if (!o.params) throw EvalError("no interpretation for parameter " + g->name);
        auto it = o.params->find(g->name);
        if (it == o.params->end()) throw EvalError("no interpretation for parameter " + g->name);
        const ParamDef& d = it->second;
        if (g->kids.size() != flat_arity(d.formals, o.k))
          throw EvalError("arity mismatch applying " + g->name);
        State env;
        std::size_t a = 0;
        for (const auto& fm : d.formals) {
          if (is_vector(fm.sort)) {
            Val v{fm.sort, {}};
            for (int c = 0; c < o.k; ++c) v.elems.push_back(run(g->kids[a++], s));
            env[fm.name] = v;
          } else {
            env[fm.name] = Val::scalar(run(g->kids[a++], s), fm.sort);
          }
        }
        return run(d.body, env);
      }
      case FK::FunApp: {
        auto it = o.funs.find(g->name);
        if (it == o.funs.end()) throw EvalError("no interpretation for function " + g->name);
        std::vector<std::int64_t> args;
        for (const auto& k : g->kids) args.push_back(run(k, s));
        return it->second(args);
      }
    }
    throw EvalError("unknown formula node");
  }
};

}  // namespace

std::int64_t eval(const Formula& g, const State& s, const EvalOptions& o) { return Evaluator{o}.run(g, s); }

bool holds(const Formula& g, const State& s, const EvalOptions& o) { return eval(g, s, o) != 0; }

// ---------------------------------------------------------------- exec

namespace {

struct Machine {
  int fuel;

  std::int64_t get(const State& s, const std::string& n) const {
    auto it = s.find(n);
    if (it == s.end()) throw EvalError("unbound variable " + n);
    return it->second.elems.at(0);
  }
  static void set(State& s, const std::string& n, std::int64_t v, Sort sort = Sort::Int) {
    s[n] = Val::scalar(v, sort);
  }

  // false on divergence
  bool run(const Term& t, State& s) const {
    switch (t->tag) {
      case Tag::IntLit: set(s, kIntResult, t->value); return true;
      case Tag::BoolLit: set(s, kBoolResult, t->value ? 1 : 0, Sort::Bool); return true;
      case Tag::Var: set(s, kIntResult, get(s, t->name)); return true;
      case Tag::Plus: {
        if (!run(t->kids[0], s)) return false;
        std::int64_t a = get(s, kIntResult);
        if (!run(t->kids[1], s)) return false;
        set(s, kIntResult, wrap_add(a, get(s, kIntResult)));
        return true;
      }
      case Tag::Lt:
      case Tag::Eq: {
        if (!run(t->kids[0], s)) return false;
        std::int64_t a = get(s, kIntResult);
        if (!run(t->kids[1], s)) return false;
        std::int64_t b = get(s, kIntResult);
        set(s, kBoolResult, t->tag == Tag::Lt ? a < b : a == b, Sort::Bool);
        return true;
      }
      case Tag::And: {
        if (!run(t->kids[0], s)) return false;
        std::int64_t a = get(s, kBoolResult);
        if (!run(t->kids[1], s)) return false;
        set(s, kBoolResult, a && get(s, kBoolResult), Sort::Bool);
        return true;
      }
      case Tag::Not:
        if (!run(t->kids[0], s)) return false;
        set(s, kBoolResult, !get(s, kBoolResult), Sort::Bool);
        return true;
      case Tag::Assign:
        if (!run(t->kids[0], s)) return false;
        set(s, t->name, get(s, kIntResult));
        return true;
      case Tag::Seq: return run(t->kids[0], s) && run(t->kids[1], s);
      case Tag::Skip: return true;
      case Tag::IfThenElse:
        if (!run(t->kids[0], s)) return false;
        return run(get(s, kBoolResult) ? t->kids[1] : t->kids[2], s);
      case Tag::While:
        for (int it = 0;; ++it) {
          if (!run(t->kids[0], s)) return false;
          if (!get(s, kBoolResult)) return true;
          if (it >= fuel) return false;
          if (!run(t->kids[1], s)) return false;
        }
      case Tag::NonterminalRef: throw EvalError("cannot execute nonterminal " + t->name);
    }
    throw EvalError("unknown term");
  }
};

}  // namespace

std::optional<State> exec(const Term& p, const State& s, int fuel, int k) {
  Machine m{fuel};
  if (k <= 0) {
    State t = s;
    if (!m.run(p, t)) return std::nullopt;
    return t;
  }
  State out = s;
  for (int i = 0; i < k; ++i) {
    State lane;
    for (const auto& [n, v] : s) {
      if (is_vector(v.sort)) {
        if (static_cast<int>(v.elems.size()) != k) throw EvalError("vector " + n + " has the wrong length");
        lane[n] = Val::scalar(v.elems[static_cast<std::size_t>(i)], elem_sort(v.sort));
      } else {
        lane[n] = v;
      }
    }
    if (!m.run(p, lane)) return std::nullopt;
    for (const auto& [n, v] : lane) {
      auto it = out.find(n);
      if (it == out.end()) {
        it = out.emplace(n, Val{vector_of(v.sort), std::vector<std::int64_t>(static_cast<std::size_t>(k), 0)}).first;
      }
      if (is_vector(it->second.sort))
        it->second.elems[static_cast<std::size_t>(i)] = v.elems[0];
      else if (!(it->second == v))
        throw EvalError("scalar " + n + " assigned inside a vector state");
    }
  }
  return out;
}

// ---------------------------------------------------------------- enumeration

namespace {

struct Enumerator {
  const Rtg& g;
  std::size_t limit;
  std::map<std::pair<std::string, int>, std::vector<Term>> memo;

  void check(std::size_t n) const {
    if (n > limit) throw Error("program enumeration exceeds " + std::to_string(limit) + " programs");
  }

  // Completions of t where every nonterminal expands within `depth` levels.
  std::vector<Term> expand(const Term& t, int depth) {
    if (t->tag == Tag::NonterminalRef) return of(t->name, depth);
    if (t->kids.empty()) return {t};
    std::vector<std::vector<Term>> parts;
    for (const auto& k : t->kids) {
      parts.push_back(expand(k, depth));
      if (parts.back().empty()) return {};
    }
    std::vector<Term> out;
    std::vector<std::size_t> pos(parts.size(), 0);
    for (;;) {
      auto n = std::make_shared<TermNode>(*t);
      for (std::size_t i = 0; i < parts.size(); ++i) n->kids[i] = parts[i][pos[i]];
      out.push_back(n);
      check(out.size());
      // Odometer with the last child varying fastest keeps production order stable.
      std::size_t i = parts.size();
      while (i > 0) {
        --i;
        if (++pos[i] < parts[i].size()) break;
        pos[i] = 0;
        if (i == 0) return out;
      }
    }
  }

  const std::vector<Term>& of(const std::string& n, int depth) {
    auto key = std::make_pair(n, depth);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::vector<Term> out;
    if (depth >= 1) {
      std::set<std::string> seen;
      for (const auto& p : g.at(n).productions)
        for (const auto& t : expand(p, depth - 1))
          if (seen.insert(to_string(t)).second) out.push_back(t);
      check(out.size());
    }
    return memo[key] = std::move(out);
  }
};

}  // namespace

std::vector<Term> enumerate_programs(const Rtg& g, const Term& t, int depth, std::size_t limit) {
  Enumerator e{g, limit, {}};
  auto all = e.expand(t, depth);
  std::vector<Term> out;
  std::set<std::string> seen;
  for (const auto& p : all)
    if (seen.insert(to_string(p)).second) out.push_back(p);
  return out;
}

std::vector<Term> enumerate_programs(const Rtg& g, const std::string& n, int depth, std::size_t limit) {
  return enumerate_programs(g, term::nonterminal(n), depth, limit);
}

// ---------------------------------------------------------------- triples

namespace {

// Value pinned by a top-level conjunct `v = c` or `v[i] = c`.
void collect_pins(const Formula& p, std::map<std::pair<std::string, std::int64_t>, std::int64_t>& pins) {
  if (p->kind == FK::And) {
    for (const auto& k : p->kids) collect_pins(k, pins);
    return;
  }
  auto pin = [&](const Formula& lhs, const Formula& rhs) {
    if (rhs->kind != FK::IntConst) return;
    if (lhs->kind == FK::Var) pins[{lhs->name, 0}] = rhs->value;
    if (lhs->kind == FK::VecRef && lhs->kids[0]->kind == FK::IntConst)
      pins[{lhs->name, lhs->kids[0]->value}] = rhs->value;
  };
  if (p->kind == FK::Eq) {
    pin(p->kids[0], p->kids[1]);
    pin(p->kids[1], p->kids[0]);
  }
}

}  // namespace

std::vector<State> initial_states(const Formula& p, const Formula& q, const Rtg& g, const Term& s,
                                  const OracleConfig& c) {
  std::vector<Binder> vars;
  auto add = [&](const Binder& b) {
    if (std::none_of(vars.begin(), vars.end(), [&](const Binder& v) { return v.name == b.name; }))
      vars.push_back(b);
  };
  for (const auto& b : free_vars(p)) add(b);
  for (const auto& b : free_vars(q)) add(b);
  for (const auto& v : program_vars(g, s)) add({v, c.k > 0 ? Sort::IntVec : Sort::Int});

  std::map<std::pair<std::string, std::int64_t>, std::int64_t> pins;
  collect_pins(p, pins);

  // One slot per scalar or vector element.
  struct Slot {
    std::string name;
    std::int64_t index;  // 0 for scalars
    std::vector<std::int64_t> values;
  };
  std::vector<Slot> slots;
  std::size_t total = 1;
  auto values_for = [&](const std::string& n, std::int64_t i, Sort elem) {
    auto it = pins.find({n, i});
    if (it != pins.end()) return std::vector<std::int64_t>{it->second};
    if (elem == Sort::Bool) return std::vector<std::int64_t>{0, 1};
    std::vector<std::int64_t> d;
    for (auto v = c.lo; v <= c.hi; ++v) d.push_back(v);
    return d;
  };
  for (const auto& b : vars) {
    if (b.sort == Sort::Index) continue;
    if (is_vector(b.sort)) {
      for (int i = 1; i <= c.k; ++i) slots.push_back({b.name, i, values_for(b.name, i, elem_sort(b.sort))});
    } else {
      slots.push_back({b.name, 0, values_for(b.name, 0, b.sort)});
    }
    for (int i = 0; i < (is_vector(b.sort) ? c.k : 1); ++i) {
      total *= slots[slots.size() - 1 - static_cast<std::size_t>(i)].values.size();
      if (total > c.max_states) throw Error("initial-state space exceeds " + std::to_string(c.max_states));
    }
  }

  State base;
  for (const auto& b : vars) {
    if (b.sort == Sort::Index) continue;
    base[b.name] = is_vector(b.sort)
                       ? Val{b.sort, std::vector<std::int64_t>(static_cast<std::size_t>(c.k), 0)}
                       : Val::scalar(0, b.sort);
  }
  for (const char* r : {kIntResult, kBoolResult}) {
    if (base.count(r)) continue;
    Sort e = std::string(r) == kBoolResult ? Sort::Bool : Sort::Int;
    base[r] = c.k > 0 ? Val{vector_of(e), std::vector<std::int64_t>(static_cast<std::size_t>(c.k), 0)}
                      : Val::scalar(0, e);
  }

  EvalOptions eo;
  eo.k = c.k;
  eo.lo = c.lo;
  eo.hi = c.hi;
  std::vector<State> out;
  std::vector<std::size_t> pos(slots.size(), 0);
  for (;;) {
    State st = base;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      Val& v = st[slots[i].name];
      v.elems[slots[i].index == 0 ? 0 : static_cast<std::size_t>(slots[i].index - 1)] = slots[i].values[pos[i]];
    }
    bool ok;
    try {
      ok = holds(p, st, eo);
    } catch (const EvalError&) {
      ok = false;
    }
    if (ok) out.push_back(std::move(st));
    std::size_t i = 0;
    while (i < pos.size() && ++pos[i] == slots[i].values.size()) pos[i++] = 0;
    if (i == pos.size()) break;
  }
  return out;
}

TripleResult check_triple(const Formula& p, const Rtg& g, const Term& s, const Formula& q,
                          const OracleConfig& c) {
  TripleResult r;
  auto programs = enumerate_programs(g, s, c.depth, c.max_programs);
  auto states = initial_states(p, q, g, s, c);
  r.programs = programs.size();
  EvalOptions eo;
  eo.k = c.k;
  eo.lo = c.lo;
  eo.hi = c.hi;
  for (const auto& prog : programs) {
    for (const auto& st : states) {
      ++r.runs;
      auto fin = exec(prog, st, c.fuel, c.k);
      if (!fin) {
        ++r.diverged;
        continue;
      }
      if (!holds(q, *fin, eo)) {
        r.holds = false;
        r.cex = Counterexample{prog, st, *fin};
        return r;
      }
    }
  }
  return r;
}

}  // namespace wul
