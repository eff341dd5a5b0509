#include "wul/synth.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>
#include <unordered_set>

namespace wul {

using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------- grammars

Sexpr TemplateGrammar::rules_sexpr() const {
  std::vector<Sexpr> rs;
  for (const auto& nt : rules) {
    std::vector<Sexpr> ps = nt.productions;
    rs.push_back(Sexpr::make_list(
        {Sexpr::make_atom(nt.name), Sexpr::make_atom(to_string(nt.sort)), Sexpr::make_list(std::move(ps))}));
  }
  return Sexpr::make_list(std::move(rs));
}

namespace {

bool numeral(const std::string& a) {
  std::size_t i = a.size() > 1 && a[0] == '-' ? 1 : 0;
  return i < a.size() && std::all_of(a.begin() + static_cast<std::ptrdiff_t>(i), a.end(), ::isdigit);
}

// Leaf symbols must be rule names, formals (or their elements), binders or
// literals; anything else would leave a free variable in the summary.
void check_symbols(const Sexpr& e, const std::set<std::string>& known, std::set<std::string> bound) {
  if (e.is_atom()) {
    const std::string& a = e.atom;
    if (numeral(a) || a == "true" || a == "false" || known.count(a) || bound.count(a)) return;
    auto br = a.find('[');
    if (br != std::string::npos && known.count(a.substr(0, br))) return;
    fail_at(e, "unknown symbol " + a + " in summary grammar");
  }
  if (e.size() == 0) return;
  std::size_t from = 1;
  if (e[0].is_atom() && (e[0].atom == "forall" || e[0].atom == "exists") && e.size() == 3 && e[1].is_list()) {
    for (const auto& b : e[1].items)
      if (b.is_list() && b.size() == 2 && b[0].is_atom()) bound.insert(b[0].atom);
    from = 2;
  }
  if (!e[0].is_atom()) from = 0;
  for (std::size_t i = from; i < e.size(); ++i) check_symbols(e[i], known, bound);
}

}  // namespace

TemplateGrammar parse_template(const Sexpr& rules, const ParamSig& sig, std::size_t size_bound) {
  if (!rules.is_list() || rules.size() == 0) fail_at(rules, "summary grammar needs a non-empty rule list");
  TemplateGrammar g;
  g.param = sig.name;
  g.formals = sig.formals;
  g.size_bound = size_bound;
  std::set<std::string> names;
  for (const auto& r : rules.items) {
    if (!r.is_list() || r.size() != 3 || !r[0].is_atom() || !r[1].is_atom() || !r[2].is_list())
      fail_at(r, "grammar rule must be (NAME SORT (productions...))");
    auto s = parse_sort(r[1].atom);
    if (!s || (*s != Sort::Int && *s != Sort::Bool)) fail_at(r[1], "grammar rule sort must be Int or Bool");
    if (!names.insert(r[0].atom).second) fail_at(r[0], "duplicate grammar rule " + r[0].atom);
    if (r[2].size() == 0) fail_at(r[2], "grammar rule " + r[0].atom + " has no productions");
    g.rules.push_back({r[0].atom, *s, r[2].items});
  }
  if (g.rules.front().sort != Sort::Bool) fail_at(rules[0], "the first grammar rule must be Bool");
  std::set<std::string> known = names;
  for (const auto& fm : sig.formals) known.insert(fm.name);
  for (const auto& nt : g.rules)
    for (const auto& p : nt.productions) check_symbols(p, known, {});
  return g;
}

TemplateGrammar unconstrained_grammar(const ParamSig& sig, int k, std::size_t size_bound) {
  TemplateGrammar g;
  g.param = sig.name;
  g.formals = sig.formals;
  g.size_bound = size_bound;
  g.observational = true;
  g.send_to_sygus = false;
  auto A = [](const std::string& s) { return Sexpr::make_atom(s); };
  auto L = [](std::vector<Sexpr> v) { return Sexpr::make_list(std::move(v)); };
  TemplateGrammar::NT b{"B", Sort::Bool, {A("true"), A("false")}};
  TemplateGrammar::NT i{"I", Sort::Int, {}};
  for (const char* c : {"-1", "0", "1", "2", "3", "100"}) i.productions.push_back(A(c));
  for (const auto& fm : sig.formals) {
    auto& into = elem_sort(fm.sort) == Sort::Bool ? b : i;
    if (is_vector(fm.sort))
      for (int c = 1; c <= k; ++c) into.productions.push_back(A(element_name(fm.name, c)));
    else
      into.productions.push_back(A(fm.name));
  }
  for (const char* op : {"=", "<", "<="}) b.productions.push_back(L({A(op), A("I"), A("I")}));
  b.productions.push_back(L({A("not"), A("B")}));
  b.productions.push_back(L({A("and"), A("B"), A("B")}));
  b.productions.push_back(L({A("or"), A("B"), A("B")}));
  i.productions.push_back(L({A("+"), A("I"), A("I")}));
  i.productions.push_back(L({A("-"), A("I"), A("I")}));
  i.productions.push_back(L({A("mod"), A("I"), A("2")}));
  i.productions.push_back(L({A("mod"), A("I"), A("3")}));
  g.rules = {b, i};
  return g;
}

// ---------------------------------------------------------------- enumeration

namespace {

bool commutative(FK k) { return k == FK::And || k == FK::Or || k == FK::Eq || k == FK::Add || k == FK::Mul; }

std::string canon(const Formula& g) {
  std::vector<std::string> kids;
  for (const auto& c : g->kids) kids.push_back(canon(c));
  if (commutative(g->kind)) std::sort(kids.begin(), kids.end());
  std::string s = "(" + std::to_string(static_cast<int>(g->kind)) + ":" + g->name + ":" + std::to_string(g->value);
  for (const auto& c : kids) s += " " + c;
  return s + ")";
}

struct Prod {
  Sexpr shape;
  std::size_t fixed = 0;
  std::vector<std::size_t> holes;  // rule indices, DFS order
};

struct Item {
  Sexpr s;
  Formula f;
};

std::size_t analyse(const Sexpr& e, const std::map<std::string, std::size_t>& rule_ix, std::vector<std::size_t>& holes) {
  if (e.is_atom()) {
    auto it = rule_ix.find(e.atom);
    if (it != rule_ix.end()) {
      holes.push_back(it->second);
      return 0;
    }
    return 1;
  }
  std::size_t n = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    // The operator symbol counts as one node; operands recurse.
    if (i == 0 && e[i].is_atom()) {
      n += 1;
      continue;
    }
    n += analyse(e[i], rule_ix, holes);
  }
  return n;
}

Sexpr fill(const Sexpr& e, const std::map<std::string, std::size_t>& rule_ix, const std::vector<const Sexpr*>& fillers,
           std::size_t& next) {
  if (e.is_atom()) {
    if (rule_ix.count(e.atom)) return *fillers[next++];
    return e;
  }
  std::vector<Sexpr> items;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i == 0 && e[i].is_atom()) {
      items.push_back(e[i]);
      continue;
    }
    items.push_back(fill(e[i], rule_ix, fillers, next));
  }
  return Sexpr::make_list(std::move(items));
}

std::vector<State> sample_points(const std::vector<Binder>& formals, int k) {
  std::mt19937 rng(20240611u);
  std::uniform_int_distribution<int> iv(-4, 12), bv(0, 1);
  std::vector<State> pts;
  for (int n = 0; n < 40; ++n) {
    State s;
    for (const auto& fm : formals) {
      bool b = elem_sort(fm.sort) == Sort::Bool;
      auto draw = [&] { return static_cast<std::int64_t>(b ? bv(rng) : iv(rng)); };
      if (is_vector(fm.sort)) {
        Val v{fm.sort, {}};
        for (int c = 0; c < k; ++c) v.elems.push_back(draw());
        s[fm.name] = v;
      } else {
        s[fm.name] = Val::scalar(draw(), fm.sort);
      }
    }
    pts.push_back(std::move(s));
  }
  return pts;
}

}  // namespace

std::vector<Formula> enumerate_candidates(const TemplateGrammar& g, std::size_t size_bound, int k) {
  std::map<std::string, std::size_t> rule_ix;
  for (std::size_t i = 0; i < g.rules.size(); ++i) rule_ix[g.rules[i].name] = i;
  std::vector<std::vector<Prod>> prods(g.rules.size());
  std::vector<std::pair<std::size_t, std::size_t>> units;
  for (std::size_t r = 0; r < g.rules.size(); ++r)
    for (const auto& p : g.rules[r].productions) {
      Prod pr;
      pr.shape = p;
      pr.fixed = analyse(p, rule_ix, pr.holes);
      if (pr.fixed == 0 && pr.holes.size() == 1)
        units.push_back({r, pr.holes[0]});  // B ::= C, copied per size below
      else
        prods[r].push_back(std::move(pr));
    }

  ParseContext pc;
  for (const auto& fm : g.formals) pc.vars[fm.name] = fm.sort;
  std::vector<State> pts;
  EvalOptions eo;
  eo.k = k;
  if (g.observational) pts = sample_points(g.formals, k);
  // Dedup key: evaluation signature, or the commutativity-normal form.
  auto key_of = [&](const Formula& f) {
    if (!g.observational) return canon(f);
    std::string key;
    for (const auto& p : pts) {
      try {
        key += std::to_string(eval(f, p, eo));
      } catch (const EvalError&) {
        key += "E";
      }
      key += ',';
    }
    return key;
  };

  const std::size_t cap_per_size = 20000;
  // items[r][s] = distinct terms of rule r with derivation size s
  std::vector<std::vector<std::vector<Item>>> items(g.rules.size(), std::vector<std::vector<Item>>(size_bound + 1));
  std::vector<std::unordered_set<std::string>> seen(g.rules.size());
  std::vector<Formula> out;

  for (std::size_t s = 1; s <= size_bound; ++s) {
    for (std::size_t r = 0; r < g.rules.size(); ++r) {
      auto& bucket = items[r][s];
      auto consider = [&](const Sexpr& e) {
        if (bucket.size() >= cap_per_size) return;
        Formula f;
        try {
          f = parse_formula(e, pc);
        } catch (const Error&) {
          return;
        }
        if (value_sort(f) != g.rules[r].sort) return;
        if (!seen[r].insert(key_of(f)).second) return;
        bucket.push_back({e, f});
      };
      for (const auto& pr : prods[r]) {
        if (pr.fixed > s) continue;
        if (pr.holes.empty()) {
          if (pr.fixed == s) consider(pr.shape);
          continue;
        }
        std::size_t rest = s - pr.fixed;
        if (rest < pr.holes.size()) continue;
        // Distribute `rest` over holes (each >= 1), then take products.
        std::vector<std::size_t> sizes(pr.holes.size(), 1);
        std::function<void(std::size_t, std::size_t)> split = [&](std::size_t h, std::size_t left) {
          if (h + 1 == pr.holes.size()) {
            sizes[h] = left;
            std::vector<const std::vector<Item>*> pools;
            for (std::size_t j = 0; j < sizes.size(); ++j) {
              if (sizes[j] >= s) return;  // no self-size recursion
              pools.push_back(&items[pr.holes[j]][sizes[j]]);
              if (pools.back()->empty()) return;
            }
            std::vector<std::size_t> pos(pools.size(), 0);
            for (;;) {
              std::vector<const Sexpr*> fillers;
              for (std::size_t j = 0; j < pools.size(); ++j) fillers.push_back(&(*pools[j])[pos[j]].s);
              std::size_t next = 0;
              consider(fill(pr.shape, rule_ix, fillers, next));
              if (bucket.size() >= cap_per_size) return;
              std::size_t j = pools.size();
              while (j > 0) {
                --j;
                if (++pos[j] < pools[j]->size()) break;
                pos[j] = 0;
                if (j == 0) return;
              }
            }
          }
          for (std::size_t v = 1; v + (pr.holes.size() - h - 1) <= left; ++v) {
            sizes[h] = v;
            split(h + 1, left - v);
          }
        };
        split(0, rest);
      }
    }
    for (bool grew = true; grew;) {
      grew = false;
      for (auto [to, from] : units) {
        if (g.rules[to].sort != g.rules[from].sort) continue;
        std::vector<Item> src = items[from][s];
        for (const auto& it : src) {
          if (seen[to].insert(key_of(it.f)).second) {
            items[to][s].push_back(it);
            grew = true;
          }
        }
      }
    }
    for (const auto& it : items[0][s]) out.push_back(it.f);
  }
  return out;
}

// ---------------------------------------------------------------- cache

void CexCache::add(std::size_t pvc, State values) {
  std::lock_guard<std::mutex> l(mu_);
  entries_.push_back({pvc, std::move(values)});
}

std::vector<CexCache::Entry> CexCache::snapshot() const {
  std::lock_guard<std::mutex> l(mu_);
  return entries_;
}

std::size_t CexCache::size() const {
  std::lock_guard<std::mutex> l(mu_);
  return entries_.size();
}

namespace {

bool quantified(const Formula& g) {
  if (g->kind == FK::Forall || g->kind == FK::Exists) return true;
  return std::any_of(g->kids.begin(), g->kids.end(), quantified);
}

Formula scalar_body(const Pvc& p, int k) { return k > 0 ? scalarize(p.body(), k) : p.body(); }

bool refutes(const Formula& scalar, const State& s) {
  if (quantified(scalar)) return false;
  try {
    return !holds(scalar, s);
  } catch (const EvalError&) {
    return false;
  }
}

}  // namespace

bool refuted_by_cache(const std::vector<Pvc>& pvcs, const Assignment& a, const CexCache& cache, int k) {
  std::map<std::size_t, Formula> bodies;
  for (const auto& e : cache.snapshot()) {
    auto it = bodies.find(e.pvc);
    if (it == bodies.end()) it = bodies.emplace(e.pvc, scalar_body(plug_pvc(pvcs.at(e.pvc), a, k), k)).first;
    if (refutes(it->second, e.values)) return true;
  }
  return false;
}

std::vector<Assignment> counterexample_filter(const std::vector<Assignment>& candidates,
                                              const std::vector<Pvc>& pvcs, const CexCache& cache, int k) {
  std::vector<Assignment> out;
  for (const auto& a : candidates)
    if (!refuted_by_cache(pvcs, a, cache, k)) out.push_back(a);
  return out;
}

// ---------------------------------------------------------------- solutions

State model_state(const std::string& model, const Formula& scalar) {
  auto m = parse_model(model);
  State s;
  for (const auto& v : free_vars(scalar)) {
    std::int64_t x = 0;
    auto it = m.find(v.name);
    if (it != m.end()) {
      const Sexpr& e = it->second;
      if (e.is_atom("true"))
        x = 1;
      else if (e.is_atom("false"))
        x = 0;
      else if (e.is_int())
        x = e.as_int();
      else if (e.is_list() && e.size() == 2 && e[0].is_atom("-") && e[1].is_int())
        x = -e[1].as_int();
    }
    s[v.name] = Val::scalar(x, v.sort);
  }
  return s;
}

namespace {

std::vector<Binder> flat_formals(const ParamSig& sig, int k) {
  std::vector<Binder> out;
  for (const auto& fm : sig.formals) {
    if (is_vector(fm.sort))
      for (int c = 1; c <= k; ++c) out.push_back({element_name(fm.name, c), elem_sort(fm.sort)});
    else
      out.push_back(fm);
  }
  return out;
}

Formula expected_ref(const ParamSig& sig, std::size_t pos, int k) {
  std::size_t i = 0;
  for (const auto& fm : sig.formals) {
    if (is_vector(fm.sort)) {
      for (int c = 1; c <= k; ++c, ++i)
        if (i == pos) return f::vref(fm.name, c, elem_sort(fm.sort));
    } else {
      if (i == pos) return f::var(fm.name, fm.sort);
      ++i;
    }
  }
  throw Error("solution has too many parameters for " + sig.name);
}

}  // namespace

ParamDef definition_from_solution(const SynthDefinition& d, const ParamSig& sig, int k) {
  auto flat = flat_formals(sig, k);
  if (d.params.size() != flat.size()) throw Error("solution for " + sig.name + " has the wrong arity");
  bool same = true;
  for (std::size_t i = 0; i < flat.size(); ++i) same = same && d.params[i].name == flat[i].name;
  ParseContext pc;
  for (const auto& fm : sig.formals) pc.vars[fm.name] = fm.sort;
  if (same) return {sig.formals, parse_formula(d.body, pc)};
  ParseContext raw;
  for (const auto& p : d.params) raw.vars[p.name] = p.sort;
  Formula body = parse_formula(d.body, raw);
  Subst s;
  for (std::size_t i = 0; i < d.params.size(); ++i) s.scalars[d.params[i].name] = expected_ref(sig, i, k);
  return {sig.formals, substitute(body, s)};
}

// ---------------------------------------------------------------- synthesize

namespace {

struct Checker {
  const std::vector<Pvc>& pvcs;
  SolverBackend& backend;
  const SynthOptions& opt;
  CexCache& cache;
  std::string last_detail;

  // All PVCs Valid under `a`? Invalid answers feed the cache.
  bool verify(const Assignment& a) {
    std::vector<Formula> bodies;
    for (const auto& p : pvcs) bodies.push_back(plug_pvc(p, a, opt.k).body());
    auto one = [&](std::size_t i) -> int {
      SolverVerdict v = backend.check(emit_smt(bodies[i], opt.k, backend.config().timeout));
      if (v.outcome == Outcome::Valid) return 1;
      if (v.outcome == Outcome::Invalid) {
        Formula sc = opt.k > 0 ? scalarize(bodies[i], opt.k) : bodies[i];
        State st = model_state(v.model, sc);
        if (refutes(sc, st)) cache.add(i, std::move(st));
      } else {
        last_detail = std::string(to_string(v.outcome)) + (v.detail.empty() ? "" : ": " + v.detail);
      }
      return 0;
    };
    int jobs = backend.config().effective_jobs();
    if (jobs <= 1 || pvcs.size() <= 1) {
      for (std::size_t i = 0; i < pvcs.size(); ++i)
        if (!one(i)) return false;
      return true;
    }
    auto rs = parallel_map<int>(pvcs.size(), jobs, one);
    return std::all_of(rs.begin(), rs.end(), [](int r) { return r == 1; });
  }
};

std::vector<ParamSig> used_sigs(const std::vector<Pvc>& pvcs, const std::vector<ParamSig>& sigs) {
  auto names = params_of(pvcs);
  std::vector<ParamSig> out;
  for (const auto& n : names) {
    auto it = std::find_if(sigs.begin(), sigs.end(), [&](const ParamSig& s) { return s.name == n; });
    if (it == sigs.end()) throw Error("no signature for parameter " + n);
    out.push_back(*it);
  }
  return out;
}

}  // namespace

SynthResult synthesize(const std::vector<Pvc>& pvcs, const std::vector<ParamSig>& sigs,
                       const std::map<std::string, TemplateGrammar>& grammars, SolverBackend& backend,
                       const SynthOptions& opt) {
  SynthResult res;
  int calls0 = backend.calls();
  auto deadline = Clock::now() + std::chrono::milliseconds(static_cast<long>(opt.budget * 1000));
  auto params = used_sigs(pvcs, sigs);
  for (const auto& p : params)
    if (!grammars.count(p.name)) throw Error("no grammar for parameter " + p.name);

  CexCache cache;
  Checker chk{pvcs, backend, opt, cache, {}};

  if (params.empty()) {
    res.method = "closed";
    if (chk.verify({})) res.assignment = Assignment{};
    res.solver_calls = backend.calls() - calls0;
    res.detail = chk.last_detail;
    return res;
  }

  // External SyGuS first, when the obligations are quantifier-free.
  bool qf = true;
  for (const auto& p : pvcs) {
    Formula b = scalar_body(p, opt.k);
    if (quantified(b) || has_funs(b)) qf = false;
  }
  if (opt.use_sygus && qf && !backend.config().sygus.empty()) {
    std::vector<SynthTarget> targets;
    for (const auto& sig : params) {
      const auto& g = grammars.at(sig.name);
      SynthTarget t{sig.name, flat_formals(sig, opt.k), Sort::Bool, std::nullopt};
      if (g.send_to_sygus) t.grammar = g.rules_sexpr();
      targets.push_back(std::move(t));
    }
    try {
      double remaining = std::chrono::duration<double>(deadline - Clock::now()).count();
      SolverQuery q = emit_sygus(pvcs, targets, opt.k, std::max(1.0, std::min(backend.config().timeout, remaining)));
      SolverVerdict v = backend.check(q);
      if (v.outcome == Outcome::Valid) {
        Assignment a;
        for (const auto& d : v.definitions)
          for (const auto& sig : params)
            if (sig.name == d.name) a[sig.name] = definition_from_solution(d, sig, opt.k);
        if (a.size() == params.size() && chk.verify(a)) {
          res.assignment = a;
          res.method = "sygus";
          res.candidates = 1;
          res.solver_calls = backend.calls() - calls0;
          return res;
        }
        res.detail = "SyGuS solution failed re-verification";
      } else {
        res.detail = std::string("SyGuS: ") + to_string(v.outcome) + (v.detail.empty() ? "" : " (" + v.detail + ")");
      }
    } catch (const Error& e) {
      res.detail = std::string("SyGuS: ") + e.what();
    }
  }

  // Enumerative fallback: joint product ordered by total size.
  res.method = "enumerative";
  struct Pool {
    std::map<std::size_t, std::vector<Formula>> by_size;
  };
  std::vector<Pool> pools;
  for (const auto& sig : params) {
    const auto& g = grammars.at(sig.name);
    Pool pool;
    for (const auto& c : enumerate_candidates(g, g.size_bound, opt.k)) pool.by_size[size(c)].push_back(c);
    if (pool.by_size.empty()) {
      res.detail = "grammar for " + sig.name + " derives nothing within its size bound";
      res.solver_calls = backend.calls() - calls0;
      return res;
    }
    pools.push_back(std::move(pool));
  }
  std::size_t min_total = 0, max_total = 0;
  for (const auto& p : pools) {
    min_total += p.by_size.begin()->first;
    max_total += p.by_size.rbegin()->first;
  }
  bool stop = false;
  Assignment current;
  std::function<void(std::size_t, std::size_t)> walk = [&](std::size_t i, std::size_t left) {
    if (stop) return;
    if (i == pools.size()) {
      if (left != 0) return;
      if (res.candidates >= opt.max_candidates || Clock::now() > deadline) {
        stop = true;
        res.detail = "search budget exhausted";
        return;
      }
      ++res.candidates;
      if (opt.use_cache && refuted_by_cache(pvcs, current, cache, opt.k)) {
        ++res.pruned;
        return;
      }
      if (chk.verify(current)) {
        res.assignment = current;
        stop = true;
      }
      return;
    }
    bool last = i + 1 == pools.size();
    for (const auto& [sz, cands] : pools[i].by_size) {
      if (sz > left) break;
      if (last && sz != left) continue;
      for (const auto& c : cands) {
        current[params[i].name] = ParamDef{params[i].formals, c};
        walk(i + 1, left - sz);
        if (stop) return;
      }
    }
  };
  for (std::size_t total = min_total; total <= max_total && !stop; ++total) walk(0, total);
  if (!res.assignment && res.detail.empty()) res.detail = "no candidate within the grammar bound";
  res.solver_calls = backend.calls() - calls0;
  return res;
}

}  // namespace wul
