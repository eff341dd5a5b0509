#include "wul/vcgen.hpp"

#include <algorithm>
#include <map>

namespace wul {

Formula Pvc::closed() const {
  Formula b = body();
  std::vector<Binder> bs = universals;
  for (const auto& v : free_vars(b)) {
    bool have = std::any_of(bs.begin(), bs.end(), [&](const Binder& u) { return u.name == v.name; });
    if (!have) bs.push_back(v);
  }
  return f::forall(bs, b);
}

std::vector<Pvc> extract_pvcs(const Skel& root) {
  std::vector<Pvc> out;
  visit_preorder(root, [&](const Skel& n) {
    if (n->rule != Rule::Weaken || n->kids.size() != 1) return;
    const Skel& h = n->kids[0];
    Pvc p;
    p.id = n->path;
    p.origin = n->path;
    bool same_post = alpha_equal(n->post, h->post);
    bool same_pre = alpha_equal(n->pre, h->pre);
    if (same_post || !same_pre) {
      p.lhs = n->pre;
      p.rhs = h->pre;
      if (!same_post) {
        p.lhs = f::tru();
        p.rhs = f::land(f::implies(n->pre, h->pre), f::implies(h->post, n->post));
      }
    } else {
      p.lhs = h->post;
      p.rhs = n->post;
    }
    p.universals = free_vars(p.body());
    out.push_back(std::move(p));
  });
  return out;
}

namespace {

std::string avoid_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (int i = 1;; ++i) {
    std::string c = base + std::to_string(i);
    if (!taken.count(c)) return c;
  }
}

Formula rename_bound(const Formula& body, const Binder& b, const std::string& to) {
  if (b.name == to) return body;
  Subst s;
  if (is_vector(b.sort))
    s.rename_vector(b.name, to, elem_sort(b.sort));
  else
    s.scalars[b.name] = f::var(to, b.sort);
  return substitute(body, s);
}

std::set<std::string> taken_names(const Pvc& p) {
  std::set<std::string> t;
  for (const auto& u : p.universals) t.insert(u.name);
  for (const auto& n : all_names(p.lhs)) t.insert(n);
  for (const auto& n : all_names(p.rhs)) t.insert(n);
  return t;
}

// Moves binder `b` (binding `body`) into the universal prefix, renaming
// on collision; returns the renamed body.
Formula pull(Pvc& p, Binder b, const Formula& body, const Formula& elsewhere_a,
             const Formula& elsewhere_b) {
  std::set<std::string> taken;
  for (const auto& u : p.universals) taken.insert(u.name);
  for (const auto& n : free_names(elsewhere_a)) taken.insert(n);
  for (const auto& n : free_names(elsewhere_b)) taken.insert(n);
  Formula out = body;
  if (taken.count(b.name)) {
    auto all = taken_names(p);
    std::string fresh = avoid_name(b.name, all);
    out = rename_bound(body, b, fresh);
    b.name = fresh;
  }
  p.universals.push_back(b);
  return out;
}

Formula conj(const Formula& a, const Formula& b) {
  if (a->kind == FK::And) {
    std::vector<Formula> kids = a->kids;
    kids.push_back(b);
    return f::land(kids);
  }
  return f::land(a, b);
}

bool pull_lhs_exists(Pvc& p) {
  if (p.lhs->kind == FK::Exists) {
    Formula body = p.lhs->kids[0];
    Binder b{p.lhs->name, p.lhs->sort};
    p.lhs = pull(p, b, body, f::tru(), p.rhs);
    return true;
  }
  if (p.lhs->kind != FK::And) return false;
  for (std::size_t i = 0; i < p.lhs->kids.size(); ++i) {
    const Formula& k = p.lhs->kids[i];
    if (k->kind != FK::Exists) continue;
    std::vector<Formula> others = p.lhs->kids;
    others.erase(others.begin() + static_cast<long>(i));
    Binder b{k->name, k->sort};
    Formula body = pull(p, b, k->kids[0], f::land(others), p.rhs);
    std::vector<Formula> kids = p.lhs->kids;
    kids[i] = body;
    p.lhs = f::land(kids);
    return true;
  }
  return false;
}

void opt_rec(Pvc p, std::vector<Pvc>& out) {
  for (;;) {
    const Formula r = p.rhs;
    if (r->kind == FK::Forall) {
      p.rhs = pull(p, Binder{r->name, r->sort}, r->kids[0], p.lhs, f::tru());
      continue;
    }
    if (r->kind == FK::Implies) {
      p.lhs = conj(p.lhs, r->kids[0]);
      p.rhs = r->kids[1];
      continue;
    }
    if (pull_lhs_exists(p)) continue;
    if (r->kind == FK::And) {
      for (const auto& k : r->kids) {
        Pvc q = p;
        q.rhs = k;
        opt_rec(q, out);
      }
      return;
    }
    break;
  }
  out.push_back(std::move(p));
}

}  // namespace

std::vector<Pvc> optimize_pvcs(const std::vector<Pvc>& pvcs, int k) {
  std::vector<Pvc> out;
  for (const auto& p0 : pvcs) {
    Pvc p = p0;
    if (k > 0) {
      p.lhs = expand_index(p.lhs, k);
      p.rhs = expand_index(p.rhs, k);
    }
    std::vector<Pvc> parts;
    opt_rec(p, parts);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts.size() > 1) parts[i].id = p0.id + "#" + std::to_string(i);
      // Drop prefix entries that no longer occur.
      auto fv = free_names(parts[i].body());
      std::vector<Binder> keep;
      for (const auto& u : parts[i].universals)
        if (fv.count(u.name)) keep.push_back(u);
      parts[i].universals = keep;
      out.push_back(std::move(parts[i]));
    }
  }
  return out;
}

namespace {

struct Skolemizer {
  Pvc& p;
  NameSupply& names;
  int k;

  std::vector<Formula> inputs(const std::vector<Binder>& scope, std::vector<Binder>& sig) {
    std::vector<Formula> args;
    auto add = [&](const Binder& b) {
      if (is_vector(b.sort)) {
        for (int c = 1; c <= k; ++c) {
          args.push_back(f::vref(b.name, c, elem_sort(b.sort)));
          sig.push_back({element_name(b.name, c), elem_sort(b.sort)});
        }
      } else if (b.sort != Sort::Index) {
        args.push_back(f::var(b.name, b.sort));
        sig.push_back(b);
      }
    };
    for (const auto& u : p.universals) add(u);
    for (const auto& s : scope) add(s);
    return args;
  }

  Formula rec(const Formula& g, bool pos, std::vector<Binder>& scope) {
    switch (g->kind) {
      case FK::Exists:
        if (pos && g->sort == Sort::Int) {
          std::vector<Binder> sig;
          auto args = inputs(scope, sig);
          std::string fn = names.fresh("sk");
          p.skolems.push_back({fn, sig});
          Formula body = substitute(g->kids[0], g->name, f::fun(fn, args));
          return rec(body, pos, scope);
        }
        return g;
      case FK::Forall: {
        if (!pos) return g;
        scope.push_back({g->name, g->sort});
        Formula b = rec(g->kids[0], pos, scope);
        scope.pop_back();
        return f::with_kids(g, {b});
      }
      case FK::Not: return f::with_kids(g, {rec(g->kids[0], !pos, scope)});
      case FK::Implies:
        return f::with_kids(g, {rec(g->kids[0], !pos, scope), rec(g->kids[1], pos, scope)});
      case FK::And:
      case FK::Or: {
        std::vector<Formula> kids;
        for (const auto& c : g->kids) kids.push_back(rec(c, pos, scope));
        return f::with_kids(g, std::move(kids));
      }
      default: return g;
    }
  }
};

}  // namespace

Pvc skolemize_rhs_existentials(const Pvc& pvc, NameSupply& names, int k) {
  Pvc out = pvc;
  names.reserve(out.lhs);
  names.reserve(out.rhs);
  for (const auto& u : out.universals) names.reserve(u.name);
  Skolemizer s{out, names, k};
  std::vector<Binder> scope;
  out.rhs = s.rec(pvc.rhs, true, scope);
  return out;
}

namespace {

struct Plugger {
  const Assignment& a;
  int k;
  std::shared_ptr<const Assignment> shared;
  std::map<const Context*, ContextPtr> ctxs;

  Formula pf(const Formula& g) { return g ? plug_formula(g, a, k) : g; }

  ContextPtr ctx(const ContextPtr& c) {
    if (!c) return c;
    auto it = ctxs.find(c.get());
    if (it != ctxs.end()) return it->second;
    auto out = std::make_shared<Context>();
    for (const auto& t : *c) out->push_back({t.nonterminal, pf(t.pre), pf(t.post)});
    ctxs[c.get()] = out;
    return out;
  }

  Skel rec(const Skel& n) {
    auto m = std::make_shared<SkelNode>(*n);
    m->pre = pf(n->pre);
    m->post = pf(n->post);
    m->ctx = ctx(n->ctx);
    if (n->rule == Rule::VSIf) {
      if (n->plugged) {
        auto merged = std::make_shared<Assignment>(*n->plugged);
        for (const auto& [name, d] : a) (*merged)[name] = d;
        m->plugged = merged;
      } else {
        m->plugged = shared;
      }
    }
    m->kids.clear();
    for (const auto& c : n->kids) m->kids.push_back(rec(c));
    return m;
  }
};

}  // namespace

Skel plug_in(const Skel& root, const Assignment& a, int k) {
  Plugger p{a, k, std::make_shared<Assignment>(a), {}};
  return p.rec(root);
}

Pvc plug_pvc(const Pvc& p, const Assignment& a, int k, bool partial) {
  Pvc out = p;
  out.lhs = plug_formula(p.lhs, a, k, partial);
  out.rhs = plug_formula(p.rhs, a, k, partial);
  return out;
}

std::vector<std::string> params_of(const std::vector<Pvc>& pvcs) {
  std::vector<std::string> out;
  for (const auto& p : pvcs)
    for (const auto& g : {p.lhs, p.rhs})
      for (const auto& n : params_of(g))
        if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  return out;
}

std::string print_pvc(const Pvc& p) { return "(pvc " + p.id + " " + to_string(p.closed()) + ")"; }

}  // namespace wul
