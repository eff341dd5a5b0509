#include "wul/skeleton.hpp"

#include <algorithm>
#include <sstream>

namespace wul {

const char* to_string(Rule r) {
  switch (r) {
    case Rule::Int: return "Int";
    case Rule::True: return "True";
    case Rule::False: return "False";
    case Rule::Var: return "Var";
    case Rule::Not: return "Not";
    case Rule::Bin: return "Bin";
    case Rule::And: return "And";
    case Rule::Comp: return "Comp";
    case Rule::Assign: return "Assign";
    case Rule::Seq: return "Seq";
    case Rule::Skip: return "Skip";
    case Rule::SimpleIf: return "SimpleIf";
    case Rule::SimpleWhile: return "SimpleWhile";
    case Rule::VSIf: return "VSIf";
    case Rule::VSWhile: return "VSWhile";
    case Rule::GrmDisj: return "GrmDisj";
    case Rule::HP: return "HP";
    case Rule::ApplyHP: return "ApplyHP";
    case Rule::Adapt: return "Adapt";
    case Rule::Weaken: return "Weaken";
  }
  return "?";
}

Sort program_var_sort(const std::string& name) {
  return name == kBoolResult ? Sort::Bool : Sort::Int;
}

// ---------------------------------------------------------------------------

Formula VarConv::ref(const std::string& name, Sort elem, const Formula* idx) const {
  if (k == 0) return f::var(name, elem_sort(elem));
  return f::vref(name, *idx, elem);
}

Formula VarConv::subst(const Formula& q, const std::string& name,
                       const std::function<Formula(const Formula* idx)>& mk,
                       std::set<std::string> introduces) const {
  if (k == 0) return substitute(q, name, mk(nullptr));
  return vec_substitute(q, name, [mk](const Formula& idx) { return mk(&idx); },
                        std::move(introduces));
}

Formula VarConv::rename(const Formula& q, const std::string& from, const std::string& to,
                        Sort elem) const {
  return subst(q, from, [&](const Formula* idx) { return ref(to, elem, idx); }, {to});
}

Formula VarConv::rename_all(const Formula& q, const std::map<std::string, std::string>& m,
                            const std::map<std::string, Sort>& elems) const {
  Subst s;
  for (const auto& [from, to] : m) {
    auto it = elems.find(from);
    Sort e = it == elems.end() ? program_var_sort(from) : it->second;
    if (k == 0)
      s.scalars[from] = f::var(to, elem_sort(e));
    else
      s.rename_vector(from, to, e);
  }
  return substitute(q, s);
}

std::vector<Formula> VarConv::args(const std::string& name, Sort elem) const {
  if (k == 0) return {f::var(name, elem_sort(elem))};
  std::vector<Formula> out;
  for (int c = 1; c <= k; ++c) out.push_back(f::vref(name, c, elem));
  return out;
}

Binder VarConv::binder(const std::string& name, Sort elem) const {
  if (k == 0) return {name, elem_sort(elem)};
  return {name, vector_of(elem)};
}

Formula VarConv::eq_all(const std::vector<std::string>& xs,
                        const std::vector<std::string>& zs) const {
  std::vector<Formula> parts;
  for (std::size_t j = 0; j < xs.size() && j < zs.size(); ++j) {
    if (k == 0) {
      parts.push_back(f::eq(f::var(xs[j]), f::var(zs[j])));
    } else {
      Formula i = f::var("i", Sort::Index);
      parts.push_back(f::forall(Binder{"i", Sort::Index}, f::eq(f::vref(xs[j], i), f::vref(zs[j], i))));
    }
  }
  return f::land(parts);
}

RuleSet vs_rules_selector(int k) {
  if (k > 0) return {Rule::VSIf, Rule::VSWhile};
  return {Rule::SimpleIf, Rule::SimpleWhile};
}

// ---------------------------------------------------------------------------

namespace {

std::map<std::string, Sort> sorts_of(const std::vector<std::string>& names) {
  std::map<std::string, Sort> m;
  for (const auto& n : names) m[n] = program_var_sort(n);
  return m;
}

std::map<std::string, std::string> zip(const std::vector<std::string>& a,
                                       const std::vector<std::string>& b) {
  std::map<std::string, std::string> m;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m[a[i]] = b[i];
  return m;
}

Formula bt_ref(const VarConv& c, const Formula* idx) { return c.ref(kBoolResult, Sort::Bool, idx); }

Formula all_false(const VarConv& c) {
  Formula i = f::var("i", Sort::Index);
  return f::forall(Binder{"i", Sort::Index}, f::lnot(c.ref(kBoolResult, Sort::Bool, &i)));
}

Formula guard_binding(const std::string& b_loop, const Formula& body) {
  Formula i = f::var("i", Sort::Index);
  Formula same = f::forall(Binder{"i", Sort::Index},
                           f::eq(f::vref(b_loop, i, Sort::Bool), f::vref(kBoolResult, i, Sort::Bool)));
  return f::forall(Binder{b_loop, Sort::BoolVec}, f::implies(same, body));
}

// Adapt precondition: forall y. Q[x->y][z->x] -> R[x->y].
Formula adapt_pre(const VarConv& c, const std::vector<Binder>& ys, const std::vector<std::string>& xs,
                  const std::vector<std::string>& zs, const Formula& q_summary, const Formula& r) {
  std::vector<std::string> ynames;
  for (const auto& b : ys) ynames.push_back(b.name);
  auto xsorts = sorts_of(xs);
  std::map<std::string, Sort> ysorts;
  for (std::size_t j = 0; j < xs.size(); ++j) ysorts[ynames[j]] = xsorts[xs[j]];
  Formula q1 = c.rename_all(q_summary, zip(xs, ynames), xsorts);
  Formula q2 = c.rename_all(q1, zip(zs, xs), sorts_of(zs));
  Formula r1 = c.rename_all(r, zip(xs, ynames), xsorts);
  return f::forall(ys, f::implies(q2, r1));
}

}  // namespace

SkeletonBuilder::SkeletonBuilder(const Rtg& g, int k) : g_(g) {
  conv_.k = k;
  names_.reserve(kIntResult);
  names_.reserve(kBoolResult);
  names_.reserve("i");
  for (const auto& nt : g.nonterminals()) {
    names_.reserve(nt.name);
    auto prof = var_profile(g, nt.name);
    for (const auto* v : {&prof.x_vars, &prof.read_vars, &prof.z_vars, &prof.y_vars})
      for (const auto& n : *v) names_.reserve(n);
  }
}

Skel SkeletonBuilder::node(Rule r, const ContextPtr& ctx, const Term& s, Formula pre,
                           Formula post) {
  auto n = std::make_shared<SkelNode>();
  n->rule = r;
  n->ctx = ctx;
  n->prog = s;
  n->pre = std::move(pre);
  n->post = std::move(post);
  return n;
}

const ParamSig& SkeletonBuilder::summary_sig(const std::string& n) {
  auto it = summary_index_.find(n);
  if (it != summary_index_.end()) return params_[it->second];
  auto prof = var_profile(g_, n);
  ParamSig sig;
  sig.name = names_.fresh("Q_" + n);
  sig.kind = ParamSig::Kind::Summary;
  sig.site = n;
  for (const auto& x : prof.x_vars) sig.formals.push_back(conv_.binder(x, program_var_sort(x)));
  for (const auto& x : prof.read_vars) sig.formals.push_back(conv_.binder(x, Sort::Int));
  for (const auto& x : prof.z_vars) sig.formals.push_back(conv_.binder(x, Sort::Int));
  summary_index_[n] = params_.size();
  params_.push_back(std::move(sig));
  return params_.back();
}

Formula SkeletonBuilder::summary_app(const ParamSig& sig) const {
  std::vector<Formula> args;
  for (const auto& b : sig.formals) {
    auto a = conv_.args(b.name, elem_sort(b.sort));
    args.insert(args.end(), a.begin(), a.end());
  }
  return f::param(sig.name, std::move(args));
}

Skel SkeletonBuilder::adapt(const ContextPtr& ctx, const Term& s, const Formula& q, Skel premise,
                            const ParamSig& sig) {
  (void)sig;
  auto prof = var_profile(g_, s->name);
  std::set<std::string> avoid = free_names(q);
  for (const auto& n : free_names(premise->post)) avoid.insert(n);
  std::vector<Binder> ys;
  for (std::size_t j = 0; j < prof.x_vars.size(); ++j) {
    std::string y = prof.y_vars[j];
    for (int c = 1; avoid.count(y); ++c) y = prof.y_vars[j] + std::to_string(c);
    avoid.insert(y);
    ys.push_back(conv_.binder(y, program_var_sort(prof.x_vars[j])));
  }
  Formula pre = adapt_pre(conv_, ys, prof.x_vars, prof.z_vars, premise->post, q);
  Skel n = node(Rule::Adapt, ctx, s, pre, q);
  n->ybinders = ys;
  n->xvars = prof.x_vars;
  n->zvars = prof.z_vars;
  n->kids = {std::move(premise)};
  return n;
}

Skel SkeletonBuilder::nonterminal(const ContextPtr& ctx, const Term& s, const Formula& q) {
  const std::string& name = s->name;
  for (const auto& t : *ctx) {
    if (t.nonterminal != name) continue;
    const ParamSig& sig = summary_sig(name);
    Skel apply = node(Rule::ApplyHP, ctx, s, t.pre, t.post);
    return adapt(ctx, s, q, apply, sig);
  }
  const Nonterminal& nt = g_.at(name);
  if (is_recursive(g_, name)) {
    ParamSig sig = summary_sig(name);
    auto prof = var_profile(g_, name);
    std::vector<std::string> mut(prof.x_vars.begin(), prof.x_vars.begin() + prof.z_vars.size());
    SummaryTriple triple{name, conv_.eq_all(mut, prof.z_vars), summary_app(sig)};
    auto inner = std::make_shared<Context>(*ctx);
    inner->push_back(triple);
    ContextPtr ictx = inner;
    std::vector<Skel> kids;
    std::vector<Formula> pres;
    for (const auto& rhs : nt.productions) {
      kids.push_back(w_skel(ictx, rhs, triple.post));
      pres.push_back(kids.back()->pre);
    }
    Skel hp = node(Rule::HP, ctx, s, f::land(pres), triple.post);
    hp->kids = std::move(kids);
    Skel w = node(Rule::Weaken, ctx, s, triple.pre, triple.post);
    w->kids = {hp};
    return adapt(ctx, s, q, w, sig);
  }
  std::vector<Skel> kids;
  std::vector<Formula> pres;
  for (const auto& rhs : nt.productions) {
    kids.push_back(w_skel(ctx, rhs, q));
    pres.push_back(kids.back()->pre);
  }
  Skel n = node(Rule::GrmDisj, ctx, s, f::land(pres), q);
  n->kids = std::move(kids);
  return n;
}

Skel SkeletonBuilder::vs_if(const ContextPtr& ctx, const Term& s, const Formula& q) {
  const Term& b = s->kids[0];
  const Term& s1 = s->kids[1];
  const Term& s2 = s->kids[2];
  auto xs = assigned_vars(g_, s1);
  for (const auto& v : assigned_vars(g_, s2))
    if (std::find(xs.begin(), xs.end(), v) == xs.end()) xs.push_back(v);
  names_.reserve(q);
  std::string b_loop = names_.fresh("b_loop");
  std::map<std::string, std::string> ymap, zmap, yback, zback;
  for (const auto& x : xs) {
    ymap[x] = names_.fresh(x + "_y");
    zmap[x] = names_.fresh(x + "_z");
    yback[ymap[x]] = x;
    zback[zmap[x]] = x;
  }
  std::map<std::string, Sort> ints;
  for (const auto& [from, to] : ymap) ints[from] = ints[to] = Sort::Int;
  for (const auto& [from, to] : zmap) ints[to] = Sort::Int;

  Formula tq = t_transform(q, b_loop, ymap);
  Skel c2 = w_skel(ctx, s2, tq);
  Formula post1 = conv_.rename_all(conv_.rename_all(c2->pre, zmap, ints), yback, ints);
  Skel c1 = w_skel(ctx, s1, post1);
  Formula gp = guard_binding(b_loop, conv_.rename_all(c1->pre, zback, ints));
  Skel cb = w_skel(ctx, b, gp);
  Skel n = node(Rule::VSIf, ctx, s, cb->pre, q);
  n->kids = {cb, c1, c2};
  n->aux = b_loop;
  n->xvars = xs;
  n->ymap = ymap;
  n->zmap = zmap;
  n->unplugged_q = q;
  return n;
}

Skel SkeletonBuilder::loop(const ContextPtr& ctx, const Term& s, const Formula& q) {
  const Term& b = s->kids[0];
  const Term& body = s->kids[1];
  ParamSig sig;
  sig.kind = ParamSig::Kind::Invariant;
  sig.site = to_string(s);
  sig.name = names_.fresh("I" + std::to_string(loops_++));
  std::set<std::string> seen;
  for (const auto& v : program_vars(g_, s)) {
    sig.formals.push_back(conv_.binder(v, Sort::Int));
    seen.insert(v);
  }
  for (const auto& v : free_vars(q))
    if (seen.insert(v.name).second) sig.formals.push_back(v);
  std::vector<Formula> args;
  for (const auto& fb : sig.formals) {
    if (is_vector(fb.sort)) {
      auto a = conv_.args(fb.name, elem_sort(fb.sort));
      args.insert(args.end(), a.begin(), a.end());
    } else {
      args.push_back(f::var(fb.name, fb.sort));
    }
  }
  Formula inv = f::param(sig.name, args);
  params_.push_back(sig);

  if (conv_.k == 0) {
    Skel cbody = w_skel(ctx, body, inv);
    Formula bt = bt_ref(conv_, nullptr);
    Formula gp = f::land(f::implies(f::lnot(bt), q), f::implies(bt, cbody->pre));
    Skel cb = w_skel(ctx, b, gp);
    Skel wg = node(Rule::Weaken, ctx, b, inv, gp);
    wg->kids = {cb};
    Skel n = node(Rule::SimpleWhile, ctx, s, inv, q);
    n->kids = {wg, cbody};
    return n;
  }
  Formula none = all_false(conv_);
  Term ite = term::ite(b, body, term::skip());
  Skel cite = w_skel(ctx, ite, inv);
  Skel wi = node(Rule::Weaken, ctx, ite, inv, inv);
  wi->kids = {cite};
  Skel cb = w_skel(ctx, b, none);
  std::string bf = names_.fresh("b_fresh");
  Formula post = f::land({inv, conv_.rename(cb->pre, kBoolResult, bf, Sort::Bool), none});
  Skel vw = node(Rule::VSWhile, ctx, s, inv, post);
  vw->kids = {cb, wi};
  vw->aux = bf;
  Skel outer = node(Rule::Weaken, ctx, s, inv, q);
  outer->kids = {vw};
  return outer;
}

Skel SkeletonBuilder::w_skel(const ContextPtr& ctx, const Term& s, const Formula& q) {
  const VarConv& c = conv_;
  switch (s->tag) {
    case Tag::IntLit: {
      std::int64_t v = s->value;
      Formula pre = c.subst(q, kIntResult, [v](const Formula*) { return f::num(v); }, {});
      return node(Rule::Int, ctx, s, pre, q);
    }
    case Tag::BoolLit: {
      bool v = s->value != 0;
      Formula pre = c.subst(q, kBoolResult, [v](const Formula*) { return f::boolean(v); }, {});
      return node(v ? Rule::True : Rule::False, ctx, s, pre, q);
    }
    case Tag::Var: {
      std::string x = s->name;
      Formula pre = c.subst(
          q, kIntResult, [&](const Formula* idx) { return c.ref(x, Sort::Int, idx); }, {x});
      return node(Rule::Var, ctx, s, pre, q);
    }
    case Tag::Not: {
      Formula qq = c.subst(
          q, kBoolResult, [&](const Formula* idx) { return f::lnot(bt_ref(c, idx)); }, {kBoolResult});
      Skel k0 = w_skel(ctx, s->kids[0], qq);
      Skel n = node(Rule::Not, ctx, s, k0->pre, q);
      n->kids = {k0};
      return n;
    }
    case Tag::Plus:
    case Tag::And:
    case Tag::Lt:
    case Tag::Eq: {
      Rule r = s->tag == Tag::Plus ? Rule::Bin : s->tag == Tag::And ? Rule::And : Rule::Comp;
      bool boolean_operands = s->tag == Tag::And;
      Sort osort = boolean_operands ? Sort::Bool : Sort::Int;
      std::string operand = boolean_operands ? kBoolResult : kIntResult;
      std::string result = s->tag == Tag::Plus ? kIntResult : kBoolResult;
      std::string x1 = names_.fresh_indexed("x");
      Tag tag = s->tag;
      auto mk = [&](const Formula* idx) {
        Formula a = c.ref(x1, osort, idx), b = c.ref(operand, osort, idx);
        switch (tag) {
          case Tag::Plus: return f::add(a, b);
          case Tag::And: return f::land(a, b);
          case Tag::Lt: return f::lt(a, b);
          default: return f::eq(a, b);
        }
      };
      Formula q2 = c.subst(q, result, mk, {x1, operand});
      Skel k1 = w_skel(ctx, s->kids[1], q2);
      Formula r1 = c.rename(k1->pre, x1, operand, osort);
      Skel k0 = w_skel(ctx, s->kids[0], r1);
      Skel n = node(r, ctx, s, k0->pre, q);
      n->kids = {k0, k1};
      n->aux = x1;
      return n;
    }
    case Tag::Assign: {
      Formula qq = c.rename(q, s->name, kIntResult, Sort::Int);
      Skel k0 = w_skel(ctx, s->kids[0], qq);
      Skel n = node(Rule::Assign, ctx, s, k0->pre, q);
      n->kids = {k0};
      return n;
    }
    case Tag::Seq: {
      Skel k1 = w_skel(ctx, s->kids[1], q);
      Skel k0 = w_skel(ctx, s->kids[0], k1->pre);
      Skel n = node(Rule::Seq, ctx, s, k0->pre, q);
      n->kids = {k0, k1};
      return n;
    }
    case Tag::Skip: return node(Rule::Skip, ctx, s, q, q);
    case Tag::IfThenElse: {
      if (c.k > 0) return vs_if(ctx, s, q);
      Skel k2 = w_skel(ctx, s->kids[2], q);
      Skel k1 = w_skel(ctx, s->kids[1], q);
      Formula bt = bt_ref(c, nullptr);
      Formula gp = f::land(f::implies(bt, k1->pre), f::implies(f::lnot(bt), k2->pre));
      Skel k0 = w_skel(ctx, s->kids[0], gp);
      Skel n = node(Rule::SimpleIf, ctx, s, k0->pre, q);
      n->kids = {k0, k1, k2};
      return n;
    }
    case Tag::While: return loop(ctx, s, q);
    case Tag::NonterminalRef: return nonterminal(ctx, s, q);
  }
  throw Error("unknown term");
}

Skel SkeletonBuilder::p_skel(const ContextPtr& ctx, const Formula& p, const Term& s,
                             const Formula& q) {
  g_.sort_of(s);
  names_.reserve(p);
  names_.reserve(q);
  Skel inner = w_skel(ctx, s, q);
  Skel n = node(Rule::Weaken, ctx, s, p, q);
  n->kids = {inner};
  assign_paths(n);
  return n;
}

// ---------------------------------------------------------------------------

namespace {

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

void paths_rec(const Skel& n, const std::string& prefix, std::size_t index) {
  n->path = (prefix.empty() ? "" : prefix + ".") + lower(to_string(n->rule)) + std::to_string(index);
  for (std::size_t i = 0; i < n->kids.size(); ++i) paths_rec(n->kids[i], n->path, i);
}

}  // namespace

void assign_paths(const Skel& root) { paths_rec(root, "", 0); }

void visit_preorder(const Skel& root, const std::function<void(const Skel&)>& fn) {
  fn(root);
  for (const auto& k : root->kids) visit_preorder(k, fn);
}

std::size_t count_rule(const Skel& root, Rule r) {
  std::size_t n = 0;
  visit_preorder(root, [&](const Skel& s) { n += s->rule == r; });
  return n;
}

std::string rule_label(const SkelNode& n) {
  if (n.rule == Rule::Bin) return "Bin-Plus";
  if (n.rule == Rule::Comp) return n.prog->tag == Tag::Lt ? "Comp-Lt" : "Comp-Eq";
  return to_string(n.rule);
}

namespace {
void seq_rec(const Skel& n, std::vector<std::string>& out) {
  for (const auto& k : n->kids) seq_rec(k, out);
  out.push_back(rule_label(*n));
}
void render_rec(const Skel& n, int depth, std::ostringstream& os) {
  os << std::string(static_cast<std::size_t>(depth) * 2, ' ') << rule_label(*n) << "  {| "
     << to_string(n->pre) << " |}  " << to_string(n->prog) << "  {| " << to_string(n->post)
     << " |}\n";
  for (const auto& k : n->kids) render_rec(k, depth + 1, os);
}
}  // namespace

std::vector<std::string> rule_sequence(const Skel& root) {
  std::vector<std::string> out;
  seq_rec(root, out);
  return out;
}

std::string render(const Skel& root) {
  std::ostringstream os;
  render_rec(root, 0, os);
  return os.str();
}

// ---------------------------------------------------------------------------
// Syntactic checking

namespace {

struct Checker {
  const Rtg& g;
  VarConv c;
  std::vector<Violation> out;

  void fail(const SkelNode& n, const std::string& msg) {
    out.push_back({n.path.empty() ? rule_label(n) : n.path, rule_label(n) + ": " + msg});
  }
  void same(const SkelNode& n, const Formula& got, const Formula& want, const std::string& what) {
    if (!alpha_equal(got, want))
      fail(n, what + " is " + to_string(got) + ", expected " + to_string(want));
  }
  bool arity(const SkelNode& n, std::size_t k) {
    if (n.kids.size() == k) return true;
    fail(n, "expected " + std::to_string(k) + " premises, found " + std::to_string(n.kids.size()));
    return false;
  }
  void prog(const SkelNode& n, std::size_t i, const Term& want) {
    if (!equal(n.kids[i]->prog, want)) fail(n, "premise " + std::to_string(i) + " program mismatch");
  }

  void check(const Skel& sp) {
    const SkelNode& n = *sp;
    const Term& s = n.prog;
    const Formula& q = n.post;
    switch (n.rule) {
      case Rule::Int:
        if (s->tag != Tag::IntLit || !arity(n, 0)) return fail(n, "not an integer literal");
        same(n, n.pre, c.subst(q, kIntResult, [&](const Formula*) { return f::num(s->value); }, {}),
             "precondition");
        break;
      case Rule::True:
      case Rule::False: {
        bool v = n.rule == Rule::True;
        if (s->tag != Tag::BoolLit || (s->value != 0) != v || !arity(n, 0))
          return fail(n, "not the matching Boolean literal");
        same(n, n.pre, c.subst(q, kBoolResult, [&](const Formula*) { return f::boolean(v); }, {}),
             "precondition");
        break;
      }
      case Rule::Var:
        if (s->tag != Tag::Var || !arity(n, 0)) return fail(n, "not a variable");
        same(n, n.pre,
             c.subst(q, kIntResult, [&](const Formula* i) { return c.ref(s->name, Sort::Int, i); },
                     {s->name}),
             "precondition");
        break;
      case Rule::Not:
        if (s->tag != Tag::Not || !arity(n, 1)) return fail(n, "not a negation");
        prog(n, 0, s->kids[0]);
        same(n, n.kids[0]->post,
             c.subst(q, kBoolResult,
                     [&](const Formula* i) { return f::lnot(c.ref(kBoolResult, Sort::Bool, i)); },
                     {kBoolResult}),
             "premise postcondition");
        same(n, n.pre, n.kids[0]->pre, "precondition");
        break;
      case Rule::Bin:
      case Rule::And:
      case Rule::Comp: {
        Tag want = n.rule == Rule::Bin ? Tag::Plus : n.rule == Rule::And ? Tag::And : s->tag;
        if (s->tag != want || (n.rule == Rule::Comp && s->tag != Tag::Lt && s->tag != Tag::Eq) ||
            !arity(n, 2))
          return fail(n, "operator mismatch");
        prog(n, 0, s->kids[0]);
        prog(n, 1, s->kids[1]);
        bool bops = s->tag == Tag::And;
        Sort os = bops ? Sort::Bool : Sort::Int;
        std::string operand = bops ? kBoolResult : kIntResult;
        std::string result = s->tag == Tag::Plus ? kIntResult : kBoolResult;
        auto mk = [&](const Formula* i) {
          Formula a = c.ref(n.aux, os, i), b = c.ref(operand, os, i);
          switch (s->tag) {
            case Tag::Plus: return f::add(a, b);
            case Tag::And: return f::land(a, b);
            case Tag::Lt: return f::lt(a, b);
            default: return f::eq(a, b);
          }
        };
        same(n, n.kids[1]->post, c.subst(q, result, mk, {n.aux, operand}), "right postcondition");
        same(n, n.kids[0]->post, c.rename(n.kids[1]->pre, n.aux, operand, os), "left postcondition");
        same(n, n.pre, n.kids[0]->pre, "precondition");
        break;
      }
      case Rule::Assign:
        if (s->tag != Tag::Assign || !arity(n, 1)) return fail(n, "not an assignment");
        prog(n, 0, s->kids[0]);
        same(n, n.kids[0]->post, c.rename(q, s->name, kIntResult, Sort::Int), "premise postcondition");
        same(n, n.pre, n.kids[0]->pre, "precondition");
        break;
      case Rule::Seq:
        if (s->tag != Tag::Seq || !arity(n, 2)) return fail(n, "not a sequence");
        prog(n, 0, s->kids[0]);
        prog(n, 1, s->kids[1]);
        same(n, n.kids[1]->post, q, "second postcondition");
        same(n, n.kids[0]->post, n.kids[1]->pre, "first postcondition");
        same(n, n.pre, n.kids[0]->pre, "precondition");
        break;
      case Rule::Skip:
        if (s->tag != Tag::Skip || !arity(n, 0)) return fail(n, "not skip");
        same(n, n.pre, q, "precondition");
        break;
      case Rule::SimpleIf: {
        if (s->tag != Tag::IfThenElse || !arity(n, 3)) return fail(n, "not a conditional");
        for (std::size_t i = 0; i < 3; ++i) prog(n, i, s->kids[i]);
        same(n, n.kids[1]->post, q, "then postcondition");
        same(n, n.kids[2]->post, q, "else postcondition");
        Formula bt = c.ref(kBoolResult, Sort::Bool, nullptr);
        same(n, n.kids[0]->post,
             f::land(f::implies(bt, n.kids[1]->pre), f::implies(f::lnot(bt), n.kids[2]->pre)),
             "guard postcondition");
        same(n, n.pre, n.kids[0]->pre, "precondition");
        break;
      }
      case Rule::SimpleWhile: {
        if (s->tag != Tag::While || !arity(n, 2)) return fail(n, "not a loop");
        prog(n, 0, s->kids[0]);
        prog(n, 1, s->kids[1]);
        Formula bt = c.ref(kBoolResult, Sort::Bool, nullptr);
        same(n, n.kids[1]->post, n.pre, "body postcondition");
        same(n, n.kids[0]->pre, n.pre, "guard precondition");
        same(n, n.kids[0]->post,
             f::land(f::implies(f::lnot(bt), q), f::implies(bt, n.kids[1]->pre)),
             "guard postcondition");
        break;
      }
      case Rule::VSIf: {
        if (s->tag != Tag::IfThenElse || !arity(n, 3)) return fail(n, "not a conditional");
        for (std::size_t i = 0; i < 3; ++i) prog(n, i, s->kids[i]);
        Formula tq = t_transform(n.unplugged_q, n.aux, n.ymap);
        Formula qq = n.unplugged_q;
        if (n.plugged) {
          tq = plug_formula(tq, *n.plugged, c.k);
          qq = plug_formula(qq, *n.plugged, c.k);
        }
        same(n, q, qq, "postcondition");
        same(n, n.kids[2]->post, tq, "else postcondition");
        std::map<std::string, std::string> yback, zback;
        std::map<std::string, Sort> ints;
        for (const auto& [x, y] : n.ymap) yback[y] = x, ints[x] = ints[y] = Sort::Int;
        for (const auto& [x, z] : n.zmap) zback[z] = x, ints[z] = Sort::Int;
        same(n, n.kids[1]->post, c.rename_all(c.rename_all(n.kids[2]->pre, n.zmap, ints), yback, ints),
             "then postcondition");
        same(n, n.kids[0]->post, guard_binding(n.aux, c.rename_all(n.kids[1]->pre, zback, ints)),
             "guard postcondition");
        same(n, n.pre, n.kids[0]->pre, "precondition");
        break;
      }
      case Rule::VSWhile: {
        if (s->tag != Tag::While || !arity(n, 2)) return fail(n, "not a loop");
        prog(n, 0, s->kids[0]);
        prog(n, 1, term::ite(s->kids[0], s->kids[1], term::skip()));
        Formula none = all_false(c);
        same(n, n.kids[0]->post, none, "guard postcondition");
        same(n, n.kids[1]->pre, n.pre, "body precondition");
        same(n, n.kids[1]->post, n.pre, "body postcondition");
        same(n, q, f::land({n.pre, c.rename(n.kids[0]->pre, kBoolResult, n.aux, Sort::Bool), none}),
             "postcondition");
        break;
      }
      case Rule::GrmDisj:
      case Rule::HP: {
        if (s->tag != Tag::NonterminalRef) return fail(n, "not a nonterminal");
        const Nonterminal& nt = g.at(s->name);
        if (!arity(n, nt.productions.size())) return;
        std::vector<Formula> pres;
        for (std::size_t i = 0; i < nt.productions.size(); ++i) {
          prog(n, i, nt.productions[i]);
          same(n, n.kids[i]->post, q, "production postcondition");
          pres.push_back(n.kids[i]->pre);
        }
        same(n, n.pre, f::land(pres), "precondition");
        if (n.rule == Rule::GrmDisj && is_recursive(g, s->name))
          fail(n, "GrmDisj on a recursive nonterminal");
        if (n.rule == Rule::HP) {
          if (has_params(q) && q->kind != FK::ParamApp)
            fail(n, "postcondition is not a summary parameter");
          for (const auto& k : n.kids) {
            bool found = false;
            for (const auto& t : *k->ctx)
              found = found || (t.nonterminal == s->name && alpha_equal(t.post, q));
            if (!found) fail(n, "premise context lacks the summary triple");
          }
        }
        break;
      }
      case Rule::ApplyHP: {
        if (s->tag != Tag::NonterminalRef || !arity(n, 0)) return fail(n, "not a nonterminal");
        bool found = false;
        for (const auto& t : *n.ctx)
          found = found || (t.nonterminal == s->name && alpha_equal(t.pre, n.pre) &&
                            alpha_equal(t.post, q));
        if (!found) fail(n, "triple not in context");
        break;
      }
      case Rule::Adapt: {
        if (s->tag != Tag::NonterminalRef || !arity(n, 1)) return fail(n, "not a nonterminal");
        prog(n, 0, s);
        auto prof = var_profile(g, s->name);
        std::vector<std::string> mut(prof.x_vars.begin(), prof.x_vars.begin() + prof.z_vars.size());
        same(n, n.kids[0]->pre, c.eq_all(mut, prof.z_vars), "premise precondition");
        if (n.ybinders.size() != prof.x_vars.size()) return fail(n, "wrong number of y binders");
        same(n, n.pre, adapt_pre(c, n.ybinders, prof.x_vars, prof.z_vars, n.kids[0]->post, q),
             "precondition");
        break;
      }
      case Rule::Weaken:
        if (!arity(n, 1)) return;
        if (!equal(n.kids[0]->prog, s)) fail(n, "premise program mismatch");
        break;
    }
    for (const auto& k : n.kids) check(k);
  }
};

}  // namespace

std::vector<Violation> check_syntactic(const Skel& root, const Rtg& g, int k) {
  Checker ch{g, VarConv{k}, {}};
  ch.check(root);
  return ch.out;
}

}  // namespace wul
