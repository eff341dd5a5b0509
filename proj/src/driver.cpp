#include "wul/driver.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "wul/oracle.hpp"
#include "wul/store.hpp"
#include "wul/synth.hpp"

namespace wul {

using Clock = std::chrono::steady_clock;

Pipeline build_pipeline(const Benchmark& b, bool optimize) {
  SkeletonBuilder sb(b.grammar, b.k);
  sb.reserve(b.pre);
  sb.reserve(b.post);
  Pipeline p;
  p.root = sb.p_skel(std::make_shared<Context>(), b.pre, b.program, b.post);
  p.sigs = sb.params();
  p.original = extract_pvcs(p.root);
  p.pvcs = optimize ? optimize_pvcs(p.original, b.k) : p.original;
  return p;
}

namespace {

const ParamSig* find_sig(const std::vector<ParamSig>& sigs, const std::string& target, ParamSig::Kind kind) {
  for (const auto& s : sigs)
    if (s.name == target) return &s;
  for (const auto& s : sigs)
    if (s.kind == kind && s.site == target) return &s;
  return nullptr;
}

ParseContext formals_context(const ParamSig& sig) {
  ParseContext pc;
  for (const auto& fm : sig.formals) pc.vars[fm.name] = fm.sort;
  return pc;
}

}  // namespace

Assignment provided_assignment(const Benchmark& b, const std::vector<ParamSig>& sigs) {
  Assignment a;
  for (const auto& s : b.summaries) {
    if (!s.target.is_atom()) fail_at(s.target, "summary target must be a nonterminal or parameter name");
    const ParamSig* sig = find_sig(sigs, s.target.atom, ParamSig::Kind::Summary);
    if (!sig) fail_at(s.target, "no summary parameter for '" + s.target.atom + "' in this proof");
    a[sig->name] = {sig->formals, parse_formula(s.formula, formals_context(*sig))};
  }
  for (const auto& inv : b.invariants) {
    std::string key = inv.target.is_atom() ? inv.target.atom : to_string(parse_term(inv.target, b.grammar));
    const ParamSig* sig = find_sig(sigs, key, ParamSig::Kind::Invariant);
    if (!sig) fail_at(inv.target, "no loop invariant parameter for '" + key + "' in this proof");
    a[sig->name] = {sig->formals, parse_formula(inv.formula, formals_context(*sig))};
  }
  return a;
}

std::vector<std::string> defining_origins(const Skel& root, const std::string& n) {
  std::vector<std::string> out;
  std::function<void(const Skel&, const SkelNode*)> walk = [&](const Skel& node, const SkelNode* parent) {
    if (node->rule == Rule::HP && node->prog->tag == Tag::NonterminalRef && node->prog->name == n) {
      bool lone = parent && parent->rule == Rule::Weaken && parent->kids.size() == 1;
      out.push_back(lone ? parent->path : node->path);
      return;
    }
    for (const auto& k : node->kids) walk(k, node.get());
  };
  walk(root, nullptr);
  return out;
}

namespace {

bool under(const std::string& origin, const std::vector<std::string>& prefixes) {
  for (const auto& p : prefixes)
    if (origin == p || origin.rfind(p + ".", 0) == 0) return true;
  return false;
}

std::string model_line(const std::string& model) {
  std::string s;
  for (const auto& [name, v] : parse_model(model)) {
    if (!s.empty()) s += ", ";
    std::string val = to_string(v);
    if (v.is_list() && v.size() == 2 && v[0].is_atom("-") && v[1].is_int()) val = "-" + v[1].atom;
    s += name + "=" + val;
  }
  return s;
}

std::string secs(double s) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << s << "s";
  return os.str();
}

SolverConfig make_config(const RunOptions& o) {
  SolverConfig c = o.config ? *o.config : o.solver_config ? SolverConfig::load(*o.solver_config) : SolverConfig::defaults();
  if (o.timeout) {
    if (*o.timeout <= 0) throw Error("--timeout must be positive");
    c.timeout = *o.timeout;
  }
  return c;
}

void dump(const Pipeline& p, bool optimized, std::ostream& out) {
  out << "; pvcs (" << p.original.size() << ")\n";
  for (const auto& v : p.original) out << print_pvc(v) << "\n";
  if (optimized) {
    out << "; optimized pvcs (" << p.pvcs.size() << ")\n";
    for (const auto& v : p.pvcs) out << print_pvc(v) << "\n";
  }
}

// Store hits in --ctx mode: fills `a` and returns the origins to skip.
std::vector<std::string> use_store(const Benchmark& b, const Pipeline& p, Assignment& a, const std::string& path,
                                   int& hits, std::ostream& out) {
  SummaryStore store(path);
  std::vector<std::string> skip;
  for (const auto& sig : p.sigs) {
    if (sig.kind != ParamSig::Kind::Summary) continue;
    auto rec = store.lookup(grammar_fingerprint(b.grammar, sig.site, b.k));
    if (!rec) continue;
    Formula stored = summary_over(*rec, sig.formals);
    auto given = a.find(sig.name);
    if (given != a.end() && !alpha_equal(given->second.body, stored)) {
      out << "store: " << sig.name << " differs from the stored summary; re-verifying\n";
      continue;
    }
    a[sig.name] = {sig.formals, stored};
    ++hits;
    out << "store hit: " << sig.name << " := " << to_string(stored) << "\n";
    for (const auto& o : defining_origins(p.root, sig.site)) skip.push_back(o);
  }
  return skip;
}

void save_summaries(const Benchmark& b, const Pipeline& p, const Assignment& a, const std::string& path,
                    std::ostream& out) {
  SummaryStore store(path);
  for (const auto& sig : p.sigs) {
    if (sig.kind != ParamSig::Kind::Summary) continue;
    auto it = a.find(sig.name);
    if (it == a.end()) continue;
    StoreRecord r;
    r.fingerprint = grammar_fingerprint(b.grammar, sig.site, b.k);
    r.nonterminal = sig.site;
    r.param = sig.name;
    r.formals = sig.formals;
    r.summary = it->second.body;
    r.source = b.path;
    r.k = b.k;
    store.save(r);
    out << "saved " << sig.name << " to " << path << "\n";
  }
}

std::vector<Pvc> kept(const std::vector<Pvc>& pvcs, const std::vector<std::string>& skip) {
  std::vector<Pvc> out;
  for (const auto& v : pvcs)
    if (!under(v.origin, skip)) out.push_back(v);
  return out;
}

int report(const std::vector<VcReport>& rs, std::size_t skipped, double seconds, int calls, std::ostream& out) {
  std::size_t valid = 0;
  bool errors = false;
  for (const auto& r : rs) {
    const auto& v = r.verdict;
    out << "vc " << r.id << " " << to_string(v.outcome) << " " << secs(v.seconds);
    if (!v.winner.empty()) out << " " << v.winner;
    if (v.outcome == Outcome::Invalid) out << " model: " << model_line(v.model);
    if (!v.detail.empty() && v.outcome != Outcome::Valid) out << " (" << v.detail << ")";
    out << "\n";
    if (v.outcome == Outcome::Valid) ++valid;
    if (v.outcome == Outcome::SolverError) errors = true;
  }
  bool proven = valid == rs.size();
  out << (proven ? "proven" : "unproven") << ": " << valid << "/" << rs.size() << " VCs valid";
  if (skipped) out << ", " << skipped << " discharged by stored summaries";
  out << " in " << secs(seconds) << " (solver calls: " << calls << ")\n";
  if (proven) return kExitProven;
  return errors && valid == 0 ? kExitError : kExitUnproven;
}

std::vector<std::string> missing_params(const std::vector<Pvc>& pvcs, const Assignment& a) {
  std::vector<std::string> out;
  for (const auto& n : params_of(pvcs))
    if (!a.count(n)) out.push_back(n);
  return out;
}

}  // namespace

std::vector<VcReport> discharge(const std::vector<Pvc>& pvcs, const Assignment& a, int k, bool skolemize,
                                SolverBackend& backend) {
  const SolverConfig& cfg = backend.config();
  auto deadline = Clock::now() + std::chrono::milliseconds(static_cast<long>(cfg.total_timeout * 1000));
  auto one = [&](std::size_t i) -> VcReport {
    VcReport r;
    r.id = pvcs[i].id;
    double left = std::chrono::duration<double>(deadline - Clock::now()).count();
    if (left <= 0) {
      r.verdict.outcome = Outcome::Timeout;
      r.verdict.detail = "run time budget exhausted";
      return r;
    }
    double t = std::min(cfg.timeout, left);
    Pvc plugged = plug_pvc(pvcs[i], a, k);
    try {
      SolverQuery smt = emit_smt(plugged.body(), k, t);
      std::optional<SolverQuery> sy;
      if (skolemize && !cfg.sygus.empty()) {
        NameSupply names;
        Pvc sk = skolemize_rhs_existentials(plugged, names, k);
        if (!sk.skolems.empty()) {
          std::vector<SynthTarget> targets;
          for (const auto& [fn, sig] : sk.skolems) targets.push_back({fn, sig, Sort::Int, std::nullopt});
          sy = emit_sygus({sk}, targets, k, t);
        }
      }
      r.verdict = backend.race(smt, sy);
    } catch (const Error& e) {
      r.verdict.outcome = Outcome::SolverError;
      r.verdict.detail = e.what();
    }
    return r;
  };
  return parallel_map<VcReport>(pvcs.size(), cfg.effective_jobs(), one);
}

int cmd_prove(const Benchmark& b, const RunOptions& o, std::ostream& out, RunStats* stats) {
  RunStats local;
  RunStats& st = stats ? *stats : local;
  auto t0 = Clock::now();
  Pipeline p = build_pipeline(b, !o.no_optimize);
  if (o.skeleton) {
    out << render(p.root);
    if (o.dump_vcs) dump(p, !o.no_optimize, out);
    return kExitProven;
  }
  if (o.dump_vcs) dump(p, !o.no_optimize, out);
  SolverConfig cfg = make_config(o);
  Assignment a = provided_assignment(b, p.sigs);
  std::vector<std::string> skip;
  if (o.ctx_store) skip = use_store(b, p, a, *o.ctx_store, st.store_hits, out);
  auto todo = kept(p.pvcs, skip);
  auto missing = missing_params(todo, a);
  if (!missing.empty()) {
    out << "error: no definition for";
    for (const auto& m : missing) out << " " << m;
    out << " (give (summary ...) / (invariant ...) or use synth)\n";
    return kExitError;
  }
  SolverBackend backend(cfg);
  st.vcs = discharge(todo, a, b.k, o.skolemize, backend);
  st.solver_calls = backend.calls();
  double secs_total = std::chrono::duration<double>(Clock::now() - t0).count();
  int rc = report(st.vcs, p.pvcs.size() - todo.size(), secs_total, st.solver_calls, out);
  st.proven = rc == kExitProven;
  st.assignment = a;
  if (st.proven && o.save_store) save_summaries(b, p, a, *o.save_store, out);
  return rc;
}

int cmd_synth(const Benchmark& b, const RunOptions& o, std::ostream& out, RunStats* stats) {
  RunStats local;
  RunStats& st = stats ? *stats : local;
  auto t0 = Clock::now();
  Pipeline p = build_pipeline(b, !o.no_optimize);
  if (o.skeleton) {
    out << render(p.root);
    if (o.dump_vcs) dump(p, !o.no_optimize, out);
    return kExitProven;
  }
  if (o.dump_vcs) dump(p, !o.no_optimize, out);
  SolverConfig cfg = make_config(o);
  Assignment a = provided_assignment(b, p.sigs);
  std::vector<std::string> skip;
  if (o.ctx_store) skip = use_store(b, p, a, *o.ctx_store, st.store_hits, out);
  auto todo = kept(p.pvcs, skip);
  std::vector<Pvc> plugged;
  for (const auto& v : todo) plugged.push_back(plug_pvc(v, a, b.k, true));

  SolverBackend backend(cfg);
  auto needed = params_of(plugged);
  if (!needed.empty()) {
    std::map<std::string, TemplateGrammar> grammars;
    for (const auto& name : needed) {
      const ParamSig* sig = find_sig(p.sigs, name, ParamSig::Kind::Summary);
      const Benchmark::GrammarDecl* decl = nullptr;
      for (const auto& d : b.grammars)
        if (d.target == sig->name || d.target == sig->site) decl = &d;
      if (decl)
        grammars[name] = parse_template(decl->rules, *sig, decl->size_bound);
      else if (o.unconstrained)
        grammars[name] = unconstrained_grammar(*sig, b.k);
      else {
        out << "error: no grammar for " << name << " (add (summary-grammar " << sig->site
            << " ...) or use --unconstrained)\n";
        return kExitError;
      }
    }
    SynthOptions so;
    so.k = b.k;
    so.budget = cfg.total_timeout;
    SynthResult r = synthesize(plugged, p.sigs, grammars, backend, so);
    if (!r.assignment) {
      out << "none found: no assignment in the grammar verifies (" << r.candidates << " candidates, "
          << r.pruned << " pruned by counterexamples, solver calls: " << backend.calls() << ")";
      if (!r.detail.empty()) out << "; " << r.detail;
      out << "\n";
      st.solver_calls = backend.calls();
      return kExitUnproven;
    }
    out << "synthesized by " << r.method << " (" << r.candidates << " candidates, " << r.pruned
        << " pruned by counterexamples)\n";
    out << to_string(*r.assignment);
    for (const auto& [n, d] : *r.assignment) a[n] = d;
  }
  // Re-check the complete assignment from scratch.
  st.vcs = discharge(todo, a, b.k, o.skolemize, backend);
  st.solver_calls = backend.calls();
  double secs_total = std::chrono::duration<double>(Clock::now() - t0).count();
  int rc = report(st.vcs, p.pvcs.size() - todo.size(), secs_total, st.solver_calls, out);
  st.proven = rc == kExitProven;
  st.assignment = a;
  if (st.proven && o.save_store) save_summaries(b, p, a, *o.save_store, out);
  return rc;
}

std::pair<std::int64_t, std::int64_t> parse_domain(const std::string& s) {
  auto pos = s.find("..");
  if (pos == std::string::npos) throw Error("domain must be LO..HI, got '" + s + "'");
  try {
    std::size_t used = 0;
    std::string a = s.substr(0, pos), b = s.substr(pos + 2);
    std::int64_t lo = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    std::int64_t hi = std::stoll(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    if (lo > hi) throw Error("empty domain " + s);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw Error("domain must be LO..HI, got '" + s + "'");
  }
}

int cmd_oracle(const Benchmark& b, const OracleRunOptions& o, std::ostream& out) {
  if (o.depth < 1 || o.fuel < 1) throw Error("--depth and --fuel must be positive");
  OracleConfig c;
  c.k = b.k;
  c.lo = o.lo;
  c.hi = o.hi;
  c.depth = o.depth;
  c.fuel = o.fuel;
  TripleResult r = check_triple(b.pre, b.grammar, b.program, b.post, c);
  if (r.holds) {
    out << "holds: " << r.programs << " programs, " << r.runs << " runs (" << r.diverged << " diverged)\n";
    return kExitProven;
  }
  out << "counterexample: " << to_string(r.cex->program) << "\n";
  out << "  initial " << to_string(r.cex->state) << "\n";
  out << "  final   " << to_string(r.cex->final_state) << "\n";
  return kExitUnproven;
}

}  // namespace wul
