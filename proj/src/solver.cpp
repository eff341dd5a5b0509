#include "wul/solver.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

#ifndef WUL_SHIM_PATH
#define WUL_SHIM_PATH "cvc5_sygus.py"
#endif

namespace wul {

using Clock = std::chrono::steady_clock;

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Valid: return "Valid";
    case Outcome::Invalid: return "Invalid";
    case Outcome::Unknown: return "Unknown";
    case Outcome::Timeout: return "Timeout";
    case Outcome::SolverError: return "SolverError";
  }
  return "?";
}

// ---------------------------------------------------------------- config

bool command_available(const std::string& exe) {
  if (exe.empty()) return false;
  if (exe.find('/') != std::string::npos) return ::access(exe.c_str(), X_OK) == 0;
  const char* path = std::getenv("PATH");
  if (!path) return false;
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) dir = ".";
    std::string full = dir + "/" + exe;
    struct stat st {};
    if (::stat(full.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(full.c_str(), X_OK) == 0)
      return true;
  }
  return false;
}

SolverConfig SolverConfig::defaults() {
  SolverConfig c;
  c.smt = {"z3", "-model", "{file}"};
  if (command_available("cvc5"))
    c.sygus = {"cvc5", "--lang=sygus2", "{file}"};
  else if (command_available("python3") && ::access(WUL_SHIM_PATH, R_OK) == 0)
    c.sygus = {"python3", WUL_SHIM_PATH, "{file}"};
  if (const char* t = std::getenv("WUL_TIMEOUT")) c.timeout = std::atof(t);
  return c;
}

SolverConfig SolverConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read solver config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("solver config " + path + ": " + e.what());
  }
  SolverConfig c = defaults();
  try {
    if (j.contains("smt")) c.smt = j.at("smt").get<std::vector<std::string>>();
    if (j.contains("sygus")) {
      if (j.at("sygus").is_null())
        c.sygus.clear();
      else
        c.sygus = j.at("sygus").get<std::vector<std::string>>();
    }
    if (j.contains("timeout")) c.timeout = j.at("timeout").get<double>();
    if (j.contains("total_timeout")) c.total_timeout = j.at("total_timeout").get<double>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("solver config " + path + ": " + e.what());
  }
  if (c.smt.empty()) throw Error("solver config " + path + ": empty smt command");
  if (c.timeout <= 0 || c.total_timeout <= 0) throw Error("solver config " + path + ": timeouts must be positive");
  return c;
}

int SolverConfig::effective_jobs() const {
  if (jobs > 0) return jobs;
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

// ---------------------------------------------------------------- printing

namespace {

const std::set<std::string>& reserved_words() {
  static const std::set<std::string> r = {
      "true",  "false", "and",   "or",     "not",  "=>",    "ite",        "forall",    "exists",
      "let",   "=",     "<",     "<=",     ">",    ">=",    "+",          "-",         "*",
      "div",   "mod",   "abs",   "Int",    "Bool", "par",   "_",          "!",         "as",
      "match", "assert", "check-sat", "declare-fun", "declare-const", "define-fun", "set-logic",
      "synth-fun", "declare-var", "constraint", "check-synth", "distinct", "xor"};
  return r;
}

bool simple_char(char c, bool first) {
  if (std::isalpha(static_cast<unsigned char>(c))) return true;
  if (!first && std::isdigit(static_cast<unsigned char>(c))) return true;
  return std::strchr("~!@$%^&*_-+=<>.?/", c) != nullptr;
}

std::string sort_name(Sort s) {
  switch (s) {
    case Sort::Int: return "Int";
    case Sort::Bool: return "Bool";
    case Sort::Index: throw Error("cannot serialize: index quantifier not expanded");
    default: throw Error("cannot serialize: vector-sorted symbol (scalarize first)");
  }
}

void print(const Formula& g, std::string& out);

void print_app(const std::string& head, const std::vector<Formula>& kids, std::string& out) {
  out += '(';
  out += head;
  for (const auto& k : kids) {
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
      out += g->value < 0 ? "(- " + std::to_string(-g->value) + ")" : std::to_string(g->value);
      return;
    case FK::Var: out += smt_symbol(g->name); return;
    case FK::VecRef: throw Error("cannot serialize: vector element " + to_string(g) + " (scalarize first)");
    case FK::Add: print_app("+", g->kids, out); return;
    case FK::Sub: print_app("-", g->kids, out); return;
    case FK::Mul: print_app("*", g->kids, out); return;
    case FK::Neg: print_app("-", g->kids, out); return;
    case FK::Div: print_app("div", g->kids, out); return;
    case FK::Mod: print_app("mod", g->kids, out); return;
    case FK::Ite: print_app("ite", g->kids, out); return;
    case FK::Lt: print_app("<", g->kids, out); return;
    case FK::Le: print_app("<=", g->kids, out); return;
    case FK::Eq: print_app("=", g->kids, out); return;
    case FK::Not: print_app("not", g->kids, out); return;
    case FK::And: print_app("and", g->kids, out); return;
    case FK::Or: print_app("or", g->kids, out); return;
    case FK::Implies: print_app("=>", g->kids, out); return;
    case FK::Forall:
    case FK::Exists: {
      out += g->kind == FK::Forall ? "(forall (" : "(exists (";
      Formula cur = g;
      bool first = true;
      while (cur->kind == g->kind) {
        if (!first) out += ' ';
        first = false;
        out += "(" + smt_symbol(cur->name) + " " + sort_name(cur->sort) + ")";
        cur = cur->kids[0];
      }
      out += ") ";
      print(cur, out);
      out += ')';
      return;
    }
    case FK::ParamApp:
    case FK::FunApp:
      if (g->kids.empty())
        out += smt_symbol(g->name);
      else
        print_app(smt_symbol(g->name), g->kids, out);
      return;
  }
}

bool const_int(const Formula& g) {
  return g->kind == FK::IntConst || (g->kind == FK::Neg && g->kids[0]->kind == FK::IntConst);
}

struct Features {
  bool quantifiers = false;
  bool funs = false;
  bool nonlinear = false;
  bool params = false;
};

void scan(const Formula& g, Features& ft) {
  switch (g->kind) {
    case FK::Forall:
    case FK::Exists: ft.quantifiers = true; break;
    case FK::FunApp: ft.funs = true; break;
    case FK::ParamApp: ft.params = true; break;
    case FK::Mul:
      if (!const_int(g->kids[0]) && !const_int(g->kids[1])) ft.nonlinear = true;
      break;
    case FK::Div:
    case FK::Mod:
      if (!const_int(g->kids[1])) ft.nonlinear = true;
      break;
    default: break;
  }
  for (const auto& k : g->kids) scan(k, ft);
}

// Function symbols with their argument sorts, first occurrence order.
void collect_funs(const Formula& g, FK kind, std::vector<std::pair<std::string, std::vector<Sort>>>& out) {
  if (g->kind == kind) {
    bool seen = std::any_of(out.begin(), out.end(), [&](const auto& p) { return p.first == g->name; });
    if (!seen) {
      std::vector<Sort> args;
      for (const auto& k : g->kids) args.push_back(value_sort(k));
      out.push_back({g->name, args});
    }
  }
  for (const auto& k : g->kids) collect_funs(k, kind, out);
}

std::string fmt_timeout(double t) {
  std::ostringstream os;
  os << t;
  return os.str();
}

}  // namespace

std::string smt_symbol(const std::string& name) {
  bool simple = !name.empty() && !reserved_words().count(name);
  for (std::size_t i = 0; simple && i < name.size(); ++i) simple = simple_char(name[i], i == 0);
  if (simple) return name;
  if (name.find('|') != std::string::npos || name.find('\\') != std::string::npos)
    throw Error("cannot serialize symbol " + name);
  return "|" + name + "|";
}

std::string smt_string(const Formula& scalar) {
  std::string out;
  print(scalar, out);
  return out;
}

std::string choose_logic(const Formula& scalar) {
  Features ft;
  scan(scalar, ft);
  std::string l = ft.quantifiers ? "" : "QF_";
  if (ft.funs) l += "UF";
  l += ft.nonlinear ? "NIA" : "LIA";
  return l;
}

SolverQuery emit_smt(const Formula& vc, int k, double timeout) {
  Formula g = k > 0 ? scalarize(vc, k) : vc;
  Features ft;
  scan(g, ft);
  if (ft.params) throw Error("cannot emit SMT: formula still contains summary parameters");
  SolverQuery q;
  q.kind = QueryKind::SmtValidity;
  q.timeout = timeout;
  q.logic = choose_logic(g);
  q.uninterpreted = ft.funs;
  std::string s = "(set-logic " + q.logic + ")\n";
  std::vector<std::pair<std::string, std::vector<Sort>>> funs;
  collect_funs(g, FK::FunApp, funs);
  for (const auto& [name, args] : funs) {
    s += "(declare-fun " + smt_symbol(name) + " (";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? " " : "") + sort_name(args[i]);
    s += ") Int)\n";
  }
  for (const auto& v : free_vars(g)) s += "(declare-const " + smt_symbol(v.name) + " " + sort_name(v.sort) + ")\n";
  s += "(assert (not " + smt_string(g) + "))\n";
  s += "(check-sat)\n";
  q.text = std::move(s);
  return q;
}

SolverQuery emit_sygus(const std::vector<Pvc>& pvcs, const std::vector<SynthTarget>& targets, int k,
                       double timeout) {
  std::vector<Formula> bodies;
  Features ft;
  for (const auto& p : pvcs) {
    Formula b = p.body();
    if (k > 0) b = scalarize(b, k);
    scan(b, ft);
    bodies.push_back(b);
  }
  auto target = [&](const std::string& n) -> const SynthTarget* {
    for (const auto& t : targets)
      if (t.name == n) return &t;
    return nullptr;
  };
  std::vector<std::pair<std::string, std::vector<Sort>>> apps;
  for (const auto& b : bodies) {
    collect_funs(b, FK::ParamApp, apps);
    collect_funs(b, FK::FunApp, apps);
  }
  for (const auto& [name, args] : apps) {
    const SynthTarget* t = target(name);
    if (!t) throw Error("cannot emit SyGuS: no grammar for parameter " + name);
    if (t->formals.size() != args.size())
      throw Error("cannot emit SyGuS: " + name + " applied to " + std::to_string(args.size()) +
                  " arguments, expects " + std::to_string(t->formals.size()));
  }
  SolverQuery q;
  q.kind = QueryKind::SygusSynthesis;
  q.timeout = timeout;
  q.logic = ft.quantifiers ? "ALL" : (ft.nonlinear ? "NIA" : "LIA");
  std::string s = "(set-logic " + q.logic + ")\n";
  for (const auto& t : targets) {
    s += "(synth-fun " + smt_symbol(t.name) + " (";
    for (std::size_t i = 0; i < t.formals.size(); ++i)
      s += std::string(i ? " " : "") + "(" + smt_symbol(t.formals[i].name) + " " + sort_name(t.formals[i].sort) + ")";
    s += ") " + sort_name(t.result);
    if (t.grammar) {
      // Sorted-var declarations first, then the grouped rule list.
      std::string decl = "(";
      for (std::size_t i = 0; i < t.grammar->size(); ++i) {
        const Sexpr& r = (*t.grammar)[i];
        if (!r.is_list() || r.size() != 3 || !r[0].is_atom() || !r[1].is_atom())
          fail_at(r, "grammar rule must be (NAME SORT (productions...))");
        decl += std::string(i ? " " : "") + "(" + smt_symbol(r[0].atom) + " " + r[1].atom + ")";
      }
      s += "\n  " + decl + ")\n  " + to_string(*t.grammar);
    }
    s += ")\n";
  }
  std::vector<Binder> vars;
  for (const auto& b : bodies)
    for (const auto& v : free_vars(b))
      if (std::none_of(vars.begin(), vars.end(), [&](const Binder& u) { return u.name == v.name; }))
        vars.push_back(v);
  for (const auto& v : vars) s += "(declare-var " + smt_symbol(v.name) + " " + sort_name(v.sort) + ")\n";
  for (const auto& b : bodies) s += "(constraint " + smt_string(b) + ")\n";
  s += "(check-synth)\n";
  q.text = std::move(s);
  return q;
}

// ---------------------------------------------------------------- answers

namespace {

void find_defines(const Sexpr& e, std::vector<const Sexpr*>& out, int depth) {
  if (!e.is_list()) return;
  if (e.head() == "define-fun") {
    out.push_back(&e);
    return;
  }
  if (depth > 3) return;
  for (const auto& c : e.items) find_defines(c, out, depth + 1);
}

std::vector<Sexpr> parse_loose(const std::string& text) {
  // Solvers interleave status words and s-expressions; parse line groups
  // independently so one odd line does not hide the rest.
  try {
    return parse_sexprs(text);
  } catch (const ParseError&) {
    return {};
  }
}

}  // namespace

std::map<std::string, Sexpr> parse_model(const std::string& text) {
  std::map<std::string, Sexpr> out;
  for (const auto& e : parse_loose(text)) {
    std::vector<const Sexpr*> defs;
    find_defines(e, defs, 0);
    for (const Sexpr* d : defs)
      if (d->size() == 5 && (*d)[1].is_atom() && (*d)[2].is_list() && (*d)[2].size() == 0)
        out[(*d)[1].atom] = (*d)[4];
  }
  return out;
}

std::vector<SynthDefinition> parse_synth_solution(const std::string& text) {
  std::vector<SynthDefinition> out;
  for (const auto& e : parse_loose(text)) {
    std::vector<const Sexpr*> defs;
    find_defines(e, defs, 0);
    for (const Sexpr* d : defs) {
      if (d->size() != 5 || !(*d)[1].is_atom() || !(*d)[2].is_list()) continue;
      SynthDefinition def;
      def.name = (*d)[1].atom;
      for (const auto& p : (*d)[2].items) {
        if (!p.is_list() || p.size() != 2) fail_at(p, "malformed parameter in solver solution");
        auto s = parse_sort(p[1].atom);
        if (!s) fail_at(p[1], "unknown sort in solver solution");
        def.params.push_back({p[0].atom, *s});
      }
      def.body = (*d)[4];
      out.push_back(std::move(def));
    }
  }
  return out;
}

// ---------------------------------------------------------------- processes

namespace {

struct Proc {
  pid_t pid = -1;
  int out = -1;
  int err = -1;
  std::string sout, serr;
  bool reaped = false;
  int status = 0;
};

std::string write_temp(const std::string& text, const char* suffix) {
  const char* dir = std::getenv("TMPDIR");
  std::string tmpl = std::string(dir && *dir ? dir : "/tmp") + "/wul-XXXXXX" + suffix;
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  int fd = ::mkstemps(buf.data(), static_cast<int>(std::strlen(suffix)));
  if (fd < 0) throw Error(std::string("cannot create temporary file: ") + std::strerror(errno));
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t n = ::write(fd, text.data() + off, text.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(std::string("cannot write temporary file: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
  ::close(fd);
  return std::string(buf.data());
}

Proc spawn(const std::vector<std::string>& argv_in, const std::string& file) {
  std::vector<std::string> argv;
  bool placed = false;
  for (const auto& a : argv_in) {
    std::string s = a;
    auto pos = s.find("{file}");
    if (pos != std::string::npos) {
      s.replace(pos, 6, file);
      placed = true;
    }
    argv.push_back(s);
  }
  if (!placed) argv.push_back(file);
  std::vector<char*> cargv;
  for (auto& a : argv) cargv.push_back(a.data());
  cargv.push_back(nullptr);

  int po[2], pe[2];
  if (::pipe2(po, O_CLOEXEC) != 0) throw Error(std::string("pipe: ") + std::strerror(errno));
  if (::pipe2(pe, O_CLOEXEC) != 0) {
    ::close(po[0]);
    ::close(po[1]);
    throw Error(std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {po[0], po[1], pe[0], pe[1]}) ::close(fd);
    throw Error(std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, 0);
    ::dup2(po[1], 1);
    ::dup2(pe[1], 2);
    ::execvp(cargv[0], cargv.data());
    const char* msg = "exec failed\n";
    [[maybe_unused]] auto r = ::write(2, msg, std::strlen(msg));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(po[1]);
  ::close(pe[1]);
  for (int fd : {po[0], pe[0]}) ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
  Proc p;
  p.pid = pid;
  p.out = po[0];
  p.err = pe[0];
  return p;
}

void close_fds(Proc& p) {
  if (p.out >= 0) ::close(p.out);
  if (p.err >= 0) ::close(p.err);
  p.out = p.err = -1;
}

void kill_and_reap(Proc& p) {
  if (p.pid > 0) {
    ::kill(-p.pid, SIGKILL);
    ::kill(p.pid, SIGKILL);
    if (!p.reaped) {
      while (::waitpid(p.pid, &p.status, 0) < 0 && errno == EINTR) {
      }
      p.reaped = true;
    }
  }
  close_fds(p);
}

// Reads whatever is available on fd; returns false on EOF.
bool drain(int fd, std::string& into) {
  char buf[4096];
  for (;;) {
    ssize_t n = ::read(fd, buf, sizeof buf);
    if (n > 0) {
      into.append(buf, static_cast<std::size_t>(n));
      continue;
    }
    if (n == 0) return false;
    if (errno == EINTR) continue;
    return errno == EAGAIN;
  }
}

std::string trimmed(const std::string& s, std::size_t max = 400) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  std::string t = s.substr(b, e - b + 1);
  if (t.size() > max) t = t.substr(0, max) + "...";
  return t;
}

SolverVerdict classify(const SolverQuery& q, const Proc& p) {
  SolverVerdict v;
  const std::string& o = p.sout;
  bool exited_ok = WIFEXITED(p.status);
  int code = exited_ok ? WEXITSTATUS(p.status) : -1;
  if (code == 127 && o.empty()) {
    v.outcome = Outcome::SolverError;
    v.detail = "cannot execute solver: " + trimmed(p.serr);
    return v;
  }
  if (q.kind == QueryKind::SmtValidity) {
    if (o.find("(error") != std::string::npos) {
      v.outcome = Outcome::SolverError;
      v.detail = trimmed(o + "\n" + p.serr);
      return v;
    }
    std::istringstream in(o);
    std::string line;
    while (std::getline(in, line)) {
      std::string t = trimmed(line);
      if (t == "unsat") {
        v.outcome = Outcome::Valid;
        return v;
      }
      if (t == "sat") {
        if (q.uninterpreted) {
          v.outcome = Outcome::Unknown;
          v.detail = "sat with uninterpreted functions";
        } else {
          v.outcome = Outcome::Invalid;
        }
        v.model = trimmed(o, std::string::npos);
        return v;
      }
      if (t == "unknown") {
        v.outcome = Outcome::Unknown;
        return v;
      }
      if (t == "timeout") {
        v.outcome = Outcome::Timeout;
        return v;
      }
    }
    v.outcome = Outcome::SolverError;
    v.detail = "no answer: " + trimmed(o + "\n" + p.serr);
    return v;
  }
  auto defs = parse_synth_solution(o);
  if (!defs.empty()) {
    v.outcome = Outcome::Valid;
    v.definitions = std::move(defs);
    return v;
  }
  std::string t = trimmed(o);
  if (t == "infeasible" || t == "fail" || t == "unknown") {
    v.outcome = Outcome::Unknown;
    v.detail = t;
    return v;
  }
  v.outcome = Outcome::SolverError;
  v.detail = "no answer: " + trimmed(o + "\n" + p.serr);
  return v;
}

bool definitive(const SolverVerdict& v) { return v.outcome == Outcome::Valid || v.outcome == Outcome::Invalid; }

struct Runner {
  std::string role;
  const SolverQuery* q;
  std::string file;
  Proc p;
  Clock::time_point deadline;
  bool done = false;
  SolverVerdict v;
};

SolverVerdict run_all(std::vector<Runner>& rs, Clock::time_point start) {
  auto finish = [&](Runner& r, SolverVerdict v) {
    r.done = true;
    r.v = std::move(v);
    r.v.winner = r.role;
    ::unlink(r.file.c_str());
  };
  for (;;) {
    std::vector<pollfd> fds;
    std::vector<std::pair<Runner*, bool>> owners;  // bool: is stdout
    bool pending = false;
    for (auto& r : rs) {
      if (r.done) continue;
      pending = true;
      if (r.p.out >= 0) {
        fds.push_back({r.p.out, POLLIN, 0});
        owners.push_back({&r, true});
      }
      if (r.p.err >= 0) {
        fds.push_back({r.p.err, POLLIN, 0});
        owners.push_back({&r, false});
      }
    }
    if (!pending) break;
    auto now = Clock::now();
    long wait_ms = 50;
    for (auto& r : rs)
      if (!r.done) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(r.deadline - now).count();
        wait_ms = std::max(0L, std::min(wait_ms, static_cast<long>(left)));
      }
    if (!fds.empty()) {
      int n = ::poll(fds.data(), fds.size(), static_cast<int>(wait_ms));
      if (n > 0) {
        for (std::size_t i = 0; i < fds.size(); ++i) {
          if (!fds[i].revents) continue;
          auto [r, is_out] = owners[i];
          int& fd = is_out ? r->p.out : r->p.err;
          if (!drain(fd, is_out ? r->p.sout : r->p.serr)) {
            ::close(fd);
            fd = -1;
          }
        }
      }
    } else {
      // Output closed; the child is exiting.
      std::this_thread::sleep_for(std::chrono::milliseconds(std::min(wait_ms, 1L)));
    }
    now = Clock::now();
    for (auto& r : rs) {
      if (r.done) continue;
      if (!r.p.reaped && r.p.out < 0 && r.p.err < 0) {
        pid_t w;
        while ((w = ::waitpid(r.p.pid, &r.p.status, WNOHANG)) < 0 && errno == EINTR) {
        }
        if (w == r.p.pid) r.p.reaped = true;
      }
      if (r.p.reaped) {
        kill_and_reap(r.p);  // stray descendants in the group
        SolverVerdict v = classify(*r.q, r.p);
        finish(r, v);
        continue;
      }
      if (now >= r.deadline) {
        kill_and_reap(r.p);
        SolverVerdict v;
        v.outcome = Outcome::Timeout;
        v.detail = "killed after " + fmt_timeout(r.q->timeout) + " s";
        finish(r, v);
      }
    }
    for (auto& r : rs)
      if (r.done && definitive(r.v)) {
        for (auto& o : rs)
          if (!o.done) {
            kill_and_reap(o.p);
            o.done = true;
            ::unlink(o.file.c_str());
          }
        SolverVerdict v = r.v;
        v.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        return v;
      }
  }
  // No definitive answer.
  SolverVerdict v;
  bool all_timeout = std::all_of(rs.begin(), rs.end(), [](const Runner& r) { return r.v.outcome == Outcome::Timeout; });
  auto pick = [&](Outcome o) -> const Runner* {
    for (const auto& r : rs)
      if (r.v.outcome == o) return &r;
    return nullptr;
  };
  const Runner* chosen = nullptr;
  if (all_timeout)
    chosen = &rs.front();
  else if ((chosen = pick(Outcome::Unknown))) {
  } else if ((chosen = pick(Outcome::Timeout))) {
  } else {
    chosen = &rs.front();
  }
  v = chosen->v;
  std::string details;
  for (const auto& r : rs)
    if (!r.v.detail.empty()) details += (details.empty() ? "" : "; ") + r.role + ": " + r.v.detail;
  v.detail = details;
  v.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return v;
}

}  // namespace

SolverBackend::SolverBackend(SolverConfig cfg) : cfg_(std::move(cfg)) {}

SolverVerdict SolverBackend::check(const SolverQuery& q) { return race(q, std::nullopt); }

SolverVerdict SolverBackend::race(const SolverQuery& smt, const std::optional<SolverQuery>& sygus) {
  auto start = Clock::now();
  std::vector<std::pair<std::string, const SolverQuery*>> plan;
  auto cmd_for = [&](const SolverQuery& q) -> const std::vector<std::string>& {
    return q.kind == QueryKind::SmtValidity ? cfg_.smt : cfg_.sygus;
  };
  plan.push_back({smt.kind == QueryKind::SmtValidity ? "smt" : "sygus", &smt});
  if (sygus) plan.push_back({"sygus", &*sygus});
  SolverVerdict err;
  err.outcome = Outcome::SolverError;
  for (const auto& [role, q] : plan) {
    const auto& cmd = cmd_for(*q);
    if (cmd.empty() || !command_available(cmd[0])) {
      err.detail = role + " solver not available: " + (cmd.empty() ? std::string("none configured") : cmd[0]);
      err.winner = role;
      return err;
    }
  }
  std::vector<Runner> rs;
  rs.reserve(plan.size());
  try {
    for (const auto& [role, q] : plan) {
      Runner r;
      r.role = role;
      r.q = q;
      r.file = write_temp(q->text, q->kind == QueryKind::SmtValidity ? ".smt2" : ".sl");
      r.deadline = Clock::now() + std::chrono::milliseconds(static_cast<long>(q->timeout * 1000));
      rs.push_back(std::move(r));
      rs.back().p = spawn(cmd_for(*q), rs.back().file);
      calls_.fetch_add(1);
    }
  } catch (const Error& e) {
    for (auto& r : rs) {
      kill_and_reap(r.p);
      ::unlink(r.file.c_str());
    }
    err.detail = e.what();
    return err;
  }
  return run_all(rs, start);
}

}  // namespace wul
