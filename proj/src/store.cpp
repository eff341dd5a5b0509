#include "wul/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <deque>
#include <map>
#include <set>

#include "json.hpp"

namespace wul {

namespace {

std::string renamed(const Term& t, const std::map<std::string, std::string>& m) {
  if (t->tag == Tag::NonterminalRef) return m.at(t->name);
  if (t->kids.empty()) return to_string(t);
  std::string s = "(" + std::to_string(static_cast<int>(t->tag)) + (t->name.empty() ? "" : " " + t->name);
  for (const auto& k : t->kids) s += " " + renamed(k, m);
  return s + ")";
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// RAII advisory lock on the store file.
class Locked {
 public:
  Locked(const std::string& path, bool exclusive) {
    fd_ = ::open(path.c_str(), exclusive ? (O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC) : (O_RDONLY | O_CLOEXEC), 0644);
    if (fd_ < 0) {
      if (!exclusive && errno == ENOENT) return;
      throw StoreError("cannot open store " + path + ": " + std::strerror(errno));
    }
    while (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0)
      if (errno != EINTR) throw StoreError("cannot lock store " + path + ": " + std::strerror(errno));
  }
  ~Locked() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  Locked(const Locked&) = delete;
  Locked& operator=(const Locked&) = delete;
  int fd() const { return fd_; }

  std::string read_all() const {
    std::string out;
    if (fd_ < 0) return out;
    ::lseek(fd_, 0, SEEK_SET);
    char buf[8192];
    ssize_t n;
    while ((n = ::read(fd_, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
    return out;
  }

 private:
  int fd_ = -1;
};

StoreRecord from_json(const nlohmann::json& j) {
  StoreRecord r;
  r.fingerprint = j.at("fingerprint").get<std::string>();
  r.nonterminal = j.at("nonterminal").get<std::string>();
  r.param = j.at("param").get<std::string>();
  ParseContext pc;
  for (const auto& fm : j.at("formals")) {
    auto s = parse_sort(fm.at(1).get<std::string>());
    if (!s) throw StoreError("unknown sort in store");
    r.formals.push_back({fm.at(0).get<std::string>(), *s});
    pc.vars[r.formals.back().name] = *s;
  }
  r.summary = parse_formula(j.at("summary").get<std::string>(), pc);
  r.status = j.at("status").get<std::string>();
  r.timestamp = j.value("timestamp", "");
  r.source = j.value("source", "");
  r.k = j.value("k", 0);
  return r;
}

std::vector<StoreRecord> parse_lines(const std::string& text, const std::string& path) {
  std::vector<StoreRecord> out;
  std::size_t line = 0, pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    std::string l = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() : nl + 1;
    ++line;
    if (l.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(from_json(nlohmann::json::parse(l)));
    } catch (const std::exception& e) {
      throw StoreError("corrupt store " + path + " line " + std::to_string(line) + ": " + e.what());
    }
  }
  return out;
}

std::string now_iso() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string grammar_fingerprint(const Rtg& g, const std::string& n, int k) {
  std::map<std::string, std::string> names;
  std::vector<std::string> order;
  std::deque<std::string> todo{n};
  names[n] = "N0";
  while (!todo.empty()) {
    std::string cur = todo.front();
    todo.pop_front();
    order.push_back(cur);
    for (const auto& s : g.successors(cur))
      if (!names.count(s)) {
        names[s] = "N" + std::to_string(names.size());
        todo.push_back(s);
      }
  }
  std::string text = "k=" + std::to_string(k) + "\n";
  for (const auto& nt : order) {
    const auto& d = g.at(nt);
    text += "(nonterm " + names[nt] + " " + to_string(d.sort);
    for (const auto& p : d.productions) text += " " + renamed(p, names);
    text += ")\n";
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return hex;
}

std::vector<StoreRecord> SummaryStore::records() const {
  Locked l(path_, false);
  return parse_lines(l.read_all(), path_);
}

std::optional<StoreRecord> SummaryStore::lookup(const std::string& fingerprint) const {
  std::optional<StoreRecord> hit;
  for (auto& r : records())
    if (r.fingerprint == fingerprint && r.status == "proven") hit = std::move(r);
  return hit;
}

void SummaryStore::save(StoreRecord r) const {
  Locked l(path_, true);
  parse_lines(l.read_all(), path_);  // refuse to append to a corrupt file
  if (r.timestamp.empty()) r.timestamp = now_iso();
  nlohmann::json formals = nlohmann::json::array();
  for (const auto& fm : r.formals) formals.push_back({fm.name, to_string(fm.sort)});
  nlohmann::ordered_json j;
  j["fingerprint"] = r.fingerprint;
  j["nonterminal"] = r.nonterminal;
  j["param"] = r.param;
  j["formals"] = formals;
  j["summary"] = to_string(r.summary);
  j["status"] = r.status;
  j["k"] = r.k;
  j["timestamp"] = r.timestamp;
  j["source"] = r.source;
  std::string line = j.dump() + "\n";
  if (::write(l.fd(), line.data(), line.size()) != static_cast<ssize_t>(line.size()))
    throw StoreError("cannot write store " + path_ + ": " + std::strerror(errno));
}

Formula summary_over(const StoreRecord& r, const std::vector<Binder>& formals) {
  if (r.formals.size() != formals.size()) throw StoreError("stored summary for " + r.nonterminal + " has a different arity");
  Subst s;
  for (std::size_t i = 0; i < formals.size(); ++i) {
    if (r.formals[i].sort != formals[i].sort) throw StoreError("stored summary for " + r.nonterminal + " has different sorts");
    if (is_vector(formals[i].sort))
      s.rename_vector(r.formals[i].name, formals[i].name, elem_sort(formals[i].sort));
    else
      s.scalars[r.formals[i].name] = f::var(formals[i].name, formals[i].sort);
  }
  return substitute(r.summary, s);
}

}  // namespace wul
