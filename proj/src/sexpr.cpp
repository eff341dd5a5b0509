#include "wul/sexpr.hpp"

#include <cctype>
#include <charconv>

namespace wul {

ParseError::ParseError(const std::string& msg, int line, int column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

bool Sexpr::is_int() const {
  if (!is_atom() || atom.empty()) return false;
  std::size_t i = (atom[0] == '-' && atom.size() > 1) ? 1 : 0;
  for (; i < atom.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(atom[i]))) return false;
  return true;
}

std::int64_t Sexpr::as_int() const {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(atom.data(), atom.data() + atom.size(), v);
  if (ec != std::errc() || ptr != atom.data() + atom.size())
    fail_at(*this, "integer literal out of range: " + atom);
  return v;
}

const std::string& Sexpr::head() const {
  static const std::string empty;
  if (is_list() && !items.empty() && items[0].is_atom()) return items[0].atom;
  return empty;
}

Sexpr Sexpr::make_atom(std::string s) {
  Sexpr e;
  e.kind = Kind::Atom;
  e.atom = std::move(s);
  return e;
}

Sexpr Sexpr::make_list(std::vector<Sexpr> items) {
  Sexpr e;
  e.kind = Kind::List;
  e.items = std::move(items);
  return e;
}

void fail_at(const Sexpr& at, const std::string& msg) {
  throw ParseError(msg, at.line, at.column);
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  Sexpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", line_, col_);
    Sexpr e;
    e.line = line_;
    e.column = col_;
    char c = text_[pos_];
    if (c == '(') {
      advance();
      e.kind = Sexpr::Kind::List;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unbalanced '('", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (c == ')') throw ParseError("unexpected ')'", line_, col_);
    e.kind = Sexpr::Kind::Atom;
    if (c == '|') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '|') e.atom.push_back(advance());
      if (pos_ >= text_.size()) throw ParseError("unterminated quoted symbol", e.line, e.column);
      advance();
      return e;
    }
    if (c == '"') {
      e.atom.push_back(advance());
      while (pos_ < text_.size() && text_[pos_] != '"') e.atom.push_back(advance());
      if (pos_ >= text_.size()) throw ParseError("unterminated string", e.line, e.column);
      e.atom.push_back(advance());
      return e;
    }
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      e.atom.push_back(advance());
    }
    return e;
  }

 private:
  char advance() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';' ||
        c == '|')
      return true;
  return false;
}

void print(const Sexpr& e, std::string& out) {
  if (e.is_atom()) {
    if (needs_quotes(e.atom) && (e.atom.empty() || e.atom.front() != '"')) {
      out += '|';
      out += e.atom;
      out += '|';
    } else {
      out += e.atom;
    }
    return;
  }
  out += '(';
  for (std::size_t i = 0; i < e.items.size(); ++i) {
    if (i) out += ' ';
    print(e.items[i], out);
  }
  out += ')';
}

}  // namespace

std::vector<Sexpr> parse_sexprs(std::string_view text) {
  Reader r(text);
  std::vector<Sexpr> out;
  while (!r.at_end()) out.push_back(r.read());
  return out;
}

Sexpr parse_sexpr(std::string_view text) {
  Reader r(text);
  Sexpr e = r.read();
  if (!r.at_end()) throw ParseError("trailing input after expression", 0, 0);
  return e;
}

std::string to_string(const Sexpr& e) {
  std::string out;
  print(e, out);
  return out;
}

}  // namespace wul
