#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wul {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SortError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A parsed s-expression. Atoms keep their source text; `|quoted|` symbols
/// are stored without the bars.
struct Sexpr {
  enum class Kind { Atom, List };
  Kind kind = Kind::Atom;
  std::string atom;
  std::vector<Sexpr> items;
  int line = 0;
  int column = 0;

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_list() const { return kind == Kind::List; }
  bool is_atom(std::string_view s) const { return is_atom() && atom == s; }
  bool is_int() const;
  std::int64_t as_int() const;
  /// Head symbol of a non-empty list whose first item is an atom, else "".
  const std::string& head() const;
  std::size_t size() const { return items.size(); }
  const Sexpr& operator[](std::size_t i) const { return items.at(i); }

  static Sexpr make_atom(std::string s);
  static Sexpr make_list(std::vector<Sexpr> items);
};

/// Parses every top-level expression in `text`. `;` starts a line comment.
std::vector<Sexpr> parse_sexprs(std::string_view text);
Sexpr parse_sexpr(std::string_view text);

std::string to_string(const Sexpr& e);

/// Throws ParseError positioned at `at`.
[[noreturn]] void fail_at(const Sexpr& at, const std::string& msg);

}  // namespace wul
