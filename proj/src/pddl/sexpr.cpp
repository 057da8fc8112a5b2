#include "sexpr.hpp"

#include <cctype>

#include "gplan/pddl.hpp"

namespace gplan::detail {

std::string_view SExpr::head() const {
  if (!is_list || items.empty() || items.front().is_list) return {};
  return items.front().symbol;
}

void fail_at(const SExpr& at, const std::string& what) {
  throw SyntaxError(what, at.line, at.column);
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_top() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("empty input", line_, column_);
    SExpr e = read();
    skip_space();
    if (pos_ < text_.size())
      throw SyntaxError("trailing input after top-level expression", line_, column_);
    return e;
  }

 private:
  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", line_, column_);
    SExpr e;
    e.line = line_;
    e.column = column_;
    char c = text_[pos_];
    if (c == ')') throw SyntaxError("unexpected ')'", line_, column_);
    if (c == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (pos_ >= text_.size())
          throw SyntaxError("unterminated list opened here", e.line, e.column);
        if (text_[pos_] == ')') {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    while (pos_ < text_.size()) {
      c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ';') break;
      e.symbol.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      advance();
    }
    return e;
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

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

}  // namespace

SExpr read_sexpr(std::string_view text) { return Reader(text).read_top(); }

}  // namespace gplan::detail
