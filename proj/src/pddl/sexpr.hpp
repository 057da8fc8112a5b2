#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gplan::detail {

// Parsed s-expression. Symbols are lower-cased on read.
struct SExpr {
  bool is_list = false;
  std::string symbol;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_symbol(std::string_view s) const { return !is_list && symbol == s; }
  // Head symbol of a list, or empty.
  std::string_view head() const;
};

SExpr read_sexpr(std::string_view text);

[[noreturn]] void fail_at(const SExpr& at, const std::string& what);

}  // namespace gplan::detail
