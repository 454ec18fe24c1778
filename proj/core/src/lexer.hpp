#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace clara::detail {

/// Token of the line-oriented document grammars (scripts and forest files).
struct Token {
  enum class Kind { word, string, op, end };
  Kind kind = Kind::end;
  std::string text;
  std::size_t column = 0;
};

/// Splits one line into words, quoted strings and operators; `#` starts a comment.
/// Throws ParseError(SyntaxError) on malformed input.
std::vector<Token> tokenize(std::string_view line, std::size_t line_no);

}  // namespace clara::detail
