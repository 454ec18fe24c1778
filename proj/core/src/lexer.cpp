#include "lexer.hpp"

#include <cctype>

#include "clara/error.hpp"

namespace clara::detail {
namespace {

bool is_word_char(char c) {
  auto uc = static_cast<unsigned char>(c);
  return std::isalnum(uc) || c == '_' || c == '.' || c == '-';
}

}  // namespace

std::vector<Token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;
    const std::size_t col = i + 1;
    if (c == '"') {
      std::string text;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        char d = line[i];
        if (d == '"') {
          closed = true;
          ++i;
          break;
        }
        if (d == '\\' && i + 1 < line.size()) {
          char e = line[i + 1];
          switch (e) {
            case 'n': text += '\n'; break;
            case 't': text += '\t'; break;
            case '"': text += '"'; break;
            case '\\': text += '\\'; break;
            default:
              throw ParseError(ErrorCode::SyntaxError, line_no, i + 1,
                               std::string("unknown escape \\") + e);
          }
          i += 2;
          continue;
        }
        text += d;
        ++i;
      }
      if (!closed) throw ParseError(ErrorCode::SyntaxError, line_no, col, "unterminated string");
      out.push_back({Token::Kind::string, std::move(text), col});
      continue;
    }
    const bool starts_word =
        std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
        (c == '-' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1])));
    if (starts_word) {
      std::size_t j = i + 1;
      while (j < line.size() && is_word_char(line[j])) {
        if (line[j] == '-' && j + 1 < line.size() && line[j + 1] == '>') break;
        ++j;
      }
      out.push_back({Token::Kind::word, std::string(line.substr(i, j - i)), col});
      i = j;
      continue;
    }
    static constexpr std::string_view two_char[] = {"->", "==", "!=", "<=", ">="};
    bool matched = false;
    for (auto op : two_char) {
      if (line.substr(i, 2) == op) {
        out.push_back({Token::Kind::op, std::string(op), col});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("<>=(),;").find(c) != std::string_view::npos) {
      out.push_back({Token::Kind::op, std::string(1, c), col});
      ++i;
      continue;
    }
    throw ParseError(ErrorCode::SyntaxError, line_no, col, std::string("unexpected character '") + c + "'");
  }
  return out;
}

}  // namespace clara::detail
