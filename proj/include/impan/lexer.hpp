#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace impan {

enum class Tok {
  Ident,
  Int,
  Str,
  KwIf,
  KwElse,
  KwWhile,
  KwSkip,
  KwEval,
  KwTrue,
  KwFalse,
  KwSubstr,
  Assign,
  Eq,
  Lt,
  Gt,
  Plus,
  Minus,
  Star,
  AndAnd,
  Bang,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Semi,
  Comma,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  long long value = 0;
  int line = 1;
  int col = 1;
};

struct SyntaxError : std::runtime_error {
  int line;
  int col;
  std::string expected;
  SyntaxError(int line, int col, std::string expected_set)
      : std::runtime_error("syntax error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": expected " + expected_set),
        line(line),
        col(col),
        expected(std::move(expected_set)) {}
};

// Tokenizes the text; the result always ends with an End token.
std::vector<Token> lex(const std::string& text);

}  // namespace impan
