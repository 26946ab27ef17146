#include "impan/lexer.hpp"

#include <map>

#include "impan/dfa.hpp"

namespace impan {

namespace {

const std::map<std::string, Tok> kKeywords = {
    {"if", Tok::KwIf},     {"else", Tok::KwElse},   {"while", Tok::KwWhile},
    {"skip", Tok::KwSkip}, {"eval", Tok::KwEval},   {"true", Tok::KwTrue},
    {"false", Tok::KwFalse}, {"substr", Tok::KwSubstr},
};

}  // namespace

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string t, long long v = 0) {
    out.push_back({k, std::move(t), v, line, col});
  };
  auto advance = [&](size_t n) {
    for (size_t j = 0; j < n; ++j) {
      if (text[i + j] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c >= 'a' && c <= 'z') {
      size_t j = i;
      while (j < text.size() && text[j] >= 'a' && text[j] <= 'z') ++j;
      std::string word = text.substr(i, j - i);
      auto kw = kKeywords.find(word);
      push(kw == kKeywords.end() ? Tok::Ident : kw->second, word);
      advance(j - i);
      continue;
    }
    if (c >= '0' && c <= '9') {
      size_t j = i;
      while (j < text.size() && text[j] >= '0' && text[j] <= '9') ++j;
      std::string digits = text.substr(i, j - i);
      if (digits.size() > 18) throw SyntaxError(line, col, "integer literal of at most 18 digits");
      push(Tok::Int, digits, std::stoll(digits));
      advance(j - i);
      continue;
    }
    if (c == '"') {
      size_t j = i + 1;
      while (j < text.size() && text[j] != '"') {
        if (!in_alphabet(text[j])) throw SyntaxError(line, col, "printable string contents");
        ++j;
      }
      if (j >= text.size()) throw SyntaxError(line, col, "closing '\"'");
      push(Tok::Str, text.substr(i + 1, j - i - 1));
      advance(j - i + 1);
      continue;
    }
    if (c == ':' && i + 1 < text.size() && text[i + 1] == '=') {
      push(Tok::Assign, ":=");
      advance(2);
      continue;
    }
    if (c == '&' && i + 1 < text.size() && text[i + 1] == '&') {
      push(Tok::AndAnd, "&&");
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
      case '=': k = Tok::Eq; break;
      case '<': k = Tok::Lt; break;
      case '>': k = Tok::Gt; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '!': k = Tok::Bang; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case ';': k = Tok::Semi; break;
      case ',': k = Tok::Comma; break;
      default:
        throw SyntaxError(line, col, "a token");
    }
    push(k, std::string(1, c));
    advance(1);
  }
  out.push_back({Tok::End, "", 0, line, col});
  return out;
}

}  // namespace impan
