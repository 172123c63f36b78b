#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cas/cdl/ast.hpp"
#include "cas/cdl/diagnostic.hpp"

namespace cas::cdl {

enum class TokenKind {
  Ident,
  Var,      // ?name, text holds the name
  Int,
  Float,
  String,   // text holds the unescaped contents
  Time,     // HH:MM or HH:MM:SS
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Semicolon,
  Colon,
  Assign,   // :=
  Arrow,    // ->
  Pipe,
  Dot,      // statement terminator
  PathDot,  // '.' glued between a term and a property name
  DotDot,
  Star,
  Equals,   // =
  Op,       // == != < <= > >=
  End,
};

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  Span span;
};

// Never throws; malformed input yields Error diagnostics and the lexer skips
// the offending character.
std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diagnostics);

std::string_view to_string(TokenKind kind) noexcept;

}  // namespace cas::cdl
