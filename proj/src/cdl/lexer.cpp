#include "cas/cdl/lexer.hpp"

#include <cctype>

#include <fmt/core.h>

namespace cas::cdl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
 public:
  Lexer(std::string_view text, std::vector<Diagnostic>& diags) : text_(text), diags_(diags) {}

  std::vector<Token> run() {
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      lex_one();
    }
    Token end;
    end.kind = TokenKind::End;
    end.span = Span{pos_, line_, col_, 0};
    tokens_.push_back(end);
    return std::move(tokens_);
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i) {
      if (text_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
      ++pos_;
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == '#') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void push(TokenKind kind, std::string text, Span start) {
    start.length = pos_ - start.offset;
    tokens_.push_back(Token{kind, std::move(text), start});
  }

  void error(const std::string& code, const std::string& message, Span span) {
    if (span.length == 0) span.length = 1;
    diags_.push_back(Diagnostic{Severity::Error, code, message, span});
  }

  Span here() const { return Span{pos_, line_, col_, 0}; }

  void lex_one() {
    Span start = here();
    char c = peek();
    if (ident_start(c)) {
      std::size_t b = pos_;
      while (ident_char(peek())) advance();
      push(TokenKind::Ident, std::string(text_.substr(b, pos_ - b)), start);
      return;
    }
    if (c == '?') {
      advance();
      std::size_t b = pos_;
      while (ident_char(peek())) advance();
      if (pos_ == b) {
        error("InvalidVariable", "expected a variable name after '?'", start);
        return;
      }
      push(TokenKind::Var, std::string(text_.substr(b, pos_ - b)), start);
      return;
    }
    if (digit(c) || (c == '-' && digit(peek(1)))) {
      lex_number(start);
      return;
    }
    if (c == '"') {
      lex_string(start);
      return;
    }
    switch (c) {
      case '(': advance(); push(TokenKind::LParen, "(", start); return;
      case ')': advance(); push(TokenKind::RParen, ")", start); return;
      case '[': advance(); push(TokenKind::LBracket, "[", start); return;
      case ']': advance(); push(TokenKind::RBracket, "]", start); return;
      case '{': advance(); push(TokenKind::LBrace, "{", start); return;
      case '}': advance(); push(TokenKind::RBrace, "}", start); return;
      case ',': advance(); push(TokenKind::Comma, ",", start); return;
      case ';': advance(); push(TokenKind::Semicolon, ";", start); return;
      case '|': advance(); push(TokenKind::Pipe, "|", start); return;
      case '*': advance(); push(TokenKind::Star, "*", start); return;
      case ':':
        if (peek(1) == '=') {
          advance(2);
          push(TokenKind::Assign, ":=", start);
        } else {
          advance();
          push(TokenKind::Colon, ":", start);
        }
        return;
      case '-':
        if (peek(1) == '>') {
          advance(2);
          push(TokenKind::Arrow, "->", start);
          return;
        }
        break;
      case '=':
        if (peek(1) == '=') {
          advance(2);
          push(TokenKind::Op, "==", start);
        } else {
          advance();
          push(TokenKind::Equals, "=", start);
        }
        return;
      case '!':
        if (peek(1) == '=') {
          advance(2);
          push(TokenKind::Op, "!=", start);
          return;
        }
        break;
      case '<':
      case '>':
        if (peek(1) == '=') {
          advance(2);
          push(TokenKind::Op, std::string{c, '='}, start);
        } else {
          advance();
          push(TokenKind::Op, std::string{c}, start);
        }
        return;
      case '.': {
        if (peek(1) == '.') {
          advance(2);
          push(TokenKind::DotDot, "..", start);
          return;
        }
        bool glued_before = pos_ > 0 && !std::isspace(static_cast<unsigned char>(text_[pos_ - 1]));
        bool after_name = !tokens_.empty() && (tokens_.back().kind == TokenKind::Var ||
                                               tokens_.back().kind == TokenKind::Ident);
        advance();
        if (glued_before && after_name && ident_start(peek())) {
          push(TokenKind::PathDot, ".", start);
        } else {
          push(TokenKind::Dot, ".", start);
        }
        return;
      }
      default: break;
    }
    advance();
    error("UnexpectedCharacter", fmt::format("unexpected character '{}'", c), start);
  }

  void lex_number(Span start) {
    std::size_t b = pos_;
    if (peek() == '-') advance();
    std::size_t digits_start = pos_;
    while (digit(peek())) advance();
    if (peek() == ':' && digit(peek(1)) && text_[b] != '-' && pos_ - digits_start <= 2) {
      // time of day
      advance();
      while (digit(peek()) || (peek() == ':' && digit(peek(1)))) advance();
      push(TokenKind::Time, std::string(text_.substr(b, pos_ - b)), start);
      return;
    }
    bool is_float = false;
    if (peek() == '.' && digit(peek(1))) {
      is_float = true;
      advance();
      while (digit(peek())) advance();
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
      is_float = true;
      advance(2);
      while (digit(peek())) advance();
    }
    push(is_float ? TokenKind::Float : TokenKind::Int, std::string(text_.substr(b, pos_ - b)),
         start);
  }

  void lex_string(Span start) {
    advance();  // opening quote
    std::string value;
    while (true) {
      if (pos_ >= text_.size() || peek() == '\n') {
        start.length = pos_ - start.offset;
        error("UnterminatedString", "string literal is not terminated", start);
        return;
      }
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        char e = peek(1);
        switch (e) {
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          default: {
            Span s = here();
            s.length = 2;
            error("InvalidEscape", fmt::format("unknown escape '\\{}'", e), s);
            value += e;
          }
        }
        advance(2);
        continue;
      }
      value += c;
      advance();
    }
    push(TokenKind::String, std::move(value), start);
  }

  std::string_view text_;
  std::vector<Diagnostic>& diags_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view text, std::vector<Diagnostic>& diagnostics) {
  return Lexer(text, diagnostics).run();
}

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::Var: return "variable";
    case TokenKind::Int: return "integer";
    case TokenKind::Float: return "float";
    case TokenKind::String: return "string";
    case TokenKind::Time: return "time";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Assign: return "':='";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::Pipe: return "'|'";
    case TokenKind::Dot: return "'.'";
    case TokenKind::PathDot: return "path '.'";
    case TokenKind::DotDot: return "'..'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Equals: return "'='";
    case TokenKind::Op: return "operator";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

}  // namespace cas::cdl
