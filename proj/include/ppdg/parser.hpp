#pragma once

// MiniLang lexer, recursive-descent parser and definite-assignment check.
// Grammar: docs/minilang.ebnf.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppdg/ast.hpp"

namespace ppdg {

struct SourceProgram {
  std::string name;
  std::string text;
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UseBeforeAssignment, DuplicateInput };

  ParseError(Kind kind, int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        kind_(kind),
        line_(line),
        column_(column) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  Kind kind_;
  int line_;
  int column_;
};

struct Token {
  enum class Kind { Identifier, Keyword, Integer, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int column = 1;
};

namespace detail {

inline bool is_keyword(std::string_view s) {
  return s == "input" || s == "if" || s == "else" || s == "while" || s == "print";
}

// A '-' immediately followed by a digit is part of an integer literal unless
// the previous token ends an operand (identifier, literal or ')').
inline bool ends_operand(const std::vector<Token>& toks) {
  if (toks.empty()) return false;
  const Token& t = toks.back();
  return t.kind == Token::Kind::Identifier || t.kind == Token::Kind::Integer ||
         (t.kind == Token::Kind::Punct && t.text == ")");
}

}  // namespace detail

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> toks;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto syntax = [&](const std::string& msg) {
    return ParseError(ParseError::Kind::Syntax, line, col, msg);
  };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = col;

    const bool negative_literal = c == '-' && i + 1 < src.size() &&
                                  std::isdigit(static_cast<unsigned char>(src[i + 1])) &&
                                  !detail::ends_operand(toks);
    if (std::isdigit(static_cast<unsigned char>(c)) || negative_literal) {
      std::size_t j = negative_literal ? i + 1 : i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      const std::string_view digits = src.substr(negative_literal ? i + 1 : i,
                                                 j - (negative_literal ? i + 1 : i));
      std::uint64_t magnitude = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), magnitude);
      const std::uint64_t limit = negative_literal
                                      ? std::uint64_t{1} << 63
                                      : static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
      if (ec != std::errc{} || magnitude > limit) throw syntax("integer literal out of range");
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        throw syntax("malformed integer literal");
      }
      tok.kind = Token::Kind::Integer;
      tok.text = std::string(src.substr(i, j - i));
      tok.value = negative_literal ? static_cast<std::int64_t>(std::uint64_t{0} - magnitude)
                                   : static_cast<std::int64_t>(magnitude);
      advance(j - i);
      toks.push_back(std::move(tok));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      tok.text = std::string(src.substr(i, j - i));
      tok.kind = detail::is_keyword(tok.text) ? Token::Kind::Keyword : Token::Kind::Identifier;
      advance(j - i);
      toks.push_back(std::move(tok));
      continue;
    }
    static constexpr std::string_view kTwoChar[] = {"<=", ">=", "==", "!=", "&&", "||"};
    bool matched = false;
    if (i + 1 < src.size()) {
      for (std::string_view op : kTwoChar) {
        if (src.substr(i, 2) == op) {
          tok.kind = Token::Kind::Punct;
          tok.text = std::string(op);
          advance(2);
          toks.push_back(std::move(tok));
          matched = true;
          break;
        }
      }
    }
    if (matched) continue;
    if (std::string_view("+-*/%<>=!(){};,").find(c) != std::string_view::npos) {
      tok.kind = Token::Kind::Punct;
      tok.text = std::string(1, c);
      advance(1);
      toks.push_back(std::move(tok));
      continue;
    }
    throw syntax(std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.column = col;
  toks.push_back(end);
  return toks;
}

/// First read of a variable that is not definitely assigned on every path.
struct AssignmentViolation {
  StmtId stmt;
  std::string variable;
};

namespace detail {

class DefiniteAssignment {
 public:
  std::optional<AssignmentViolation> check(const Ast& ast) {
    std::set<std::string> assigned(ast.inputs.begin(), ast.inputs.end());
    block(ast.statements, assigned);
    return violation_;
  }

 private:
  void reads(const Stmt& s, const std::set<std::string>& assigned) {
    if (violation_) return;
    for_each_variable_read(s.expr, [&](const std::string& v) {
      if (!violation_ && !assigned.contains(v)) violation_ = AssignmentViolation{s.id, v};
    });
  }

  void block(const std::vector<Stmt>& stmts, std::set<std::string>& assigned) {
    for (const Stmt& s : stmts) {
      reads(s, assigned);
      switch (s.kind) {
        case Stmt::Kind::Assign:
          assigned.insert(s.target);
          break;
        case Stmt::Kind::Print:
          break;
        case Stmt::Kind::If: {
          std::set<std::string> then_set = assigned;
          std::set<std::string> else_set = assigned;
          block(s.body, then_set);
          block(s.else_body, else_set);
          for (const std::string& v : then_set) {
            if (else_set.contains(v)) assigned.insert(v);
          }
          break;
        }
        case Stmt::Kind::While: {
          // The body may run zero times: nothing it assigns survives the loop.
          std::set<std::string> body_set = assigned;
          block(s.body, body_set);
          break;
        }
      }
    }
  }

  std::optional<AssignmentViolation> violation_;
};

}  // namespace detail

/// Returns the first (pre-order) read that is not preceded by an assignment
/// on every path, or nullopt when the program is well formed.
inline std::optional<AssignmentViolation> check_definite_assignment(const Ast& ast) {
  return detail::DefiniteAssignment{}.check(ast);
}

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Ast parse_program(bool check_assignment = true) {
    Ast ast;
    std::set<std::string> declared;
    while (peek_keyword("input")) {
      next();
      do {
        const Token& name = expect_identifier();
        if (!declared.insert(name.text).second) {
          throw ParseError(ParseError::Kind::DuplicateInput, name.line, name.column,
                           "duplicate input declaration '" + name.text + "'");
        }
        ast.inputs.push_back(name.text);
      } while (accept(","));
      expect(";");
    }
    while (peek().kind != Token::Kind::End) ast.statements.push_back(statement());
    ast.statement_count = next_id_;

    if (!check_assignment) return ast;
    if (auto v = check_definite_assignment(ast)) {
      const Token& at = positions_[static_cast<std::size_t>(v->stmt.value - 1)];
      throw ParseError(ParseError::Kind::UseBeforeAssignment, at.line, at.column,
                       "variable '" + v->variable + "' may be read before assignment");
    }
    return ast;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool peek_punct(std::string_view p) const {
    return peek().kind == Token::Kind::Punct && peek().text == p;
  }
  bool peek_keyword(std::string_view k) const {
    return peek().kind == Token::Kind::Keyword && peek().text == k;
  }
  bool accept(std::string_view p) {
    if (!peek_punct(p)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    const std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(ParseError::Kind::Syntax, t.line, t.column, msg + ", found " + found);
  }

  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }

  const Token& expect_identifier() {
    if (peek().kind != Token::Kind::Identifier) fail("expected identifier");
    return next();
  }

  Stmt begin_stmt(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    s.id = StmtId{++next_id_};
    positions_.push_back(peek());
    return s;
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> out;
    while (!peek_punct("}")) {
      if (peek().kind == Token::Kind::End) fail("expected '}'");
      out.push_back(statement());
    }
    next();
    return out;
  }

  Stmt statement() {
    if (peek_keyword("if")) {
      Stmt s = begin_stmt(Stmt::Kind::If);
      next();
      expect("(");
      s.expr = expression();
      expect(")");
      s.body = block();
      if (peek_keyword("else")) {
        next();
        s.else_body = block();
      }
      return s;
    }
    if (peek_keyword("while")) {
      Stmt s = begin_stmt(Stmt::Kind::While);
      next();
      expect("(");
      s.expr = expression();
      expect(")");
      s.body = block();
      return s;
    }
    if (peek_keyword("print")) {
      Stmt s = begin_stmt(Stmt::Kind::Print);
      next();
      expect("(");
      s.expr = expression();
      expect(")");
      expect(";");
      return s;
    }
    if (peek().kind == Token::Kind::Identifier) {
      Stmt s = begin_stmt(Stmt::Kind::Assign);
      s.target = next().text;
      expect("=");
      s.expr = expression();
      expect(";");
      return s;
    }
    fail("expected statement");
  }

  Expr expression() { return binary_level(1); }

  static std::optional<BinaryOp> binary_op_at(const Token& t, int level) {
    if (t.kind != Token::Kind::Punct) return std::nullopt;
    static constexpr BinaryOp kAll[] = {
        BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Mod,
        BinaryOp::Lt,  BinaryOp::Le,  BinaryOp::Gt,  BinaryOp::Ge,  BinaryOp::Eq,
        BinaryOp::Ne,  BinaryOp::And, BinaryOp::Or};
    for (BinaryOp op : kAll) {
      if (precedence(op) == level && spelling(op) == t.text) return op;
    }
    return std::nullopt;
  }

  // Left-associative binary levels 1 (||) .. 6 (* / %).
  Expr binary_level(int level) {
    if (level > 6) return unary();
    Expr lhs = binary_level(level + 1);
    while (auto op = binary_op_at(peek(), level)) {
      next();
      Expr rhs = binary_level(level + 1);
      lhs = Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Expr unary() {
    if (accept("-")) return Expr::unary(UnaryOp::Neg, unary());
    if (accept("!")) return Expr::unary(UnaryOp::Not, unary());
    return primary();
  }

  Expr primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::Integer) return Expr::literal(next().value);
    if (t.kind == Token::Kind::Identifier) return Expr::variable(next().text);
    if (accept("(")) {
      Expr e = expression();
      expect(")");
      return e;
    }
    fail("expected expression");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int next_id_ = 0;
  std::vector<Token> positions_;  // first token of each statement, by id
};

}  // namespace detail

/// Parses MiniLang source. Throws ParseError with a 1-based line/column.
inline Ast parse(std::string_view text) {
  return detail::Parser(tokenize(text)).parse_program();
}

/// Syntax only; skips the definite-assignment check.
inline Ast parse_unchecked(std::string_view text) {
  return detail::Parser(tokenize(text)).parse_program(false);
}

inline Ast parse(const SourceProgram& source) {
  if (source.text.empty()) {
    throw ParseError(ParseError::Kind::Syntax, 1, 1, "empty program text");
  }
  return parse(source.text);
}

}  // namespace ppdg
