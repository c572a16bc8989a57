// Copyright 2026 The dbnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dbnet/store/sql_parser.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "dbnet/common/error.h"

namespace dbnet {

namespace {

constexpr std::array<std::string_view, 40> kReserved = {
    "PROC",   "BEGIN", "END",    "DECLARE", "SET",   "IF",       "THEN",   "ELSIF",
    "ELSE",   "FOR",   "IN",     "LOOP",    "INSERT", "INTO",    "VALUES", "UPDATE",
    "DELETE", "FROM",  "WHERE",  "SELECT",  "GROUP", "BY",       "JOIN",   "ON",
    "AS",     "CALL",  "EXTERNAL", "RETURN", "RAISE", "AND",     "OR",     "NOT",
    "IS",     "NULL",  "TRUE",   "FALSE",   "LIMIT", "ORDER",    "HAVING", "DISTINCT"};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::String: return "string " + quote_text(t.text);
    default: return "'" + t.text + "'";
  }
}

}  // namespace

bool is_reserved(std::string_view word) {
  std::string u = upper(word);
  return std::find(kReserved.begin(), kReserved.end(), u) != kReserved.end();
}

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int column = 1;
  size_t i = 0;
  auto bump = [&](size_t n) {
    for (size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
  };
  auto parse_error = [&](const std::string& what) {
    fail(ErrorKind::ParseError,
         "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what,
         "{\"line\":" + std::to_string(line) + ",\"column\":" + std::to_string(column) + "}");
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(1);
      continue;
    }
    if (c == '-' && i + 1 < src.size() && src[i + 1] == '-') {
      while (i < src.size() && src[i] != '\n') bump(1);
      continue;
    }
    Token tok;
    tok.line = line;
    tok.column = column;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      tok.kind = TokenKind::Ident;
      tok.text = std::string(src.substr(i, j - i));
      bump(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      bool is_float = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        is_float = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          is_float = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      tok.kind = is_float ? TokenKind::Float : TokenKind::Int;
      tok.text = std::string(src.substr(i, j - i));
      bump(j - i);
    } else if (c == '\'') {
      std::string text;
      size_t j = i + 1;
      bool closed = false;
      while (j < src.size()) {
        if (src[j] == '\'') {
          if (j + 1 < src.size() && src[j + 1] == '\'') {
            text += '\'';
            j += 2;
            continue;
          }
          closed = true;
          ++j;
          break;
        }
        text += src[j++];
      }
      if (!closed) parse_error("unterminated string literal");
      tok.kind = TokenKind::String;
      tok.text = std::move(text);
      bump(j - i);
    } else {
      static constexpr std::array<std::string_view, 4> kTwo = {"!=", "<>", "<=", ">="};
      std::string_view rest = src.substr(i);
      auto two = std::find_if(kTwo.begin(), kTwo.end(),
                              [&](std::string_view s) { return rest.substr(0, 2) == s; });
      if (two != kTwo.end()) {
        tok.text = std::string(*two == "<>" ? "!=" : *two);
        bump(2);
      } else if (std::string_view("(),;:.=<>+-*/").find(c) != std::string_view::npos) {
        tok.text = std::string(1, c);
        bump(1);
      } else {
        parse_error(std::string("unexpected character '") + c + "'");
      }
      tok.kind = TokenKind::Symbol;
    }
    out.push_back(std::move(tok));
  }
  Token end;
  end.kind = TokenKind::End;
  end.line = line;
  end.column = column;
  out.push_back(end);
  return out;
}

SqlParser::SqlParser(std::string_view source) : tokens_(tokenize(source)) {}

const Token& SqlParser::peek(size_t ahead) const {
  size_t idx = std::min(pos_ + ahead, tokens_.size() - 1);
  return tokens_[idx];
}

const Token& SqlParser::advance() {
  const Token& t = tokens_[pos_];
  if (pos_ + 1 < tokens_.size()) ++pos_;
  return t;
}

bool SqlParser::at_keyword(std::string_view kw, size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::Ident && upper(t.text) == kw;
}

bool SqlParser::accept_keyword(std::string_view kw) {
  if (!at_keyword(kw)) return false;
  advance();
  return true;
}

void SqlParser::expect_keyword(std::string_view kw) {
  if (!accept_keyword(kw)) error_expected(kw);
}

bool SqlParser::at_symbol(std::string_view sym, size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::Symbol && t.text == sym;
}

bool SqlParser::accept_symbol(std::string_view sym) {
  if (!at_symbol(sym)) return false;
  advance();
  return true;
}

void SqlParser::expect_symbol(std::string_view sym) {
  if (!accept_symbol(sym)) error_expected("'" + std::string(sym) + "'");
}

bool SqlParser::at_identifier(size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind == TokenKind::Ident && !is_reserved(t.text);
}

std::string SqlParser::expect_identifier(std::string_view what) {
  if (!at_identifier()) error_expected(what);
  return advance().text;
}

void SqlParser::error_expected(std::string_view expected) const {
  const Token& t = peek();
  fail(ErrorKind::ParseError,
       "line " + std::to_string(t.line) + ", column " + std::to_string(t.column) +
           ": expected " + std::string(expected) + ", found " + describe(t),
       "{\"line\":" + std::to_string(t.line) + ",\"column\":" + std::to_string(t.column) +
           ",\"expected\":\"" + std::string(expected) + "\"}");
}

Expr SqlParser::parse_standalone_expression() {
  Expr e = parse_expr();
  if (!at_end()) error_expected("end of expression");
  return e;
}

SqlStatement SqlParser::parse_standalone_statement() {
  SqlStatement s = parse_sql_statement();
  accept_symbol(";");
  if (!at_end()) error_expected("end of statement");
  return s;
}

Expr SqlParser::parse_expr() { return parse_or(); }

Expr SqlParser::parse_or() {
  Expr lhs = parse_and();
  while (accept_keyword("OR")) lhs = bin(BinaryOp::Or, std::move(lhs), parse_and());
  return lhs;
}

Expr SqlParser::parse_and() {
  Expr lhs = parse_not();
  while (accept_keyword("AND")) lhs = bin(BinaryOp::And, std::move(lhs), parse_not());
  return lhs;
}

Expr SqlParser::parse_not() {
  if (accept_keyword("NOT")) return Expr{Unary{UnaryOp::Not, parse_not()}};
  return parse_comparison();
}

Expr SqlParser::parse_comparison() {
  Expr lhs = parse_additive();
  if (accept_keyword("IS")) {
    bool negated = accept_keyword("NOT");
    expect_keyword("NULL");
    return Expr{IsNull{std::move(lhs), negated}};
  }
  static const std::array<std::pair<std::string_view, BinaryOp>, 6> kOps = {{
      {"=", BinaryOp::Eq},
      {"!=", BinaryOp::Ne},
      {"<", BinaryOp::Lt},
      {"<=", BinaryOp::Le},
      {">", BinaryOp::Gt},
      {">=", BinaryOp::Ge},
  }};
  for (const auto& [sym, op] : kOps) {
    if (accept_symbol(sym)) return bin(op, std::move(lhs), parse_additive());
  }
  return lhs;
}

Expr SqlParser::parse_additive() {
  Expr lhs = parse_multiplicative();
  for (;;) {
    if (accept_symbol("+")) {
      lhs = bin(BinaryOp::Add, std::move(lhs), parse_multiplicative());
    } else if (accept_symbol("-")) {
      lhs = bin(BinaryOp::Sub, std::move(lhs), parse_multiplicative());
    } else {
      return lhs;
    }
  }
}

Expr SqlParser::parse_multiplicative() {
  Expr lhs = parse_unary();
  for (;;) {
    if (accept_symbol("*")) {
      lhs = bin(BinaryOp::Mul, std::move(lhs), parse_unary());
    } else if (accept_symbol("/")) {
      lhs = bin(BinaryOp::Div, std::move(lhs), parse_unary());
    } else {
      return lhs;
    }
  }
}

Expr SqlParser::parse_unary() {
  if (at_symbol("-")) {
    advance();
    // `-<number>` folds into a negative literal.
    if (peek().kind == TokenKind::Int || peek().kind == TokenKind::Float) {
      Expr e = parse_primary();
      auto& l = std::get<Literal>(e.node);
      l.value = l.value.kind() == ValueKind::Int ? Value(-l.value.as_int()) : Value(-l.value.as_float());
      return e;
    }
    return Expr{Unary{UnaryOp::Neg, parse_unary()}};
  }
  return parse_primary();
}

Expr SqlParser::parse_primary() {
  const Token& t = peek();
  if (t.kind == TokenKind::Int) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc()) error_expected("an integer literal in range");
    advance();
    return lit(Value(v));
  }
  if (t.kind == TokenKind::Float) {
    double v = std::stod(t.text);
    advance();
    return lit(Value(v));
  }
  if (t.kind == TokenKind::String) {
    std::string text = t.text;
    advance();
    return lit(Value(std::move(text)));
  }
  if (accept_keyword("TRUE")) return lit(Value(true));
  if (accept_keyword("FALSE")) return lit(Value(false));
  if (accept_keyword("NULL")) return lit(Value::null());
  if (accept_symbol(":")) return Expr{VarRef{expect_identifier("a variable name")}};
  if (accept_symbol("(")) {
    Expr e = parse_expr();
    expect_symbol(")");
    return e;
  }
  if (at_identifier()) return Expr{parse_column_ref()};
  error_expected("an expression");
}

ColumnRef SqlParser::parse_column_ref() {
  std::string first = expect_identifier("a column name");
  if (at_symbol(".")) {
    advance();
    return ColumnRef{std::move(first), expect_identifier("a column name after '.'")};
  }
  return ColumnRef{{}, std::move(first)};
}

TableRef SqlParser::parse_table_ref() {
  std::string first = expect_identifier("a table name");
  if (accept_symbol(".")) return TableRef{std::move(first), expect_identifier("a table name")};
  return TableRef{{}, std::move(first)};
}

std::string SqlParser::parse_optional_alias() {
  if (accept_keyword("AS")) return expect_identifier("an alias");
  if (at_identifier()) return advance().text;
  return {};
}

Projection SqlParser::parse_projection() {
  Projection p;
  if (at_identifier() && at_symbol("(", 1)) {
    auto fn = parse_aggregate(peek().text);
    if (!fn) error_expected("an aggregate (AVG, SUM, COUNT, MIN, MAX)");
    advance();
    advance();
    p.aggregate = fn;
    if (!accept_symbol("*")) p.column = parse_column_ref();
    expect_symbol(")");
  } else {
    p.column = parse_column_ref();
  }
  if (accept_keyword("AS")) p.alias = expect_identifier("an alias");
  return p;
}

SelectQuery SqlParser::parse_select(std::vector<std::string>* into) {
  expect_keyword("SELECT");
  SelectQuery q;
  if (!accept_symbol("*")) {
    do {
      q.projections.push_back(parse_projection());
    } while (accept_symbol(","));
  }
  if (into && accept_keyword("INTO")) {
    do {
      into->push_back(expect_identifier("a variable name"));
    } while (accept_symbol(","));
  }
  expect_keyword("FROM");
  q.table = parse_table_ref();
  q.alias = parse_optional_alias();
  if (accept_keyword("JOIN")) {
    JoinClause j;
    j.table = parse_table_ref();
    j.alias = parse_optional_alias();
    expect_keyword("ON");
    j.left = parse_column_ref();
    expect_symbol("=");
    j.right = parse_column_ref();
    q.join = std::move(j);
  }
  if (accept_keyword("WHERE")) q.where = parse_expr();
  if (accept_keyword("GROUP")) {
    expect_keyword("BY");
    do {
      q.group_by.push_back(parse_column_ref());
    } while (accept_symbol(","));
  }
  return q;
}

InsertStmt SqlParser::parse_insert() {
  expect_keyword("INSERT");
  expect_keyword("INTO");
  InsertStmt s;
  s.table = parse_table_ref();
  expect_symbol("(");
  do {
    s.columns.push_back(expect_identifier("a column name"));
  } while (accept_symbol(","));
  expect_symbol(")");
  expect_keyword("VALUES");
  expect_symbol("(");
  do {
    s.values.push_back(parse_expr());
  } while (accept_symbol(","));
  expect_symbol(")");
  if (s.columns.size() != s.values.size()) {
    fail(ErrorKind::ParseError, "INSERT into " + s.table.qualified() + " lists " +
                                    std::to_string(s.columns.size()) + " columns but " +
                                    std::to_string(s.values.size()) + " values");
  }
  return s;
}

UpdateStmt SqlParser::parse_update() {
  expect_keyword("UPDATE");
  UpdateStmt s;
  s.table = parse_table_ref();
  expect_keyword("SET");
  do {
    Assignment a;
    a.column = expect_identifier("a column name");
    expect_symbol("=");
    a.value = parse_expr();
    s.assignments.push_back(std::move(a));
  } while (accept_symbol(","));
  if (accept_keyword("WHERE")) s.where = parse_expr();
  return s;
}

DeleteStmt SqlParser::parse_delete() {
  expect_keyword("DELETE");
  expect_keyword("FROM");
  DeleteStmt s;
  s.table = parse_table_ref();
  if (accept_keyword("WHERE")) s.where = parse_expr();
  return s;
}

bool SqlParser::at_statement_keyword() const {
  return at_keyword("SELECT") || at_keyword("INSERT") || at_keyword("UPDATE") ||
         at_keyword("DELETE");
}

SqlStatement SqlParser::parse_sql_statement() {
  if (at_keyword("SELECT")) return parse_select(nullptr);
  if (at_keyword("INSERT")) return parse_insert();
  if (at_keyword("UPDATE")) return parse_update();
  if (at_keyword("DELETE")) return parse_delete();
  error_expected("SELECT, INSERT, UPDATE or DELETE");
}

Expr parse_expression(std::string_view source) {
  SqlParser p(source);
  return p.parse_standalone_expression();
}

SqlStatement parse_sql(std::string_view source) {
  SqlParser p(source);
  return p.parse_standalone_statement();
}

}  // namespace dbnet
