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

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dbnet/store/expr.h"
#include "dbnet/store/query.h"

namespace dbnet {

enum class TokenKind { Ident, Int, Float, String, Symbol, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 1;
  int column = 1;
};

// Splits source into tokens; `--` starts a comment running to end of line.
// Throws ParseError on stray characters or unterminated strings.
std::vector<Token> tokenize(std::string_view source);

// Words that can never be identifiers.
bool is_reserved(std::string_view word);

// Recursive-descent parser for the query subset: expressions, SELECT,
// INSERT, UPDATE and DELETE. The procedure parser extends it.
class SqlParser {
 public:
  explicit SqlParser(std::string_view source);

  Expr parse_standalone_expression();
  SqlStatement parse_standalone_statement();

 protected:
  const Token& peek(size_t ahead = 0) const;
  const Token& advance();
  bool at_end() const { return peek().kind == TokenKind::End; }

  bool at_keyword(std::string_view kw, size_t ahead = 0) const;
  bool accept_keyword(std::string_view kw);
  void expect_keyword(std::string_view kw);
  bool at_symbol(std::string_view sym, size_t ahead = 0) const;
  bool accept_symbol(std::string_view sym);
  void expect_symbol(std::string_view sym);
  std::string expect_identifier(std::string_view what);
  bool at_identifier(size_t ahead = 0) const;
  [[noreturn]] void error_expected(std::string_view expected) const;

  Expr parse_expr();
  TableRef parse_table_ref();
  ColumnRef parse_column_ref();
  // Parses from the SELECT keyword. With `into` non-null an optional
  // `INTO a, b` clause is accepted after the projection list.
  SelectQuery parse_select(std::vector<std::string>* into);
  InsertStmt parse_insert();
  UpdateStmt parse_update();
  DeleteStmt parse_delete();
  bool at_statement_keyword() const;
  SqlStatement parse_sql_statement();

 private:
  Expr parse_or();
  Expr parse_and();
  Expr parse_not();
  Expr parse_comparison();
  Expr parse_additive();
  Expr parse_multiplicative();
  Expr parse_unary();
  Expr parse_primary();
  Projection parse_projection();
  std::string parse_optional_alias();

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

Expr parse_expression(std::string_view source);
SqlStatement parse_sql(std::string_view source);

}  // namespace dbnet
