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

#include "dbnet/policy/parser.h"

#include <algorithm>
#include <set>

#include "dbnet/common/error.h"
#include "dbnet/store/sql_parser.h"

namespace dbnet::policy {

bool IfBranch::operator==(const IfBranch&) const = default;
bool IfStmt::operator==(const IfStmt&) const = default;
bool ForStmt::operator==(const ForStmt&) const = default;

std::string_view to_string(TriggerEvent e) {
  switch (e) {
    case TriggerEvent::AfterInsert: return "AfterInsert";
    case TriggerEvent::AfterUpdate: return "AfterUpdate";
    case TriggerEvent::AfterDelete: return "AfterDelete";
  }
  return "?";
}

std::optional<TriggerEvent> parse_trigger_event(std::string_view s) {
  std::string lower;
  for (char c : s) {
    if (c != '_' && c != ' ') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (lower == "afterinsert" || lower == "insert") return TriggerEvent::AfterInsert;
  if (lower == "afterupdate" || lower == "update") return TriggerEvent::AfterUpdate;
  if (lower == "afterdelete" || lower == "delete") return TriggerEvent::AfterDelete;
  return std::nullopt;
}

namespace {

class ProcedureParser : public SqlParser {
 public:
  using SqlParser::SqlParser;

  ProcedureDef parse() {
    ProcedureDef def;
    expect_keyword("PROC");
    def.name = expect_identifier("a procedure name");
    expect_symbol("(");
    std::set<std::string> seen;
    if (!accept_symbol(")")) {
      do {
        Param p;
        p.name = expect_identifier("a parameter name or ')'");
        if (!seen.insert(p.name).second) error_expected("a new parameter name (duplicate '" + p.name + "')");
        expect_symbol(":");
        p.kind = parse_kind_token();
        def.params.push_back(std::move(p));
      } while (accept_symbol(","));
      expect_symbol(")");
    }
    expect_keyword("BEGIN");
    def.body = parse_block({"END"});
    expect_keyword("END");
    accept_symbol(";");
    if (!at_end()) error_expected("end of input after END");
    return def;
  }

 private:
  ValueKind parse_kind_token() {
    const Token& t = peek();
    if (t.kind == TokenKind::Ident) {
      if (auto k = parse_kind(t.text); k && *k != ValueKind::Null) {
        advance();
        return *k;
      }
    }
    error_expected("a kind (INT, FLOAT, TEXT, BOOL, TS)");
  }

  bool at_any(std::initializer_list<std::string_view> kws) const {
    return std::any_of(kws.begin(), kws.end(), [&](std::string_view k) { return at_keyword(k); });
  }

  Block parse_block(std::initializer_list<std::string_view> terminators) {
    Block out;
    while (!at_end() && !at_any(terminators)) out.push_back(parse_stmt());
    return out;
  }

  std::vector<Expr> parse_arg_list() {
    std::vector<Expr> args;
    expect_symbol("(");
    if (!accept_symbol(")")) {
      do {
        args.push_back(parse_expr());
      } while (accept_symbol(","));
      expect_symbol(")");
    }
    return args;
  }

  Stmt parse_stmt() {
    if (accept_keyword("DECLARE")) {
      DeclareStmt s;
      s.name = expect_identifier("a variable name");
      expect_symbol(":");
      s.kind = parse_kind_token();
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (accept_keyword("SET")) {
      SetStmt s;
      s.name = expect_identifier("a variable name");
      expect_symbol("=");
      s.value = parse_expr();
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (accept_keyword("IF")) {
      IfStmt s;
      do {
        IfBranch b;
        b.condition = parse_expr();
        expect_keyword("THEN");
        b.body = parse_block({"ELSIF", "ELSE", "END"});
        s.branches.push_back(std::move(b));
      } while (accept_keyword("ELSIF"));
      if (accept_keyword("ELSE")) s.otherwise = parse_block({"END"});
      expect_keyword("END");
      expect_keyword("IF");
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (accept_keyword("FOR")) {
      ForStmt s;
      s.var = expect_identifier("a loop variable");
      expect_keyword("IN");
      expect_symbol("(");
      s.query = parse_select(nullptr);
      expect_symbol(")");
      expect_keyword("LOOP");
      s.body = parse_block({"END"});
      expect_keyword("END");
      expect_keyword("LOOP");
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (at_keyword("SELECT")) {
      Token start = peek();
      SelectIntoStmt s;
      s.query = parse_select(&s.targets);
      if (s.targets.empty()) {
        fail(ErrorKind::ParseError,
             "line " + std::to_string(start.line) + ", column " + std::to_string(start.column) +
                 ": expected INTO after the projection list of a SELECT inside a procedure");
      }
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (at_keyword("INSERT") || at_keyword("UPDATE") || at_keyword("DELETE")) {
      DmlStmt s{parse_sql_statement()};
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (accept_keyword("CALL")) {
      CallStmt s;
      s.procedure = expect_identifier("a procedure name");
      s.args = parse_arg_list();
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (accept_keyword("EXTERNAL")) {
      ExternalStmt s;
      s.name = expect_identifier("an external function name");
      s.args = parse_arg_list();
      if (accept_keyword("INTO")) s.into = expect_identifier("a variable name");
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (accept_keyword("RETURN")) {
      ReturnStmt s;
      if (!at_symbol(";")) {
        do {
          s.values.push_back(parse_expr());
        } while (accept_symbol(","));
      }
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    if (accept_keyword("RAISE")) {
      if (peek().kind != TokenKind::String) error_expected("a message string");
      RaiseStmt s{advance().text};
      expect_symbol(";");
      return Stmt{std::move(s)};
    }
    error_expected("a statement");
  }
};

std::string join_exprs(const std::vector<Expr>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += to_source(xs[i]);
  }
  return out;
}

std::string join_names(const std::vector<std::string>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += xs[i];
  }
  return out;
}

void print_block(const Block& b, int indent, std::string& out) {
  for (const auto& s : b) out += to_source(s, indent);
}

struct StmtPrinter {
  int indent;
  std::string pad() const { return std::string(static_cast<size_t>(indent) * 2, ' '); }

  std::string operator()(const DeclareStmt& s) const {
    return pad() + "DECLARE " + s.name + ": " + std::string(dsl_kind_name(s.kind)) + ";\n";
  }
  std::string operator()(const SetStmt& s) const {
    return pad() + "SET " + s.name + " = " + to_source(s.value) + ";\n";
  }
  std::string operator()(const IfStmt& s) const {
    std::string out;
    for (size_t i = 0; i < s.branches.size(); ++i) {
      out += pad() + (i == 0 ? "IF " : "ELSIF ") + to_source(s.branches[i].condition) + " THEN\n";
      print_block(s.branches[i].body, indent + 1, out);
    }
    if (s.otherwise) {
      out += pad() + "ELSE\n";
      print_block(*s.otherwise, indent + 1, out);
    }
    return out + pad() + "END IF;\n";
  }
  std::string operator()(const ForStmt& s) const {
    std::string out = pad() + "FOR " + s.var + " IN (" + dbnet::to_source(s.query) + ") LOOP\n";
    print_block(s.body, indent + 1, out);
    return out + pad() + "END LOOP;\n";
  }
  std::string operator()(const DmlStmt& s) const {
    return pad() + dbnet::to_source(s.statement) + ";\n";
  }
  std::string operator()(const SelectIntoStmt& s) const {
    std::string text = dbnet::to_source(s.query);
    // Projection lists hold only names and aggregates, so the first FROM
    // keyword ends them.
    size_t at = text.find(" FROM ");
    text.insert(at, " INTO " + join_names(s.targets));
    return pad() + text + ";\n";
  }
  std::string operator()(const CallStmt& s) const {
    return pad() + "CALL " + s.procedure + "(" + join_exprs(s.args) + ");\n";
  }
  std::string operator()(const ExternalStmt& s) const {
    std::string out = pad() + "EXTERNAL " + s.name + "(" + join_exprs(s.args) + ")";
    if (s.into) out += " INTO " + *s.into;
    return out + ";\n";
  }
  std::string operator()(const ReturnStmt& s) const {
    return pad() + (s.values.empty() ? "RETURN" : "RETURN " + join_exprs(s.values)) + ";\n";
  }
  std::string operator()(const RaiseStmt& s) const {
    return pad() + "RAISE " + quote_text(s.message) + ";\n";
  }
};

}  // namespace

ProcedureDef parse_procedure(std::string_view source) {
  ProcedureParser p(source);
  ProcedureDef def = p.parse();
  def.source_text = std::string(source);
  return def;
}

std::string to_source(const Stmt& stmt, int indent) {
  return std::visit(StmtPrinter{indent}, stmt.node);
}

std::string to_source(const ProcedureDef& def) {
  std::string out = "PROC " + def.name + "(";
  for (size_t i = 0; i < def.params.size(); ++i) {
    if (i) out += ", ";
    out += def.params[i].name + ": " + std::string(dsl_kind_name(def.params[i].kind));
  }
  out += ")\nBEGIN\n";
  print_block(def.body, 1, out);
  return out + "END\n";
}

}  // namespace dbnet::policy
