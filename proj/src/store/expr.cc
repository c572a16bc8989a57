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

#include "dbnet/store/expr.h"

namespace dbnet {

std::string_view op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "AND";
    case BinaryOp::Or: return "OR";
  }
  return "?";
}

std::string quote_text(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

namespace {

std::string literal_source(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Null: return "NULL";
    case ValueKind::Bool: return v.as_bool() ? "TRUE" : "FALSE";
    case ValueKind::Text: return quote_text(v.as_text());
    case ValueKind::Int:
      // The parser folds `-<number>` into a negative literal.
      return v.as_int() < 0 ? "(" + v.to_string() + ")" : v.to_string();
    case ValueKind::Float: return v.as_float() < 0 ? "(" + v.to_string() + ")" : v.to_string();
    case ValueKind::Timestamp: return std::to_string(v.as_timestamp().micros);
  }
  return "NULL";
}

struct SourcePrinter {
  std::string operator()(const Literal& l) const { return literal_source(l.value); }
  std::string operator()(const ColumnRef& c) const {
    return c.qualifier.empty() ? c.name : c.qualifier + "." + c.name;
  }
  std::string operator()(const VarRef& v) const { return ":" + v.name; }
  std::string operator()(const Unary& u) const {
    return u.op == UnaryOp::Neg ? "(-(" + to_source(*u.operand) + "))"
                                : "(NOT " + to_source(*u.operand) + ")";
  }
  std::string operator()(const Binary& b) const {
    return "(" + to_source(*b.lhs) + " " + std::string(op_symbol(b.op)) + " " +
           to_source(*b.rhs) + ")";
  }
  std::string operator()(const IsNull& n) const {
    return "(" + to_source(*n.operand) + (n.negated ? " IS NOT NULL)" : " IS NULL)");
  }
};

}  // namespace

std::string to_source(const Expr& e) { return std::visit(SourcePrinter{}, e.node); }

void visit_refs(const Expr& e, const std::function<void(const ColumnRef&)>& on_column,
                const std::function<void(const VarRef&)>& on_var) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ColumnRef>) {
          if (on_column) on_column(n);
        } else if constexpr (std::is_same_v<T, VarRef>) {
          if (on_var) on_var(n);
        } else if constexpr (std::is_same_v<T, Unary>) {
          visit_refs(*n.operand, on_column, on_var);
        } else if constexpr (std::is_same_v<T, Binary>) {
          visit_refs(*n.lhs, on_column, on_var);
          visit_refs(*n.rhs, on_column, on_var);
        } else if constexpr (std::is_same_v<T, IsNull>) {
          visit_refs(*n.operand, on_column, on_var);
        }
      },
      e.node);
}

}  // namespace dbnet
