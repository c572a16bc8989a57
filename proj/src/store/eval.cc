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

#include "dbnet/store/eval.h"

#include <cmath>

#include "dbnet/common/error.h"

namespace dbnet {

const Value* RowScope::lookup_column(std::string_view qualifier, std::string_view name) const {
  bool mine = qualifier.empty() || qualifier == alias_ || qualifier == def_.name ||
              qualifier == def_.qualified();
  if (mine) {
    if (auto it = cells_.find(std::string(name)); it != cells_.end()) return &it->second;
    if (!qualifier.empty() && def_.column(name)) {
      static const Value kNull;
      return &kNull;
    }
  }
  return parent_ ? parent_->lookup_column(qualifier, name) : nullptr;
}

const Value* RowScope::lookup_var(std::string_view name) const {
  return parent_ ? parent_->lookup_var(name) : nullptr;
}

const Value* JoinScope::lookup_column(std::string_view qualifier, std::string_view name) const {
  if (qualifier.empty()) {
    bool in_left = left_def_.column(name) != nullptr;
    bool in_right = right_def_.column(name) != nullptr;
    if (in_left && in_right) {
      fail(ErrorKind::MalformedQuery, "ambiguous column '" + std::string(name) + "' in join");
    }
    if (in_left) return left_.lookup_column({}, name);
    if (in_right) return right_.lookup_column({}, name);
    return parent_ ? parent_->lookup_column(qualifier, name) : nullptr;
  }
  // RowScope delegates to its parent when the qualifier is not its own; the
  // left/right scopes here are built without parents, so try both first.
  if (const Value* v = left_.lookup_column(qualifier, name)) return v;
  if (const Value* v = right_.lookup_column(qualifier, name)) return v;
  return parent_ ? parent_->lookup_column(qualifier, name) : nullptr;
}

const Value* JoinScope::lookup_var(std::string_view name) const {
  return parent_ ? parent_->lookup_var(name) : nullptr;
}

std::optional<bool> truth(const Value& v) {
  if (v.is_null()) return std::nullopt;
  if (v.kind() != ValueKind::Bool) {
    fail(ErrorKind::TypeMismatch, "expected a boolean condition, got " +
                                      std::string(kind_name(v.kind())) + " " + v.to_string());
  }
  return v.as_bool();
}

namespace {

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return Value::null();
  // Timestamp arithmetic: ts - ts -> Int micros, ts +/- Int -> ts.
  if (a.kind() == ValueKind::Timestamp || b.kind() == ValueKind::Timestamp) {
    if (op == BinaryOp::Sub && a.kind() == ValueKind::Timestamp &&
        b.kind() == ValueKind::Timestamp) {
      return Value(a.as_timestamp().micros - b.as_timestamp().micros);
    }
    if ((op == BinaryOp::Add || op == BinaryOp::Sub) && a.kind() == ValueKind::Timestamp &&
        b.kind() == ValueKind::Int) {
      int64_t d = op == BinaryOp::Add ? b.as_int() : -b.as_int();
      return Value(Timestamp{a.as_timestamp().micros + d});
    }
    fail(ErrorKind::TypeMismatch, "unsupported timestamp arithmetic " +
                                      std::string(op_symbol(op)));
  }
  if (!a.is_numeric() || !b.is_numeric()) {
    fail(ErrorKind::TypeMismatch, "arithmetic on " + std::string(kind_name(a.kind())) + " and " +
                                      std::string(kind_name(b.kind())));
  }
  if (a.kind() == ValueKind::Int && b.kind() == ValueKind::Int) {
    int64_t x = a.as_int();
    int64_t y = b.as_int();
    switch (op) {
      case BinaryOp::Add: return Value(x + y);
      case BinaryOp::Sub: return Value(x - y);
      case BinaryOp::Mul: return Value(x * y);
      case BinaryOp::Div:
        if (y == 0) fail(ErrorKind::RuntimeError, "division by zero");
        return Value(x / y);
      default: break;
    }
  }
  double x = a.as_float();
  double y = b.as_float();
  switch (op) {
    case BinaryOp::Add: return Value(x + y);
    case BinaryOp::Sub: return Value(x - y);
    case BinaryOp::Mul: return Value(x * y);
    case BinaryOp::Div:
      if (y == 0.0) fail(ErrorKind::RuntimeError, "division by zero");
      return Value(x / y);
    default: break;
  }
  fail(ErrorKind::Internal, "bad arithmetic operator");
}

Value comparison(BinaryOp op, const Value& a, const Value& b) {
  auto c = compare(a, b);
  if (!c) return Value::null();
  switch (op) {
    case BinaryOp::Eq: return Value(*c == 0);
    case BinaryOp::Ne: return Value(*c != 0);
    case BinaryOp::Lt: return Value(*c < 0);
    case BinaryOp::Le: return Value(*c <= 0);
    case BinaryOp::Gt: return Value(*c > 0);
    case BinaryOp::Ge: return Value(*c >= 0);
    default: break;
  }
  fail(ErrorKind::Internal, "bad comparison operator");
}

struct Evaluator {
  const Scope& scope;

  Value operator()(const Literal& l) const { return l.value; }

  Value operator()(const ColumnRef& c) const {
    if (const Value* v = scope.lookup_column(c.qualifier, c.name)) return *v;
    if (c.qualifier.empty()) {
      if (const Value* v = scope.lookup_var(c.name)) return *v;
    }
    std::string name = c.qualifier.empty() ? c.name : c.qualifier + "." + c.name;
    fail(ErrorKind::UnknownColumn, "unknown column or variable '" + name + "'");
  }

  Value operator()(const VarRef& r) const {
    if (const Value* v = scope.lookup_var(r.name)) return *v;
    fail(ErrorKind::UnknownColumn, "unknown variable ':" + r.name + "'");
  }

  Value operator()(const Unary& u) const {
    Value v = evaluate(*u.operand, scope);
    if (u.op == UnaryOp::Not) {
      auto t = truth(v);
      return t ? Value(!*t) : Value::null();
    }
    if (v.is_null()) return v;
    if (v.kind() == ValueKind::Int) return Value(-v.as_int());
    if (v.kind() == ValueKind::Float) return Value(-v.as_float());
    fail(ErrorKind::TypeMismatch, "cannot negate " + std::string(kind_name(v.kind())));
  }

  Value operator()(const Binary& b) const {
    if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
      auto l = truth(evaluate(*b.lhs, scope));
      bool is_and = b.op == BinaryOp::And;
      // Short-circuit on the dominating value.
      if (l && *l != is_and) return Value(*l);
      auto r = truth(evaluate(*b.rhs, scope));
      if (r && *r != is_and) return Value(*r);
      if (!l || !r) return Value::null();
      return Value(is_and);
    }
    Value l = evaluate(*b.lhs, scope);
    Value r = evaluate(*b.rhs, scope);
    switch (b.op) {
      case BinaryOp::Add:
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div: return arithmetic(b.op, l, r);
      default: return comparison(b.op, l, r);
    }
  }

  Value operator()(const IsNull& n) const {
    bool null = evaluate(*n.operand, scope).is_null();
    return Value(n.negated ? !null : null);
  }
};

}  // namespace

Value evaluate(const Expr& e, const Scope& scope) { return std::visit(Evaluator{scope}, e.node); }

bool holds(const Expr& e, const Scope& scope) {
  auto t = truth(evaluate(e, scope));
  return t.value_or(false);
}

}  // namespace dbnet
