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

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dbnet/common/box.h"
#include "dbnet/common/value.h"

namespace dbnet {

struct Expr;

struct Literal {
  Value value;
  bool operator==(const Literal&) const = default;
};

// `name` or `qualifier.name`. Unqualified references resolve to a column of
// the row in scope first, then to a variable.
struct ColumnRef {
  std::string qualifier;
  std::string name;
  bool operator==(const ColumnRef&) const = default;
};

// `:name`, always a variable.
struct VarRef {
  std::string name;
  bool operator==(const VarRef&) const = default;
};

enum class UnaryOp { Neg, Not };

enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Unary {
  UnaryOp op;
  Box<Expr> operand;
  bool operator==(const Unary&) const = default;
};

struct Binary {
  BinaryOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const Binary&) const = default;
};

struct IsNull {
  Box<Expr> operand;
  bool negated = false;
  bool operator==(const IsNull&) const = default;
};

struct Expr {
  std::variant<Literal, ColumnRef, VarRef, Unary, Binary, IsNull> node;
  bool operator==(const Expr&) const = default;
};

inline Expr lit(Value v) { return Expr{Literal{std::move(v)}}; }
inline Expr col(std::string name, std::string qualifier = {}) {
  return Expr{ColumnRef{std::move(qualifier), std::move(name)}};
}
inline Expr bin(BinaryOp op, Expr lhs, Expr rhs) {
  return Expr{Binary{op, std::move(lhs), std::move(rhs)}};
}

std::string_view op_symbol(BinaryOp op);

// Canonical, fully parenthesised source text; reparses to an equal tree.
std::string to_source(const Expr& e);
std::string quote_text(std::string_view s);

// Calls `fn` for every ColumnRef / VarRef in the tree.
void visit_refs(const Expr& e, const std::function<void(const ColumnRef&)>& on_column,
                const std::function<void(const VarRef&)>& on_var);

}  // namespace dbnet
