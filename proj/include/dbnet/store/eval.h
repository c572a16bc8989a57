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

#include <optional>
#include <string_view>

#include "dbnet/common/value.h"
#include "dbnet/store/catalog.h"
#include "dbnet/store/expr.h"

namespace dbnet {

// Name environment for expression evaluation. Scopes chain: a row scope
// delegates anything it does not own to its parent (procedure variables,
// OLD/NEW, loop rows).
class Scope {
 public:
  virtual ~Scope() = default;
  // nullptr when the scope (and its parents) do not know the column.
  virtual const Value* lookup_column(std::string_view qualifier, std::string_view name) const = 0;
  virtual const Value* lookup_var(std::string_view name) const = 0;
};

class EmptyScope final : public Scope {
 public:
  const Value* lookup_column(std::string_view, std::string_view) const override { return nullptr; }
  const Value* lookup_var(std::string_view) const override { return nullptr; }
};

// One row of one table, addressable unqualified or by table name / alias.
class RowScope final : public Scope {
 public:
  RowScope(const TableDef& def, std::string_view alias, const Cells& cells,
           const Scope* parent = nullptr)
      : def_(def), alias_(alias), cells_(cells), parent_(parent) {}

  const Value* lookup_column(std::string_view qualifier, std::string_view name) const override;
  const Value* lookup_var(std::string_view name) const override;

 private:
  const TableDef& def_;
  std::string_view alias_;
  const Cells& cells_;
  const Scope* parent_;
};

// A joined pair of rows. Unqualified names must be unambiguous.
class JoinScope final : public Scope {
 public:
  JoinScope(const RowScope& left, const RowScope& right, const TableDef& left_def,
            const TableDef& right_def, const Scope* parent)
      : left_(left), right_(right), left_def_(left_def), right_def_(right_def), parent_(parent) {}

  const Value* lookup_column(std::string_view qualifier, std::string_view name) const override;
  const Value* lookup_var(std::string_view name) const override;

 private:
  const RowScope& left_;
  const RowScope& right_;
  const TableDef& left_def_;
  const TableDef& right_def_;
  const Scope* parent_;
};

// Three-valued evaluation. Arithmetic or comparison with Null yields Null;
// AND/OR follow SQL's Kleene logic. Division by zero raises RuntimeError.
// Unresolvable names raise UnknownColumn.
Value evaluate(const Expr& e, const Scope& scope);

// Truth of a predicate value: Bool -> value, Null -> nullopt; anything else
// is a TypeMismatch.
std::optional<bool> truth(const Value& v);

// True only when the predicate evaluates to true (unknown excludes the row).
bool holds(const Expr& e, const Scope& scope);

}  // namespace dbnet
