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

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dbnet/common/value.h"
#include "dbnet/store/catalog.h"
#include "dbnet/store/expr.h"
#include "dbnet/store/query.h"

namespace dbnet::policy {

struct Stmt;
using Block = std::vector<Stmt>;

struct DeclareStmt {
  std::string name;
  ValueKind kind = ValueKind::Int;
  bool operator==(const DeclareStmt&) const = default;
};

struct SetStmt {
  std::string name;
  Expr value;
  bool operator==(const SetStmt&) const = default;
};

struct IfBranch {
  Expr condition;
  Block body;
  bool operator==(const IfBranch&) const;
};

struct IfStmt {
  std::vector<IfBranch> branches;  // IF, then each ELSIF
  std::optional<Block> otherwise;
  bool operator==(const IfStmt&) const;
};

struct ForStmt {
  std::string var;
  SelectQuery query;
  Block body;
  bool operator==(const ForStmt&) const;
};

// INSERT / UPDATE / DELETE.
struct DmlStmt {
  SqlStatement statement;
  bool operator==(const DmlStmt&) const = default;
};

struct SelectIntoStmt {
  SelectQuery query;
  std::vector<std::string> targets;
  bool operator==(const SelectIntoStmt&) const = default;
};

struct CallStmt {
  std::string procedure;
  std::vector<Expr> args;
  bool operator==(const CallStmt&) const = default;
};

struct ExternalStmt {
  std::string name;
  std::vector<Expr> args;
  std::optional<std::string> into;
  bool operator==(const ExternalStmt&) const = default;
};

struct ReturnStmt {
  std::vector<Expr> values;
  bool operator==(const ReturnStmt&) const = default;
};

struct RaiseStmt {
  std::string message;
  bool operator==(const RaiseStmt&) const = default;
};

struct Stmt {
  std::variant<DeclareStmt, SetStmt, IfStmt, ForStmt, DmlStmt, SelectIntoStmt, CallStmt,
               ExternalStmt, ReturnStmt, RaiseStmt>
      node;
  bool operator==(const Stmt&) const = default;
};

struct Param {
  std::string name;
  ValueKind kind = ValueKind::Int;
  bool operator==(const Param&) const = default;
};

struct ProcedureDef {
  std::string name;
  std::vector<Param> params;
  Block body;
  std::string source_text;

  // Structural equality ignores the source text.
  bool same_structure(const ProcedureDef& other) const {
    return name == other.name && params == other.params && body == other.body;
  }
};

enum class TriggerEvent { AfterInsert, AfterUpdate, AfterDelete };

std::string_view to_string(TriggerEvent e);
std::optional<TriggerEvent> parse_trigger_event(std::string_view s);

struct TriggerDef {
  std::string name;
  TableRef table;  // always schema-qualified once registered
  TriggerEvent event = TriggerEvent::AfterInsert;
  std::optional<Expr> when;  // over OLD.col / NEW.col
  std::string procedure;
  int64_t order_key = 0;
};

}  // namespace dbnet::policy
