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
#include <string>
#include <string_view>
#include <vector>

#include "dbnet/common/value.h"
#include "dbnet/store/expr.h"

namespace dbnet {

bool is_identifier(std::string_view s);

// Table reference; `schema` may be empty when the name is unqualified and
// is resolved against the catalog.
struct TableRef {
  std::string schema;
  std::string name;

  static TableRef parse(std::string_view text);
  std::string qualified() const { return schema.empty() ? name : schema + "." + name; }
  auto operator<=>(const TableRef&) const = default;
};

enum class ConstraintKind { NotNull, PrimaryKey, Unique, Check };

std::string_view to_string(ConstraintKind kind);

struct Constraint {
  ConstraintKind kind = ConstraintKind::NotNull;
  std::optional<Expr> check;  // Check only
  bool operator==(const Constraint&) const = default;
};

struct ColumnDef {
  std::string name;
  ValueKind kind = ValueKind::Int;
  std::vector<Constraint> constraints;

  bool has(ConstraintKind k) const;
  bool not_null() const { return has(ConstraintKind::NotNull) || has(ConstraintKind::PrimaryKey); }
  bool unique() const { return has(ConstraintKind::Unique) || has(ConstraintKind::PrimaryKey); }
  bool operator==(const ColumnDef&) const = default;
};

// Simulated device families a table can mirror. Rows of a device-backed
// table are pushed to the fleet through the outbox on commit.
enum class DeviceKind { Node, AutoScaler, LoadBalancer };

std::string_view to_string(DeviceKind kind);
std::optional<DeviceKind> parse_device_kind(std::string_view s);

struct TableDef {
  std::string schema;
  std::string name;
  std::vector<ColumnDef> columns;
  std::optional<DeviceKind> device;
  bool cdc_exempt = false;

  bool device_backed() const { return device.has_value(); }
  TableRef ref() const { return {schema, name}; }
  std::string qualified() const { return schema + "." + name; }
  const ColumnDef* column(std::string_view name) const;
  const ColumnDef* primary_key() const;
  bool operator==(const TableDef&) const = default;
};

// Validates identifiers, column uniqueness, the single-primary-key rule and
// that Check expressions reference only this table's columns. Throws
// InvalidIdentifier or InvalidColumn.
void validate_table_def(const TableDef& def);

// Builder helpers, mostly for setup code and tests.
ColumnDef column(std::string name, ValueKind kind, std::vector<Constraint> constraints = {});
Constraint not_null();
Constraint primary_key();
Constraint unique();
Constraint check(Expr e);

}  // namespace dbnet
