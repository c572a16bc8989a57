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

#include "dbnet/store/catalog.h"

#include <algorithm>
#include <cctype>
#include <set>

#include "dbnet/common/error.h"

namespace dbnet {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || u == '_';
  });
}

TableRef TableRef::parse(std::string_view text) {
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return {{}, std::string(text)};
  return {std::string(text.substr(0, dot)), std::string(text.substr(dot + 1))};
}

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::NotNull: return "NotNull";
    case ConstraintKind::PrimaryKey: return "PrimaryKey";
    case ConstraintKind::Unique: return "Unique";
    case ConstraintKind::Check: return "Check";
  }
  return "?";
}

std::string_view to_string(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::Node: return "Node";
    case DeviceKind::AutoScaler: return "AutoScaler";
    case DeviceKind::LoadBalancer: return "LoadBalancer";
  }
  return "?";
}

std::optional<DeviceKind> parse_device_kind(std::string_view s) {
  if (s == "Node") return DeviceKind::Node;
  if (s == "AutoScaler") return DeviceKind::AutoScaler;
  if (s == "LoadBalancer") return DeviceKind::LoadBalancer;
  return std::nullopt;
}

bool ColumnDef::has(ConstraintKind k) const {
  return std::any_of(constraints.begin(), constraints.end(),
                     [k](const Constraint& c) { return c.kind == k; });
}

const ColumnDef* TableDef::column(std::string_view col) const {
  for (const auto& c : columns) {
    if (c.name == col) return &c;
  }
  return nullptr;
}

const ColumnDef* TableDef::primary_key() const {
  for (const auto& c : columns) {
    if (c.has(ConstraintKind::PrimaryKey)) return &c;
  }
  return nullptr;
}

void validate_table_def(const TableDef& def) {
  if (!is_identifier(def.schema)) {
    fail(ErrorKind::InvalidIdentifier, "invalid schema name '" + def.schema + "'");
  }
  if (!is_identifier(def.name)) {
    fail(ErrorKind::InvalidIdentifier, "invalid table name '" + def.name + "'");
  }
  if (def.columns.empty()) fail(ErrorKind::InvalidColumn, def.qualified() + " has no columns");
  std::set<std::string> names;
  int primary_keys = 0;
  for (const auto& c : def.columns) {
    if (!is_identifier(c.name)) {
      fail(ErrorKind::InvalidIdentifier, "invalid column name '" + c.name + "'");
    }
    if (!names.insert(c.name).second) {
      fail(ErrorKind::InvalidColumn, "duplicate column '" + c.name + "' in " + def.qualified());
    }
    if (c.kind == ValueKind::Null) {
      fail(ErrorKind::InvalidColumn, "column '" + c.name + "' has no value kind");
    }
    for (const auto& k : c.constraints) {
      if (k.kind == ConstraintKind::PrimaryKey) ++primary_keys;
      if (k.kind == ConstraintKind::Check && !k.check) {
        fail(ErrorKind::InvalidColumn, "Check constraint on '" + c.name + "' has no expression");
      }
    }
  }
  if (primary_keys > 1) {
    fail(ErrorKind::InvalidColumn, def.qualified() + " declares more than one primary key");
  }
  for (const auto& c : def.columns) {
    for (const auto& k : c.constraints) {
      if (k.kind != ConstraintKind::Check) continue;
      visit_refs(
          *k.check,
          [&](const ColumnRef& ref) {
            bool own_qualifier = ref.qualifier.empty() || ref.qualifier == def.name;
            if (!own_qualifier || !names.count(ref.name)) {
              fail(ErrorKind::InvalidColumn, "Check on '" + c.name +
                                                 "' references unknown column '" + ref.name + "'");
            }
          },
          [&](const VarRef& ref) {
            fail(ErrorKind::InvalidColumn, "Check on '" + c.name + "' references variable :" +
                                               ref.name);
          });
    }
  }
}

ColumnDef column(std::string name, ValueKind kind, std::vector<Constraint> constraints) {
  return ColumnDef{std::move(name), kind, std::move(constraints)};
}

Constraint not_null() { return {ConstraintKind::NotNull, std::nullopt}; }
Constraint primary_key() { return {ConstraintKind::PrimaryKey, std::nullopt}; }
Constraint unique() { return {ConstraintKind::Unique, std::nullopt}; }
Constraint check(Expr e) { return {ConstraintKind::Check, std::move(e)}; }

}  // namespace dbnet
