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

#include "dbnet/store/table.h"

#include "dbnet/common/error.h"
#include "dbnet/store/eval.h"

namespace dbnet {

Table::Table(TableDef def) : def_(std::move(def)) {}

const Row* Table::find(RowId id) const {
  auto it = rows_.find(id);
  return it == rows_.end() ? nullptr : it->second.get();
}

std::string Table::key_of(const Value& v) {
  // Primary key columns have a fixed kind, so the display form is unique
  // within a column once coerced.
  return std::to_string(static_cast<int>(v.kind())) + ":" + v.to_string();
}

std::optional<RowId> Table::find_by_key(const Value& key) const {
  const ColumnDef* pk = def_.primary_key();
  if (!pk || key.is_null()) return std::nullopt;
  auto it = pk_index_.find(key_of(coerce_to(key, pk->kind)));
  if (it == pk_index_.end()) return std::nullopt;
  return it->second;
}

Cells Table::normalize(const Cells& cells) const {
  for (const auto& [name, value] : cells) {
    if (!def_.column(name)) {
      fail(ErrorKind::UnknownColumn, "table " + def_.qualified() + " has no column '" + name + "'");
    }
  }
  Cells out;
  for (const auto& c : def_.columns) {
    auto it = cells.find(c.name);
    Value v = it == cells.end() ? Value::null() : it->second;
    try {
      out.emplace(c.name, coerce_to(v, c.kind));
    } catch (const Error& e) {
      fail(ErrorKind::TypeMismatch, def_.qualified() + "." + c.name + ": " + e.what());
    }
  }
  return out;
}

void Table::check_constraints(const Cells& cells, std::optional<RowId> self) const {
  for (const auto& c : def_.columns) {
    const Value& v = cells.at(c.name);
    if (c.not_null() && v.is_null()) {
      fail(ErrorKind::ConstraintViolation,
           def_.qualified() + "." + c.name + " violates NotNull");
    }
    for (const auto& k : c.constraints) {
      if (k.kind != ConstraintKind::Check) continue;
      RowScope scope(def_, def_.name, cells);
      // SQL semantics: a check fails only when it is false, not unknown.
      auto t = truth(evaluate(*k.check, scope));
      if (t && !*t) {
        fail(ErrorKind::ConstraintViolation, def_.qualified() + "." + c.name +
                                                 " violates Check " + to_source(*k.check) +
                                                 " with value " + v.to_string());
      }
    }
    if (!c.unique() || v.is_null()) continue;
    if (c.has(ConstraintKind::PrimaryKey)) {
      auto it = pk_index_.find(key_of(v));
      if (it != pk_index_.end() && (!self || it->second != *self)) {
        fail(ErrorKind::ConstraintViolation, def_.qualified() + "." + c.name +
                                                 " violates PrimaryKey: duplicate " +
                                                 v.to_string());
      }
      continue;
    }
    for (const auto& [id, row] : rows_) {
      if (self && id == *self) continue;
      auto cmp = compare(row->cells.at(c.name), v);
      if (cmp && *cmp == 0) {
        fail(ErrorKind::ConstraintViolation,
             def_.qualified() + "." + c.name + " violates Unique: duplicate " + v.to_string());
      }
    }
  }
}

RowId Table::insert(const Cells& cells) {
  Cells row = normalize(cells);
  check_constraints(row, std::nullopt);
  RowId id = next_row_id_++;
  if (const ColumnDef* pk = def_.primary_key()) pk_index_[key_of(row.at(pk->name))] = id;
  rows_.emplace(id, std::make_shared<const Row>(Row{id, std::move(row)}));
  return id;
}

void Table::insert_with_id(RowId id, const Cells& cells) {
  if (rows_.count(id)) {
    fail(ErrorKind::ConstraintViolation, def_.qualified() + " row " + std::to_string(id) +
                                             " already exists");
  }
  Cells row = normalize(cells);
  check_constraints(row, std::nullopt);
  if (const ColumnDef* pk = def_.primary_key()) pk_index_[key_of(row.at(pk->name))] = id;
  rows_.emplace(id, std::make_shared<const Row>(Row{id, std::move(row)}));
  if (id >= next_row_id_) next_row_id_ = id + 1;
}

Cells Table::update(RowId id, const Cells& cells) {
  auto it = rows_.find(id);
  if (it == rows_.end()) fail(ErrorKind::Internal, "update of missing row " + std::to_string(id));
  Cells row = normalize(cells);
  check_constraints(row, id);
  Cells old = it->second->cells;
  if (const ColumnDef* pk = def_.primary_key()) {
    pk_index_.erase(key_of(old.at(pk->name)));
    pk_index_[key_of(row.at(pk->name))] = id;
  }
  it->second = std::make_shared<const Row>(Row{id, std::move(row)});
  return old;
}

Cells Table::erase(RowId id) {
  auto it = rows_.find(id);
  if (it == rows_.end()) fail(ErrorKind::Internal, "erase of missing row " + std::to_string(id));
  Cells old = it->second->cells;
  if (const ColumnDef* pk = def_.primary_key()) pk_index_.erase(key_of(old.at(pk->name)));
  rows_.erase(it);
  return old;
}

}  // namespace dbnet
