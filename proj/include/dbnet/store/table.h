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
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>

#include "dbnet/common/value.h"
#include "dbnet/store/catalog.h"

namespace dbnet {

using RowId = int64_t;

struct Row {
  RowId row_id = 0;
  Cells cells;
};

// Rows of one table. Rows are immutable and shared, so copying a Table (as
// a transaction does on first write) copies pointers, not cells.
class Table {
 public:
  explicit Table(TableDef def);

  const TableDef& def() const { return def_; }
  const std::map<RowId, std::shared_ptr<const Row>>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }
  RowId next_row_id() const { return next_row_id_; }

  const Row* find(RowId id) const;
  std::optional<RowId> find_by_key(const Value& key) const;

  // Fills absent columns with Null, coerces kinds, and checks every
  // constraint against the current contents. Throws UnknownColumn,
  // TypeMismatch or ConstraintViolation; the table is unchanged on throw.
  Cells normalize(const Cells& cells) const;

  RowId insert(const Cells& cells);
  // Journal replay and log materialisation: explicit id, no id reuse check
  // beyond collision.
  void insert_with_id(RowId id, const Cells& cells);
  // Returns the previous cells.
  Cells update(RowId id, const Cells& cells);
  Cells erase(RowId id);

 private:
  void check_constraints(const Cells& cells, std::optional<RowId> self) const;
  static std::string key_of(const Value& v);

  TableDef def_;
  std::map<RowId, std::shared_ptr<const Row>> rows_;
  std::unordered_map<std::string, RowId> pk_index_;
  RowId next_row_id_ = 1;
};

}  // namespace dbnet
