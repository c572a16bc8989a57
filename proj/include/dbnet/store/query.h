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
#include <utility>
#include <variant>
#include <vector>

#include "dbnet/store/catalog.h"
#include "dbnet/store/eval.h"
#include "dbnet/store/expr.h"
#include "dbnet/store/snapshot.h"

namespace dbnet {

enum class AggregateFn { Avg, Sum, Count, Min, Max };

std::string_view to_string(AggregateFn fn);
std::optional<AggregateFn> parse_aggregate(std::string_view name);

// A plain column, or an aggregate over a column (`column` empty means
// COUNT(*)).
struct Projection {
  std::optional<AggregateFn> aggregate;
  std::optional<ColumnRef> column;
  std::string alias;

  std::string output_name() const;
  bool operator==(const Projection&) const = default;
};

struct JoinClause {
  TableRef table;
  std::string alias;
  ColumnRef left;
  ColumnRef right;
  bool operator==(const JoinClause&) const = default;
};

struct SelectQuery {
  TableRef table;
  std::string alias;
  std::optional<JoinClause> join;
  std::optional<Expr> where;
  std::vector<ColumnRef> group_by;
  std::vector<Projection> projections;  // empty means SELECT *
  bool operator==(const SelectQuery&) const = default;
};

struct InsertStmt {
  TableRef table;
  std::vector<std::string> columns;
  std::vector<Expr> values;
  bool operator==(const InsertStmt&) const = default;
};

struct Assignment {
  std::string column;
  Expr value;
  bool operator==(const Assignment&) const = default;
};

struct UpdateStmt {
  TableRef table;
  std::vector<Assignment> assignments;
  std::optional<Expr> where;
  bool operator==(const UpdateStmt&) const = default;
};

struct DeleteStmt {
  TableRef table;
  std::optional<Expr> where;
  bool operator==(const DeleteStmt&) const = default;
};

using SqlStatement = std::variant<SelectQuery, InsertStmt, UpdateStmt, DeleteStmt>;

struct ResultSet {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  bool operator==(const ResultSet&) const = default;
};

// Output column names a query will produce (after validation).
std::vector<std::string> output_columns(const Snapshot& snap, const SelectQuery& q);

// Checks references and the grouping rules without touching rows. Throws
// UnknownColumn / UnknownTable / MalformedQuery. `is_var` reports names the
// caller's scope can satisfy (procedure variables, OLD/NEW, loop rows).
void validate_select(const Snapshot& snap, const SelectQuery& q,
                     const std::function<bool(const ColumnRef&)>& outer_known = {});

// Evaluates a select over `snap`. Grouped output is ordered by group key
// ascending; ungrouped output by row_id (left row, then right row for joins).
// Aggregates skip Nulls; COUNT of nothing is 0, the others Null.
ResultSet run_select(const Snapshot& snap, const SelectQuery& q, const Scope* outer = nullptr);

// Canonical source text for statements (round-trips through the parser).
std::string to_source(const SelectQuery& q);
std::string to_source(const InsertStmt& s);
std::string to_source(const UpdateStmt& s);
std::string to_source(const DeleteStmt& s);
std::string to_source(const SqlStatement& s);

// Tables read / written by a statement, as written (unresolved).
void collect_tables(const SelectQuery& q, std::vector<TableRef>& reads);

}  // namespace dbnet
