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

#include "dbnet/store/query.h"

#include <algorithm>
#include <map>

#include "dbnet/common/error.h"

namespace dbnet {

std::string_view to_string(AggregateFn fn) {
  switch (fn) {
    case AggregateFn::Avg: return "AVG";
    case AggregateFn::Sum: return "SUM";
    case AggregateFn::Count: return "COUNT";
    case AggregateFn::Min: return "MIN";
    case AggregateFn::Max: return "MAX";
  }
  return "?";
}

std::optional<AggregateFn> parse_aggregate(std::string_view name) {
  std::string upper;
  for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "AVG") return AggregateFn::Avg;
  if (upper == "SUM") return AggregateFn::Sum;
  if (upper == "COUNT") return AggregateFn::Count;
  if (upper == "MIN") return AggregateFn::Min;
  if (upper == "MAX") return AggregateFn::Max;
  return std::nullopt;
}

namespace {

std::string ref_text(const ColumnRef& c) {
  return c.qualifier.empty() ? c.name : c.qualifier + "." + c.name;
}

// The one or two tables a query reads, with the names they answer to.
struct Source {
  const Table* table = nullptr;
  std::string alias;

  bool answers_to(std::string_view q) const {
    const auto& def = table->def();
    return q == alias || q == def.name || q == def.qualified();
  }
};

struct Sources {
  Source left;
  std::optional<Source> right;

  // side 0 = left, 1 = right; nullopt when not a source column.
  std::optional<std::pair<int, const ColumnDef*>> find(const ColumnRef& ref) const {
    if (ref.qualifier.empty()) {
      const ColumnDef* l = left.table->def().column(ref.name);
      const ColumnDef* r = right ? right->table->def().column(ref.name) : nullptr;
      if (l && r) fail(ErrorKind::MalformedQuery, "ambiguous column '" + ref.name + "' in join");
      if (l) return std::make_pair(0, l);
      if (r) return std::make_pair(1, r);
      return std::nullopt;
    }
    if (left.answers_to(ref.qualifier)) {
      if (const ColumnDef* c = left.table->def().column(ref.name)) return std::make_pair(0, c);
      fail(ErrorKind::UnknownColumn, "unknown column '" + ref_text(ref) + "'");
    }
    if (right && right->answers_to(ref.qualifier)) {
      if (const ColumnDef* c = right->table->def().column(ref.name)) return std::make_pair(1, c);
      fail(ErrorKind::UnknownColumn, "unknown column '" + ref_text(ref) + "'");
    }
    return std::nullopt;
  }
};

Sources bind_sources(const Snapshot& snap, const SelectQuery& q) {
  Sources s;
  s.left = {&snap.table(q.table), q.alias};
  if (q.join) s.right = Source{&snap.table(q.join->table), q.join->alias};
  return s;
}

void require_known(const Sources& src, const ColumnRef& ref,
                   const std::function<bool(const ColumnRef&)>& outer_known) {
  if (src.find(ref)) return;
  if (outer_known && outer_known(ref)) return;
  fail(ErrorKind::UnknownColumn, "unknown column '" + ref_text(ref) + "'");
}

std::vector<std::string> star_columns(const Sources& src) {
  std::vector<std::string> out;
  auto add = [&](const Source& s, bool qualify) {
    std::string prefix = s.alias.empty() ? s.table->def().name : s.alias;
    for (const auto& c : s.table->def().columns) out.push_back(qualify ? prefix + "." + c.name : c.name);
  };
  add(src.left, src.right.has_value());
  if (src.right) add(*src.right, true);
  return out;
}

struct Accumulator {
  int64_t count = 0;  // non-null inputs, or rows for COUNT(*)
  bool any_float = false;
  int64_t int_sum = 0;
  double float_sum = 0.0;
  Value min;
  Value max;

  void add(const Value& v) {
    if (v.is_null()) return;
    ++count;
    if (v.is_numeric()) {
      if (v.kind() == ValueKind::Float) any_float = true;
      if (v.kind() == ValueKind::Int) int_sum += v.as_int();
      float_sum += v.as_float();
    }
    if (min.is_null() || *compare(v, min) < 0) min = v;
    if (max.is_null() || *compare(v, max) > 0) max = v;
  }

  Value result(AggregateFn fn) const {
    switch (fn) {
      case AggregateFn::Count: return Value(count);
      case AggregateFn::Sum:
        if (count == 0) return Value::null();
        return any_float ? Value(float_sum) : Value(int_sum);
      case AggregateFn::Avg:
        if (count == 0) return Value::null();
        return Value(float_sum / static_cast<double>(count));
      case AggregateFn::Min: return min;
      case AggregateFn::Max: return max;
    }
    return Value::null();
  }
};

bool is_aggregate_query(const SelectQuery& q) {
  if (!q.group_by.empty()) return true;
  for (const auto& p : q.projections) {
    if (p.aggregate) return true;
  }
  return false;
}

}  // namespace

std::string Projection::output_name() const {
  if (!alias.empty()) return alias;
  if (!aggregate) return column ? column->name : "?";
  return std::string(to_string(*aggregate)) + "(" + (column ? ref_text(*column) : "*") + ")";
}

void validate_select(const Snapshot& snap, const SelectQuery& q,
                     const std::function<bool(const ColumnRef&)>& outer_known) {
  Sources src = bind_sources(snap, q);
  if (q.join) {
    auto l = src.find(q.join->left);
    auto r = src.find(q.join->right);
    if (!l || !r) fail(ErrorKind::UnknownColumn, "join condition references unknown column");
    if (l->first == r->first) {
      fail(ErrorKind::MalformedQuery, "join condition must compare one column from each table");
    }
  }
  if (q.where) {
    visit_refs(
        *q.where, [&](const ColumnRef& ref) { require_known(src, ref, outer_known); },
        [&](const VarRef& ref) {
          if (!outer_known || !outer_known(ColumnRef{{}, ref.name})) {
            fail(ErrorKind::UnknownColumn, "unknown variable ':" + ref.name + "'");
          }
        });
  }
  std::vector<std::pair<int, const ColumnDef*>> groups;
  for (const auto& g : q.group_by) {
    auto found = src.find(g);
    if (!found) fail(ErrorKind::UnknownColumn, "unknown GROUP BY column '" + ref_text(g) + "'");
    groups.push_back(*found);
  }
  bool any_aggregate = false;
  bool any_plain = false;
  for (const auto& p : q.projections) {
    if (p.column) {
      auto found = src.find(*p.column);
      if (!found) fail(ErrorKind::UnknownColumn, "unknown column '" + ref_text(*p.column) + "'");
      if (p.aggregate && (*p.aggregate == AggregateFn::Avg || *p.aggregate == AggregateFn::Sum) &&
          found->second->kind != ValueKind::Int && found->second->kind != ValueKind::Float) {
        fail(ErrorKind::MalformedQuery, std::string(to_string(*p.aggregate)) +
                                            " needs a numeric column, got " +
                                            ref_text(*p.column));
      }
      if (!p.aggregate && !q.group_by.empty() &&
          std::find(groups.begin(), groups.end(), *found) == groups.end()) {
        fail(ErrorKind::MalformedQuery,
             "column '" + ref_text(*p.column) + "' must appear in GROUP BY or an aggregate");
      }
    } else if (!p.aggregate || *p.aggregate != AggregateFn::Count) {
      fail(ErrorKind::MalformedQuery, "only COUNT accepts *");
    }
    (p.aggregate ? any_aggregate : any_plain) = true;
  }
  if (q.projections.empty() && !q.group_by.empty()) {
    fail(ErrorKind::MalformedQuery, "SELECT * cannot be grouped");
  }
  if (q.group_by.empty() && any_aggregate && any_plain) {
    fail(ErrorKind::MalformedQuery, "mixing aggregates and plain columns requires GROUP BY");
  }
}

std::vector<std::string> output_columns(const Snapshot& snap, const SelectQuery& q) {
  if (q.projections.empty()) return star_columns(bind_sources(snap, q));
  std::vector<std::string> out;
  for (const auto& p : q.projections) out.push_back(p.output_name());
  return out;
}

ResultSet run_select(const Snapshot& snap, const SelectQuery& q, const Scope* outer) {
  std::function<bool(const ColumnRef&)> outer_known;
  if (outer) {
    outer_known = [outer](const ColumnRef& ref) {
      return outer->lookup_column(ref.qualifier, ref.name) != nullptr ||
             (ref.qualifier.empty() && outer->lookup_var(ref.name) != nullptr);
    };
  }
  validate_select(snap, q, outer_known);
  Sources src = bind_sources(snap, q);
  ResultSet result;
  result.columns = output_columns(snap, q);

  const TableDef& ldef = src.left.table->def();
  const TableDef* rdef = src.right ? &src.right->table->def() : nullptr;
  std::string lalias = src.left.alias.empty() ? ldef.name : src.left.alias;
  std::string ralias = rdef ? (src.right->alias.empty() ? rdef->name : src.right->alias) : "";

  // Orient the join condition so `lkey` names a left column.
  std::string lkey;
  std::string rkey;
  if (q.join) {
    auto l = src.find(q.join->left);
    bool swapped = l->first == 1;
    lkey = swapped ? q.join->right.name : q.join->left.name;
    rkey = swapped ? q.join->left.name : q.join->right.name;
  }

  bool aggregate = is_aggregate_query(q);
  std::map<std::vector<Value>, std::vector<Accumulator>,
           bool (*)(const std::vector<Value>&, const std::vector<Value>&)>
      groups(static_cast<bool (*)(const std::vector<Value>&, const std::vector<Value>&)>(
          &total_less));
  if (aggregate && q.group_by.empty()) groups.emplace(std::vector<Value>{}, std::vector<Accumulator>(q.projections.size()));

  auto consume = [&](const Scope& scope) {
    if (q.where && !holds(*q.where, scope)) return;
    if (!aggregate) {
      std::vector<Value> row;
      if (q.projections.empty()) {
        for (const auto& c : ldef.columns) row.push_back(evaluate(col(c.name, lalias), scope));
        if (rdef) {
          for (const auto& c : rdef->columns) row.push_back(evaluate(col(c.name, ralias), scope));
        }
      } else {
        for (const auto& p : q.projections) row.push_back(evaluate(Expr{*p.column}, scope));
      }
      result.rows.push_back(std::move(row));
      return;
    }
    std::vector<Value> key;
    for (const auto& g : q.group_by) key.push_back(evaluate(Expr{g}, scope));
    auto [it, inserted] = groups.try_emplace(std::move(key), q.projections.size());
    for (size_t i = 0; i < q.projections.size(); ++i) {
      const auto& p = q.projections[i];
      if (!p.aggregate) continue;
      if (p.column) {
        it->second[i].add(evaluate(Expr{*p.column}, scope));
      } else {
        it->second[i].add(Value(int64_t{1}));
      }
    }
  };

  for (const auto& [lid, lrow] : src.left.table->rows()) {
    RowScope left_scope(ldef, lalias, lrow->cells, outer);
    if (!rdef) {
      consume(left_scope);
      continue;
    }
    const Value& lv = lrow->cells.at(lkey);
    if (lv.is_null()) continue;
    RowScope left_bare(ldef, lalias, lrow->cells);
    for (const auto& [rid, rrow] : src.right->table->rows()) {
      auto c = compare(lv, rrow->cells.at(rkey));
      if (!c || *c != 0) continue;
      RowScope right_bare(*rdef, ralias, rrow->cells);
      JoinScope scope(left_bare, right_bare, ldef, *rdef, outer);
      consume(scope);
    }
  }

  if (aggregate) {
    for (const auto& [key, accs] : groups) {
      std::vector<Value> row;
      size_t g = 0;
      for (size_t i = 0; i < q.projections.size(); ++i) {
        const auto& p = q.projections[i];
        if (p.aggregate) {
          row.push_back(accs[i].result(*p.aggregate));
          continue;
        }
        // Plain projections are group columns; find the matching key slot.
        for (g = 0; g < q.group_by.size(); ++g) {
          if (q.group_by[g].name == p.column->name &&
              (p.column->qualifier.empty() || q.group_by[g].qualifier.empty() ||
               p.column->qualifier == q.group_by[g].qualifier)) {
            break;
          }
        }
        row.push_back(g < key.size() ? key[g] : Value::null());
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

namespace {

std::string table_source(const TableRef& t, const std::string& alias) {
  return alias.empty() ? t.qualified() : t.qualified() + " AS " + alias;
}

}  // namespace

std::string to_source(const SelectQuery& q) {
  std::string out = "SELECT ";
  if (q.projections.empty()) out += "*";
  for (size_t i = 0; i < q.projections.size(); ++i) {
    const auto& p = q.projections[i];
    if (i) out += ", ";
    if (p.aggregate) {
      out += std::string(to_string(*p.aggregate)) + "(" + (p.column ? ref_text(*p.column) : "*") + ")";
    } else {
      out += ref_text(*p.column);
    }
    if (!p.alias.empty()) out += " AS " + p.alias;
  }
  out += " FROM " + table_source(q.table, q.alias);
  if (q.join) {
    out += " JOIN " + table_source(q.join->table, q.join->alias) + " ON " +
           ref_text(q.join->left) + " = " + ref_text(q.join->right);
  }
  if (q.where) out += " WHERE " + to_source(*q.where);
  if (!q.group_by.empty()) {
    out += " GROUP BY ";
    for (size_t i = 0; i < q.group_by.size(); ++i) {
      if (i) out += ", ";
      out += ref_text(q.group_by[i]);
    }
  }
  return out;
}

std::string to_source(const InsertStmt& s) {
  std::string out = "INSERT INTO " + s.table.qualified() + " (";
  for (size_t i = 0; i < s.columns.size(); ++i) out += (i ? ", " : "") + s.columns[i];
  out += ") VALUES (";
  for (size_t i = 0; i < s.values.size(); ++i) out += (i ? ", " : "") + to_source(s.values[i]);
  return out + ")";
}

std::string to_source(const UpdateStmt& s) {
  std::string out = "UPDATE " + s.table.qualified() + " SET ";
  for (size_t i = 0; i < s.assignments.size(); ++i) {
    out += (i ? ", " : "") + s.assignments[i].column + " = " + to_source(s.assignments[i].value);
  }
  if (s.where) out += " WHERE " + to_source(*s.where);
  return out;
}

std::string to_source(const DeleteStmt& s) {
  std::string out = "DELETE FROM " + s.table.qualified();
  if (s.where) out += " WHERE " + to_source(*s.where);
  return out;
}

std::string to_source(const SqlStatement& s) {
  return std::visit([](const auto& stmt) { return to_source(stmt); }, s);
}

void collect_tables(const SelectQuery& q, std::vector<TableRef>& reads) {
  reads.push_back(q.table);
  if (q.join) reads.push_back(q.join->table);
}

}  // namespace dbnet
