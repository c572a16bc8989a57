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

#include "dbnet/policy/resolver.h"

#include <map>

#include "dbnet/common/error.h"

namespace dbnet::policy {

namespace {

bool is_row_qualifier(std::string_view q) { return q == "OLD" || q == "NEW" || q == "old" || q == "new"; }

std::string ref_text(const ColumnRef& c) {
  return c.qualifier.empty() ? c.name : c.qualifier + "." + c.name;
}

[[noreturn]] void unresolved(const std::string& proc, const std::string& what) {
  fail(ErrorKind::ResolutionError, "procedure '" + proc + "': " + what);
}

class Resolver {
 public:
  Resolver(const Snapshot& snap, const ProcedureDef& def) : snap_(snap), def_(def) {
    for (const auto& p : def.params) vars_[p.name] = p.kind;
  }

  void run() { block(def_.body); }

 private:
  bool known(const ColumnRef& ref) const {
    if (ref.qualifier.empty()) return vars_.count(ref.name) > 0;
    if (is_row_qualifier(ref.qualifier)) return true;
    auto it = rows_.find(ref.qualifier);
    if (it == rows_.end()) return false;
    for (const auto& c : it->second) {
      if (c == ref.name) return true;
    }
    return false;
  }

  // Expressions outside SQL see only variables and row variables.
  void expr(const Expr& e) {
    visit_refs(
        e,
        [&](const ColumnRef& ref) {
          if (!known(ref)) unresolved(def_.name, "unknown variable or column '" + ref_text(ref) + "'");
        },
        [&](const VarRef& ref) {
          if (!vars_.count(ref.name)) unresolved(def_.name, "unknown variable ':" + ref.name + "'");
        });
  }

  // Expressions inside UPDATE/DELETE see the target table's columns first.
  void table_expr(const Expr& e, const TableDef& def) {
    visit_refs(
        e,
        [&](const ColumnRef& ref) {
          bool own = ref.qualifier.empty() || ref.qualifier == def.name || ref.qualifier == def.qualified();
          if (own && def.column(ref.name)) return;
          if (!known(ref)) unresolved(def_.name, "unknown column or variable '" + ref_text(ref) + "'");
        },
        [&](const VarRef& ref) {
          if (!vars_.count(ref.name)) unresolved(def_.name, "unknown variable ':" + ref.name + "'");
        });
  }

  const TableDef& table(const TableRef& ref) {
    try {
      return snap_.table(ref).def();
    } catch (const Error& e) {
      unresolved(def_.name, e.what());
    }
  }

  void select(const SelectQuery& q) {
    try {
      validate_select(snap_, q, [&](const ColumnRef& ref) { return known(ref); });
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::ResolutionError) throw;
      unresolved(def_.name, e.what());
    }
  }

  void require_var(const std::string& name) {
    if (!vars_.count(name)) unresolved(def_.name, "assignment to undeclared variable '" + name + "'");
  }

  void block(const Block& b) {
    for (const auto& s : b) std::visit([&](const auto& node) { stmt(node); }, s.node);
  }

  void stmt(const DeclareStmt& s) {
    if (vars_.count(s.name)) unresolved(def_.name, "variable '" + s.name + "' declared twice");
    vars_[s.name] = s.kind;
  }
  void stmt(const SetStmt& s) {
    require_var(s.name);
    expr(s.value);
  }
  void stmt(const IfStmt& s) {
    for (const auto& br : s.branches) {
      expr(br.condition);
      block(br.body);
    }
    if (s.otherwise) block(*s.otherwise);
  }
  void stmt(const ForStmt& s) {
    select(s.query);
    if (rows_.count(s.var) || vars_.count(s.var)) {
      unresolved(def_.name, "loop variable '" + s.var + "' shadows another name");
    }
    std::vector<std::string> cols = output_columns(snap_, s.query);
    // A joined SELECT * yields "alias.col"; expose the bare column too.
    for (auto& c : cols) {
      if (auto dot = c.find('.'); dot != std::string::npos) c = c.substr(dot + 1);
    }
    rows_[s.var] = std::move(cols);
    block(s.body);
    rows_.erase(s.var);
  }
  void stmt(const DmlStmt& s) {
    if (const auto* ins = std::get_if<InsertStmt>(&s.statement)) {
      const TableDef& def = table(ins->table);
      for (const auto& c : ins->columns) {
        if (!def.column(c)) unresolved(def_.name, "unknown column '" + c + "' in " + def.qualified());
      }
      for (const auto& v : ins->values) expr(v);
    } else if (const auto* up = std::get_if<UpdateStmt>(&s.statement)) {
      const TableDef& def = table(up->table);
      for (const auto& a : up->assignments) {
        if (!def.column(a.column)) unresolved(def_.name, "unknown column '" + a.column + "' in " + def.qualified());
        table_expr(a.value, def);
      }
      if (up->where) table_expr(*up->where, def);
    } else if (const auto* del = std::get_if<DeleteStmt>(&s.statement)) {
      const TableDef& def = table(del->table);
      if (del->where) table_expr(*del->where, def);
    } else {
      unresolved(def_.name, "a bare SELECT needs INTO");
    }
  }
  void stmt(const SelectIntoStmt& s) {
    select(s.query);
    size_t width = output_columns(snap_, s.query).size();
    if (width != s.targets.size()) {
      unresolved(def_.name, "SELECT returns " + std::to_string(width) + " columns but INTO names " +
                                std::to_string(s.targets.size()));
    }
    for (const auto& t : s.targets) require_var(t);
  }
  void stmt(const CallStmt& s) {
    const ProcedureDef* target = s.procedure == def_.name ? &def_ : snap_.procedure(s.procedure);
    if (!target) unresolved(def_.name, "CALL to unknown procedure '" + s.procedure + "'");
    if (target->params.size() != s.args.size()) {
      unresolved(def_.name, "CALL " + s.procedure + " passes " + std::to_string(s.args.size()) +
                                " arguments, expected " + std::to_string(target->params.size()));
    }
    for (const auto& a : s.args) expr(a);
  }
  void stmt(const ExternalStmt& s) {
    for (const auto& a : s.args) expr(a);
    if (s.into) require_var(*s.into);
  }
  void stmt(const ReturnStmt& s) {
    for (const auto& v : s.values) expr(v);
  }
  void stmt(const RaiseStmt&) {}

  const Snapshot& snap_;
  const ProcedureDef& def_;
  std::map<std::string, ValueKind> vars_;
  std::map<std::string, std::vector<std::string>> rows_;
};

}  // namespace

void resolve_procedure(const Snapshot& snap, const ProcedureDef& def) { Resolver(snap, def).run(); }

void resolve_trigger(const Snapshot& snap, TriggerDef& def) {
  if (!is_identifier(def.name)) fail(ErrorKind::InvalidIdentifier, "invalid trigger name '" + def.name + "'");
  for (const auto& t : snap.triggers) {
    if (t->name == def.name) fail(ErrorKind::DuplicateTrigger, "trigger '" + def.name + "' already exists");
  }
  const Table& table = snap.table(def.table);
  const TableDef& tdef = table.def();
  if (tdef.cdc_exempt) {
    fail(ErrorKind::UnknownTable, "table '" + tdef.qualified() + "' does not accept triggers");
  }
  def.table = tdef.ref();
  const ProcedureDef* proc = snap.procedure(def.procedure);
  if (!proc) fail(ErrorKind::UnknownProcedure, "unknown procedure '" + def.procedure + "'");

  auto bad = [&](const std::string& what) {
    fail(ErrorKind::ResolutionError, "trigger '" + def.name + "': " + what);
  };
  if (def.when) {
    visit_refs(
        *def.when,
        [&](const ColumnRef& ref) {
          std::string q = ref.qualifier;
          for (char& c : q) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
          if (q != "OLD" && q != "NEW") bad("condition must reference OLD.col or NEW.col, got '" + ref_text(ref) + "'");
          if (q == "OLD" && def.event == TriggerEvent::AfterInsert) bad("OLD is not available on insert");
          if (q == "NEW" && def.event == TriggerEvent::AfterDelete) bad("NEW is not available on delete");
          if (!tdef.column(ref.name)) bad("unknown column '" + ref.name + "' in " + tdef.qualified());
        },
        [&](const VarRef& ref) { bad("condition cannot use variable ':" + ref.name + "'"); });
  }
  for (const auto& p : proc->params) {
    if (!tdef.column(p.name)) {
      bad("procedure parameter '" + p.name + "' is not a column of " + tdef.qualified());
    }
  }
}

}  // namespace dbnet::policy
