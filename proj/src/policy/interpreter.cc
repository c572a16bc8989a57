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

#include "dbnet/policy/interpreter.h"

#include <map>

#include "dbnet/common/error.h"

namespace dbnet::policy {

std::vector<Value> bind_arguments(const ProcedureDef& def, std::vector<Value> args) {
  if (args.size() != def.params.size()) {
    fail(ErrorKind::ArgMismatch, "procedure '" + def.name + "' takes " +
                                     std::to_string(def.params.size()) + " arguments, got " +
                                     std::to_string(args.size()));
  }
  for (size_t i = 0; i < args.size(); ++i) {
    try {
      args[i] = coerce_to(args[i], def.params[i].kind);
    } catch (const Error&) {
      fail(ErrorKind::ArgMismatch, "argument '" + def.params[i].name + "' of '" + def.name +
                                       "' expects " + std::string(kind_name(def.params[i].kind)) +
                                       ", got " + std::string(kind_name(args[i].kind())));
    }
  }
  return args;
}

namespace {

struct Variable {
  ValueKind kind;
  Value value;
};

struct LoopRow {
  std::string name;
  const std::vector<std::string>* columns;
  const std::vector<Value>* values;
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

class Interpreter final : public Scope {
 public:
  Interpreter(const ProcedureDef& def, Host& host, const Frame& frame)
      : def_(def), host_(host), frame_(frame) {}

  std::vector<Value> run(const std::vector<Value>& args) {
    for (size_t i = 0; i < def_.params.size(); ++i) {
      vars_[def_.params[i].name] = {def_.params[i].kind, args[i]};
    }
    block(def_.body);
    return std::move(result_);
  }

  const Value* lookup_column(std::string_view qualifier, std::string_view name) const override {
    if (qualifier.empty()) return nullptr;
    for (auto it = loops_.rbegin(); it != loops_.rend(); ++it) {
      if (it->name != qualifier) continue;
      for (size_t i = 0; i < it->columns->size(); ++i) {
        const std::string& c = (*it->columns)[i];
        auto dot = c.find('.');
        std::string_view bare = dot == std::string::npos ? std::string_view(c) : std::string_view(c).substr(dot + 1);
        if (c == name || bare == name) return &(*it->values)[i];
      }
      return nullptr;
    }
    std::string q = upper(qualifier);
    const Cells* row = q == "OLD" ? frame_.old_row : q == "NEW" ? frame_.new_row : nullptr;
    if (!row) {
      if (q == "OLD" || q == "NEW") {
        fail(ErrorKind::RuntimeError, q + " is not available in '" + def_.name + "' here");
      }
      return nullptr;
    }
    auto it = row->find(std::string(name));
    return it == row->end() ? nullptr : &it->second;
  }

  const Value* lookup_var(std::string_view name) const override {
    auto it = vars_.find(std::string(name));
    return it == vars_.end() ? nullptr : &it->second.value;
  }

 private:
  void assign(const std::string& name, const Value& v) {
    auto it = vars_.find(name);
    if (it == vars_.end()) fail(ErrorKind::RuntimeError, "assignment to undeclared variable '" + name + "'");
    it->second.value = coerce_to(v, it->second.kind);
  }

  std::vector<Value> eval_all(const std::vector<Expr>& xs) {
    std::vector<Value> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(evaluate(x, *this));
    return out;
  }

  // Returns true when a RETURN ended the block.
  bool block(const Block& b) {
    for (const auto& s : b) {
      if (std::visit([&](const auto& node) { return stmt(node); }, s.node)) return true;
    }
    return false;
  }

  bool stmt(const DeclareStmt& s) {
    vars_[s.name] = {s.kind, Value::null()};
    return false;
  }
  bool stmt(const SetStmt& s) {
    assign(s.name, evaluate(s.value, *this));
    return false;
  }
  bool stmt(const IfStmt& s) {
    for (const auto& br : s.branches) {
      if (holds(br.condition, *this)) return block(br.body);
    }
    return s.otherwise ? block(*s.otherwise) : false;
  }
  bool stmt(const ForStmt& s) {
    // The loop iterates over the rows as they were when it started.
    ResultSet rs = run_select(host_.view(), s.query, this);
    for (const auto& row : rs.rows) {
      loops_.push_back({s.var, &rs.columns, &row});
      bool returned = block(s.body);
      loops_.pop_back();
      if (returned) return true;
    }
    return false;
  }
  bool stmt(const DmlStmt& s) {
    if (const auto* ins = std::get_if<InsertStmt>(&s.statement)) {
      Cells cells;
      for (size_t i = 0; i < ins->columns.size(); ++i) {
        cells[ins->columns[i]] = evaluate(ins->values[i], *this);
      }
      host_.insert(frame_, ins->table, cells);
    } else if (const auto* up = std::get_if<UpdateStmt>(&s.statement)) {
      host_.update(frame_, *up, *this);
    } else if (const auto* del = std::get_if<DeleteStmt>(&s.statement)) {
      host_.erase(frame_, *del, *this);
    }
    return false;
  }
  bool stmt(const SelectIntoStmt& s) {
    ResultSet rs = run_select(host_.view(), s.query, this);
    if (rs.columns.size() != s.targets.size()) {
      fail(ErrorKind::RuntimeError, "SELECT INTO column count does not match its targets");
    }
    // No row assigns Null; several rows take the first.
    for (size_t i = 0; i < s.targets.size(); ++i) {
      assign(s.targets[i], rs.rows.empty() ? Value::null() : rs.rows.front()[i]);
    }
    return false;
  }
  bool stmt(const CallStmt& s) {
    host_.call(frame_, s.procedure, eval_all(s.args));
    return false;
  }
  bool stmt(const ExternalStmt& s) {
    std::vector<Value> out = host_.external(frame_, s.name, eval_all(s.args));
    if (s.into) assign(*s.into, out.empty() ? Value::null() : out.front());
    return false;
  }
  bool stmt(const ReturnStmt& s) {
    result_ = eval_all(s.values);
    return true;
  }
  bool stmt(const RaiseStmt& s) {
    fail(ErrorKind::RuntimeError, "procedure '" + def_.name + "' raised: " + s.message);
  }

  const ProcedureDef& def_;
  Host& host_;
  const Frame& frame_;
  std::map<std::string, Variable> vars_;
  std::vector<LoopRow> loops_;
  std::vector<Value> result_;
};

}  // namespace

std::vector<Value> execute(const ProcedureDef& def, const std::vector<Value>& args, Host& host,
                           const Frame& frame) {
  return Interpreter(def, host, frame).run(args);
}

}  // namespace dbnet::policy
