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

#include "dbnet/store/codec.h"

#include "dbnet/common/error.h"
#include "dbnet/store/sql_parser.h"

namespace dbnet {

Json to_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::Null: return nullptr;
    case ValueKind::Int: return v.as_int();
    case ValueKind::Float: return v.as_float();
    case ValueKind::Text: return v.as_text();
    case ValueKind::Bool: return v.as_bool();
    case ValueKind::Timestamp: return v.as_timestamp().micros;
  }
  return nullptr;
}

Value value_from_json(const Json& j, std::optional<ValueKind> hint) {
  Value v;
  switch (j.type()) {
    case Json::value_t::null: return Value::null();
    case Json::value_t::boolean: v = Value(j.get<bool>()); break;
    case Json::value_t::number_integer: v = Value(j.get<int64_t>()); break;
    case Json::value_t::number_unsigned: {
      auto u = j.get<uint64_t>();
      if (u > static_cast<uint64_t>(INT64_MAX)) fail(ErrorKind::TypeMismatch, "integer out of range");
      v = Value(static_cast<int64_t>(u));
      break;
    }
    case Json::value_t::number_float: v = Value(j.get<double>()); break;
    case Json::value_t::string: v = Value(j.get<std::string>()); break;
    default: fail(ErrorKind::TypeMismatch, "cannot use JSON " + std::string(j.type_name()) + " as a value");
  }
  return hint ? coerce_to(v, *hint) : v;
}

Json cells_to_json(const Cells& cells) {
  Json out = Json::object();
  for (const auto& [k, v] : cells) out[k] = to_json(v);
  return out;
}

Cells cells_from_json(const Json& j, const TableDef* def) {
  if (!j.is_object()) fail(ErrorKind::TypeMismatch, "cells must be a JSON object");
  Cells out;
  for (const auto& [k, v] : j.items()) {
    std::optional<ValueKind> hint;
    if (def) {
      if (const ColumnDef* c = def->column(k)) hint = c->kind;
    }
    out[k] = value_from_json(v, hint);
  }
  return out;
}

Json to_json(const TableDef& def) {
  Json cols = Json::array();
  for (const auto& c : def.columns) {
    Json cons = Json::array();
    for (const auto& k : c.constraints) {
      if (k.kind == ConstraintKind::Check) {
        cons.push_back({{"kind", "Check"}, {"expr", to_source(*k.check)}});
      } else {
        cons.push_back({{"kind", std::string(to_string(k.kind))}});
      }
    }
    cols.push_back({{"name", c.name}, {"kind", std::string(kind_name(c.kind))}, {"constraints", cons}});
  }
  Json out = {{"schema", def.schema}, {"name", def.name}, {"columns", cols}, {"cdc_exempt", def.cdc_exempt}};
  out["device"] = def.device ? Json(std::string(to_string(*def.device))) : Json(nullptr);
  return out;
}

TableDef table_def_from_json(const Json& j) {
  auto bad = [](const std::string& what) { fail(ErrorKind::MalformedRequest, "table definition: " + what); };
  if (!j.is_object()) bad("expected an object");
  TableDef def;
  if (j.contains("table") && j.at("table").is_string() && !j.contains("name")) {
    TableRef ref = TableRef::parse(j.at("table").get<std::string>());
    def.schema = ref.schema;
    def.name = ref.name;
  } else {
    if (!j.contains("schema") || !j.at("schema").is_string()) bad("missing \"schema\"");
    if (!j.contains("name") || !j.at("name").is_string()) bad("missing \"name\"");
    def.schema = j.at("schema").get<std::string>();
    def.name = j.at("name").get<std::string>();
  }
  if (!j.contains("columns") || !j.at("columns").is_array()) bad("missing \"columns\" array");
  for (const auto& cj : j.at("columns")) {
    if (!cj.is_object() || !cj.contains("name") || !cj.contains("kind")) bad("column needs name and kind");
    ColumnDef c;
    c.name = cj.at("name").get<std::string>();
    auto kind = parse_kind(cj.at("kind").get<std::string>());
    if (!kind || *kind == ValueKind::Null) bad("column '" + c.name + "' has unknown kind");
    c.kind = *kind;
    if (cj.contains("constraints")) {
      for (const auto& kj : cj.at("constraints")) {
        std::string k = kj.is_string() ? kj.get<std::string>() : kj.value("kind", "");
        if (k == "NotNull") {
          c.constraints.push_back(not_null());
        } else if (k == "PrimaryKey") {
          c.constraints.push_back(primary_key());
        } else if (k == "Unique") {
          c.constraints.push_back(unique());
        } else if (k == "Check") {
          if (!kj.is_object() || !kj.contains("expr")) bad("Check needs \"expr\"");
          c.constraints.push_back(check(parse_expression(kj.at("expr").get<std::string>())));
        } else {
          bad("unknown constraint '" + k + "'");
        }
      }
    }
    def.columns.push_back(std::move(c));
  }
  if (j.contains("device") && !j.at("device").is_null()) {
    auto d = parse_device_kind(j.at("device").get<std::string>());
    if (!d) bad("unknown device kind");
    def.device = d;
  }
  def.cdc_exempt = j.value("cdc_exempt", false);
  return def;
}

}  // namespace dbnet
