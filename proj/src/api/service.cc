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

#include "dbnet/api/service.h"

#include <chrono>

#include "dbnet/policy/parser.h"
#include "dbnet/store/sql_parser.h"

namespace dbnet::api {

using provenance::CauseKind;

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::MalformedRequest:
    case ErrorKind::MalformedSpan:
    case ErrorKind::MalformedQuery:
    case ErrorKind::TypeMismatch:
    case ErrorKind::ArgMismatch:
    case ErrorKind::UnknownColumn:
    case ErrorKind::InvalidIdentifier:
    case ErrorKind::InvalidColumn:
    case ErrorKind::ResolutionError:
      return 400;
    case ErrorKind::UnknownUser:
      return 401;
    case ErrorKind::AccessDenied:
      return 403;
    case ErrorKind::UnknownSchema:
    case ErrorKind::UnknownTable:
    case ErrorKind::UnknownProcedure:
    case ErrorKind::UnknownLogId:
    case ErrorKind::UnknownNode:
    case ErrorKind::UnknownTxn:
    case ErrorKind::UnknownExternal:
    case ErrorKind::UnknownDevice:
    case ErrorKind::NotFound:
      return 404;
    case ErrorKind::ConstraintViolation:
    case ErrorKind::DuplicateSchema:
    case ErrorKind::DuplicateTable:
    case ErrorKind::DuplicateProcedure:
    case ErrorKind::DuplicateTrigger:
    case ErrorKind::CascadeDepthExceeded:
    case ErrorKind::AlreadyClosed:
      return 409;
    default:
      return 500;
  }
}

Json error_body(const Error& e) {
  return {{"error_kind", std::string(to_string(e.kind()))}, {"message", e.what()}, {"detail", e.detail()}};
}

namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) fail(ErrorKind::MalformedRequest, std::string("missing field '") + name + "'");
  return j.at(name);
}

std::string text_field(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) fail(ErrorKind::MalformedRequest, std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

std::optional<Expr> where_from_json(const Json& j) {
  if (!j.contains("where") || j.at("where").is_null()) return std::nullopt;
  return parse_expression(text_field(j, "where"));
}

Json where_to_json(const std::optional<Expr>& where) { return where ? Json(to_source(*where)) : Json(nullptr); }

int64_t parse_id(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    int64_t v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::MalformedRequest, std::string(what) + " must be an integer, got '" + s + "'");
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < path.size()) {
    size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    if (j > i) out.push_back(path.substr(i, j - i));
    i = j + 1;
  }
  return out;
}

Json parse_body(const HttpRequest& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::MalformedRequest, std::string("request body is not JSON: ") + e.what());
  }
}

Json counts_json(const ObjectCounts& c) {
  return {{"schemas", c.schemas}, {"tables", c.tables}, {"procedures", c.procedures}, {"triggers", c.triggers}};
}

}  // namespace

Json values_to_json(const std::vector<Value>& values) {
  Json out = Json::array();
  for (const auto& v : values) out.push_back(to_json(v));
  return out;
}

std::vector<Value> values_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorKind::MalformedRequest, "args must be an array");
  std::vector<Value> out;
  for (const auto& v : j) out.push_back(value_from_json(v));
  return out;
}

Json trigger_to_json(const policy::TriggerDef& t) {
  return {{"name", t.name},
          {"table", t.table.qualified()},
          {"event", std::string(policy::to_string(t.event))},
          {"when", where_to_json(t.when)},
          {"procedure", t.procedure}};
}

policy::TriggerDef trigger_from_json(const Json& j) {
  policy::TriggerDef t;
  t.name = text_field(j, "name");
  t.table = TableRef::parse(text_field(j, "table"));
  auto event = policy::parse_trigger_event(text_field(j, "event"));
  if (!event) fail(ErrorKind::MalformedRequest, "event must be AfterInsert, AfterUpdate or AfterDelete");
  t.event = *event;
  if (j.contains("when") && !j.at("when").is_null()) t.when = parse_expression(text_field(j, "when"));
  t.procedure = text_field(j, "procedure");
  return t;
}

Json to_json(const Command& c) {
  return std::visit(
      [](const auto& cmd) -> Json {
        using T = std::decay_t<decltype(cmd)>;
        if constexpr (std::is_same_v<T, CreateSchemaCmd>) {
          return {{"op", "create_schema"}, {"name", cmd.name}};
        } else if constexpr (std::is_same_v<T, CreateTableCmd>) {
          return {{"op", "create_table"}, {"def", to_json(cmd.def)}};
        } else if constexpr (std::is_same_v<T, CreateProcedureCmd>) {
          return {{"op", "create_procedure"}, {"source", cmd.source}};
        } else if constexpr (std::is_same_v<T, CreateTriggerCmd>) {
          return {{"op", "create_trigger"}, {"trigger", trigger_to_json(cmd.def)}};
        } else if constexpr (std::is_same_v<T, InsertCmd>) {
          return {{"op", "insert"}, {"table", cmd.table.qualified()}, {"cells", cells_to_json(cmd.cells)}};
        } else if constexpr (std::is_same_v<T, UpdateCmd>) {
          return {{"op", "update"},
                  {"table", cmd.table.qualified()},
                  {"where", where_to_json(cmd.where)},
                  {"set", cells_to_json(cmd.set)}};
        } else if constexpr (std::is_same_v<T, DeleteCmd>) {
          return {{"op", "delete"}, {"table", cmd.table.qualified()}, {"where", where_to_json(cmd.where)}};
        } else if constexpr (std::is_same_v<T, SqlCmd>) {
          return {{"op", "sql"}, {"sql", cmd.sql}};
        } else {
          return {{"op", "call"}, {"procedure", cmd.procedure}, {"args", values_to_json(cmd.args)}};
        }
      },
      c);
}

Command command_from_json(const Json& j) {
  std::string op = text_field(j, "op");
  if (op == "create_schema") return CreateSchemaCmd{text_field(j, "name")};
  if (op == "create_table") return CreateTableCmd{table_def_from_json(field(j, "def"))};
  if (op == "create_procedure") return CreateProcedureCmd{text_field(j, "source")};
  if (op == "create_trigger") return CreateTriggerCmd{trigger_from_json(field(j, "trigger"))};
  if (op == "insert") return InsertCmd{TableRef::parse(text_field(j, "table")), cells_from_json(field(j, "cells"))};
  if (op == "update") {
    return UpdateCmd{TableRef::parse(text_field(j, "table")), where_from_json(j), cells_from_json(field(j, "set"))};
  }
  if (op == "delete") return DeleteCmd{TableRef::parse(text_field(j, "table")), where_from_json(j)};
  if (op == "sql") return SqlCmd{text_field(j, "sql")};
  if (op == "call") {
    return CallCmd{text_field(j, "procedure"),
                   j.contains("args") ? values_from_json(j.at("args")) : std::vector<Value>{}};
  }
  fail(ErrorKind::MalformedRequest, "unknown command op '" + op + "'");
}

Json to_json(const ResultSet& rs) {
  Json rows = Json::array();
  for (const auto& r : rs.rows) rows.push_back(values_to_json(r));
  return {{"columns", rs.columns}, {"rows", rows}};
}

Json to_json(const CommandResult& r) {
  Json out = Json::object();
  if (r.row_id) out["row_id"] = *r.row_id;
  if (r.affected) out["affected"] = *r.affected;
  if (r.values) out["values"] = values_to_json(*r.values);
  if (r.rows) out["result"] = to_json(*r.rows);
  return out;
}

Service::Service(Kernel& kernel, AccessControl& acl, ServiceOptions options)
    : kernel_(kernel), acl_(acl), options_(std::move(options)) {
  if (!options_.access_log_path.empty()) {
    access_file_.open(options_.access_log_path, std::ios::app);
    if (!access_file_) fail(ErrorKind::Io, "cannot open access log " + options_.access_log_path);
  }
}

HttpResponse Service::handle(const HttpRequest& req) {
  auto start = std::chrono::steady_clock::now();
  int64_t request_id = kernel_.next_request_id();
  std::string user = "-";
  HttpResponse res;
  try {
    res = route(req, request_id, user);
  } catch (const Error& e) {
    res.status = status_for(e.kind());
    res.body = error_body(e);
  } catch (const Json::exception& e) {
    res.status = 400;
    res.body = error_body(Error(ErrorKind::MalformedRequest, e.what()));
  } catch (const std::exception& e) {
    res.status = 500;
    res.body = error_body(Error(ErrorKind::Internal, e.what()));
  }
  if (res.body.is_object()) res.body["request_id"] = request_id;
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  record(req, request_id, user, res.status, micros.count());
  return res;
}

void Service::record(const HttpRequest& req, int64_t request_id, const std::string& user, int status,
                     int64_t micros) {
  auto wall = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::system_clock::now().time_since_epoch());
  std::string line = provenance::format_iso8601(Timestamp{wall.count()}) + " request_id=" +
                     std::to_string(request_id) + " user=" + user + " " + req.method + " " + req.path +
                     " status=" + std::to_string(status) + " duration_us=" + std::to_string(micros);
  std::lock_guard<std::mutex> lock(log_mu_);
  if (access_file_.is_open()) access_file_ << line << '\n' << std::flush;
  access_log_.push_back(std::move(line));
}

std::vector<std::string> Service::access_log() const {
  std::lock_guard<std::mutex> lock(log_mu_);
  return access_log_;
}

UserIdentity Service::authenticate(const HttpRequest& req) const {
  std::string id;
  if (auto it = req.headers.find("x-dbnet-user"); it != req.headers.end()) {
    id = it->second;
  } else if (auto auth = req.headers.find("authorization"); auth != req.headers.end()) {
    const std::string prefix = "Bearer ";
    if (auth->second.rfind(prefix, 0) == 0) id = auth->second.substr(prefix.size());
  }
  if (id.empty()) fail(ErrorKind::UnknownUser, "no user identity supplied");
  auto user = acl_.find_user(id);
  if (!user) fail(ErrorKind::UnknownUser, "unknown user '" + id + "'");
  return *user;
}

void Service::require(const UserIdentity& user, int64_t request_id, const std::string& object, Action action) {
  if (acl_.check(user, object, action)) return;
  std::string what = std::string(to_string(action)) + " on " + object;
  if (kernel_.initialized()) {
    provenance::LogEntry e;
    e.user = user.user_id;
    e.kind = provenance::LogKind::AuthDeny;
    if (object.rfind("table:", 0) == 0) e.table = object.substr(6);
    e.detail = what;
    e.cause = {CauseKind::ExternalRequest, request_id};
    kernel_.append_standalone(std::move(e));
  }
  fail(ErrorKind::AccessDenied, user.user_id + " is not allowed " + what);
}

std::string Service::qualify(const TableRef& ref) const {
  try {
    return kernel_.snapshot()->resolve(ref);
  } catch (const Error&) {
    return ref.qualified();
  }
}

void Service::authorize_sql(const UserIdentity& user, int64_t request_id, const SqlStatement& stmt) {
  if (const auto* q = std::get_if<SelectQuery>(&stmt)) {
    std::vector<TableRef> reads;
    collect_tables(*q, reads);
    for (const auto& r : reads) require(user, request_id, table_object(qualify(r)), Action::Read);
  } else if (const auto* ins = std::get_if<InsertStmt>(&stmt)) {
    require(user, request_id, table_object(qualify(ins->table)), Action::Write);
  } else if (const auto* up = std::get_if<UpdateStmt>(&stmt)) {
    require(user, request_id, table_object(qualify(up->table)), Action::Write);
  } else if (const auto* del = std::get_if<DeleteStmt>(&stmt)) {
    require(user, request_id, table_object(qualify(del->table)), Action::Write);
  }
}

void Service::authorize(const UserIdentity& user, int64_t request_id, const Command& cmd) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CreateSchemaCmd>) {
          require(user, request_id, schema_object(c.name), Action::Admin);
        } else if constexpr (std::is_same_v<T, CreateTableCmd>) {
          require(user, request_id, schema_object(c.def.schema), Action::Admin);
        } else if constexpr (std::is_same_v<T, CreateProcedureCmd>) {
          require(user, request_id, procedure_object(policy::parse_procedure(c.source).name), Action::Admin);
        } else if constexpr (std::is_same_v<T, CreateTriggerCmd>) {
          require(user, request_id, table_object(qualify(c.def.table)), Action::Admin);
        } else if constexpr (std::is_same_v<T, InsertCmd> || std::is_same_v<T, UpdateCmd> ||
                             std::is_same_v<T, DeleteCmd>) {
          require(user, request_id, table_object(qualify(c.table)), Action::Write);
        } else if constexpr (std::is_same_v<T, SqlCmd>) {
          authorize_sql(user, request_id, parse_sql(c.sql));
        } else {
          require(user, request_id, procedure_object(c.procedure), Action::Execute);
        }
      },
      cmd);
}

HttpResponse Service::route(const HttpRequest& req, int64_t request_id, std::string& user_name) {
  std::vector<std::string> seg = split_path(req.path);
  // Routes answer with or without the /v1 prefix.
  if (!seg.empty() && seg[0] == "v1") seg.erase(seg.begin());
  const bool get = req.method == "GET";
  const bool post = req.method == "POST";
  auto is = [&](std::initializer_list<const char*> parts) {
    if (seg.size() != parts.size()) return false;
    size_t i = 0;
    for (const char* p : parts) {
      if (std::string_view(p) != "{}" && seg[i] != p) return false;
      ++i;
    }
    return true;
  };

  if (get && is({"health"})) {
    HttpResponse res;
    res.body = {{"status", "ok"},
                {"initialized", kernel_.initialized()},
                {"counts", counts_json(kernel_.counts())},
                {"outbox_pending", kernel_.outbox().pending()}};
    return res;
  }

  UserIdentity user = authenticate(req);
  user_name = user.user_id;
  RequestContext ctx{user.user_id, {CauseKind::ExternalRequest, request_id}};
  HttpResponse res;

  auto run = [&](Command cmd) {
    authorize(user, request_id, cmd);
    return kernel_.execute_atomic({std::move(cmd)}, ctx).front();
  };

  if (post && is({"schema"})) {
    run(CreateSchemaCmd{text_field(parse_body(req), "name")});
  } else if (post && is({"table"})) {
    Json body = parse_body(req);
    run(CreateTableCmd{table_def_from_json(body.contains("def") ? body.at("def") : body)});
  } else if (post && is({"procedure"})) {
    run(CreateProcedureCmd{text_field(parse_body(req), "source")});
  } else if (post && is({"trigger"})) {
    run(CreateTriggerCmd{trigger_from_json(parse_body(req))});
  } else if (post && is({"procedure", "{}", "call"})) {
    Json body = parse_body(req);
    const std::string& name = seg[1];
    require(user, request_id, procedure_object(name), Action::Execute);
    auto args = body.contains("args") ? values_from_json(body.at("args")) : std::vector<Value>{};
    res.body["values"] = values_to_json(kernel_.call_procedure(name, std::move(args), ctx));
  } else if (post && is({"txn"})) {
    Json body = parse_body(req);
    const Json& list = field(body, "commands");
    if (!list.is_array()) fail(ErrorKind::MalformedRequest, "commands must be an array");
    std::vector<Command> commands;
    for (const auto& c : list) commands.push_back(command_from_json(c));
    for (const auto& c : commands) authorize(user, request_id, c);
    Json results = Json::array();
    for (const auto& r : kernel_.execute_atomic(commands, ctx)) results.push_back(to_json(r));
    res.body["results"] = results;
  } else if (post && is({"telemetry", "spans"})) {
    Json body = parse_body(req);
    auto spans = telemetry::spans_from_json(body.is_array() ? body : field(body, "spans"));
    require(user, request_id, table_object(telemetry::kSpansTable), Action::Write);
    RequestContext batch{user.user_id, {CauseKind::TelemetryBatch, request_id}};
    auto r = telemetry::ingest_spans(kernel_, spans, batch, options_.telemetry);
    res.body["accepted_count"] = r.accepted;
    res.body["batch_id"] = r.accepted ? Json(r.batch_id) : Json(nullptr);
  } else if (post && is({"query"})) {
    std::string sql = text_field(parse_body(req), "sql");
    SqlStatement stmt = parse_sql(sql);
    authorize_sql(user, request_id, stmt);
    if (const auto* q = std::get_if<SelectQuery>(&stmt)) {
      res.body["result"] = to_json(kernel_.select(*q));
    } else {
      res.body = to_json(kernel_.execute_atomic({SqlCmd{sql}}, ctx).front());
    }
  } else if (post && is({"acl", "user"})) {
    require(user, request_id, system_object("acl"), Action::Admin);
    Json body = parse_body(req);
    UserIdentity u;
    u.user_id = text_field(body, "user_id");
    if (body.contains("roles")) {
      for (const auto& r : body.at("roles")) u.roles.insert(r.get<std::string>());
    }
    acl_.add_user(std::move(u));
  } else if (post && is({"acl", "grant"})) {
    require(user, request_id, system_object("acl"), Action::Admin);
    Json body = parse_body(req);
    auto action = parse_action(text_field(body, "action"));
    if (!action) fail(ErrorKind::MalformedRequest, "action must be Read, Write, Execute or Admin");
    acl_.grant({text_field(body, "role"), text_field(body, "object"), *action});
  } else if (post && is({"outbox", "drain"})) {
    require(user, request_id, system_object("outbox"), Action::Admin);
    res.body["applied"] = kernel_.outbox().drain();
    res.body["pending"] = kernel_.outbox().pending();
  } else if (get && is({"outbox"})) {
    require(user, request_id, system_object("outbox"), Action::Read);
    Json statuses = Json::array();
    for (const auto& s : kernel_.outbox().statuses()) {
      statuses.push_back({{"table", s.table},
                          {"row_id", s.row_id},
                          {"state", std::string(proxy::to_string(s.state))},
                          {"attempts", s.attempts},
                          {"last_error", s.last_error ? Json(*s.last_error) : Json(nullptr)}});
    }
    res.body["pending"] = kernel_.outbox().pending();
    res.body["statuses"] = statuses;
  } else if (get && is({"log"})) {
    require(user, request_id, table_object(provenance::kLogTable), Action::Read);
    provenance::LogFilter filter;
    auto param = [&](const char* name) -> std::optional<std::string> {
      auto it = req.query.find(name);
      if (it == req.query.end()) return std::nullopt;
      return it->second;
    };
    filter.user = param("user");
    filter.table = param("table");
    if (auto k = param("kind")) {
      filter.kind = provenance::parse_log_kind(*k);
      if (!filter.kind) fail(ErrorKind::MalformedRequest, "unknown log kind '" + *k + "'");
    }
    if (auto f = param("from")) filter.from = Timestamp{parse_id(*f, "from")};
    if (auto t = param("to")) filter.to = Timestamp{parse_id(*t, "to")};
    Json entries = Json::array();
    for (const auto& e : kernel_.query_log(filter)) entries.push_back(provenance::to_json(e));
    res.body["entries"] = entries;
  } else if (get && is({"provenance", "trace", "{}"})) {
    require(user, request_id, table_object(provenance::kLogTable), Action::Read);
    auto tr = kernel_.trace(parse_id(seg[2], "log_id"));
    Json chain = Json::array();
    for (const auto& e : tr.chain) chain.push_back(provenance::to_json(e));
    res.body["chain"] = chain;
    res.body["kinds"] = tr.kinds();
    res.body["root"] = {{"kind", std::string(provenance::to_string(tr.root.kind))}, {"ref_id", tr.root.ref_id}};
  } else if (get && is({"metrics", "{}"})) {
    require(user, request_id, table_object(telemetry::kMetricsTable), Action::Read);
    res.body = telemetry::to_json(telemetry::get_metrics(kernel_, parse_id(seg[1], "node_id")));
  } else {
    fail(ErrorKind::NotFound, "no endpoint " + req.method + " " + req.path);
  }
  return res;
}

}  // namespace dbnet::api
