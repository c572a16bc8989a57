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

#include "dbnet/api/client.h"

#include <httplib.h>

namespace dbnet::api {

ApiClient::ApiClient(std::string host, int port, std::string user)
    : user_(std::move(user)), http_(std::make_unique<httplib::Client>(std::move(host), port)) {
  http_->set_keep_alive(true);
  http_->set_tcp_nodelay(true);
  http_->set_read_timeout(60, 0);
  http_->set_default_headers({{"X-DBNet-User", user_}});
}

ApiClient::~ApiClient() = default;

Json ApiClient::finish(int status, const std::string& body) {
  Json out = body.empty() ? Json::object() : Json::parse(body);
  if (out.is_object() && out.contains("request_id")) last_request_id_ = out["request_id"].get<int64_t>();
  if (status / 100 != 2) {
    auto kind = parse_error_kind(out.value("error_kind", "Internal")).value_or(ErrorKind::Internal);
    fail(kind, out.value("message", "HTTP " + std::to_string(status)), out.value("detail", ""));
  }
  return out;
}

Json ApiClient::get(const std::string& path) {
  auto res = http_->Get(path);
  if (!res) fail(ErrorKind::Io, "GET " + path + " failed: " + httplib::to_string(res.error()));
  return finish(res->status, res->body);
}

Json ApiClient::post(const std::string& path, const Json& body) {
  auto res = http_->Post(path, body.dump(), "application/json");
  if (!res) fail(ErrorKind::Io, "POST " + path + " failed: " + httplib::to_string(res.error()));
  return finish(res->status, res->body);
}

Json ApiClient::health() { return get("/v1/health"); }

void ApiClient::create_schema(const std::string& name) { post("/v1/schema", {{"name", name}}); }

void ApiClient::create_table(const TableDef& def) { post("/v1/table", {{"def", to_json(def)}}); }

void ApiClient::register_procedure(const std::string& source) { post("/v1/procedure", {{"source", source}}); }

void ApiClient::register_trigger(const policy::TriggerDef& def) { post("/v1/trigger", trigger_to_json(def)); }

std::vector<Value> ApiClient::call(const std::string& procedure, const std::vector<Value>& args) {
  return values_from_json(post("/v1/procedure/" + procedure + "/call", {{"args", values_to_json(args)}}).at("values"));
}

Json ApiClient::txn(const std::vector<Command>& commands) {
  Json list = Json::array();
  for (const auto& c : commands) list.push_back(to_json(c));
  return post("/v1/txn", {{"commands", list}});
}

Json ApiClient::ingest(const std::vector<telemetry::Span>& spans) {
  return post("/v1/telemetry/spans", telemetry::spans_to_json(spans));
}

Json ApiClient::query(const std::string& sql) { return post("/v1/query", {{"sql", sql}}); }

Json ApiClient::log(const std::string& query_string) {
  return get("/v1/log" + (query_string.empty() ? "" : "?" + query_string));
}

Json ApiClient::trace(int64_t log_id) { return get("/v1/provenance/trace/" + std::to_string(log_id)); }

Json ApiClient::metrics(int64_t node_id) { return get("/v1/metrics/" + std::to_string(node_id)); }

Json ApiClient::drain_outbox() { return post("/v1/outbox/drain", Json::object()); }

void ApiClient::add_user(const std::string& user_id, const std::vector<std::string>& roles) {
  post("/v1/acl/user", {{"user_id", user_id}, {"roles", roles}});
}

void ApiClient::grant(const std::string& role, const std::string& object, Action action) {
  post("/v1/acl/grant", {{"role", role}, {"object", object}, {"action", std::string(to_string(action))}});
}

}  // namespace dbnet::api
