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

#include <fstream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "dbnet/api/acl.h"
#include "dbnet/common/error.h"
#include "dbnet/store/codec.h"
#include "dbnet/telemetry/telemetry.h"
#include "dbnet/txn/kernel.h"

namespace dbnet::api {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::map<std::string, std::string> headers;  // lower-case names
  std::string body;
};

struct HttpResponse {
  int status = 200;
  Json body = Json::object();
};

int status_for(ErrorKind kind);
// {error_kind, message, detail}
Json error_body(const Error& e);

// JSON forms shared by the server and ApiClient.
Json to_json(const Command& c);
Command command_from_json(const Json& j);
Json to_json(const CommandResult& r);
Json to_json(const ResultSet& rs);
Json trigger_to_json(const policy::TriggerDef& t);
policy::TriggerDef trigger_from_json(const Json& j);
Json values_to_json(const std::vector<Value>& values);
std::vector<Value> values_from_json(const Json& j);

struct ServiceOptions {
  telemetry::TelemetryConfig telemetry;
  std::string access_log_path;  // empty: keep the access log in memory only
};

// Transport-independent request handling: authentication, access control,
// routing to the kernel and error mapping. Every request gets a fresh
// request id which becomes the root cause of whatever it changes.
//
//   POST /v1/schema {name}              POST /v1/table {def}
//   POST /v1/procedure {source}         POST /v1/trigger {name, table, event, when, procedure}
//   POST /v1/procedure/{name}/call {args}
//   POST /v1/txn {commands}             POST /v1/telemetry/spans [span...] or {spans}
//   POST /v1/query {sql}                POST /v1/acl/user {user_id, roles}
//   POST /v1/acl/grant {role, object, action}
//   POST /v1/outbox/drain               GET  /v1/outbox
//   GET  /v1/log?user&table&kind&from&to
//   GET  /v1/provenance/trace/{log_id}  GET  /v1/metrics/{node_id}
//   GET  /v1/health
class Service {
 public:
  Service(Kernel& kernel, AccessControl& acl, ServiceOptions options = {});

  HttpResponse handle(const HttpRequest& req);

  // One line per request: time, request_id, user, method, path, status.
  std::vector<std::string> access_log() const;

 private:
  HttpResponse route(const HttpRequest& req, int64_t request_id, std::string& user_name);
  UserIdentity authenticate(const HttpRequest& req) const;
  void require(const UserIdentity& user, int64_t request_id, const std::string& object, Action action);
  void authorize(const UserIdentity& user, int64_t request_id, const Command& cmd);
  void authorize_sql(const UserIdentity& user, int64_t request_id, const SqlStatement& stmt);
  std::string qualify(const TableRef& ref) const;
  void record(const HttpRequest& req, int64_t request_id, const std::string& user, int status,
              int64_t micros);

  Kernel& kernel_;
  AccessControl& acl_;
  ServiceOptions options_;

  mutable std::mutex log_mu_;
  std::vector<std::string> access_log_;
  std::ofstream access_file_;
};

}  // namespace dbnet::api
