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

#include <memory>
#include <string>
#include <vector>

#include "dbnet/api/service.h"

namespace httplib {
class Client;
}

namespace dbnet::api {

// Thin typed client for the /v1 endpoints. Not thread-safe; give each
// thread its own. Non-2xx answers are rethrown as Error with the server's
// error kind.
class ApiClient {
 public:
  ApiClient(std::string host, int port, std::string user);
  ~ApiClient();

  Json get(const std::string& path);
  Json post(const std::string& path, const Json& body);

  Json health();
  void create_schema(const std::string& name);
  void create_table(const TableDef& def);
  void register_procedure(const std::string& source);
  void register_trigger(const policy::TriggerDef& def);
  std::vector<Value> call(const std::string& procedure, const std::vector<Value>& args);
  Json txn(const std::vector<Command>& commands);
  Json ingest(const std::vector<telemetry::Span>& spans);
  Json query(const std::string& sql);
  Json log(const std::string& query_string = {});
  Json trace(int64_t log_id);
  Json metrics(int64_t node_id);
  Json drain_outbox();
  void add_user(const std::string& user_id, const std::vector<std::string>& roles);
  void grant(const std::string& role, const std::string& object, Action action);

  // request_id of the last answered request.
  int64_t last_request_id() const { return last_request_id_; }

 private:
  Json finish(int status, const std::string& body);

  std::string user_;
  std::unique_ptr<httplib::Client> http_;
  int64_t last_request_id_ = 0;
};

}  // namespace dbnet::api
