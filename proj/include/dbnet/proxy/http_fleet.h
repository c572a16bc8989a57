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
#include <thread>

#include "dbnet/proxy/device.h"
#include "dbnet/store/codec.h"

namespace httplib {
class Server;
}

namespace dbnet::proxy {

Json to_json(const DeviceCommand& c);
DeviceCommand command_from_json(const Json& j);

// Serves a fleet over loopback HTTP:
//   POST /fleet/create_node|kill_node|set_weights  {"args":[...]} -> {"result":[...]}
//   POST /fleet/apply    DeviceCommand JSON        -> {}
//   POST /fleet/state    {"device_kind","id"}      -> {"cells":{...}}
//   POST /fleet/inject   {"action","count"}        -> {}
// Errors answer 4xx/5xx with {"error_kind","message"}.
class FleetServer {
 public:
  explicit FleetServer(std::shared_ptr<DeviceApi> fleet);
  ~FleetServer();

  // Binds to host on an ephemeral port when port is 0; returns the port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

 private:
  std::shared_ptr<DeviceApi> fleet_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

// DeviceApi that talks to a FleetServer.
class HttpFleetClient final : public DeviceApi {
 public:
  HttpFleetClient(std::string host, int port);

  std::vector<Value> call(const std::string& name, const std::vector<Value>& args) override;
  void apply(const DeviceCommand& cmd) override;
  Cells get_device_state(DeviceKind kind, int64_t id) override;
  void inject_failure(const FailureRule& rule) override;

 private:
  Json post(const std::string& path, const Json& body);

  std::string host_;
  int port_;
};

}  // namespace dbnet::proxy
