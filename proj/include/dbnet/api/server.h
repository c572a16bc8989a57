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

#include "dbnet/api/service.h"

namespace httplib {
class Server;
}

namespace dbnet::api {

struct Address {
  std::string host = "127.0.0.1";
  int port = 8484;
};

// "host:port"; throws MalformedRequest.
Address parse_address(const std::string& text);

// Settings read from DBNET_ADDR, DBNET_JOURNAL and DBNET_FLEET_MODE.
struct EnvConfig {
  Address address;
  std::string journal_path;
  std::string fleet_mode = "inproc";  // or "http"
};
EnvConfig config_from_env();

// Serves a Service over HTTP on its own thread pool.
class HttpServer {
 public:
  explicit HttpServer(Service& service, int threads = 32);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port.
  int start(const std::string& host, int port);
  // Blocks until stop() is called from another thread.
  void listen(const std::string& host, int port);
  void stop();

 private:
  Service& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace dbnet::api
