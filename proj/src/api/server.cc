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

#include "dbnet/api/server.h"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>

namespace dbnet::api {

Address parse_address(const std::string& text) {
  size_t colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) fail(ErrorKind::MalformedRequest, "address must be host:port, got '" + text + "'");
  Address a;
  a.host = text.substr(0, colon);
  try {
    size_t used = 0;
    a.port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1 || a.port < 0 || a.port > 65535) throw std::out_of_range("port");
  } catch (const std::exception&) {
    fail(ErrorKind::MalformedRequest, "bad port in address '" + text + "'");
  }
  return a;
}

EnvConfig config_from_env() {
  EnvConfig c;
  if (const char* addr = std::getenv("DBNET_ADDR"); addr && *addr) c.address = parse_address(addr);
  if (const char* journal = std::getenv("DBNET_JOURNAL")) c.journal_path = journal;
  if (const char* mode = std::getenv("DBNET_FLEET_MODE"); mode && *mode) c.fleet_mode = mode;
  if (c.fleet_mode != "inproc" && c.fleet_mode != "http") {
    fail(ErrorKind::MalformedRequest, "DBNET_FLEET_MODE must be inproc or http");
  }
  return c;
}

HttpServer::HttpServer(Service& service, int threads)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  server_->set_tcp_nodelay(true);
  server_->new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<size_t>(threads)); };
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    HttpRequest in;
    in.method = req.method;
    in.path = req.path;
    in.body = req.body;
    for (const auto& [k, v] : req.params) in.query[k] = v;
    for (const auto& [k, v] : req.headers) {
      std::string key = k;
      std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
      in.headers[key] = v;
    }
    HttpResponse out = service_.handle(in);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  server_->Get(".*", handler);
  server_->Post(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::listen(const std::string& host, int port) {
  if (!server_->bind_to_port(host, port)) fail(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
  server_->listen_after_bind();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace dbnet::api
