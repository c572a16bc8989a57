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

#include "dbnet/proxy/http_fleet.h"

#include <httplib.h>

#include "dbnet/common/error.h"

namespace dbnet::proxy {

Json to_json(const DeviceCommand& c) {
  return {{"command_id", c.command_id},
          {"device_kind", std::string(to_string(c.device_kind))},
          {"action", std::string(to_string(c.action))},
          {"payload", cells_to_json(c.payload)},
          {"origin_log_id", c.origin_log_id},
          {"table", c.table},
          {"row_id", c.row_id}};
}

DeviceCommand command_from_json(const Json& j) {
  DeviceCommand c;
  c.command_id = j.at("command_id").get<int64_t>();
  auto kind = parse_device_kind(j.at("device_kind").get<std::string>());
  if (!kind) fail(ErrorKind::MalformedRequest, "unknown device kind");
  c.device_kind = *kind;
  std::string action = j.at("action").get<std::string>();
  if (action == "Create") {
    c.action = DeviceAction::Create;
  } else if (action == "Delete") {
    c.action = DeviceAction::Delete;
  } else if (action == "SetState") {
    c.action = DeviceAction::SetState;
  } else {
    fail(ErrorKind::MalformedRequest, "unknown device action '" + action + "'");
  }
  c.payload = cells_from_json(j.at("payload"));
  c.origin_log_id = j.at("origin_log_id").get<int64_t>();
  c.table = j.at("table").get<std::string>();
  c.row_id = j.at("row_id").get<int64_t>();
  return c;
}

namespace {

Json values_to_json(const std::vector<Value>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

}  // namespace

FleetServer::FleetServer(std::shared_ptr<DeviceApi> fleet)
    : fleet_(std::move(fleet)), server_(std::make_unique<httplib::Server>()) {
  server_->set_tcp_nodelay(true);
  auto handle = [this](const httplib::Request& req, httplib::Response& res, auto fn) {
    try {
      Json body = req.body.empty() ? Json::object() : Json::parse(req.body);
      Json out = fn(body);
      res.set_content(out.dump(), "application/json");
    } catch (const Error& e) {
      res.status = e.kind() == ErrorKind::UnknownExternal || e.kind() == ErrorKind::UnknownDevice ? 404 : 502;
      res.set_content(Json{{"error_kind", std::string(to_string(e.kind()))}, {"message", e.what()}}.dump(),
                      "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(Json{{"error_kind", "MalformedRequest"}, {"message", e.what()}}.dump(),
                      "application/json");
    }
  };
  for (std::string name : {"create_node", "kill_node", "set_weights"}) {
    server_->Post("/fleet/" + name, [this, name, handle](const httplib::Request& req, httplib::Response& res) {
      handle(req, res, [&](const Json& body) {
        std::vector<Value> args;
        for (const auto& a : body.value("args", Json::array())) args.push_back(value_from_json(a));
        return Json{{"result", values_to_json(fleet_->call(name, args))}};
      });
    });
  }
  server_->Post("/fleet/apply", [this, handle](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const Json& body) {
      fleet_->apply(command_from_json(body));
      return Json::object();
    });
  });
  server_->Post("/fleet/state", [this, handle](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const Json& body) {
      auto kind = parse_device_kind(body.at("device_kind").get<std::string>());
      if (!kind) fail(ErrorKind::UnknownDevice, "unknown device kind");
      return Json{{"cells", cells_to_json(fleet_->get_device_state(*kind, body.at("id").get<int64_t>()))}};
    });
  });
  server_->Post("/fleet/inject", [this, handle](const httplib::Request& req, httplib::Response& res) {
    handle(req, res, [&](const Json& body) {
      fleet_->inject_failure({body.at("action").get<std::string>(), body.at("count").get<int>()});
      return Json::object();
    });
  });
}

FleetServer::~FleetServer() { stop(); }

int FleetServer::start(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) fail(ErrorKind::Io, "fleet server cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void FleetServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

HttpFleetClient::HttpFleetClient(std::string host, int port) : host_(std::move(host)), port_(port) {}

Json HttpFleetClient::post(const std::string& path, const Json& body) {
  httplib::Client cli(host_, port_);
  cli.set_read_timeout(30, 0);
  cli.set_tcp_nodelay(true);
  auto res = cli.Post(path, body.dump(), "application/json");
  if (!res) fail(ErrorKind::DeviceError, "fleet unreachable at " + host_ + ":" + std::to_string(port_));
  Json out = Json::parse(res->body.empty() ? "{}" : res->body);
  if (res->status != 200) {
    auto kind = parse_error_kind(out.value("error_kind", "DeviceError")).value_or(ErrorKind::DeviceError);
    fail(kind, out.value("message", "fleet error"));
  }
  return out;
}

std::vector<Value> HttpFleetClient::call(const std::string& name, const std::vector<Value>& args) {
  if (name != "create_node" && name != "kill_node" && name != "set_weights") {
    fail(ErrorKind::UnknownExternal, "unknown external function '" + name + "'");
  }
  Json out = post("/fleet/" + name, {{"args", values_to_json(args)}});
  std::vector<Value> result;
  for (const auto& v : out.at("result")) result.push_back(value_from_json(v));
  return result;
}

void HttpFleetClient::apply(const DeviceCommand& cmd) { post("/fleet/apply", to_json(cmd)); }

Cells HttpFleetClient::get_device_state(DeviceKind kind, int64_t id) {
  Json out = post("/fleet/state", {{"device_kind", std::string(to_string(kind))}, {"id", id}});
  return cells_from_json(out.at("cells"));
}

void HttpFleetClient::inject_failure(const FailureRule& rule) {
  post("/fleet/inject", {{"action", rule.action}, {"count", rule.count}});
}

}  // namespace dbnet::proxy
