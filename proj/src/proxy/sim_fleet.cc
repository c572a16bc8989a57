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

#include "dbnet/proxy/sim_fleet.h"

#include <thread>

#include "dbnet/common/error.h"

namespace dbnet::proxy {

std::string_view to_string(DeviceAction a) {
  switch (a) {
    case DeviceAction::Create: return "Create";
    case DeviceAction::Delete: return "Delete";
    case DeviceAction::SetState: return "SetState";
  }
  return "?";
}

std::string_view identity_column(DeviceKind kind) {
  return kind == DeviceKind::Node ? "nodeId" : "podId";
}

std::string sync_call_name(DeviceKind kind) {
  switch (kind) {
    case DeviceKind::Node: return "sync_node";
    case DeviceKind::AutoScaler: return "sync_autoscaler";
    case DeviceKind::LoadBalancer: return "sync_lb";
  }
  return "sync";
}

namespace {

int64_t int_arg(const std::vector<Value>& args, size_t i, const std::string& call) {
  if (i >= args.size() || args[i].kind() != ValueKind::Int) {
    fail(ErrorKind::DeviceError, call + ": argument " + std::to_string(i + 1) + " must be an integer");
  }
  return args[i].as_int();
}

}  // namespace

bool SimFleet::take_failure(const std::string& action) {
  ++operations_;
  for (const std::string& key : {action, std::string("*")}) {
    auto it = failures_.find(key);
    if (it != failures_.end() && it->second > 0) {
      --it->second;
      return true;
    }
  }
  return false;
}

void SimFleet::rebalance(int64_t pod_id) {
  if (!load_balancers_.count(pod_id)) return;
  std::vector<double> w;
  for (const auto& [id, n] : nodes_) {
    if (n.alive && n.pod_id == pod_id) w.push_back(1.0);
  }
  for (double& x : w) x /= static_cast<double>(w.size());
  lb_weights_[pod_id] = std::move(w);
}

std::vector<Value> SimFleet::call(const std::string& name, const std::vector<Value>& args) {
  if (name == "create_node") {
    if (args.size() != 1) fail(ErrorKind::DeviceError, "create_node takes (pod_id)");
    int64_t pod = int_arg(args, 0, name);
    std::chrono::microseconds delay;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (take_failure(name)) fail(ErrorKind::DeviceError, "create_node: injected failure");
      delay = provisioning_delay_;
    }
    std::this_thread::sleep_for(delay);
    std::lock_guard<std::mutex> lock(mu_);
    int64_t id = nodes_.empty() ? 1 : nodes_.rbegin()->first + 1;
    SimNode node;
    node.pod_id = pod;
    node.state = {{"nodeId", Value(id)}, {"podId", Value(pod)}, {"cpuUtil", Value(0.0)}, {"ingressTraff", Value(0.0)}};
    nodes_.emplace(id, std::move(node));
    return {Value(id)};
  }
  if (name == "kill_node") {
    if (args.size() != 1) fail(ErrorKind::DeviceError, "kill_node takes (node_id)");
    int64_t id = int_arg(args, 0, name);
    std::lock_guard<std::mutex> lock(mu_);
    if (take_failure(name)) fail(ErrorKind::DeviceError, "kill_node: injected failure");
    auto it = nodes_.find(id);
    if (it == nodes_.end()) fail(ErrorKind::DeviceError, "kill_node: unknown node " + std::to_string(id));
    it->second.alive = false;
    return {};
  }
  if (name == "set_weights") {
    if (args.empty()) fail(ErrorKind::DeviceError, "set_weights takes (pod_id, weight...)");
    int64_t pod = int_arg(args, 0, name);
    std::vector<double> w;
    for (size_t i = 1; i < args.size(); ++i) {
      if (!args[i].is_numeric()) fail(ErrorKind::DeviceError, "set_weights: weights must be numeric");
      w.push_back(args[i].as_float());
    }
    std::lock_guard<std::mutex> lock(mu_);
    if (take_failure(name)) fail(ErrorKind::DeviceError, "set_weights: injected failure");
    lb_weights_[pod] = std::move(w);
    return {};
  }
  fail(ErrorKind::UnknownExternal, "unknown external function '" + name + "'");
}

void SimFleet::apply(const DeviceCommand& cmd) {
  std::lock_guard<std::mutex> lock(mu_);
  if (take_failure(sync_call_name(cmd.device_kind))) {
    fail(ErrorKind::DeviceError, sync_call_name(cmd.device_kind) + ": injected failure");
  }
  auto key = cmd.payload.find(std::string(identity_column(cmd.device_kind)));
  if (key == cmd.payload.end() || key->second.kind() != ValueKind::Int) {
    fail(ErrorKind::DeviceError, "command " + std::to_string(cmd.command_id) + " has no " +
                                     std::string(identity_column(cmd.device_kind)));
  }
  int64_t id = key->second.as_int();
  switch (cmd.device_kind) {
    case DeviceKind::Node: {
      auto it = nodes_.find(id);
      if (cmd.action == DeviceAction::Delete) {
        if (it != nodes_.end()) it->second.alive = false;
        return;
      }
      if (it != nodes_.end() && !it->second.alive) {
        fail(ErrorKind::DeviceError, "node " + std::to_string(id) + " was killed");
      }
      auto pod = cmd.payload.find("podId");
      SimNode& n = nodes_[id];
      n.alive = true;
      n.state = cmd.payload;
      if (pod != cmd.payload.end() && pod->second.kind() == ValueKind::Int) n.pod_id = pod->second.as_int();
      return;
    }
    case DeviceKind::AutoScaler:
      if (cmd.action == DeviceAction::Delete) {
        autoscalers_.erase(id);
      } else {
        autoscalers_[id] = cmd.payload;
      }
      return;
    case DeviceKind::LoadBalancer:
      if (cmd.action == DeviceAction::Delete) {
        load_balancers_.erase(id);
        lb_weights_.erase(id);
      } else {
        load_balancers_[id] = cmd.payload;
        rebalance(id);
      }
      return;
  }
}

Cells SimFleet::get_device_state(DeviceKind kind, int64_t id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto unknown = [&]() {
    fail(ErrorKind::UnknownDevice, "no " + std::string(to_string(kind)) + " device " + std::to_string(id));
  };
  switch (kind) {
    case DeviceKind::Node: {
      auto it = nodes_.find(id);
      if (it == nodes_.end()) unknown();
      Cells out = it->second.state;
      out["alive"] = Value(it->second.alive);
      return out;
    }
    case DeviceKind::AutoScaler: {
      auto it = autoscalers_.find(id);
      if (it == autoscalers_.end()) unknown();
      return it->second;
    }
    case DeviceKind::LoadBalancer: {
      auto it = load_balancers_.find(id);
      if (it == load_balancers_.end()) unknown();
      return it->second;
    }
  }
  unknown();
  return {};
}

void SimFleet::inject_failure(const FailureRule& rule) {
  if (rule.count <= 0) return;
  std::lock_guard<std::mutex> lock(mu_);
  failures_[rule.action] += rule.count;
}

std::vector<double> SimFleet::lb_weights(int64_t pod_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = lb_weights_.find(pod_id);
  return it == lb_weights_.end() ? std::vector<double>{} : it->second;
}

std::map<int64_t, SimNode> SimFleet::nodes() const {
  std::lock_guard<std::mutex> lock(mu_);
  return nodes_;
}

int64_t SimFleet::operations() const {
  std::lock_guard<std::mutex> lock(mu_);
  return operations_;
}

}  // namespace dbnet::proxy
