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

#include <chrono>
#include <map>
#include <mutex>

#include "dbnet/proxy/device.h"

namespace dbnet::proxy {

struct SimNode {
  int64_t pod_id = 0;
  bool alive = true;
  Cells state;  // last reconciled row cells
};

// In-process stand-in for a cluster API. Node ids are never reused and a
// killed node never comes back.
class SimFleet final : public DeviceApi {
 public:
  explicit SimFleet(std::chrono::microseconds provisioning_delay = std::chrono::milliseconds(100))
      : provisioning_delay_(provisioning_delay) {}

  std::vector<Value> call(const std::string& name, const std::vector<Value>& args) override;
  void apply(const DeviceCommand& cmd) override;
  Cells get_device_state(DeviceKind kind, int64_t id) override;
  void inject_failure(const FailureRule& rule) override;

  std::chrono::microseconds provisioning_delay() const { return provisioning_delay_; }
  void set_provisioning_delay(std::chrono::microseconds d) { provisioning_delay_ = d; }

  std::vector<double> lb_weights(int64_t pod_id) const;
  std::map<int64_t, SimNode> nodes() const;
  // Total calls and applications that reached the fleet, failed or not.
  int64_t operations() const;

 private:
  // Consumes one injected failure matching `action`; true means fail.
  bool take_failure(const std::string& action);
  void rebalance(int64_t pod_id);

  mutable std::mutex mu_;
  std::chrono::microseconds provisioning_delay_;
  std::map<int64_t, SimNode> nodes_;
  std::map<int64_t, Cells> autoscalers_;
  std::map<int64_t, Cells> load_balancers_;
  std::map<int64_t, std::vector<double>> lb_weights_;
  std::map<std::string, int> failures_;
  int64_t operations_ = 0;
};

}  // namespace dbnet::proxy
