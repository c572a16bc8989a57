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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dbnet/common/value.h"
#include "dbnet/store/catalog.h"
#include "dbnet/store/table.h"

namespace dbnet::proxy {

enum class DeviceAction { Create, Delete, SetState };

std::string_view to_string(DeviceAction a);

// A committed change to a device-backed row, waiting in the outbox.
struct DeviceCommand {
  int64_t command_id = 0;
  DeviceKind device_kind = DeviceKind::Node;
  DeviceAction action = DeviceAction::SetState;
  Cells payload;  // the row's cells (new cells, or old cells for Delete)
  int64_t origin_log_id = 0;
  std::string table;
  RowId row_id = 0;
};

// Identity column for each device family: Node rows are keyed by nodeId,
// auto-scaler and load-balancer rows by podId.
std::string_view identity_column(DeviceKind kind);

// Name a command is matched under by failure injection.
std::string sync_call_name(DeviceKind kind);

struct FailureRule {
  std::string action;  // a call name, or "*" for any
  int count = 0;
};

// The fleet as seen from the kernel. call() serves EXTERNAL statements;
// apply() serves outbox reconciliation.
class DeviceApi {
 public:
  virtual ~DeviceApi() = default;
  // create_node(pod_id) -> [node_id]; kill_node(node_id) -> [];
  // set_weights(pod_id, w...) -> []. Throws UnknownExternal or DeviceError.
  virtual std::vector<Value> call(const std::string& name, const std::vector<Value>& args) = 0;
  // Throws DeviceError.
  virtual void apply(const DeviceCommand& cmd) = 0;
  // Throws UnknownDevice.
  virtual Cells get_device_state(DeviceKind kind, int64_t id) = 0;
  virtual void inject_failure(const FailureRule& rule) = 0;
};

}  // namespace dbnet::proxy
