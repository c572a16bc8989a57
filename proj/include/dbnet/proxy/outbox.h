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
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "dbnet/proxy/device.h"

namespace dbnet::proxy {

enum class SyncState { Pending, InSync, Error };

std::string_view to_string(SyncState s);

struct SyncStatus {
  std::string table;
  RowId row_id = 0;
  SyncState state = SyncState::Pending;
  int attempts = 0;
  std::optional<std::string> last_error;
};

struct RetryPolicy {
  std::chrono::microseconds base = std::chrono::milliseconds(50);
  int multiplier = 2;
  int max_retries = 3;
};

// Outcome of one command, reported once it is InSync or Error.
using ApplyObserver = std::function<void(const DeviceCommand&, const SyncStatus&)>;

// Commands released by committed transactions, applied to the fleet in
// command_id order.
class Outbox {
 public:
  Outbox(std::shared_ptr<DeviceApi> devices, RetryPolicy retry = {});
  ~Outbox();

  void set_observer(ApplyObserver observer) { observer_ = std::move(observer); }
  void set_retry_policy(RetryPolicy retry) { retry_ = retry; }

  // Called at commit, in commit order.
  void enqueue(std::vector<DeviceCommand> commands);
  // Applies everything pending; returns the number of commands that
  // reached InSync.
  size_t drain();
  size_t pending() const;

  std::optional<SyncStatus> status(const std::string& table, RowId row_id) const;
  std::vector<SyncStatus> statuses() const;

  // Background worker that drains whenever commands arrive.
  void start_worker();
  void stop_worker();

 private:
  std::shared_ptr<DeviceApi> devices_;
  RetryPolicy retry_;
  ApplyObserver observer_;

  mutable std::mutex mu_;
  std::deque<DeviceCommand> queue_;
  std::map<std::pair<std::string, RowId>, SyncStatus> status_;
  std::mutex drain_mu_;

  std::condition_variable cv_;
  bool stop_ = false;
  std::thread worker_;
};

}  // namespace dbnet::proxy
