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

#include "dbnet/proxy/outbox.h"

#include "dbnet/common/error.h"

namespace dbnet::proxy {

std::string_view to_string(SyncState s) {
  switch (s) {
    case SyncState::Pending: return "Pending";
    case SyncState::InSync: return "InSync";
    case SyncState::Error: return "Error";
  }
  return "?";
}

Outbox::Outbox(std::shared_ptr<DeviceApi> devices, RetryPolicy retry)
    : devices_(std::move(devices)), retry_(retry) {}

Outbox::~Outbox() { stop_worker(); }

void Outbox::enqueue(std::vector<DeviceCommand> commands) {
  if (commands.empty()) return;
  {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& c : commands) {
      SyncStatus& s = status_[{c.table, c.row_id}];
      s.table = c.table;
      s.row_id = c.row_id;
      s.state = SyncState::Pending;
      s.attempts = 0;
      s.last_error.reset();
      queue_.push_back(std::move(c));
    }
  }
  cv_.notify_all();
}

size_t Outbox::drain() {
  std::lock_guard<std::mutex> serial(drain_mu_);
  size_t applied = 0;
  for (;;) {
    DeviceCommand cmd;
    {
      std::lock_guard<std::mutex> lock(mu_);
      if (queue_.empty()) break;
      cmd = std::move(queue_.front());
      queue_.pop_front();
    }
    SyncStatus result{cmd.table, cmd.row_id, SyncState::Pending, 0, std::nullopt};
    auto delay = retry_.base;
    for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(delay);
        delay *= retry_.multiplier;
      }
      ++result.attempts;
      try {
        if (!devices_) fail(ErrorKind::DeviceError, "no device fleet attached");
        devices_->apply(cmd);
        result.state = SyncState::InSync;
        result.last_error.reset();
        break;
      } catch (const Error& e) {
        result.state = SyncState::Error;
        result.last_error = e.what();
      }
    }
    if (result.state == SyncState::InSync) ++applied;
    {
      std::lock_guard<std::mutex> lock(mu_);
      // A later command for the same row may already be queued; its Pending
      // state wins over this outcome.
      bool superseded = false;
      for (const auto& q : queue_) {
        if (q.table == cmd.table && q.row_id == cmd.row_id) superseded = true;
      }
      if (!superseded) status_[{cmd.table, cmd.row_id}] = result;
    }
    if (observer_) observer_(cmd, result);
  }
  return applied;
}

size_t Outbox::pending() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queue_.size();
}

std::optional<SyncStatus> Outbox::status(const std::string& table, RowId row_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = status_.find({table, row_id});
  if (it == status_.end()) return std::nullopt;
  return it->second;
}

std::vector<SyncStatus> Outbox::statuses() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<SyncStatus> out;
  for (const auto& [k, s] : status_) out.push_back(s);
  return out;
}

void Outbox::start_worker() {
  std::lock_guard<std::mutex> lock(mu_);
  if (worker_.joinable()) return;
  stop_ = false;
  worker_ = std::thread([this] {
    for (;;) {
      {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [this] { return stop_ || !queue_.empty(); });
        if (stop_) return;
      }
      drain();
    }
  });
}

void Outbox::stop_worker() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

}  // namespace dbnet::proxy
