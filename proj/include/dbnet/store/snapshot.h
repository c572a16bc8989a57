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
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "dbnet/store/catalog.h"
#include "dbnet/store/table.h"

namespace dbnet {

namespace policy {
struct ProcedureDef;
struct TriggerDef;
}  // namespace policy

// One consistent version of the whole store: catalog, rows, procedures and
// triggers. Committed snapshots are immutable; a transaction works on a
// shallow copy and replaces tables copy-on-write.
struct Snapshot {
  std::set<std::string> schemas;
  std::map<std::string, std::shared_ptr<const Table>> tables;  // "schema.name"
  std::map<std::string, std::shared_ptr<const policy::ProcedureDef>> procedures;
  std::vector<std::shared_ptr<const policy::TriggerDef>> triggers;  // by order_key
  int64_t next_trigger_order = 1;

  // Resolves an unqualified name when exactly one schema holds it.
  // Throws UnknownTable / UnknownSchema / MalformedQuery (ambiguous).
  std::string resolve(const TableRef& ref) const;
  const Table& table(const TableRef& ref) const;
  const Table* find_table(const std::string& qualified) const;
  const policy::ProcedureDef* procedure(const std::string& name) const;
};

// Holder of the last committed snapshot. Readers take a shared_ptr and never
// block the writer.
class Database {
 public:
  Database() : current_(std::make_shared<const Snapshot>()) {}

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return current_;
  }

  void publish(std::shared_ptr<const Snapshot> next) {
    std::lock_guard<std::mutex> lock(mu_);
    current_ = std::move(next);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Snapshot> current_;
};

}  // namespace dbnet
