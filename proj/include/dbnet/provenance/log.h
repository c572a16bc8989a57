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
#include "dbnet/store/codec.h"
#include "dbnet/store/snapshot.h"
#include "dbnet/store/table.h"

namespace dbnet::provenance {

enum class LogKind {
  Insert,
  Update,
  Delete,
  ProcCall,
  TriggerFire,
  ExternalCall,
  ProcRegister,
  TriggerRegister,
  Commit,
  Rollback,
  AuthDeny,
  CompensationPending,
};

std::string_view to_string(LogKind k);
std::optional<LogKind> parse_log_kind(std::string_view s);

// ExternalRequest and TelemetryBatch are roots whose ref_id is a request or
// batch id. The other two point at a log entry: ProcInvocation at the
// ProcCall entry of the running procedure, TriggerActivation at the entry
// that activated it (the mutation for a TriggerFire, the TriggerFire for
// the ProcCall it starts, the mutation for an outbox ExternalCall).
enum class CauseKind { ExternalRequest, TelemetryBatch, ProcInvocation, TriggerActivation };

std::string_view to_string(CauseKind k);
std::optional<CauseKind> parse_cause_kind(std::string_view s);

struct Cause {
  CauseKind kind = CauseKind::ExternalRequest;
  int64_t ref_id = 0;

  bool is_root() const { return kind == CauseKind::ExternalRequest || kind == CauseKind::TelemetryBatch; }
  bool operator==(const Cause&) const = default;
};

struct LogEntry {
  int64_t log_id = 0;
  Timestamp ts;
  std::string user;
  int64_t txn = 0;  // 0 for entries appended outside a transaction
  LogKind kind = LogKind::Insert;
  std::optional<std::string> table;  // schema-qualified
  std::optional<RowId> row_id;
  std::optional<Cells> old_cells;
  std::optional<Cells> new_cells;
  std::string detail;
  Cause cause;

  bool is_mutation() const {
    return kind == LogKind::Insert || kind == LogKind::Update || kind == LogKind::Delete;
  }
  bool operator==(const LogEntry&) const = default;
};

constexpr const char* kLogSchema = "dbnet";
constexpr const char* kLogTableName = "log";
constexpr const char* kLogTable = "dbnet.log";

// The cdc-exempt table that holds the materialised log; row_id == log_id.
TableDef log_table_def();

Cells encode(const LogEntry& e);
// Cell maps are decoded against the kinds of the table they describe when
// it exists in `snap`.
LogEntry decode(const Row& row, const Snapshot& snap);

struct LogFilter {
  std::optional<std::string> user;
  std::optional<std::string> table;
  std::optional<LogKind> kind;
  std::optional<Timestamp> from;  // inclusive
  std::optional<Timestamp> to;    // inclusive
};

// Entries matching every given field, ascending log_id.
std::vector<LogEntry> query_log(const Snapshot& snap, const LogFilter& filter = {});
std::optional<LogEntry> find_entry(const Snapshot& snap, int64_t log_id);

constexpr size_t kMaxTraceLength = 64;

struct TraceResult {
  std::vector<LogEntry> chain;  // queried entry first
  Cause root;

  // Entry kinds followed by the root cause kind.
  std::vector<std::string> kinds() const;
};

// Follows causes back to a root. Throws UnknownLogId, or BrokenChain when a
// cause points nowhere or the chain exceeds kMaxTraceLength.
TraceResult trace(const Snapshot& snap, int64_t log_id);

std::string format_iso8601(Timestamp ts);
Json to_json(const LogEntry& e);
// One JSON object per line.
std::string export_ndjson(const std::vector<LogEntry>& entries);

}  // namespace dbnet::provenance
