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

#include "dbnet/provenance/log.h"

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>

#include "dbnet/common/error.h"

namespace dbnet::provenance {

namespace {

constexpr std::array<std::string_view, 12> kLogKindNames = {
    "Insert",       "Update",          "Delete",         "ProcCall", "TriggerFire",
    "ExternalCall", "ProcRegister",    "TriggerRegister", "Commit",  "Rollback",
    "AuthDeny",     "CompensationPending"};

constexpr std::array<std::string_view, 4> kCauseKindNames = {
    "ExternalRequest", "TelemetryBatch", "ProcInvocation", "TriggerActivation"};

const Value& cell(const Row& row, const char* name) { return row.cells.at(name); }

std::optional<Cells> decode_cells(const Value& v, const TableDef* def) {
  if (v.is_null()) return std::nullopt;
  return cells_from_json(Json::parse(v.as_text()), def);
}

}  // namespace

std::string_view to_string(LogKind k) { return kLogKindNames[static_cast<size_t>(k)]; }

std::optional<LogKind> parse_log_kind(std::string_view s) {
  for (size_t i = 0; i < kLogKindNames.size(); ++i) {
    if (kLogKindNames[i] == s) return static_cast<LogKind>(i);
  }
  return std::nullopt;
}

std::string_view to_string(CauseKind k) { return kCauseKindNames[static_cast<size_t>(k)]; }

std::optional<CauseKind> parse_cause_kind(std::string_view s) {
  for (size_t i = 0; i < kCauseKindNames.size(); ++i) {
    if (kCauseKindNames[i] == s) return static_cast<CauseKind>(i);
  }
  return std::nullopt;
}

TableDef log_table_def() {
  TableDef def;
  def.schema = kLogSchema;
  def.name = kLogTableName;
  def.cdc_exempt = true;
  def.columns = {
      column("log_id", ValueKind::Int, {primary_key()}),
      column("ts", ValueKind::Timestamp, {not_null()}),
      column("user", ValueKind::Text, {not_null()}),
      column("txn", ValueKind::Int, {not_null()}),
      column("kind", ValueKind::Text, {not_null()}),
      column("table", ValueKind::Text),
      column("row_id", ValueKind::Int),
      column("old_cells", ValueKind::Text),
      column("new_cells", ValueKind::Text),
      column("detail", ValueKind::Text),
      column("cause_kind", ValueKind::Text, {not_null()}),
      column("cause_ref", ValueKind::Int, {not_null()}),
  };
  return def;
}

Cells encode(const LogEntry& e) {
  Cells c;
  c["log_id"] = Value(e.log_id);
  c["ts"] = Value(e.ts);
  c["user"] = Value(e.user);
  c["txn"] = Value(e.txn);
  c["kind"] = Value(std::string(to_string(e.kind)));
  c["table"] = e.table ? Value(*e.table) : Value::null();
  c["row_id"] = e.row_id ? Value(*e.row_id) : Value::null();
  c["old_cells"] = e.old_cells ? Value(cells_to_json(*e.old_cells).dump()) : Value::null();
  c["new_cells"] = e.new_cells ? Value(cells_to_json(*e.new_cells).dump()) : Value::null();
  c["detail"] = Value(e.detail);
  c["cause_kind"] = Value(std::string(to_string(e.cause.kind)));
  c["cause_ref"] = Value(e.cause.ref_id);
  return c;
}

LogEntry decode(const Row& row, const Snapshot& snap) {
  LogEntry e;
  e.log_id = cell(row, "log_id").as_int();
  e.ts = cell(row, "ts").as_timestamp();
  e.user = cell(row, "user").as_text();
  e.txn = cell(row, "txn").as_int();
  auto kind = parse_log_kind(cell(row, "kind").as_text());
  if (!kind) fail(ErrorKind::BrokenChain, "log entry " + std::to_string(e.log_id) + " has an unknown kind");
  e.kind = *kind;
  const TableDef* def = nullptr;
  if (const Value& t = cell(row, "table"); !t.is_null()) {
    e.table = t.as_text();
    if (const Table* tbl = snap.find_table(*e.table)) def = &tbl->def();
  }
  if (const Value& r = cell(row, "row_id"); !r.is_null()) e.row_id = r.as_int();
  e.old_cells = decode_cells(cell(row, "old_cells"), def);
  e.new_cells = decode_cells(cell(row, "new_cells"), def);
  if (const Value& d = cell(row, "detail"); !d.is_null()) e.detail = d.as_text();
  auto ck = parse_cause_kind(cell(row, "cause_kind").as_text());
  if (!ck) fail(ErrorKind::BrokenChain, "log entry " + std::to_string(e.log_id) + " has an unknown cause");
  e.cause = {*ck, cell(row, "cause_ref").as_int()};
  return e;
}

std::vector<LogEntry> query_log(const Snapshot& snap, const LogFilter& f) {
  std::vector<LogEntry> out;
  const Table* log = snap.find_table(kLogTable);
  if (!log) return out;
  for (const auto& [id, row] : log->rows()) {
    const Cells& c = row->cells;
    if (f.user && c.at("user").as_text() != *f.user) continue;
    if (f.kind && c.at("kind").as_text() != to_string(*f.kind)) continue;
    if (f.table) {
      const Value& t = c.at("table");
      if (t.is_null()) continue;
      // An unqualified filter matches the table name in any schema.
      const std::string& name = t.as_text();
      bool match = name == *f.table ||
                   (f.table->find('.') == std::string::npos && name.size() > f.table->size() &&
                    name.compare(name.size() - f.table->size() - 1, std::string::npos, "." + *f.table) == 0);
      if (!match) continue;
    }
    Timestamp ts = c.at("ts").as_timestamp();
    if (f.from && ts < *f.from) continue;
    if (f.to && ts > *f.to) continue;
    out.push_back(decode(*row, snap));
  }
  return out;
}

std::optional<LogEntry> find_entry(const Snapshot& snap, int64_t log_id) {
  const Table* log = snap.find_table(kLogTable);
  if (!log) return std::nullopt;
  const Row* row = log->find(log_id);
  if (!row) return std::nullopt;
  return decode(*row, snap);
}

std::vector<std::string> TraceResult::kinds() const {
  std::vector<std::string> out;
  for (const auto& e : chain) out.emplace_back(to_string(e.kind));
  out.emplace_back(to_string(root.kind));
  return out;
}

TraceResult trace(const Snapshot& snap, int64_t log_id) {
  auto first = find_entry(snap, log_id);
  if (!first) fail(ErrorKind::UnknownLogId, "no log entry " + std::to_string(log_id));
  TraceResult r;
  r.chain.push_back(std::move(*first));
  while (!r.chain.back().cause.is_root()) {
    const LogEntry& at = r.chain.back();
    if (r.chain.size() >= kMaxTraceLength) {
      fail(ErrorKind::BrokenChain, "trace from " + std::to_string(log_id) + " exceeds " +
                                       std::to_string(kMaxTraceLength) + " entries");
    }
    if (at.cause.ref_id >= at.log_id) {
      fail(ErrorKind::BrokenChain, "log entry " + std::to_string(at.log_id) +
                                       " points forward to " + std::to_string(at.cause.ref_id));
    }
    auto parent = find_entry(snap, at.cause.ref_id);
    if (!parent) {
      fail(ErrorKind::BrokenChain, "log entry " + std::to_string(at.log_id) + " points at missing entry " +
                                       std::to_string(at.cause.ref_id));
    }
    r.chain.push_back(std::move(*parent));
  }
  r.root = r.chain.back().cause;
  return r;
}

std::string format_iso8601(Timestamp ts) {
  int64_t secs = ts.micros / 1000000;
  int64_t micros = ts.micros % 1000000;
  if (micros < 0) {
    micros += 1000000;
    secs -= 1;
  }
  std::time_t t = static_cast<std::time_t>(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(micros));
  return buf;
}

Json to_json(const LogEntry& e) {
  Json j;
  j["log_id"] = e.log_id;
  j["ts"] = format_iso8601(e.ts);
  j["user"] = e.user;
  j["txn"] = e.txn;
  j["kind"] = std::string(to_string(e.kind));
  j["table"] = e.table ? Json(*e.table) : Json(nullptr);
  j["row_id"] = e.row_id ? Json(*e.row_id) : Json(nullptr);
  j["old_cells"] = e.old_cells ? cells_to_json(*e.old_cells) : Json(nullptr);
  j["new_cells"] = e.new_cells ? cells_to_json(*e.new_cells) : Json(nullptr);
  j["detail"] = e.detail;
  j["cause"] = {{"kind", std::string(to_string(e.cause.kind))}, {"ref_id", e.cause.ref_id}};
  return j;
}

std::string export_ndjson(const std::vector<LogEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

}  // namespace dbnet::provenance
