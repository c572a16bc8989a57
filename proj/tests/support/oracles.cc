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

#include "support/oracles.h"

#include <cmath>

namespace dbnet::testing {

namespace {

void add(telemetry::NodeMetrics& m, bool error, int64_t latency) {
  m.span_count += 1;
  m.error_count += error ? 1 : 0;
  m.latency_sum += latency;
}

void finish(std::map<int64_t, telemetry::NodeMetrics>& out) {
  for (auto& [id, m] : out) {
    m.node_id = id;
    if (m.span_count > 0) {
      m.error_rate = static_cast<double>(m.error_count) / static_cast<double>(m.span_count);
      m.avg_latency = static_cast<double>(m.latency_sum) / static_cast<double>(m.span_count);
    }
  }
}

bool close(const std::optional<double>& a, const std::optional<double>& b, double tol) {
  if (a.has_value() != b.has_value()) return false;
  return !a || std::fabs(*a - *b) <= tol * std::max(1.0, std::fabs(*b));
}

}  // namespace

std::map<int64_t, telemetry::NodeMetrics> metrics_from_spans(const std::vector<telemetry::Span>& spans) {
  std::map<int64_t, telemetry::NodeMetrics> out;
  for (const auto& s : spans) {
    add(out[s.node_id], s.status == telemetry::SpanStatus::Error, s.end_ts.micros - s.start_ts.micros);
  }
  finish(out);
  return out;
}

std::map<int64_t, telemetry::NodeMetrics> metrics_from_table(const Snapshot& snap) {
  std::map<int64_t, telemetry::NodeMetrics> out;
  const Table* spans = snap.find_table(telemetry::kSpansTable);
  if (!spans) return out;
  for (const auto& [id, row] : spans->rows()) {
    const Cells& c = row->cells;
    add(out[c.at("node_id").as_int()], c.at("status").as_text() == "Error",
        c.at("end_ts").as_timestamp().micros - c.at("start_ts").as_timestamp().micros);
  }
  finish(out);
  return out;
}

bool same_metrics(const telemetry::NodeMetrics& a, const telemetry::NodeMetrics& b, double tol) {
  return a.node_id == b.node_id && a.span_count == b.span_count && a.error_count == b.error_count &&
         a.latency_sum == b.latency_sum && close(a.error_rate, b.error_rate, tol) &&
         close(a.avg_latency, b.avg_latency, tol);
}

StoreImage replay_cdc(const std::vector<provenance::LogEntry>& log) {
  StoreImage out;
  for (const auto& e : log) {
    if (!e.is_mutation() || !e.table || !e.row_id) continue;
    TableImage& t = out[*e.table];
    if (e.kind == provenance::LogKind::Delete) {
      t.erase(*e.row_id);
    } else if (e.new_cells) {
      t[*e.row_id] = *e.new_cells;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.empty(); });
  return out;
}

StoreImage store_image(const Snapshot& snap) {
  StoreImage out;
  for (const auto& [name, table] : snap.tables) {
    if (table->def().cdc_exempt || table->size() == 0) continue;
    TableImage& t = out[name];
    for (const auto& [id, row] : table->rows()) t[id] = row->cells;
  }
  return out;
}

std::string diff_images(const StoreImage& expected, const StoreImage& actual) {
  for (const auto& [name, rows] : expected) {
    auto it = actual.find(name);
    if (it == actual.end()) return name + ": expected " + std::to_string(rows.size()) + " rows, table is empty";
    for (const auto& [id, cells] : rows) {
      auto r = it->second.find(id);
      if (r == it->second.end()) return name + " row " + std::to_string(id) + " is missing";
      if (r->second != cells) return name + " row " + std::to_string(id) + " differs";
    }
    if (it->second.size() != rows.size()) {
      return name + ": expected " + std::to_string(rows.size()) + " rows, found " + std::to_string(it->second.size());
    }
  }
  for (const auto& [name, rows] : actual) {
    if (!expected.count(name)) return name + ": " + std::to_string(rows.size()) + " unexpected rows";
  }
  return {};
}

}  // namespace dbnet::testing
