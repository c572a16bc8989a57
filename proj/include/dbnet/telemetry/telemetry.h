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
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dbnet/store/codec.h"
#include "dbnet/txn/kernel.h"

namespace dbnet::telemetry {

enum class SpanStatus { Ok, Error };

std::string_view to_string(SpanStatus s);
std::optional<SpanStatus> parse_span_status(std::string_view s);

struct Span {
  std::string trace_id;  // 32 lowercase hex
  std::string span_id;   // 16 lowercase hex
  std::optional<std::string> parent_span_id;
  std::string name;
  int64_t node_id = 0;
  Timestamp start_ts;
  Timestamp end_ts;
  SpanStatus status = SpanStatus::Ok;
  std::vector<std::pair<std::string, std::string>> attributes;

  int64_t latency() const { return end_ts.micros - start_ts.micros; }
  std::string key() const { return trace_id + "/" + span_id; }
  bool operator==(const Span&) const = default;
};

// Wire format: the field names above, timestamps as integer microseconds,
// attributes as [{"key": .., "value": ..}].
Json to_json(const Span& s);
Span span_from_json(const Json& j);
Json spans_to_json(const std::vector<Span>& spans);
std::vector<Span> spans_from_json(const Json& j);

// Throws MalformedSpan naming the first offending span.
void validate(const std::vector<Span>& batch);

// Deterministic synthetic spans: ids come from a seeded generator, start
// times advance by one millisecond per span.
class SpanFactory {
 public:
  explicit SpanFactory(uint64_t seed, Timestamp start = Timestamp{1'700'000'000'000'000});

  Span next(int64_t node_id, SpanStatus status, int64_t latency_us);
  // A fresh trace id; later spans join it until the next call.
  void new_trace();

 private:
  std::string hex(size_t digits);

  std::mt19937_64 rng_;
  int64_t clock_;
  std::string trace_id_;
  std::optional<std::string> last_span_;
};

struct NodeMetrics {
  int64_t node_id = 0;
  int64_t span_count = 0;
  int64_t error_count = 0;
  int64_t latency_sum = 0;  // microseconds
  std::optional<double> error_rate;
  std::optional<double> avg_latency;
};

Json to_json(const NodeMetrics& m);

inline constexpr const char* kSchema = "telemetry";
inline constexpr const char* kSpansTable = "telemetry.Spans";
inline constexpr const char* kAttributesTable = "telemetry.SpanAttributes";
inline constexpr const char* kMetricsTable = "telemetry.NodeMetrics";

struct TelemetryConfig {
  // Where ingest looks up node ids to set Spans.matched. Spans for unknown
  // nodes are stored either way.
  std::string node_table = "net.Nodes";
  std::string node_column = "nodeId";
};

// The telemetry schema, its three tables, the span_ingested, span_removed,
// recompute_metrics and reset_metrics procedures, and the two Spans
// triggers that keep NodeMetrics current.
std::vector<Command> setup_commands();

struct IngestResult {
  size_t accepted = 0;
  int64_t batch_id = 0;  // the TelemetryBatch root; 0 for an empty batch
};

// One transaction per batch. A malformed span or any failure inside the
// batch leaves none of its spans stored.
IngestResult ingest_spans(Kernel& kernel, const std::vector<Span>& batch, const std::string& user,
                          const TelemetryConfig& config = {});
// Same, under a root the caller already allocated (normally TelemetryBatch).
IngestResult ingest_spans(Kernel& kernel, const std::vector<Span>& batch, const RequestContext& ctx,
                          const TelemetryConfig& config = {});

// Committed metrics. Throws UnknownNode when the node has no metrics row.
NodeMetrics get_metrics(Kernel& kernel, int64_t node_id);

}  // namespace dbnet::telemetry
