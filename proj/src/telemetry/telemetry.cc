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

#include "dbnet/telemetry/telemetry.h"

#include <set>

#include "dbnet/common/error.h"
#include "dbnet/store/sql_parser.h"

namespace dbnet::telemetry {

namespace {

bool is_hex(const std::string& s, size_t len) {
  if (s.size() != len) return false;
  for (char c : s) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

[[noreturn]] void bad_span(size_t index, const std::string& why) {
  fail(ErrorKind::MalformedSpan, "span " + std::to_string(index) + ": " + why);
}

const char* kSpanIngested = R"(PROC span_ingested(node_id: INT, status: TEXT, latency: INT)
BEGIN
  DECLARE err: INT;
  DECLARE known: INT;
  SET err = 0;
  IF status = 'Error' THEN
    SET err = 1;
  END IF;
  SELECT COUNT(*) INTO known FROM telemetry.NodeMetrics WHERE node_id = :node_id;
  IF known = 0 THEN
    INSERT INTO telemetry.NodeMetrics (node_id, span_count, error_count, latency_sum)
      VALUES (:node_id, 0, 0, 0);
  END IF;
  UPDATE telemetry.NodeMetrics
    SET span_count = span_count + 1,
        error_count = error_count + :err,
        latency_sum = latency_sum + :latency,
        error_rate = (error_count + :err) * 1.0 / (span_count + 1),
        avg_latency = (latency_sum + :latency) * 1.0 / (span_count + 1)
    WHERE node_id = :node_id;
END)";

// Recounts from the Spans table, so it is exact after any deletion.
const char* kRecomputeMetrics = R"(PROC recompute_metrics(node_id: INT)
BEGIN
  DECLARE n: INT;
  DECLARE e: INT;
  DECLARE l: INT;
  DECLARE known: INT;
  SELECT COUNT(*) INTO known FROM telemetry.NodeMetrics WHERE node_id = :node_id;
  IF known = 0 THEN
    RETURN NULL, NULL, NULL;
  END IF;
  SELECT COUNT(*), SUM(latency) INTO n, l FROM telemetry.Spans WHERE node_id = :node_id;
  SELECT COUNT(*) INTO e FROM telemetry.Spans WHERE node_id = :node_id AND status = 'Error';
  IF n > 0 THEN
    UPDATE telemetry.NodeMetrics
      SET span_count = :n, error_count = :e, latency_sum = :l,
          error_rate = :e * 1.0 / :n, avg_latency = :l * 1.0 / :n
      WHERE node_id = :node_id;
  ELSE
    UPDATE telemetry.NodeMetrics
      SET span_count = 0, error_count = 0, latency_sum = 0, error_rate = NULL, avg_latency = NULL
      WHERE node_id = :node_id;
    SET l = 0;
  END IF;
  RETURN n, e, l;
END)";

const char* kSpanRemoved = R"(PROC span_removed(node_id: INT)
BEGIN
  CALL recompute_metrics(node_id);
END)";

// The metrics row goes first so the span deletions below find nothing to
// recompute.
const char* kResetMetrics = R"(PROC reset_metrics(node_id: INT)
BEGIN
  DELETE FROM telemetry.NodeMetrics WHERE node_id = :node_id;
  DELETE FROM telemetry.SpanAttributes WHERE node_id = :node_id;
  DELETE FROM telemetry.Spans WHERE node_id = :node_id;
END)";

TableDef spans_def() {
  TableDef d;
  d.schema = kSchema;
  d.name = "Spans";
  d.columns = {
      column("span_key", ValueKind::Text, {primary_key()}),
      column("trace_id", ValueKind::Text, {not_null()}),
      column("span_id", ValueKind::Text, {not_null()}),
      column("parent_span_id", ValueKind::Text),
      column("name", ValueKind::Text),
      column("node_id", ValueKind::Int, {not_null()}),
      column("start_ts", ValueKind::Timestamp, {not_null()}),
      column("end_ts", ValueKind::Timestamp, {not_null()}),
      column("status", ValueKind::Text, {not_null(), check(parse_expression("status = 'Ok' OR status = 'Error'"))}),
      column("latency", ValueKind::Int, {not_null(), check(parse_expression("latency >= 0"))}),
      column("matched", ValueKind::Bool),
  };
  return d;
}

TableDef attributes_def() {
  TableDef d;
  d.schema = kSchema;
  d.name = "SpanAttributes";
  d.columns = {
      column("span_ref", ValueKind::Text, {not_null()}),
      column("node_id", ValueKind::Int, {not_null()}),
      column("key", ValueKind::Text, {not_null()}),
      column("value", ValueKind::Text),
  };
  return d;
}

TableDef metrics_def() {
  TableDef d;
  d.schema = kSchema;
  d.name = "NodeMetrics";
  d.columns = {
      column("node_id", ValueKind::Int, {primary_key()}),
      column("span_count", ValueKind::Int, {not_null(), check(parse_expression("span_count >= 0"))}),
      column("error_count", ValueKind::Int,
             {not_null(), check(parse_expression("error_count >= 0 AND error_count <= span_count"))}),
      column("latency_sum", ValueKind::Int, {not_null()}),
      column("error_rate", ValueKind::Float),
      column("avg_latency", ValueKind::Float),
  };
  return d;
}

policy::TriggerDef span_trigger(const std::string& name, policy::TriggerEvent event, const std::string& proc) {
  policy::TriggerDef t;
  t.name = name;
  t.table = TableRef::parse(kSpansTable);
  t.event = event;
  t.procedure = proc;
  return t;
}

std::optional<double> opt_float(const Value& v) {
  if (v.is_null()) return std::nullopt;
  return v.as_float();
}

}  // namespace

std::string_view to_string(SpanStatus s) { return s == SpanStatus::Ok ? "Ok" : "Error"; }

std::optional<SpanStatus> parse_span_status(std::string_view s) {
  if (s == "Ok") return SpanStatus::Ok;
  if (s == "Error") return SpanStatus::Error;
  return std::nullopt;
}

Json to_json(const Span& s) {
  Json attrs = Json::array();
  for (const auto& [k, v] : s.attributes) attrs.push_back({{"key", k}, {"value", v}});
  return {{"trace_id", s.trace_id},
          {"span_id", s.span_id},
          {"parent_span_id", s.parent_span_id ? Json(*s.parent_span_id) : Json(nullptr)},
          {"name", s.name},
          {"node_id", s.node_id},
          {"start_ts", s.start_ts.micros},
          {"end_ts", s.end_ts.micros},
          {"status", std::string(to_string(s.status))},
          {"attributes", attrs}};
}

Span span_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::MalformedSpan, "a span must be a JSON object");
  auto text = [&](const char* field) -> std::string {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string()) fail(ErrorKind::MalformedSpan, std::string(field) + " must be a string");
    return it->get<std::string>();
  };
  auto integer = [&](const char* field) -> int64_t {
    auto it = j.find(field);
    if (it == j.end() || !it->is_number_integer()) {
      fail(ErrorKind::MalformedSpan, std::string(field) + " must be an integer");
    }
    return it->get<int64_t>();
  };
  Span s;
  s.trace_id = text("trace_id");
  s.span_id = text("span_id");
  if (auto it = j.find("parent_span_id"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) fail(ErrorKind::MalformedSpan, "parent_span_id must be a string or null");
    s.parent_span_id = it->get<std::string>();
  }
  s.name = j.contains("name") ? text("name") : std::string();
  s.node_id = integer("node_id");
  s.start_ts = Timestamp{integer("start_ts")};
  s.end_ts = Timestamp{integer("end_ts")};
  auto status = parse_span_status(text("status"));
  if (!status) fail(ErrorKind::MalformedSpan, "status must be Ok or Error");
  s.status = *status;
  if (auto it = j.find("attributes"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) fail(ErrorKind::MalformedSpan, "attributes must be an array");
    for (const auto& a : *it) {
      if (!a.is_object() || !a.contains("key") || !a["key"].is_string() || !a.contains("value") ||
          !a["value"].is_string()) {
        fail(ErrorKind::MalformedSpan, "attributes must be {\"key\": string, \"value\": string}");
      }
      s.attributes.emplace_back(a["key"].get<std::string>(), a["value"].get<std::string>());
    }
  }
  return s;
}

Json spans_to_json(const std::vector<Span>& spans) {
  Json out = Json::array();
  for (const auto& s : spans) out.push_back(to_json(s));
  return out;
}

std::vector<Span> spans_from_json(const Json& j) {
  if (!j.is_array()) fail(ErrorKind::MalformedSpan, "a span batch must be a JSON array");
  std::vector<Span> out;
  for (size_t i = 0; i < j.size(); ++i) {
    try {
      out.push_back(span_from_json(j[i]));
    } catch (const Error& e) {
      bad_span(i, e.what());
    }
  }
  return out;
}

void validate(const std::vector<Span>& batch) {
  std::set<std::string> seen;
  for (size_t i = 0; i < batch.size(); ++i) {
    const Span& s = batch[i];
    if (!is_hex(s.trace_id, 32)) bad_span(i, "trace_id must be 32 lowercase hex characters");
    if (!is_hex(s.span_id, 16)) bad_span(i, "span_id must be 16 lowercase hex characters");
    if (s.parent_span_id && !is_hex(*s.parent_span_id, 16)) {
      bad_span(i, "parent_span_id must be 16 lowercase hex characters");
    }
    if (s.node_id < 0) bad_span(i, "node_id must not be negative");
    if (s.end_ts < s.start_ts) bad_span(i, "end_ts is before start_ts");
    if (!seen.insert(s.key()).second) bad_span(i, "span_id " + s.span_id + " repeats within trace " + s.trace_id);
  }
}

SpanFactory::SpanFactory(uint64_t seed, Timestamp start) : rng_(seed), clock_(start.micros) { new_trace(); }

std::string SpanFactory::hex(size_t digits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(digits, '0');
  for (char& c : out) c = kDigits[rng_() & 0xf];
  return out;
}

void SpanFactory::new_trace() {
  trace_id_ = hex(32);
  last_span_.reset();
}

Span SpanFactory::next(int64_t node_id, SpanStatus status, int64_t latency_us) {
  Span s;
  s.trace_id = trace_id_;
  s.span_id = hex(16);
  s.parent_span_id = last_span_;
  s.name = "request";
  s.node_id = node_id;
  s.start_ts = Timestamp{clock_};
  s.end_ts = Timestamp{clock_ + latency_us};
  s.status = status;
  s.attributes = {{"http.method", "GET"}};
  clock_ += 1000;
  last_span_ = s.span_id;
  return s;
}

Json to_json(const NodeMetrics& m) {
  return {{"node_id", m.node_id},
          {"span_count", m.span_count},
          {"error_count", m.error_count},
          {"latency_sum", m.latency_sum},
          {"error_rate", m.error_rate ? Json(*m.error_rate) : Json(nullptr)},
          {"avg_latency", m.avg_latency ? Json(*m.avg_latency) : Json(nullptr)}};
}

std::vector<Command> setup_commands() {
  return {
      CreateSchemaCmd{kSchema},
      CreateTableCmd{spans_def()},
      CreateTableCmd{attributes_def()},
      CreateTableCmd{metrics_def()},
      CreateProcedureCmd{kSpanIngested},
      CreateProcedureCmd{kRecomputeMetrics},
      CreateProcedureCmd{kSpanRemoved},
      CreateProcedureCmd{kResetMetrics},
      CreateTriggerCmd{span_trigger("span_ingest", policy::TriggerEvent::AfterInsert, "span_ingested")},
      CreateTriggerCmd{span_trigger("span_remove", policy::TriggerEvent::AfterDelete, "span_removed")},
  };
}

IngestResult ingest_spans(Kernel& kernel, const std::vector<Span>& batch, const std::string& user,
                          const TelemetryConfig& config) {
  if (batch.empty()) return {};
  return ingest_spans(kernel, batch,
                      RequestContext{user, {provenance::CauseKind::TelemetryBatch, kernel.next_request_id()}},
                      config);
}

IngestResult ingest_spans(Kernel& kernel, const std::vector<Span>& batch, const RequestContext& ctx,
                          const TelemetryConfig& config) {
  IngestResult result;
  if (batch.empty()) return result;
  validate(batch);
  result.batch_id = ctx.root.ref_id;
  kernel.transact(ctx, [&](TxnId txn) {
    std::set<int64_t> known;
    if (kernel.snapshot()->find_table(config.node_table)) {
      SelectQuery q;
      q.table = TableRef::parse(config.node_table);
      q.projections.push_back({std::nullopt, ColumnRef{{}, config.node_column}, {}});
      for (const auto& r : kernel.select(q, txn).rows) {
        if (!r[0].is_null()) known.insert(r[0].as_int());
      }
    }
    const TableRef spans = TableRef::parse(kSpansTable);
    const TableRef attrs = TableRef::parse(kAttributesTable);
    for (const Span& s : batch) {
      // Attributes first: if a trigger on this span resets the node, they
      // are removed together with it.
      for (const auto& [k, v] : s.attributes) {
        kernel.insert(txn, attrs, {{"span_ref", s.key()}, {"node_id", s.node_id}, {"key", k}, {"value", v}});
      }
      kernel.insert(txn, spans,
                    {{"span_key", s.key()},
                     {"trace_id", s.trace_id},
                     {"span_id", s.span_id},
                     {"parent_span_id", s.parent_span_id ? Value(*s.parent_span_id) : Value::null()},
                     {"name", s.name},
                     {"node_id", s.node_id},
                     {"start_ts", s.start_ts},
                     {"end_ts", s.end_ts},
                     {"status", std::string(to_string(s.status))},
                     {"latency", s.latency()},
                     {"matched", known.count(s.node_id) > 0}});
      ++result.accepted;
    }
  });
  return result;
}

NodeMetrics get_metrics(Kernel& kernel, int64_t node_id) {
  if (node_id < 0) fail(ErrorKind::UnknownNode, "node ids are never negative");
  auto snap = kernel.snapshot();
  const Table* table = snap->find_table(kMetricsTable);
  std::optional<RowId> id = table ? table->find_by_key(Value(node_id)) : std::nullopt;
  if (!id) fail(ErrorKind::UnknownNode, "no metrics for node " + std::to_string(node_id));
  const Cells& c = table->find(*id)->cells;
  NodeMetrics m;
  m.node_id = node_id;
  m.span_count = c.at("span_count").as_int();
  m.error_count = c.at("error_count").as_int();
  m.latency_sum = c.at("latency_sum").as_int();
  m.error_rate = opt_float(c.at("error_rate"));
  m.avg_latency = opt_float(c.at("avg_latency"));
  return m;
}

}  // namespace dbnet::telemetry
