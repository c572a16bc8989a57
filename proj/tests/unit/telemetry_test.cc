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

#include <doctest.h>

#include <random>
#include <thread>

#include "dbnet/common/error.h"
#include "support/fixtures.h"
#include "support/oracles.h"

using namespace dbnet;
using namespace dbnet::telemetry;
using dbnet::testing::KernelFixture;

namespace {

struct TelemetryFixture : KernelFixture {
  TelemetryFixture() { kernel->execute_atomic(setup_commands(), kernel->request("admin")); }

  size_t stored() const { return kernel->snapshot()->table(TableRef::parse(kSpansTable)).size(); }
};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("three Ok spans roll up into count, rate and mean") {
  TelemetryFixture f;
  SpanFactory gen(1);
  std::vector<Span> batch = {gen.next(1, SpanStatus::Ok, 10'000), gen.next(1, SpanStatus::Ok, 20'000),
                             gen.next(1, SpanStatus::Ok, 30'000)};
  CHECK(ingest_spans(*f.kernel, batch, "collector").accepted == 3);
  NodeMetrics m = get_metrics(*f.kernel, 1);
  CHECK(m.span_count == 3);
  CHECK(m.error_count == 0);
  CHECK(*m.error_rate == 0.0);
  CHECK(*m.avg_latency == doctest::Approx(20'000.0));
  CHECK(dbnet::testing::same_metrics(m, dbnet::testing::metrics_from_spans(batch).at(1)));
}

TEST_CASE("an empty batch touches nothing") {
  TelemetryFixture f;
  size_t before = f.kernel->query_log().size();
  IngestResult r = ingest_spans(*f.kernel, {}, "collector");
  CHECK(r.accepted == 0);
  CHECK(r.batch_id == 0);
  CHECK(f.kernel->query_log().size() == before);
}

TEST_CASE("one Ok and one Error span give rate one half") {
  TelemetryFixture f;
  SpanFactory gen(2);
  ingest_spans(*f.kernel, {gen.next(4, SpanStatus::Ok, 100), gen.next(4, SpanStatus::Error, 300)}, "c");
  NodeMetrics m = get_metrics(*f.kernel, 4);
  CHECK(*m.error_rate == 0.5);
  CHECK(*m.avg_latency == 200.0);
}

TEST_CASE("a malformed span anywhere rejects the whole batch") {
  TelemetryFixture f;
  SpanFactory gen(3);
  for (int bad = 0; bad < 4; ++bad) {
    std::vector<Span> batch;
    for (int i = 0; i < 4; ++i) batch.push_back(gen.next(1, SpanStatus::Ok, 5));
    switch (bad) {
      case 0: batch[0].trace_id = "XYZ"; break;
      case 1: batch[1].span_id = "ABCDEF0123456789"; break;
      case 2: batch[2].end_ts = Timestamp{batch[2].start_ts.micros - 1}; break;
      case 3: batch[3].span_id = batch[0].span_id; batch[3].trace_id = batch[0].trace_id; break;
    }
    CHECK(kind_of([&] { ingest_spans(*f.kernel, batch, "c"); }) == ErrorKind::MalformedSpan);
  }
  CHECK(f.stored() == 0);
  CHECK(kind_of([&] { get_metrics(*f.kernel, 1); }) == ErrorKind::UnknownNode);
}

TEST_CASE("a span already stored fails its batch atomically") {
  TelemetryFixture f;
  SpanFactory gen(4);
  Span first = gen.next(1, SpanStatus::Ok, 5);
  ingest_spans(*f.kernel, {first}, "c");
  std::vector<Span> batch = {gen.next(1, SpanStatus::Ok, 5), first};
  CHECK(kind_of([&] { ingest_spans(*f.kernel, batch, "c"); }) == ErrorKind::ConstraintViolation);
  CHECK(f.stored() == 1);
  CHECK(get_metrics(*f.kernel, 1).span_count == 1);
}

TEST_CASE("deleting a node's spans leaves Null derived metrics") {
  TelemetryFixture f;
  SpanFactory gen(5);
  ingest_spans(*f.kernel, {gen.next(2, SpanStatus::Error, 10), gen.next(2, SpanStatus::Ok, 30),
                           gen.next(3, SpanStatus::Ok, 7)},
               "c");
  f.kernel->execute_atomic({SqlCmd{"DELETE FROM telemetry.Spans WHERE node_id = 2"}}, f.kernel->request("ops"));
  NodeMetrics m = get_metrics(*f.kernel, 2);
  CHECK(m.span_count == 0);
  CHECK(m.latency_sum == 0);
  CHECK(!m.error_rate);
  CHECK(!m.avg_latency);
  CHECK(get_metrics(*f.kernel, 3).span_count == 1);
}

TEST_CASE("reset_metrics removes the node's spans, attributes and metrics") {
  TelemetryFixture f;
  SpanFactory gen(6);
  ingest_spans(*f.kernel, {gen.next(2, SpanStatus::Error, 10), gen.next(5, SpanStatus::Ok, 30)}, "c");
  f.kernel->call_procedure("reset_metrics", {Value(2)}, f.kernel->request("ops"));
  CHECK(kind_of([&] { get_metrics(*f.kernel, 2); }) == ErrorKind::UnknownNode);
  CHECK(f.stored() == 1);
  CHECK(f.kernel->snapshot()->table(TableRef::parse(kAttributesTable)).size() == 1);
  auto out = f.kernel->call_procedure("recompute_metrics", {Value(2)}, f.kernel->request("ops"));
  REQUIRE(out.size() == 3);
  CHECK(out[0].is_null());
}

TEST_CASE("negative and unseen node ids are unknown") {
  TelemetryFixture f;
  CHECK(kind_of([&] { get_metrics(*f.kernel, -1); }) == ErrorKind::UnknownNode);
  CHECK(kind_of([&] { get_metrics(*f.kernel, 99); }) == ErrorKind::UnknownNode);
}

TEST_CASE("spans for unregistered nodes are kept and flagged") {
  TelemetryFixture f;
  TableDef nodes;
  nodes.schema = "net";
  nodes.name = "Nodes";
  nodes.columns = {column("nodeId", ValueKind::Int, {primary_key()})};
  f.kernel->execute_atomic({CreateSchemaCmd{"net"}, CreateTableCmd{nodes},
                            InsertCmd{TableRef::parse("net.Nodes"), {{"nodeId", 1}}}},
                           f.kernel->request("admin"));
  SpanFactory gen(7);
  Span known = gen.next(1, SpanStatus::Ok, 1);
  Span stranger = gen.next(8, SpanStatus::Ok, 1);
  ingest_spans(*f.kernel, {known, stranger}, "c");
  const Table& spans = f.kernel->snapshot()->table(TableRef::parse(kSpansTable));
  REQUIRE(spans.size() == 2);
  CHECK(spans.find(*spans.find_by_key(Value(known.key())))->cells.at("matched") == Value(true));
  CHECK(spans.find(*spans.find_by_key(Value(stranger.key())))->cells.at("matched") == Value(false));
}

TEST_CASE("span JSON round-trips and rejects wrong shapes") {
  SpanFactory gen(8);
  Span s = gen.next(3, SpanStatus::Error, 42);
  s.attributes.emplace_back("k", "v");
  CHECK(span_from_json(to_json(s)) == s);
  CHECK(spans_from_json(spans_to_json({s, s})).size() == 2);
  Json j = to_json(s);
  j["status"] = "Fine";
  CHECK(kind_of([&] { span_from_json(j); }) == ErrorKind::MalformedSpan);
  j = to_json(s);
  j["start_ts"] = "yesterday";
  CHECK(kind_of([&] { span_from_json(j); }) == ErrorKind::MalformedSpan);
  CHECK(kind_of([&] { spans_from_json(Json::object()); }) == ErrorKind::MalformedSpan);
}

TEST_CASE("span inserts trace back to their TelemetryBatch") {
  TelemetryFixture f;
  SpanFactory gen(9);
  IngestResult r = ingest_spans(*f.kernel, {gen.next(1, SpanStatus::Ok, 10)}, "collector");
  provenance::LogFilter filter;
  filter.table = kMetricsTable;
  filter.kind = provenance::LogKind::Update;
  auto updates = f.kernel->query_log(filter);
  REQUIRE(updates.size() == 1);
  auto tr = f.kernel->trace(updates[0].log_id);
  CHECK(tr.kinds() == std::vector<std::string>{"Update", "ProcCall", "TriggerFire", "Insert", "TelemetryBatch"});
  CHECK(tr.root.ref_id == r.batch_id);
  CHECK(tr.chain.back().user == "collector");
}

TEST_CASE("incremental counters match recomputation over random batches") {
  TelemetryFixture f;
  std::mt19937_64 rng(2024);
  SpanFactory gen(10);
  std::vector<Span> all;
  size_t total = 0;
  while (total < 1000) {
    std::vector<Span> batch;
    size_t n = 1 + rng() % 60;
    for (size_t i = 0; i < n && total < 1000; ++i, ++total) {
      if (rng() % 7 == 0) gen.new_trace();
      auto status = rng() % 3 == 0 ? SpanStatus::Error : SpanStatus::Ok;
      batch.push_back(gen.next(static_cast<int64_t>(rng() % 6), status, static_cast<int64_t>(rng() % 500'000)));
    }
    ingest_spans(*f.kernel, batch, "c");
    all.insert(all.end(), batch.begin(), batch.end());
    if (rng() % 5 == 0) {
      // Occasionally drop one node's spans; the oracle forgets them too.
      int64_t node = static_cast<int64_t>(rng() % 6);
      f.kernel->execute_atomic({SqlCmd{"DELETE FROM telemetry.Spans WHERE node_id = " + std::to_string(node)}},
                               f.kernel->request("ops"));
      std::erase_if(all, [&](const Span& s) { return s.node_id == node; });
    }
    auto expected = dbnet::testing::metrics_from_spans(all);
    auto from_table = dbnet::testing::metrics_from_table(*f.kernel->snapshot());
    for (const auto& [node, m] : expected) {
      CHECK(dbnet::testing::same_metrics(get_metrics(*f.kernel, node), m));
      CHECK(dbnet::testing::same_metrics(from_table.at(node), m));
    }
  }
  CHECK(f.stored() == all.size());
}

TEST_CASE("twenty concurrent clients of a hundred spans each") {
  TelemetryFixture f;
  std::vector<std::vector<Span>> batches;
  for (int c = 0; c < 20; ++c) {
    SpanFactory gen(100 + c);
    std::vector<Span> batch;
    for (int i = 0; i < 100; ++i) batch.push_back(gen.next(c % 4, i % 10 == 0 ? SpanStatus::Error : SpanStatus::Ok, 1000 + i));
    batches.push_back(std::move(batch));
  }
  std::vector<std::thread> clients;
  for (const auto& b : batches) clients.emplace_back([&f, &b] { ingest_spans(*f.kernel, b, "client"); });
  for (auto& t : clients) t.join();
  CHECK(f.stored() == 2000);
  std::vector<Span> all;
  for (const auto& b : batches) all.insert(all.end(), b.begin(), b.end());
  for (const auto& [node, m] : dbnet::testing::metrics_from_spans(all)) {
    CHECK(dbnet::testing::same_metrics(get_metrics(*f.kernel, node), m));
  }
}
