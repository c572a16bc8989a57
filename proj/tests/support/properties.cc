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

#include "support/properties.h"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "dbnet/api/service.h"
#include "dbnet/bench/harness.h"
#include "dbnet/common/error.h"
#include "dbnet/store/sql_parser.h"
#include "support/fixtures.h"
#include "support/oracles.h"

namespace dbnet::testing {

namespace {

using provenance::LogKind;

void fail_case(SuiteResult& r, const std::string& what) {
  if (r.passed) r.detail = what;
  r.passed = false;
}

int64_t uniform(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

const Table& log_table(const Snapshot& snap) { return *snap.find_table(provenance::kLogTable); }

std::optional<provenance::LogEntry> last_entry(const Snapshot& snap) {
  const Table& log = log_table(snap);
  if (log.size() == 0) return std::nullopt;
  return provenance::find_entry(snap, log.rows().rbegin()->first);
}

policy::TriggerDef trigger(const std::string& name, const std::string& table, policy::TriggerEvent event,
                           const std::string& proc) {
  policy::TriggerDef t;
  t.name = name;
  t.table = TableRef::parse(table);
  t.event = event;
  t.procedure = proc;
  return t;
}

}  // namespace

SuiteResult atomicity_fuzz(uint64_t seed, size_t cases) {
  SuiteResult r{"atomicity fuzz"};
  KernelFixture f;
  Kernel& k = *f.kernel;

  TableDef devs;
  devs.schema = "t";
  devs.name = "devs";
  devs.columns = {column("nodeId", ValueKind::Int, {primary_key()}), column("podId", ValueKind::Int, {not_null()})};
  devs.device = DeviceKind::Node;
  TableDef audit;
  audit.schema = "t";
  audit.name = "audit";
  audit.columns = {column("item", ValueKind::Int), column("note", ValueKind::Text)};
  std::vector<Command> setup = {
      CreateSchemaCmd{"t"}, CreateTableCmd{items_table()}, CreateTableCmd{devs}, CreateTableCmd{audit},
      CreateProcedureCmd{"PROC note_item(id: INT) BEGIN INSERT INTO t.audit (item, note) VALUES (:id, 'added'); END"},
      CreateTriggerCmd{trigger("noted", "t.items", policy::TriggerEvent::AfterInsert, "note_item")}};
  // Row 0 is never deleted, so re-inserting it is a reliable fault.
  for (int i = 0; i < 20; ++i) setup.push_back(InsertCmd{TableRef::parse("t.items"), row({{"id", i}, {"v", i}, {"s", "seed"}})});
  k.execute_atomic(setup, k.request("setup"));

  std::mt19937_64 rng(seed);
  int64_t fresh = 1000;
  auto valid = [&]() -> Command {
    int64_t id = uniform(rng, 1, 19);
    switch (rng() % 5) {
      case 0: return InsertCmd{TableRef::parse("t.items"), row({{"id", fresh++}, {"v", uniform(rng, 0, 50)}, {"s", "x"}})};
      case 1: return SqlCmd{"UPDATE t.items SET v = v + 1 WHERE id = " + std::to_string(id)};
      case 2: return SqlCmd{"DELETE FROM t.items WHERE id = " + std::to_string(id)};
      case 3: return InsertCmd{TableRef::parse("t.devs"), row({{"nodeId", fresh++}, {"podId", 1}})};
      default: return CallCmd{"note_item", {Value(id)}};
    }
  };
  auto faulty = [&]() -> Command {
    switch (rng() % 5) {
      case 0: return InsertCmd{TableRef::parse("t.items"), row({{"id", 0}, {"v", 1}})};
      case 1: return InsertCmd{TableRef::parse("t.items"), row({{"id", fresh++}, {"v", -1}})};
      case 2: return SqlCmd{"UPDATE t.items SET nope = 1"};
      case 3: return CallCmd{"missing_proc", {}};
      default: return SqlCmd{"UPDATE t.items SET v = v / 0 WHERE id = 0"};
    }
  };

  for (size_t c = 0; c < cases && r.passed; ++c) {
    ++r.cases;
    size_t n = 1 + rng() % 8;
    size_t fault = rng() % n;
    std::vector<Command> batch, clean;
    for (size_t i = 0; i < n; ++i) {
      if (i == fault) {
        batch.push_back(faulty());
      } else {
        batch.push_back(valid());
        clean.push_back(batch.back());
      }
    }
    auto before = k.snapshot();
    StoreImage image = store_image(*before);
    size_t pending = k.outbox().pending();
    int64_t operations = f.fleet->operations();
    size_t log_size = log_table(*before).size();

    bool threw = false;
    try {
      k.execute_atomic(batch, k.request("fuzz"));
    } catch (const Error&) {
      threw = true;
    }
    auto after = k.snapshot();
    std::string where = "case " + std::to_string(c) + " (fault at " + std::to_string(fault) + " of " + std::to_string(n) + "): ";
    if (!threw) fail_case(r, where + "the faulty batch committed");
    if (std::string d = diff_images(image, store_image(*after)); !d.empty()) fail_case(r, where + d);
    if (k.outbox().pending() != pending) fail_case(r, where + "device commands were released");
    if (f.fleet->operations() != operations) fail_case(r, where + "the fleet was touched");
    auto last = last_entry(*after);
    if (log_table(*after).size() != log_size + 1 || !last || last->kind != LogKind::Rollback) {
      fail_case(r, where + "expected exactly one Rollback entry");
    }
    // Move the state forward with the same batch minus its fault.
    if (c % 2 == 1 && !clean.empty()) {
      try {
        k.execute_atomic(clean, k.request("fuzz"));
      } catch (const Error& e) {
        fail_case(r, where + "the clean batch failed: " + e.what());
      }
    }
  }
  if (r.passed) r.detail = std::to_string(r.cases) + " faulty batches left no trace";
  return r;
}

SuiteResult cdc_completeness(uint64_t seed, size_t mutations) {
  SuiteResult r{"CDC completeness"};
  KernelFixture f;
  Kernel& k = *f.kernel;
  k.execute_atomic({CreateSchemaCmd{"t"}, CreateTableCmd{items_table()}}, k.request("setup"));

  std::mt19937_64 rng(seed);
  std::map<int64_t, Cells> model;
  std::map<LogKind, size_t> expected = {{LogKind::Insert, 0}, {LogKind::Update, 0}, {LogKind::Delete, 0}};
  size_t total = 0, aborted = 0;
  int64_t fresh = 1;
  while (total < mutations && r.passed) {
    ++r.cases;
    size_t n = 1 + rng() % 3;
    bool poison = rng() % 5 == 0;
    size_t poison_at = rng() % n;
    auto next = model;
    std::map<LogKind, size_t> delta;
    std::vector<Command> batch;
    std::vector<std::optional<int64_t>> affected;
    for (size_t i = 0; i < n; ++i) {
      if (poison && i == poison_at) {
        batch.push_back(InsertCmd{TableRef::parse("t.items"), row({{"id", fresh++}, {"v", -1}})});
        affected.push_back(std::nullopt);
        continue;
      }
      int64_t c = uniform(rng, 0, 11);
      switch (rng() % 3) {
        case 0: {
          int64_t id = fresh++;
          Value v(uniform(rng, 0, 9));
          Value s = rng() % 3 ? Value("s" + std::to_string(rng() % 5)) : Value::null();
          Cells cells = row({{"id", id}, {"v", v}});
          if (!s.is_null()) cells["s"] = s;
          batch.push_back(InsertCmd{TableRef::parse("t.items"), cells});
          next[id] = row({{"id", id}, {"v", v}, {"s", s}});
          ++delta[LogKind::Insert];
          affected.push_back(std::nullopt);
          break;
        }
        case 1: {
          int64_t hits = 0;
          for (auto& [id, cells] : next) {
            if (cells["v"].as_int() < c) {
              cells["v"] = Value(cells["v"].as_int() + 1);
              ++hits;
            }
          }
          batch.push_back(SqlCmd{"UPDATE t.items SET v = v + 1 WHERE v < " + std::to_string(c)});
          delta[LogKind::Update] += static_cast<size_t>(hits);
          affected.push_back(hits);
          break;
        }
        default: {
          int64_t hits = std::erase_if(next, [&](const auto& kv) { return kv.second.at("v").as_int() > c; });
          batch.push_back(SqlCmd{"DELETE FROM t.items WHERE v > " + std::to_string(c)});
          delta[LogKind::Delete] += static_cast<size_t>(hits);
          affected.push_back(hits);
        }
      }
    }
    std::vector<CommandResult> results;
    bool threw = false;
    try {
      results = k.execute_atomic(batch, k.request("cdc"));
    } catch (const Error&) {
      threw = true;
    }
    std::string where = "transaction " + std::to_string(r.cases) + ": ";
    if (threw != poison) {
      fail_case(r, where + (poison ? "a poisoned batch committed" : "a clean batch failed"));
      break;
    }
    if (poison) {
      ++aborted;
      continue;
    }
    for (size_t i = 0; i < results.size(); ++i) {
      if (affected[i] && results[i].affected != affected[i]) {
        fail_case(r, where + "statement " + std::to_string(i) + " reported " +
                         std::to_string(results[i].affected.value_or(-1)) + " rows, model says " +
                         std::to_string(*affected[i]));
      }
    }
    model = std::move(next);
    for (const auto& [kind, count] : delta) {
      expected[kind] += count;
      total += count;
    }
  }

  provenance::LogFilter filter;
  filter.table = "t.items";
  auto log = k.query_log(filter);
  std::map<LogKind, size_t> seen = {{LogKind::Insert, 0}, {LogKind::Update, 0}, {LogKind::Delete, 0}};
  for (const auto& e : log) {
    if (e.is_mutation()) ++seen[e.kind];
  }
  for (const auto& [kind, count] : expected) {
    if (seen[kind] != count) {
      fail_case(r, std::string(provenance::to_string(kind)) + " entries " + std::to_string(seen[kind]) +
                       ", model mutations " + std::to_string(count));
    }
  }
  StoreImage want;
  if (!model.empty()) {
    auto snap = k.snapshot();
    for (const auto& [id, cells] : model) {
      // Row ids are internal, so match the model by primary key.
      auto rid = snap->table(TableRef::parse("t.items")).find_by_key(Value(id));
      if (!rid) {
        fail_case(r, "row " + std::to_string(id) + " is missing from the table");
        continue;
      }
      want["t.items"][*rid] = cells;
    }
  }
  if (std::string d = diff_images(want, store_image(*k.snapshot())); !d.empty()) fail_case(r, "table vs model: " + d);
  if (std::string d = diff_images(replay_cdc(k.query_log()), store_image(*k.snapshot())); !d.empty()) {
    fail_case(r, "CDC replay vs table: " + d);
  }
  if (r.passed) {
    r.detail = std::to_string(total) + " committed row mutations over " + std::to_string(r.cases) +
               " transactions (" + std::to_string(aborted) + " aborted), every one logged once";
  }
  return r;
}

namespace {

struct AggQuery {
  AggregateFn fn = AggregateFn::Count;
  std::string column;  // empty for COUNT(*)
  bool grouped = false;
  bool with_count = false;  // a trailing COUNT(*)
  int filter = 0;
  int64_t c = 0;
  double cy = 0;
};

std::string sql_of(const AggQuery& q, const std::string& table) {
  std::string agg = std::string(to_string(q.fn)) + "(" + (q.column.empty() ? "*" : q.column) + ")";
  std::string sql = "SELECT " + std::string(q.grouped ? "g, " : "") + agg + (q.with_count ? ", COUNT(*)" : "") + " FROM " + table;
  switch (q.filter) {
    case 1: sql += " WHERE x > " + std::to_string(q.c); break;
    case 2: sql += " WHERE y <= " + format_float(q.cy); break;
    case 3: sql += " WHERE g IS NULL"; break;
    case 4: sql += " WHERE name = 'b'"; break;
    case 5: sql += " WHERE x > " + std::to_string(q.c) + " AND g IS NOT NULL"; break;
  }
  if (q.grouped) sql += " GROUP BY g";
  return sql;
}

bool keep(const AggQuery& q, const Cells& row) {
  const Value& x = row.at("x");
  const Value& y = row.at("y");
  const Value& g = row.at("g");
  const Value& name = row.at("name");
  switch (q.filter) {
    case 1: return !x.is_null() && x.as_int() > q.c;
    case 2: return !y.is_null() && y.as_float() <= q.cy;
    case 3: return g.is_null();
    case 4: return !name.is_null() && name.as_text() == "b";
    case 5: return !x.is_null() && x.as_int() > q.c && !g.is_null();
    default: return true;
  }
}

Value aggregate(const AggQuery& q, const std::vector<const Cells*>& rows) {
  if (q.column.empty()) return Value(static_cast<int64_t>(rows.size()));
  std::vector<Value> vals;
  for (const Cells* r : rows) {
    if (!r->at(q.column).is_null()) vals.push_back(r->at(q.column));
  }
  if (q.fn == AggregateFn::Count) return Value(static_cast<int64_t>(vals.size()));
  if (vals.empty()) return Value::null();
  if (q.fn == AggregateFn::Sum || q.fn == AggregateFn::Avg) {
    if (q.column == "x") {
      int64_t s = 0;
      for (const auto& v : vals) s += v.as_int();
      return q.fn == AggregateFn::Sum ? Value(s) : Value(static_cast<double>(s) / static_cast<double>(vals.size()));
    }
    double s = 0;
    for (const auto& v : vals) s += v.as_float();
    return q.fn == AggregateFn::Sum ? Value(s) : Value(s / static_cast<double>(vals.size()));
  }
  Value best = vals[0];
  for (const auto& v : vals) {
    bool less;
    if (q.column == "x") less = v.as_int() < best.as_int();
    else if (q.column == "y") less = v.as_float() < best.as_float();
    else less = v.as_text() < best.as_text();
    bool better = q.fn == AggregateFn::Min ? less : (!less && v != best);
    if (better) best = v;
  }
  return best;
}

ResultSet brute_force(const AggQuery& q, const Table& table) {
  ResultSet out;
  auto agg_name = std::string(to_string(q.fn)) + "(" + (q.column.empty() ? "*" : q.column) + ")";
  std::map<std::optional<int64_t>, std::vector<const Cells*>> groups;
  std::vector<const Cells*> all;
  for (const auto& [id, row] : table.rows()) {
    if (!keep(q, row->cells)) continue;
    all.push_back(&row->cells);
    const Value& g = row->cells.at("g");
    groups[g.is_null() ? std::nullopt : std::optional<int64_t>(g.as_int())].push_back(&row->cells);
  }
  AggQuery count_all;
  if (!q.grouped) {
    std::vector<Value> r = {aggregate(q, all)};
    if (q.with_count) r.push_back(aggregate(count_all, all));
    out.rows.push_back(r);
    return out;
  }
  for (const auto& [g, rows] : groups) {
    std::vector<Value> r = {g ? Value(*g) : Value::null(), aggregate(q, rows)};
    if (q.with_count) r.push_back(aggregate(count_all, rows));
    out.rows.push_back(r);
  }
  return out;
}

bool same_value(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  if (a.kind() == ValueKind::Float) return std::fabs(a.as_float() - b.as_float()) <= 1e-9 * std::max(1.0, std::fabs(b.as_float()));
  return a == b;
}

std::string show(const std::vector<std::vector<Value>>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += "(";
    for (size_t i = 0; i < r.size(); ++i) out += (i ? ", " : "") + r[i].to_string();
    out += ")";
  }
  return out.empty() ? "no rows" : out;
}

}  // namespace

SuiteResult aggregate_oracle(uint64_t seed, size_t queries) {
  SuiteResult r{"aggregate oracle"};
  KernelFixture f;
  Kernel& k = *f.kernel;
  k.execute_atomic({CreateSchemaCmd{"t"}}, k.request("setup"));
  std::mt19937_64 rng(seed);
  const std::vector<std::string> names = {"a", "b", "c", "d"};
  std::string table;
  for (size_t i = 0; i < queries && r.passed; ++i) {
    if (i % 25 == 0) {
      table = "t.r" + std::to_string(i / 25);
      TableDef def;
      def.schema = "t";
      def.name = "r" + std::to_string(i / 25);
      def.columns = {column("id", ValueKind::Int, {primary_key()}), column("g", ValueKind::Int),
                     column("x", ValueKind::Int), column("y", ValueKind::Float), column("name", ValueKind::Text)};
      std::vector<Command> cmds = {CreateTableCmd{def}};
      int64_t rows = uniform(rng, 0, 100);
      for (int64_t id = 0; id < rows; ++id) {
        auto maybe = [&](Value v, int null_pct) { return static_cast<int>(rng() % 100) < null_pct ? Value::null() : v; };
        cmds.push_back(InsertCmd{def.ref(), row({{"id", id},
                                                 {"g", maybe(Value(uniform(rng, 0, 4)), 10)},
                                                 {"x", maybe(Value(uniform(rng, -50, 50)), 15)},
                                                 {"y", maybe(Value(static_cast<double>(uniform(rng, -1000, 1000)) / 8.0), 15)},
                                                 {"name", maybe(Value(names[rng() % names.size()]), 10)}})});
      }
      k.execute_atomic(cmds, k.request("setup"));
    }
    ++r.cases;
    AggQuery q;
    q.fn = static_cast<AggregateFn>(rng() % 5);
    switch (q.fn) {
      case AggregateFn::Count: {
        const char* cols[] = {"", "x", "y", "name"};
        q.column = cols[rng() % 4];
        break;
      }
      case AggregateFn::Avg:
      case AggregateFn::Sum: q.column = rng() % 2 ? "x" : "y"; break;
      default: {
        const char* cols[] = {"x", "y", "name"};
        q.column = cols[rng() % 3];
      }
    }
    q.grouped = rng() % 2;
    q.with_count = rng() % 4 == 0;
    q.filter = static_cast<int>(rng() % 6);
    q.c = uniform(rng, -40, 40);
    q.cy = static_cast<double>(uniform(rng, -800, 800)) / 8.0;

    std::string sql = sql_of(q, table);
    auto snap = k.snapshot();
    ResultSet got;
    try {
      got = run_select(*snap, std::get<SelectQuery>(parse_sql(sql)));
    } catch (const Error& e) {
      fail_case(r, sql + ": " + e.what());
      break;
    }
    ResultSet want = brute_force(q, snap->table(TableRef::parse(table)));
    bool ok = got.rows.size() == want.rows.size();
    for (size_t row = 0; ok && row < got.rows.size(); ++row) {
      ok = got.rows[row].size() == want.rows[row].size();
      for (size_t c = 0; ok && c < got.rows[row].size(); ++c) ok = same_value(got.rows[row][c], want.rows[row][c]);
    }
    if (!ok) fail_case(r, sql + ": engine " + show(got.rows) + ", oracle " + show(want.rows));
  }
  if (r.passed) r.detail = std::to_string(r.cases) + " queries over " + std::to_string((queries + 24) / 25) + " random tables agree";
  return r;
}

SuiteResult cascade_abort() {
  SuiteResult r{"cascade depth"};
  KernelFixture f;
  Kernel& k = *f.kernel;
  k.execute_atomic({CreateSchemaCmd{"t"}, CreateTableCmd{items_table()},
                    CreateProcedureCmd{"PROC bump(id: INT, v: INT) BEGIN IF v < 100 THEN UPDATE t.items SET v = v + 1 WHERE id = :id; END IF; END"},
                    CreateTriggerCmd{trigger("again", "t.items", policy::TriggerEvent::AfterUpdate, "bump")},
                    InsertCmd{TableRef::parse("t.items"), row({{"id", 1}, {"v", 200}})}},
                   k.request("setup"));
  // Setting v = s activates bump with v = s, s + 1, ... until one sees 100,
  // so the chain is 101 - s activations long.
  size_t aborts = 0;
  for (int64_t s = 60; s <= 110; ++s) {
    ++r.cases;
    k.execute_atomic({SqlCmd{"UPDATE t.items SET v = 200 WHERE id = 1"}}, k.request("reset"));
    auto before = k.snapshot();
    size_t log_size = log_table(*before).size();
    int64_t activations = s <= 100 ? 101 - s : 1;
    bool should_abort = activations > kMaxCascadeDepth;
    std::optional<ErrorKind> err = error_kind(
        [&] { k.execute_atomic({SqlCmd{"UPDATE t.items SET v = " + std::to_string(s) + " WHERE id = 1"}}, k.request("c")); });
    auto after = k.snapshot();
    std::string where = "start " + std::to_string(s) + " (" + std::to_string(activations) + " activations): ";
    if (should_abort) {
      ++aborts;
      if (err != ErrorKind::CascadeDepthExceeded) fail_case(r, where + "expected CascadeDepthExceeded");
      if (std::string d = diff_images(store_image(*before), store_image(*after)); !d.empty()) fail_case(r, where + d);
      auto last = last_entry(*after);
      if (log_table(*after).size() != log_size + 1 || !last || last->kind != LogKind::Rollback) {
        fail_case(r, where + "expected only a Rollback entry");
      }
    } else {
      if (err) fail_case(r, where + "unexpected " + std::string(to_string(*err)));
      Value v = after->table(TableRef::parse("t.items")).find(1)->cells.at("v");
      if (v != Value(std::max<int64_t>(s, 100))) fail_case(r, where + "final v " + v.to_string());
    }
  }
  if (r.passed) {
    r.detail = std::to_string(aborts) + " of " + std::to_string(r.cases) +
               " chains exceeded depth 16 and left no residual state; the rest committed";
  }
  return r;
}

SuiteResult default_deny() {
  SuiteResult r{"default deny"};
  KernelFixture f;
  Kernel& k = *f.kernel;
  k.execute_atomic({CreateSchemaCmd{"t"}, CreateTableCmd{items_table()}, CreateProcedureCmd{"PROC p() BEGIN RETURN 1; END"},
                    InsertCmd{TableRef::parse("t.items"), row({{"id", 1}, {"v", 1}})}},
                   k.request("setup"));
  api::AccessControl acl;
  acl.add_user({"root", {api::kAdminRole}});
  acl.add_user({"mallory", {"ops"}});
  api::Service service(k, acl);

  struct Probe {
    std::string method, path;
    Json body;
  };
  std::vector<Probe> probes = {
      {"POST", "/v1/schema", {{"name", "x"}}},
      {"POST", "/v1/table", {{"def", to_json(items_table("t", "other"))}}},
      {"POST", "/v1/procedure", {{"source", "PROC q() BEGIN RETURN 2; END"}}},
      {"POST", "/v1/trigger", {{"name", "tr"}, {"table", "t.items"}, {"event", "AfterInsert"}, {"procedure", "p"}}},
      {"POST", "/v1/procedure/p/call", {{"args", Json::array()}}},
      {"POST", "/v1/txn", {{"commands", Json::array({{{"op", "insert"}, {"table", "t.items"}, {"cells", {{"id", 5}}}}})}}},
      {"POST", "/v1/telemetry/spans", Json::array()},
      {"POST", "/v1/query", {{"sql", "SELECT * FROM t.items"}}},
      {"POST", "/v1/query", {{"sql", "DELETE FROM t.items"}}},
      {"POST", "/v1/acl/user", {{"user_id", "eve"}}},
      {"POST", "/v1/acl/grant", {{"role", "ops"}, {"object", "*"}, {"action", "Admin"}}},
      {"POST", "/v1/outbox/drain", Json::object()},
      {"GET", "/v1/outbox", nullptr},
      {"GET", "/v1/log", nullptr},
      {"GET", "/v1/provenance/trace/1", nullptr},
      {"GET", "/v1/metrics/1", nullptr},
  };
  auto send = [&](const Probe& p, const std::string& user) {
    api::HttpRequest req;
    req.method = p.method;
    req.path = p.path;
    req.headers["x-dbnet-user"] = user;
    if (!p.body.is_null()) req.body = p.body.dump();
    return service.handle(req);
  };
  StoreImage image = store_image(*k.snapshot());
  provenance::LogFilter denials;
  denials.kind = LogKind::AuthDeny;
  for (const auto& p : probes) {
    ++r.cases;
    size_t before = k.query_log(denials).size();
    api::HttpResponse res = send(p, "mallory");
    auto after = k.query_log(denials);
    std::string what = p.method + " " + p.path + ": ";
    if (res.status != 403 || res.body.value("error_kind", "") != "AccessDenied") {
      fail_case(r, what + "status " + std::to_string(res.status));
      continue;
    }
    if (after.size() != before + 1) {
      fail_case(r, what + "no AuthDeny entry");
      continue;
    }
    const auto& e = after.back();
    if (e.user != "mallory" || e.cause.kind != provenance::CauseKind::ExternalRequest ||
        e.cause.ref_id != res.body.at("request_id").get<int64_t>()) {
      fail_case(r, what + "AuthDeny entry does not name the request");
    }
  }
  if (std::string d = diff_images(image, store_image(*k.snapshot())); !d.empty()) fail_case(r, "denied requests changed the store: " + d);
  if (acl.rules().size() != 0 || acl.find_user("eve")) fail_case(r, "denied requests changed the ACL");
  // The same read is fine for the admin role.
  if (send(probes[7], "root").status != 200) fail_case(r, "admin was refused a read");
  if (r.passed) r.detail = std::to_string(r.cases) + " endpoints refused and logged";
  return r;
}

ScenarioSuites scenario_suites(uint64_t seed) {
  ScenarioSuites out{{"log replay"}, {"convergence"}};
  bench::EnvironmentOptions options;
  options.config.seed = seed;
  options.config.provisioning_delay = std::chrono::milliseconds(1);
  bench::Environment env(options);
  using Step = std::function<bench::ScenarioResult()>;
  std::vector<std::pair<std::string, Step>> steps = {
      {"setup", [&] { return bench::run_setup(env); }},
      {"seed", [&] { return bench::run_seed(env); }},
      {"example 1", [&] { return bench::run_example1(env); }},
      {"example 2", [&] { return bench::run_example2(env); }},
      {"load", [&] { return bench::run_load(env, 20, 100, seed); }},
  };
  for (const auto& [name, step] : steps) {
    ++out.log_replay.cases;
    ++out.convergence.cases;
    try {
      step();
    } catch (const std::exception& e) {
      fail_case(out.log_replay, name + " failed: " + e.what());
      fail_case(out.convergence, name + " failed: " + e.what());
      break;
    }
    env.kernel().outbox().drain();
    auto snap = env.kernel().snapshot();
    if (std::string d = diff_images(replay_cdc(env.kernel().query_log()), store_image(*snap)); !d.empty()) {
      fail_case(out.log_replay, "after " + name + ": " + d);
    }
    auto issues = bench::convergence_issues(env.kernel(), env.fleet());
    if (!issues.empty()) fail_case(out.convergence, "after " + name + ": " + issues.front());
  }
  if (out.log_replay.passed) out.log_replay.detail = "CDC replay matched the tables after all 5 scenario steps";
  if (out.convergence.passed) out.convergence.detail = "fleet matched the device-backed tables after all 5 scenario steps";
  return out;
}

}  // namespace dbnet::testing
