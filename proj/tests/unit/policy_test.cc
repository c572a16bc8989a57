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

#include "dbnet/bench/scenario.h"
#include "dbnet/policy/interpreter.h"
#include "dbnet/policy/parser.h"
#include "dbnet/policy/resolver.h"
#include "dbnet/store/sql_parser.h"
#include "dbnet/telemetry/telemetry.h"
#include "support/fixtures.h"

using namespace dbnet;
using namespace dbnet::policy;
using dbnet::testing::error_kind;
using dbnet::testing::items_table;
using dbnet::testing::KernelFixture;
using dbnet::testing::row;

namespace {

struct PolicyFixture : KernelFixture {
  PolicyFixture() {
    kernel->execute_atomic({CreateSchemaCmd{"t"}, CreateTableCmd{items_table()},
                            CreateTableCmd{items_table("t", "audit")}},
                           kernel->request("setup"));
  }
  void define(const std::string& source) { kernel->execute_atomic({CreateProcedureCmd{source}}, kernel->request("u")); }
  std::vector<Value> call(const std::string& name, std::vector<Value> args) {
    return kernel->call_procedure(name, std::move(args), kernel->request("u"));
  }
  void insert(int id, int v) {
    kernel->execute_atomic({InsertCmd{TableRef::parse("t.items"), row({{"id", id}, {"v", v}})}}, kernel->request("u"));
  }
  size_t rows(const char* table) { return kernel->snapshot()->table(TableRef::parse(table)).size(); }
  std::optional<ErrorKind> trigger_error(TriggerDef def) {
    return error_kind([&] { kernel->execute_atomic({CreateTriggerCmd{def}}, kernel->request("u")); });
  }
};

TriggerDef trig(std::string name, std::string table, TriggerEvent ev, std::string proc, std::string when = "") {
  TriggerDef d;
  d.name = std::move(name);
  d.table = TableRef::parse(table);
  d.event = ev;
  d.procedure = std::move(proc);
  if (!when.empty()) d.when = parse_expression(when);
  return d;
}

}  // namespace

TEST_CASE("every shipped procedure prints and reparses to the same tree") {
  std::vector<std::string> sources;
  for (const auto& cmd : bench::setup_commands({})) {
    if (const auto* p = std::get_if<CreateProcedureCmd>(&cmd)) sources.push_back(p->source);
  }
  REQUIRE(sources.size() == 9);
  for (const auto& src : sources) {
    ProcedureDef def = parse_procedure(src);
    ProcedureDef again = parse_procedure(to_source(def));
    CHECK_MESSAGE(def.same_structure(again), def.name);
    CHECK(to_source(again) == to_source(def));
  }
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_procedure("PROC p()\nBEGIN\n  SET x = ;\nEND");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
    CHECK(std::string(e.what()).find("line 3, column 11") != std::string::npos);
  }
  CHECK(error_kind([] { parse_procedure("PROC p() BEGIN SELECT 1 FROM t.items; END"); }) == ErrorKind::ParseError);
  CHECK(error_kind([] { parse_procedure("PROC p(x) BEGIN END"); }) == ErrorKind::ParseError);
  CHECK(error_kind([] { parse_procedure("PROC p() BEGIN END trailing"); }) == ErrorKind::ParseError);
  CHECK(error_kind([] { parse_procedure("PROC p() BEGIN RAISE oops; END"); }) == ErrorKind::ParseError);
}

TEST_CASE("names are resolved at registration") {
  PolicyFixture f;
  auto kind = [&](const char* src) { return error_kind([&] { f.define(src); }); };
  CHECK(kind("PROC a() BEGIN DELETE FROM t.nothing; END") == ErrorKind::ResolutionError);
  CHECK(kind("PROC a() BEGIN DELETE FROM t.items WHERE nope = 1; END") == ErrorKind::ResolutionError);
  CHECK(kind("PROC a() BEGIN SET ghost = 1; END") == ErrorKind::ResolutionError);
  CHECK(kind("PROC a() BEGIN CALL b(); END") == ErrorKind::ResolutionError);
  CHECK(kind("PROC a(n: INT) BEGIN IF n > 0 THEN CALL a(n - 1); END IF; END") == std::nullopt);
  CHECK(kind("PROC a() BEGIN RETURN; END") == ErrorKind::DuplicateProcedure);
  CHECK(f.kernel->counts().procedures == 1);
}

TEST_CASE("control flow, loops and SELECT INTO") {
  PolicyFixture f;
  for (int i = 1; i <= 5; ++i) f.insert(i, i * 10);
  f.define(R"(PROC classify(x: INT)
BEGIN
  IF x < 0 THEN
    RETURN 'negative';
  ELSIF x = 0 THEN
    RETURN 'zero';
  ELSIF x < 10 THEN
    RETURN 'small';
  ELSE
    RETURN 'large';
  END IF;
END)");
  CHECK(f.call("classify", {Value(-4)}) == std::vector<Value>{Value("negative")});
  CHECK(f.call("classify", {Value(0)}) == std::vector<Value>{Value("zero")});
  CHECK(f.call("classify", {Value(7)}) == std::vector<Value>{Value("small")});
  CHECK(f.call("classify", {Value(70)}) == std::vector<Value>{Value("large")});

  f.define(R"(PROC tally(floor: INT)
BEGIN
  DECLARE total: INT;
  DECLARE seen: INT;
  DECLARE missing: INT;
  SET total = 0;
  SET seen = 0;
  FOR r IN (SELECT id, v FROM t.items WHERE v >= :floor) LOOP
    SET total = total + r.v;
    SET seen = seen + 1;
    INSERT INTO t.audit (id, v) VALUES (r.id, r.v);
  END LOOP;
  SELECT v INTO missing FROM t.items WHERE id = 99;
  RETURN total, seen, missing;
END)");
  CHECK(f.call("tally", {Value(25)}) == std::vector<Value>{Value(120), Value(3), Value()});
  CHECK(f.rows("t.audit") == 3);
  CHECK(f.call("classify", {Value(1)}).size() == 1);
}

TEST_CASE("arguments are checked and coerced") {
  PolicyFixture f;
  f.define("PROC half(x: FLOAT) BEGIN RETURN x / 2; END");
  CHECK(f.call("half", {Value(3)}) == std::vector<Value>{Value(1.5)});
  CHECK(error_kind([&] { f.call("half", {}); }) == ErrorKind::ArgMismatch);
  CHECK(error_kind([&] { f.call("half", {Value("3")}); }) == ErrorKind::ArgMismatch);
  CHECK(error_kind([&] { f.call("nothing", {}); }) == ErrorKind::UnknownProcedure);
}

TEST_CASE("RAISE and runtime faults undo the whole call") {
  PolicyFixture f;
  f.define(R"(PROC guarded(x: INT)
BEGIN
  INSERT INTO t.items (id, v) VALUES (:x, 1);
  IF x > 5 THEN
    RAISE 'too big';
  END IF;
  INSERT INTO t.audit (id, v) VALUES (:x, 10 / (x - 3));
END)");
  CHECK(error_kind([&] { f.call("guarded", {Value(9)}); }) == ErrorKind::RuntimeError);
  CHECK(error_kind([&] { f.call("guarded", {Value(3)}); }) == ErrorKind::RuntimeError);
  CHECK(f.rows("t.items") == 0);
  CHECK(f.rows("t.audit") == 0);
  f.call("guarded", {Value(4)});
  CHECK(f.rows("t.items") == 1);
  CHECK(f.rows("t.audit") == 1);
}

TEST_CASE("nested CALLs stop at the nesting limit") {
  PolicyFixture f;
  f.define("PROC down(n: INT) BEGIN IF n > 0 THEN CALL down(n - 1); END IF; INSERT INTO t.audit (id, v) VALUES (:n, 0); END");
  f.call("down", {Value(kMaxCallDepth - 1)});
  CHECK(f.rows("t.audit") == static_cast<size_t>(kMaxCallDepth));
  CHECK(error_kind([&] { f.call("down", {Value(kMaxCallDepth + 5)}); }) == ErrorKind::RuntimeError);
  CHECK(f.rows("t.audit") == static_cast<size_t>(kMaxCallDepth));
}

TEST_CASE("trigger registration is validated") {
  PolicyFixture f;
  f.define("PROC note(id: INT, v: INT) BEGIN INSERT INTO t.audit (id, v) VALUES (:id, :v); END");
  f.define("PROC odd(zz: INT) BEGIN RETURN; END");
  CHECK(f.trigger_error(trig("a", "t.nothing", TriggerEvent::AfterInsert, "note")) == ErrorKind::UnknownTable);
  CHECK(f.trigger_error(trig("a", "dbnet.log", TriggerEvent::AfterInsert, "note")) == ErrorKind::UnknownTable);
  CHECK(f.trigger_error(trig("a", "t.items", TriggerEvent::AfterInsert, "ghost")) == ErrorKind::UnknownProcedure);
  CHECK(f.trigger_error(trig("a", "t.items", TriggerEvent::AfterInsert, "odd")) == ErrorKind::ResolutionError);
  CHECK(f.trigger_error(trig("a", "t.items", TriggerEvent::AfterInsert, "note", "NEW.zz > 1")) ==
        ErrorKind::ResolutionError);
  CHECK(f.trigger_error(trig("a", "items", TriggerEvent::AfterInsert, "note")) == std::nullopt);
  CHECK(f.trigger_error(trig("a", "t.items", TriggerEvent::AfterUpdate, "note")) == ErrorKind::DuplicateTrigger);
  auto snap = f.kernel->snapshot();
  REQUIRE(snap->triggers.size() == 1);
  CHECK(snap->triggers.front()->table.qualified() == "t.items");
}

TEST_CASE("WHEN guards and OLD binding for deletes") {
  PolicyFixture f;
  f.define("PROC note(id: INT, v: INT) BEGIN INSERT INTO t.audit (id, v) VALUES (:id + 100 * :v, :v); END");
  CHECK(f.trigger_error(trig("big", "t.items", TriggerEvent::AfterUpdate, "note", "NEW.v > OLD.v + 5")) == std::nullopt);
  CHECK(f.trigger_error(trig("gone", "t.items", TriggerEvent::AfterDelete, "note")) == std::nullopt);
  f.insert(1, 1);
  f.kernel->execute_atomic({SqlCmd{"UPDATE t.items SET v = 3 WHERE id = 1"}}, f.kernel->request("u"));
  CHECK(f.rows("t.audit") == 0);
  f.kernel->execute_atomic({SqlCmd{"UPDATE t.items SET v = 9 WHERE id = 1"}}, f.kernel->request("u"));
  CHECK(f.rows("t.audit") == 1);
  f.insert(2, 4);
  f.kernel->execute_atomic({SqlCmd{"DELETE FROM t.items WHERE id = 2"}}, f.kernel->request("u"));
  ResultSet r = f.kernel->select(std::get<SelectQuery>(parse_sql("SELECT id, v FROM t.audit")));
  CHECK(r.rows == std::vector<std::vector<Value>>{{Value(901), Value(9)}, {Value(402), Value(4)}});
}

TEST_CASE("triggers on one table fire in registration order") {
  PolicyFixture f;
  f.define("PROC first(id: INT) BEGIN INSERT INTO t.audit (id, v) VALUES (:id * 10 + 1, 1); END");
  f.define(R"(PROC second(id: INT)
BEGIN
  DECLARE n: INT;
  SELECT COUNT(*) INTO n FROM t.audit;
  INSERT INTO t.audit (id, v) VALUES (:id * 10 + 2, :n);
END)");
  CHECK(f.trigger_error(trig("t1", "t.items", TriggerEvent::AfterInsert, "first")) == std::nullopt);
  CHECK(f.trigger_error(trig("t2", "t.items", TriggerEvent::AfterInsert, "second")) == std::nullopt);
  f.insert(4, 0);
  ResultSet r = f.kernel->select(std::get<SelectQuery>(parse_sql("SELECT id, v FROM t.audit")));
  CHECK(r.rows == std::vector<std::vector<Value>>{{Value(41), Value(1)}, {Value(42), Value(1)}});
}
