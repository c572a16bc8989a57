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

#include "dbnet/txn/kernel.h"

#include <algorithm>

#include "dbnet/common/error.h"
#include "dbnet/policy/interpreter.h"
#include "dbnet/policy/parser.h"
#include "dbnet/policy/resolver.h"
#include "dbnet/store/sql_parser.h"

namespace dbnet {

using provenance::Cause;
using provenance::CauseKind;
using provenance::LogEntry;
using provenance::LogKind;

std::string_view to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::Insert: return "Insert";
    case ChangeKind::Update: return "Update";
    case ChangeKind::Delete: return "Delete";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// OLD.col / NEW.col for trigger conditions.
class OldNewScope final : public Scope {
 public:
  OldNewScope(const Cells* old_row, const Cells* new_row) : old_(old_row), new_(new_row) {}

  const Value* lookup_column(std::string_view qualifier, std::string_view name) const override {
    std::string q = upper(qualifier);
    const Cells* row = q == "OLD" ? old_ : q == "NEW" ? new_ : nullptr;
    if (!row) return nullptr;
    auto it = row->find(std::string(name));
    return it == row->end() ? nullptr : &it->second;
  }
  const Value* lookup_var(std::string_view) const override { return nullptr; }

 private:
  const Cells* old_;
  const Cells* new_;
};

void check_refs(const TableDef& def, const Expr& e, const Scope& outer) {
  visit_refs(
      e,
      [&](const ColumnRef& r) {
        bool own = r.qualifier.empty() || r.qualifier == def.name || r.qualifier == def.qualified();
        if (own && def.column(r.name)) return;
        if (outer.lookup_column(r.qualifier, r.name)) return;
        if (r.qualifier.empty() && outer.lookup_var(r.name)) return;
        std::string name = r.qualifier.empty() ? r.name : r.qualifier + "." + r.name;
        fail(ErrorKind::UnknownColumn, "unknown column '" + name + "' for " + def.qualified());
      },
      [&](const VarRef& v) {
        if (!outer.lookup_var(v.name)) fail(ErrorKind::UnknownColumn, "unknown variable ':" + v.name + "'");
      });
}

std::string call_text(const std::string& name, const std::vector<Value>& args) {
  std::string out = name + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += to_source(lit(args[i]));
  }
  return out + ")";
}

std::string error_text(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(to_string(err->kind())) + ": " + err->what();
  }
  return e.what();
}

Json trigger_to_json(const policy::TriggerDef& d) {
  return {{"name", d.name},
          {"table", d.table.qualified()},
          {"event", std::string(policy::to_string(d.event))},
          {"when", d.when ? Json(to_source(*d.when)) : Json(nullptr)},
          {"procedure", d.procedure},
          {"order_key", d.order_key}};
}

policy::TriggerDef trigger_from_json(const Json& j) {
  policy::TriggerDef d;
  d.name = j.at("name").get<std::string>();
  d.table = TableRef::parse(j.at("table").get<std::string>());
  d.event = policy::parse_trigger_event(j.at("event").get<std::string>()).value();
  if (!j.at("when").is_null()) d.when = parse_expression(j.at("when").get<std::string>());
  d.procedure = j.at("procedure").get<std::string>();
  d.order_key = j.at("order_key").get<int64_t>();
  return d;
}

}  // namespace

struct Kernel::Transaction {
  TxnId id = 0;
  std::string user;
  Cause root;
  std::shared_ptr<Snapshot> work;
  std::map<std::string, std::shared_ptr<Table>> owned;
  std::vector<ChangeRecord> changes;
  std::vector<LogEntry> log;
  std::vector<proxy::DeviceCommand> commands;
  std::vector<std::string> effects;  // device calls that cannot be undone
  Json ops = Json::array();
  bool dirty = false;
};

class Kernel::TxnHost final : public policy::Host {
 public:
  TxnHost(Kernel& k, Transaction& t) : k_(k), t_(t) {}

  const Snapshot& view() const override { return *t_.work; }

  RowId insert(const policy::Frame& f, const TableRef& table, const Cells& cells) override {
    return k_.do_insert(t_, t_.work->resolve(table), cells, cause(f), f.depth);
  }
  int64_t update(const policy::Frame& f, const UpdateStmt& s, const Scope& outer) override {
    return k_.do_update(t_, t_.work->resolve(s.table), s.where, s.assignments, outer, cause(f), f.depth);
  }
  int64_t erase(const policy::Frame& f, const DeleteStmt& s, const Scope& outer) override {
    return k_.do_delete(t_, t_.work->resolve(s.table), s.where, outer, cause(f), f.depth);
  }
  std::vector<Value> call(const policy::Frame& f, const std::string& name, std::vector<Value> args) override {
    return k_.run_call(t_, name, std::move(args), cause(f), f.depth, f.call_depth + 1);
  }
  std::vector<Value> external(const policy::Frame& f, const std::string& name,
                              const std::vector<Value>& args) override {
    return k_.run_external(t_, f.invocation_id, name, args);
  }

 private:
  static Cause cause(const policy::Frame& f) { return {CauseKind::ProcInvocation, f.invocation_id}; }

  Kernel& k_;
  Transaction& t_;
};

Kernel::Kernel(KernelOptions options) : devices_(std::move(options.devices)) {
  outbox_ = std::make_unique<proxy::Outbox>(devices_, options.retry);
  outbox_->set_observer([this](const proxy::DeviceCommand& c, const proxy::SyncStatus& s) { on_applied(c, s); });
  if (!options.journal_path.empty()) {
    replay(read_journal(options.journal_path));
    journal_ = std::make_unique<JournalWriter>(options.journal_path);
  }
  if (options.background_drain) outbox_->start_worker();
}

Kernel::~Kernel() { outbox_->stop_worker(); }

void Kernel::acquire_slot() {
  std::unique_lock<std::mutex> lock(slot_mu_);
  uint64_t ticket = next_ticket_++;
  slot_cv_.wait(lock, [&] { return serving_ == ticket; });
}

void Kernel::release_slot() {
  {
    std::lock_guard<std::mutex> lock(slot_mu_);
    ++serving_;
  }
  slot_cv_.notify_all();
}

bool Kernel::initialized() const { return db_.snapshot()->find_table(provenance::kLogTable) != nullptr; }

int64_t Kernel::next_request_id() { return next_request_id_++; }

RequestContext Kernel::request(const std::string& user) {
  return {user, {CauseKind::ExternalRequest, next_request_id()}};
}

ObjectCounts Kernel::counts() const {
  auto snap = db_.snapshot();
  ObjectCounts c;
  for (const auto& s : snap->schemas) c.schemas += s != provenance::kLogSchema;
  for (const auto& [k, t] : snap->tables) c.tables += !t->def().cdc_exempt;
  c.procedures = snap->procedures.size();
  c.triggers = snap->triggers.size();
  return c;
}

Timestamp Kernel::now() {
  int64_t wall = std::chrono::duration_cast<std::chrono::microseconds>(
                     std::chrono::system_clock::now().time_since_epoch())
                     .count();
  last_ts_ = std::max(last_ts_, wall);
  return Timestamp{last_ts_};
}

Json Kernel::counters() const {
  return {{"log", next_log_id_.load()},
          {"txn", max_txn_id_},
          {"request", next_request_id_.load()},
          {"command", next_command_id_.load()}};
}

void Kernel::init_provenance() {
  acquire_slot();
  struct Release {
    Kernel* k;
    ~Release() { k->release_slot(); }
  } release{this};
  if (initialized()) return;
  auto snap = std::make_shared<Snapshot>(*db_.snapshot());
  TableDef def = provenance::log_table_def();
  snap->schemas.insert(provenance::kLogSchema);
  snap->tables[def.qualified()] = std::make_shared<const Table>(def);
  if (journal_) {
    Json ops = Json::array();
    ops.push_back({{"op", "create_schema"}, {"name", provenance::kLogSchema}});
    ops.push_back({{"op", "create_table"}, {"def", to_json(def)}});
    journal_->append({{"txn", 0}, {"ops", ops}, {"counters", counters()}});
  }
  db_.publish(std::move(snap));
}

TxnId Kernel::begin(const RequestContext& ctx) {
  if (!initialized()) fail(ErrorKind::NotInitialized, "call init_provenance before starting transactions");
  acquire_slot();
  auto t = std::make_unique<Transaction>();
  t->user = ctx.user;
  t->root = ctx.root;
  t->work = std::make_shared<Snapshot>(*db_.snapshot());
  std::lock_guard<std::mutex> lock(txn_mu_);
  t->id = ++max_txn_id_;
  current_ = std::move(t);
  return current_->id;
}

Kernel::Transaction& Kernel::open_txn(TxnId id) const {
  std::lock_guard<std::mutex> lock(txn_mu_);
  if (current_ && current_->id == id) return *current_;
  if (id > 0 && id <= max_txn_id_) fail(ErrorKind::AlreadyClosed, "transaction " + std::to_string(id) + " is closed");
  fail(ErrorKind::UnknownTxn, "unknown transaction " + std::to_string(id));
}

bool Kernel::is_open(TxnId id) const {
  std::lock_guard<std::mutex> lock(txn_mu_);
  return current_ && current_->id == id;
}

std::vector<ChangeRecord> Kernel::staged_changes(TxnId id) const { return open_txn(id).changes; }

template <class F>
auto Kernel::guarded(TxnId id, F&& fn) -> decltype(fn(std::declval<Transaction&>())) {
  Transaction& t = open_txn(id);
  try {
    return fn(t);
  } catch (const std::exception& e) {
    finish_rollback(t, error_text(e));
    throw;
  }
}

int64_t Kernel::stage(Transaction& t, LogEntry e) {
  e.log_id = next_log_id_++;
  e.ts = now();
  e.user = t.user;
  e.txn = t.id;
  t.log.push_back(std::move(e));
  return t.log.back().log_id;
}

std::shared_ptr<Table> Kernel::writable(Transaction& t, const std::string& key) {
  auto it = t.owned.find(key);
  if (it != t.owned.end()) return it->second;
  auto copy = std::make_shared<Table>(*t.work->tables.at(key));
  t.work->tables[key] = copy;
  t.owned[key] = copy;
  return copy;
}

void Kernel::journal_op(Transaction& t, Json op) {
  if (journal_) t.ops.push_back(std::move(op));
}

void Kernel::create_schema(TxnId txn, const std::string& name) {
  guarded(txn, [&](Transaction& t) {
    if (!is_identifier(name)) fail(ErrorKind::InvalidIdentifier, "invalid schema name '" + name + "'");
    if (t.work->schemas.count(name)) fail(ErrorKind::DuplicateSchema, "schema '" + name + "' already exists");
    t.work->schemas.insert(name);
    t.dirty = true;
    journal_op(t, {{"op", "create_schema"}, {"name", name}});
  });
}

void Kernel::create_table(TxnId txn, TableDef def) {
  guarded(txn, [&](Transaction& t) {
    validate_table_def(def);
    if (def.cdc_exempt) fail(ErrorKind::MalformedRequest, "only the provenance log table is exempt from capture");
    if (def.schema == provenance::kLogSchema) {
      fail(ErrorKind::InvalidIdentifier, "schema '" + def.schema + "' is reserved");
    }
    if (!t.work->schemas.count(def.schema)) fail(ErrorKind::UnknownSchema, "unknown schema '" + def.schema + "'");
    std::string key = def.qualified();
    if (t.work->tables.count(key)) fail(ErrorKind::DuplicateTable, "table '" + key + "' already exists");
    journal_op(t, {{"op", "create_table"}, {"def", to_json(def)}});
    auto table = std::make_shared<Table>(std::move(def));
    t.work->tables[key] = table;
    t.owned[key] = table;
    t.dirty = true;
  });
}

void Kernel::register_procedure(TxnId txn, const std::string& source) {
  guarded(txn, [&](Transaction& t) {
    policy::ProcedureDef def = policy::parse_procedure(source);
    if (!is_identifier(def.name)) fail(ErrorKind::InvalidIdentifier, "invalid procedure name '" + def.name + "'");
    if (t.work->procedures.count(def.name)) {
      fail(ErrorKind::DuplicateProcedure, "procedure '" + def.name + "' already exists");
    }
    policy::resolve_procedure(*t.work, def);
    std::string name = def.name;
    t.work->procedures[name] = std::make_shared<const policy::ProcedureDef>(std::move(def));
    t.dirty = true;
    LogEntry e;
    e.kind = LogKind::ProcRegister;
    e.detail = name;
    e.cause = t.root;
    stage(t, std::move(e));
    journal_op(t, {{"op", "create_procedure"}, {"source", source}});
  });
}

void Kernel::register_trigger(TxnId txn, policy::TriggerDef def) {
  guarded(txn, [&](Transaction& t) {
    policy::resolve_trigger(*t.work, def);
    def.order_key = t.work->next_trigger_order++;
    journal_op(t, {{"op", "create_trigger"}, {"def", trigger_to_json(def)}});
    LogEntry e;
    e.kind = LogKind::TriggerRegister;
    e.table = def.table.qualified();
    e.detail = def.name + " " + std::string(policy::to_string(def.event)) + " -> " + def.procedure;
    e.cause = t.root;
    t.work->triggers.push_back(std::make_shared<const policy::TriggerDef>(std::move(def)));
    t.dirty = true;
    stage(t, std::move(e));
  });
}

namespace {

// The log is written only by the kernel itself, never through DML.
void refuse_log_write(const std::string& key) {
  if (key == provenance::kLogTable) fail(ErrorKind::AccessDenied, "the provenance log is append-only");
}

}  // namespace

RowId Kernel::do_insert(Transaction& t, const std::string& key, const Cells& cells, const Cause& cause,
                        int depth) {
  refuse_log_write(key);
  auto table = writable(t, key);
  RowId id = table->insert(cells);
  Cells now = table->find(id)->cells;
  t.dirty = true;
  t.changes.push_back({key, ChangeKind::Insert, id, std::nullopt, now});
  journal_op(t, {{"op", "insert"}, {"table", key}, {"row_id", id}, {"cells", cells_to_json(now)}});
  const TableDef& def = table->def();
  if (def.cdc_exempt) return id;
  LogEntry e;
  e.kind = LogKind::Insert;
  e.table = key;
  e.row_id = id;
  e.new_cells = now;
  e.cause = cause;
  int64_t log_id = stage(t, std::move(e));
  if (def.device) t.commands.push_back({0, *def.device, proxy::DeviceAction::Create, now, log_id, key, id});
  dispatch(t, key, policy::TriggerEvent::AfterInsert, nullptr, &now, id, log_id, depth);
  return id;
}

int64_t Kernel::do_update(Transaction& t, const std::string& key, const std::optional<Expr>& where,
                          const std::vector<Assignment>& set, const Scope& outer, const Cause& cause,
                          int depth) {
  refuse_log_write(key);
  auto table = writable(t, key);
  const TableDef& def = table->def();
  for (const auto& a : set) {
    if (!def.column(a.column)) fail(ErrorKind::UnknownColumn, "table " + key + " has no column '" + a.column + "'");
    check_refs(def, a.value, outer);
  }
  if (where) check_refs(def, *where, outer);
  std::vector<RowId> ids;
  for (const auto& [id, row] : table->rows()) {
    RowScope scope(def, def.name, row->cells, &outer);
    if (!where || holds(*where, scope)) ids.push_back(id);
  }
  int64_t affected = 0;
  for (RowId id : ids) {
    const Row* row = table->find(id);
    if (!row) continue;  // removed by a trigger fired for an earlier row
    Cells old = row->cells;
    Cells next = old;
    {
      RowScope scope(def, def.name, old, &outer);
      for (const auto& a : set) next[a.column] = evaluate(a.value, scope);
    }
    table->update(id, next);
    Cells now = table->find(id)->cells;
    ++affected;
    t.dirty = true;
    t.changes.push_back({key, ChangeKind::Update, id, old, now});
    journal_op(t, {{"op", "update"}, {"table", key}, {"row_id", id}, {"cells", cells_to_json(now)}});
    if (def.cdc_exempt) continue;
    LogEntry e;
    e.kind = LogKind::Update;
    e.table = key;
    e.row_id = id;
    e.old_cells = old;
    e.new_cells = now;
    e.cause = cause;
    int64_t log_id = stage(t, std::move(e));
    if (def.device) t.commands.push_back({0, *def.device, proxy::DeviceAction::SetState, now, log_id, key, id});
    dispatch(t, key, policy::TriggerEvent::AfterUpdate, &old, &now, id, log_id, depth);
  }
  return affected;
}

int64_t Kernel::do_delete(Transaction& t, const std::string& key, const std::optional<Expr>& where,
                          const Scope& outer, const Cause& cause, int depth) {
  refuse_log_write(key);
  auto table = writable(t, key);
  const TableDef& def = table->def();
  if (where) check_refs(def, *where, outer);
  std::vector<RowId> ids;
  for (const auto& [id, row] : table->rows()) {
    RowScope scope(def, def.name, row->cells, &outer);
    if (!where || holds(*where, scope)) ids.push_back(id);
  }
  int64_t affected = 0;
  for (RowId id : ids) {
    if (!table->find(id)) continue;
    Cells old = table->erase(id);
    ++affected;
    t.dirty = true;
    t.changes.push_back({key, ChangeKind::Delete, id, old, std::nullopt});
    journal_op(t, {{"op", "delete"}, {"table", key}, {"row_id", id}});
    if (def.cdc_exempt) continue;
    LogEntry e;
    e.kind = LogKind::Delete;
    e.table = key;
    e.row_id = id;
    e.old_cells = old;
    e.cause = cause;
    int64_t log_id = stage(t, std::move(e));
    if (def.device) t.commands.push_back({0, *def.device, proxy::DeviceAction::Delete, old, log_id, key, id});
    dispatch(t, key, policy::TriggerEvent::AfterDelete, &old, nullptr, id, log_id, depth);
  }
  return affected;
}

void Kernel::dispatch(Transaction& t, const std::string& key, policy::TriggerEvent event,
                      const Cells* old_row, const Cells* new_row, RowId row_id,
                      int64_t mutation_log_id, int depth) {
  // Triggers cannot be registered from inside a procedure, but copy the
  // list anyway so nothing a cascade does can invalidate the iteration.
  auto triggers = t.work->triggers;
  for (const auto& trig : triggers) {
    if (trig->event != event || trig->table.qualified() != key) continue;
    if (trig->when && !holds(*trig->when, OldNewScope(old_row, new_row))) continue;
    int child = depth + 1;
    if (child > kMaxCascadeDepth) {
      fail(ErrorKind::CascadeDepthExceeded, "trigger '" + trig->name + "' would run at cascade depth " +
                                                std::to_string(child) + " (limit " +
                                                std::to_string(kMaxCascadeDepth) + ")");
    }
    LogEntry fire;
    fire.kind = LogKind::TriggerFire;
    fire.table = key;
    fire.row_id = row_id;
    fire.detail = trig->name;
    fire.cause = {CauseKind::TriggerActivation, mutation_log_id};
    int64_t fire_id = stage(t, std::move(fire));

    auto proc_it = t.work->procedures.find(trig->procedure);
    if (proc_it == t.work->procedures.end()) {
      fail(ErrorKind::UnknownProcedure, "trigger '" + trig->name + "' names unknown procedure '" + trig->procedure + "'");
    }
    auto proc = proc_it->second;
    const Cells& source = event == policy::TriggerEvent::AfterDelete ? *old_row : *new_row;
    std::vector<Value> args;
    for (const auto& p : proc->params) {
      auto it = source.find(p.name);
      args.push_back(it == source.end() ? Value::null() : it->second);
    }
    args = policy::bind_arguments(*proc, std::move(args));

    LogEntry call;
    call.kind = LogKind::ProcCall;
    call.detail = call_text(proc->name, args);
    call.cause = {CauseKind::TriggerActivation, fire_id};
    int64_t call_id = stage(t, std::move(call));
    policy::Frame frame{call_id, child, 0, old_row, new_row};
    TxnHost host(*this, t);
    policy::execute(*proc, args, host, frame);
  }
}

std::vector<Value> Kernel::run_call(Transaction& t, const std::string& name, std::vector<Value> args,
                                    const Cause& cause, int depth, int call_depth) {
  auto it = t.work->procedures.find(name);
  if (it == t.work->procedures.end()) fail(ErrorKind::UnknownProcedure, "unknown procedure '" + name + "'");
  auto proc = it->second;
  args = policy::bind_arguments(*proc, std::move(args));
  if (call_depth > policy::kMaxCallDepth) {
    fail(ErrorKind::RuntimeError, "CALL nesting exceeds " + std::to_string(policy::kMaxCallDepth) + " at '" + name + "'");
  }
  LogEntry e;
  e.kind = LogKind::ProcCall;
  e.detail = call_text(name, args);
  e.cause = cause;
  int64_t call_id = stage(t, std::move(e));
  policy::Frame frame{call_id, depth, call_depth, nullptr, nullptr};
  TxnHost host(*this, t);
  return policy::execute(*proc, args, host, frame);
}

std::vector<Value> Kernel::run_external(Transaction& t, int64_t invocation_id, const std::string& name,
                                        const std::vector<Value>& args) {
  std::string text = call_text(name, args);
  if (!devices_) fail(ErrorKind::UnknownExternal, "no device fleet attached for " + text);
  auto start = std::chrono::steady_clock::now();
  std::vector<Value> result;
  try {
    result = devices_->call(name, args);
  } catch (const Error& e) {
    device_ns_ += std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    if (e.kind() != ErrorKind::UnknownExternal) t.effects.push_back(text + " failed: " + e.what());
    throw;
  }
  device_ns_ += std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  std::string outcome = text + " -> [";
  for (size_t i = 0; i < result.size(); ++i) outcome += (i ? ", " : "") + to_source(lit(result[i]));
  outcome += "]";
  t.effects.push_back(outcome);
  LogEntry e;
  e.kind = LogKind::ExternalCall;
  e.detail = outcome;
  e.cause = {CauseKind::ProcInvocation, invocation_id};
  stage(t, std::move(e));
  return result;
}

RowId Kernel::insert(TxnId txn, const TableRef& table, const Cells& cells) {
  return guarded(txn, [&](Transaction& t) { return do_insert(t, t.work->resolve(table), cells, t.root, 0); });
}

int64_t Kernel::update(TxnId txn, const TableRef& table, const std::optional<Expr>& where, const Cells& set) {
  return guarded(txn, [&](Transaction& t) {
    std::vector<Assignment> assignments;
    for (const auto& [c, v] : set) assignments.push_back({c, lit(v)});
    return do_update(t, t.work->resolve(table), where, assignments, EmptyScope(), t.root, 0);
  });
}

int64_t Kernel::erase(TxnId txn, const TableRef& table, const std::optional<Expr>& where) {
  return guarded(txn, [&](Transaction& t) {
    return do_delete(t, t.work->resolve(table), where, EmptyScope(), t.root, 0);
  });
}

std::vector<Value> Kernel::call_procedure(TxnId txn, const std::string& name, std::vector<Value> args) {
  return guarded(txn, [&](Transaction& t) { return run_call(t, name, std::move(args), t.root, 0, 0); });
}

CommandResult Kernel::run_sql(Transaction& t, const SqlStatement& stmt) {
  CommandResult r;
  EmptyScope empty;
  if (const auto* q = std::get_if<SelectQuery>(&stmt)) {
    r.rows = run_select(*t.work, *q);
  } else if (const auto* ins = std::get_if<InsertStmt>(&stmt)) {
    Cells cells;
    for (size_t i = 0; i < ins->columns.size(); ++i) cells[ins->columns[i]] = evaluate(ins->values[i], empty);
    r.row_id = do_insert(t, t.work->resolve(ins->table), cells, t.root, 0);
  } else if (const auto* up = std::get_if<UpdateStmt>(&stmt)) {
    r.affected = do_update(t, t.work->resolve(up->table), up->where, up->assignments, empty, t.root, 0);
  } else if (const auto* del = std::get_if<DeleteStmt>(&stmt)) {
    r.affected = do_delete(t, t.work->resolve(del->table), del->where, empty, t.root, 0);
  }
  return r;
}

CommandResult Kernel::execute_sql(TxnId txn, const std::string& sql) {
  return guarded(txn, [&](Transaction& t) { return run_sql(t, parse_sql(sql)); });
}

CommandResult Kernel::execute(TxnId txn, const Command& cmd) {
  CommandResult r;
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CreateSchemaCmd>) {
          create_schema(txn, c.name);
        } else if constexpr (std::is_same_v<T, CreateTableCmd>) {
          create_table(txn, c.def);
        } else if constexpr (std::is_same_v<T, CreateProcedureCmd>) {
          register_procedure(txn, c.source);
        } else if constexpr (std::is_same_v<T, CreateTriggerCmd>) {
          register_trigger(txn, c.def);
        } else if constexpr (std::is_same_v<T, InsertCmd>) {
          r.row_id = insert(txn, c.table, c.cells);
        } else if constexpr (std::is_same_v<T, UpdateCmd>) {
          r.affected = update(txn, c.table, c.where, c.set);
        } else if constexpr (std::is_same_v<T, DeleteCmd>) {
          r.affected = erase(txn, c.table, c.where);
        } else if constexpr (std::is_same_v<T, SqlCmd>) {
          r = execute_sql(txn, c.sql);
        } else if constexpr (std::is_same_v<T, CallCmd>) {
          r.values = call_procedure(txn, c.procedure, c.args);
        }
      },
      cmd);
  return r;
}

ResultSet Kernel::select(const SelectQuery& q, std::optional<TxnId> txn) {
  if (txn) return run_select(*open_txn(*txn).work, q);
  return run_select(*db_.snapshot(), q);
}

std::vector<CommandResult> Kernel::execute_atomic(const std::vector<Command>& commands,
                                                  const RequestContext& ctx) {
  std::vector<CommandResult> out;
  if (commands.empty()) return out;
  TxnId txn = begin(ctx);
  for (const auto& c : commands) out.push_back(execute(txn, c));
  commit(txn);
  return out;
}

std::vector<Value> Kernel::call_procedure(const std::string& name, std::vector<Value> args,
                                          const RequestContext& ctx) {
  {
    auto snap = db_.snapshot();
    const policy::ProcedureDef* proc = snap->procedure(name);
    if (!proc) fail(ErrorKind::UnknownProcedure, "unknown procedure '" + name + "'");
    args = policy::bind_arguments(*proc, std::move(args));
  }
  TxnId txn = begin(ctx);
  auto result = call_procedure(txn, name, std::move(args));
  commit(txn);
  return result;
}

void Kernel::transact(const RequestContext& ctx, const std::function<void(TxnId)>& fn) {
  TxnId txn = begin(ctx);
  try {
    fn(txn);
  } catch (const std::exception& e) {
    if (is_open(txn)) rollback(txn, error_text(e));
    throw;
  }
  commit(txn);
}

void Kernel::commit(TxnId txn) {
  guarded(txn, [&](Transaction& t) { finish_commit(t); });
}

void Kernel::rollback(TxnId txn, const std::string& reason) { finish_rollback(open_txn(txn), reason); }

void Kernel::finish_commit(Transaction& t) {
  if (t.dirty || !t.log.empty()) {
    LogEntry done;
    done.kind = LogKind::Commit;
    done.detail = std::to_string(t.changes.size()) + " row changes";
    done.cause = t.root;
    stage(t, std::move(done));
    auto log = writable(t, provenance::kLogTable);
    for (const auto& e : t.log) {
      Cells cells = provenance::encode(e);
      log->insert_with_id(e.log_id, cells);
      journal_op(t, {{"op", "insert"}, {"table", provenance::kLogTable}, {"row_id", e.log_id}, {"cells", cells_to_json(cells)}});
    }
    for (auto& c : t.commands) c.command_id = next_command_id_++;
    if (journal_) journal_->append({{"txn", t.id}, {"ops", t.ops}, {"counters", counters()}});
    db_.publish(t.work);
    outbox_->enqueue(std::move(t.commands));
  }
  close(t);
}

void Kernel::finish_rollback(Transaction& t, const std::string& reason) {
  std::vector<LogEntry> entries;
  LogEntry rb;
  rb.kind = LogKind::Rollback;
  rb.detail = reason;
  entries.push_back(rb);
  for (const auto& effect : t.effects) {
    LogEntry c;
    c.kind = LogKind::CompensationPending;
    c.detail = effect;
    entries.push_back(c);
  }
  for (auto& e : entries) {
    e.user = t.user;
    e.txn = t.id;
    e.cause = t.root;
  }
  try {
    append_committed(std::move(entries));
  } catch (...) {
    close(t);
    throw;
  }
  close(t);
}

void Kernel::close(Transaction&) {
  {
    std::lock_guard<std::mutex> lock(txn_mu_);
    current_.reset();
  }
  release_slot();
}

void Kernel::append_committed(std::vector<LogEntry> entries) {
  auto committed = db_.snapshot();
  const Table* current = committed->find_table(provenance::kLogTable);
  if (!current) return;
  auto snap = std::make_shared<Snapshot>(*committed);
  auto log = std::make_shared<Table>(*current);
  Json ops = Json::array();
  int64_t txn = entries.empty() ? 0 : entries.front().txn;
  for (auto& e : entries) {
    e.log_id = next_log_id_++;
    e.ts = now();
    Cells cells = provenance::encode(e);
    log->insert_with_id(e.log_id, cells);
    if (journal_) {
      ops.push_back({{"op", "insert"}, {"table", provenance::kLogTable}, {"row_id", e.log_id}, {"cells", cells_to_json(cells)}});
    }
  }
  snap->tables[provenance::kLogTable] = log;
  if (journal_) journal_->append({{"txn", txn}, {"ops", ops}, {"counters", counters()}});
  db_.publish(std::move(snap));
}

int64_t Kernel::append_standalone(LogEntry entry) {
  if (!initialized()) fail(ErrorKind::NotInitialized, "provenance log not initialised");
  acquire_slot();
  struct Release {
    Kernel* k;
    ~Release() { k->release_slot(); }
  } release{this};
  entry.txn = 0;
  int64_t id = next_log_id_;  // assigned inside append_committed under the slot
  append_committed({std::move(entry)});
  return id;
}

provenance::TraceResult Kernel::trace(int64_t log_id) const { return provenance::trace(*db_.snapshot(), log_id); }

std::vector<LogEntry> Kernel::query_log(const provenance::LogFilter& filter) const {
  return provenance::query_log(*db_.snapshot(), filter);
}

void Kernel::on_applied(const proxy::DeviceCommand& cmd, const proxy::SyncStatus& status) {
  if (!initialized()) return;
  LogEntry e;
  e.user = "proxy";
  e.kind = LogKind::ExternalCall;
  e.table = cmd.table;
  e.row_id = cmd.row_id;
  e.new_cells = cmd.payload;
  e.detail = proxy::sync_call_name(cmd.device_kind) + " " + std::string(proxy::to_string(cmd.action)) +
             " command " + std::to_string(cmd.command_id) + " -> " + std::string(proxy::to_string(status.state)) +
             " after " + std::to_string(status.attempts) + " attempt(s)";
  if (status.last_error) e.detail += ": " + *status.last_error;
  e.cause = {CauseKind::TriggerActivation, cmd.origin_log_id};
  append_standalone(std::move(e));
}

void Kernel::replay(const std::vector<Json>& records) {
  if (records.empty()) return;
  auto snap = std::make_shared<Snapshot>();
  std::map<std::string, std::shared_ptr<Table>> owned;
  auto table = [&](const std::string& key) -> Table& {
    auto it = owned.find(key);
    if (it == owned.end()) fail(ErrorKind::Io, "journal references unknown table '" + key + "'");
    return *it->second;
  };
  for (const auto& rec : records) {
    for (const auto& op : rec.at("ops")) {
      const std::string kind = op.at("op").get<std::string>();
      if (kind == "create_schema") {
        snap->schemas.insert(op.at("name").get<std::string>());
      } else if (kind == "create_table") {
        TableDef def = table_def_from_json(op.at("def"));
        std::string key = def.qualified();
        auto t = std::make_shared<Table>(std::move(def));
        owned[key] = t;
        snap->tables[key] = t;
      } else if (kind == "create_procedure") {
        auto def = policy::parse_procedure(op.at("source").get<std::string>());
        std::string name = def.name;
        snap->procedures[name] = std::make_shared<const policy::ProcedureDef>(std::move(def));
      } else if (kind == "create_trigger") {
        auto def = trigger_from_json(op.at("def"));
        snap->next_trigger_order = std::max(snap->next_trigger_order, def.order_key + 1);
        snap->triggers.push_back(std::make_shared<const policy::TriggerDef>(std::move(def)));
      } else if (kind == "insert" || kind == "update") {
        Table& t = table(op.at("table").get<std::string>());
        Cells cells = cells_from_json(op.at("cells"), &t.def());
        RowId id = op.at("row_id").get<int64_t>();
        if (kind == "insert") {
          t.insert_with_id(id, cells);
        } else {
          t.update(id, cells);
        }
      } else if (kind == "delete") {
        table(op.at("table").get<std::string>()).erase(op.at("row_id").get<int64_t>());
      } else {
        fail(ErrorKind::Io, "journal has unknown op '" + kind + "'");
      }
    }
    const Json& c = rec.at("counters");
    next_log_id_ = std::max<int64_t>(next_log_id_, c.at("log").get<int64_t>());
    max_txn_id_ = std::max<int64_t>(max_txn_id_, c.at("txn").get<int64_t>());
    next_request_id_ = std::max<int64_t>(next_request_id_, c.at("request").get<int64_t>());
    next_command_id_ = std::max<int64_t>(next_command_id_, c.at("command").get<int64_t>());
  }
  db_.publish(std::move(snap));
}

}  // namespace dbnet
