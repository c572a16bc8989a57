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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dbnet/policy/ast.h"
#include "dbnet/provenance/log.h"
#include "dbnet/proxy/device.h"
#include "dbnet/proxy/outbox.h"
#include "dbnet/store/journal.h"
#include "dbnet/store/query.h"
#include "dbnet/store/snapshot.h"

namespace dbnet {

using TxnId = int64_t;

constexpr int kMaxCascadeDepth = 16;

enum class ChangeKind { Insert, Update, Delete };

struct ChangeRecord {
  std::string table;
  ChangeKind kind = ChangeKind::Insert;
  RowId row_id = 0;
  std::optional<Cells> old_cells;
  std::optional<Cells> new_cells;
};

// Who is asking, and the root cause their changes will trace back to.
struct RequestContext {
  std::string user = "system";
  provenance::Cause root;
};

struct CreateSchemaCmd {
  std::string name;
};
struct CreateTableCmd {
  TableDef def;
};
struct CreateProcedureCmd {
  std::string source;
};
struct CreateTriggerCmd {
  policy::TriggerDef def;
};
struct InsertCmd {
  TableRef table;
  Cells cells;
};
struct UpdateCmd {
  TableRef table;
  std::optional<Expr> where;
  Cells set;
};
struct DeleteCmd {
  TableRef table;
  std::optional<Expr> where;
};
struct SqlCmd {
  std::string sql;
};
struct CallCmd {
  std::string procedure;
  std::vector<Value> args;
};

using Command = std::variant<CreateSchemaCmd, CreateTableCmd, CreateProcedureCmd, CreateTriggerCmd,
                             InsertCmd, UpdateCmd, DeleteCmd, SqlCmd, CallCmd>;

struct CommandResult {
  std::optional<RowId> row_id;
  std::optional<int64_t> affected;
  std::optional<std::vector<Value>> values;
  std::optional<ResultSet> rows;
};

struct ObjectCounts {
  size_t schemas = 0;  // the provenance schema is not counted
  size_t tables = 0;   // nor its log table
  size_t procedures = 0;
  size_t triggers = 0;
};

struct KernelOptions {
  std::shared_ptr<proxy::DeviceApi> devices;
  std::string journal_path;  // empty: no journal
  proxy::RetryPolicy retry;
  bool background_drain = false;
};

// The embedded control-plane kernel: one committed snapshot, one writer at
// a time (FIFO), procedures and triggers run inside the writer's
// transaction, provenance staged with the changes and materialised on
// commit, device commands released to the outbox on commit.
//
// Operations taking a TxnId roll the transaction back on any error before
// rethrowing it.
class Kernel {
 public:
  explicit Kernel(KernelOptions options = {});
  ~Kernel();
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  // Creates the provenance log table. Later calls are no-ops.
  void init_provenance();
  bool initialized() const;

  // Fresh id for an ExternalRequest or TelemetryBatch root.
  int64_t next_request_id();
  RequestContext request(const std::string& user);

  std::shared_ptr<const Snapshot> snapshot() const { return db_.snapshot(); }
  ObjectCounts counts() const;

  // Blocks until the writer slot is free. Throws NotInitialized before
  // init_provenance().
  TxnId begin(const RequestContext& ctx);
  TxnId begin() { return begin(request("system")); }
  void commit(TxnId txn);
  void rollback(TxnId txn, const std::string& reason);
  bool is_open(TxnId txn) const;
  // Changes staged so far in an open transaction.
  std::vector<ChangeRecord> staged_changes(TxnId txn) const;

  void create_schema(TxnId txn, const std::string& name);
  void create_table(TxnId txn, TableDef def);
  void register_procedure(TxnId txn, const std::string& source);
  void register_trigger(TxnId txn, policy::TriggerDef def);

  RowId insert(TxnId txn, const TableRef& table, const Cells& cells);
  int64_t update(TxnId txn, const TableRef& table, const std::optional<Expr>& where, const Cells& set);
  int64_t erase(TxnId txn, const TableRef& table, const std::optional<Expr>& where);
  std::vector<Value> call_procedure(TxnId txn, const std::string& name, std::vector<Value> args);
  CommandResult execute_sql(TxnId txn, const std::string& sql);
  CommandResult execute(TxnId txn, const Command& cmd);

  // Reads the open transaction's staged view, or the committed state.
  ResultSet select(const SelectQuery& q, std::optional<TxnId> txn = std::nullopt);

  // begin, run every command, commit; on error the transaction is rolled
  // back and the error rethrown. An empty list touches nothing.
  std::vector<CommandResult> execute_atomic(const std::vector<Command>& commands,
                                            const RequestContext& ctx);
  // Runs a procedure in its own transaction. Existence and arguments are
  // checked first, so those errors leave no trace in the log.
  std::vector<Value> call_procedure(const std::string& name, std::vector<Value> args,
                                    const RequestContext& ctx);
  // begin, fn, commit; rollback and rethrow if fn throws.
  void transact(const RequestContext& ctx, const std::function<void(TxnId)>& fn);

  // Writes one entry straight to the log outside any transaction (txn 0).
  int64_t append_standalone(provenance::LogEntry entry);

  provenance::TraceResult trace(int64_t log_id) const;
  std::vector<provenance::LogEntry> query_log(const provenance::LogFilter& filter = {}) const;

  proxy::Outbox& outbox() { return *outbox_; }
  const std::shared_ptr<proxy::DeviceApi>& devices() const { return devices_; }
  // Wall time spent inside synchronous device calls so far.
  std::chrono::nanoseconds device_time() const { return std::chrono::nanoseconds(device_ns_.load()); }

 private:
  struct Transaction;
  class TxnHost;

  void acquire_slot();
  void release_slot();
  Transaction& open_txn(TxnId id) const;
  template <class F>
  auto guarded(TxnId id, F&& fn) -> decltype(fn(std::declval<Transaction&>()));

  Timestamp now();
  int64_t stage(Transaction& t, provenance::LogEntry e);
  std::shared_ptr<Table> writable(Transaction& t, const std::string& key);
  void journal_op(Transaction& t, Json op);

  RowId do_insert(Transaction& t, const std::string& key, const Cells& cells,
                  const provenance::Cause& cause, int depth);
  int64_t do_update(Transaction& t, const std::string& key, const std::optional<Expr>& where,
                    const std::vector<Assignment>& set, const Scope& outer,
                    const provenance::Cause& cause, int depth);
  int64_t do_delete(Transaction& t, const std::string& key, const std::optional<Expr>& where,
                    const Scope& outer, const provenance::Cause& cause, int depth);
  void dispatch(Transaction& t, const std::string& key, policy::TriggerEvent event,
                const Cells* old_row, const Cells* new_row, RowId row_id, int64_t mutation_log_id,
                int depth);
  std::vector<Value> run_call(Transaction& t, const std::string& name, std::vector<Value> args,
                              const provenance::Cause& cause, int depth, int call_depth);
  std::vector<Value> run_external(Transaction& t, int64_t invocation_id, const std::string& name,
                                  const std::vector<Value>& args);
  CommandResult run_sql(Transaction& t, const SqlStatement& stmt);

  void finish_commit(Transaction& t);
  void finish_rollback(Transaction& t, const std::string& reason);
  void close(Transaction& t);
  // Appends entries directly to the committed log; caller holds the slot.
  void append_committed(std::vector<provenance::LogEntry> entries);
  Json counters() const;
  void replay(const std::vector<Json>& records);
  void on_applied(const proxy::DeviceCommand& cmd, const proxy::SyncStatus& status);

  Database db_;
  std::shared_ptr<proxy::DeviceApi> devices_;
  std::unique_ptr<proxy::Outbox> outbox_;
  std::unique_ptr<JournalWriter> journal_;

  mutable std::mutex txn_mu_;
  std::unique_ptr<Transaction> current_;
  TxnId max_txn_id_ = 0;

  std::mutex slot_mu_;
  std::condition_variable slot_cv_;
  uint64_t next_ticket_ = 0;
  uint64_t serving_ = 0;

  std::atomic<int64_t> next_log_id_{1};
  std::atomic<int64_t> next_request_id_{1};
  std::atomic<int64_t> next_command_id_{1};
  std::atomic<int64_t> device_ns_{0};
  int64_t last_ts_ = 0;
};

std::string_view to_string(ChangeKind k);

}  // namespace dbnet
