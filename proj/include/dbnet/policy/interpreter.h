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
#include <string>
#include <vector>

#include "dbnet/policy/ast.h"
#include "dbnet/store/eval.h"
#include "dbnet/store/snapshot.h"

namespace dbnet::policy {

// Where a running procedure sits in the causal and cascade structure.
struct Frame {
  int64_t invocation_id = 0;  // log id of the ProcCall entry
  int depth = 0;              // trigger cascade depth
  int call_depth = 0;         // nested CALL depth
  const Cells* old_row = nullptr;
  const Cells* new_row = nullptr;
};

constexpr int kMaxCallDepth = 64;

// Services a procedure body needs from the transaction that runs it. The
// host stages provenance and dispatches triggers for every mutation.
class Host {
 public:
  virtual ~Host() = default;
  virtual const Snapshot& view() const = 0;
  virtual RowId insert(const Frame& frame, const TableRef& table, const Cells& cells) = 0;
  virtual int64_t update(const Frame& frame, const UpdateStmt& stmt, const Scope& outer) = 0;
  virtual int64_t erase(const Frame& frame, const DeleteStmt& stmt, const Scope& outer) = 0;
  virtual std::vector<Value> call(const Frame& frame, const std::string& procedure,
                                  std::vector<Value> args) = 0;
  virtual std::vector<Value> external(const Frame& frame, const std::string& name,
                                      const std::vector<Value>& args) = 0;
};

// Coerces arguments to the parameter kinds. Throws ArgMismatch.
std::vector<Value> bind_arguments(const ProcedureDef& def, std::vector<Value> args);

// Runs a procedure body and returns its RETURN values (empty when it ends
// without RETURN). Arguments must already be bound.
std::vector<Value> execute(const ProcedureDef& def, const std::vector<Value>& args, Host& host,
                           const Frame& frame);

}  // namespace dbnet::policy
