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

#include "dbnet/policy/ast.h"
#include "dbnet/store/snapshot.h"

namespace dbnet::policy {

// Checks every table, column, variable and CALL target in a parsed
// procedure against the catalog. CALLs may name the procedure itself.
// Throws ResolutionError.
void resolve_procedure(const Snapshot& snap, const ProcedureDef& def);

// Validates a trigger and qualifies its table reference in place.
// Throws UnknownTable (missing or provenance log table), UnknownProcedure,
// DuplicateTrigger or ResolutionError (bad `when`, or a procedure parameter
// that is not a column of the table: trigger arguments bind by name from
// NEW, or OLD for deletes).
void resolve_trigger(const Snapshot& snap, TriggerDef& def);

}  // namespace dbnet::policy
