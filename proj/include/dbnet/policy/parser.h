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

#include <string>
#include <string_view>

#include "dbnet/policy/ast.h"

namespace dbnet::policy {

// Parses one `PROC name(params) BEGIN ... END` definition. Throws ParseError
// with "line L, column C: expected X, found Y".
ProcedureDef parse_procedure(std::string_view source);

// Canonical, indented source for a procedure; reparses to the same tree.
std::string to_source(const ProcedureDef& def);
std::string to_source(const Stmt& stmt, int indent = 0);

}  // namespace dbnet::policy
