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

#include <optional>

#include <json.hpp>

#include "dbnet/common/value.h"
#include "dbnet/store/catalog.h"

namespace dbnet {

using Json = nlohmann::json;

// Values map to plain JSON scalars. Timestamps travel as integer
// microseconds, so decoding needs the target kind to tell them from Ints.
Json to_json(const Value& v);
Value value_from_json(const Json& j, std::optional<ValueKind> hint = std::nullopt);

Json cells_to_json(const Cells& cells);
// With `def`, each cell is decoded as its column's kind.
Cells cells_from_json(const Json& j, const TableDef* def = nullptr);

// {"schema","name","columns":[{"name","kind","constraints":[...]}],
//  "device","cdc_exempt"}; Check constraints carry their source text.
Json to_json(const TableDef& def);
TableDef table_def_from_json(const Json& j);

}  // namespace dbnet
