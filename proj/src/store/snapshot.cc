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

#include "dbnet/store/snapshot.h"

#include "dbnet/common/error.h"

namespace dbnet {

std::string Snapshot::resolve(const TableRef& ref) const {
  if (!ref.schema.empty()) {
    if (!schemas.count(ref.schema)) fail(ErrorKind::UnknownSchema, "unknown schema '" + ref.schema + "'");
    std::string key = ref.schema + "." + ref.name;
    if (!tables.count(key)) fail(ErrorKind::UnknownTable, "unknown table '" + key + "'");
    return key;
  }
  std::string found;
  for (const auto& [key, table] : tables) {
    if (table->def().name != ref.name) continue;
    if (!found.empty()) {
      fail(ErrorKind::MalformedQuery, "ambiguous table name '" + ref.name + "'; qualify it");
    }
    found = key;
  }
  if (found.empty()) fail(ErrorKind::UnknownTable, "unknown table '" + ref.name + "'");
  return found;
}

const Table& Snapshot::table(const TableRef& ref) const { return *tables.at(resolve(ref)); }

const Table* Snapshot::find_table(const std::string& qualified) const {
  auto it = tables.find(qualified);
  return it == tables.end() ? nullptr : it->second.get();
}

const policy::ProcedureDef* Snapshot::procedure(const std::string& name) const {
  auto it = procedures.find(name);
  return it == procedures.end() ? nullptr : it->second.get();
}

}  // namespace dbnet
