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

#include "support/fixtures.h"

#include <atomic>
#include <filesystem>
#include <unistd.h>

#include "dbnet/store/sql_parser.h"

namespace dbnet::testing {

KernelFixture::KernelFixture(std::chrono::microseconds delay, std::string journal)
    : fleet(std::make_shared<proxy::SimFleet>(delay)) {
  KernelOptions opts;
  opts.devices = fleet;
  opts.journal_path = std::move(journal);
  opts.retry.base = std::chrono::microseconds(0);
  kernel = std::make_unique<Kernel>(opts);
  kernel->init_provenance();
}

TableDef items_table(const std::string& schema, const std::string& name) {
  TableDef def;
  def.schema = schema;
  def.name = name;
  def.columns = {column("id", ValueKind::Int, {primary_key()}),
                 column("v", ValueKind::Int, {check(parse_expression("v >= 0"))}),
                 column("s", ValueKind::Text)};
  return def;
}

std::string temp_path(const std::string& stem) {
  static std::atomic<int> seq{0};
  auto p = std::filesystem::temp_directory_path() /
           ("dbnet_" + stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(seq++));
  std::filesystem::remove(p);
  return p.string();
}

Cells row(std::initializer_list<std::pair<const std::string, Value>> cells) { return Cells(cells); }

std::optional<ErrorKind> error_kind(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace dbnet::testing
