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

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "dbnet/common/error.h"
#include "dbnet/proxy/sim_fleet.h"
#include "dbnet/txn/kernel.h"

namespace dbnet::testing {

// A kernel with provenance initialised and an instant simulated fleet.
struct KernelFixture {
  explicit KernelFixture(std::chrono::microseconds delay = std::chrono::microseconds(0),
                         std::string journal = {});

  std::shared_ptr<proxy::SimFleet> fleet;
  std::unique_ptr<Kernel> kernel;
};

// t.items(id INT PK, v INT, s TEXT) with Check v >= 0.
TableDef items_table(const std::string& schema = "t", const std::string& name = "items");

// Fresh path under the system temp dir; any previous file is removed.
std::string temp_path(const std::string& stem);

Cells row(std::initializer_list<std::pair<const std::string, Value>> cells);

// Kind of the Error `fn` throws, or nullopt when it returns normally.
std::optional<ErrorKind> error_kind(const std::function<void()>& fn);

}  // namespace dbnet::testing
