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

#include "support/properties.h"

using namespace dbnet::testing;

namespace {

void require_pass(const SuiteResult& r, size_t min_cases) {
  INFO(r.name << ": " << r.detail);
  CHECK(r.passed);
  CHECK(r.cases >= min_cases);
}

}  // namespace

TEST_CASE("failed batches leave the pre-state intact") { require_pass(atomicity_fuzz(11, 1000), 1000); }

TEST_CASE("every committed row mutation is logged exactly once") {
  SuiteResult r = cdc_completeness(12, 1000);
  require_pass(r, 1);
}

TEST_CASE("aggregates agree with a direct computation") { require_pass(aggregate_oracle(13, 500), 500); }

TEST_CASE("cascades past depth 16 abort without residue") { require_pass(cascade_abort(), 40); }

TEST_CASE("a user with no rules is refused everywhere") { require_pass(default_deny(), 16); }

TEST_CASE("scenario runs replay from the log and converge") {
  ScenarioSuites s = scenario_suites(42);
  require_pass(s.log_replay, 5);
  require_pass(s.convergence, 5);
}

TEST_CASE("other seeds hold too") {
  require_pass(atomicity_fuzz(101, 200), 200);
  require_pass(cdc_completeness(102, 300), 1);
  require_pass(aggregate_oracle(103, 200), 200);
}
