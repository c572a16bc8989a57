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
#include <cstdint>
#include <string>
#include <vector>

#include "dbnet/txn/kernel.h"

namespace dbnet::bench {

// Thresholds are synthetic defaults; nothing upstream fixes them.
struct ScenarioConfig {
  double ingress_threshold = 300.0;
  double error_rate_threshold = 0.5;
  std::chrono::microseconds latency_threshold = std::chrono::milliseconds(250);
  int min_spans = 5;  // health_policy waits for this many spans
  std::chrono::microseconds provisioning_delay = std::chrono::milliseconds(100);
  int clients = 20;
  int spans_per_client = 100;
  uint64_t seed = 42;
};

// Throws MalformedRequest for non-positive thresholds or negative counts.
void validate(const ScenarioConfig& c);

struct NodeSeed {
  int64_t node_id;
  int64_t pod_id;
  double cpu_util;
  double ingress_traff;
};

// The three seeded Nodes rows.
const std::vector<NodeSeed>& seed_nodes();

// Every object setup_example1 creates, in creation order: 7 schemas,
// 7 tables, 9 procedures and 5 triggers. Thresholds are written into the
// procedure and trigger text.
std::vector<Command> setup_commands(const ScenarioConfig& c);

// Pods 1 and 2 plus the seeded nodes.
std::vector<Command> seed_commands();

inline constexpr const char* kNodesTable = "net.Nodes";
inline constexpr const char* kPodsTable = "net.Pods";
inline constexpr const char* kAutoScalersTable = "autoscale.AutoScalers";
inline constexpr const char* kLoadBalancersTable = "lb.LoadBalancers";

}  // namespace dbnet::bench
