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
#include <memory>
#include <string>
#include <vector>

#include "dbnet/api/acl.h"
#include "dbnet/api/client.h"
#include "dbnet/api/server.h"
#include "dbnet/api/service.h"
#include "dbnet/bench/scenario.h"
#include "dbnet/proxy/http_fleet.h"
#include "dbnet/proxy/sim_fleet.h"
#include "dbnet/txn/kernel.h"

namespace dbnet::bench {

inline constexpr const char* kAdminUser = "admin";
inline constexpr const char* kOperatorUser = "operator";
inline constexpr const char* kCollectorUser = "collector";
inline constexpr const char* kAuditorUser = "auditor";

struct EnvironmentOptions {
  ScenarioConfig config;
  std::string fleet_mode = "inproc";  // "http" puts the fleet behind loopback HTTP
  std::string journal_path;
};

// A fresh kernel, simulated fleet and HTTP server on an ephemeral loopback
// port, with the four bench users already registered.
class Environment {
 public:
  explicit Environment(EnvironmentOptions options = {});
  ~Environment();
  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;

  std::unique_ptr<api::ApiClient> client(const std::string& user) const;

  const ScenarioConfig& config() const { return options_.config; }
  Kernel& kernel() { return *kernel_; }
  proxy::SimFleet& fleet() { return *fleet_; }
  api::Service& service() { return *service_; }
  api::AccessControl& acl() { return acl_; }
  int port() const { return port_; }

 private:
  EnvironmentOptions options_;
  std::shared_ptr<proxy::SimFleet> fleet_;
  std::unique_ptr<proxy::FleetServer> fleet_server_;
  std::unique_ptr<Kernel> kernel_;
  api::AccessControl acl_;
  std::unique_ptr<api::Service> service_;
  std::unique_ptr<api::HttpServer> server_;
  int port_ = 0;
};

struct PhaseTiming {
  std::string phase;
  int64_t duration_us = 0;
};

// An assertion failure means the scenario misbehaved; a bound violation
// means it was slower than the reference figure.
enum class CheckKind { Assertion, Bound };

struct Check {
  CheckKind kind = CheckKind::Assertion;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioResult {
  std::vector<PhaseTiming> phases;
  std::vector<Check> checks;

  bool ok() const;
  int64_t duration(const std::string& phase) const;  // -1 when absent
  const Check* check(const std::string& name) const;
};

// Times the creation of every scenario object over the API.
ScenarioResult run_setup(Environment& env);
// Inserts the seed pods and nodes in one transaction and drains the outbox.
ScenarioResult run_seed(Environment& env);
// Pushes node 1's ingress over the threshold.
ScenarioResult run_example1(Environment& env);
// Streams anomalous spans for the lowest-numbered node of pod 2.
ScenarioResult run_example2(Environment& env);
// `clients` concurrent submitters, one batch of `spans` spans each.
ScenarioResult run_load(Environment& env, int clients, int spans, uint64_t seed);

// Differences between the device-backed tables and the fleet, plus
// undelivered outbox commands. Empty when converged.
std::vector<std::string> convergence_issues(Kernel& kernel, proxy::SimFleet& fleet);

struct BenchReport {
  ScenarioConfig config;
  std::vector<PhaseTiming> phases;
  std::vector<Check> checks;

  void add(const ScenarioResult& r);
  bool assertions_ok() const;
  bool bounds_ok() const;
  // phase,duration_us
  std::string csv() const;
  std::string summary() const;
};

// Writes the CSV to `csv_path` and the summary next to it with a
// ".summary.txt" suffix. Throws Io.
void write_report(const BenchReport& report, const std::string& csv_path);

}  // namespace dbnet::bench
