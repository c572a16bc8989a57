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

#include <atomic>
#include <chrono>
#include <thread>

#include "dbnet/proxy/http_fleet.h"
#include "dbnet/proxy/outbox.h"
#include "dbnet/proxy/sim_fleet.h"
#include "support/fixtures.h"

using namespace dbnet;
using namespace dbnet::proxy;
using namespace std::chrono_literals;
using dbnet::testing::error_kind;

namespace {

DeviceCommand node_cmd(int64_t command_id, DeviceAction action, int64_t node, int64_t pod, double cpu = 0.1) {
  DeviceCommand c;
  c.command_id = command_id;
  c.device_kind = DeviceKind::Node;
  c.action = action;
  c.payload = {{"nodeId", Value(node)}, {"podId", Value(pod)}, {"cpuUtil", Value(cpu)}, {"ingressTraff", Value(1.0)}};
  c.table = "net.Nodes";
  c.row_id = node;
  c.origin_log_id = 40 + command_id;
  return c;
}

DeviceCommand lb_cmd(int64_t command_id, int64_t pod) {
  DeviceCommand c;
  c.command_id = command_id;
  c.device_kind = DeviceKind::LoadBalancer;
  c.action = DeviceAction::Create;
  c.payload = {{"podId", Value(pod)}, {"avgIngressTraff", Value(10.0)}, {"nodeCount", Value(2)}};
  c.table = "lb.LoadBalancers";
  c.row_id = pod;
  return c;
}

// The same checks run against the fleet directly and through loopback HTTP.
void exercise(DeviceApi& api, SimFleet& sim) {
  std::vector<Value> a = api.call("create_node", {Value(1)});
  std::vector<Value> b = api.call("create_node", {Value(1)});
  REQUIRE(a.size() == 1);
  CHECK(b[0].as_int() == a[0].as_int() + 1);
  CHECK(api.get_device_state(DeviceKind::Node, a[0].as_int()).at("alive") == Value(true));
  CHECK(api.call("kill_node", {a[0]}).empty());
  CHECK(api.get_device_state(DeviceKind::Node, a[0].as_int()).at("alive") == Value(false));
  // A killed node stays dead and its id is not handed out again.
  CHECK(error_kind([&] { api.apply(node_cmd(1, DeviceAction::SetState, a[0].as_int(), 1)); }) == ErrorKind::DeviceError);
  CHECK(api.call("create_node", {Value(2)})[0].as_int() == b[0].as_int() + 1);

  CHECK(error_kind([&] { api.call("reboot", {}); }) == ErrorKind::UnknownExternal);
  CHECK(error_kind([&] { api.call("create_node", {Value("x")}); }) == ErrorKind::DeviceError);
  CHECK(error_kind([&] { api.call("kill_node", {Value(9999)}); }) == ErrorKind::DeviceError);
  CHECK(error_kind([&] { api.get_device_state(DeviceKind::AutoScaler, 5); }) == ErrorKind::UnknownDevice);

  api.apply(node_cmd(2, DeviceAction::Create, 50, 3, 0.25));
  Cells state = api.get_device_state(DeviceKind::Node, 50);
  CHECK(state.at("cpuUtil") == Value(0.25));
  CHECK(state.at("podId") == Value(3));
  api.apply(node_cmd(3, DeviceAction::Create, 51, 3));
  api.apply(lb_cmd(4, 3));
  CHECK(sim.lb_weights(3) == std::vector<double>{0.5, 0.5});
  CHECK(api.call("set_weights", {Value(3), Value(0.9), Value(1)}).empty());
  CHECK(sim.lb_weights(3) == std::vector<double>{0.9, 1.0});
  api.apply(node_cmd(5, DeviceAction::Delete, 51, 3));
  CHECK(api.get_device_state(DeviceKind::Node, 51).at("alive") == Value(false));

  api.inject_failure({"create_node", 2});
  CHECK(error_kind([&] { api.call("create_node", {Value(1)}); }) == ErrorKind::DeviceError);
  CHECK(error_kind([&] { api.call("create_node", {Value(1)}); }) == ErrorKind::DeviceError);
  CHECK_NOTHROW(api.call("create_node", {Value(1)}));
  api.inject_failure({"*", 1});
  CHECK(error_kind([&] { api.call("set_weights", {Value(3)}); }) == ErrorKind::DeviceError);
  CHECK_NOTHROW(api.call("set_weights", {Value(3)}));
}

}  // namespace

TEST_CASE("the simulated fleet in process") {
  auto sim = std::make_shared<SimFleet>(0us);
  exercise(*sim, *sim);
}

TEST_CASE("the simulated fleet over HTTP behaves the same") {
  auto sim = std::make_shared<SimFleet>(0us);
  FleetServer server(sim);
  int port = server.start();
  REQUIRE(port > 0);
  HttpFleetClient client("127.0.0.1", port);
  exercise(client, *sim);
  server.stop();
  CHECK(error_kind([&] { client.call("create_node", {Value(1)}); }) == ErrorKind::DeviceError);
}

TEST_CASE("node creation waits out the provisioning delay") {
  SimFleet sim(30ms);
  auto start = std::chrono::steady_clock::now();
  sim.call("create_node", {Value(1)});
  CHECK(std::chrono::steady_clock::now() - start >= 30ms);
  CHECK(sim.operations() == 1);
}

TEST_CASE("device commands round-trip through JSON") {
  DeviceCommand c = node_cmd(7, DeviceAction::SetState, 3, 1, 0.5);
  DeviceCommand back = command_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.payload == c.payload);
  CHECK(back.origin_log_id == c.origin_log_id);
}

TEST_CASE("the outbox applies in order and retries with backoff") {
  auto sim = std::make_shared<SimFleet>(0us);
  Outbox box(sim, RetryPolicy{2ms, 2, 3});
  std::vector<int64_t> seen;
  box.set_observer([&](const DeviceCommand& c, const SyncStatus&) { seen.push_back(c.command_id); });
  box.enqueue({node_cmd(1, DeviceAction::Create, 10, 1), node_cmd(2, DeviceAction::Create, 11, 1)});
  box.enqueue({node_cmd(3, DeviceAction::SetState, 10, 1, 0.75)});
  CHECK(box.pending() == 3);
  sim->inject_failure({"sync_node", 2});
  auto start = std::chrono::steady_clock::now();
  CHECK(box.drain() == 3);
  CHECK(std::chrono::steady_clock::now() - start >= 6ms);  // 2 ms then 4 ms
  CHECK(seen == std::vector<int64_t>{1, 2, 3});
  CHECK(box.pending() == 0);
  auto s = box.status("net.Nodes", 10);
  REQUIRE(s);
  CHECK(s->state == SyncState::InSync);
  CHECK(s->attempts == 1);
  CHECK(box.status("net.Nodes", 11)->attempts == 1);
  CHECK(sim->get_device_state(DeviceKind::Node, 10).at("cpuUtil") == Value(0.75));
  CHECK(!box.status("net.Nodes", 99));
}

TEST_CASE("exhausted retries leave the row in Error") {
  auto sim = std::make_shared<SimFleet>(0us);
  Outbox box(sim, RetryPolicy{1ms, 2, 2});
  box.enqueue({node_cmd(1, DeviceAction::Create, 10, 1), node_cmd(2, DeviceAction::Create, 11, 1)});
  sim->inject_failure({"sync_node", 3});
  CHECK(box.drain() == 1);
  auto s = box.status("net.Nodes", 10);
  REQUIRE(s);
  CHECK(s->state == SyncState::Error);
  CHECK(s->attempts == 3);
  CHECK(s->last_error.has_value());
  CHECK(box.status("net.Nodes", 11)->state == SyncState::InSync);
  CHECK(box.statuses().size() == 2);
  Outbox detached(nullptr, RetryPolicy{0us, 1, 0});
  detached.enqueue({node_cmd(1, DeviceAction::Create, 10, 1)});
  CHECK(detached.drain() == 0);
  CHECK(detached.status("net.Nodes", 10)->state == SyncState::Error);
}

TEST_CASE("the background worker drains without being asked") {
  auto sim = std::make_shared<SimFleet>(0us);
  Outbox box(sim);
  std::atomic<int> done{0};
  box.set_observer([&](const DeviceCommand&, const SyncStatus&) { ++done; });
  box.start_worker();
  for (int i = 0; i < 20; ++i) box.enqueue({node_cmd(i + 1, DeviceAction::Create, 100 + i, 1)});
  for (int spin = 0; spin < 500 && done < 20; ++spin) std::this_thread::sleep_for(2ms);
  box.stop_worker();
  CHECK(done == 20);
  CHECK(sim->nodes().size() == 20);
}
