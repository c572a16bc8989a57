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

#include "dbnet/bench/harness.h"

#include <array>
#include <cmath>
#include <fstream>
#include <latch>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "dbnet/common/error.h"
#include "dbnet/telemetry/telemetry.h"

namespace dbnet::bench {

using Clock = std::chrono::steady_clock;
using api::Action;
using api::ApiClient;

namespace {

int64_t micros_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
}

int64_t micros(std::chrono::nanoseconds d) { return std::chrono::duration_cast<std::chrono::microseconds>(d).count(); }

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

void expect(ScenarioResult& r, const std::string& name, bool passed, const std::string& detail) {
  r.checks.push_back({CheckKind::Assertion, name, passed, detail});
}

void bound(ScenarioResult& r, const std::string& name, bool passed, const std::string& detail) {
  r.checks.push_back({CheckKind::Bound, name, passed, detail});
}

Json rows_of(ApiClient& c, const std::string& sql) { return c.query(sql).at("result").at("rows"); }

int64_t count_of(ApiClient& c, const std::string& sql) { return rows_of(c, sql).at(0).at(0).get<int64_t>(); }

std::set<int64_t> node_ids(ApiClient& c, const std::string& where = "") {
  std::set<int64_t> out;
  Json rows = rows_of(c, "SELECT nodeId FROM net.Nodes" + (where.empty() ? "" : " WHERE " + where));
  for (const auto& r : rows) {
    out.insert(r.at(0).get<int64_t>());
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string ids_text(const std::set<int64_t>& ids) {
  std::vector<std::string> parts;
  for (int64_t id : ids) parts.push_back(std::to_string(id));
  return "{" + join(parts, ",") + "}";
}

// Pod averages computed on the client side from the raw Nodes rows, to be
// compared with what refresh_pod_stats wrote.
void check_pod_stats(ScenarioResult& r, ApiClient& c, int64_t pod, const std::string& prefix) {
  double cpu = 0, ingress = 0;
  int64_t n = 0;
  for (const auto& row : rows_of(c, "SELECT cpuUtil, ingressTraff FROM net.Nodes WHERE podId = " + std::to_string(pod))) {
    cpu += row.at(0).get<double>();
    ingress += row.at(1).get<double>();
    ++n;
  }
  Json as = rows_of(c, "SELECT avgCpuUtil, nodeCount FROM autoscale.AutoScalers WHERE podId = " + std::to_string(pod));
  Json lb = rows_of(c, "SELECT avgIngressTraff, nodeCount FROM lb.LoadBalancers WHERE podId = " + std::to_string(pod));
  std::string tag = prefix + "_pod" + std::to_string(pod);
  if (as.size() != 1 || lb.size() != 1 || n == 0) {
    expect(r, tag + "_stats", false, "missing AutoScalers or LoadBalancers row, or no nodes");
    return;
  }
  double want_cpu = cpu / n, want_ingress = ingress / n;
  double got_cpu = as[0][0].get<double>(), got_ingress = lb[0][0].get<double>();
  bool ok = std::abs(got_cpu - want_cpu) <= 1e-9 && std::abs(got_ingress - want_ingress) <= 1e-9 &&
            as[0][1].get<int64_t>() == n && lb[0][1].get<int64_t>() == n;
  expect(r, tag + "_stats", ok,
         "avgCpuUtil " + fmt(got_cpu) + " (recomputed " + fmt(want_cpu) + "), avgIngressTraff " + fmt(got_ingress) +
             " (recomputed " + fmt(want_ingress) + "), nodeCount " + std::to_string(as[0][1].get<int64_t>()) +
             " (recomputed " + std::to_string(n) + ")");
}

void check_convergence(ScenarioResult& r, Environment& env, const std::string& prefix) {
  auto issues = convergence_issues(env.kernel(), env.fleet());
  expect(r, prefix + "_converged", issues.empty(), issues.empty() ? "fleet matches tables" : join(issues, "; "));
}

// The newest Insert into net.Nodes for `node`.
std::optional<int64_t> node_insert_log_id(ApiClient& auditor, int64_t node) {
  std::optional<int64_t> found;
  Json log = auditor.log("table=net.Nodes&kind=Insert");
  for (const auto& e : log.at("entries")) {
    const Json& cells = e.at("new_cells");
    if (cells.is_object() && cells.contains("nodeId") && cells["nodeId"] == node) found = e.at("log_id").get<int64_t>();
  }
  return found;
}

void check_trace(ScenarioResult& r, ApiClient& auditor, int64_t node, const std::vector<std::string>& kinds,
                 const std::string& root_kind, int64_t root_id, const std::string& name) {
  auto log_id = node_insert_log_id(auditor, node);
  if (!log_id) {
    expect(r, name, false, "no Insert for node " + std::to_string(node) + " in the log");
    return;
  }
  Json tr = auditor.trace(*log_id);
  auto got = tr.at("kinds").get<std::vector<std::string>>();
  bool ok = got == kinds && tr["root"]["kind"] == root_kind && tr["root"]["ref_id"] == root_id;
  expect(r, name, ok,
         "kinds [" + join(got, ", ") + "], root " + tr["root"]["kind"].get<std::string>() + " " +
             std::to_string(tr["root"]["ref_id"].get<int64_t>()) + " (expected [" + join(kinds, ", ") + "], " +
             root_kind + " " + std::to_string(root_id) + ")");
}

void check_split(ScenarioResult& r, const ScenarioConfig& cfg, const std::string& prefix, int64_t e2e, int64_t device) {
  int64_t kernel = e2e - device;
  r.phases.push_back({prefix + "_e2e", e2e});
  r.phases.push_back({prefix + "_kernel", kernel});
  r.phases.push_back({prefix + "_device", device});
  expect(r, prefix + "_kernel_within_e2e", kernel >= 0 && kernel <= e2e, "kernel latency is part of e2e latency");
  bound(r, prefix + "_kernel_under_100ms", kernel < 100'000, "kernel " + std::to_string(kernel) + " us");
  double delay = static_cast<double>(cfg.provisioning_delay.count());
  bool split_ok = delay == 0 ? device < 1000 : std::abs(static_cast<double>(device) - delay) <= 0.2 * delay;
  bound(r, prefix + "_device_split", split_ok,
        "e2e - kernel = " + std::to_string(device) + " us, provisioning delay " +
            std::to_string(cfg.provisioning_delay.count()) + " us, tolerance 20%");
}

}  // namespace

bool ScenarioResult::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

int64_t ScenarioResult::duration(const std::string& phase) const {
  for (const auto& p : phases) {
    if (p.phase == phase) return p.duration_us;
  }
  return -1;
}

const Check* ScenarioResult::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Environment::Environment(EnvironmentOptions options) : options_(std::move(options)) {
  validate(options_.config);
  fleet_ = std::make_shared<proxy::SimFleet>(options_.config.provisioning_delay);
  KernelOptions ko;
  if (options_.fleet_mode == "http") {
    fleet_server_ = std::make_unique<proxy::FleetServer>(fleet_);
    int fleet_port = fleet_server_->start("127.0.0.1", 0);
    ko.devices = std::make_shared<proxy::HttpFleetClient>("127.0.0.1", fleet_port);
  } else if (options_.fleet_mode == "inproc") {
    ko.devices = fleet_;
  } else {
    fail(ErrorKind::MalformedRequest, "fleet mode must be inproc or http, not '" + options_.fleet_mode + "'");
  }
  ko.journal_path = options_.journal_path;
  kernel_ = std::make_unique<Kernel>(std::move(ko));
  kernel_->init_provenance();

  acl_.add_user({kAdminUser, {api::kAdminRole}});
  acl_.add_user({kOperatorUser, {"operator"}});
  acl_.add_user({kCollectorUser, {"collector"}});
  acl_.add_user({kAuditorUser, {"auditor"}});
  acl_.grant({"operator", "table:net.*", Action::Write});
  acl_.grant({"operator", "table:*", Action::Read});
  acl_.grant({"operator", "procedure:*", Action::Execute});
  acl_.grant({"operator", api::system_object("outbox"), Action::Admin});
  acl_.grant({"collector", api::table_object(telemetry::kSpansTable), Action::Write});
  acl_.grant({"collector", api::table_object(telemetry::kMetricsTable), Action::Read});
  acl_.grant({"auditor", api::table_object(provenance::kLogTable), Action::Read});

  service_ = std::make_unique<api::Service>(*kernel_, acl_);
  server_ = std::make_unique<api::HttpServer>(*service_);
  port_ = server_->start("127.0.0.1", 0);
}

Environment::~Environment() {
  if (server_) server_->stop();
  if (fleet_server_) fleet_server_->stop();
}

std::unique_ptr<ApiClient> Environment::client(const std::string& user) const {
  return std::make_unique<ApiClient>("127.0.0.1", port_, user);
}

ScenarioResult run_setup(Environment& env) {
  ScenarioResult r;
  auto admin = env.client(kAdminUser);
  admin->health();  // opens the connection outside the timed region
  auto commands = setup_commands(env.config());
  auto t0 = Clock::now();
  for (const Command& cmd : commands) {
    if (const auto* c = std::get_if<CreateSchemaCmd>(&cmd)) {
      admin->create_schema(c->name);
    } else if (const auto* c = std::get_if<CreateTableCmd>(&cmd)) {
      admin->create_table(c->def);
    } else if (const auto* c = std::get_if<CreateProcedureCmd>(&cmd)) {
      admin->register_procedure(c->source);
    } else if (const auto* c = std::get_if<CreateTriggerCmd>(&cmd)) {
      admin->register_trigger(c->def);
    }
  }
  int64_t elapsed = micros_between(t0, Clock::now());
  r.phases.push_back({"setup", elapsed});

  Json counts = admin->health().at("counts");
  std::vector<int64_t> got = {counts.at("schemas").get<int64_t>(), counts.at("tables").get<int64_t>(),
                              counts.at("procedures").get<int64_t>(), counts.at("triggers").get<int64_t>()};
  expect(r, "setup_counts", got == std::vector<int64_t>{7, 7, 9, 5},
         "schemas " + std::to_string(got[0]) + ", tables " + std::to_string(got[1]) + ", procedures " +
             std::to_string(got[2]) + ", triggers " + std::to_string(got[3]) + " (expected 7, 7, 9, 5)");
  bound(r, "setup_under_350ms", elapsed < 350'000, "setup " + std::to_string(elapsed) + " us");
  return r;
}

ScenarioResult run_seed(Environment& env) {
  ScenarioResult r;
  auto op = env.client(kOperatorUser);
  auto t0 = Clock::now();
  op->txn(seed_commands());
  r.phases.push_back({"seed", micros_between(t0, Clock::now())});
  op->drain_outbox();

  // Seeded node table values, to 1e-9.
  const std::map<int64_t, double> want_cpu = {{1, 0.595}, {2, 0.14}};
  const std::map<int64_t, double> want_ingress = {{1, 301.5}, {2, 67.0}};
  for (const auto& [pod, cpu] : want_cpu) {
    Json as = rows_of(*op, "SELECT avgCpuUtil FROM autoscale.AutoScalers WHERE podId = " + std::to_string(pod));
    Json lb = rows_of(*op, "SELECT avgIngressTraff FROM lb.LoadBalancers WHERE podId = " + std::to_string(pod));
    double got_cpu = as.size() == 1 ? as[0][0].get<double>() : NAN;
    double got_ingress = lb.size() == 1 ? lb[0][0].get<double>() : NAN;
    std::string tag = "seed_pod" + std::to_string(pod);
    expect(r, tag + "_autoscaler", std::abs(got_cpu - cpu) <= 1e-9,
           "avgCpuUtil " + fmt(got_cpu) + " (expected " + fmt(cpu) + ")");
    expect(r, tag + "_load_balancer", std::abs(got_ingress - want_ingress.at(pod)) <= 1e-9,
           "avgIngressTraff " + fmt(got_ingress) + " (expected " + fmt(want_ingress.at(pod)) + ")");
  }
  check_convergence(r, env, "seed");
  return r;
}

ScenarioResult run_example1(Environment& env) {
  ScenarioResult r;
  auto op = env.client(kOperatorUser);
  auto auditor = env.client(kAuditorUser);
  op->health();
  std::set<int64_t> before = node_ids(*op);

  auto device0 = env.kernel().device_time();
  auto t0 = Clock::now();
  op->query("UPDATE net.Nodes SET ingressTraff = 400.0 WHERE nodeId = 1");
  auto t1 = Clock::now();
  int64_t device = micros(env.kernel().device_time() - device0);
  int64_t request_id = op->last_request_id();
  check_split(r, env.config(), "ex1", micros_between(t0, t1), device);

  op->drain_outbox();
  std::set<int64_t> added;
  for (int64_t id : node_ids(*op, "podId = 1")) {
    if (!before.count(id)) added.insert(id);
  }
  expect(r, "ex1_node_created", added.size() == 1, "new Nodes rows in pod 1: " + ids_text(added));
  if (added.size() == 1) {
    int64_t id = *added.begin();
    auto fleet_nodes = env.fleet().nodes();
    auto it = fleet_nodes.find(id);
    expect(r, "ex1_fleet_node_alive", it != fleet_nodes.end() && it->second.alive && it->second.pod_id == 1,
           "fleet node " + std::to_string(id) + (it == fleet_nodes.end() ? " missing" : it->second.alive ? " alive" : " dead"));
    check_trace(r, *auditor, id, {"Insert", "ProcCall", "TriggerFire", "Update", "ExternalRequest"}, "ExternalRequest",
                request_id, "ex1_provenance_chain");
  }
  check_pod_stats(r, *op, 1, "ex1");
  check_convergence(r, env, "ex1");
  return r;
}

ScenarioResult run_example2(Environment& env) {
  ScenarioResult r;
  const ScenarioConfig& cfg = env.config();
  auto op = env.client(kOperatorUser);
  auto collector = env.client(kCollectorUser);
  auto auditor = env.client(kAuditorUser);

  std::set<int64_t> pod2 = node_ids(*op, "podId = 2");
  if (pod2.empty()) {
    expect(r, "ex2_target", false, "pod 2 has no nodes");
    return r;
  }
  int64_t target = *pod2.begin();
  std::set<int64_t> others = node_ids(*op);
  others.erase(target);

  // A little healthy traffic for the other nodes, below the span minimum.
  telemetry::SpanFactory gen(cfg.seed);
  std::vector<telemetry::Span> warmup;
  for (int64_t id : others) {
    gen.new_trace();
    for (int i = 0; i < std::min(cfg.min_spans - 1, 3); ++i) warmup.push_back(gen.next(id, telemetry::SpanStatus::Ok, 10'000));
  }
  if (!warmup.empty()) collector->ingest(warmup);
  Json others_before = rows_of(*op, "SELECT nodeId, podId, cpuUtil, ingressTraff FROM net.Nodes WHERE nodeId <> " +
                                        std::to_string(target));

  gen.new_trace();
  std::vector<telemetry::Span> anomalous;
  int64_t slow = 2 * cfg.latency_threshold.count();
  for (int i = 0; i < cfg.min_spans; ++i) anomalous.push_back(gen.next(target, telemetry::SpanStatus::Error, slow));

  collector->health();
  auto device0 = env.kernel().device_time();
  auto t0 = Clock::now();
  collector->ingest(anomalous);
  auto t1 = Clock::now();
  int64_t device = micros(env.kernel().device_time() - device0);
  int64_t batch_id = collector->last_request_id();
  check_split(r, cfg, "ex2", micros_between(t0, t1), device);

  op->drain_outbox();
  auto fleet_nodes = env.fleet().nodes();
  auto dead = fleet_nodes.find(target);
  expect(r, "ex2_offending_node_killed", dead != fleet_nodes.end() && !dead->second.alive,
         "fleet node " + std::to_string(target) + (dead == fleet_nodes.end() ? " missing" : dead->second.alive ? " alive" : " dead"));
  expect(r, "ex2_offending_row_removed", node_ids(*op, "nodeId = " + std::to_string(target)).empty(),
         "Nodes row for node " + std::to_string(target));

  std::set<int64_t> replacements;
  for (int64_t id : node_ids(*op, "podId = 2")) {
    if (!pod2.count(id)) replacements.insert(id);
  }
  expect(r, "ex2_replacement_created", replacements.size() == 1, "new Nodes rows in pod 2: " + ids_text(replacements));
  if (replacements.size() == 1) {
    int64_t id = *replacements.begin();
    auto it = fleet_nodes.find(id);
    expect(r, "ex2_replacement_alive", it != fleet_nodes.end() && it->second.alive && it->second.pod_id == 2,
           "fleet node " + std::to_string(id) + (it == fleet_nodes.end() ? " missing" : it->second.alive ? " alive" : " dead"));
    check_trace(r, *auditor, id,
                {"Insert", "ProcCall", "TriggerFire", "Update", "ProcCall", "TriggerFire", "Insert", "TelemetryBatch"},
                "TelemetryBatch", batch_id, "ex2_provenance_chain");
  }

  bool reset = false;
  try {
    collector->metrics(target);
  } catch (const Error& e) {
    reset = e.kind() == ErrorKind::UnknownNode;
  }
  expect(r, "ex2_metrics_reset", reset, "metrics for node " + std::to_string(target) + " are gone");
  expect(r, "ex2_spans_removed", count_of(*op, "SELECT COUNT(*) FROM telemetry.Spans WHERE node_id = " + std::to_string(target)) == 0,
         "spans for node " + std::to_string(target));

  Json others_after = rows_of(*op, "SELECT nodeId, podId, cpuUtil, ingressTraff FROM net.Nodes WHERE nodeId <> " +
                                       std::to_string(target));
  bool untouched = true;
  for (const auto& row : others_before) {
    bool found = false;
    for (const auto& now : others_after) found = found || now == row;
    untouched = untouched && found;
  }
  for (int64_t id : others) {
    auto it = fleet_nodes.find(id);
    untouched = untouched && it != fleet_nodes.end() && it->second.alive;
  }
  expect(r, "ex2_others_untouched", untouched, "nodes " + ids_text(others));
  check_pod_stats(r, *op, 2, "ex2");
  check_convergence(r, env, "ex2");
  return r;
}

ScenarioResult run_load(Environment& env, int clients, int spans, uint64_t seed) {
  ScenarioResult r;
  if (clients < 0 || spans < 0) fail(ErrorKind::MalformedRequest, "client and span counts must not be negative");
  const ScenarioConfig& cfg = env.config();
  auto op = env.client(kOperatorUser);
  int64_t before = count_of(*op, "SELECT COUNT(*) FROM telemetry.Spans");
  if (clients == 0 || spans == 0) {
    r.phases.push_back({"load", 0});
    expect(r, "load_all_stored", true, "nothing to send");
    return r;
  }

  std::vector<int64_t> nodes;
  for (int64_t id : node_ids(*op)) nodes.push_back(id);
  if (nodes.empty()) nodes.push_back(1000);
  // Healthy traffic: errors and latency stay clear of the health policy.
  bool with_errors = cfg.error_rate_threshold > 0.1;
  int64_t max_latency = std::max<int64_t>(1, cfg.latency_threshold.count() / 2);

  std::vector<std::vector<telemetry::Span>> batches(clients);
  std::vector<std::unique_ptr<ApiClient>> submitters;
  for (int c = 0; c < clients; ++c) {
    telemetry::SpanFactory gen(seed * 1000 + static_cast<uint64_t>(c));
    std::mt19937_64 rng(seed + static_cast<uint64_t>(c));
    for (int i = 0; i < spans; ++i) {
      if (i % 10 == 0) gen.new_trace();
      auto status = with_errors && i % 10 == 9 ? telemetry::SpanStatus::Error : telemetry::SpanStatus::Ok;
      int64_t node = nodes[static_cast<size_t>(c + i) % nodes.size()];
      batches[c].push_back(gen.next(node, status, 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(max_latency))));
    }
    submitters.push_back(env.client(kCollectorUser));
    submitters.back()->health();
  }

  std::latch ready(clients + 1);
  std::mutex mu;
  std::vector<std::string> failures;
  size_t accepted = 0;
  std::vector<std::thread> threads;
  for (int c = 0; c < clients; ++c) {
    threads.emplace_back([&, c] {
      ready.arrive_and_wait();
      try {
        Json res = submitters[c]->ingest(batches[c]);
        std::lock_guard<std::mutex> lock(mu);
        accepted += res.at("accepted_count").get<size_t>();
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        failures.push_back("client " + std::to_string(c) + ": " + e.what());
      }
    });
  }
  ready.arrive_and_wait();
  auto t0 = Clock::now();
  for (auto& t : threads) t.join();
  int64_t elapsed = micros_between(t0, Clock::now());
  r.phases.push_back({"load", elapsed});

  size_t total = static_cast<size_t>(clients) * static_cast<size_t>(spans);
  int64_t stored = count_of(*op, "SELECT COUNT(*) FROM telemetry.Spans") - before;
  expect(r, "load_no_failures", failures.empty(), failures.empty() ? "every batch acknowledged" : join(failures, "; "));
  expect(r, "load_all_stored", accepted == total && stored == static_cast<int64_t>(total),
         std::to_string(accepted) + " accepted, " + std::to_string(stored) + " stored, " + std::to_string(total) + " sent");

  // Per-node metrics against a GROUP BY over the stored spans.
  std::map<int64_t, std::array<int64_t, 3>> expected;  // count, errors, latency sum
  for (const auto& row : rows_of(*op, "SELECT node_id, COUNT(*), SUM(latency) FROM telemetry.Spans GROUP BY node_id")) {
    expected[row[0].get<int64_t>()] = {row[1].get<int64_t>(), 0, row[2].get<int64_t>()};
  }
  for (const auto& row :
       rows_of(*op, "SELECT node_id, COUNT(*) FROM telemetry.Spans WHERE status = 'Error' GROUP BY node_id")) {
    expected[row[0].get<int64_t>()][1] = row[1].get<int64_t>();
  }
  std::vector<std::string> mismatches;
  for (const auto& [node, want] : expected) {
    Json m = op->metrics(node);
    bool ok = m["span_count"] == want[0] && m["error_count"] == want[1] && m["latency_sum"] == want[2] &&
              std::abs(m["error_rate"].get<double>() - static_cast<double>(want[1]) / want[0]) <= 1e-9 &&
              std::abs(m["avg_latency"].get<double>() - static_cast<double>(want[2]) / want[0]) <= 1e-9;
    if (!ok) mismatches.push_back("node " + std::to_string(node) + ": " + m.dump());
  }
  expect(r, "load_metrics_consistent", mismatches.empty(),
         mismatches.empty() ? std::to_string(expected.size()) + " nodes agree with their spans" : join(mismatches, "; "));
  bound(r, "load_under_3200ms", elapsed < 3'200'000, "load " + std::to_string(elapsed) + " us");
  check_convergence(r, env, "load");
  return r;
}

std::vector<std::string> convergence_issues(Kernel& kernel, proxy::SimFleet& fleet) {
  std::vector<std::string> issues;
  if (size_t pending = kernel.outbox().pending()) issues.push_back(std::to_string(pending) + " outbox commands pending");
  auto snap = kernel.snapshot();
  auto fleet_nodes = fleet.nodes();
  std::set<int64_t> rows;
  for (const auto& [name, kind] : std::vector<std::pair<std::string, DeviceKind>>{
           {kNodesTable, DeviceKind::Node}, {kAutoScalersTable, DeviceKind::AutoScaler}, {kLoadBalancersTable, DeviceKind::LoadBalancer}}) {
    const Table* table = snap->find_table(name);
    if (!table) continue;
    std::string id_col(proxy::identity_column(kind));
    for (const auto& [row_id, row] : table->rows()) {
      int64_t id = row->cells.at(id_col).as_int();
      std::string what = name + " " + std::to_string(id);
      Cells state;
      try {
        state = fleet.get_device_state(kind, id);
      } catch (const Error&) {
        issues.push_back(what + " has no device");
        continue;
      }
      if (kind == DeviceKind::Node) {
        rows.insert(id);
        if (!state.at("alive").as_bool()) issues.push_back(what + " is dead in the fleet");
        state.erase("alive");
      }
      if (state != row->cells) issues.push_back(what + " differs from its device");
    }
  }
  for (const auto& [id, node] : fleet_nodes) {
    if (node.alive && !rows.count(id)) issues.push_back("fleet node " + std::to_string(id) + " is alive without a row");
  }
  return issues;
}

void BenchReport::add(const ScenarioResult& r) {
  phases.insert(phases.end(), r.phases.begin(), r.phases.end());
  checks.insert(checks.end(), r.checks.begin(), r.checks.end());
}

bool BenchReport::assertions_ok() const {
  for (const auto& c : checks) {
    if (c.kind == CheckKind::Assertion && !c.passed) return false;
  }
  return true;
}

bool BenchReport::bounds_ok() const {
  for (const auto& c : checks) {
    if (c.kind == CheckKind::Bound && !c.passed) return false;
  }
  return true;
}

std::string BenchReport::csv() const {
  std::string out = "phase,duration_us\n";
  for (const auto& p : phases) out += p.phase + "," + std::to_string(p.duration_us) + "\n";
  return out;
}

std::string BenchReport::summary() const {
  std::ostringstream out;
  out << "dbnet bench report\n\n";
  out << "config (thresholds are synthetic defaults unless overridden):\n"
      << "  ingress_threshold " << fmt(config.ingress_threshold) << "\n"
      << "  error_rate_threshold " << fmt(config.error_rate_threshold) << "\n"
      << "  latency_threshold_us " << config.latency_threshold.count() << "\n"
      << "  min_spans " << config.min_spans << "\n"
      << "  provisioning_delay_us " << config.provisioning_delay.count() << "\n"
      << "  clients " << config.clients << ", spans_per_client " << config.spans_per_client << "\n"
      << "  seed " << config.seed << "\n\n";
  out << "phases:\n";
  for (const auto& p : phases) out << "  " << p.phase << " " << p.duration_us << " us\n";
  out << "\nreference figures from the original deployment:\n"
      << "  setup 0.35 s\n"
      << "  example 1: 1.8 s end to end, 0.027 s inside the control plane\n"
      << "  example 2: 1.9 s end to end, 0.045 s inside the control plane\n"
      << "  load: 20 clients x 100 spans in 3.2 s\n\n";
  out << "checks:\n";
  int failed_assertions = 0, violated_bounds = 0;
  for (const auto& c : checks) {
    bool is_bound = c.kind == CheckKind::Bound;
    if (!c.passed) ++(is_bound ? violated_bounds : failed_assertions);
    out << "  " << (c.passed ? "PASS" : is_bound ? "VIOLATED" : "FAIL") << " " << c.name << ": " << c.detail << "\n";
  }
  out << "\n" << failed_assertions << " assertion failures, " << violated_bounds << " bound violations\n";
  return out.str();
}

void write_report(const BenchReport& report, const std::string& csv_path) {
  auto write = [](const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) fail(ErrorKind::Io, "cannot open " + path);
    f << text;
    if (!f.flush()) fail(ErrorKind::Io, "cannot write " + path);
  };
  write(csv_path, report.csv());
  write(csv_path + ".summary.txt", report.summary());
}

}  // namespace dbnet::bench
