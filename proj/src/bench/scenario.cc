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

#include "dbnet/bench/scenario.h"

#include <sstream>

#include "dbnet/common/error.h"
#include "dbnet/store/sql_parser.h"
#include "dbnet/telemetry/telemetry.h"

namespace dbnet::bench {

namespace {

// Always carries a decimal point so the DSL reads it as FLOAT.
std::string real(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  std::string s = out.str();
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (size_t at = text.find(from); at != std::string::npos; at = text.find(from, at + to.size())) {
    text.replace(at, from.size(), to);
  }
  return text;
}

// Upserts the pod's AutoScalers and LoadBalancers rows from its nodes.
const char* kRefreshPodStats = R"(PROC refresh_pod_stats(podId: INT)
BEGIN
  DECLARE n: INT;
  DECLARE cpu: FLOAT;
  DECLARE ingress: FLOAT;
  DECLARE known: INT;
  SELECT COUNT(*), AVG(cpuUtil), AVG(ingressTraff) INTO n, cpu, ingress FROM net.Nodes WHERE podId = :podId;
  SELECT COUNT(*) INTO known FROM autoscale.AutoScalers WHERE podId = :podId;
  IF known = 0 THEN
    INSERT INTO autoscale.AutoScalers (podId, avgCpuUtil, nodeCount) VALUES (:podId, :cpu, :n);
  ELSE
    UPDATE autoscale.AutoScalers SET avgCpuUtil = :cpu, nodeCount = :n WHERE podId = :podId;
  END IF;
  SELECT COUNT(*) INTO known FROM lb.LoadBalancers WHERE podId = :podId;
  IF known = 0 THEN
    INSERT INTO lb.LoadBalancers (podId, avgIngressTraff, nodeCount) VALUES (:podId, :ingress, :n);
  ELSE
    UPDATE lb.LoadBalancers SET avgIngressTraff = :ingress, nodeCount = :n WHERE podId = :podId;
  END IF;
END)";

// Seven top-level statements.
const char* kScaleUp = R"(PROC scale_up(podId: INT)
BEGIN
  DECLARE avgIngress: FLOAT;
  DECLARE newId: INT;
  CALL refresh_pod_stats(podId);
  SELECT avgIngressTraff INTO avgIngress FROM lb.LoadBalancers WHERE podId = :podId;
  IF avgIngress > @INGRESS@ THEN
    EXTERNAL create_node(podId) INTO newId;
    INSERT INTO net.Nodes (nodeId, podId, cpuUtil, ingressTraff) VALUES (:newId, :podId, 0.0, 0.0);
  END IF;
  CALL refresh_pod_stats(podId);
  RETURN newId;
END)";

const char* kReplaceNode = R"(PROC replace_node(node_id: INT)
BEGIN
  DECLARE pod: INT;
  DECLARE newId: INT;
  SELECT podId INTO pod FROM net.Nodes WHERE nodeId = :node_id;
  IF pod IS NULL THEN
    RETURN;
  END IF;
  EXTERNAL kill_node(node_id);
  DELETE FROM net.Nodes WHERE nodeId = :node_id;
  EXTERNAL create_node(pod) INTO newId;
  INSERT INTO net.Nodes (nodeId, podId, cpuUtil, ingressTraff) VALUES (:newId, :pod, 0.0, 0.0);
  CALL reset_metrics(node_id);
  CALL refresh_pod_stats(pod);
  RETURN newId;
END)";

// Zeroing the traffic fires traffic_policy, which refreshes the pod.
const char* kDrainNode = R"(PROC drain_node(node_id: INT)
BEGIN
  UPDATE net.Nodes SET ingressTraff = 0.0 WHERE nodeId = :node_id;
END)";

const char* kReportLoad = R"(PROC report_load(podId: INT)
BEGIN
  DECLARE cpu: FLOAT;
  DECLARE ingress: FLOAT;
  DECLARE n: INT;
  SELECT avgCpuUtil, nodeCount INTO cpu, n FROM autoscale.AutoScalers WHERE podId = :podId;
  SELECT avgIngressTraff INTO ingress FROM lb.LoadBalancers WHERE podId = :podId;
  RETURN cpu, ingress, n;
END)";

TableDef table(const std::string& schema, const std::string& name, std::vector<ColumnDef> columns,
               std::optional<DeviceKind> device = std::nullopt) {
  TableDef d;
  d.schema = schema;
  d.name = name;
  d.columns = std::move(columns);
  d.device = device;
  return d;
}

policy::TriggerDef trigger(const std::string& name, const std::string& table, policy::TriggerEvent event,
                           const std::string& when, const std::string& proc) {
  policy::TriggerDef t;
  t.name = name;
  t.table = TableRef::parse(table);
  t.event = event;
  if (!when.empty()) t.when = parse_expression(when);
  t.procedure = proc;
  return t;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (!(c.ingress_threshold > 0)) fail(ErrorKind::MalformedRequest, "ingress threshold must be positive");
  if (!(c.error_rate_threshold > 0) || c.error_rate_threshold > 1) {
    fail(ErrorKind::MalformedRequest, "error-rate threshold must lie in (0, 1]");
  }
  if (c.latency_threshold.count() <= 0) fail(ErrorKind::MalformedRequest, "latency threshold must be positive");
  if (c.min_spans <= 0) fail(ErrorKind::MalformedRequest, "min spans must be positive");
  if (c.provisioning_delay.count() < 0) fail(ErrorKind::MalformedRequest, "provisioning delay must not be negative");
  if (c.clients < 0 || c.spans_per_client < 0) {
    fail(ErrorKind::MalformedRequest, "client and span counts must not be negative");
  }
}

const std::vector<NodeSeed>& seed_nodes() {
  static const std::vector<NodeSeed> rows = {{1, 1, 0.37, 221.0}, {2, 1, 0.82, 382.0}, {3, 2, 0.14, 67.0}};
  return rows;
}

std::vector<Command> setup_commands(const ScenarioConfig& c) {
  validate(c);
  using policy::TriggerEvent;
  std::vector<Command> out;
  for (const char* s : {"telemetry", "net", "autoscale", "lb", "policy", "ops", "audit"}) {
    out.push_back(CreateSchemaCmd{s});
  }

  std::vector<Command> telemetry_setup = telemetry::setup_commands();
  std::vector<Command> telemetry_tables, telemetry_procs, telemetry_triggers;
  for (auto& cmd : telemetry_setup) {
    if (std::holds_alternative<CreateTableCmd>(cmd)) telemetry_tables.push_back(cmd);
    if (std::holds_alternative<CreateProcedureCmd>(cmd)) telemetry_procs.push_back(cmd);
    if (std::holds_alternative<CreateTriggerCmd>(cmd)) telemetry_triggers.push_back(cmd);
  }

  out.push_back(CreateTableCmd{table("net", "Pods", {column("podId", ValueKind::Int, {primary_key()}),
                                                     column("name", ValueKind::Text)})});
  out.push_back(CreateTableCmd{table(
      "net", "Nodes",
      {column("nodeId", ValueKind::Int, {primary_key()}), column("podId", ValueKind::Int, {not_null()}),
       column("cpuUtil", ValueKind::Float, {check(parse_expression("cpuUtil >= 0.0 AND cpuUtil <= 1.0"))}),
       column("ingressTraff", ValueKind::Float, {check(parse_expression("ingressTraff >= 0.0"))})},
      DeviceKind::Node)});
  out.push_back(CreateTableCmd{table("autoscale", "AutoScalers",
                                     {column("podId", ValueKind::Int, {primary_key()}),
                                      column("avgCpuUtil", ValueKind::Float), column("nodeCount", ValueKind::Int)},
                                     DeviceKind::AutoScaler)});
  out.push_back(CreateTableCmd{table("lb", "LoadBalancers",
                                     {column("podId", ValueKind::Int, {primary_key()}),
                                      column("avgIngressTraff", ValueKind::Float),
                                      column("nodeCount", ValueKind::Int)},
                                     DeviceKind::LoadBalancer)});
  out.insert(out.end(), telemetry_tables.begin(), telemetry_tables.end());

  out.insert(out.end(), telemetry_procs.begin(), telemetry_procs.end());
  out.push_back(CreateProcedureCmd{kRefreshPodStats});
  out.push_back(CreateProcedureCmd{replace_all(kScaleUp, "@INGRESS@", real(c.ingress_threshold))});
  out.push_back(CreateProcedureCmd{kReplaceNode});
  out.push_back(CreateProcedureCmd{kDrainNode});
  out.push_back(CreateProcedureCmd{kReportLoad});

  out.insert(out.end(), telemetry_triggers.begin(), telemetry_triggers.end());
  out.push_back(CreateTriggerCmd{trigger("node_added", kNodesTable, TriggerEvent::AfterInsert, "", "refresh_pod_stats")});
  out.push_back(CreateTriggerCmd{trigger("traffic_policy", kNodesTable, TriggerEvent::AfterUpdate,
                                         "NEW.ingressTraff <> OLD.ingressTraff", "scale_up")});
  out.push_back(CreateTriggerCmd{trigger(
      "health_policy", telemetry::kMetricsTable, TriggerEvent::AfterUpdate,
      "NEW.span_count >= " + std::to_string(c.min_spans) + " AND (NEW.error_rate > " + real(c.error_rate_threshold) +
          " OR NEW.avg_latency > " + real(static_cast<double>(c.latency_threshold.count())) + ")",
      "replace_node")});
  return out;
}

std::vector<Command> seed_commands() {
  std::vector<Command> out;
  out.push_back(InsertCmd{TableRef::parse(kPodsTable), {{"podId", 1}, {"name", "pod-1"}}});
  out.push_back(InsertCmd{TableRef::parse(kPodsTable), {{"podId", 2}, {"name", "pod-2"}}});
  for (const NodeSeed& n : seed_nodes()) {
    out.push_back(InsertCmd{TableRef::parse(kNodesTable),
                            {{"nodeId", n.node_id}, {"podId", n.pod_id}, {"cpuUtil", n.cpu_util},
                             {"ingressTraff", n.ingress_traff}}});
  }
  return out;
}

}  // namespace dbnet::bench
