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

#include <csignal>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "dbnet/api/server.h"
#include "dbnet/bench/harness.h"
#include "dbnet/common/error.h"
#include "dbnet/proxy/http_fleet.h"
#include "dbnet/proxy/sim_fleet.h"

namespace {

using namespace dbnet;

struct ServeOptions {
  std::string addr;
  std::string journal;
  std::string fleet_mode;
  std::string access_log;
  int delay_ms = 100;
};

int serve(const ServeOptions& o) {
  api::EnvConfig env = api::config_from_env();
  api::Address addr = o.addr.empty() ? env.address : api::parse_address(o.addr);
  std::string journal = o.journal.empty() ? env.journal_path : o.journal;
  std::string mode = o.fleet_mode.empty() ? env.fleet_mode : o.fleet_mode;

  // Block the stop signals before any thread starts so sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  auto fleet = std::make_shared<proxy::SimFleet>(std::chrono::milliseconds(o.delay_ms));
  std::unique_ptr<proxy::FleetServer> fleet_server;
  KernelOptions ko;
  if (mode == "http") {
    fleet_server = std::make_unique<proxy::FleetServer>(fleet);
    ko.devices = std::make_shared<proxy::HttpFleetClient>("127.0.0.1", fleet_server->start("127.0.0.1", 0));
  } else if (mode == "inproc") {
    ko.devices = fleet;
  } else {
    fail(ErrorKind::MalformedRequest, "DBNET_FLEET_MODE must be inproc or http");
  }
  ko.journal_path = journal;
  ko.background_drain = true;
  Kernel kernel(std::move(ko));
  kernel.init_provenance();

  api::AccessControl acl;
  acl.add_user({bench::kAdminUser, {api::kAdminRole}});
  api::Service service(kernel, acl, {{}, o.access_log});
  api::HttpServer server(service);
  int port = server.start(addr.host, addr.port);
  std::cout << "dbnet listening on " << addr.host << ":" << port << " (fleet " << mode << ")" << std::endl;

  int sig = 0;
  sigwait(&stop_signals, &sig);
  std::cout << "stopping" << std::endl;
  server.stop();
  if (fleet_server) fleet_server->stop();
  return 0;
}

struct BenchOptions {
  std::string scenario;
  int clients = 20;
  int spans = 100;
  uint64_t seed = 42;
  std::string out = "bench.csv";
  int delay_ms = 100;
  std::string fleet_mode = "inproc";
  bool strict = false;
};

int bench_run(const BenchOptions& o) {
  bench::EnvironmentOptions eo;
  eo.config.clients = o.clients;
  eo.config.spans_per_client = o.spans;
  eo.config.seed = o.seed;
  eo.config.provisioning_delay = std::chrono::milliseconds(o.delay_ms);
  eo.fleet_mode = o.fleet_mode;
  bench::Environment env(eo);

  bench::BenchReport report;
  report.config = eo.config;
  report.add(bench::run_setup(env));
  if (o.scenario != "setup") report.add(bench::run_seed(env));
  if (o.scenario == "ex1" || o.scenario == "all") report.add(bench::run_example1(env));
  if (o.scenario == "ex2" || o.scenario == "all") report.add(bench::run_example2(env));
  if (o.scenario == "load" || o.scenario == "all") report.add(bench::run_load(env, o.clients, o.spans, o.seed));

  bench::write_report(report, o.out);
  std::cout << report.summary();
  std::cout << "wrote " << o.out << " and " << o.out << ".summary.txt\n";
  if (!report.assertions_ok()) return 1;
  if (o.strict && !report.bounds_ok()) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dbnet: a data-centric network-automation control plane"};
  app.require_subcommand(1);

  ServeOptions serve_opts;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP server until SIGINT or SIGTERM");
  serve_cmd->add_option("--addr", serve_opts.addr, "host:port, overrides DBNET_ADDR");
  serve_cmd->add_option("--journal", serve_opts.journal, "journal path, overrides DBNET_JOURNAL");
  serve_cmd->add_option("--fleet", serve_opts.fleet_mode, "inproc or http, overrides DBNET_FLEET_MODE");
  serve_cmd->add_option("--access-log", serve_opts.access_log, "append the access log to this file");
  serve_cmd->add_option("--delay-ms", serve_opts.delay_ms, "simulated node provisioning delay")->check(CLI::NonNegativeNumber);

  BenchOptions bench_opts;
  auto* bench_cmd = app.add_subcommand("bench", "run a scenario against an in-process server");
  bench_cmd->add_option("scenario", bench_opts.scenario, "setup, ex1, ex2, load or all")
      ->required()
      ->check(CLI::IsMember({"setup", "ex1", "ex2", "load", "all"}));
  bench_cmd->add_option("--clients", bench_opts.clients, "concurrent load clients")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--spans", bench_opts.spans, "spans per load client")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", bench_opts.seed, "seed for synthetic spans");
  bench_cmd->add_option("--out", bench_opts.out, "CSV report path; the summary goes to PATH.summary.txt");
  bench_cmd->add_option("--delay-ms", bench_opts.delay_ms, "simulated node provisioning delay")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--fleet", bench_opts.fleet_mode, "inproc or http")->check(CLI::IsMember({"inproc", "http"}));
  bench_cmd->add_flag("--strict", bench_opts.strict, "also exit nonzero when a latency bound is violated");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*serve_cmd) return serve(serve_opts);
    return bench_run(bench_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  }
}
