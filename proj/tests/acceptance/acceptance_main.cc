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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dbnet/bench/harness.h"
#include "support/properties.h"

using namespace dbnet;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what) {
  if (!ok) ++failures;
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
}

bool check_ok(const bench::ScenarioResult& r, const std::string& name) {
  const bench::Check* c = r.check(name);
  return c && c->passed;
}

std::string check_detail(const bench::ScenarioResult& r, const std::string& name) {
  const bench::Check* c = r.check(name);
  return c ? c->detail : name + " missing";
}

double cell(Kernel& k, const char* table, int64_t pod, const char* col) {
  auto snap = k.snapshot();
  const Table& t = snap->table(TableRef::parse(table));
  auto id = t.find_by_key(Value(pod));
  return id ? t.find(*id)->cells.at(col).as_float() : NAN;
}

}  // namespace

int main() {
  bench::EnvironmentOptions options;  // 100 ms provisioning delay, seed 42
  bench::Environment env(options);
  const int64_t delay = options.config.provisioning_delay.count();

  bench::ScenarioResult setup = bench::run_setup(env);
  bench::ScenarioResult seed = bench::run_seed(env);

  // 1. Seeded values, read straight from the committed tables.
  {
    const double tol = 1e-9;
    double as1 = cell(env.kernel(), bench::kAutoScalersTable, 1, "avgCpuUtil");
    double as2 = cell(env.kernel(), bench::kAutoScalersTable, 2, "avgCpuUtil");
    double lb1 = cell(env.kernel(), bench::kLoadBalancersTable, 1, "avgIngressTraff");
    double lb2 = cell(env.kernel(), bench::kLoadBalancersTable, 2, "avgIngressTraff");
    bool ok = std::fabs(as1 - 0.595) <= tol && std::fabs(as2 - 0.14) <= tol && std::fabs(lb1 - 301.5) <= tol &&
              std::fabs(lb2 - 67.0) <= tol;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "AutoScalers {1: %.12g, 2: %.12g}, LoadBalancers {1: %.12g, 2: %.12g}, tolerance 1e-9", as1, as2,
                  lb1, lb2);
    report(1, ok, buf);
  }

  // 2. Setup object counts and time.
  {
    int64_t us = setup.duration("setup");
    bool ok = check_ok(setup, "setup_counts") && us >= 0 && us < 350'000;
    report(2, ok, check_detail(setup, "setup_counts") + "; setup " + std::to_string(us) + " us (bound 350000 us)");
  }

  bench::ScenarioResult ex1 = bench::run_example1(env);
  bench::ScenarioResult ex2 = bench::run_example2(env);

  // 3. Kernel latency excluding device time.
  {
    int64_t k1 = ex1.duration("ex1_kernel"), k2 = ex2.duration("ex2_kernel");
    bool ok = k1 >= 0 && k2 >= 0 && k1 < 100'000 && k2 < 100'000 && ex1.ok() && ex2.ok();
    report(3, ok, "example 1 kernel " + std::to_string(k1) + " us, example 2 kernel " + std::to_string(k2) +
                      " us (bound 100000 us; scenario assertions " + (ex1.ok() && ex2.ok() ? "hold" : "failed") + ")");
  }

  // 4. e2e - kernel is the provisioning delay, within 20%.
  {
    int64_t d1 = ex1.duration("ex1_e2e") - ex1.duration("ex1_kernel");
    int64_t d2 = ex2.duration("ex2_e2e") - ex2.duration("ex2_kernel");
    auto within = [&](int64_t d) { return std::fabs(static_cast<double>(d - delay)) <= 0.2 * static_cast<double>(delay); };
    report(4, within(d1) && within(d2),
           "e2e - kernel: example 1 " + std::to_string(d1) + " us, example 2 " + std::to_string(d2) +
               " us; provisioning delay " + std::to_string(delay) + " us +/- 20%");
  }

  // 5. Load: 20 clients x 100 spans.
  {
    bench::ScenarioResult load = bench::run_load(env, 20, 100, options.config.seed);
    int64_t us = load.duration("load");
    bool ok = check_ok(load, "load_no_failures") && check_ok(load, "load_all_stored") &&
              check_ok(load, "load_metrics_consistent") && us < 3'200'000;
    report(5, ok, check_detail(load, "load_all_stored") + "; " + check_detail(load, "load_metrics_consistent") +
                      "; wall clock " + std::to_string(us) + " us (bound 3200000 us)");
  }

  // 6. Provenance chain of the Example 1 node creation.
  report(6, check_ok(ex1, "ex1_provenance_chain"), check_detail(ex1, "ex1_provenance_chain"));

  // 7. Property suites, each under 60 s.
  {
    using namespace dbnet::testing;
    std::vector<std::string> lines;
    bool ok = true;
    auto run = [&](const std::function<std::vector<SuiteResult>()>& fn, size_t min_cases) {
      auto t0 = Clock::now();
      auto results = fn();
      double secs = std::chrono::duration<double>(Clock::now() - t0).count();
      for (const auto& r : results) {
        bool pass = r.passed && r.cases >= min_cases && secs < 60.0;
        ok = ok && pass;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f s", secs);
        lines.push_back(std::string(pass ? "    ok   " : "    FAIL ") + r.name + " (" + std::to_string(r.cases) +
                        " cases, " + buf + "): " + r.detail);
      }
    };
    run([] { return std::vector<SuiteResult>{atomicity_fuzz(7001, 1000)}; }, 1000);
    run([] { return std::vector<SuiteResult>{cdc_completeness(7002, 1000)}; }, 1);
    run([] { return std::vector<SuiteResult>{aggregate_oracle(7003, 500)}; }, 500);
    run([] {
      ScenarioSuites s = scenario_suites(42);
      return std::vector<SuiteResult>{s.log_replay, s.convergence};
    }, 5);
    run([] { return std::vector<SuiteResult>{cascade_abort()}; }, 1);
    run([] { return std::vector<SuiteResult>{default_deny()}; }, 1);
    report(7, ok, "property suites");
    for (const auto& l : lines) std::printf("%s\n", l.c_str());
  }

  std::printf("%s\n", failures ? "acceptance: FAIL" : "acceptance: PASS");
  return failures ? 1 : 0;
}
