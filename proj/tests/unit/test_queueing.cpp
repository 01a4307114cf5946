/*
 * Copyright 2026 The noiwb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <doctest.h>

#include <cmath>

#include "noi/augment.hpp"
#include "noi/baselines.hpp"
#include "noi/error.hpp"
#include "noi/graph.hpp"
#include "noi/queueing.hpp"
#include "noi/simulator.hpp"
#include "noi/traffic.hpp"

using namespace noi;

TEST_CASE("Kingman examples") {
  CHECK(kingman_wait(0.5, 1, 1, 1) == doctest::Approx(1.0));
  CHECK(kingman_wait(0.9, 1, 1, 1) == doctest::Approx(9.0));
  CHECK(kingman_wait(0.0, 3, 2, 0.1) == 0.0);
  CHECK_THROWS_WITH_AS(kingman_wait(1.0, 1, 1, 1), doctest::Contains("UnstableQueue"), Error);
  CHECK_THROWS_WITH_AS(kingman_wait(1.5, 1, 1, 1), doctest::Contains("UnstableQueue"), Error);
}

TEST_CASE("Kingman is monotone and diverges near saturation") {
  for (double rho = 0.05; rho < 0.95; rho += 0.05) {
    CHECK(kingman_wait(rho + 0.01, 1.37, 0.5, 2.0) > kingman_wait(rho, 1.37, 0.5, 2.0));
    CHECK(kingman_wait(rho, 1.47, 0.5, 2.0) > kingman_wait(rho, 1.37, 0.5, 2.0));
    CHECK(kingman_wait(rho, 1.37, 0.6, 2.0) > kingman_wait(rho, 1.37, 0.5, 2.0));
  }
  CHECK(kingman_wait(0.99, 1, 1, 1) > 10 * kingman_wait(0.9, 1, 1, 1));
}

TEST_CASE("cut roofline") {
  CHECK(cut_roofline(297.6, 1e6) == doctest::Approx(297600.0));
  CHECK(cut_roofline(2 * 297.6, 1e6) == doctest::Approx(2 * cut_roofline(297.6, 1e6)));
  CHECK(cut_roofline(4 * 2 * kDefaultLinkGbps, 1e6) == doctest::Approx(297600.0));
  CHECK(cut_roofline(memory_cut_capacity(default_canvas()).capacity_gbps, 1e6) ==
        doctest::Approx(297600.0));
}

TEST_CASE("utilization relief") {
  CHECK(utilization_relief(100, 200, 200) == 0.0);
  CHECK(utilization_relief(100, 200, 400) == doctest::Approx(0.25));
  double prev = 0.0;
  for (double mu = 210; mu < 1000; mu += 50) {
    const double r = utilization_relief(100, 200, mu);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("split queue wait") {
  CHECK(split_queue_wait(0.7, 1, 1.37, 0.5, 3.0) == kingman_wait(0.7, 1.37, 0.5, 3.0));
  CHECK(split_queue_wait(0.9, 2, 1, 1, 1) == doctest::Approx(kingman_wait(0.45, 1, 1, 1)));
  CHECK(split_queue_wait(0.9, 2, 1, 1, 1) < split_queue_wait(0.9, 1, 1, 1, 1));
  CHECK(split_queue_wait(0.9, 100000, 1, 1, 1) < 1e-4);
  CHECK_THROWS_AS(split_queue_wait(2.5, 2, 1, 1, 1), Error);
}

TEST_CASE("proxy is pure and bounded by the roofline") {
  const Topology canvas = default_canvas();
  const WorkloadSpec w;
  const ProxyMetrics a = analytic_proxy_eval(canvas, w);
  const ProxyMetrics b = analytic_proxy_eval(canvas, w);
  CHECK(a.throughput_proxy == b.throughput_proxy);
  CHECK(a.latency_proxy == b.latency_proxy);
  CHECK(a.power_proxy == b.power_proxy);
  CHECK(a.link_utilization == b.link_utilization);
  CHECK(a.cut_gbps == doctest::Approx(297.6));
  CHECK(a.throughput_proxy <= a.roofline_tokens_per_s);
  CHECK(a.throughput_proxy > 0);
  CHECK(a.latency_proxy > 0);
  CHECK(a.power_proxy > 0);
  CHECK(a.interference_proxy >= 1.0);

  for (const char* name : {"torus2d", "ring", "cmesh"}) {
    BaselineParams p;
    p.kind = parse_baseline_kind(name);
    const ProxyMetrics m = analytic_proxy_eval(build_baseline(p, default_placement()), w);
    CHECK(m.throughput_proxy <= m.roofline_tokens_per_s);
    CHECK(m.latency_proxy >= 0);
    CHECK(m.power_proxy >= 0);
  }
}

TEST_CASE("isolated experts see their solo throughput") {
  std::vector<Node> nodes = {{0, ChipletKind::IOD, Role::memory, 8},
                             {1, ChipletKind::XCD, Role::compute, 4},
                             {2, ChipletKind::IOD, Role::memory, 8},
                             {3, ChipletKind::XCD, Role::compute, 4}};
  const Topology islands(nodes, {{0, 1, kDefaultLinkGbps}, {1, 3, kDefaultLinkGbps}, {2, 3, kDefaultLinkGbps}});
  WorkloadSpec w;
  w.active_experts = 2;
  w.placement = {{1}, {3}};
  w.multicast_probs = {1.0, 0.0, 0.0, 0.0};
  for (double rho : {0.5, 1.5}) {
    w.rho_target = rho;
    const ProxyMetrics m = analytic_proxy_eval(islands, w);
    REQUIRE(m.experts.size() == 2);
    CHECK(m.experts[0].home == 0);
    CHECK(m.experts[1].home == 2);
    for (const ExpertProxy& x : m.experts) CHECK(x.concurrent_tokens_per_s == x.solo_tokens_per_s);
    CHECK(m.interference_proxy == 1.0);
    CHECK(m.saturated == (rho > 1.0));
  }
}

TEST_CASE("cross-cut additions never lower the cut roofline but can lower contended throughput") {
  const Topology canvas = default_canvas();
  WorkloadSpec w;
  w.rho_target = 0.9;
  ProxyOptions options;
  options.lambda_high = calibrate_lambda_high(w, profile_workload(w), 297.6);
  Topology current = canvas;
  int decreases = 0;
  for (int round = 0; round < 4; ++round) {
    const ProxyMetrics base = analytic_proxy_eval(current, w, options);
    for (auto [a, b] : legal_additions(current)) {
      if (current.is_memory(a) == current.is_memory(b)) continue;
      const ProxyMetrics after = analytic_proxy_eval(current.with_link(a, b), w, options);
      CHECK(after.roofline_tokens_per_s >= base.roofline_tokens_per_s);
      CHECK(after.throughput_proxy <= after.roofline_tokens_per_s);
      if (after.throughput_proxy < base.throughput_proxy) ++decreases;
    }
    current = augment(current, 1, AugmentStrategy::random, static_cast<std::uint64_t>(round)).topology;
  }
  CHECK(decreases > 0);
}

TEST_CASE("mesh proxy throughput is within 25% of the simulator") {
  const Topology canvas = default_canvas();
  const WorkloadSpec w;
  const ProxyMetrics proxy = analytic_proxy_eval(canvas, w);
  SimConfig cfg;
  const TrafficTrace trace = generate_trace(w, canvas, cfg.warmup_ns + cfg.measure_ns, 1);
  const SimReport report = simulate(canvas, trace, cfg);
  const double simulated = report.total_tokens_per_s();
  CHECK(proxy.throughput_proxy == doctest::Approx(simulated).epsilon(0.25));
}
