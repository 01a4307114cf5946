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

#include <algorithm>
#include <cmath>
#include <random>

#include "noi/baselines.hpp"
#include "noi/error.hpp"
#include "noi/routing.hpp"
#include "noi/simulator.hpp"
#include "noi/traffic.hpp"

using namespace noi;

namespace {

Topology pair_topology() {
  return Topology({{0, ChipletKind::IOD, Role::memory, 8}, {1, ChipletKind::XCD, Role::compute, 4}},
                  {{0, 1, kDefaultLinkGbps}});
}

SimConfig quiet_config() {
  SimConfig cfg;
  cfg.warmup_ns = 0.0;
  cfg.measure_ns = 10000.0;
  cfg.hbm_gbps = 0.0;
  return cfg;
}

FlowEvent flow(double ts, NodeId src, std::vector<NodeId> dsts, std::uint64_t bytes, std::uint64_t ordinal,
               FlowClass cls = FlowClass::activation) {
  return FlowEvent{ts, src, std::move(dsts), bytes, cls, 0, ordinal};
}

}  // namespace

TEST_CASE("percentile is nearest rank") {
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  CHECK(percentile(hundred, 0.95) == 95);
  CHECK(percentile(hundred, 1.0) == 100);
  CHECK(percentile(hundred, 0.001) == 1);
  for (double q : {0.01, 0.5, 0.99, 1.0}) CHECK(percentile({7.5}, q) == 7.5);
  CHECK(percentile({5, 1, 3}, 0.5) == 3);
  CHECK_THROWS_WITH_AS(percentile({}, 0.5), doctest::Contains("EmptySamples"), Error);
  CHECK_THROWS_AS(percentile({1.0}, 0.0), Error);
  CHECK_THROWS_AS(percentile({1.0}, 1.5), Error);

  const auto s = summarize({4, 1, 3, 2});
  CHECK(s.count == 4);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.p50 == 2);
  CHECK(s.max == 4);
}

TEST_CASE("zero-contention latency matches the hop formula") {
  const TrafficTrace trace{{flow(100.0, 0, {1}, 4096, 0)}, 10000.0, 1};
  const SimReport r = simulate(pair_topology(), trace, quiet_config());
  REQUIRE(r.latency.count == 1);
  CHECK(r.latency.max == doctest::Approx(4096 / 37.2 + 2.0).epsilon(1e-12));
  CHECK(r.latency.max == doctest::Approx(112.1).epsilon(1e-3));

  // Three hops on a path: store-and-forward adds one service and one router delay per hop.
  std::vector<Node> nodes;
  for (NodeId i = 0; i < 4; ++i) nodes.push_back({i, ChipletKind::XCD, Role::compute, 4});
  const Topology path(nodes, {{0, 1, 37.2}, {1, 2, 20.0}, {2, 3, 50.0}});
  const TrafficTrace hop3{{flow(0.0, 0, {3}, 4096, 0)}, 10000.0, 1};
  const SimReport r3 = simulate(path, hop3, quiet_config());
  CHECK(r3.latency.max == doctest::Approx(4096 / 37.2 + 4096 / 20.0 + 4096 / 50.0 + 3 * 2.0).epsilon(1e-12));

  // Multi-packet flow: the last packet trails by one service time per extra packet.
  const TrafficTrace big{{flow(0.0, 1, {0}, 3 * 4096, 0)}, 10000.0, 1};
  const SimReport rb = simulate(pair_topology(), big, quiet_config());
  CHECK(rb.latency.max == doctest::Approx(3 * 4096 / 37.2 + 2.0));
  CHECK(rb.expert_tokens[0] == 1);
}

TEST_CASE("FIFO link: the second packet waits exactly one service time") {
  const TrafficTrace trace{{flow(0.0, 1, {0}, 4096, 0), flow(0.0, 1, {0}, 4096, 1)}, 10000.0, 1};
  const SimReport r = simulate(pair_topology(), trace, quiet_config());
  const auto& waits = r.queue_delay_ns[directed_link(pair_topology(), 1, 0)];
  REQUIRE(waits.size() == 2);
  CHECK(waits[0] == 0.0);
  CHECK(waits[1] == doctest::Approx(4096 / 37.2));
}

TEST_CASE("multicast duplicates along the tree") {
  BaselineParams p;
  p.rows = 3;
  p.cols = 3;
  const Topology t = build_baseline(p, simple_placement(9, {0}));
  const TrafficTrace trace{{flow(0.0, 0, {2, 8}, 4096, 0)}, 10000.0, 1};
  SimConfig cfg = quiet_config();
  const SimReport r = simulate(t, trace, cfg);
  CHECK(r.injected_bytes == 2 * 4096);
  CHECK(r.delivered_bytes == 2 * 4096);
  CHECK(r.latency.count == 2);
  // Shared hops 0-1-2 carry one copy each.
  CHECK(r.link_utilization[directed_link(t, 0, 1)] == doctest::Approx(4096 / 37.2 / cfg.measure_ns));
  CHECK(r.expert_tokens[0] == 1);
}

TEST_CASE("simulation validates its input") {
  const Topology t = pair_topology();
  CHECK_THROWS_WITH_AS(simulate(t, TrafficTrace{{flow(0.0, 0, {5}, 10, 0)}, 100.0, 1}, quiet_config()),
                       doctest::Contains("UnknownNode"), Error);
  CHECK_THROWS_WITH_AS(
      simulate(t, TrafficTrace{{flow(5.0, 0, {1}, 10, 0), flow(1.0, 0, {1}, 10, 1)}, 100.0, 1}, quiet_config()),
      doctest::Contains("NonMonotoneTrace"), Error);
  SimConfig bad = quiet_config();
  bad.measure_ns = 0.0;
  CHECK_THROWS_AS(simulate(t, TrafficTrace{{flow(0.0, 0, {1}, 10, 0)}, 100.0, 1}, bad), Error);
}

TEST_CASE("bytes are conserved and drain empties the network") {
  const Topology canvas = default_canvas();
  WorkloadSpec w;
  w.rho_target = 0.9;
  SimConfig cfg;
  cfg.warmup_ns = 20000.0;
  cfg.measure_ns = 100000.0;
  cfg.record_flows = true;
  const TrafficTrace trace = generate_trace(w, canvas, cfg.warmup_ns + cfg.measure_ns, 4);

  const SimReport cut = simulate(canvas, trace, cfg);
  CHECK(cut.delivered_bytes <= cut.injected_bytes);
  CHECK(cut.in_flight_bytes() > 0);
  std::uint64_t inj = 0, del = 0;
  for (const FlowRecord& f : cut.flows) {
    CHECK(f.delivered_bytes <= f.injected_bytes);
    inj += f.injected_bytes;
    del += f.delivered_bytes;
  }
  CHECK(inj == cut.injected_bytes);
  CHECK(del == cut.delivered_bytes);

  cfg.drain = true;
  const SimReport drained = simulate(canvas, trace, cfg);
  CHECK(drained.delivered_bytes == drained.injected_bytes);
  for (const FlowRecord& f : drained.flows) {
    CHECK(f.delivered_bytes == f.injected_bytes);
    CHECK(f.completion_ns >= 0.0);
  }
}

TEST_CASE("identical inputs give identical reports") {
  const Topology canvas = default_canvas();
  SimConfig cfg;
  cfg.warmup_ns = 10000.0;
  cfg.measure_ns = 100000.0;
  const TrafficTrace trace = generate_trace(WorkloadSpec{}, canvas, 110000.0, 8);
  const SimReport a = simulate(canvas, trace, cfg);
  const SimReport b = simulate(canvas, trace, cfg);
  CHECK(a.latency_ns == b.latency_ns);
  CHECK(a.queue_delay_ns == b.queue_delay_ns);
  CHECK(a.utilization == b.utilization);
  CHECK(a.expert_tokens == b.expert_tokens);
  CHECK(a.events == b.events);
  CHECK(a.cut_goodput_gbps == b.cut_goodput_gbps);
  const auto& s = a.latency;
  CHECK(s.p50 <= s.p95);
  CHECK(s.p95 <= s.p99);
  CHECK(s.p99 <= s.max);
  for (double u : a.link_utilization) {
    CHECK(u >= 0.0);
    CHECK(u <= 1.0 + 1e-9);
  }
}

TEST_CASE("overload cannot push goodput past the cut") {
  const Topology canvas = default_canvas();
  WorkloadSpec w;
  w.rho_target = 1.2;
  SimConfig cfg;
  cfg.measure_ns = 300000.0;
  const TrafficTrace trace = generate_trace(w, canvas, cfg.warmup_ns + cfg.measure_ns, 2);
  const SimReport r = simulate(canvas, trace, cfg);
  CHECK(r.cut_goodput_gbps <= 297.6 + 1e-9);
  CHECK(r.cut_goodput_gbps > 0.5 * 297.6);
}

TEST_CASE("M/M/1 mean wait matches the closed form") {
  const Topology t = pair_topology();
  const double mean_bytes = 40000.0;
  const double service = mean_bytes / kDefaultLinkGbps;
  for (double rho : {0.3, 0.6, 0.8}) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(rho * 1000));
    std::exponential_distribution<double> gap(rho / service);
    std::exponential_distribution<double> size(1.0 / mean_bytes);
    TrafficTrace trace;
    trace.experts = 1;
    double now = 0.0;
    for (std::uint64_t i = 0; i < 1000000; ++i) {
      now += gap(rng);
      const auto bytes = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(size(rng))));
      trace.events.push_back(flow(now, 1, {0}, bytes, i));
    }
    trace.duration_ns = now;
    SimConfig cfg;
    cfg.packet_bytes = 1e12;
    cfg.hbm_gbps = 0.0;
    cfg.warmup_ns = 0.05 * now;
    cfg.measure_ns = 0.9 * now;
    cfg.util_window_ns = cfg.measure_ns;
    const SimReport r = simulate(t, trace, cfg);
    const auto& waits = r.queue_delay_ns[directed_link(t, 1, 0)];
    double sum = 0.0;
    for (double x : waits) sum += x;
    const double measured = sum / static_cast<double>(waits.size());
    const double expected = rho / (1.0 - rho) * service;
    CHECK(measured == doctest::Approx(expected).epsilon(0.10));
    CHECK(r.link_utilization[directed_link(t, 1, 0)] == doctest::Approx(rho).epsilon(0.03));
  }
}
