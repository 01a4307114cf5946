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
#include <limits>

#include "noi/baselines.hpp"
#include "noi/error.hpp"
#include "noi/interference.hpp"

using namespace noi;

namespace {

// Memory 0 feeds compute 1, memory 2 feeds compute 3; 1-3 joins the halves.
Topology islands() {
  std::vector<Node> nodes = {{0, ChipletKind::IOD, Role::memory, 8},
                             {1, ChipletKind::XCD, Role::compute, 4},
                             {2, ChipletKind::IOD, Role::memory, 8},
                             {3, ChipletKind::XCD, Role::compute, 4}};
  return Topology(nodes, {{0, 1, kDefaultLinkGbps}, {1, 3, kDefaultLinkGbps}, {2, 3, kDefaultLinkGbps}});
}

WorkloadSpec island_workload() {
  WorkloadSpec w;
  w.active_experts = 2;
  w.placement = {{1}, {3}};
  w.multicast_probs = {1.0, 0.0, 0.0, 0.0};
  w.rho_target = 0.8;
  return w;
}

InterferenceOptions short_run() {
  InterferenceOptions o;
  o.sim.warmup_ns = 20000.0;
  o.sim.measure_ns = 200000.0;
  return o;
}

}  // namespace

TEST_CASE("interference score arithmetic") {
  const auto r = make_interference_report({100, 200, 150, 120}, {50, 180, 75, 100});
  REQUIRE(r.slowdown.size() == 4);
  CHECK(r.slowdown[0] == doctest::Approx(2.0));
  CHECK(r.slowdown[1] == doctest::Approx(200.0 / 180.0));
  CHECK(r.slowdown[2] == doctest::Approx(2.0));
  CHECK(r.slowdown[3] == doctest::Approx(1.2));
  CHECK(r.interference_score == doctest::Approx(2.0));
  CHECK(r.sla_threshold == kDefaultSlaThreshold);
  CHECK(r.violations == std::vector<int>{0, 2});
  CHECK(sla_violations(r, 2.0).empty());
  CHECK(sla_violations(r, 1.5) == std::vector<int>{0, 2});
  CHECK(sla_violations(r, 2.5).empty());
  CHECK_THROWS_AS(sla_violations(r, 1.0), Error);

  double worst = 0.0;
  for (double s : r.slowdown) worst = std::max(worst, s);
  CHECK(r.interference_score == worst);
}

TEST_CASE("starved and idle experts") {
  const auto r = make_interference_report({100, 0, 50}, {0, 0, 50});
  CHECK(std::isinf(r.slowdown[0]));
  CHECK(std::isnan(r.slowdown[1]));
  CHECK(r.slowdown[2] == 1.0);
  CHECK(r.starved == std::vector<int>{0});
  CHECK(std::isinf(r.interference_score));
  CHECK(r.violations == std::vector<int>{0});
  CHECK(make_interference_report({0}, {0}).interference_score == 1.0);
}

TEST_CASE("interference score ignores expert labels") {
  const auto a = make_interference_report({100, 200, 150}, {50, 180, 140});
  const auto b = make_interference_report({150, 100, 200}, {140, 50, 180});
  CHECK(a.interference_score == b.interference_score);

  // Relabel the experts of a simulated trace; with label-blind routing and
  // service the report is a permutation of the original.
  const Topology canvas = default_canvas();
  InterferenceOptions o = short_run();
  o.sim.routing = RoutingPolicy::deterministic_sp;
  o.sim.hbm_service_scv = 0.0;
  const TrafficTrace trace = generate_trace(WorkloadSpec{}, canvas, o.sim.warmup_ns + o.sim.measure_ns, 5);
  const std::vector<int> perm = {2, 0, 3, 1};
  TrafficTrace relabeled = trace;
  for (FlowEvent& ev : relabeled.events) ev.expert = perm[static_cast<std::size_t>(ev.expert)];
  const auto base = evaluate_interference(canvas, trace, o);
  const auto moved = evaluate_interference(canvas, relabeled, o);
  CHECK(base.interference_score == moved.interference_score);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(base.solo_tokens_per_s[k] == moved.solo_tokens_per_s[static_cast<std::size_t>(perm[k])]);
    CHECK(base.concurrent_tokens_per_s[k] == moved.concurrent_tokens_per_s[static_cast<std::size_t>(perm[k])]);
  }
}

TEST_CASE("a single expert interferes with nobody") {
  WorkloadSpec w;
  w.active_experts = 1;
  const auto r = evaluate_interference(default_canvas(), w, 3, short_run());
  REQUIRE(r.solo_tokens_per_s.size() == 1);
  CHECK(r.solo_tokens_per_s[0] == r.concurrent_tokens_per_s[0]);
  CHECK(r.solo_tokens_per_s[0] > 0.0);
  CHECK(r.interference_score == 1.0);
}

TEST_CASE("disjoint islands do not interfere") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = evaluate_interference(islands(), island_workload(), seed, short_run());
    CHECK(r.interference_score == doctest::Approx(1.0).epsilon(0.02));
    const auto m = slowdown_matrix(islands(), island_workload(), seed, short_run());
    CHECK(m[0][1] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(m[1][0] == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("concurrent runs never beat solo runs beyond noise") {
  InterferenceOptions o = short_run();
  o.jobs = 2;
  for (std::uint64_t seed : {1, 2}) {
    const auto r = evaluate_interference(default_canvas(), WorkloadSpec{}, seed, o);
    CHECK(r.interference_score >= 0.98);
    for (double t : r.concurrent_tokens_per_s) CHECK(t >= 0.0);
  }
}

TEST_CASE("slowdown matrix has a unit diagonal") {
  const auto m = slowdown_matrix(default_canvas(), WorkloadSpec{}, 2, short_run());
  REQUIRE(m.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    REQUIRE(m[k].size() == 4);
    CHECK(m[k][k] == 1.0);
  }
}

TEST_CASE("two equal experts on one bottleneck link halve each other") {
  // Memory 0 reaches both experts only through link 0-1.
  std::vector<Node> nodes = {{0, ChipletKind::IOD, Role::memory, 8},
                             {1, ChipletKind::XCD, Role::compute, 4},
                             {2, ChipletKind::XCD, Role::compute, 4},
                             {3, ChipletKind::XCD, Role::compute, 4}};
  const Topology t(nodes, {{0, 1, kDefaultLinkGbps}, {1, 2, kDefaultLinkGbps}, {1, 3, kDefaultLinkGbps}});
  WorkloadSpec w;
  w.num_experts = 2;
  w.top_k = 2;
  w.active_experts = 2;
  w.placement = {{2}, {3}};
  w.rho_target = 2.2;
  InterferenceOptions o;
  o.sim.measure_ns = 3e6;
  double sum = 0.0;
  int n = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = slowdown_matrix(t, w, seed, o);
    sum += m[0][1] + m[1][0];
    n += 2;
  }
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.15));
}
