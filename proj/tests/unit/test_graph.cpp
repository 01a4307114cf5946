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

#include "noi/baselines.hpp"
#include "noi/error.hpp"
#include "noi/graph.hpp"
#include "support/oracles.hpp"

using namespace noi;

namespace {

Topology path_graph(const std::vector<Role>& roles, double bw) {
  std::vector<Node> nodes;
  std::vector<Link> links;
  for (std::size_t i = 0; i < roles.size(); ++i) {
    nodes.push_back({static_cast<NodeId>(i), ChipletKind::XCD, roles[i], 4});
    if (i > 0) links.push_back({static_cast<NodeId>(i - 1), static_cast<NodeId>(i), bw});
  }
  return Topology(nodes, links);
}

Topology mesh(int rows, int cols) {
  BaselineParams p;
  p.rows = rows;
  p.cols = cols;
  return build_baseline(p, simple_placement(static_cast<std::size_t>(rows * cols), {0}));
}

}  // namespace

TEST_CASE("bfs distances on a path") {
  const Topology t = path_graph({Role::memory, Role::compute, Role::compute, Role::compute}, 1.0);
  CHECK(bfs_distances(t, 0) == std::vector<int>{0, 1, 2, 3});
  const auto all = all_pairs_distances(t);
  CHECK(all[3][1] == 2);
  const Topology split(t.nodes(), {{0, 1, 1.0}});
  CHECK(bfs_distances(split, 0)[3] == kUnreachable);
}

TEST_CASE("path multiplicity examples") {
  const Topology m3 = mesh(3, 3);
  CHECK(path_multiplicity(m3, 0, 8) == 6);
  CHECK(path_multiplicity(m3, 0, 1) == 1);

  BaselineParams ring;
  ring.kind = BaselineKind::ring;
  ring.nodes = 6;
  const Topology r6 = build_baseline(ring, simple_placement(6, {0}));
  CHECK(path_multiplicity(r6, 0, 3) == 2);
  CHECK(path_multiplicity(r6, 0, 2) == 1);
}

TEST_CASE("path multiplicity matches exhaustive enumeration and is symmetric") {
  for (const Topology& t : oracle::random_corpus(200, 5)) {
    for (NodeId s = 0; s < t.node_count(); ++s) {
      for (NodeId d = s + 1; d < t.node_count(); ++d) {
        const auto count = path_multiplicity(t, s, d);
        CHECK(count >= 1);
        CHECK(count == oracle::brute_force_shortest_paths(t, s, d));
        CHECK(count == path_multiplicity(t, d, s));
      }
    }
  }
}

TEST_CASE("memory cut examples") {
  SUBCASE("default canvas structural cut") {
    const auto cut = memory_cut_capacity(default_canvas(), CutMode::structural);
    CHECK(cut.cut_edges.size() == 8);
    CHECK(cut.capacity_gbps == 297.6);
    CHECK_FALSE(cut.is_min_cut);
  }
  SUBCASE("single bottleneck edge") {
    const Topology t = path_graph({Role::memory, Role::compute, Role::compute, Role::compute},
                                  kDefaultLinkGbps);
    const auto cut = memory_cut_capacity(t, CutMode::maxflow);
    CHECK(cut.capacity_gbps == doctest::Approx(37.2));
    CHECK(cut.is_min_cut);
  }
  SUBCASE("two disjoint paths of 10 and 20") {
    std::vector<Node> nodes;
    for (NodeId i = 0; i < 6; ++i) nodes.push_back({i, ChipletKind::XCD, Role::io, 4});
    nodes[0].role = Role::memory;
    nodes[5].role = Role::compute;
    const Topology t(nodes, {{0, 1, 10.0}, {1, 2, 10.0}, {2, 5, 10.0},
                             {0, 3, 20.0}, {3, 4, 20.0}, {4, 5, 20.0}});
    CHECK(memory_cut_capacity(t, CutMode::maxflow).capacity_gbps == doctest::Approx(30.0));
    CHECK(oracle::brute_force_min_cut(t, {0}, {5}) == doctest::Approx(30.0));
  }
  SUBCASE("errors") {
    const Topology t = default_canvas();
    bool empty = false;
    try {
      memory_cut_capacity(t, {}, CutMode::structural);
    } catch (const Error& e) {
      empty = e.code() == ErrorCode::EmptyMemorySet;
    }
    CHECK(empty);
    std::vector<NodeId> all;
    for (NodeId v = 0; v < t.node_count(); ++v) all.push_back(v);
    bool none = false;
    try {
      memory_cut_capacity(t, all, CutMode::maxflow);
    } catch (const Error& e) {
      none = e.code() == ErrorCode::NoComputeNodes;
    }
    CHECK(none);
  }
}

TEST_CASE("max-flow equals the brute-force min cut on random graphs") {
  for (const Topology& t : oracle::random_corpus(200, 3)) {
    const auto memory = t.memory_nodes();
    std::vector<NodeId> sinks;
    for (NodeId c : t.compute_nodes()) sinks.push_back(c);
    const auto flow = memory_cut_capacity(t, memory, CutMode::maxflow);
    const auto structural = memory_cut_capacity(t, memory, CutMode::structural);
    const double oracle = oracle::brute_force_min_cut(t, memory, sinks);
    CHECK(flow.capacity_gbps == doctest::Approx(oracle));
    CHECK(structural.capacity_gbps + 1e-9 >= flow.capacity_gbps);
    double sum = 0.0;
    for (const Link& l : flow.cut_edges) sum += l.bandwidth_gbps;
    CHECK(sum == doctest::Approx(flow.capacity_gbps));
    double structural_sum = 0.0;
    for (const Link& l : structural.cut_edges) {
      CHECK(t.is_memory(l.a) != t.is_memory(l.b));
      structural_sum += l.bandwidth_gbps;
    }
    CHECK(structural_sum == doctest::Approx(structural.capacity_gbps));
  }
}

TEST_CASE("cross-cut add raises the structural cut by its bandwidth and remove restores it") {
  const Topology canvas = default_canvas();
  const double before = memory_cut_capacity(canvas).capacity_gbps;
  for (NodeId m : canvas.memory_nodes()) {
    for (NodeId c : canvas.compute_nodes()) {
      if (!can_add_link(canvas, m, c)) continue;
      const Topology added = apply_edit(canvas, {EditKind::add, m, c});
      CHECK(memory_cut_capacity(added).capacity_gbps == doctest::Approx(before + kDefaultLinkGbps));
      const Topology back = apply_edit(added, {EditKind::remove, m, c});
      CHECK(back == canvas);
      CHECK(memory_cut_capacity(back).capacity_gbps == before);
    }
  }
}
