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
#include <random>

#include "noi/baselines.hpp"
#include "noi/chiplet.hpp"
#include "noi/error.hpp"
#include "noi/graph.hpp"
#include "noi/topology.hpp"
#include "support/oracles.hpp"

using namespace noi;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected noi::Error");
  return ErrorCode::InvalidArgument;
}

std::vector<Node> xcd_nodes(std::size_t n, int cap = 4) {
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back({static_cast<NodeId>(i), ChipletKind::XCD, Role::compute, cap});
  }
  return nodes;
}

Topology ring_of(std::size_t n) {
  std::vector<Link> links;
  for (std::size_t i = 0; i < n; ++i) {
    links.push_back(Link{static_cast<NodeId>(std::min(i, (i + 1) % n)),
                         static_cast<NodeId>(std::max(i, (i + 1) % n)), kDefaultLinkGbps});
  }
  return Topology(xcd_nodes(n), links);
}

}  // namespace

TEST_CASE("chiplet catalog carries all seven kinds") {
  CHECK(chiplet_spec(ChipletKind::IOD).phys_per_edge == 128);
  CHECK(chiplet_spec(ChipletKind::HBM3).width_mm == 12.0);
  CHECK(chiplet_spec(ChipletKind::CCD_dense).process_node_nm == 3);
  CHECK(chiplet_spec(ChipletKind::IOD).relay_capable);
  CHECK_FALSE(chiplet_spec(ChipletKind::XCD).relay_capable);
  for (ChipletKind kind : kAllChipletKinds) {
    const ChipletSpec& spec = chiplet_spec(kind);
    CHECK(spec.kind == kind);
    CHECK(spec.phys_per_edge > 0);
    CHECK(spec.width_mm > 0);
    CHECK(spec.height_mm > 0);
    CHECK(parse_chiplet_kind(to_string(kind)) == kind);
  }
  CHECK(default_port_cap(ChipletKind::IOD) == 8);
  CHECK(default_port_cap(ChipletKind::XCD) == 4);
  CHECK(default_port_cap(ChipletKind::HBM3) == 4);
  CHECK(default_port_cap(ChipletKind::CCD_ai) == 4);
  CHECK(default_port_cap(ChipletKind::CCD_perf) == 2);
  CHECK(default_port_cap(ChipletKind::CCD_dense) == 2);
  CHECK_FALSE(parse_chiplet_kind("GPU").has_value());
}

TEST_CASE("construction rejects malformed graphs") {
  CHECK(code_of([] { Topology(xcd_nodes(2), {{0, 0, 1.0}}); }) == ErrorCode::InvalidTopology);
  CHECK(code_of([] { Topology(xcd_nodes(2), {{0, 1, 1.0}, {0, 1, 2.0}}); }) ==
        ErrorCode::DuplicateLink);
  CHECK(code_of([] { Topology(xcd_nodes(2), {{0, 5, 1.0}}); }) == ErrorCode::UnknownNode);
  CHECK(code_of([] { Topology(xcd_nodes(2), {{0, 1, 0.0}}); }) == ErrorCode::InvalidTopology);
  CHECK(code_of([] { Topology(xcd_nodes(2, 0), {}); }) == ErrorCode::InvalidTopology);
  auto bad_ids = xcd_nodes(2);
  bad_ids[1].id = 7;
  CHECK(code_of([&] { Topology(bad_ids, {}); }) == ErrorCode::InvalidTopology);
}

TEST_CASE("links are stored ordered and queried symmetrically") {
  Topology t(xcd_nodes(3), {{2, 1, 5.0}, {0, 1, 7.0}});
  REQUIRE(t.link_count() == 2);
  CHECK(t.links()[0] == Link{0, 1, 7.0});
  CHECK(t.links()[1] == Link{1, 2, 5.0});
  CHECK(t.has_link(2, 1));
  CHECK(t.bandwidth(1, 0) == 7.0);
  CHECK_FALSE(t.has_link(0, 2));
  CHECK(code_of([&] { (void)t.bandwidth(0, 2); }) == ErrorCode::LinkAbsent);
  CHECK(t.degree(1) == 2);
}

TEST_CASE("validate reports connectivity, port caps and relay violations") {
  SUBCASE("4x4 mesh passes lenient") {
    CHECK(validate(default_canvas()).ok());
  }
  SUBCASE("degree above cap is listed") {
    std::vector<Link> star;
    for (NodeId v = 1; v <= 5; ++v) star.push_back({0, v, kDefaultLinkGbps});
    const auto report = validate(Topology(xcd_nodes(6), star));
    REQUIRE(report.port_cap_violations.size() == 1);
    CHECK(report.port_cap_violations[0].node == 0);
    CHECK(report.port_cap_violations[0].degree == 5);
    CHECK(report.port_cap_violations[0].port_cap == 4);
    CHECK_FALSE(report.ok());
  }
  SUBCASE("disconnected graph") {
    const auto report = validate(Topology(xcd_nodes(3), {{0, 1, 1.0}}));
    CHECK_FALSE(report.connected);
  }
  SUBCASE("memory to compute through XCDs breaks relay_strict") {
    std::vector<Node> nodes = xcd_nodes(4);
    nodes[0] = {0, ChipletKind::IOD, Role::memory, 8};
    const Topology path(nodes, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
    CHECK(validate(path, ValidationMode::lenient).ok());
    const auto strict = validate(path, ValidationMode::relay_strict);
    CHECK_FALSE(strict.relay_violations.empty());
    const bool via_xcd = std::any_of(strict.relay_violations.begin(), strict.relay_violations.end(),
                                     [](const RelayViolation& v) { return v.via == 1 && v.compute == 3; });
    CHECK(via_xcd);
  }
}

TEST_CASE("apply_edit enforces every structural rule") {
  SUBCASE("tree edge removal would disconnect") {
    const Topology tree(xcd_nodes(3), {{0, 1, 1.0}, {1, 2, 1.0}});
    CHECK(code_of([&] { apply_edit(tree, {EditKind::remove, 0, 1}); }) == ErrorCode::WouldDisconnect);
    CHECK_FALSE(can_remove_link(tree, 0, 1));
  }
  SUBCASE("adding at a full port is refused") {
    std::vector<Link> star;
    for (NodeId v = 1; v <= 4; ++v) star.push_back({0, v, kDefaultLinkGbps});
    const Topology t(xcd_nodes(6), [&] {
      auto l = star;
      l.push_back({4, 5, kDefaultLinkGbps});
      return l;
    }());
    CHECK(code_of([&] { apply_edit(t, {EditKind::add, 0, 5}); }) == ErrorCode::PortCapExceeded);
    CHECK_FALSE(can_add_link(t, 0, 5));
  }
  SUBCASE("duplicate and absent links") {
    const Topology ring = ring_of(5);
    CHECK(code_of([&] { apply_edit(ring, {EditKind::add, 1, 0}); }) == ErrorCode::DuplicateLink);
    CHECK(code_of([&] { apply_edit(ring, {EditKind::remove, 0, 2}); }) == ErrorCode::LinkAbsent);
    CHECK(code_of([&] { apply_edit(ring, {EditKind::add, 0, 9}); }) == ErrorCode::UnknownNode);
  }
  SUBCASE("ring chord adds exactly one link") {
    const Topology ring = ring_of(6);
    const Topology chord = apply_edit(ring, {EditKind::add, 0, 3});
    CHECK(chord.link_count() == ring.link_count() + 1);
    CHECK(chord.is_connected());
    CHECK(chord.has_link(3, 0));
    CHECK(apply_edit(chord, {EditKind::remove, 3, 0}) == ring);
  }
}

TEST_CASE("random edit walks keep every invariant") {
  std::mt19937_64 rng(7);
  Topology t = default_canvas();
  int applied = 0;
  for (int step = 0; step < 2000; ++step) {
    const auto a = static_cast<NodeId>(rng() % t.node_count());
    const auto b = static_cast<NodeId>(rng() % t.node_count());
    if (a == b) continue;
    const Edit edit{t.has_link(a, b) ? EditKind::remove : EditKind::add, a, b};
    const bool legal = edit.kind == EditKind::add ? can_add_link(t, a, b) : can_remove_link(t, a, b);
    try {
      const Topology next = apply_edit(t, edit);
      CHECK(legal);
      const long diff = static_cast<long>(next.link_count()) - static_cast<long>(t.link_count());
      CHECK(std::abs(diff) == 1);
      t = next;
      ++applied;
    } catch (const Error&) {
      CHECK_FALSE(legal);
    }
    const auto report = validate(t);
    REQUIRE(report.ok());
  }
  CHECK(applied > 100);
}

TEST_CASE("bridges agree with removal connectivity") {
  for (const Topology& t : oracle::random_corpus(100, 11)) {
    const auto found = bridges(t);
    for (const Link& l : t.links()) {
      const bool expect = !t.without_link(l.a, l.b).is_connected();
      const bool listed = std::find(found.begin(), found.end(), NodePair{l.a, l.b}) != found.end();
      CHECK(expect == listed);
    }
  }
}
