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

#include "noi/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "noi/error.hpp"
#include "noi/rng.hpp"

namespace noi {

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::mesh2d: return "mesh2d";
    case BaselineKind::torus2d: return "torus2d";
    case BaselineKind::ring: return "ring";
    case BaselineKind::hypercube: return "hypercube";
    case BaselineKind::kary_ncube: return "kary_ncube";
    case BaselineKind::cmesh: return "cmesh";
    case BaselineKind::random_regular: return "random_regular";
  }
  return "?";
}

BaselineKind parse_baseline_kind(std::string_view text) {
  for (BaselineKind kind : {BaselineKind::mesh2d, BaselineKind::torus2d, BaselineKind::ring,
                            BaselineKind::hypercube, BaselineKind::kary_ncube, BaselineKind::cmesh,
                            BaselineKind::random_regular}) {
    if (to_string(kind) == text) return kind;
  }
  throw Error(ErrorCode::ConfigError, "unknown baseline kind '" + std::string(text) + "'");
}

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

using PairSet = std::set<NodePair>;

void add(PairSet& links, std::size_t a, std::size_t b) {
  if (a != b) links.insert(ordered(static_cast<NodeId>(a), static_cast<NodeId>(b)));
}

PairSet grid_links(int rows, int cols, bool wrap) {
  PairSet links;
  auto id = [cols](int r, int c) { return static_cast<std::size_t>(r * cols + c); };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) add(links, id(r, c), id(r, c + 1));
      else if (wrap && cols > 2) add(links, id(r, c), id(r, 0));
      if (r + 1 < rows) add(links, id(r, c), id(r + 1, c));
      else if (wrap && rows > 2) add(links, id(r, c), id(0, c));
    }
  }
  return links;
}

PairSet kary_links(int k, int n) {
  PairSet links;
  const std::size_t total = ipow(static_cast<std::size_t>(k), n);
  for (std::size_t v = 0; v < total; ++v) {
    std::size_t stride = 1;
    for (int d = 0; d < n; ++d) {
      const std::size_t digit = (v / stride) % static_cast<std::size_t>(k);
      const std::size_t up = (digit + 1) % static_cast<std::size_t>(k);
      add(links, v, v - digit * stride + up * stride);
      stride *= static_cast<std::size_t>(k);
    }
  }
  return links;
}

PairSet cmesh_links(int rows, int cols, int cluster) {
  if (cluster < 1 || rows % cluster != 0 || cols % cluster != 0) {
    throw Error(ErrorCode::InvalidArgument, "cmesh dimensions must be multiples of the cluster");
  }
  PairSet links;
  auto id = [cols](int r, int c) { return static_cast<std::size_t>(r * cols + c); };
  const int brows = rows / cluster;
  const int bcols = cols / cluster;
  for (int br = 0; br < brows; ++br) {
    for (int bc = 0; bc < bcols; ++bc) {
      std::vector<std::size_t> members;
      for (int r = 0; r < cluster; ++r) {
        for (int c = 0; c < cluster; ++c) members.push_back(id(br * cluster + r, bc * cluster + c));
      }
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) add(links, members[i], members[j]);
      }
      // One bridge link per adjacent block pair, on the block's outer row/column.
      if (bc + 1 < bcols) {
        const int r = br * cluster + (br % 2 == 0 ? 0 : cluster - 1);
        add(links, id(r, bc * cluster + cluster - 1), id(r, (bc + 1) * cluster));
      }
      if (br + 1 < brows) {
        const int c = bc * cluster + (bc % 2 == 0 ? 0 : cluster - 1);
        add(links, id(br * cluster + cluster - 1, c), id((br + 1) * cluster, c));
      }
    }
  }
  return links;
}

bool connected(std::size_t n, const PairSet& links) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;
  for (auto [a, b] : links) {
    auto ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components <= 1;
}

PairSet random_regular_links(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1 || d >= n || (static_cast<long>(n) * d) % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "random_regular needs d < n and n*d even");
  }
  Rng rng(substream(seed, "random_regular"));
  // Configuration model with restarts until the pairing is simple and connected.
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::size_t> stubs;
    for (int v = 0; v < n; ++v) {
      for (int i = 0; i < d; ++i) stubs.push_back(static_cast<std::size_t>(v));
    }
    std::shuffle(stubs.begin(), stubs.end(), rng);
    PairSet links;
    bool simple = true;
    for (std::size_t i = 0; i < stubs.size(); i += 2) {
      auto [a, b] = ordered(static_cast<NodeId>(stubs[i]), static_cast<NodeId>(stubs[i + 1]));
      if (a == b || !links.insert({a, b}).second) {
        simple = false;
        break;
      }
    }
    if (simple && connected(static_cast<std::size_t>(n), links)) return links;
  }
  throw Error(ErrorCode::InvalidArgument, "could not draw a simple connected regular graph");
}

}  // namespace

std::size_t BaselineParams::node_count() const {
  switch (kind) {
    case BaselineKind::mesh2d:
    case BaselineKind::torus2d:
    case BaselineKind::cmesh:
      return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    case BaselineKind::ring:
    case BaselineKind::random_regular:
      return static_cast<std::size_t>(nodes);
    case BaselineKind::hypercube:
      return ipow(2, dimensions);
    case BaselineKind::kary_ncube:
      return ipow(static_cast<std::size_t>(radix), dimensions);
  }
  return 0;
}

Placement simple_placement(std::size_t nodes, const std::vector<NodeId>& memory_ids) {
  Placement placement(nodes, PlacementSlot{ChipletKind::XCD, Role::compute});
  for (NodeId m : memory_ids) placement.at(m) = PlacementSlot{ChipletKind::IOD, Role::memory};
  return placement;
}

Placement default_placement() {
  Placement placement = simple_placement(16, {0, 3, 12, 15});
  for (NodeId v : {5u, 6u, 9u, 10u}) placement[v] = PlacementSlot{ChipletKind::CCD_ai, Role::compute};
  return placement;
}

Topology build_baseline(const BaselineParams& params, const Placement& placement) {
  const std::size_t n = params.node_count();
  if (n != placement.size()) {
    throw Error(ErrorCode::PlacementSizeMismatch,
                std::string(to_string(params.kind)) + " needs " + std::to_string(n) +
                    " nodes, placement has " + std::to_string(placement.size()));
  }
  PairSet pairs;
  switch (params.kind) {
    case BaselineKind::mesh2d: pairs = grid_links(params.rows, params.cols, false); break;
    case BaselineKind::torus2d: pairs = grid_links(params.rows, params.cols, true); break;
    case BaselineKind::ring: pairs = kary_links(params.nodes, 1); break;
    case BaselineKind::hypercube: pairs = kary_links(2, params.dimensions); break;
    case BaselineKind::kary_ncube: pairs = kary_links(params.radix, params.dimensions); break;
    case BaselineKind::cmesh: pairs = cmesh_links(params.rows, params.cols, params.cluster); break;
    case BaselineKind::random_regular:
      pairs = random_regular_links(params.nodes, params.degree, params.seed);
      break;
  }

  std::vector<Node> nodes;
  nodes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back(Node{static_cast<NodeId>(i), placement[i].kind, placement[i].role,
                         default_port_cap(placement[i].kind)});
  }
  std::vector<Link> links;
  std::vector<int> degree(n, 0);
  for (auto [a, b] : pairs) {
    links.push_back(Link{a, b, kDefaultLinkGbps});
    ++degree[a];
    ++degree[b];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (degree[i] > nodes[i].port_cap) {
      throw Error(ErrorCode::DegreeExceedsPortCap,
                  std::string(to_string(params.kind)) + " gives node " + std::to_string(i) +
                      " degree " + std::to_string(degree[i]) + " > cap " +
                      std::to_string(nodes[i].port_cap));
    }
  }
  return Topology(std::move(nodes), std::move(links));
}

Topology default_canvas() {
  return build_baseline(BaselineParams{}, default_placement());
}

Topology sparse_backbone() {
  const Topology canvas = default_canvas();
  std::vector<Link> links;
  for (const Link& link : canvas.links()) {
    if (canvas.is_memory(link.a) != canvas.is_memory(link.b)) links.push_back(link);
  }
  // BFS spanning tree of the compute-induced subgraph, lowest ids first.
  const auto compute = canvas.compute_nodes();
  std::vector<bool> seen(canvas.node_count(), false);
  std::vector<NodeId> queue{compute.front()};
  seen[compute.front()] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    NodeId u = queue[head];
    for (NodeId v : canvas.neighbors(u)) {
      if (seen[v] || canvas.is_memory(v)) continue;
      seen[v] = true;
      links.push_back(Link{std::min(u, v), std::max(u, v), kDefaultLinkGbps});
      queue.push_back(v);
    }
  }
  return Topology(canvas.nodes(), std::move(links));
}

}  // namespace noi
