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

#include "noi/topology.hpp"

#include <algorithm>
#include <tuple>

#include "noi/error.hpp"
#include "noi/graph.hpp"

namespace noi {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::memory: return "memory";
    case Role::compute: return "compute";
    case Role::io: return "io";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "memory") return Role::memory;
  if (text == "compute") return Role::compute;
  if (text == "io") return Role::io;
  return std::nullopt;
}

bool operator==(const Node& lhs, const Node& rhs) {
  return std::tie(lhs.id, lhs.kind, lhs.role, lhs.port_cap) ==
         std::tie(rhs.id, rhs.kind, rhs.role, rhs.port_cap);
}

bool operator==(const Topology& lhs, const Topology& rhs) {
  return lhs.nodes_ == rhs.nodes_ && lhs.links_ == rhs.links_;
}

Topology::Topology(std::vector<Node> nodes, std::vector<Link> links)
    : nodes_(std::move(nodes)), links_(std::move(links)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id != i) {
      throw Error(ErrorCode::InvalidTopology, "node ids must be contiguous from 0");
    }
    if (nodes_[i].port_cap <= 0) {
      throw Error(ErrorCode::InvalidTopology, "port cap must be positive");
    }
  }
  for (Link& link : links_) {
    if (link.a == link.b) throw Error(ErrorCode::InvalidTopology, "self-loop");
    if (link.a > link.b) std::swap(link.a, link.b);
    if (link.b >= nodes_.size()) throw Error(ErrorCode::UnknownNode, "link endpoint out of range");
    if (!(link.bandwidth_gbps > 0.0)) {
      throw Error(ErrorCode::InvalidTopology, "link bandwidth must be positive");
    }
  }
  std::sort(links_.begin(), links_.end(), [](const Link& x, const Link& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (std::size_t i = 1; i < links_.size(); ++i) {
    if (links_[i].a == links_[i - 1].a && links_[i].b == links_[i - 1].b) {
      throw Error(ErrorCode::DuplicateLink,
                  "duplicate link " + std::to_string(links_[i].a) + "-" + std::to_string(links_[i].b));
    }
  }
  rebuild_adjacency();
}

void Topology::rebuild_adjacency() {
  adjacency_.assign(nodes_.size(), {});
  for (const Link& link : links_) {
    adjacency_[link.a].push_back(link.b);
    adjacency_[link.b].push_back(link.a);
  }
  for (auto& row : adjacency_) std::sort(row.begin(), row.end());
}

std::optional<std::size_t> Topology::link_index(NodeId x, NodeId y) const {
  auto [a, b] = ordered(x, y);
  auto it = std::lower_bound(links_.begin(), links_.end(), std::pair{a, b},
                             [](const Link& link, const std::pair<NodeId, NodeId>& key) {
                               return std::tie(link.a, link.b) < std::tie(key.first, key.second);
                             });
  if (it == links_.end() || it->a != a || it->b != b) return std::nullopt;
  return static_cast<std::size_t>(it - links_.begin());
}

bool Topology::has_link(NodeId x, NodeId y) const { return link_index(x, y).has_value(); }

double Topology::bandwidth(NodeId x, NodeId y) const {
  auto idx = link_index(x, y);
  if (!idx) throw Error(ErrorCode::LinkAbsent, "no link " + std::to_string(x) + "-" + std::to_string(y));
  return links_[*idx].bandwidth_gbps;
}

bool Topology::is_connected() const {
  if (nodes_.empty()) return true;
  auto dist = bfs_distances(*this, 0);
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d == kUnreachable; });
}

std::vector<NodeId> Topology::nodes_with_role(Role role) const {
  std::vector<NodeId> out;
  for (const Node& n : nodes_) {
    if (n.role == role) out.push_back(n.id);
  }
  return out;
}

Topology Topology::with_link(NodeId x, NodeId y, double bandwidth_gbps) const {
  std::vector<Link> links = links_;
  auto [a, b] = ordered(x, y);
  links.push_back(Link{a, b, bandwidth_gbps});
  return Topology(nodes_, std::move(links));
}

Topology Topology::without_link(NodeId x, NodeId y) const {
  auto idx = link_index(x, y);
  if (!idx) throw Error(ErrorCode::LinkAbsent, "no link " + std::to_string(x) + "-" + std::to_string(y));
  std::vector<Link> links = links_;
  links.erase(links.begin() + static_cast<std::ptrdiff_t>(*idx));
  return Topology(nodes_, std::move(links));
}

ValidationReport validate(const Topology& topology, ValidationMode mode) {
  ValidationReport report;
  report.connected = topology.is_connected();
  for (const Node& n : topology.nodes()) {
    if (topology.degree(n.id) > n.port_cap) {
      report.port_cap_violations.push_back({n.id, topology.degree(n.id), n.port_cap});
    }
  }
  if (mode == ValidationMode::relay_strict && report.connected) {
    // v lies on some shortest m-c route iff d(m,v) + d(v,c) == d(m,c).
    const auto dist = all_pairs_distances(topology);
    for (NodeId m : topology.memory_nodes()) {
      for (NodeId c : topology.compute_nodes()) {
        for (const Node& v : topology.nodes()) {
          if (v.id == m || v.id == c || chiplet_spec(v.kind).relay_capable) continue;
          if (dist[m][v.id] + dist[v.id][c] == dist[m][c]) {
            report.relay_violations.push_back({m, c, v.id});
            break;
          }
        }
      }
    }
  }
  return report;
}

bool can_add_link(const Topology& topology, NodeId a, NodeId b) {
  if (a == b || a >= topology.node_count() || b >= topology.node_count()) return false;
  if (topology.has_link(a, b)) return false;
  return topology.degree(a) < topology.node(a).port_cap &&
         topology.degree(b) < topology.node(b).port_cap;
}

bool can_remove_link(const Topology& topology, NodeId a, NodeId b) {
  if (!topology.has_link(a, b)) return false;
  return topology.without_link(a, b).is_connected();
}

Topology apply_edit(const Topology& topology, const Edit& edit, double bandwidth_gbps) {
  const NodeId a = edit.a;
  const NodeId b = edit.b;
  if (a >= topology.node_count() || b >= topology.node_count() || a == b) {
    throw Error(ErrorCode::UnknownNode, "bad edit endpoints");
  }
  const std::string pair = std::to_string(a) + "-" + std::to_string(b);
  if (edit.kind == EditKind::add) {
    if (topology.has_link(a, b)) throw Error(ErrorCode::DuplicateLink, pair);
    if (topology.degree(a) >= topology.node(a).port_cap ||
        topology.degree(b) >= topology.node(b).port_cap) {
      throw Error(ErrorCode::PortCapExceeded, pair);
    }
    return topology.with_link(a, b, bandwidth_gbps);
  }
  if (!topology.has_link(a, b)) throw Error(ErrorCode::LinkAbsent, pair);
  Topology next = topology.without_link(a, b);
  if (!next.is_connected()) throw Error(ErrorCode::WouldDisconnect, pair);
  return next;
}

}  // namespace noi
