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

#include "noi/routing.hpp"

#include <algorithm>

#include "noi/error.hpp"
#include "noi/rng.hpp"

namespace noi {

std::string_view to_string(RoutingPolicy policy) {
  return policy == RoutingPolicy::deterministic_sp ? "deterministic_sp" : "ecmp_split";
}

RoutingPolicy parse_routing_policy(std::string_view text) {
  if (text == "deterministic_sp") return RoutingPolicy::deterministic_sp;
  if (text == "ecmp_split") return RoutingPolicy::ecmp_split;
  throw Error(ErrorCode::ConfigError, "unknown routing policy '" + std::string(text) + "'");
}

RouteTable::RouteTable(const Topology& topology) : n_(topology.node_count()) {
  adj_.resize(n_);
  for (NodeId u = 0; u < n_; ++u) {
    auto nb = topology.neighbors(u);
    adj_[u].assign(nb.begin(), nb.end());
  }
  dist_.assign(n_ * n_, -1);
  count_.assign(n_ * n_, 0);
  std::vector<NodeId> queue;
  for (NodeId s = 0; s < n_; ++s) {
    int* d = &dist_[s * n_];
    std::uint64_t* c = &count_[s * n_];
    d[s] = 0;
    c[s] = 1;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (NodeId v : adj_[u]) {
        if (d[v] < 0) {
          d[v] = d[u] + 1;
          queue.push_back(v);
        }
        if (d[v] == d[u] + 1) c[v] += c[u];
      }
    }
  }
}

std::vector<NodeId> RouteTable::path(NodeId src, NodeId dst, std::uint64_t rank) const {
  if (src >= n_ || dst >= n_) throw Error(ErrorCode::UnknownNode, "route endpoint out of range");
  if (distance(src, dst) < 0) throw Error(ErrorCode::Unreachable, "no path between endpoints");
  if (rank >= path_count(src, dst)) throw Error(ErrorCode::InvalidArgument, "path rank out of range");
  std::vector<NodeId> out{src};
  NodeId u = src;
  while (u != dst) {
    const int want = distance(u, dst) - 1;
    for (NodeId v : adj_[u]) {
      if (distance(v, dst) != want) continue;
      const std::uint64_t c = path_count(v, dst);
      if (rank < c) {
        u = v;
        break;
      }
      rank -= c;
    }
    out.push_back(u);
  }
  return out;
}

std::vector<NodeId> RouteTable::route(NodeId src, NodeId dst, RoutingPolicy policy, std::uint64_t flow_id,
                                      std::uint64_t seed) const {
  if (src >= n_ || dst >= n_) throw Error(ErrorCode::UnknownNode, "route endpoint out of range");
  if (distance(src, dst) < 0) throw Error(ErrorCode::Unreachable, "no path between endpoints");
  const std::uint64_t rank = policy == RoutingPolicy::ecmp_split ? ecmp_rank(src, dst, flow_id, seed) : 0;
  return path(src, dst, rank);
}

std::uint64_t RouteTable::ecmp_rank(NodeId src, NodeId dst, std::uint64_t flow_id, std::uint64_t seed) const {
  return splitmix64(seed ^ splitmix64(flow_id)) % path_count(src, dst);
}

std::vector<DirectedEdge> RouteTable::multicast_tree(NodeId src, const std::vector<NodeId>& dsts) const {
  std::vector<DirectedEdge> edges;
  std::vector<char> in_tree(n_, 0);
  in_tree[src] = 1;
  for (NodeId d : dsts) {
    const auto p = path(src, d, 0);
    for (std::size_t i = 1; i < p.size(); ++i) {
      if (in_tree[p[i]]) continue;
      in_tree[p[i]] = 1;
      edges.emplace_back(p[i - 1], p[i]);
    }
  }
  return edges;
}

double RouteTable::edge_fraction(NodeId src, NodeId dst, NodeId u, NodeId v) const {
  const int total = distance(src, dst);
  if (total < 0 || distance(src, u) < 0) return 0.0;
  if (distance(src, u) + 1 + distance(v, dst) != total || distance(u, v) != 1) return 0.0;
  return static_cast<double>(path_count(src, u)) * static_cast<double>(path_count(v, dst)) /
         static_cast<double>(path_count(src, dst));
}

std::size_t directed_link(const Topology& topology, NodeId from, NodeId to) {
  const auto idx = topology.link_index(from, to);
  if (!idx) throw Error(ErrorCode::LinkAbsent, "no link " + std::to_string(from) + "-" + std::to_string(to));
  return 2 * *idx + (from > to ? 1 : 0);
}

std::vector<NodeId> compute_route(const Topology& topology, NodeId src, NodeId dst, RoutingPolicy policy,
                                  std::uint64_t flow_id, std::uint64_t seed) {
  return RouteTable(topology).route(src, dst, policy, flow_id, seed);
}

}  // namespace noi
