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

#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "noi/topology.hpp"

namespace noi {

enum class RoutingPolicy { deterministic_sp, ecmp_split };
std::string_view to_string(RoutingPolicy policy);
RoutingPolicy parse_routing_policy(std::string_view text);

using DirectedEdge = std::pair<NodeId, NodeId>;

/// All-pairs hop distances and shortest-path counts of one topology, with
/// lexicographic unranking of minimal paths.
class RouteTable {
 public:
  explicit RouteTable(const Topology& topology);

  std::size_t node_count() const { return n_; }
  int distance(NodeId u, NodeId v) const { return dist_[u * n_ + v]; }
  std::uint64_t path_count(NodeId u, NodeId v) const { return count_[u * n_ + v]; }

  /// The `rank`-th minimal path from src to dst in lexicographic order of
  /// node ids (rank 0 is the lexicographically least one).
  std::vector<NodeId> path(NodeId src, NodeId dst, std::uint64_t rank = 0) const;

  /// deterministic_sp: rank 0. ecmp_split: rank chosen by a seeded hash of
  /// `flow_id`, uniform over the minimal paths.
  std::vector<NodeId> route(NodeId src, NodeId dst, RoutingPolicy policy, std::uint64_t flow_id,
                            std::uint64_t seed = 0) const;

  /// Rank of the minimal path ecmp_split assigns to `flow_id`.
  std::uint64_t ecmp_rank(NodeId src, NodeId dst, std::uint64_t flow_id, std::uint64_t seed = 0) const;
  /// Union of the lexicographically least paths to every destination, as
  /// parent-to-child edges in order of first appearance.
  std::vector<DirectedEdge> multicast_tree(NodeId src, const std::vector<NodeId>& dsts) const;

  /// Fraction of minimal src->dst paths that traverse u->v.
  double edge_fraction(NodeId src, NodeId dst, NodeId u, NodeId v) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::vector<NodeId>> adj_;
  std::vector<int> dist_;
  std::vector<std::uint64_t> count_;
};

/// Directed link ids: link i carries a->b as 2i and b->a as 2i+1.
std::size_t directed_link(const Topology& topology, NodeId from, NodeId to);

std::vector<NodeId> compute_route(const Topology& topology, NodeId src, NodeId dst, RoutingPolicy policy,
                                  std::uint64_t flow_id = 0, std::uint64_t seed = 0);

}  // namespace noi
