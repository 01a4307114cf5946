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
#include <vector>

#include "noi/topology.hpp"

namespace noi {

inline constexpr int kUnreachable = -1;

/// Hop distances from `source`; unreachable nodes get kUnreachable.
std::vector<int> bfs_distances(const Topology& topology, NodeId source);

/// Row-major N x N hop-distance matrix.
std::vector<std::vector<int>> all_pairs_distances(const Topology& topology);

/// Links whose removal disconnects the graph (Tarjan low-link).
std::vector<NodePair> bridges(const Topology& topology);

/// Number of distinct minimal-length paths between src and dst, counted on
/// the layered shortest-path DAG.
std::uint64_t path_multiplicity(const Topology& topology, NodeId src, NodeId dst);

// ---------------------------------------------------------------------------
// Cuts

enum class CutMode { structural, maxflow };

struct CutReport {
  std::vector<Link> cut_edges;
  double capacity_gbps = 0.0;
  bool is_min_cut = false;
};

/// Cap(C_M) in structural mode (sum over links leaving `memory_set`), or the
/// min cut between a super-source over `memory_set` and a super-sink over all
/// compute nodes in maxflow mode. Throws EmptyMemorySet / NoComputeNodes.
CutReport memory_cut_capacity(const Topology& topology, const std::vector<NodeId>& memory_set,
                              CutMode mode);

/// Convenience overload using the topology's memory-role nodes.
CutReport memory_cut_capacity(const Topology& topology, CutMode mode = CutMode::structural);

/// Dinic max-flow on the undirected topology from a set of sources to a set
/// of sinks (each attached with unbounded capacity). Returns the flow value
/// and the links crossing the resulting source-side min cut.
struct MaxFlowResult {
  double value = 0.0;
  std::vector<Link> min_cut;
  std::vector<bool> source_side;
};

MaxFlowResult max_flow(const Topology& topology, const std::vector<NodeId>& sources,
                       const std::vector<NodeId>& sinks);

}  // namespace noi
