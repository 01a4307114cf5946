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

#include "noi/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include "noi/error.hpp"

namespace noi {

namespace {

/// Neumaier-compensated sum of link bandwidths.
double bandwidth_sum(const std::vector<Link>& links) {
  double sum = 0.0, carry = 0.0;
  for (const Link& l : links) {
    const double t = sum + l.bandwidth_gbps;
    carry += std::abs(sum) >= std::abs(l.bandwidth_gbps) ? (sum - t) + l.bandwidth_gbps : (l.bandwidth_gbps - t) + sum;
    sum = t;
  }
  return sum + carry;
}

}  // namespace

std::vector<int> bfs_distances(const Topology& topology, NodeId source) {
  std::vector<int> dist(topology.node_count(), kUnreachable);
  std::deque<NodeId> queue{source};
  dist.at(source) = 0;
  while (!queue.empty()) {
    NodeId u = queue.front();
    queue.pop_front();
    for (NodeId v : topology.neighbors(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

std::vector<std::vector<int>> all_pairs_distances(const Topology& topology) {
  std::vector<std::vector<int>> out;
  out.reserve(topology.node_count());
  for (NodeId s = 0; s < topology.node_count(); ++s) out.push_back(bfs_distances(topology, s));
  return out;
}

std::vector<NodePair> bridges(const Topology& topology) {
  const std::size_t n = topology.node_count();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<NodePair> out;
  int timer = 0;
  // Simple graph, so skipping the parent by id is sufficient.
  std::function<void(NodeId, NodeId)> dfs = [&](NodeId u, NodeId parent) {
    disc[u] = low[u] = timer++;
    for (NodeId v : topology.neighbors(u)) {
      if (v == parent) continue;
      if (disc[v] == -1) {
        dfs(v, u);
        low[u] = std::min(low[u], low[v]);
        if (low[v] > disc[u]) out.push_back(ordered(u, v));
      } else {
        low[u] = std::min(low[u], disc[v]);
      }
    }
  };
  for (NodeId s = 0; s < n; ++s) {
    if (disc[s] == -1) dfs(s, static_cast<NodeId>(n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t path_multiplicity(const Topology& topology, NodeId src, NodeId dst) {
  if (src == dst) throw Error(ErrorCode::InvalidArgument, "path_multiplicity needs src != dst");
  const auto dist = bfs_distances(topology, src);
  if (dist.at(dst) == kUnreachable) throw Error(ErrorCode::Unreachable, "dst unreachable");
  std::vector<NodeId> order(topology.node_count());
  for (NodeId i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](NodeId x, NodeId y) { return dist[x] < dist[y]; });
  std::vector<std::uint64_t> count(topology.node_count(), 0);
  count[src] = 1;
  for (NodeId u : order) {
    if (dist[u] == kUnreachable || dist[u] >= dist[dst]) continue;
    for (NodeId v : topology.neighbors(u)) {
      if (dist[v] == dist[u] + 1) count[v] += count[u];
    }
  }
  return count[dst];
}

namespace {

class Dinic {
 public:
  explicit Dinic(std::size_t n) : graph_(n), level_(n), next_(n) {}

  void add_edge(std::size_t u, std::size_t v, double cap_uv, double cap_vu) {
    graph_[u].push_back({v, graph_[v].size(), cap_uv});
    graph_[v].push_back({u, graph_[u].size() - 1, cap_vu});
  }

  double run(std::size_t s, std::size_t t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        double pushed = dfs(s, t, kInf);
        if (pushed <= kEps) break;
        flow += pushed;
      }
    }
    return flow;
  }

  std::vector<bool> reachable(std::size_t s) const {
    std::vector<bool> seen(graph_.size(), false);
    std::deque<std::size_t> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (const Arc& arc : graph_[u]) {
        if (arc.cap > kEps && !seen[arc.to]) {
          seen[arc.to] = true;
          queue.push_back(arc.to);
        }
      }
    }
    return seen;
  }

  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr double kEps = 1e-9;

 private:
  struct Arc {
    std::size_t to;
    std::size_t rev;
    double cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<std::size_t> queue{s};
    level_[s] = 0;
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop_front();
      for (const Arc& arc : graph_[u]) {
        if (arc.cap > kEps && level_[arc.to] < 0) {
          level_[arc.to] = level_[u] + 1;
          queue.push_back(arc.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t u, std::size_t t, double limit) {
    if (u == t) return limit;
    for (std::size_t& i = next_[u]; i < graph_[u].size(); ++i) {
      Arc& arc = graph_[u][i];
      if (arc.cap <= kEps || level_[arc.to] != level_[u] + 1) continue;
      double pushed = dfs(arc.to, t, std::min(limit, arc.cap));
      if (pushed > kEps) {
        arc.cap -= pushed;
        graph_[arc.to][arc.rev].cap += pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<Arc>> graph_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace

MaxFlowResult max_flow(const Topology& topology, const std::vector<NodeId>& sources,
                       const std::vector<NodeId>& sinks) {
  const std::size_t n = topology.node_count();
  const std::size_t s = n;
  const std::size_t t = n + 1;
  Dinic dinic(n + 2);
  for (const Link& link : topology.links()) {
    dinic.add_edge(link.a, link.b, link.bandwidth_gbps, link.bandwidth_gbps);
  }
  for (NodeId v : sources) dinic.add_edge(s, v, Dinic::kInf, 0.0);
  for (NodeId v : sinks) dinic.add_edge(v, t, Dinic::kInf, 0.0);

  MaxFlowResult result;
  result.value = dinic.run(s, t);
  auto seen = dinic.reachable(s);
  result.source_side.assign(seen.begin(), seen.begin() + static_cast<std::ptrdiff_t>(n));
  for (const Link& link : topology.links()) {
    if (result.source_side[link.a] != result.source_side[link.b]) result.min_cut.push_back(link);
  }
  return result;
}

CutReport memory_cut_capacity(const Topology& topology, const std::vector<NodeId>& memory_set,
                              CutMode mode) {
  if (memory_set.empty()) throw Error(ErrorCode::EmptyMemorySet, "memory set is empty");
  std::vector<bool> in_set(topology.node_count(), false);
  for (NodeId m : memory_set) in_set.at(m) = true;

  CutReport report;
  if (mode == CutMode::structural) {
    if (std::all_of(in_set.begin(), in_set.end(), [](bool b) { return b; })) {
      throw Error(ErrorCode::NoComputeNodes, "memory set covers every node");
    }
    for (const Link& link : topology.links()) {
      if (in_set[link.a] != in_set[link.b]) report.cut_edges.push_back(link);
    }
    report.capacity_gbps = bandwidth_sum(report.cut_edges);
    return report;
  }

  std::vector<NodeId> sinks;
  for (NodeId c : topology.compute_nodes()) {
    if (!in_set[c]) sinks.push_back(c);
  }
  if (sinks.empty()) throw Error(ErrorCode::NoComputeNodes, "no compute nodes outside memory set");
  MaxFlowResult flow = max_flow(topology, memory_set, sinks);
  report.cut_edges = std::move(flow.min_cut);
  report.capacity_gbps = bandwidth_sum(report.cut_edges);
  report.is_min_cut = true;
  return report;
}

CutReport memory_cut_capacity(const Topology& topology, CutMode mode) {
  return memory_cut_capacity(topology, topology.memory_nodes(), mode);
}

}  // namespace noi
