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

#include <algorithm>
#include <cmath>

#include "noi/error.hpp"
#include "noi/graph.hpp"
#include "noi/queueing.hpp"

namespace noi {

namespace {

class LoadAccumulator {
 public:
  LoadAccumulator(const Topology& topology, const RouteTable& routes, RoutingPolicy routing,
                  std::vector<double>& loads)
      : t_(topology), routes_(routes), routing_(routing), loads_(loads) {}

  void unicast(NodeId src, NodeId dst, double rate) {
    if (src == dst || rate == 0.0) return;
    if (routing_ == RoutingPolicy::deterministic_sp) {
      const auto p = routes_.path(src, dst, 0);
      for (std::size_t i = 1; i < p.size(); ++i) loads_[directed_link(t_, p[i - 1], p[i])] += rate;
      return;
    }
    const auto& links = t_.links();
    for (std::size_t i = 0; i < links.size(); ++i) {
      const Link& l = links[i];
      loads_[2 * i] += rate * routes_.edge_fraction(src, dst, l.a, l.b);
      loads_[2 * i + 1] += rate * routes_.edge_fraction(src, dst, l.b, l.a);
    }
  }

  /// Expected load of a multicast to `degree` destinations drawn uniformly
  /// without replacement from `pool`, delivered over the deterministic tree.
  void multicast(NodeId src, const std::vector<NodeId>& pool, int degree, double rate) {
    if (rate == 0.0) return;
    const std::size_t m = pool.size();
    if (degree == 1) {
      for (NodeId p : pool) unicast(src, p, rate / static_cast<double>(m));
      return;
    }
    std::vector<std::size_t> below(2 * t_.link_count(), 0);
    for (NodeId p : pool) {
      const auto path = routes_.path(src, p, 0);
      for (std::size_t i = 1; i < path.size(); ++i) ++below[directed_link(t_, path[i - 1], path[i])];
    }
    for (std::size_t e = 0; e < below.size(); ++e) {
      if (below[e] == 0) continue;
      double none = 1.0;
      for (int i = 0; i < degree; ++i) {
        const double num = static_cast<double>(m - below[e]) - i;
        none *= num > 0.0 ? num / (static_cast<double>(m) - i) : 0.0;
      }
      loads_[e] += rate * (1.0 - none);
    }
  }

 private:
  const Topology& t_;
  const RouteTable& routes_;
  RoutingPolicy routing_;
  std::vector<double>& loads_;
};

}  // namespace

std::vector<std::vector<double>> expert_link_loads(const Topology& topology, const WorkloadSpec& workload,
                                                   double lambda_high, RoutingPolicy routing) {
  const auto placement = resolve_placement(workload, topology);
  const auto homes = resolve_homes(workload, topology, placement);
  const WorkloadProfile profile = profile_workload(workload);
  const RouteTable routes(topology);
  const double step_rate = workload.mmpp.mean_rate_factor() * lambda_high;
  std::vector<std::vector<double>> out(placement.size(), std::vector<double>(2 * topology.link_count(), 0.0));
  for (std::size_t k = 0; k < placement.size(); ++k) {
    const auto& nodes = placement[k];
    const NodeId home = homes[k];
    const auto pool = multicast_pool(topology, nodes);
    LoadAccumulator acc(topology, routes, routing, out[k]);
    acc.unicast(home, nodes.front(),
                step_rate * profile.active_prob * static_cast<double>(workload.control_bytes));
    const double weight = step_rate * profile.mean_chunks * static_cast<double>(workload.chunk_bytes);
    for (NodeId n : nodes) acc.unicast(home, n, weight / static_cast<double>(nodes.size()));
    const double act = step_rate * profile.mean_tokens * profile.mean_activation_bytes;
    double total_prob = 0.0;
    for (double p : workload.multicast_probs) total_prob += p;
    std::vector<double> by_degree(9, 0.0);
    for (std::size_t i = 0; i < kMulticastDegrees.size(); ++i) {
      by_degree[static_cast<std::size_t>(cap_multicast_degree(kMulticastDegrees[i], pool.size()))] +=
          workload.multicast_probs[i] / total_prob;
    }
    for (int d : kMulticastDegrees) acc.multicast(home, pool, d, act * by_degree[static_cast<std::size_t>(d)]);
  }
  return out;
}

ProxyMetrics analytic_proxy_eval(const Topology& topology, const WorkloadSpec& workload,
                                 const ProxyOptions& options) {
  const WorkloadProfile profile = profile_workload(workload);
  ProxyMetrics m;
  m.cut_gbps = memory_cut_capacity(topology, CutMode::structural).capacity_gbps;
  m.lambda_high = options.lambda_high
                      ? *options.lambda_high
                      : calibrate_lambda_high(workload, profile, calibration_cut(workload, topology));
  const auto loads = expert_link_loads(topology, workload, m.lambda_high, options.routing);
  const auto placement = resolve_placement(workload, topology);
  const auto homes = resolve_homes(workload, topology, placement);
  const std::size_t links = 2 * topology.link_count();
  auto bandwidth = [&](std::size_t e) { return topology.links()[e / 2].bandwidth_gbps; };

  m.link_utilization.assign(links, 0.0);
  for (const auto& per : loads) {
    for (std::size_t e = 0; e < links; ++e) m.link_utilization[e] += per[e] / bandwidth(e);
  }
  const double step_rate = workload.mmpp.mean_rate_factor() * m.lambda_high;
  const double tokens_per_ns = step_rate * profile.mean_tokens;
  const double bytes_per_expert = step_rate * profile.bytes_per_step(workload);
  m.bytes_per_token = profile.bytes_per_step(workload) / profile.mean_tokens;

  double concurrent_sum = 0.0;
  for (std::size_t k = 0; k < loads.size(); ++k) {
    ExpertProxy x;
    x.home = homes[k];
    x.offered_tokens_per_s = tokens_per_ns * 1e9;
    for (std::size_t e = 0; e < links; ++e) {
      if (loads[k][e] <= 0.0) continue;
      x.solo_peak_utilization = std::max(x.solo_peak_utilization, loads[k][e] / bandwidth(e));
      x.concurrent_peak_utilization = std::max(x.concurrent_peak_utilization, m.link_utilization[e]);
    }
    x.solo_tokens_per_s = x.offered_tokens_per_s / std::max(1.0, x.solo_peak_utilization);
    x.concurrent_tokens_per_s = x.offered_tokens_per_s / std::max(1.0, x.concurrent_peak_utilization);
    concurrent_sum += x.concurrent_tokens_per_s;
    m.offered_tokens_per_s += x.offered_tokens_per_s;
    m.interference_proxy =
        std::max(m.interference_proxy, x.solo_tokens_per_s / x.concurrent_tokens_per_s);
    m.experts.push_back(x);
  }
  m.roofline_tokens_per_s = cut_roofline(m.cut_gbps, m.bytes_per_token);
  m.throughput_proxy = std::min(m.roofline_tokens_per_s, concurrent_sum);

  double weighted = 0.0;
  for (std::size_t e = 0; e < links; ++e) {
    const double rho = m.link_utilization[e];
    m.max_utilization = std::max(m.max_utilization, rho);
    if (rho >= 1.0) {
      m.saturated = true;
      continue;
    }
    const double service = options.packet_bytes / bandwidth(e);
    const double hop = service + options.router_delay_ns +
                       kingman_wait(rho, options.arrival_scv, options.service_scv, 1.0 / service);
    weighted += rho * bandwidth(e) * hop;
  }
  const double injected = bytes_per_expert * static_cast<double>(loads.size());
  if (m.saturated) {
    int diameter = 0;
    for (const auto& row : all_pairs_distances(topology)) {
      for (int d : row) diameter = std::max(diameter, d);
    }
    m.latency_proxy = options.saturation_factor * diameter *
                      (options.packet_bytes / kDefaultLinkGbps + options.router_delay_ns);
  } else {
    m.latency_proxy = injected > 0.0 ? weighted / injected : 0.0;
  }

  for (std::size_t i = 0; i < topology.link_count(); ++i) {
    const double util = std::min(1.0, std::max(m.link_utilization[2 * i], m.link_utilization[2 * i + 1]));
    m.power_proxy += (0.5 + 0.5 * util) * (topology.links()[i].bandwidth_gbps / kDefaultLinkGbps);
  }
  for (const Node& n : topology.nodes()) m.power_proxy += 0.1 * topology.degree(n.id);
  return m;
}

}  // namespace noi
