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

#include <optional>
#include <vector>

#include "noi/routing.hpp"
#include "noi/topology.hpp"
#include "noi/traffic.hpp"

namespace noi {

/// Kingman's GI/GI/1 mean wait: rho/(1-rho) * (ca2+cs2)/2 * 1/mu.
/// Throws UnstableQueue when rho >= 1.
double kingman_wait(double rho, double ca2, double cs2, double mu);

/// Tokens/s that a cut of `cap_gbps` can feed when every token needs
/// `q_bytes` of memory-sourced data.
double cut_roofline(double cap_gbps, double q_bytes);

/// Utilization drop lambda * (1/mu_before - 1/mu_after) from a faster server.
double utilization_relief(double lambda, double mu_before, double mu_after);

/// Per-queue wait when a load of rho_total is split evenly over k queues.
double split_queue_wait(double rho_total, int k, double ca2, double cs2, double mu);

struct ProxyOptions {
  RoutingPolicy routing = RoutingPolicy::ecmp_split;
  double router_delay_ns = 2.0;
  double packet_bytes = 4096.0;
  double arrival_scv = 1.37;
  double service_scv = 0.5;
  /// Fixed step rate; calibrated against the topology's cut when empty.
  std::optional<double> lambda_high;
  /// Latency sentinel as a multiple of the unloaded diameter latency.
  double saturation_factor = 100.0;
};

struct ExpertProxy {
  NodeId home = 0;
  double offered_tokens_per_s = 0.0;
  double solo_tokens_per_s = 0.0;
  double concurrent_tokens_per_s = 0.0;
  double solo_peak_utilization = 0.0;
  double concurrent_peak_utilization = 0.0;
};

struct ProxyMetrics {
  double throughput_proxy = 0.0;  // tokens/s
  double latency_proxy = 0.0;     // ns
  double power_proxy = 0.0;       // normalized watts
  double interference_proxy = 1.0;
  double cut_gbps = 0.0;
  double bytes_per_token = 0.0;
  double roofline_tokens_per_s = 0.0;
  double offered_tokens_per_s = 0.0;
  double lambda_high = 0.0;
  double max_utilization = 0.0;
  bool saturated = false;
  /// Per directed link (see directed_link()).
  std::vector<double> link_utilization;
  std::vector<ExpertProxy> experts;
};

/// Expected per-directed-link byte rate (bytes/ns) offered by each expert.
std::vector<std::vector<double>> expert_link_loads(const Topology& topology, const WorkloadSpec& workload,
                                                   double lambda_high, RoutingPolicy routing);

ProxyMetrics analytic_proxy_eval(const Topology& topology, const WorkloadSpec& workload,
                                 const ProxyOptions& options = {});

}  // namespace noi
