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

#include <array>
#include <cstdint>
#include <vector>

#include "noi/routing.hpp"
#include "noi/topology.hpp"
#include "noi/traffic.hpp"

namespace noi {

struct SimConfig {
  double packet_bytes = 4096.0;
  double router_delay_ns = 2.0;
  double warmup_ns = 100000.0;
  double measure_ns = 1000000.0;
  RoutingPolicy routing = RoutingPolicy::ecmp_split;
  std::uint64_t seed = 1;
  /// Memory egress stage: per-memory-node FIFO server with lognormal service
  /// of mean packet/hbm_gbps and the given SCV. 0 disables the stage.
  double hbm_gbps = 1325.0;
  double hbm_service_scv = 0.5;
  double util_window_ns = 10000.0;
  /// Keep running after the window until every injected packet is delivered.
  bool drain = false;
  double clock_ghz = 2.0;
  bool record_flows = false;

  void check() const;
};

struct LatencySummary {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

struct FlowRecord {
  std::uint64_t uid = 0;
  std::uint64_t injected_bytes = 0;   // bytes x destinations
  std::uint64_t delivered_bytes = 0;
  double completion_ns = -1.0;
};

struct SimReport {
  double window_start_ns = 0.0;
  double window_end_ns = 0.0;
  double end_time_ns = 0.0;
  double clock_ghz = 2.0;
  /// Activation flows fully delivered inside the window, per expert.
  std::vector<std::uint64_t> expert_tokens;
  std::vector<double> expert_tokens_per_s;
  /// End-to-end packet latency per destination, indexed by FlowClass.
  std::array<std::vector<double>, 3> latency_ns;
  LatencySummary latency;
  /// Per directed link: busy fraction per util window, and wait before
  /// service of every packet that started service in the window.
  std::vector<std::vector<double>> utilization;
  std::vector<std::vector<double>> queue_delay_ns;
  std::vector<double> link_utilization;  // over the whole window
  /// Bytes delivered across the memory cut (memory -> compute direction).
  double cut_goodput_gbps = 0.0;
  std::uint64_t injected_bytes = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t packets_injected = 0;
  std::uint64_t events = 0;
  std::vector<FlowRecord> flows;

  std::uint64_t in_flight_bytes() const { return injected_bytes - delivered_bytes; }
  double total_tokens_per_s() const;
};

/// Nearest-rank percentile: the ceil(q n)-th smallest sample. Throws
/// EmptySamples or InvalidArgument for q outside (0, 1].
double percentile(std::vector<double> samples, double q);
LatencySummary summarize(const std::vector<double>& samples);

/// Packet-level, store-and-forward simulation with one FIFO per directed
/// link. Events are ordered by (time, sequence number). Throws UnknownNode or
/// NonMonotoneTrace.
SimReport simulate(const Topology& topology, const TrafficTrace& trace, const SimConfig& config);

}  // namespace noi
