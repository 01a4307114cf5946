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

#include "noi/simulator.hpp"
#include "noi/topology.hpp"
#include "noi/traffic.hpp"

namespace noi {

inline constexpr double kDefaultSlaThreshold = 1.2;

struct InterferenceOptions {
  SimConfig sim;
  TraceOptions trace;
  double sla_threshold = kDefaultSlaThreshold;
  int jobs = 1;
};

struct InterferenceReport {
  std::vector<double> solo_tokens_per_s;
  std::vector<double> concurrent_tokens_per_s;
  /// T_solo / T_con; NaN where the expert had no traffic in either run and
  /// +inf where it was starved in the concurrent run.
  std::vector<double> slowdown;
  double interference_score = 1.0;
  std::vector<int> starved;
  double sla_threshold = kDefaultSlaThreshold;
  std::vector<int> violations;
  /// Summary of the concurrent run.
  double cut_goodput_gbps = 0.0;
  LatencySummary latency;
};

/// Assembles slowdowns, the score and SLA violations from measured throughputs.
InterferenceReport make_interference_report(const std::vector<double>& solo,
                                            const std::vector<double>& concurrent,
                                            double sla_threshold = kDefaultSlaThreshold);

/// Experts whose slowdown strictly exceeds `threshold` (> 1).
std::vector<int> sla_violations(const InterferenceReport& report, double threshold);

/// K solo runs plus one concurrent run on the same trace.
InterferenceReport evaluate_interference(const Topology& topology, const TrafficTrace& trace,
                                         const InterferenceOptions& options = {});
/// Generates the trace (duration warmup + measure) from `seed` first.
InterferenceReport evaluate_interference(const Topology& topology, const WorkloadSpec& workload,
                                         std::uint64_t seed, const InterferenceOptions& options = {});

/// Entry (j, k) = T_solo(k) / T(k | running with j only); diagonal 1.
std::vector<std::vector<double>> slowdown_matrix(const Topology& topology, const TrafficTrace& trace,
                                                 const InterferenceOptions& options = {});
std::vector<std::vector<double>> slowdown_matrix(const Topology& topology, const WorkloadSpec& workload,
                                                 std::uint64_t seed, const InterferenceOptions& options = {});

}  // namespace noi
