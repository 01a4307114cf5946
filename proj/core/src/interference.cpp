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

#include "noi/interference.hpp"

#include <cmath>
#include <limits>

#include "noi/error.hpp"
#include "noi/parallel.hpp"

namespace noi {

InterferenceReport make_interference_report(const std::vector<double>& solo,
                                            const std::vector<double>& concurrent, double sla_threshold) {
  if (solo.size() != concurrent.size()) {
    throw Error(ErrorCode::InvalidArgument, "solo and concurrent throughput lists differ in length");
  }
  InterferenceReport r;
  r.solo_tokens_per_s = solo;
  r.concurrent_tokens_per_s = concurrent;
  r.sla_threshold = sla_threshold;
  for (std::size_t k = 0; k < solo.size(); ++k) {
    double s = std::numeric_limits<double>::quiet_NaN();
    if (concurrent[k] > 0.0) {
      s = solo[k] / concurrent[k];
    } else if (solo[k] > 0.0) {
      s = std::numeric_limits<double>::infinity();
      r.starved.push_back(static_cast<int>(k));
    }
    r.slowdown.push_back(s);
  }
  bool any = false;
  double worst = 0.0;
  for (double s : r.slowdown) {
    if (std::isnan(s)) continue;
    worst = any ? std::max(worst, s) : s;
    any = true;
  }
  r.interference_score = any ? worst : 1.0;
  r.violations = sla_violations(r, sla_threshold);
  return r;
}

std::vector<int> sla_violations(const InterferenceReport& report, double threshold) {
  if (!(threshold > 1.0)) throw Error(ErrorCode::InvalidArgument, "SLA threshold must be > 1");
  std::vector<int> out;
  for (std::size_t k = 0; k < report.slowdown.size(); ++k) {
    if (report.slowdown[k] > threshold) out.push_back(static_cast<int>(k));
  }
  return out;
}

namespace {

double expert_rate(const SimReport& r, int k) {
  const auto i = static_cast<std::size_t>(k);
  return i < r.expert_tokens_per_s.size() ? r.expert_tokens_per_s[i] : 0.0;
}

TrafficTrace window_trace(const Topology& topology, const WorkloadSpec& workload, std::uint64_t seed,
                          const InterferenceOptions& options) {
  return generate_trace(workload, topology, options.sim.warmup_ns + options.sim.measure_ns, seed,
                        options.trace);
}

}  // namespace

InterferenceReport evaluate_interference(const Topology& topology, const TrafficTrace& trace,
                                         const InterferenceOptions& options) {
  const int k = trace.experts;
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "interference needs at least one expert");
  std::vector<SimReport> runs(static_cast<std::size_t>(k) + 1);
  parallel_for(runs.size(), options.jobs, [&](std::size_t i) {
    if (i == 0) {
      runs[0] = simulate(topology, trace, options.sim);
    } else {
      runs[i] = simulate(topology, filter_experts(trace, {static_cast<int>(i) - 1}), options.sim);
    }
  });
  std::vector<double> solo, con;
  for (int e = 0; e < k; ++e) {
    solo.push_back(expert_rate(runs[static_cast<std::size_t>(e) + 1], e));
    con.push_back(expert_rate(runs[0], e));
  }
  InterferenceReport r = make_interference_report(solo, con, options.sla_threshold);
  r.cut_goodput_gbps = runs[0].cut_goodput_gbps;
  r.latency = runs[0].latency;
  return r;
}

InterferenceReport evaluate_interference(const Topology& topology, const WorkloadSpec& workload,
                                         std::uint64_t seed, const InterferenceOptions& options) {
  return evaluate_interference(topology, window_trace(topology, workload, seed, options), options);
}

std::vector<std::vector<double>> slowdown_matrix(const Topology& topology, const TrafficTrace& trace,
                                                 const InterferenceOptions& options) {
  const auto k = static_cast<std::size_t>(trace.experts);
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "slowdown matrix needs at least two experts");
  std::vector<std::pair<int, int>> cells;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t e = j + 1; e < k; ++e) cells.emplace_back(static_cast<int>(j), static_cast<int>(e));
  }
  std::vector<SimReport> solo(k), pair(cells.size());
  parallel_for(k + cells.size(), options.jobs, [&](std::size_t i) {
    if (i < k) {
      solo[i] = simulate(topology, filter_experts(trace, {static_cast<int>(i)}), options.sim);
    } else {
      const auto [a, b] = cells[i - k];
      pair[i - k] = simulate(topology, filter_experts(trace, {a, b}), options.sim);
    }
  });
  std::vector<std::vector<double>> m(k, std::vector<double>(k, 1.0));
  auto ratio = [](double s, double c) {
    if (s <= 0.0) return 1.0;
    return c > 0.0 ? s / c : std::numeric_limits<double>::infinity();
  };
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [a, b] = cells[c];
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    m[ua][ub] = ratio(expert_rate(solo[ub], b), expert_rate(pair[c], b));
    m[ub][ua] = ratio(expert_rate(solo[ua], a), expert_rate(pair[c], a));
  }
  return m;
}

std::vector<std::vector<double>> slowdown_matrix(const Topology& topology, const WorkloadSpec& workload,
                                                 std::uint64_t seed, const InterferenceOptions& options) {
  return slowdown_matrix(topology, window_trace(topology, workload, seed, options), options);
}

}  // namespace noi
