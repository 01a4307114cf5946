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
#include <optional>
#include <string_view>
#include <vector>

#include "noi/topology.hpp"

namespace noi {

enum class FlowClass { weight, activation, control };
std::string_view to_string(FlowClass cls);
std::optional<FlowClass> parse_flow_class(std::string_view text);

enum class PlacementPolicy { striped, local };
std::string_view to_string(PlacementPolicy policy);
PlacementPolicy parse_placement_policy(std::string_view text);

/// Two-state Markov-modulated Poisson process. The chain is observed on a
/// fixed slot grid of `slot_scale / lambda_high` ns; within a slot arrivals
/// are Poisson at the current state's rate.
struct MmppParams {
  double low_ratio = 1.0 / 6.0;  // lambda_L / lambda_H
  double p_high_to_low = 0.15;
  double p_low_to_high = 0.35;
  double slot_scale = 0.8;
  /// Initial state; stationary draw when empty.
  std::optional<bool> start_high;

  double stationary_high() const;
  /// Long-run arrival rate as a multiple of lambda_H.
  double mean_rate_factor() const;
};

struct WorkloadSpec {
  int layers = 32;
  int d_model = 4096;
  int num_experts = 8;
  int top_k = 2;
  int context = 4096;
  int bytes_per_weight = 2;
  /// Experts that are mapped onto the canvas and emit traffic (ids 0..K-1).
  int active_experts = 4;
  /// Expert -> compute nodes. Empty means "derive from placement_policy".
  std::vector<std::vector<NodeId>> placement;
  PlacementPolicy placement_policy = PlacementPolicy::striped;
  /// Expert -> memory node holding its weights. Empty means expert_home().
  std::vector<NodeId> homes;
  /// HBM-sourced bytes per token for the cut roofline.
  double q_hbm_bytes = 1e6;

  int batch_tokens = 8;
  double dirichlet_alpha = 1.0;
  int phase_steps = 64;
  /// Logit correlation on competing pairs (0,1), (2,3), ...
  double rho_pair = -0.18;
  int tokens_per_weight_chunk = 8;
  std::uint64_t chunk_bytes = 262144;
  std::uint64_t control_bytes = 256;
  double activation_mu = 10.6;
  double activation_sigma = 0.45;
  std::uint64_t activation_min_bytes = 8192;
  std::uint64_t activation_max_bytes = 1048576;
  std::array<double, 4> multicast_probs = {0.55, 0.25, 0.15, 0.05};  // degrees 1, 2, 4, 8

  MmppParams mmpp;
  /// Offered load on the memory cut as a fraction of its capacity.
  double rho_target = 0.7;
  /// Capacity used for calibration; 0 means the topology's structural cut.
  double calibration_cut_gbps = 0.0;

  std::uint64_t w_ffn_bytes() const;
  std::uint64_t weight_chunk_count() const;
  void check() const;
};

inline constexpr std::array<int, 4> kMulticastDegrees = {1, 2, 4, 8};

/// Largest allowed degree not above `drawn` that fits in a pool of `pool` nodes.
int cap_multicast_degree(int drawn, std::size_t pool);

struct FlowEvent {
  double timestamp_ns = 0.0;
  NodeId source = 0;
  std::vector<NodeId> destinations;
  std::uint64_t bytes = 0;
  FlowClass cls = FlowClass::activation;
  int expert = 0;
  /// Position of the flow within its expert's stream; (expert, ordinal)
  /// identifies a flow across solo and concurrent traces.
  std::uint64_t ordinal = 0;

  std::uint64_t uid() const { return (static_cast<std::uint64_t>(expert) << 40) | ordinal; }
  friend bool operator==(const FlowEvent&, const FlowEvent&) = default;
};

struct TrafficTrace {
  std::vector<FlowEvent> events;
  double duration_ns = 0.0;
  int experts = 0;
  friend bool operator==(const TrafficTrace&, const TrafficTrace&) = default;
};

struct ExpertPhase {
  std::vector<double> p;
};

/// Dirichlet(alpha * 1) expert popularity vector.
ExpertPhase sample_expert_phase(int num_experts, double alpha, std::uint64_t seed);

struct RoutingDraw {
  /// Selected experts per token, ascending.
  std::vector<std::vector<int>> selections;
  std::vector<int> loads;
};

/// Top-k gating over Gumbel-perturbed phase log-probabilities whose
/// perturbations are coupled through a Gaussian copula on competing pairs.
RoutingDraw route_tokens(const ExpertPhase& phase, int batch_tokens, int top_k, double rho_pair,
                         std::uint64_t seed);

/// Cumulative arrival times (ns) of the first `n_gaps` MMPP arrivals.
std::vector<double> arrival_process(double lambda_high, std::size_t n_gaps, std::uint64_t seed,
                                    const MmppParams& params = {});

/// Lognormal(mu, sigma) truncated to [lo, hi] by rejection.
double truncated_lognormal_mean(double mu, double sigma, double lo, double hi);

/// Per-expert compute nodes for the first `active_experts` experts.
std::vector<std::vector<NodeId>> resolve_placement(const WorkloadSpec& workload,
                                                   const Topology& topology);
/// Memory node minimizing total hop distance to the placement (lowest id on ties).
NodeId expert_home(const Topology& topology, const std::vector<NodeId>& nodes);
/// Home memory node per placed expert: WorkloadSpec::homes when given,
/// expert_home() otherwise. Throws UnplacedExpert or UnknownNode.
std::vector<NodeId> resolve_homes(const WorkloadSpec& workload, const Topology& topology,
                                  const std::vector<std::vector<NodeId>>& placement);
/// Placement plus compute neighbours of placement nodes, ascending.
std::vector<NodeId> multicast_pool(const Topology& topology, const std::vector<NodeId>& nodes);

/// Topology-independent gating statistics of one expert, estimated by a
/// fixed-seed pilot run (experts are exchangeable).
struct WorkloadProfile {
  double mean_tokens = 0.0;      // E[N_e] per step
  double active_prob = 0.0;      // P(N_e > 0)
  double mean_chunks = 0.0;      // E[ceil(N_e / tokens_per_weight_chunk)]
  double mean_activation_bytes = 0.0;
  std::array<double, 4> degree_probs{};

  /// Expected bytes injected per step by one expert.
  double bytes_per_step(const WorkloadSpec& workload) const;
};
WorkloadProfile profile_workload(const WorkloadSpec& workload);

/// lambda_H (steps per ns per expert) placing rho_target * cap on the cut.
double calibrate_lambda_high(const WorkloadSpec& workload, const WorkloadProfile& profile,
                             double cut_gbps);

/// Cut capacity used for calibration on `topology`.
double calibration_cut(const WorkloadSpec& workload, const Topology& topology);

struct TraceOptions {
  /// Step rate override (per ns); calibrated when empty.
  std::optional<double> lambda_high;
};

/// MoE trace over [0, duration_ns): every active expert runs an independent
/// MMPP of decode steps, all experts share one gating stream, and each expert
/// owns its size/destination substream so that single-expert traces are exact
/// subsets of the concurrent one.
TrafficTrace generate_trace(const WorkloadSpec& workload, const Topology& topology,
                            double duration_ns, std::uint64_t seed, const TraceOptions& options = {});

/// Fixed-size flows from each expert's home at a constant aggregate rate.
TrafficTrace constant_rate_trace(const WorkloadSpec& workload, const Topology& topology,
                                 double duration_ns, double bytes_per_ns,
                                 std::uint64_t flow_bytes = 4096);

/// Events of the listed experts only, order preserved.
TrafficTrace filter_experts(const TrafficTrace& trace, const std::vector<int>& experts);

struct TraceStats {
  double arrival_scv = 0.0;          // C_a^2 of gaps between distinct timestamps
  double mean_injection_gbps = 0.0;  // bytes per ns over the duration
  std::array<double, 3> class_byte_share{};  // weight, activation, control
  double ingress_cv = 0.0;
  double window_ns = 0.0;
  std::vector<double> ingress_bytes;  // per window, at memory nodes
};

TraceStats trace_stats(const TrafficTrace& trace, const Topology& topology,
                       double window_ns = 1000.0);

}  // namespace noi
