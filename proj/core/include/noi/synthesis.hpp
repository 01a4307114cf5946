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
#include <optional>
#include <vector>

#include "noi/baselines.hpp"
#include "noi/interference.hpp"
#include "noi/queueing.hpp"
#include "noi/topology.hpp"
#include "noi/traffic.hpp"

namespace noi {

// ---------------------------------------------------------------------------
// Actions. For N nodes and P = N(N-1)/2 unordered pairs (ascending (i, j)):
// [0, P) add pair, [P, 2P) remove pair, 2P no-op.

std::size_t pair_count(std::size_t nodes);
NodePair pair_at(std::size_t nodes, std::size_t index);
std::size_t pair_index(std::size_t nodes, NodeId a, NodeId b);
std::size_t action_count(std::size_t nodes);
std::size_t noop_action(std::size_t nodes);
/// Edit described by `action`; nullopt for the no-op.
std::optional<Edit> action_edit(std::size_t nodes, std::size_t action);

/// 1 = legal. Adds need an absent link and spare ports at both ends; removes
/// need a present non-bridge link; the no-op is always legal.
std::vector<char> legal_actions(const Topology& topology);

// ---------------------------------------------------------------------------
// Reward

struct RewardWeights {
  double throughput = 0.4;
  double interference = 0.3;
  double latency = 0.2;
  double power = 0.1;
  /// Scaled to sum to 1; throws InvalidArgument on negative or all-zero weights.
  RewardWeights normalized() const;
};

struct RawMetrics {
  double throughput = 0.0;    // tokens/s
  double interference = 1.0;  // worst-case slowdown
  double latency = 0.0;       // ns
  double power = 0.0;
  friend bool operator==(const RawMetrics&, const RawMetrics&) = default;
};

/// All components in [0, 1]; larger is "more" of the metric.
struct NormalizedMetrics {
  double throughput = 0.0;
  double interference = 0.0;
  double latency = 0.0;
  double power = 0.0;
};

/// a1*T - (a2*IS + a3*L + a4*P) with weights normalized first.
double reward_fn(const NormalizedMetrics& metrics, const RewardWeights& weights);

/// (IS - 1) / (cap - 1), clamped to [0, 1].
double normalize_interference(double is, double is_cap);

/// Running min-max over the most recent `window` observations (throughput,
/// latency, power); interference uses the fixed cap mapping. A degenerate
/// range maps to 0.5.
class MetricNormalizer {
 public:
  explicit MetricNormalizer(std::size_t window = 512, double is_cap = 4.0);
  void observe(const RawMetrics& raw);
  NormalizedMetrics normalize(const RawMetrics& raw) const;
  std::size_t size() const { return history_.size(); }

 private:
  std::size_t window_;
  double is_cap_;
  std::vector<RawMetrics> history_;
  std::size_t head_ = 0;
};

// ---------------------------------------------------------------------------
// Environment

struct EnvConfig {
  Topology initial = sparse_backbone();
  WorkloadSpec workload;
  ProxyOptions proxy;
  int episode_length = 32;
  RewardWeights weights;
  double is_cap = 4.0;
  std::size_t normalizer_window = 512;
};

RawMetrics proxy_metrics(const Topology& topology, const EnvConfig& config);

/// Adjacency upper triangle, degree/cap ratios, normalized structural cut,
/// per-memory-node cut link counts (over port cap) and the step fraction.
std::vector<double> featurize(const Topology& topology, int step, int episode_length);
std::size_t feature_size(const Topology& topology);

struct StepResult {
  double reward = 0.0;
  bool done = false;
  RawMetrics raw;
};

class TopologyEnv {
 public:
  explicit TopologyEnv(EnvConfig config);

  /// Back to the initial topology; the normalizer keeps its history.
  void reset();
  /// Throws MaskedActionTaken (state unchanged) for an illegal action.
  StepResult step(std::size_t action);

  const Topology& topology() const { return state_; }
  int step_index() const { return step_; }
  bool done() const { return step_ >= config_.episode_length; }
  std::vector<char> mask() const { return legal_actions(state_); }
  std::vector<double> features() const { return featurize(state_, step_, config_.episode_length); }
  const EnvConfig& config() const { return config_; }

  /// Observes `raw` in the normalizer and returns its reward.
  double score(const RawMetrics& raw);

 private:
  EnvConfig config_;
  Topology state_;
  int step_ = 0;
  MetricNormalizer normalizer_;
};

// ---------------------------------------------------------------------------
// Runs

struct Evaluation {
  int episode = 0;
  int step = 0;
  std::size_t action = 0;
  std::size_t legal_count = 0;
  RawMetrics raw;
  double reward = 0.0;
};

struct EpisodeSummary {
  int episode = 0;
  double total_reward = 0.0;
  double best_reward = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct Checkpoint {
  int episode = 0;
  Topology topology;
  InterferenceReport report;
};

struct SynthesisRun {
  std::uint64_t seed = 0;
  std::vector<Evaluation> log;
  std::vector<EpisodeSummary> episodes;
  std::vector<Checkpoint> checkpoints;
  Topology best_topology;
  RawMetrics best_raw;
  double best_reward = 0.0;
  /// Largest probability ever assigned to a masked action (0 by construction).
  double masked_probability_mass = 0.0;
  /// Value regression loss after each policy update.
  std::vector<double> value_losses;
  std::vector<double> policy_parameters;
};

struct PpoConfig {
  int episodes = 500;
  int episodes_per_update = 4;
  int epochs = 10;
  int minibatch = 32;
  int hidden = 128;
  double learning_rate = 3e-4;
  double clip = 0.2;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  double max_grad_norm = 0.5;
  /// Simulate the best topology of every eval_interval-th episode; 0 = never.
  int eval_interval = 0;
  InterferenceOptions eval;
};

/// Masked-categorical actor-critic trained with the clipped surrogate and GAE.
SynthesisRun train(const EnvConfig& env, const PpoConfig& ppo, std::uint64_t seed);

/// `episodes` episodes of uniformly random legal edits from the initial
/// topology; every visited state is evaluated.
SynthesisRun random_search(const EnvConfig& env, int episodes, std::uint64_t seed);

/// Rewards of a replayed action sequence (episode boundaries every
/// episode_length actions) in a fresh environment.
std::vector<double> replay_rewards(const EnvConfig& env, const std::vector<std::size_t>& actions);

/// Best reward of each run after normalizing every logged evaluation of all
/// runs with one shared min-max range.
std::vector<double> pooled_best_rewards(const std::vector<const SynthesisRun*>& runs,
                                        const RewardWeights& weights, double is_cap = 4.0);

}  // namespace noi
