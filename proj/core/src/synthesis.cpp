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

#include "noi/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "noi/error.hpp"
#include "noi/graph.hpp"
#include "noi/rng.hpp"

namespace noi {

std::size_t pair_count(std::size_t nodes) { return nodes * (nodes - 1) / 2; }

NodePair pair_at(std::size_t nodes, std::size_t index) {
  std::size_t a = 0;
  while (index >= nodes - 1 - a) {
    index -= nodes - 1 - a;
    ++a;
  }
  return {static_cast<NodeId>(a), static_cast<NodeId>(a + 1 + index)};
}

std::size_t pair_index(std::size_t nodes, NodeId a, NodeId b) {
  if (a > b) std::swap(a, b);
  const std::size_t x = a;
  return x * (2 * nodes - x - 1) / 2 + (b - a - 1);
}

std::size_t action_count(std::size_t nodes) { return 2 * pair_count(nodes) + 1; }
std::size_t noop_action(std::size_t nodes) { return 2 * pair_count(nodes); }

std::optional<Edit> action_edit(std::size_t nodes, std::size_t action) {
  const std::size_t p = pair_count(nodes);
  if (action >= action_count(nodes)) throw Error(ErrorCode::InvalidArgument, "action out of range");
  if (action == noop_action(nodes)) return std::nullopt;
  const bool add = action < p;
  const auto [a, b] = pair_at(nodes, add ? action : action - p);
  return Edit{add ? EditKind::add : EditKind::remove, a, b};
}

std::vector<char> legal_actions(const Topology& topology) {
  const std::size_t n = topology.node_count();
  const std::size_t p = pair_count(n);
  std::vector<char> mask(action_count(n), 0);
  for (std::size_t i = 0; i < p; ++i) {
    const auto [a, b] = pair_at(n, i);
    if (!topology.has_link(a, b)) {
      mask[i] = topology.degree(a) < topology.node(a).port_cap && topology.degree(b) < topology.node(b).port_cap;
    }
  }
  if (topology.is_connected()) {
    std::vector<char> bridge(p, 0);
    for (auto [a, b] : bridges(topology)) bridge[pair_index(n, a, b)] = 1;
    for (const Link& l : topology.links()) {
      const std::size_t i = pair_index(n, l.a, l.b);
      mask[p + i] = !bridge[i];
    }
  }
  mask[noop_action(n)] = 1;
  return mask;
}

RewardWeights RewardWeights::normalized() const {
  if (throughput < 0 || interference < 0 || latency < 0 || power < 0) {
    throw Error(ErrorCode::InvalidArgument, "reward weights must be nonnegative");
  }
  const double s = throughput + interference + latency + power;
  if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "reward weights sum to zero");
  return {throughput / s, interference / s, latency / s, power / s};
}

double reward_fn(const NormalizedMetrics& m, const RewardWeights& weights) {
  const RewardWeights w = weights.normalized();
  return w.throughput * m.throughput - (w.interference * m.interference + w.latency * m.latency + w.power * m.power);
}

double normalize_interference(double is, double is_cap) {
  if (!(is_cap > 1.0)) throw Error(ErrorCode::InvalidArgument, "IS cap must be > 1");
  if (std::isnan(is)) return 1.0;
  return std::clamp((is - 1.0) / (is_cap - 1.0), 0.0, 1.0);
}

MetricNormalizer::MetricNormalizer(std::size_t window, double is_cap) : window_(window), is_cap_(is_cap) {
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "normalizer window must be > 0");
  if (!(is_cap > 1.0)) throw Error(ErrorCode::InvalidArgument, "IS cap must be > 1");
}

void MetricNormalizer::observe(const RawMetrics& raw) {
  if (history_.size() < window_) {
    history_.push_back(raw);
  } else {
    history_[head_] = raw;
    head_ = (head_ + 1) % window_;
  }
}

NormalizedMetrics MetricNormalizer::normalize(const RawMetrics& raw) const {
  auto scaled = [&](double RawMetrics::*field) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const RawMetrics& h : history_) {
      lo = std::min(lo, h.*field);
      hi = std::max(hi, h.*field);
    }
    if (!(hi > lo)) return 0.5;
    return std::clamp((raw.*field - lo) / (hi - lo), 0.0, 1.0);
  };
  NormalizedMetrics m;
  m.throughput = scaled(&RawMetrics::throughput);
  m.latency = scaled(&RawMetrics::latency);
  m.power = scaled(&RawMetrics::power);
  m.interference = normalize_interference(raw.interference, is_cap_);
  return m;
}

RawMetrics proxy_metrics(const Topology& topology, const EnvConfig& config) {
  const ProxyMetrics p = analytic_proxy_eval(topology, config.workload, config.proxy);
  return {p.throughput_proxy, p.interference_proxy, p.latency_proxy, p.power_proxy};
}

std::size_t feature_size(const Topology& topology) {
  const std::size_t n = topology.node_count();
  return pair_count(n) + n + 1 + topology.memory_nodes().size() + 1;
}

std::vector<double> featurize(const Topology& topology, int step, int episode_length) {
  const std::size_t n = topology.node_count();
  std::vector<double> f;
  f.reserve(feature_size(topology));
  for (std::size_t i = 0; i < pair_count(n); ++i) {
    const auto [a, b] = pair_at(n, i);
    f.push_back(topology.has_link(a, b) ? 1.0 : 0.0);
  }
  for (const Node& node : topology.nodes()) {
    f.push_back(static_cast<double>(topology.degree(node.id)) / node.port_cap);
  }
  const auto memory = topology.memory_nodes();
  double max_cut = 0.0, cut = 0.0;
  std::vector<double> counts;
  for (NodeId m : memory) {
    max_cut += topology.node(m).port_cap * kDefaultLinkGbps;
    int c = 0;
    for (NodeId v : topology.neighbors(m)) {
      if (!topology.is_memory(v)) {
        ++c;
        cut += topology.bandwidth(m, v);
      }
    }
    counts.push_back(static_cast<double>(c) / topology.node(m).port_cap);
  }
  f.push_back(max_cut > 0.0 ? cut / max_cut : 0.0);
  f.insert(f.end(), counts.begin(), counts.end());
  f.push_back(episode_length > 0 ? static_cast<double>(step) / episode_length : 0.0);
  return f;
}

TopologyEnv::TopologyEnv(EnvConfig config)
    : config_(std::move(config)),
      state_(config_.initial),
      normalizer_(config_.normalizer_window, config_.is_cap) {
  if (config_.episode_length < 1) throw Error(ErrorCode::InvalidArgument, "episode_length must be >= 1");
  if (!validate(config_.initial).ok()) throw Error(ErrorCode::InvalidTopology, "initial topology is invalid");
  config_.weights.normalized();
}

void TopologyEnv::reset() {
  state_ = config_.initial;
  step_ = 0;
}

double TopologyEnv::score(const RawMetrics& raw) {
  normalizer_.observe(raw);
  return reward_fn(normalizer_.normalize(raw), config_.weights);
}

StepResult TopologyEnv::step(std::size_t action) {
  const std::size_t n = state_.node_count();
  if (action >= action_count(n) || !legal_actions(state_)[action]) {
    throw Error(ErrorCode::MaskedActionTaken, "action " + std::to_string(action) + " is masked");
  }
  if (done()) throw Error(ErrorCode::InvalidArgument, "episode already finished");
  if (auto edit = action_edit(n, action)) state_ = apply_edit(state_, *edit);
  ++step_;
  StepResult r;
  r.raw = proxy_metrics(state_, config_);
  r.reward = score(r.raw);
  r.done = done();
  return r;
}

namespace {

void track_best(SynthesisRun& run, const Evaluation& ev, const Topology& state) {
  if (run.log.size() == 1 || ev.reward > run.best_reward) {
    run.best_reward = ev.reward;
    run.best_raw = ev.raw;
    run.best_topology = state;
  }
}

}  // namespace

SynthesisRun random_search(const EnvConfig& config, int episodes, std::uint64_t seed) {
  TopologyEnv env(config);
  SynthesisRun run;
  run.seed = seed;
  run.best_topology = config.initial;
  Rng rng(substream(seed, "random_search"));
  const std::size_t noop = noop_action(config.initial.node_count());
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset();
    EpisodeSummary summary;
    summary.episode = ep;
    summary.best_reward = -std::numeric_limits<double>::infinity();
    while (!env.done()) {
      const auto mask = env.mask();
      std::vector<std::size_t> legal;
      for (std::size_t a = 0; a < mask.size(); ++a) {
        if (mask[a] && a != noop) legal.push_back(a);
      }
      if (legal.empty()) legal.push_back(noop);
      std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
      const std::size_t action = legal[pick(rng)];
      const int step = env.step_index();
      const StepResult res = env.step(action);
      run.log.push_back({ep, step, action, legal.size(), res.raw, res.reward});
      track_best(run, run.log.back(), env.topology());
      summary.total_reward += res.reward;
      summary.best_reward = std::max(summary.best_reward, res.reward);
    }
    run.episodes.push_back(summary);
  }
  return run;
}

std::vector<double> replay_rewards(const EnvConfig& config, const std::vector<std::size_t>& actions) {
  TopologyEnv env(config);
  std::vector<double> out;
  for (std::size_t action : actions) {
    if (env.done()) env.reset();
    out.push_back(env.step(action).reward);
  }
  return out;
}

std::vector<double> pooled_best_rewards(const std::vector<const SynthesisRun*>& runs,
                                        const RewardWeights& weights, double is_cap) {
  double lo[3], hi[3];
  std::fill(lo, lo + 3, std::numeric_limits<double>::infinity());
  std::fill(hi, hi + 3, -std::numeric_limits<double>::infinity());
  for (const SynthesisRun* run : runs) {
    for (const Evaluation& ev : run->log) {
      const double v[3] = {ev.raw.throughput, ev.raw.latency, ev.raw.power};
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
    }
  }
  auto scale = [&](double v, int i) { return hi[i] > lo[i] ? (v - lo[i]) / (hi[i] - lo[i]) : 0.5; };
  std::vector<double> best;
  for (const SynthesisRun* run : runs) {
    double b = -std::numeric_limits<double>::infinity();
    for (const Evaluation& ev : run->log) {
      NormalizedMetrics m{scale(ev.raw.throughput, 0), normalize_interference(ev.raw.interference, is_cap),
                          scale(ev.raw.latency, 1), scale(ev.raw.power, 2)};
      b = std::max(b, reward_fn(m, weights));
    }
    best.push_back(b);
  }
  return best;
}

}  // namespace noi
