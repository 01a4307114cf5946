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

#include "noi/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include "noi/error.hpp"
#include "noi/graph.hpp"
#include "noi/rng.hpp"

namespace noi {

std::string_view to_string(FlowClass cls) {
  switch (cls) {
    case FlowClass::weight: return "weight";
    case FlowClass::activation: return "activation";
    case FlowClass::control: return "control";
  }
  return "?";
}

std::optional<FlowClass> parse_flow_class(std::string_view text) {
  for (FlowClass c : {FlowClass::weight, FlowClass::activation, FlowClass::control}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

std::string_view to_string(PlacementPolicy policy) {
  return policy == PlacementPolicy::striped ? "striped" : "local";
}

PlacementPolicy parse_placement_policy(std::string_view text) {
  if (text == "striped") return PlacementPolicy::striped;
  if (text == "local") return PlacementPolicy::local;
  throw Error(ErrorCode::ConfigError, "unknown placement policy '" + std::string(text) + "'");
}

double MmppParams::stationary_high() const {
  const double s = p_high_to_low + p_low_to_high;
  return s > 0.0 ? p_low_to_high / s : 1.0;
}

double MmppParams::mean_rate_factor() const {
  const double h = stationary_high();
  return h + (1.0 - h) * low_ratio;
}

std::uint64_t WorkloadSpec::w_ffn_bytes() const {
  const auto d = static_cast<std::uint64_t>(d_model);
  return 8 * d * d * static_cast<std::uint64_t>(bytes_per_weight);
}

std::uint64_t WorkloadSpec::weight_chunk_count() const {
  return (w_ffn_bytes() + chunk_bytes - 1) / chunk_bytes;
}

void WorkloadSpec::check() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (num_experts < 1) bad("num_experts must be >= 1");
  if (top_k < 1 || top_k > num_experts) bad("top_k must be in [1, num_experts]");
  if (active_experts < 1 || active_experts > num_experts) bad("active_experts must be in [1, num_experts]");
  if (batch_tokens < 1) bad("batch_tokens must be >= 1");
  if (dirichlet_alpha <= 0.0) bad("dirichlet_alpha must be > 0");
  if (phase_steps < 1) bad("phase_steps must be >= 1");
  if (!(rho_pair > -1.0 && rho_pair < 1.0)) bad("rho_pair must be in (-1, 1)");
  if (tokens_per_weight_chunk < 1) bad("tokens_per_weight_chunk must be >= 1");
  if (chunk_bytes == 0 || control_bytes == 0) bad("flow sizes must be positive");
  if (activation_min_bytes == 0 || activation_min_bytes > activation_max_bytes) bad("bad activation bounds");
  if (activation_sigma <= 0.0) bad("activation_sigma must be > 0");
  if (rho_target <= 0.0) bad("rho_target must be > 0");
  if (q_hbm_bytes <= 0.0) bad("q_hbm_bytes must be > 0");
  if (bytes_per_weight != 2 && bytes_per_weight != 4) bad("bytes_per_weight must be 2 or 4");
  double total = 0.0;
  for (double p : multicast_probs) {
    if (p < 0.0) bad("multicast probabilities must be nonnegative");
    total += p;
  }
  if (total <= 0.0) bad("multicast probabilities sum to zero");
}

ExpertPhase sample_expert_phase(int num_experts, double alpha, std::uint64_t seed) {
  if (num_experts < 1 || alpha <= 0.0) throw Error(ErrorCode::InvalidArgument, "bad Dirichlet parameters");
  Rng rng(seed);
  std::gamma_distribution<double> gamma(alpha, 1.0);
  ExpertPhase phase;
  phase.p.resize(static_cast<std::size_t>(num_experts));
  double total = 0.0;
  for (double& x : phase.p) {
    x = gamma(rng);
    total += x;
  }
  if (total <= 0.0) {
    std::fill(phase.p.begin(), phase.p.end(), 1.0 / num_experts);
  } else {
    for (double& x : phase.p) x /= total;
  }
  return phase;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

RoutingDraw route_tokens(const ExpertPhase& phase, int batch_tokens, int top_k, double rho_pair,
                         std::uint64_t seed) {
  const int e = static_cast<int>(phase.p.size());
  if (top_k < 1 || top_k > e) throw Error(ErrorCode::InvalidArgument, "top_k must be in [1, E]");
  if (batch_tokens < 0) throw Error(ErrorCode::InvalidArgument, "negative batch");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double coupled = std::sqrt(1.0 - rho_pair * rho_pair);
  std::vector<double> logp(phase.p.size()), z(phase.p.size()), score(phase.p.size());
  for (int i = 0; i < e; ++i) {
    logp[i] = phase.p[i] > 0.0 ? std::log(phase.p[i]) : -std::numeric_limits<double>::infinity();
  }
  std::vector<int> order(phase.p.size());
  RoutingDraw out;
  out.loads.assign(phase.p.size(), 0);
  out.selections.reserve(static_cast<std::size_t>(batch_tokens));
  for (int t = 0; t < batch_tokens; ++t) {
    for (double& x : z) x = normal(rng);
    for (int i = 0; i + 1 < e; i += 2) z[i + 1] = rho_pair * z[i] + coupled * z[i + 1];
    for (int i = 0; i < e; ++i) {
      const double u = std::clamp(normal_cdf(z[i]), 1e-300, 1.0 - 1e-16);
      score[i] = logp[i] - std::log(-std::log(u));
    }
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + top_k, order.end(), [&](int a, int b) {
      return score[a] != score[b] ? score[a] > score[b] : a < b;
    });
    std::vector<int> chosen(order.begin(), order.begin() + top_k);
    std::sort(chosen.begin(), chosen.end());
    for (int c : chosen) ++out.loads[c];
    out.selections.push_back(std::move(chosen));
  }
  return out;
}

namespace {

/// Incremental slotted-MMPP arrival clock.
class MmppClock {
 public:
  MmppClock(double lambda_high, const MmppParams& params, std::uint64_t seed)
      : params_(params), lambda_high_(lambda_high), slot_(params.slot_scale / lambda_high), rng_(seed) {
    high_ = params.start_high ? *params.start_high : unit_(rng_) < params.stationary_high();
  }

  double next() {
    for (;;) {
      const double rate = high_ ? lambda_high_ : lambda_high_ * params_.low_ratio;
      const double slot_end = static_cast<double>(slot_index_ + 1) * slot_;
      if (rate > 0.0) {
        const double gap = -std::log(1.0 - unit_(rng_)) / rate;
        if (now_ + gap < slot_end) {
          now_ += gap;
          return now_;
        }
      }
      now_ = slot_end;
      ++slot_index_;
      const double u = unit_(rng_);
      high_ = high_ ? !(u < params_.p_high_to_low) : (u < params_.p_low_to_high);
    }
  }

 private:
  MmppParams params_;
  double lambda_high_;
  double slot_;
  Rng rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  bool high_ = true;
  double now_ = 0.0;
  std::uint64_t slot_index_ = 0;
};

}  // namespace

std::vector<double> arrival_process(double lambda_high, std::size_t n_gaps, std::uint64_t seed,
                                    const MmppParams& params) {
  if (!(lambda_high > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_high must be > 0");
  if (n_gaps < 1) throw Error(ErrorCode::InvalidArgument, "n_gaps must be >= 1");
  MmppClock clock(lambda_high, params, seed);
  std::vector<double> out(n_gaps);
  for (double& t : out) t = clock.next();
  return out;
}

double truncated_lognormal_mean(double mu, double sigma, double lo, double hi) {
  const double a = (std::log(lo) - mu) / sigma;
  const double b = (std::log(hi) - mu) / sigma;
  const double mass = normal_cdf(b) - normal_cdf(a);
  const double partial = normal_cdf(b - sigma) - normal_cdf(a - sigma);
  return std::exp(mu + 0.5 * sigma * sigma) * partial / mass;
}

std::vector<std::vector<NodeId>> resolve_placement(const WorkloadSpec& workload,
                                                   const Topology& topology) {
  workload.check();
  const auto k = static_cast<std::size_t>(workload.active_experts);
  std::vector<std::vector<NodeId>> out(k);
  if (!workload.placement.empty()) {
    if (workload.placement.size() < k) {
      throw Error(ErrorCode::UnplacedExpert, "expert " + std::to_string(workload.placement.size()) +
                                                 " has no placement");
    }
    for (std::size_t e = 0; e < k; ++e) {
      if (workload.placement[e].empty()) {
        throw Error(ErrorCode::UnplacedExpert, "expert " + std::to_string(e) + " has no placement");
      }
      for (NodeId n : workload.placement[e]) {
        if (n >= topology.node_count()) {
          throw Error(ErrorCode::UnknownNode, "placement references node " + std::to_string(n));
        }
      }
      out[e] = workload.placement[e];
    }
    return out;
  }
  const auto compute = topology.compute_nodes();
  if (compute.empty()) throw Error(ErrorCode::NoComputeNodes, "topology has no compute nodes");
  if (workload.placement_policy == PlacementPolicy::striped) {
    for (std::size_t i = 0; i < compute.size(); ++i) out[i % k].push_back(compute[i]);
    for (std::size_t e = 0; e < k; ++e) {
      if (out[e].empty()) out[e].push_back(compute[e % compute.size()]);
    }
    return out;
  }
  const auto memory = topology.memory_nodes();
  if (memory.empty()) throw Error(ErrorCode::EmptyMemorySet, "topology has no memory nodes");
  for (std::size_t e = 0; e < k; ++e) {
    const NodeId m = memory[e % memory.size()];
    const auto dist = bfs_distances(topology, m);
    int best = std::numeric_limits<int>::max();
    for (NodeId c : compute) {
      if (dist[c] != kUnreachable) best = std::min(best, dist[c]);
    }
    for (NodeId c : compute) {
      if (dist[c] == best) out[e].push_back(c);
    }
    if (out[e].empty()) throw Error(ErrorCode::UnplacedExpert, "no compute node reachable from memory");
  }
  return out;
}

NodeId expert_home(const Topology& topology, const std::vector<NodeId>& nodes) {
  const auto memory = topology.memory_nodes();
  if (memory.empty()) throw Error(ErrorCode::EmptyMemorySet, "topology has no memory nodes");
  NodeId best = memory.front();
  long long best_total = std::numeric_limits<long long>::max();
  for (NodeId m : memory) {
    const auto dist = bfs_distances(topology, m);
    long long total = 0;
    for (NodeId n : nodes) {
      if (dist[n] == kUnreachable) {
        total = std::numeric_limits<long long>::max();
        break;
      }
      total += dist[n];
    }
    if (total < best_total) {
      best_total = total;
      best = m;
    }
  }
  return best;
}

std::vector<NodeId> resolve_homes(const WorkloadSpec& workload, const Topology& topology,
                                  const std::vector<std::vector<NodeId>>& placement) {
  std::vector<NodeId> homes;
  if (workload.homes.empty()) {
    for (const auto& nodes : placement) homes.push_back(expert_home(topology, nodes));
    return homes;
  }
  if (workload.homes.size() < placement.size()) {
    throw Error(ErrorCode::UnplacedExpert, "expert " + std::to_string(workload.homes.size()) + " has no home");
  }
  for (std::size_t e = 0; e < placement.size(); ++e) {
    const NodeId h = workload.homes[e];
    if (h >= topology.node_count() || !topology.is_memory(h)) {
      throw Error(ErrorCode::UnknownNode, "home " + std::to_string(h) + " is not a memory node");
    }
    homes.push_back(h);
  }
  return homes;
}

std::vector<NodeId> multicast_pool(const Topology& topology, const std::vector<NodeId>& nodes) {
  std::vector<NodeId> pool(nodes.begin(), nodes.end());
  for (NodeId n : nodes) {
    for (NodeId v : topology.neighbors(n)) {
      if (topology.node(v).role == Role::compute) pool.push_back(v);
    }
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return pool;
}

double WorkloadProfile::bytes_per_step(const WorkloadSpec& workload) const {
  return active_prob * static_cast<double>(workload.control_bytes) +
         mean_chunks * static_cast<double>(workload.chunk_bytes) + mean_tokens * mean_activation_bytes;
}

namespace {

constexpr std::uint64_t kPilotSeed = 0x9e1f0c5a3b7d2e41ULL;
constexpr int kPilotSteps = 16384;

std::vector<int> gating_loads(const WorkloadSpec& w, std::uint64_t seed, std::uint64_t step,
                              std::map<std::uint64_t, ExpertPhase>& phases) {
  const std::uint64_t phase_id = step / static_cast<std::uint64_t>(w.phase_steps);
  auto it = phases.find(phase_id);
  if (it == phases.end()) {
    it = phases.emplace(phase_id, sample_expert_phase(w.num_experts, w.dirichlet_alpha,
                                                      substream(seed, "phase", phase_id)))
             .first;
  }
  return route_tokens(it->second, w.batch_tokens, w.top_k, w.rho_pair, substream(seed, "route", step))
      .loads;
}

}  // namespace

WorkloadProfile profile_workload(const WorkloadSpec& workload) {
  workload.check();
  using Key = std::tuple<int, int, int, double, int, double, int, double, double, double, double>;
  static std::mutex mu;
  static std::map<Key, WorkloadProfile> cache;
  const Key key{workload.num_experts, workload.top_k, workload.batch_tokens, workload.dirichlet_alpha,
                workload.phase_steps, workload.rho_pair, workload.tokens_per_weight_chunk,
                workload.activation_mu, workload.activation_sigma,
                static_cast<double>(workload.activation_min_bytes),
                static_cast<double>(workload.activation_max_bytes)};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) {
      WorkloadProfile p = it->second;
      p.degree_probs = workload.multicast_probs;
      return p;
    }
  }
  WorkloadProfile p;
  p.mean_tokens = static_cast<double>(workload.batch_tokens) * workload.top_k / workload.num_experts;
  std::map<std::uint64_t, ExpertPhase> phases;
  std::uint64_t active = 0, chunks = 0;
  const auto tpc = static_cast<std::uint64_t>(workload.tokens_per_weight_chunk);
  for (int s = 0; s < kPilotSteps; ++s) {
    for (int n : gating_loads(workload, kPilotSeed, static_cast<std::uint64_t>(s), phases)) {
      if (n > 0) {
        ++active;
        chunks += (static_cast<std::uint64_t>(n) + tpc - 1) / tpc;
      }
    }
  }
  const double samples = static_cast<double>(kPilotSteps) * workload.num_experts;
  p.active_prob = static_cast<double>(active) / samples;
  p.mean_chunks = static_cast<double>(chunks) / samples;
  p.mean_activation_bytes = truncated_lognormal_mean(
      workload.activation_mu, workload.activation_sigma, static_cast<double>(workload.activation_min_bytes),
      static_cast<double>(workload.activation_max_bytes));
  {
    std::lock_guard lock(mu);
    cache.emplace(key, p);
  }
  p.degree_probs = workload.multicast_probs;
  return p;
}

double calibrate_lambda_high(const WorkloadSpec& workload, const WorkloadProfile& profile,
                             double cut_gbps) {
  const double per_expert = profile.bytes_per_step(workload);
  if (!(cut_gbps > 0.0) || !(per_expert > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cannot calibrate against an empty cut or workload");
  }
  return workload.rho_target * cut_gbps /
         (workload.mmpp.mean_rate_factor() * workload.active_experts * per_expert);
}

double calibration_cut(const WorkloadSpec& workload, const Topology& topology) {
  if (workload.calibration_cut_gbps > 0.0) return workload.calibration_cut_gbps;
  return memory_cut_capacity(topology, CutMode::structural).capacity_gbps;
}

int cap_multicast_degree(int drawn, std::size_t pool) {
  int d = 1;
  for (int allowed : kMulticastDegrees) {
    if (allowed <= drawn && static_cast<std::size_t>(allowed) <= pool) d = allowed;
  }
  return d;
}

TrafficTrace generate_trace(const WorkloadSpec& workload, const Topology& topology, double duration_ns,
                            std::uint64_t seed, const TraceOptions& options) {
  if (!(duration_ns > 0.0)) throw Error(ErrorCode::EmptyDuration, "duration must be > 0");
  const auto placement = resolve_placement(workload, topology);
  const auto homes = resolve_homes(workload, topology, placement);
  const std::size_t k = placement.size();
  const double lambda = options.lambda_high
                            ? *options.lambda_high
                            : calibrate_lambda_high(workload, profile_workload(workload),
                                                    calibration_cut(workload, topology));
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_high must be > 0");

  std::vector<std::vector<double>> steps(k);
  std::size_t max_steps = 0;
  for (std::size_t e = 0; e < k; ++e) {
    MmppClock clock(lambda, workload.mmpp, substream(seed, "arrival", e));
    for (double t = clock.next(); t < duration_ns; t = clock.next()) steps[e].push_back(t);
    max_steps = std::max(max_steps, steps[e].size());
  }
  std::map<std::uint64_t, ExpertPhase> phases;
  std::vector<std::vector<int>> loads(max_steps);
  for (std::size_t s = 0; s < max_steps; ++s) loads[s] = gating_loads(workload, seed, s, phases);

  std::discrete_distribution<int> degree_dist(workload.multicast_probs.begin(),
                                              workload.multicast_probs.end());
  std::lognormal_distribution<double> size_dist(workload.activation_mu, workload.activation_sigma);
  const auto lo = static_cast<double>(workload.activation_min_bytes);
  const auto hi = static_cast<double>(workload.activation_max_bytes);
  const auto tpc = static_cast<std::uint64_t>(workload.tokens_per_weight_chunk);

  TrafficTrace trace;
  trace.duration_ns = duration_ns;
  trace.experts = static_cast<int>(k);
  for (std::size_t e = 0; e < k; ++e) {
    const auto& nodes = placement[e];
    const NodeId home = homes[e];
    const auto pool = multicast_pool(topology, nodes);
    Rng rng(substream(seed, "flows", e));
    std::uint64_t ordinal = 0, chunk_rr = 0;
    auto emit = [&](double ts, std::vector<NodeId> dsts, std::uint64_t bytes, FlowClass cls) {
      trace.events.push_back({ts, home, std::move(dsts), bytes, cls, static_cast<int>(e), ordinal++});
    };
    for (std::size_t s = 0; s < steps[e].size(); ++s) {
      const int n = loads[s][e];
      if (n == 0) continue;
      const double ts = steps[e][s];
      emit(ts, {nodes.front()}, workload.control_bytes, FlowClass::control);
      const std::uint64_t chunks = (static_cast<std::uint64_t>(n) + tpc - 1) / tpc;
      for (std::uint64_t c = 0; c < chunks; ++c) {
        emit(ts, {nodes[chunk_rr++ % nodes.size()]}, workload.chunk_bytes, FlowClass::weight);
      }
      for (int t = 0; t < n; ++t) {
        double size;
        do {
          size = size_dist(rng);
        } while (size < lo || size > hi);
        const int degree = cap_multicast_degree(kMulticastDegrees[degree_dist(rng)], pool.size());
        std::vector<NodeId> candidates = pool;
        for (int i = 0; i < degree; ++i) {
          std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i), candidates.size() - 1);
          std::swap(candidates[static_cast<std::size_t>(i)], candidates[pick(rng)]);
        }
        candidates.resize(static_cast<std::size_t>(degree));
        std::sort(candidates.begin(), candidates.end());
        emit(ts, std::move(candidates), static_cast<std::uint64_t>(std::llround(size)), FlowClass::activation);
      }
    }
  }
  std::sort(trace.events.begin(), trace.events.end(), [](const FlowEvent& a, const FlowEvent& b) {
    return std::tie(a.timestamp_ns, a.expert, a.ordinal) < std::tie(b.timestamp_ns, b.expert, b.ordinal);
  });
  return trace;
}

TrafficTrace constant_rate_trace(const WorkloadSpec& workload, const Topology& topology,
                                 double duration_ns, double bytes_per_ns, std::uint64_t flow_bytes) {
  if (!(duration_ns > 0.0)) throw Error(ErrorCode::EmptyDuration, "duration must be > 0");
  if (!(bytes_per_ns > 0.0) || flow_bytes == 0) throw Error(ErrorCode::InvalidArgument, "rate must be > 0");
  const auto placement = resolve_placement(workload, topology);
  const auto homes = resolve_homes(workload, topology, placement);
  const double period = static_cast<double>(flow_bytes) / bytes_per_ns;
  TrafficTrace trace;
  trace.duration_ns = duration_ns;
  trace.experts = static_cast<int>(placement.size());
  const std::size_t k = placement.size();
  for (std::uint64_t i = 0;; ++i) {
    const double ts = static_cast<double>(i) * period;
    if (ts >= duration_ns) break;
    const std::size_t e = i % k;
    trace.events.push_back({ts, homes[e], {placement[e].front()}, flow_bytes, FlowClass::weight,
                            static_cast<int>(e), i / k});
  }
  return trace;
}

TrafficTrace filter_experts(const TrafficTrace& trace, const std::vector<int>& experts) {
  TrafficTrace out;
  out.duration_ns = trace.duration_ns;
  out.experts = trace.experts;
  for (const FlowEvent& ev : trace.events) {
    if (std::find(experts.begin(), experts.end(), ev.expert) != experts.end()) out.events.push_back(ev);
  }
  return out;
}

TraceStats trace_stats(const TrafficTrace& trace, const Topology& topology, double window_ns) {
  if (trace.events.empty()) throw Error(ErrorCode::EmptyTrace, "trace has no events");
  if (!(window_ns > 0.0)) throw Error(ErrorCode::InvalidArgument, "window must be > 0");
  TraceStats st;
  st.window_ns = window_ns;
  std::vector<double> stamps;
  double total = 0.0;
  std::array<double, 3> by_class{};
  const double duration =
      trace.duration_ns > 0.0 ? trace.duration_ns : trace.events.back().timestamp_ns + window_ns;
  const auto windows = static_cast<std::size_t>(std::ceil(duration / window_ns));
  st.ingress_bytes.assign(std::max<std::size_t>(windows, 1), 0.0);
  for (const FlowEvent& ev : trace.events) {
    if (stamps.empty() || stamps.back() != ev.timestamp_ns) stamps.push_back(ev.timestamp_ns);
    const auto bytes = static_cast<double>(ev.bytes);
    total += bytes;
    by_class[static_cast<std::size_t>(ev.cls)] += bytes;
    if (ev.source < topology.node_count() && topology.is_memory(ev.source)) {
      const auto w = std::min(st.ingress_bytes.size() - 1,
                              static_cast<std::size_t>(ev.timestamp_ns / window_ns));
      st.ingress_bytes[w] += bytes;
    }
  }
  if (stamps.size() >= 3) {
    double sum = 0.0, sq = 0.0;
    const auto n = static_cast<double>(stamps.size() - 1);
    for (std::size_t i = 1; i < stamps.size(); ++i) {
      const double g = stamps[i] - stamps[i - 1];
      sum += g;
      sq += g * g;
    }
    const double mean = sum / n;
    st.arrival_scv = mean > 0.0 ? (sq / n - mean * mean) / (mean * mean) : 0.0;
  }
  st.mean_injection_gbps = total / duration;
  for (std::size_t c = 0; c < 3; ++c) st.class_byte_share[c] = total > 0.0 ? by_class[c] / total : 0.0;
  double sum = 0.0, sq = 0.0;
  for (double b : st.ingress_bytes) {
    sum += b;
    sq += b * b;
  }
  const auto n = static_cast<double>(st.ingress_bytes.size());
  const double mean = sum / n;
  st.ingress_cv = mean > 0.0 ? std::sqrt(std::max(0.0, sq / n - mean * mean)) / mean : 0.0;
  return st;
}

}  // namespace noi
