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

#include "noi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "noi/augment.hpp"
#include "noi/error.hpp"
#include "noi/format.hpp"
#include "noi/graph.hpp"
#include "noi/interference.hpp"
#include "noi/parallel.hpp"
#include "noi/queueing.hpp"
#include "noi/routing.hpp"
#include "noi/topology_io.hpp"
#include "noi/trace_io.hpp"

namespace noi::cli {

using nlohmann::json;

namespace {

const std::vector<std::pair<Command, std::string_view>> kCommandNames = {
    {Command::claim_a, "claim-a"},     {Command::claim_b, "claim-b"},
    {Command::claim_c, "claim-c"},     {Command::baselines, "baselines"},
    {Command::synthesize, "synthesize"}, {Command::simulate, "simulate"},
    {Command::trace_gen, "trace-gen"}};

Error config_error(const std::string& what) { return Error(ErrorCode::ConfigError, what); }

/// Reads keys of one JSON object and rejects the ones nobody asked for.
class Reader {
 public:
  Reader(const json& object, std::string where) : object_(object), where_(std::move(where)) {
    if (!object_.is_object()) throw config_error(where_ + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    auto it = object_.find(key);
    if (it == object_.end()) return;
    used_.insert(key);
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw config_error(where_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    auto it = object_.find(key);
    if (it == object_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  void finish() const {
    for (const auto& [key, value] : object_.items()) {
      if (!used_.count(key)) throw config_error("unknown key " + where_ + "." + key);
    }
  }

 private:
  const json& object_;
  std::string where_;
  std::set<std::string> used_;
};

void read_mmpp(const json& j, MmppParams& m) {
  Reader r(j, "workload.mmpp");
  r.get("low_ratio", m.low_ratio);
  r.get("p_high_to_low", m.p_high_to_low);
  r.get("p_low_to_high", m.p_low_to_high);
  r.get("slot_scale", m.slot_scale);
  r.finish();
}

void read_workload(const json& j, WorkloadSpec& w) {
  Reader r(j, "workload");
  r.get("layers", w.layers);
  r.get("d_model", w.d_model);
  r.get("num_experts", w.num_experts);
  r.get("top_k", w.top_k);
  r.get("context", w.context);
  r.get("bytes_per_weight", w.bytes_per_weight);
  r.get("active_experts", w.active_experts);
  r.get("placement", w.placement);
  r.get("homes", w.homes);
  std::string policy;
  r.get("placement_policy", policy);
  if (!policy.empty()) {
    try {
      w.placement_policy = parse_placement_policy(policy);
    } catch (const Error&) {
      throw config_error("unknown placement_policy " + policy);
    }
  }
  r.get("q_hbm_bytes", w.q_hbm_bytes);
  r.get("batch_tokens", w.batch_tokens);
  r.get("dirichlet_alpha", w.dirichlet_alpha);
  r.get("phase_steps", w.phase_steps);
  r.get("rho_pair", w.rho_pair);
  r.get("tokens_per_weight_chunk", w.tokens_per_weight_chunk);
  r.get("chunk_bytes", w.chunk_bytes);
  r.get("control_bytes", w.control_bytes);
  r.get("activation_mu", w.activation_mu);
  r.get("activation_sigma", w.activation_sigma);
  r.get("activation_min_bytes", w.activation_min_bytes);
  r.get("activation_max_bytes", w.activation_max_bytes);
  r.get("multicast_probs", w.multicast_probs);
  r.get("rho_target", w.rho_target);
  r.get("calibration_cut_gbps", w.calibration_cut_gbps);
  if (const json* m = r.sub("mmpp")) read_mmpp(*m, w.mmpp);
  r.finish();
}

void read_sim(const json& j, SimConfig& s) {
  Reader r(j, "sim");
  r.get("packet_bytes", s.packet_bytes);
  r.get("router_delay_ns", s.router_delay_ns);
  r.get("warmup_ns", s.warmup_ns);
  r.get("measure_ns", s.measure_ns);
  std::string routing;
  r.get("routing", routing);
  if (!routing.empty()) {
    try {
      s.routing = parse_routing_policy(routing);
    } catch (const Error&) {
      throw config_error("unknown routing " + routing);
    }
  }
  r.get("hbm_gbps", s.hbm_gbps);
  r.get("hbm_service_scv", s.hbm_service_scv);
  r.get("util_window_ns", s.util_window_ns);
  r.get("drain", s.drain);
  r.get("clock_ghz", s.clock_ghz);
  r.finish();
}

void read_ppo(const json& j, PpoConfig& p) {
  Reader r(j, "ppo");
  r.get("episodes", p.episodes);
  r.get("episodes_per_update", p.episodes_per_update);
  r.get("epochs", p.epochs);
  r.get("minibatch", p.minibatch);
  r.get("hidden", p.hidden);
  r.get("learning_rate", p.learning_rate);
  r.get("clip", p.clip);
  r.get("gamma", p.gamma);
  r.get("gae_lambda", p.gae_lambda);
  r.get("entropy_coef", p.entropy_coef);
  r.get("value_coef", p.value_coef);
  r.get("max_grad_norm", p.max_grad_norm);
  r.finish();
}

void read_weights(const json& j, RewardWeights& w) {
  Reader r(j, "weights");
  r.get("throughput", w.throughput);
  r.get("interference", w.interference);
  r.get("latency", w.latency);
  r.get("power", w.power);
  r.finish();
}

BaselineEntry read_baseline(const json& j) {
  Reader r(j, "suite[]");
  std::string kind;
  r.get("kind", kind);
  if (kind.empty()) throw config_error("suite entry needs a kind");
  BaselineEntry e;
  try {
    e.params.kind = parse_baseline_kind(kind);
  } catch (const Error&) {
    throw config_error("unknown baseline kind " + kind);
  }
  if (e.params.kind == BaselineKind::hypercube) e.params.dimensions = 4;
  r.get("rows", e.params.rows);
  r.get("cols", e.params.cols);
  r.get("radix", e.params.radix);
  r.get("dimensions", e.params.dimensions);
  r.get("nodes", e.params.nodes);
  r.get("degree", e.params.degree);
  r.get("cluster", e.params.cluster);
  r.get("seed", e.params.seed);
  e.name = kind;
  if (e.params.kind == BaselineKind::random_regular) e.name += "_" + std::to_string(e.params.degree);
  r.get("name", e.name);
  r.finish();
  return e;
}

std::vector<BaselineEntry> default_suite() {
  std::vector<BaselineEntry> suite;
  auto add = [&](std::string name, BaselineKind kind, auto&& tweak) {
    BaselineEntry e;
    e.name = std::move(name);
    e.params.kind = kind;
    tweak(e.params);
    suite.push_back(e);
  };
  auto none = [](BaselineParams&) {};
  add("mesh2d", BaselineKind::mesh2d, none);
  add("torus2d", BaselineKind::torus2d, none);
  add("ring", BaselineKind::ring, none);
  add("hypercube", BaselineKind::hypercube, [](BaselineParams& p) { p.dimensions = 4; });
  add("cmesh", BaselineKind::cmesh, none);
  add("random_regular_3", BaselineKind::random_regular, [](BaselineParams& p) { p.degree = 3; });
  add("random_regular_4", BaselineKind::random_regular, [](BaselineParams& p) { p.degree = 4; });
  return suite;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), first);
  return s;
}

void apply_defaults(ExperimentConfig& c) {
  switch (c.command) {
    case Command::claim_b:
      c.workload.placement_policy = PlacementPolicy::local;
      c.rho_grid = {0.3, 0.45, 0.6, 0.75, 0.9};
      break;
    case Command::claim_c:
      c.seeds = seed_range(1, 20);
      c.workload.placement_policy = PlacementPolicy::local;
      c.workload.calibration_cut_gbps = memory_cut_capacity(default_canvas()).capacity_gbps;
      c.sim.util_window_ns = 50000.0;
      break;
    case Command::baselines:
      c.workload.rho_target = 0.85;
      c.suite = default_suite();
      break;
    case Command::synthesize:
      c.topology = "backbone";
      c.seeds = seed_range(1, 5);
      break;
    default:
      break;
  }
}

}  // namespace

std::string_view to_string(Command command) {
  for (auto [c, name] : kCommandNames) {
    if (c == command) return name;
  }
  return "unknown";
}

Command parse_command(std::string_view text) {
  for (auto [c, name] : kCommandNames) {
    if (name == text) return c;
  }
  throw config_error("unknown command " + std::string(text));
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> commands = [] {
    std::vector<Command> v;
    for (auto [c, name] : kCommandNames) v.push_back(c);
    return v;
  }();
  return commands;
}

bool CommandResult::check(std::string_view name) const {
  for (const auto& [n, ok] : checks) {
    if (n == name) return ok;
  }
  throw Error(ErrorCode::InvalidArgument, "no check named " + std::string(name));
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw config_error(path + ": " + e.what());
  }
}

ExperimentConfig make_config(Command command, const nlohmann::json& document) {
  ExperimentConfig c;
  c.command = command;
  apply_defaults(c);
  const json doc = document.is_null() ? json::object() : document;
  Reader r(doc, "config");
  r.get("topology", c.topology);
  r.get("topology_file", c.topology_file);
  r.get("trace_file", c.trace_file);
  if (const json* w = r.sub("workload")) read_workload(*w, c.workload);
  if (const json* s = r.sub("sim")) read_sim(*s, c.sim);
  r.get("seeds", c.seeds);
  r.get("out", c.out_dir);
  r.get("jobs", c.jobs);
  r.get("duration_ns", c.duration_ns);
  r.get("constant_rate", c.constant_rate);
  r.get("window_ns", c.window_ns);
  r.get("rho_grid", c.rho_grid);
  r.get("max_links", c.max_links);
  if (const json* s = r.sub("suite")) {
    if (!s->is_array()) throw config_error("config.suite must be an array");
    c.suite.clear();
    for (const json& e : *s) c.suite.push_back(read_baseline(e));
  }
  r.get("heatmaps", c.heatmaps);
  if (const json* w = r.sub("weights")) read_weights(*w, c.env.weights);
  if (const json* p = r.sub("ppo")) read_ppo(*p, c.ppo);
  r.get("episode_length", c.env.episode_length);
  r.get("is_cap", c.env.is_cap);
  r.get("eval_seed", c.eval_seed);
  r.finish();

  if (c.seeds.empty()) throw config_error("at least one seed is required");
  if (c.jobs < 1) throw config_error("jobs must be >= 1");
  if (!(c.duration_ns > 0.0)) throw config_error("duration_ns must be > 0");
  if (!(c.window_ns > 0.0)) throw config_error("window_ns must be > 0");
  if (c.max_links < 0 || c.max_links > 4) throw config_error("max_links must be in [0, 4]");
  if (command == Command::claim_b && c.rho_grid.empty()) throw config_error("rho_grid is empty");
  if (command == Command::baselines && c.suite.size() < 2) {
    throw config_error("baselines needs at least two topologies");
  }
  std::sort(c.rho_grid.begin(), c.rho_grid.end());
  for (const std::string* path : {&c.topology_file, &c.trace_file}) {
    if (!path->empty() && !std::filesystem::exists(*path)) throw config_error("missing file " + *path);
  }
  try {
    c.workload.check();
    c.sim.check();
    c.env.weights.normalized();
  } catch (const Error& e) {
    throw config_error(e.what());
  }
  c.env.workload = c.workload;
  c.env.proxy.router_delay_ns = c.sim.router_delay_ns;
  c.env.proxy.packet_bytes = c.sim.packet_bytes;
  c.env.proxy.routing = c.sim.routing;
  c.ppo.eval.sim = c.sim;

  c.provenance = doc;
  c.provenance.erase("out");
  c.provenance.erase("jobs");
  c.provenance["command"] = std::string(to_string(command));
  c.provenance["seeds"] = c.seeds;
  return c;
}

Topology resolve_topology(const ExperimentConfig& config) {
  Topology t;
  if (!config.topology_file.empty()) {
    t = load_topology(config.topology_file);
  } else if (config.topology == "canvas") {
    t = default_canvas();
  } else if (config.topology == "backbone") {
    t = sparse_backbone();
  } else {
    BaselineParams p;
    try {
      p.kind = parse_baseline_kind(config.topology);
    } catch (const Error&) {
      throw config_error("unknown topology " + config.topology);
    }
    if (p.kind == BaselineKind::hypercube) p.dimensions = 4;
    t = build_baseline(p, default_placement());
  }
  if (!validate(t).ok()) throw config_error("topology is invalid (disconnected or over port caps)");
  return t;
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace {

std::string num(double v) { return format_double(v); }

struct DirectedLink {
  std::size_t id;
  NodeId from;
  NodeId to;
};

std::vector<DirectedLink> directed_links(const Topology& t) {
  std::vector<DirectedLink> out;
  for (std::size_t i = 0; i < t.link_count(); ++i) {
    const Link& l = t.links()[i];
    out.push_back({2 * i, l.a, l.b});
    out.push_back({2 * i + 1, l.b, l.a});
  }
  return out;
}

std::vector<DirectedLink> memory_egress(const Topology& t) {
  std::vector<DirectedLink> out;
  for (const DirectedLink& d : directed_links(t)) {
    if (t.is_memory(d.from)) out.push_back(d);
  }
  return out;
}

LatencySummary safe_summary(const std::vector<double>& samples) {
  return samples.empty() ? LatencySummary{} : summarize(samples);
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "|" : "") + num(v[i]);
  return s;
}

TrafficTrace make_trace(const ExperimentConfig& c, const WorkloadSpec& w, const Topology& t, double duration,
                        std::uint64_t seed) {
  if (!c.trace_file.empty()) return load_trace_csv(c.trace_file, duration);
  if (c.constant_rate) {
    return constant_rate_trace(w, t, duration, w.rho_target * calibration_cut(w, t));
  }
  return generate_trace(w, t, duration, seed);
}

SimConfig sim_for(const ExperimentConfig& c, std::uint64_t seed) {
  SimConfig s = c.sim;
  s.seed = seed;
  return s;
}

double sim_duration(const SimConfig& s) { return s.warmup_ns + s.measure_ns; }

json latency_json(const LatencySummary& l) {
  return {{"count", l.count}, {"mean", l.mean}, {"p50", l.p50}, {"p95", l.p95}, {"p99", l.p99}, {"max", l.max}};
}

}  // namespace

// ---------------------------------------------------------------------------
// claim-a

CommandResult run_claim_a(const ExperimentConfig& c) {
  const Topology t = resolve_topology(c);
  const std::size_t n = c.seeds.size();
  std::vector<TraceStats> stats(n);
  std::vector<std::size_t> events(n);
  parallel_for(n, c.jobs, [&](std::size_t i) {
    const TrafficTrace trace = make_trace(c, c.workload, t, c.duration_ns, c.seeds[i]);
    stats[i] = trace_stats(trace, t, c.window_ns);
    events[i] = trace.events.size();
  });

  CommandResult r;
  std::ostringstream csv;
  csv << "seed,window,start_ns,ingress_bytes\n";
  bool bursty = true;
  json rows = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const TraceStats& s = stats[i];
    for (std::size_t k = 0; k < s.ingress_bytes.size(); ++k) {
      csv << c.seeds[i] << ',' << k << ',' << num(static_cast<double>(k) * s.window_ns) << ','
          << num(s.ingress_bytes[k]) << '\n';
    }
    bursty = bursty && s.ingress_cv > 1.0;
    rows.push_back({{"seed", c.seeds[i]},
                    {"events", events[i]},
                    {"ingress_cv", s.ingress_cv},
                    {"arrival_scv", s.arrival_scv},
                    {"mean_injection_gbps", s.mean_injection_gbps},
                    {"class_byte_share", s.class_byte_share}});
  }
  r.files["ingress.csv"] = csv.str();
  r.summary = {{"window_ns", c.window_ns}, {"seeds", rows}};
  r.checks.emplace_back("ingress_cv_gt_1", bursty);
  return r;
}

// ---------------------------------------------------------------------------
// claim-b

CommandResult run_claim_b(const ExperimentConfig& c) {
  const Topology t = resolve_topology(c);
  const double cut = memory_cut_capacity(t).capacity_gbps;
  const std::size_t grid = c.rho_grid.size();
  const std::size_t cells = c.seeds.size() * grid;
  std::vector<SimReport> reports(cells);
  std::vector<ProxyMetrics> proxies(grid);
  parallel_for(cells, c.jobs, [&](std::size_t i) {
    const std::uint64_t seed = c.seeds[i / grid];
    WorkloadSpec w = c.workload;
    w.rho_target = c.rho_grid[i % grid];
    const SimConfig sim = sim_for(c, seed);
    reports[i] = simulate(t, make_trace(c, w, t, sim_duration(sim), seed), sim);
  });
  for (std::size_t g = 0; g < grid; ++g) {
    WorkloadSpec w = c.workload;
    w.rho_target = c.rho_grid[g];
    ProxyOptions po;
    po.packet_bytes = c.sim.packet_bytes;
    po.router_delay_ns = c.sim.router_delay_ns;
    po.routing = c.sim.routing;
    proxies[g] = analytic_proxy_eval(t, w, po);
  }

  const ProxyOptions defaults;
  const auto egress = memory_egress(t);
  auto kingman_or_inf = [&](double rho, double bandwidth) {
    if (!(rho < 1.0)) return std::numeric_limits<double>::infinity();
    return kingman_wait(rho, defaults.arrival_scv, defaults.service_scv, bandwidth / c.sim.packet_bytes);
  };

  CommandResult r;
  std::ostringstream csv;
  csv << "seed,rho_target,link,from,to,utilization,mean_wait_ns,p95_wait_ns,p99_wait_ns,kingman_wait_ns,"
         "proxy_utilization,proxy_kingman_wait_ns,pooled_p99_wait_ns,cut_goodput_gbps,roofline_gbps\n";
  bool goodput_ok = true, monotone = true, blowup = true;
  const auto lo = std::find(c.rho_grid.begin(), c.rho_grid.end(), 0.45);
  const auto hi = std::find(c.rho_grid.begin(), c.rho_grid.end(), 0.9);
  json per_seed = json::array();
  for (std::size_t s = 0; s < c.seeds.size(); ++s) {
    const SimReport& top = reports[s * grid + grid - 1];
    DirectedLink link = egress.front();
    for (const DirectedLink& d : egress) {
      if (top.link_utilization[d.id] > top.link_utilization[link.id]) link = d;
    }
    const double bw = t.bandwidth(link.from, link.to);
    std::vector<double> p99s;
    for (std::size_t g = 0; g < grid; ++g) {
      const SimReport& rep = reports[s * grid + g];
      const LatencySummary at = safe_summary(rep.queue_delay_ns[link.id]);
      std::vector<double> pooled;
      for (const DirectedLink& d : egress) {
        pooled.insert(pooled.end(), rep.queue_delay_ns[d.id].begin(), rep.queue_delay_ns[d.id].end());
      }
      const double rho_link = rep.link_utilization[link.id];
      const double proxy_rho = proxies[g].link_utilization[link.id];
      csv << c.seeds[s] << ',' << num(c.rho_grid[g]) << ',' << link.id << ',' << link.from << ',' << link.to << ','
          << num(rho_link) << ',' << num(at.mean) << ',' << num(at.p95) << ',' << num(at.p99) << ','
          << num(kingman_or_inf(rho_link, bw)) << ',' << num(proxy_rho) << ','
          << num(kingman_or_inf(proxy_rho, bw)) << ',' << num(safe_summary(pooled).p99) << ','
          << num(rep.cut_goodput_gbps) << ',' << num(cut) << '\n';
      goodput_ok = goodput_ok && rep.cut_goodput_gbps <= cut * (1.0 + 1e-9);
      if (!p99s.empty() && at.p99 < p99s.back()) monotone = false;
      p99s.push_back(at.p99);
    }
    json row = {{"seed", c.seeds[s]}, {"link", link.id}, {"from", link.from}, {"to", link.to}, {"p99", p99s}};
    if (lo != c.rho_grid.end() && hi != c.rho_grid.end()) {
      const double ratio = p99s[static_cast<std::size_t>(hi - c.rho_grid.begin())] /
                           p99s[static_cast<std::size_t>(lo - c.rho_grid.begin())];
      row["p99_ratio_0.9_over_0.45"] = ratio;
      blowup = blowup && ratio > 3.0;
    }
    per_seed.push_back(row);
  }
  r.files["load_sweep.csv"] = csv.str();
  r.summary = {{"rho_grid", c.rho_grid}, {"roofline_gbps", cut}, {"seeds", per_seed}};
  r.checks.emplace_back("cut_goodput_le_roofline", goodput_ok);
  r.checks.emplace_back("p99_nondecreasing", monotone);
  if (lo != c.rho_grid.end() && hi != c.rho_grid.end()) r.checks.emplace_back("p99_ratio_gt_3", blowup);
  return r;
}

// ---------------------------------------------------------------------------
// claim-c

namespace {

struct AugmentCell {
  AugmentStrategy strategy;
  int links;
  std::uint64_t seed;
  Topology topology;
  std::vector<Link> added;
  double structural_cut = 0.0;
  double min_cut = 0.0;
  int cross_added = 0;
  LatencySummary queue;
  std::vector<DirectedLink> dlinks;
  std::vector<std::vector<double>> utilization;
  std::vector<std::tuple<NodeId, NodeId, std::uint64_t>> paths;
  std::map<std::tuple<NodeId, NodeId, std::uint64_t, std::uint64_t>, std::uint64_t> flow_paths;
};

const char* strategy_name(AugmentStrategy s) { return s == AugmentStrategy::targeted ? "targeted" : "random"; }

}  // namespace

CommandResult run_claim_c(const ExperimentConfig& c) {
  const Topology base = resolve_topology(c);
  const double base_structural = memory_cut_capacity(base).capacity_gbps;
  const double base_min = memory_cut_capacity(base, CutMode::maxflow).capacity_gbps;
  const AugmentStrategy strategies[2] = {AugmentStrategy::targeted, AugmentStrategy::random};
  const std::size_t levels = static_cast<std::size_t>(c.max_links) + 1;
  const std::size_t seeds = c.seeds.size();
  WorkloadSpec workload = c.workload;
  workload.placement = resolve_placement(workload, base);
  workload.homes = resolve_homes(workload, base, workload.placement);
  std::vector<AugmentCell> cells(2 * levels * seeds);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cells[i].strategy = strategies[i / (levels * seeds)];
    cells[i].links = static_cast<int>((i / seeds) % levels);
    cells[i].seed = c.seeds[i % seeds];
  }
  parallel_for(cells.size(), c.jobs, [&](std::size_t i) {
    AugmentCell& cell = cells[i];
    const AugmentResult aug = augment(base, cell.links, cell.strategy, cell.seed);
    const Topology& t = aug.topology;
    cell.topology = t;
    for (const AugmentStep& s : aug.log.steps) {
      cell.added.push_back(s.link);
      cell.cross_added += s.crosses_memory_cut;
    }
    cell.structural_cut = memory_cut_capacity(t).capacity_gbps;
    cell.min_cut = memory_cut_capacity(t, CutMode::maxflow).capacity_gbps;

    const SimConfig sim = sim_for(c, cell.seed);
    const TrafficTrace trace = make_trace(c, workload, t, sim_duration(sim), cell.seed);
    const SimReport rep = simulate(t, trace, sim);
    std::vector<double> waits;
    for (const DirectedLink& d : memory_egress(t)) {
      waits.insert(waits.end(), rep.queue_delay_ns[d.id].begin(), rep.queue_delay_ns[d.id].end());
    }
    cell.queue = safe_summary(waits);
    cell.dlinks = directed_links(t);
    cell.utilization = rep.utilization;

    for (NodeId m : t.memory_nodes()) {
      for (NodeId k : t.compute_nodes()) cell.paths.emplace_back(m, k, path_multiplicity(t, m, k));
    }
    const RouteTable routes(t);
    for (const FlowEvent& ev : trace.events) {
      if (ev.destinations.size() != 1 || ev.destinations[0] == ev.source) continue;
      const NodeId dst = ev.destinations[0];
      const std::uint64_t count = routes.path_count(ev.source, dst);
      const std::uint64_t rank =
          sim.routing == RoutingPolicy::ecmp_split ? routes.ecmp_rank(ev.source, dst, ev.uid(), sim.seed) : 0;
      for (std::uint64_t k = 0; k < count; ++k) cell.flow_paths.try_emplace({ev.source, dst, count, k}, 0);
      ++cell.flow_paths[{ev.source, dst, count, rank}];
    }
  });

  CommandResult r;
  std::ostringstream cut_csv, queue_csv, util_csv, path_csv, flow_csv;
  cut_csv << "strategy,l,seed,structural_cut_gbps,min_cut_gbps,structural_gain_gbps,min_cut_gain_gbps,"
             "cross_links_added,added_links\n";
  queue_csv << "strategy,l,seed,mean_queue_delay_ns,p95_queue_delay_ns,packets\n";
  util_csv << "strategy,l,seed,link,from,to,window,utilization\n";
  path_csv << "strategy,l,seed,memory,compute,path_multiplicity\n";
  flow_csv << "strategy,l,seed,src,dst,minimal_paths,rank,flows\n";
  for (const AugmentCell& cell : cells) {
    const std::string key =
        std::string(strategy_name(cell.strategy)) + ',' + std::to_string(cell.links) + ',' + std::to_string(cell.seed);
    std::string added;
    for (std::size_t i = 0; i < cell.added.size(); ++i) {
      added += (i ? "|" : "") + std::to_string(cell.added[i].a) + "-" + std::to_string(cell.added[i].b);
    }
    cut_csv << key << ',' << num(cell.structural_cut) << ',' << num(cell.min_cut) << ','
            << num(cell.structural_cut - base_structural) << ',' << num(cell.min_cut - base_min) << ','
            << cell.cross_added << ',' << added << '\n';
    queue_csv << key << ',' << num(cell.queue.mean) << ',' << num(cell.queue.p95) << ',' << cell.queue.count << '\n';
    for (const DirectedLink& d : cell.dlinks) {
      const auto& series = cell.utilization[d.id];
      for (std::size_t w = 0; w < series.size(); ++w) {
        util_csv << key << ',' << d.id << ',' << d.from << ',' << d.to << ',' << w << ',' << num(series[w]) << '\n';
      }
    }
    for (auto [m, k, count] : cell.paths) path_csv << key << ',' << m << ',' << k << ',' << count << '\n';
    for (const auto& [k, flows] : cell.flow_paths) {
      flow_csv << key << ',' << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k) << ','
               << std::get<3>(k) << ',' << flows << '\n';
    }
  }
  r.files["cut.csv"] = cut_csv.str();
  r.files["queue.csv"] = queue_csv.str();
  r.files["utilization.csv"] = util_csv.str();
  r.files["path_multiplicity.csv"] = path_csv.str();
  r.files["flow_paths.csv"] = flow_csv.str();

  auto at = [&](int strategy, std::size_t level, std::size_t seed) -> const AugmentCell& {
    return cells[(static_cast<std::size_t>(strategy) * levels + level) * seeds + seed];
  };
  bool identical = true;
  for (std::size_t s = 0; s < seeds; ++s) {
    const AugmentCell& a = at(0, 0, s);
    const AugmentCell& b = at(1, 0, s);
    identical = identical && a.topology == b.topology && a.queue.mean == b.queue.mean && a.queue.p95 == b.queue.p95 &&
                a.utilization == b.utilization;
  }
  bool gain_ok = true, p95_ok = true;
  json levels_json = json::array();
  for (std::size_t l = 0; l < levels; ++l) {
    json row = {{"l", l}};
    double mean_gain[2], mean_min_gain[2], mean_p95[2];
    for (int k = 0; k < 2; ++k) {
      std::vector<double> g, mg, p;
      for (std::size_t s = 0; s < seeds; ++s) {
        g.push_back(at(k, l, s).structural_cut - base_structural);
        mg.push_back(at(k, l, s).min_cut - base_min);
        p.push_back(at(k, l, s).queue.p95);
      }
      mean_gain[k] = mean_of(g);
      mean_min_gain[k] = mean_of(mg);
      mean_p95[k] = mean_of(p);
      row[strategy_name(strategies[k])] = {{"mean_structural_gain_gbps", mean_gain[k]},
                                           {"mean_min_cut_gain_gbps", mean_min_gain[k]},
                                           {"mean_p95_queue_delay_ns", mean_p95[k]}};
    }
    if (l >= 1) gain_ok = gain_ok && mean_gain[0] >= mean_gain[1] && mean_min_gain[0] >= mean_min_gain[1];
    if (l == 2) p95_ok = mean_p95[0] <= mean_p95[1];
    levels_json.push_back(row);
  }
  r.summary = {{"base_structural_cut_gbps", base_structural}, {"base_min_cut_gbps", base_min}, {"levels", levels_json}};
  r.checks.emplace_back("l0_rows_identical", identical);
  r.checks.emplace_back("targeted_cut_gain_ge_random", gain_ok);
  if (levels > 2) r.checks.emplace_back("targeted_p95_le_random_at_l2", p95_ok);
  return r;
}

// ---------------------------------------------------------------------------
// baselines

namespace {

/// Coefficient of determination of the least-squares line through (x, y).
double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean_of(x), my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

}  // namespace

CommandResult run_baselines(const ExperimentConfig& c) {
  const std::size_t topologies = c.suite.size();
  const std::size_t seeds = c.seeds.size();
  std::vector<Topology> built(topologies);
  for (std::size_t i = 0; i < topologies; ++i) built[i] = build_baseline(c.suite[i].params, default_placement());

  InterferenceOptions io;
  io.sim = c.sim;
  std::vector<InterferenceReport> reports(topologies * seeds);
  std::vector<std::vector<std::vector<double>>> heatmaps(topologies);
  const std::size_t tasks = reports.size() + (c.heatmaps ? topologies : 0);
  parallel_for(tasks, c.jobs, [&](std::size_t i) {
    if (i < reports.size()) {
      const std::uint64_t seed = c.seeds[i % seeds];
      InterferenceOptions o = io;
      o.sim.seed = seed;
      reports[i] = evaluate_interference(built[i / seeds], c.workload, seed, o);
    } else {
      const std::size_t k = i - reports.size();
      InterferenceOptions o = io;
      o.sim.seed = c.seeds.front();
      heatmaps[k] = slowdown_matrix(built[k], c.workload, c.seeds.front(), o);
    }
  });

  CommandResult r;
  std::ostringstream csv;
  csv << "topology,links,seed,interference_score,max_slowdown,slowdowns,violations,cut_goodput_gbps,p99_latency_ns\n";
  std::vector<double> xs, ys;
  bool all_degraded = true;
  json per_topology = json::array();
  for (std::size_t i = 0; i < topologies; ++i) {
    const std::size_t experts = reports[i * seeds].slowdown.size();
    std::vector<double> is_values, expert_mean(experts, 0.0);
    std::vector<int> expert_count(experts, 0);
    for (std::size_t s = 0; s < seeds; ++s) {
      const InterferenceReport& rep = reports[i * seeds + s];
      double worst = 0.0;
      for (std::size_t k = 0; k < rep.slowdown.size(); ++k) {
        if (std::isnan(rep.slowdown[k])) continue;
        worst = std::max(worst, rep.slowdown[k]);
        expert_mean[k] += rep.slowdown[k];
        ++expert_count[k];
      }
      if (std::isfinite(rep.interference_score)) is_values.push_back(rep.interference_score);
      std::string violations;
      for (std::size_t v = 0; v < rep.violations.size(); ++v) {
        violations += (v ? "|" : "") + std::to_string(rep.violations[v]);
      }
      csv << c.suite[i].name << ',' << built[i].link_count() << ',' << c.seeds[s] << ','
          << num(rep.interference_score) << ',' << num(worst) << ',' << join_doubles(rep.slowdown) << ','
          << violations << ',' << num(rep.cut_goodput_gbps) << ',' << num(rep.latency.p99) << '\n';
    }
    double max_mean = 0.0;
    for (std::size_t k = 0; k < experts; ++k) {
      if (expert_count[k] > 0) max_mean = std::max(max_mean, expert_mean[k] / expert_count[k]);
    }
    const double mean_is = is_values.empty() ? std::numeric_limits<double>::quiet_NaN() : mean_of(is_values);
    if (std::isfinite(mean_is)) {
      xs.push_back(static_cast<double>(built[i].link_count()));
      ys.push_back(mean_is);
    }
    all_degraded = all_degraded && max_mean >= 2.0;
    per_topology.push_back({{"name", c.suite[i].name},
                            {"kind", std::string(to_string(c.suite[i].params.kind))},
                            {"links", built[i].link_count()},
                            {"mean_interference_score", mean_is},
                            {"max_mean_slowdown", max_mean}});
    if (c.heatmaps) {
      std::ostringstream h;
      const auto& m = heatmaps[i];
      for (std::size_t k = 0; k < m.size(); ++k) h << (k ? "," : "") << 'e' << k;
      h << '\n';
      for (const auto& row : m) {
        for (std::size_t k = 0; k < row.size(); ++k) h << (k ? "," : "") << num(row[k]);
        h << '\n';
      }
      r.files["heatmap_" + c.suite[i].name + ".csv"] = h.str();
    }
  }
  const double r2 = xs.size() >= 2 ? r_squared(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  r.files["baselines.csv"] = csv.str();
  r.summary = {{"rho_target", c.workload.rho_target},
               {"topologies", per_topology},
               {"r2_is_vs_links", r2},
               {"finite_points", xs.size()}};
  r.checks.emplace_back("slowdown_ge_2_every_topology", all_degraded);
  r.checks.emplace_back("r2_lt_0.5", r2 < 0.5);
  return r;
}

// ---------------------------------------------------------------------------
// synthesize

CommandResult run_synthesize(const ExperimentConfig& c) {
  EnvConfig env = c.env;
  env.initial = resolve_topology(c);
  const Topology mesh = default_canvas();
  const std::size_t seeds = c.seeds.size();
  std::vector<SynthesisRun> parl(seeds), rnd(seeds);
  std::vector<InterferenceReport> parl_eval(seeds), rand_eval(seeds);
  InterferenceReport mesh_eval;
  InterferenceOptions io;
  io.sim = c.sim;
  io.sim.seed = c.eval_seed;
  parallel_for(seeds + 1, c.jobs, [&](std::size_t i) {
    if (i == seeds) {
      mesh_eval = evaluate_interference(mesh, env.workload, c.eval_seed, io);
      return;
    }
    parl[i] = train(env, c.ppo, c.seeds[i]);
    rnd[i] = random_search(env, c.ppo.episodes, c.seeds[i]);
    parl_eval[i] = evaluate_interference(parl[i].best_topology, env.workload, c.eval_seed, io);
    rand_eval[i] = evaluate_interference(rnd[i].best_topology, env.workload, c.eval_seed, io);
  });

  std::vector<const SynthesisRun*> pool;
  for (const auto& run : parl) pool.push_back(&run);
  for (const auto& run : rnd) pool.push_back(&run);
  const std::vector<double> pooled = pooled_best_rewards(pool, env.weights, env.is_cap);

  CommandResult r;
  auto total_tokens = [](const InterferenceReport& rep) {
    return std::accumulate(rep.concurrent_tokens_per_s.begin(), rep.concurrent_tokens_per_s.end(), 0.0);
  };
  std::ostringstream star;
  star << "topology,seed,links,throughput_proxy,latency_proxy_ns,power_proxy,interference_proxy,"
          "sim_interference_score,sim_tokens_per_s,sim_p99_latency_ns\n";
  auto star_row = [&](const std::string& name, std::uint64_t seed, const Topology& t, const InterferenceReport& rep) {
    const RawMetrics raw = proxy_metrics(t, env);
    star << name << ',' << seed << ',' << t.link_count() << ',' << num(raw.throughput) << ',' << num(raw.latency)
         << ',' << num(raw.power) << ',' << num(raw.interference) << ',' << num(rep.interference_score) << ','
         << num(total_tokens(rep)) << ',' << num(rep.latency.p99) << '\n';
  };
  star_row("mesh", c.eval_seed, mesh, mesh_eval);

  bool round_trip = true, masked_zero = true;
  std::vector<double> parl_pooled, rand_pooled, parl_is;
  json runs = json::array();
  for (std::size_t i = 0; i < seeds; ++i) {
    const std::uint64_t seed = c.seeds[i];
    const std::string tag = "s" + std::to_string(seed);
    const SynthesisRun& run = parl[i];
    const std::string text = to_text(run.best_topology);
    round_trip = round_trip && parse_topology(text) == run.best_topology;
    masked_zero = masked_zero && run.masked_probability_mass == 0.0;
    r.files["best_" + tag + ".noi"] = text;
    r.files["diff_" + tag + ".dot"] = diff_to_dot(run.best_topology, mesh, "parl_vs_mesh");
    r.files["random_best_" + tag + ".noi"] = to_text(rnd[i].best_topology);

    std::ostringstream curve;
    curve << "episode,total_reward,best_reward,policy_loss,value_loss,entropy\n";
    for (const EpisodeSummary& e : run.episodes) {
      curve << e.episode << ',' << num(e.total_reward) << ',' << num(e.best_reward) << ',' << num(e.policy_loss)
            << ',' << num(e.value_loss) << ',' << num(e.entropy) << '\n';
    }
    r.files["training_" + tag + ".csv"] = curve.str();

    std::vector<std::size_t> actions;
    for (const Evaluation& ev : run.log) actions.push_back(ev.action);
    const json log = {{"seed", seed},
                      {"episodes", run.episodes.size()},
                      {"evaluations", run.log.size()},
                      {"best_reward", run.best_reward},
                      {"best_raw",
                       {{"throughput", run.best_raw.throughput},
                        {"interference", run.best_raw.interference},
                        {"latency", run.best_raw.latency},
                        {"power", run.best_raw.power}}},
                      {"masked_probability_mass", run.masked_probability_mass},
                      {"value_losses", run.value_losses},
                      {"actions", actions}};
    r.files["run_" + tag + ".json"] = log.dump(1) + "\n";

    star_row("parl", seed, run.best_topology, parl_eval[i]);
    star_row("random", seed, rnd[i].best_topology, rand_eval[i]);
    parl_pooled.push_back(pooled[i]);
    rand_pooled.push_back(pooled[seeds + i]);
    parl_is.push_back(parl_eval[i].interference_score);
    runs.push_back({{"seed", seed},
                    {"parl_pooled_best_reward", pooled[i]},
                    {"random_pooled_best_reward", pooled[seeds + i]},
                    {"parl_sim_interference_score", parl_eval[i].interference_score},
                    {"random_sim_interference_score", rand_eval[i].interference_score},
                    {"parl_links", run.best_topology.link_count()}});
  }
  r.files["starplot.csv"] = star.str();
  const double parl_median = median_of(parl_pooled);
  const double rand_median = median_of(rand_pooled);
  const double is_median = median_of(parl_is);
  r.summary = {{"episodes", c.ppo.episodes},
               {"runs", runs},
               {"parl_median_pooled_reward", parl_median},
               {"random_median_pooled_reward", rand_median},
               {"parl_median_sim_interference_score", is_median},
               {"mesh_sim_interference_score", mesh_eval.interference_score}};
  r.checks.emplace_back("parl_median_ge_random", parl_median >= rand_median);
  r.checks.emplace_back("parl_is_le_mesh", is_median <= mesh_eval.interference_score);
  r.checks.emplace_back("parl_is_reduction_ge_20pct", is_median <= 0.8 * mesh_eval.interference_score);
  r.checks.emplace_back("topology_round_trip", round_trip);
  r.checks.emplace_back("masked_probability_zero", masked_zero);
  return r;
}

// ---------------------------------------------------------------------------
// simulate / trace-gen

CommandResult run_simulate(const ExperimentConfig& c) {
  const Topology t = resolve_topology(c);
  const std::size_t seeds = c.seeds.size();
  std::vector<SimReport> reports(seeds);
  parallel_for(seeds, c.jobs, [&](std::size_t i) {
    const SimConfig sim = sim_for(c, c.seeds[i]);
    reports[i] = simulate(t, make_trace(c, c.workload, t, sim_duration(sim), c.seeds[i]), sim);
  });
  CommandResult r;
  json runs = json::array();
  bool conserved = true;
  for (std::size_t i = 0; i < seeds; ++i) {
    const SimReport& rep = reports[i];
    std::ostringstream csv;
    csv << "link,from,to,utilization,packets,mean_wait_ns,p95_wait_ns,p99_wait_ns\n";
    for (const DirectedLink& d : directed_links(t)) {
      const LatencySummary q = safe_summary(rep.queue_delay_ns[d.id]);
      csv << d.id << ',' << d.from << ',' << d.to << ',' << num(rep.link_utilization[d.id]) << ',' << q.count << ','
          << num(q.mean) << ',' << num(q.p95) << ',' << num(q.p99) << '\n';
    }
    r.files["links_s" + std::to_string(c.seeds[i]) + ".csv"] = csv.str();
    conserved = conserved && rep.delivered_bytes <= rep.injected_bytes;
    runs.push_back({{"seed", c.seeds[i]},
                    {"expert_tokens_per_s", rep.expert_tokens_per_s},
                    {"total_tokens_per_s", rep.total_tokens_per_s()},
                    {"latency_ns", latency_json(rep.latency)},
                    {"cut_goodput_gbps", rep.cut_goodput_gbps},
                    {"injected_bytes", rep.injected_bytes},
                    {"delivered_bytes", rep.delivered_bytes},
                    {"packets_injected", rep.packets_injected},
                    {"events", rep.events}});
  }
  r.summary = {{"links", t.link_count()}, {"runs", runs}};
  r.checks.emplace_back("delivered_le_injected", conserved);
  return r;
}

CommandResult run_trace_gen(const ExperimentConfig& c) {
  const Topology t = resolve_topology(c);
  const std::size_t seeds = c.seeds.size();
  std::vector<TrafficTrace> traces(seeds);
  parallel_for(seeds, c.jobs, [&](std::size_t i) {
    traces[i] = make_trace(c, c.workload, t, c.duration_ns, c.seeds[i]);
  });
  CommandResult r;
  json rows = json::array();
  for (std::size_t i = 0; i < seeds; ++i) {
    r.files["trace_s" + std::to_string(c.seeds[i]) + ".csv"] = trace_to_csv(traces[i]);
    const TraceStats s = trace_stats(traces[i], t, c.window_ns);
    rows.push_back({{"seed", c.seeds[i]},
                    {"events", traces[i].events.size()},
                    {"duration_ns", traces[i].duration_ns},
                    {"arrival_scv", s.arrival_scv},
                    {"ingress_cv", s.ingress_cv},
                    {"mean_injection_gbps", s.mean_injection_gbps}});
  }
  r.summary = {{"traces", rows}};
  return r;
}

CommandResult run_command(const ExperimentConfig& config) {
  switch (config.command) {
    case Command::claim_a: return run_claim_a(config);
    case Command::claim_b: return run_claim_b(config);
    case Command::claim_c: return run_claim_c(config);
    case Command::baselines: return run_baselines(config);
    case Command::synthesize: return run_synthesize(config);
    case Command::simulate: return run_simulate(config);
    case Command::trace_gen: return run_trace_gen(config);
  }
  throw config_error("unknown command");
}

// ---------------------------------------------------------------------------
// Output

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string summary_text(const CommandResult& result) {
  json s = result.summary;
  json checks = json::object();
  for (const auto& [name, ok] : result.checks) checks[name] = ok;
  s["checks"] = checks;
  return s.dump(2) + "\n";
}

}  // namespace

std::string make_manifest(const ExperimentConfig& config, const CommandResult& result) {
  json outputs = json::array();
  auto add = [&](const std::string& path, const std::string& bytes) {
    outputs.push_back({{"path", path}, {"bytes", bytes.size()}, {"fnv1a", fnv1a_hex(bytes)}});
  };
  for (const auto& [path, bytes] : result.files) add(path, bytes);
  add("summary.json", summary_text(result));
  const json manifest = {{"tool", "noi"},
                         {"version", std::string(kToolVersion)},
                         {"command", std::string(to_string(config.command))},
                         {"config", config.provenance},
                         {"config_hash", fnv1a_hex(config.provenance.dump())},
                         {"seeds", config.seeds},
                         {"outputs", outputs}};
  return manifest.dump(2) + "\n";
}

void write_outputs(const ExperimentConfig& config, const CommandResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw config_error("cannot create " + config.out_dir + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& bytes) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw config_error("cannot write " + (dir / name).string());
    out << bytes;
  };
  for (const auto& [path, bytes] : result.files) write(path, bytes);
  write("summary.json", summary_text(result));
  write("manifest.json", make_manifest(config, result));
}

}  // namespace noi::cli
