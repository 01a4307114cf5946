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


#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "noi/baselines.hpp"
#include "noi/experiments.hpp"
#include "noi/graph.hpp"
#include "noi/interference.hpp"
#include "noi/queueing.hpp"
#include "noi/rng.hpp"
#include "noi/routing.hpp"
#include "noi/simulator.hpp"
#include "noi/traffic.hpp"
#include "support/oracles.hpp"

using namespace noi;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

cli::CommandResult run(cli::Command command, const json& document) {
  return cli::run_command(cli::make_config(command, document));
}

double scv(const std::vector<double>& stamps) {
  double sum = 0.0, sq = 0.0;
  double prev = 0.0;
  for (double t : stamps) {
    const double gap = t - prev;
    prev = t;
    sum += gap;
    sq += gap * gap;
  }
  const double n = static_cast<double>(stamps.size());
  const double mean = sum / n;
  return (sq / n - mean * mean) / (mean * mean);
}

Outcome cut_arithmetic() {
  const double cut = memory_cut_capacity(default_canvas()).capacity_gbps;
  const double nominal = kNominalLinkGbps * kProtocolEfficiency;
  const bool ok = cut == 297.6 && kDefaultLinkGbps == 37.2 && std::round(nominal * 10.0) / 10.0 == 37.2;
  return {ok, fmt("cut %.17g GB/s, link %.17g GB/s, 38.4 x 0.97 = %.17g", cut, kDefaultLinkGbps, nominal)};
}

Outcome weight_footprint() {
  const WorkloadSpec w;
  const bool ok = w.w_ffn_bytes() == 268435456ULL && w.weight_chunk_count() == 1024ULL;
  return {ok, fmt("W_FFN %llu bytes, %llu chunks", static_cast<unsigned long long>(w.w_ffn_bytes()),
                  static_cast<unsigned long long>(w.weight_chunk_count()))};
}

Outcome routing_variance() {
  const ExpertPhase uniform{std::vector<double>(8, 0.125)};
  const int batches = 10000, b = 1024;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < batches; ++i) {
    const auto loads =
        route_tokens(uniform, b, 2, 0.0, substream(2026, "variance", static_cast<std::uint64_t>(i))).loads;
    sum += loads[0];
    sq += static_cast<double>(loads[0]) * loads[0];
  }
  const double mean = sum / batches;
  const double var = sq / batches - mean * mean;
  const double expected = b * 0.25 * 0.75;
  return {std::abs(var - expected) <= 0.10 * expected, fmt("Var[N_e] %.2f vs B p (1-p) %.2f", var, expected)};
}

Outcome burstiness() {
  const auto stamps = arrival_process(0.01, 1000000, 2026);
  const double ca2 = scv(stamps);
  return {ca2 >= 1.22 && ca2 <= 1.52, fmt("C_a^2 %.4f over %zu gaps", ca2, stamps.size())};
}

Outcome kingman_calibration() {
  const Topology t({{0, ChipletKind::IOD, Role::memory, 8}, {1, ChipletKind::XCD, Role::compute, 4}},
                   {{0, 1, kDefaultLinkGbps}});
  const double mean_bytes = 40000.0;
  const double service = mean_bytes / kDefaultLinkGbps;
  const int replications = 10;
  const std::uint64_t flows = 100000;
  bool ok = true;
  std::string detail;
  for (double rho : {0.3, 0.6, 0.8}) {
    double wait_sum = 0.0;
    double count = 0.0;
    for (int rep = 0; rep < replications; ++rep) {
      Rng rng(substream(2026, "mm1", static_cast<std::uint64_t>(rho * 1000) * 100 + rep));
      std::exponential_distribution<double> gap(rho / service);
      std::exponential_distribution<double> size(1.0 / mean_bytes);
      TrafficTrace trace;
      trace.experts = 1;
      double now = 0.0;
      for (std::uint64_t i = 0; i < flows; ++i) {
        now += gap(rng);
        const auto bytes = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(size(rng))));
        trace.events.push_back({now, 1, {0}, bytes, FlowClass::activation, 0, i});
      }
      trace.duration_ns = now;
      SimConfig cfg;
      cfg.packet_bytes = 1e12;
      cfg.hbm_gbps = 0.0;
      cfg.warmup_ns = 0.05 * now;
      cfg.measure_ns = 0.9 * now;
      cfg.util_window_ns = cfg.measure_ns;
      const SimReport r = simulate(t, trace, cfg);
      for (double x : r.queue_delay_ns[directed_link(t, 1, 0)]) wait_sum += x;
      count += static_cast<double>(r.queue_delay_ns[directed_link(t, 1, 0)].size());
    }
    const double measured = wait_sum / count;
    const double expected = kingman_wait(rho, 1.0, 1.0, 1.0 / service);
    ok = ok && std::abs(measured - expected) <= 0.10 * expected;
    detail += fmt("rho %.1f: %.1f vs %.1f ns; ", rho, measured, expected);
  }
  return {ok, detail + fmt("%d x %llu flows each", replications, static_cast<unsigned long long>(flows))};
}

Outcome claim_b() {
  const auto r = run(cli::Command::claim_b, {{"rho_grid", {0.3, 0.45, 0.6, 0.75, 0.9, 1.2}}});
  const double ratio = r.summary["seeds"][0]["p99_ratio_0.9_over_0.45"].get<double>();
  const bool ok = r.check("p99_ratio_gt_3") && r.check("cut_goodput_le_roofline");
  return {ok, fmt("p99(0.9)/p99(0.45) = %.2f, goodput <= %.1f GB/s at rho up to 1.2: %s", ratio,
                  r.summary["roofline_gbps"].get<double>(), r.check("cut_goodput_le_roofline") ? "yes" : "no")};
}

Outcome claim_c() {
  const auto r = run(cli::Command::claim_c, json::object());
  const json& l2 = r.summary["levels"][2];
  const bool ok = r.check("targeted_cut_gain_ge_random") && r.check("targeted_p95_le_random_at_l2");
  return {ok, fmt("20 seeds; gain dominance %s; l=2 mean p95 targeted %.0f ns vs random %.0f ns",
                  r.check("targeted_cut_gain_ge_random") ? "yes" : "no",
                  l2["targeted"]["mean_p95_queue_delay_ns"].get<double>(),
                  l2["random"]["mean_p95_queue_delay_ns"].get<double>())};
}

Outcome interference_protocol() {
  WorkloadSpec single;
  single.active_experts = 1;
  InterferenceOptions brief;
  brief.sim.warmup_ns = 20000.0;
  brief.sim.measure_ns = 200000.0;
  const double k1 = evaluate_interference(default_canvas(), single, 1, brief).interference_score;

  std::vector<Node> island_nodes = {{0, ChipletKind::IOD, Role::memory, 8},
                                    {1, ChipletKind::XCD, Role::compute, 4},
                                    {2, ChipletKind::IOD, Role::memory, 8},
                                    {3, ChipletKind::XCD, Role::compute, 4}};
  const Topology islands(island_nodes, {{0, 1, kDefaultLinkGbps}, {1, 3, kDefaultLinkGbps}, {2, 3, kDefaultLinkGbps}});
  WorkloadSpec pair;
  pair.active_experts = 2;
  pair.placement = {{1}, {3}};
  pair.multicast_probs = {1.0, 0.0, 0.0, 0.0};
  pair.rho_target = 0.8;
  double island_is = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    island_is = std::max(island_is, evaluate_interference(islands, pair, seed, brief).interference_score);
  }

  std::vector<Node> shared_nodes = {{0, ChipletKind::IOD, Role::memory, 8},
                                    {1, ChipletKind::XCD, Role::compute, 4},
                                    {2, ChipletKind::XCD, Role::compute, 4},
                                    {3, ChipletKind::XCD, Role::compute, 4}};
  const Topology shared(shared_nodes, {{0, 1, kDefaultLinkGbps}, {1, 2, kDefaultLinkGbps}, {1, 3, kDefaultLinkGbps}});
  WorkloadSpec equal;
  equal.num_experts = 2;
  equal.top_k = 2;
  equal.active_experts = 2;
  equal.placement = {{2}, {3}};
  equal.rho_target = 2.2;
  InterferenceOptions full;
  full.sim.measure_ns = 3e6;
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto m = slowdown_matrix(shared, equal, seed, full);
    sum += m[0][1] + m[1][0];
  }
  const double slowdown = sum / 10.0;
  const bool ok = k1 == 1.0 && island_is <= 1.02 && std::abs(slowdown - 2.0) <= 0.15;
  return {ok, fmt("K=1 IS %.17g; islands max IS %.4f; shared bottleneck slowdown %.3f", k1, island_is, slowdown)};
}

cli::CommandResult& baseline_suite() {
  static cli::CommandResult result = run(cli::Command::baselines, {{"heatmaps", false}});
  return result;
}

Outcome baseline_direction() {
  const auto& r = baseline_suite();
  int degraded = 0;
  std::string detail;
  for (const json& t : r.summary["topologies"]) {
    const std::string kind = t["kind"].get<std::string>();
    if (kind != "mesh2d" && kind != "torus2d" && kind != "ring" && kind != "hypercube") continue;
    const double worst = t["max_mean_slowdown"].get<double>();
    degraded += worst >= 2.0;
    detail += fmt("%s %.2f; ", kind.c_str(), worst);
  }
  return {degraded >= 3, detail + fmt("%d of 4 k-ary n-cubes with an expert slowed >= 2x at rho 0.85", degraded)};
}

Outcome link_count_decorrelation() {
  const auto& r = baseline_suite();
  const double r2 = r.summary["r2_is_vs_links"].get<double>();
  return {r2 < 0.5, fmt("R^2 %.4f over %zu topologies", r2, r.summary["finite_points"].get<std::size_t>())};
}

Outcome synthesis_efficacy() {
  const auto r = run(cli::Command::synthesize, json::object());
  const bool ok = r.check("parl_median_ge_random") && r.check("parl_is_reduction_ge_20pct");
  return {ok, fmt("median pooled reward PARL %.4f vs random %.4f; median IS PARL %.3f vs mesh %.3f",
                  r.summary["parl_median_pooled_reward"].get<double>(),
                  r.summary["random_median_pooled_reward"].get<double>(),
                  r.summary["parl_median_sim_interference_score"].get<double>(),
                  r.summary["mesh_sim_interference_score"].get<double>())};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "noi_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::pair<cli::Command, json>> cases = {
      {cli::Command::claim_a, {{"seeds", {1, 2}}}},
      {cli::Command::claim_b, {{"seeds", {3}}}},
      {cli::Command::claim_c, {{"seeds", {1, 2}}, {"max_links", 2}}},
      {cli::Command::baselines,
       {{"suite", {{{"kind", "mesh2d"}}, {{"kind", "ring"}}}}, {"sim", {{"measure_ns", 200000.0}}}}},
      {cli::Command::synthesize, {{"seeds", {4}}, {"ppo", {{"episodes", 8}}}}},
      {cli::Command::simulate, {{"seeds", {5}}, {"topology", "torus2d"}}},
      {cli::Command::trace_gen, {{"seeds", {6}}, {"duration_ns", 200000.0}}}};
  int identical = 0;
  std::string failed;
  for (const auto& [command, doc] : cases) {
    std::vector<fs::path> dirs;
    for (int jobs : {1, 2}) {
      json d = doc;
      d["jobs"] = jobs;
      d["out"] = (root / (std::string(cli::to_string(command)) + "_" + std::to_string(jobs))).string();
      const auto config = cli::make_config(command, d);
      cli::write_outputs(config, cli::run_command(config));
      dirs.emplace_back(config.out_dir);
    }
    bool same = true;
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const fs::path other = dirs[1] / entry.path().filename();
      same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
      ++files;
    }
    same = same && files == static_cast<std::size_t>(std::distance(fs::directory_iterator(dirs[1]), {}));
    if (same) {
      ++identical;
    } else {
      failed += std::string(" ") + std::string(cli::to_string(command));
    }
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(cases.size()),
          fmt("%d of %zu commands byte-identical across two runs (jobs 1 vs 2)%s", identical, cases.size(),
              failed.empty() ? "" : (";" + failed).c_str())};
}

Outcome brute_force_oracles() {
  const auto corpus = oracle::random_corpus(200, 2026);
  int cut_ok = 0, path_ok = 0;
  for (const Topology& t : corpus) {
    const auto memory = t.memory_nodes();
    const double flow = memory_cut_capacity(t, memory, CutMode::maxflow).capacity_gbps;
    cut_ok += std::abs(flow - oracle::brute_force_min_cut(t, memory, t.compute_nodes())) <= 1e-9;
    bool paths = true;
    for (NodeId s = 0; s < t.node_count(); ++s) {
      for (NodeId d = 0; d < t.node_count(); ++d) {
        if (s != d) paths = paths && path_multiplicity(t, s, d) == oracle::brute_force_shortest_paths(t, s, d);
      }
    }
    path_ok += paths;
  }
  const int n = static_cast<int>(corpus.size());
  return {cut_ok == n && path_ok == n, fmt("min cut %d/%d, path multiplicity %d/%d graphs", cut_ok, n, path_ok, n)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"cut arithmetic", cut_arithmetic},
      {"weight footprint", weight_footprint},
      {"routing variance", routing_variance},
      {"burstiness", burstiness},
      {"Kingman calibration", kingman_calibration},
      {"Claim B tail blow-up", claim_b},
      {"Claim C dominance", claim_c},
      {"interference protocol", interference_protocol},
      {"baseline degradation direction", baseline_direction},
      {"link-count decorrelation", link_count_decorrelation},
      {"synthesis efficacy", synthesis_efficacy},
      {"determinism", determinism},
      {"brute-force oracles", brute_force_oracles},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %2zu %-32s %s  %s (%.1f s)\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
