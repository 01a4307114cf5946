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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "noi/baselines.hpp"
#include "noi/simulator.hpp"
#include "noi/synthesis.hpp"
#include "noi/traffic.hpp"

namespace noi::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Command { claim_a, claim_b, claim_c, baselines, synthesize, simulate, trace_gen };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);
const std::vector<Command>& all_commands();

struct BaselineEntry {
  std::string name;
  BaselineParams params;
};

/// Effective settings of one experiment. Every field has a default per
/// command; the JSON document and CLI flags override them.
struct ExperimentConfig {
  Command command = Command::simulate;
  /// Baseline kind name, "canvas" or "backbone"; ignored when topology_file is set.
  std::string topology = "canvas";
  std::string topology_file;
  std::string trace_file;
  WorkloadSpec workload;
  SimConfig sim;
  std::vector<std::uint64_t> seeds = {1};
  std::string out_dir = "out";
  int jobs = 1;

  double duration_ns = 1.1e6;    // claim-a, trace-gen
  bool constant_rate = false;    // claim-a, trace-gen
  double window_ns = 1000.0;     // claim-a ingress windows
  std::vector<double> rho_grid;  // claim-b
  int max_links = 4;             // claim-c
  std::vector<BaselineEntry> suite;  // baselines
  bool heatmaps = true;              // baselines
  EnvConfig env;                     // synthesize
  PpoConfig ppo;                     // synthesize
  std::uint64_t eval_seed = 11;      // synthesize

  /// Input document with output-only keys removed; hashed into the manifest.
  nlohmann::json provenance;
};

/// Command defaults overlaid with `document`. Unknown keys, malformed values
/// and missing referenced files raise ConfigError.
ExperimentConfig make_config(Command command, const nlohmann::json& document);
nlohmann::json load_config_file(const std::string& path);

/// Files produced by a command, keyed by relative path, plus a structured
/// summary and the named checks the command asserts.
struct CommandResult {
  std::map<std::string, std::string> files;
  nlohmann::json summary;
  std::vector<std::pair<std::string, bool>> checks;
  bool check(std::string_view name) const;
};

CommandResult run_claim_a(const ExperimentConfig& config);
CommandResult run_claim_b(const ExperimentConfig& config);
CommandResult run_claim_c(const ExperimentConfig& config);
CommandResult run_baselines(const ExperimentConfig& config);
CommandResult run_synthesize(const ExperimentConfig& config);
CommandResult run_simulate(const ExperimentConfig& config);
CommandResult run_trace_gen(const ExperimentConfig& config);
CommandResult run_command(const ExperimentConfig& config);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// manifest.json content: command, version, config hash, seeds, output hashes.
std::string make_manifest(const ExperimentConfig& config, const CommandResult& result);

/// Writes every result file, summary.json and manifest.json under out_dir.
void write_outputs(const ExperimentConfig& config, const CommandResult& result);

/// Topology named by the config (file or built-in).
Topology resolve_topology(const ExperimentConfig& config);

}  // namespace noi::cli
