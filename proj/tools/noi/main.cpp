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


#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "noi/error.hpp"
#include "noi/experiments.hpp"

namespace {

std::string describe(noi::cli::Command command) {
  switch (command) {
    case noi::cli::Command::claim_a:
      return "Ingress burstiness of MoE traffic vs a constant-rate trace";
    case noi::cli::Command::claim_b:
      return "p99 queueing delay and cut goodput across a load sweep";
    case noi::cli::Command::claim_c:
      return "Targeted vs random cross-cut link additions";
    case noi::cli::Command::baselines:
      return "Interference heatmaps and scores for baseline topologies";
    case noi::cli::Command::synthesize:
      return "PPO topology synthesis against random search";
    case noi::cli::Command::simulate:
      return "Simulate one topology under the MoE workload";
    case noi::cli::Command::trace_gen:
      return "Generate and write a traffic trace";
  }
  return {};
}

struct Flags {
  std::string config;
  long long seed = -1;
  std::string out;
  int jobs = 0;
};

int run(noi::cli::Command command, const Flags& flags) {
  using nlohmann::json;
  json document = flags.config.empty() ? json::object() : noi::cli::load_config_file(flags.config);
  if (!document.is_object()) throw noi::Error(noi::ErrorCode::ConfigError, "config must be a JSON object");
  if (flags.seed >= 0) document["seeds"] = json::array({flags.seed});
  if (!flags.out.empty()) document["out"] = flags.out;
  if (flags.jobs > 0) document["jobs"] = flags.jobs;
  const noi::cli::ExperimentConfig config = noi::cli::make_config(command, document);
  const noi::cli::CommandResult result = noi::cli::run_command(config);
  noi::cli::write_outputs(config, result);
  std::cout << noi::cli::to_string(command) << ": wrote " << result.files.size() + 2 << " files to "
            << config.out_dir << '\n';
  for (const auto& [name, ok] : result.checks) {
    std::cout << "  check " << name << ": " << (ok ? "PASS" : "FAIL") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noi: Network-on-Interposer experiment runner"};
  app.set_version_flag("--version", std::string(noi::cli::kToolVersion));
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<CLI::App*, noi::cli::Command>> subcommands;
  for (noi::cli::Command command : noi::cli::all_commands()) {
    CLI::App* sub = app.add_subcommand(std::string(noi::cli::to_string(command)), describe(command));
    sub->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Single master seed (overrides the config's seeds)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
    subcommands.emplace_back(sub, command);
  }
  CLI11_PARSE(app, argc, argv);
  try {
    for (auto [sub, command] : subcommands) {
      if (sub->parsed()) return run(command, flags);
    }
  } catch (const noi::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
