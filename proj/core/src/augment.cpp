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

#include "noi/augment.hpp"

#include "noi/error.hpp"
#include "noi/graph.hpp"
#include "noi/rng.hpp"

namespace noi {

std::vector<NodePair> legal_additions(const Topology& topology) {
  std::vector<NodePair> out;
  for (NodeId a = 0; a < topology.node_count(); ++a) {
    for (NodeId b = a + 1; b < topology.node_count(); ++b) {
      if (can_add_link(topology, a, b)) out.push_back({a, b});
    }
  }
  return out;
}

namespace {

AugmentStep describe(const Topology& topology, const Link& link) {
  AugmentStep step;
  step.link = link;
  step.crosses_memory_cut = topology.is_memory(link.a) != topology.is_memory(link.b);
  step.structural_cut_gbps = memory_cut_capacity(topology, CutMode::structural).capacity_gbps;
  step.min_cut_gbps = memory_cut_capacity(topology, CutMode::maxflow).capacity_gbps;
  for (NodeId m : topology.memory_nodes()) {
    for (NodeId c : topology.compute_nodes()) {
      step.path_multiplicities.push_back(path_multiplicity(topology, m, c));
    }
  }
  return step;
}

}  // namespace

AugmentResult augment(const Topology& topology, int count, AugmentStrategy strategy,
                      std::uint64_t seed) {
  if (count < 0) throw Error(ErrorCode::InvalidArgument, "augmentation count must be >= 0");
  AugmentResult result{topology, {}};
  Rng rng(substream(seed, "augment"));
  const std::vector<NodeId> memory = topology.memory_nodes();
  const std::vector<NodeId> compute = topology.compute_nodes();

  for (int step = 0; step < count; ++step) {
    const Topology& current = result.topology;
    std::vector<NodePair> legal = legal_additions(current);
    NodePair chosen{0, 0};
    bool found = false;

    if (strategy == AugmentStrategy::targeted) {
      const double base = max_flow(current, memory, compute).value;
      double best_gain = -1.0;
      for (auto [a, b] : legal) {
        if (current.is_memory(a) == current.is_memory(b)) continue;
        const double gain = max_flow(current.with_link(a, b), memory, compute).value - base;
        // legal is in ascending (a, b) order, so strict improvement keeps the lowest pair on ties.
        if (gain > best_gain + 1e-9) {
          best_gain = gain;
          chosen = {a, b};
          found = true;
        }
      }
    } else if (!legal.empty()) {
      std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
      chosen = legal[pick(rng)];
      found = true;
    }

    if (!found) {
      throw Error(ErrorCode::InfeasibleAugmentation,
                  "no legal link left after " + std::to_string(step) + " additions");
    }
    result.topology = current.with_link(chosen.first, chosen.second, kDefaultLinkGbps);
    result.log.steps.push_back(
        describe(result.topology, Link{chosen.first, chosen.second, kDefaultLinkGbps}));
  }
  return result;
}

}  // namespace noi
