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
#include <vector>

#include "noi/topology.hpp"

namespace noi {

enum class AugmentStrategy { targeted, random };

struct AugmentStep {
  Link link;
  bool crosses_memory_cut = false;
  double structural_cut_gbps = 0.0;
  double min_cut_gbps = 0.0;
  /// path_multiplicity(memory, compute) for every memory x compute pair,
  /// memory-major in ascending id order.
  std::vector<std::uint64_t> path_multiplicities;
};

struct AugmentLog {
  std::vector<AugmentStep> steps;
};

struct AugmentResult {
  Topology topology;
  AugmentLog log;
};

/// All absent links that can be added without breaching a port cap, in
/// ascending (a, b) order.
std::vector<NodePair> legal_additions(const Topology& topology);

/// Adds `count` links. Targeted: greedily picks the memory-cut link with the
/// largest min-cut gain, ties to the lowest (a, b). Random: uniform over all
/// legal absent links. Throws InfeasibleAugmentation when nothing is legal.
AugmentResult augment(const Topology& topology, int count, AugmentStrategy strategy,
                      std::uint64_t seed);

}  // namespace noi
