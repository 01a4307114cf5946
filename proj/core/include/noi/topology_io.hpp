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

#include <iosfwd>
#include <string>

#include "noi/topology.hpp"

namespace noi {

/// `noi v1` text format:
///   noi v1
///   node <id> <kind> <role> <port_cap>
///   link <id_a> <id_b> <bandwidth_gbps>
void write_topology(std::ostream& out, const Topology& topology);
std::string to_text(const Topology& topology);
Topology read_topology(std::istream& in);
Topology parse_topology(const std::string& text);

Topology load_topology(const std::string& path);
void save_topology(const std::string& path, const Topology& topology);

/// Plain DOT graph (memory nodes boxed, cut links bold).
std::string to_dot(const Topology& topology, const std::string& name = "noi");

enum class EdgeCategory { common, candidate_only, reference_only };

/// Edge-set comparison of a candidate against a reference over the same
/// nodes: common links blue, candidate-only green, reference-only red.
struct TopologyDiff {
  std::vector<NodePair> common;
  std::vector<NodePair> candidate_only;
  std::vector<NodePair> reference_only;
};

TopologyDiff diff_topologies(const Topology& candidate, const Topology& reference);
std::string diff_to_dot(const Topology& candidate, const Topology& reference,
                        const std::string& name = "noi_diff");

}  // namespace noi
