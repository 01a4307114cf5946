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
#include <string>
#include <string_view>
#include <vector>

#include "noi/topology.hpp"

namespace noi {

enum class BaselineKind { mesh2d, torus2d, ring, hypercube, kary_ncube, cmesh, random_regular };

std::string_view to_string(BaselineKind kind);
BaselineKind parse_baseline_kind(std::string_view text);

struct BaselineParams {
  BaselineKind kind = BaselineKind::mesh2d;
  int rows = 4;            // mesh2d, torus2d, cmesh
  int cols = 4;
  int radix = 4;           // kary_ncube: k
  int dimensions = 2;      // kary_ncube: n; hypercube: n
  int nodes = 16;          // ring, random_regular
  int degree = 3;          // random_regular
  int cluster = 2;         // cmesh block side
  std::uint64_t seed = 1;  // random_regular

  std::size_t node_count() const;
};

/// Per-node chiplet kind and role. Port caps come from the chiplet catalog.
struct PlacementSlot {
  ChipletKind kind = ChipletKind::XCD;
  Role role = Role::compute;
};

using Placement = std::vector<PlacementSlot>;

/// 16-slot MI300X-like assignment: fused HBM+IOD memory nodes at the four
/// corners of a 4x4 grid (ids 0, 3, 12, 15), eight XCDs and four CCD_ai.
Placement default_placement();

/// Placement helper for arbitrary sizes: listed ids become memory IODs, the
/// rest XCD compute nodes.
Placement simple_placement(std::size_t nodes, const std::vector<NodeId>& memory_ids);

/// Builds a baseline family instance; throws PlacementSizeMismatch or
/// DegreeExceedsPortCap.
Topology build_baseline(const BaselineParams& params, const Placement& placement);

/// The default canvas: 4x4 mesh over default_placement(). Every memory node
/// starts with two cross-cut links.
Topology default_canvas();

/// Sparse starting point for synthesis: the default canvas' cross-cut links
/// plus a spanning tree over the compute nodes.
Topology sparse_backbone();

}  // namespace noi
