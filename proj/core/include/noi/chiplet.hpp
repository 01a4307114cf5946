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

#include <array>
#include <optional>
#include <string_view>

namespace noi {

enum class ChipletKind { IOD, IOD_mirror, HBM3, XCD, CCD_perf, CCD_dense, CCD_ai };

inline constexpr std::array<ChipletKind, 7> kAllChipletKinds = {
    ChipletKind::IOD,      ChipletKind::IOD_mirror, ChipletKind::HBM3,  ChipletKind::XCD,
    ChipletKind::CCD_perf, ChipletKind::CCD_dense,  ChipletKind::CCD_ai};

struct ChipletSpec {
  ChipletKind kind;
  double width_mm;
  double height_mm;
  bool relay_capable;
  int phys_per_edge;
  int process_node_nm;
};

/// Catalog entry for `kind` (MI300X-class chiplet library).
const ChipletSpec& chiplet_spec(ChipletKind kind);

/// Port cap derived from the PHY budget: phys_per_edge / 16, at least 2.
int default_port_cap(ChipletKind kind);

std::string_view to_string(ChipletKind kind);
std::optional<ChipletKind> parse_chiplet_kind(std::string_view text);

}  // namespace noi
