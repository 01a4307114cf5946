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

#include "noi/chiplet.hpp"

#include <algorithm>

namespace noi {

namespace {

// Table of the MI300X-class chiplet library.
constexpr std::array<ChipletSpec, 7> kCatalog = {{
    {ChipletKind::IOD, 24.0, 26.0, true, 128, 6},
    {ChipletKind::IOD_mirror, 24.0, 26.0, true, 128, 6},
    {ChipletKind::HBM3, 12.0, 16.0, false, 64, 10},
    {ChipletKind::XCD, 11.0, 13.0, false, 64, 5},
    {ChipletKind::CCD_perf, 11.0, 13.0, false, 32, 4},
    {ChipletKind::CCD_dense, 9.5, 11.0, false, 32, 3},
    {ChipletKind::CCD_ai, 12.5, 14.0, false, 64, 3},
}};

}  // namespace

const ChipletSpec& chiplet_spec(ChipletKind kind) {
  return kCatalog[static_cast<std::size_t>(kind)];
}

int default_port_cap(ChipletKind kind) {
  return std::max(2, chiplet_spec(kind).phys_per_edge / 16);
}

std::string_view to_string(ChipletKind kind) {
  switch (kind) {
    case ChipletKind::IOD: return "IOD";
    case ChipletKind::IOD_mirror: return "IOD_mirror";
    case ChipletKind::HBM3: return "HBM3";
    case ChipletKind::XCD: return "XCD";
    case ChipletKind::CCD_perf: return "CCD_perf";
    case ChipletKind::CCD_dense: return "CCD_dense";
    case ChipletKind::CCD_ai: return "CCD_ai";
  }
  return "?";
}

std::optional<ChipletKind> parse_chiplet_kind(std::string_view text) {
  for (ChipletKind kind : kAllChipletKinds) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

}  // namespace noi
