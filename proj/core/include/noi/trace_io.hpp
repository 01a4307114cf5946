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

#include "noi/traffic.hpp"

namespace noi {

/// CSV with header `timestamp_ns,src,dsts,bytes,class,expert`; `dsts` is a
/// `|`-separated id list. Per-expert ordinals are implied by row order.
void write_trace_csv(std::ostream& out, const TrafficTrace& trace);
std::string trace_to_csv(const TrafficTrace& trace);
/// Parses a trace; `duration_ns` <= 0 means "last timestamp". Throws
/// ParseError or NonMonotoneTrace.
TrafficTrace read_trace_csv(std::istream& in, double duration_ns = 0.0);
TrafficTrace load_trace_csv(const std::string& path, double duration_ns = 0.0);

}  // namespace noi
