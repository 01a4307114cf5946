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

#include "noi/trace_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "noi/error.hpp"
#include "noi/format.hpp"

namespace noi {

void write_trace_csv(std::ostream& out, const TrafficTrace& trace) {
  out << "timestamp_ns,src,dsts,bytes,class,expert\n";
  for (const FlowEvent& ev : trace.events) {
    out << format_double(ev.timestamp_ns) << ',' << ev.source << ',';
    for (std::size_t i = 0; i < ev.destinations.size(); ++i) {
      if (i) out << '|';
      out << ev.destinations[i];
    }
    out << ',' << ev.bytes << ',' << to_string(ev.cls) << ',' << ev.expert << '\n';
  }
}

std::string trace_to_csv(const TrafficTrace& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

TrafficTrace read_trace_csv(std::istream& in, double duration_ns) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::ParseError, "trace line " + std::to_string(line_no) + ": " + why);
  };
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty trace file");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp_ns,src,dsts,bytes,class,expert") throw fail("unexpected header");
  TrafficTrace trace;
  std::map<int, std::uint64_t> ordinals;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 6) throw fail("expected 6 columns");
    FlowEvent ev;
    if (!parse_double(cols[0], ev.timestamp_ns) || !parse_int(cols[1], ev.source) ||
        !parse_int(cols[3], ev.bytes) || !parse_int(cols[5], ev.expert)) {
      throw fail("malformed field");
    }
    auto cls = parse_flow_class(cols[4]);
    if (!cls) throw fail("unknown class");
    ev.cls = *cls;
    for (std::string_view d : split(cols[2], '|')) {
      NodeId id;
      if (!parse_int(d, id)) throw fail("malformed destination list");
      ev.destinations.push_back(id);
    }
    if (ev.bytes == 0) throw fail("flow with zero bytes");
    if (!trace.events.empty() && ev.timestamp_ns < trace.events.back().timestamp_ns) {
      throw Error(ErrorCode::NonMonotoneTrace, "trace line " + std::to_string(line_no));
    }
    ev.ordinal = ordinals[ev.expert]++;
    trace.experts = std::max(trace.experts, ev.expert + 1);
    trace.events.push_back(std::move(ev));
  }
  trace.duration_ns = duration_ns > 0.0 ? duration_ns
                      : trace.events.empty() ? 0.0
                                             : trace.events.back().timestamp_ns;
  return trace;
}

TrafficTrace load_trace_csv(const std::string& path, double duration_ns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open trace " + path);
  return read_trace_csv(in, duration_ns);
}

}  // namespace noi
