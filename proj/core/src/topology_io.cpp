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

#include "noi/topology_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "noi/error.hpp"
#include "noi/format.hpp"

namespace noi {

void write_topology(std::ostream& out, const Topology& topology) {
  out << "noi v1\n";
  for (const Node& n : topology.nodes()) {
    out << "node " << n.id << ' ' << to_string(n.kind) << ' ' << to_string(n.role) << ' '
        << n.port_cap << '\n';
  }
  for (const Link& l : topology.links()) {
    out << "link " << l.a << ' ' << l.b << ' ' << format_double(l.bandwidth_gbps) << '\n';
  }
}

std::string to_text(const Topology& topology) {
  std::ostringstream out;
  write_topology(out, topology);
  return out.str();
}

Topology read_topology(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + why);
  };
  bool header = false;
  std::vector<Node> nodes;
  std::vector<Link> links;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::vector<std::string> tok{std::istream_iterator<std::string>(fields), {}};
    if (tok.empty() || tok[0].starts_with('#')) continue;
    if (!header) {
      if (tok.size() != 2 || tok[0] != "noi" || tok[1] != "v1") throw fail("expected 'noi v1' header");
      header = true;
      continue;
    }
    if (tok[0] == "node") {
      if (tok.size() != 5) throw fail("node needs: id kind role port_cap");
      Node n;
      auto kind = parse_chiplet_kind(tok[2]);
      auto role = parse_role(tok[3]);
      if (!parse_int(tok[1], n.id) || !kind || !role || !parse_int(tok[4], n.port_cap)) {
        throw fail("malformed node line");
      }
      n.kind = *kind;
      n.role = *role;
      if (n.id != nodes.size()) throw fail("node ids must be listed in order from 0");
      nodes.push_back(n);
    } else if (tok[0] == "link") {
      if (tok.size() != 4) throw fail("link needs: a b bandwidth_gbps");
      Link l;
      if (!parse_int(tok[1], l.a) || !parse_int(tok[2], l.b) || !parse_double(tok[3], l.bandwidth_gbps)) {
        throw fail("malformed link line");
      }
      links.push_back(l);
    } else {
      throw fail("unknown record '" + tok[0] + "'");
    }
  }
  if (!header) throw Error(ErrorCode::ParseError, "empty topology file");
  return Topology(std::move(nodes), std::move(links));
}

Topology parse_topology(const std::string& text) {
  std::istringstream in(text);
  return read_topology(in);
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open topology file " + path);
  return read_topology(in);
}

void save_topology(const std::string& path, const Topology& topology) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  write_topology(out, topology);
}

std::string to_dot(const Topology& topology, const std::string& name) {
  std::ostringstream out;
  out << "graph " << name << " {\n";
  for (const Node& n : topology.nodes()) {
    out << "  n" << n.id << " [label=\"" << n.id << "\\n" << to_string(n.kind) << "\"";
    if (n.role == Role::memory) out << ", shape=box";
    out << "];\n";
  }
  for (const Link& l : topology.links()) {
    out << "  n" << l.a << " -- n" << l.b;
    if (topology.is_memory(l.a) != topology.is_memory(l.b)) out << " [style=bold]";
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

TopologyDiff diff_topologies(const Topology& candidate, const Topology& reference) {
  std::set<NodePair> cand, ref;
  for (const Link& l : candidate.links()) cand.insert({l.a, l.b});
  for (const Link& l : reference.links()) ref.insert({l.a, l.b});
  TopologyDiff diff;
  std::set_intersection(cand.begin(), cand.end(), ref.begin(), ref.end(), std::back_inserter(diff.common));
  std::set_difference(cand.begin(), cand.end(), ref.begin(), ref.end(),
                      std::back_inserter(diff.candidate_only));
  std::set_difference(ref.begin(), ref.end(), cand.begin(), cand.end(),
                      std::back_inserter(diff.reference_only));
  return diff;
}

std::string diff_to_dot(const Topology& candidate, const Topology& reference, const std::string& name) {
  const TopologyDiff diff = diff_topologies(candidate, reference);
  std::ostringstream out;
  out << "graph " << name << " {\n";
  for (const Node& n : candidate.nodes()) {
    out << "  n" << n.id << " [label=\"" << n.id << "\\n" << to_string(n.kind) << "\"";
    if (n.role == Role::memory) out << ", shape=box";
    out << "];\n";
  }
  auto emit = [&](const std::vector<NodePair>& edges, const char* color, const char* category) {
    for (auto [a, b] : edges) {
      out << "  n" << a << " -- n" << b << " [color=" << color << ", category=" << category << "];\n";
    }
  };
  emit(diff.common, "blue", "common");
  emit(diff.candidate_only, "green", "candidate_only");
  emit(diff.reference_only, "red", "reference_only");
  out << "}\n";
  return out.str();
}

}  // namespace noi
