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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noi/chiplet.hpp"

namespace noi {

using NodeId = std::uint32_t;

/// Nominal die-to-die link rate and the usable fraction after protocol overhead.
inline constexpr double kNominalLinkGbps = 38.4;
inline constexpr double kProtocolEfficiency = 0.97;
/// Effective per-link bandwidth (GB/s, numerically bytes/ns) used for every
/// default, augmented and synthesized link.
inline constexpr double kDefaultLinkGbps = 37.2;

enum class Role { memory, compute, io };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct Node {
  NodeId id = 0;
  ChipletKind kind = ChipletKind::XCD;
  Role role = Role::compute;
  int port_cap = 4;
};

/// Undirected link, stored with a < b.
struct Link {
  NodeId a = 0;
  NodeId b = 0;
  double bandwidth_gbps = kDefaultLinkGbps;

  friend bool operator==(const Link&, const Link&) = default;
};

using NodePair = std::pair<NodeId, NodeId>;

inline NodePair ordered(NodeId x, NodeId y) { return x < y ? NodePair{x, y} : NodePair{y, x}; }

/// Immutable simple undirected graph of chiplets. Construction enforces
/// contiguous ids, no self-loops and no duplicate links; connectivity and
/// port caps are reported by validate() and preserved by every edit.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<Node> nodes, std::vector<Link> links);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return links_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  /// Links sorted by (a, b).
  const std::vector<Link>& links() const { return links_; }

  bool has_link(NodeId x, NodeId y) const;
  std::optional<std::size_t> link_index(NodeId x, NodeId y) const;
  double bandwidth(NodeId x, NodeId y) const;
  int degree(NodeId id) const { return static_cast<int>(adjacency_.at(id).size()); }
  /// Neighbours in ascending id order.
  std::span<const NodeId> neighbors(NodeId id) const { return adjacency_.at(id); }

  bool is_connected() const;
  bool is_memory(NodeId id) const { return nodes_.at(id).role == Role::memory; }
  std::vector<NodeId> nodes_with_role(Role role) const;
  std::vector<NodeId> memory_nodes() const { return nodes_with_role(Role::memory); }
  std::vector<NodeId> compute_nodes() const { return nodes_with_role(Role::compute); }

  Topology with_link(NodeId x, NodeId y, double bandwidth_gbps = kDefaultLinkGbps) const;
  Topology without_link(NodeId x, NodeId y) const;

  friend bool operator==(const Topology& lhs, const Topology& rhs);

 private:
  void rebuild_adjacency();

  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<NodeId>> adjacency_;
};

bool operator==(const Node& lhs, const Node& rhs);

// ---------------------------------------------------------------------------
// Validation

enum class ValidationMode { lenient, relay_strict };

struct PortCapViolation {
  NodeId node;
  int degree;
  int port_cap;
};

/// A memory/compute pair with at least one shortest route through a node
/// that cannot relay traffic.
struct RelayViolation {
  NodeId memory;
  NodeId compute;
  NodeId via;
};

struct ValidationReport {
  bool connected = true;
  std::vector<PortCapViolation> port_cap_violations;
  std::vector<RelayViolation> relay_violations;

  bool ok() const {
    return connected && port_cap_violations.empty() && relay_violations.empty();
  }
};

ValidationReport validate(const Topology& topology, ValidationMode mode = ValidationMode::lenient);

// ---------------------------------------------------------------------------
// Edits

enum class EditKind { add, remove };

struct Edit {
  EditKind kind = EditKind::add;
  NodeId a = 0;
  NodeId b = 0;
};

/// Returns a topology differing from `topology` by exactly the edited link.
/// Throws DuplicateLink, PortCapExceeded, LinkAbsent or WouldDisconnect.
Topology apply_edit(const Topology& topology, const Edit& edit,
                    double bandwidth_gbps = kDefaultLinkGbps);

/// Structural checks shared by apply_edit and the action mask.
bool can_add_link(const Topology& topology, NodeId a, NodeId b);
bool can_remove_link(const Topology& topology, NodeId a, NodeId b);

}  // namespace noi
