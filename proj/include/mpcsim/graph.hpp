/*
Copyright 2026 The mpcsim Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpcsim {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

/// Undirected edge. Graph-owned edges are normalized so that u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge normalized(Edge e) { return e.u <= e.v ? e : Edge{e.v, e.u}; }

enum class GraphErrorKind { EndpointOutOfRange, SelfLoop, DuplicateEdge, InvalidParameter, Parse };

class GraphError : public std::runtime_error {
 public:
  GraphError(GraphErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  GraphErrorKind kind() const { return kind_; }

 private:
  GraphErrorKind kind_;
};

// Immutable simple undirected graph in CSR form. Neighbor lists are sorted.
class Graph {
 public:
  Graph() = default;

  NodeId num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const { return max_degree_; }
  bool has_edge(NodeId u, NodeId v) const;
  /// Sorted ascending, each with u < v.
  const std::vector<Edge>& edges() const { return edges_; }

  friend Graph build_graph(NodeId n, std::span<const Edge> edge_list);

 private:
  NodeId n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeId> adj_;
  std::vector<Edge> edges_;
  std::size_t max_degree_ = 0;
};

/// Validates and builds. Throws GraphError on an out-of-range endpoint,
/// a self-loop or a duplicate pair (in either orientation).
Graph build_graph(NodeId n, std::span<const Edge> edge_list);

// A graph with an alive mask layered on top. Removal never copies the base graph.
class GraphView {
 public:
  explicit GraphView(const Graph& g);
  GraphView(const Graph& g, std::vector<std::uint8_t> alive);

  const Graph& graph() const { return *g_; }
  NodeId num_nodes() const { return g_->num_nodes(); }
  bool alive(NodeId v) const { return alive_[v] != 0; }
  NodeId alive_count() const { return alive_count_; }
  const std::vector<std::uint8_t>& mask() const { return alive_; }

  /// Number of alive neighbors of v.
  std::size_t degree(NodeId v) const;
  /// Max alive degree over alive nodes.
  std::size_t max_degree() const;
  std::size_t num_alive_edges() const;

  template <class F>
  void for_each_neighbor(NodeId v, F&& f) const {
    for (NodeId u : g_->neighbors(v))
      if (alive_[u]) f(u);
  }

  /// Copy of this view with the given nodes additionally dead.
  GraphView without(std::span<const NodeId> removed) const;

 private:
  const Graph* g_;
  std::vector<std::uint8_t> alive_;
  NodeId alive_count_ = 0;
};

/// Degeneracy with a witness peeling order (one node removed at a time, always of
/// minimum remaining degree). lambda_lower/upper bracket the arboricity.
struct ArboricityEstimate {
  std::uint32_t degeneracy = 0;
  std::uint32_t lambda_lower = 0;
  std::uint32_t lambda_upper = 0;
  std::vector<NodeId> peeling_order;
};

ArboricityEstimate degeneracy(const Graph& g);

// Layer assignment from batch peeling with threshold d. layer[v] is in 1..ell for
// nodes of the view and 0 for nodes outside it.
struct HPartition {
  std::vector<std::uint32_t> layer;
  std::uint32_t d = 0;
  std::uint32_t ell = 0;

  std::uint32_t layer_of(NodeId v) const { return layer[v]; }
  /// sizes[i] = |L_i| for i in 1..ell; sizes[0] is unused.
  std::vector<std::size_t> layer_sizes() const;
  /// suffix[i] = |L_i ∪ ... ∪ L_ell| for i in 1..ell+1.
  std::vector<std::size_t> suffix_sizes() const;
};

class PartitionStall : public std::runtime_error {
 public:
  PartitionStall(std::uint32_t layer, std::size_t remaining, std::uint32_t d);
  std::uint32_t layer() const { return layer_; }
  std::size_t remaining() const { return remaining_; }

 private:
  std::uint32_t layer_;
  std::size_t remaining_;
};

/// Batch peeling: layer i takes every remaining node whose remaining degree is <= d.
/// Throws PartitionStall if a nonempty remainder has no such node. Requires d >= 1.
HPartition h_partition(const GraphView& view, std::uint32_t d);
HPartition h_partition(const Graph& g, std::uint32_t d);

struct Orientation {
  std::vector<NodeId> outgoing;    // strictly higher layer (parents)
  std::vector<NodeId> incoming;    // strictly lower layer (children)
  std::vector<NodeId> unoriented;  // same layer
};

Orientation orientation_of(const HPartition& hp, const GraphView& view, NodeId v);
Orientation orientation_of(const HPartition& hp, const Graph& g, NodeId v);

/// Checks the out-degree bound and peeling minimality of hp against the view.
bool is_valid_h_partition(const HPartition& hp, const GraphView& view);

}  // namespace mpcsim
