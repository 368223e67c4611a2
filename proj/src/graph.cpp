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

#include "mpcsim/graph.hpp"

#include <algorithm>

namespace mpcsim {

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= n_ || v >= n_) return false;
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Graph build_graph(NodeId n, std::span<const Edge> edge_list) {
  Graph g;
  g.n_ = n;
  g.edges_.reserve(edge_list.size());
  for (const Edge& e : edge_list) {
    if (e.u >= n || e.v >= n)
      throw GraphError(GraphErrorKind::EndpointOutOfRange,
                       "edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                           ") has an endpoint >= n=" + std::to_string(n));
    if (e.u == e.v)
      throw GraphError(GraphErrorKind::SelfLoop, "self-loop at node " + std::to_string(e.u));
    g.edges_.push_back(normalized(e));
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  auto dup = std::adjacent_find(g.edges_.begin(), g.edges_.end());
  if (dup != g.edges_.end())
    throw GraphError(GraphErrorKind::DuplicateEdge,
                     "duplicate edge (" + std::to_string(dup->u) + "," + std::to_string(dup->v) + ")");

  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(std::size_t{n} + 1, 0);
  for (NodeId v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.adj_.resize(g.offsets_[n]);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // edges are sorted by (u, v), so each list is filled in ascending order
  for (const Edge& e : g.edges_) g.adj_[fill[e.u]++] = e.v;
  for (const Edge& e : g.edges_) g.adj_[fill[e.v]++] = e.u;
  for (NodeId v = 0; v < n; ++v) {
    std::sort(g.adj_.begin() + g.offsets_[v], g.adj_.begin() + g.offsets_[v + 1]);
    g.max_degree_ = std::max(g.max_degree_, deg[v]);
  }
  return g;
}

GraphView::GraphView(const Graph& g) : g_(&g), alive_(g.num_nodes(), 1), alive_count_(g.num_nodes()) {}

GraphView::GraphView(const Graph& g, std::vector<std::uint8_t> alive) : g_(&g), alive_(std::move(alive)) {
  if (alive_.size() != g.num_nodes())
    throw GraphError(GraphErrorKind::InvalidParameter, "alive mask size does not match node count");
  alive_count_ = static_cast<NodeId>(std::count_if(alive_.begin(), alive_.end(), [](auto a) { return a != 0; }));
}

std::size_t GraphView::degree(NodeId v) const {
  std::size_t d = 0;
  for (NodeId u : g_->neighbors(v)) d += alive_[u] ? 1 : 0;
  return d;
}

std::size_t GraphView::max_degree() const {
  std::size_t best = 0;
  for (NodeId v = 0; v < num_nodes(); ++v)
    if (alive_[v]) best = std::max(best, degree(v));
  return best;
}

std::size_t GraphView::num_alive_edges() const {
  std::size_t m = 0;
  for (const Edge& e : g_->edges()) m += (alive_[e.u] && alive_[e.v]) ? 1 : 0;
  return m;
}

GraphView GraphView::without(std::span<const NodeId> removed) const {
  std::vector<std::uint8_t> mask = alive_;
  for (NodeId v : removed) mask[v] = 0;
  return GraphView(*g_, std::move(mask));
}

ArboricityEstimate degeneracy(const Graph& g) {
  // Bucket queue over remaining degrees (Matula-Beck).
  const NodeId n = g.num_nodes();
  ArboricityEstimate est;
  est.peeling_order.reserve(n);
  if (n == 0) return est;

  const std::size_t maxd = g.max_degree();
  std::vector<std::size_t> deg(n);
  std::vector<std::size_t> bin(maxd + 2, 0);
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    ++bin[deg[v]];
  }
  std::size_t start = 0;
  for (std::size_t d = 0; d <= maxd; ++d) {
    std::size_t count = bin[d];
    bin[d] = start;
    start += count;
  }
  std::vector<NodeId> vert(n);
  std::vector<std::size_t> pos(n);
  for (NodeId v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    vert[pos[v]] = v;
  }
  for (std::size_t d = maxd; d >= 1; --d) bin[d] = bin[d - 1];
  bin[0] = 0;

  std::size_t core = 0;
  for (std::size_t i = 0; i < n; ++i) {
    NodeId v = vert[i];
    core = std::max(core, deg[v]);
    est.peeling_order.push_back(v);
    for (NodeId u : g.neighbors(v)) {
      if (deg[u] > deg[v]) {
        std::size_t du = deg[u];
        std::size_t pu = pos[u];
        std::size_t pw = bin[du];
        NodeId w = vert[pw];
        if (u != w) {
          pos[u] = pw;
          vert[pu] = w;
          pos[w] = pu;
          vert[pw] = u;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  est.degeneracy = static_cast<std::uint32_t>(core);
  est.lambda_upper = est.degeneracy;
  est.lambda_lower = (est.degeneracy + 1) / 2;
  return est;
}

std::vector<std::size_t> HPartition::layer_sizes() const {
  std::vector<std::size_t> sizes(std::size_t{ell} + 1, 0);
  for (std::uint32_t l : layer)
    if (l > 0) ++sizes[l];
  return sizes;
}

std::vector<std::size_t> HPartition::suffix_sizes() const {
  auto sizes = layer_sizes();
  std::vector<std::size_t> suffix(std::size_t{ell} + 2, 0);
  for (std::size_t i = ell; i >= 1; --i) suffix[i] = suffix[i + 1] + sizes[i];
  return suffix;
}

PartitionStall::PartitionStall(std::uint32_t layer, std::size_t remaining, std::uint32_t d)
    : std::runtime_error("h-partition stalled at layer " + std::to_string(layer) + ": " +
                         std::to_string(remaining) + " nodes remain, all with degree > d=" + std::to_string(d)),
      layer_(layer),
      remaining_(remaining) {}

HPartition h_partition(const GraphView& view, std::uint32_t d) {
  if (d < 1) throw GraphError(GraphErrorKind::InvalidParameter, "h_partition requires d >= 1");
  const Graph& g = view.graph();
  const NodeId n = g.num_nodes();
  HPartition hp;
  hp.d = d;
  hp.layer.assign(n, 0);

  std::vector<std::size_t> rem(n, 0);
  std::vector<NodeId> frontier;
  std::size_t remaining = view.alive_count();
  for (NodeId v = 0; v < n; ++v) {
    if (!view.alive(v)) continue;
    rem[v] = view.degree(v);
    if (rem[v] <= d) frontier.push_back(v);
  }

  std::uint32_t current = 0;
  std::vector<NodeId> next;
  while (remaining > 0) {
    ++current;
    if (frontier.empty()) throw PartitionStall(current, remaining, d);
    for (NodeId v : frontier) hp.layer[v] = current;
    remaining -= frontier.size();
    next.clear();
    for (NodeId v : frontier) {
      for (NodeId u : g.neighbors(v)) {
        if (!view.alive(u) || hp.layer[u] != 0) continue;
        // crossing the threshold exactly once keeps each node queued at most once
        if (rem[u]-- == std::size_t{d} + 1) next.push_back(u);
      }
    }
    frontier.swap(next);
  }
  hp.ell = current;
  return hp;
}

HPartition h_partition(const Graph& g, std::uint32_t d) { return h_partition(GraphView(g), d); }

Orientation orientation_of(const HPartition& hp, const GraphView& view, NodeId v) {
  Orientation o;
  if (!view.alive(v)) return o;
  const std::uint32_t lv = hp.layer[v];
  view.for_each_neighbor(v, [&](NodeId u) {
    const std::uint32_t lu = hp.layer[u];
    if (lu > lv)
      o.outgoing.push_back(u);
    else if (lu < lv)
      o.incoming.push_back(u);
    else
      o.unoriented.push_back(u);
  });
  return o;
}

Orientation orientation_of(const HPartition& hp, const Graph& g, NodeId v) {
  return orientation_of(hp, GraphView(g), v);
}

bool is_valid_h_partition(const HPartition& hp, const GraphView& view) {
  const Graph& g = view.graph();
  if (hp.layer.size() != g.num_nodes()) return false;
  std::uint32_t max_layer = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (view.alive(v) != (hp.layer[v] != 0)) return false;
    max_layer = std::max(max_layer, hp.layer[v]);
  }
  if (max_layer != hp.ell) return false;
  auto sizes = hp.layer_sizes();
  for (std::uint32_t i = 1; i <= hp.ell; ++i)
    if (sizes[i] == 0) return false;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (!view.alive(v)) continue;
    const std::uint32_t lv = hp.layer[v];
    std::size_t up = 0;
    view.for_each_neighbor(v, [&](NodeId u) { up += hp.layer[u] >= lv ? 1 : 0; });
    if (up > hp.d) return false;
    if (lv >= 2) {
      // degree in the graph left after removing layers < lv, one layer earlier
      std::size_t before = 0;
      view.for_each_neighbor(v, [&](NodeId u) { before += hp.layer[u] >= lv - 1 ? 1 : 0; });
      if (before <= hp.d) return false;
    }
  }
  return true;
}

}  // namespace mpcsim
