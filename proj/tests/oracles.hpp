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

// Independent reference computations for the tests. Nothing here calls the
// library's algorithms.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <random>
#include <vector>

#include "mpcsim/graph.hpp"

namespace oracle {

using mpcsim::Edge;
using mpcsim::Graph;
using mpcsim::NodeId;

inline Graph gnp(NodeId n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.push_back({u, v});
  return mpcsim::build_graph(n, edges);
}

inline Graph path(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
  return mpcsim::build_graph(n, edges);
}

inline Graph cycle(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v < n; ++v) edges.push_back({std::min(v, (v + 1) % n), std::max(v, (v + 1) % n)});
  return mpcsim::build_graph(n, edges);
}

inline Graph star(NodeId leaves) {
  std::vector<Edge> edges;
  for (NodeId v = 1; v <= leaves; ++v) edges.push_back({0, v});
  return mpcsim::build_graph(leaves + 1, edges);
}

inline Graph complete(NodeId n) {
  std::vector<Edge> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) edges.push_back({u, v});
  return mpcsim::build_graph(n, edges);
}

// max over nonempty node subsets of the minimum induced degree
inline std::uint32_t brute_degeneracy(const Graph& g) {
  const NodeId n = g.num_nodes();
  std::uint32_t best = 0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::uint32_t lo = n;
    for (NodeId v = 0; v < n; ++v) {
      if (!((mask >> v) & 1)) continue;
      std::uint32_t deg = 0;
      for (NodeId u : g.neighbors(v)) deg += (mask >> u) & 1;
      lo = std::min(lo, deg);
    }
    best = std::max(best, lo);
  }
  return best;
}

// Batch peeling from the definition; 0 marks nodes never peeled.
inline std::vector<std::uint32_t> peel(const Graph& g, std::uint32_t d, const std::vector<std::uint8_t>* alive = nullptr) {
  const NodeId n = g.num_nodes();
  std::vector<std::uint32_t> layer(n, 0);
  std::vector<std::uint8_t> in(n, 1);
  if (alive) in = *alive;
  for (std::uint32_t i = 1;; ++i) {
    std::vector<NodeId> take;
    bool any = false;
    for (NodeId v = 0; v < n; ++v) {
      if (!in[v]) continue;
      any = true;
      std::uint32_t deg = 0;
      for (NodeId u : g.neighbors(v)) deg += in[u];
      if (deg <= d) take.push_back(v);
    }
    if (!any || take.empty()) break;
    for (NodeId v : take) {
      layer[v] = i;
      in[v] = 0;
    }
  }
  return layer;
}

inline std::vector<std::uint32_t> bfs(const Graph& g, NodeId src) {
  std::vector<std::uint32_t> dist(g.num_nodes(), UINT32_MAX);
  std::queue<NodeId> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    for (NodeId u : g.neighbors(v))
      if (dist[u] == UINT32_MAX) {
        dist[u] = dist[v] + 1;
        q.push(u);
      }
  }
  return dist;
}

inline bool is_independent(const Graph& g, const std::vector<NodeId>& nodes) {
  std::vector<std::uint8_t> in(g.num_nodes(), 0);
  for (NodeId v : nodes) in[v] = 1;
  for (const Edge& e : g.edges())
    if (in[e.u] && in[e.v]) return false;
  return true;
}

inline bool is_maximal_independent(const Graph& g, const std::vector<NodeId>& nodes) {
  if (!is_independent(g, nodes)) return false;
  std::vector<std::uint8_t> covered(g.num_nodes(), 0);
  for (NodeId v : nodes) {
    covered[v] = 1;
    for (NodeId u : g.neighbors(v)) covered[u] = 1;
  }
  return std::all_of(covered.begin(), covered.end(), [](auto c) { return c != 0; });
}

inline bool is_maximal_matching(const Graph& g, const std::vector<Edge>& edges) {
  std::vector<std::uint8_t> used(g.num_nodes(), 0);
  for (const Edge& e : edges) {
    if (!g.has_edge(e.u, e.v) || used[e.u] || used[e.v]) return false;
    used[e.u] = used[e.v] = 1;
  }
  for (const Edge& e : g.edges())
    if (!used[e.u] && !used[e.v]) return false;
  return true;
}

}  // namespace oracle
