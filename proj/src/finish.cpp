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

// Luby-style finish. Each loop iteration is one LOCAL round; the MPC pipeline
// replays the same rounds through the simulated cluster.

#include <algorithm>
#include <utility>

#include "mpcsim/reduction.hpp"

namespace mpcsim {

namespace {

FinishResult finish_mis(const GraphView& view, std::uint64_t seed) {
  const Graph& g = view.graph();
  const NodeId n = g.num_nodes();
  std::vector<std::uint8_t> alive = view.mask();
  std::size_t remaining = view.alive_count();
  FinishResult out;
  out.solution.kind = Kind::Mis;
  std::vector<NodeId> joiners;
  while (remaining > 0) {
    const std::size_t round = out.rounds++;
    joiners.clear();
    for (NodeId v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      const auto mine = std::pair{finish_node_priority(seed, round, v), v};
      bool best = true;
      for (NodeId u : g.neighbors(v))
        if (alive[u] && std::pair{finish_node_priority(seed, round, u), u} > mine) {
          best = false;
          break;
        }
      if (best) joiners.push_back(v);
    }
    for (NodeId v : joiners) {
      out.solution.nodes.push_back(v);
      if (alive[v]) {
        alive[v] = 0;
        --remaining;
        out.solution.removed.push_back(v);
      }
      for (NodeId u : g.neighbors(v))
        if (alive[u]) {
          alive[u] = 0;
          --remaining;
          out.solution.removed.push_back(u);
        }
    }
  }
  out.solution.normalize();
  return out;
}

// top-priority alive incident edge, ties to the smaller neighbor id
NodeId best_partner(const Graph& g, const std::vector<std::uint8_t>& alive, std::uint64_t seed, std::size_t round,
                    NodeId v) {
  NodeId best = kNoNode;
  std::uint64_t best_prio = 0;
  for (NodeId u : g.neighbors(v)) {
    if (!alive[u]) continue;
    const std::uint64_t prio = finish_edge_priority(seed, round, v, u);
    if (best == kNoNode || prio > best_prio) {
      best = u;
      best_prio = prio;
    }
  }
  return best;
}

FinishResult finish_matching(const GraphView& view, std::uint64_t seed) {
  const Graph& g = view.graph();
  const NodeId n = g.num_nodes();
  std::vector<std::uint8_t> alive = view.mask();
  // nodes with no alive neighbor can never be matched again
  for (NodeId v = 0; v < n; ++v)
    if (alive[v] && view.degree(v) == 0) alive[v] = 0;
  std::size_t active = static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1));
  FinishResult out;
  out.solution.kind = Kind::Matching;
  std::vector<NodeId> choice(n, kNoNode);
  std::vector<NodeId> touched;
  while (active > 0) {
    const std::size_t round = out.rounds++;
    for (NodeId v = 0; v < n; ++v) choice[v] = alive[v] ? best_partner(g, alive, seed, round, v) : kNoNode;
    touched.clear();
    for (NodeId v = 0; v < n; ++v) {
      const NodeId u = choice[v];
      if (u == kNoNode || v > u || choice[u] != v) continue;
      out.solution.edges.push_back({v, u});
      out.solution.removed.push_back(v);
      out.solution.removed.push_back(u);
      alive[v] = alive[u] = 0;
      active -= 2;
      for (NodeId x : g.neighbors(v)) touched.push_back(x);
      for (NodeId x : g.neighbors(u)) touched.push_back(x);
    }
    for (NodeId x : touched) {
      if (!alive[x]) continue;
      bool any = false;
      for (NodeId y : g.neighbors(x)) any = any || alive[y];
      if (!any) {
        alive[x] = 0;
        --active;
      }
    }
  }
  out.solution.normalize();
  return out;
}

}  // namespace

FinishResult finish_greedy(const GraphView& view, Kind kind, std::uint64_t seed) {
  return kind == Kind::Mis ? finish_mis(view, seed) : finish_matching(view, seed);
}

}  // namespace mpcsim
