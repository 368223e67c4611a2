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

// Node-local state (virtual neighbor lists, alive flags of neighbors) lives in
// vectors indexed by node. A node only ever reads its own entries plus the alive
// flags of nodes in its lists, which it learns from removal notifications.

#include <algorithm>
#include <cmath>
#include <deque>

#include "mpcsim/mpc_reduction.hpp"

namespace mpcsim {

namespace {

std::int64_t as_index(std::size_t i) { return static_cast<std::int64_t>(i); }

void for_alive(const Cluster& cluster, std::span<const std::uint8_t> alive, auto&& body) {
  const std::int64_t n = as_index(alive.size());
#pragma omp parallel for schedule(dynamic, 256) if (cluster.config().parallel)
  for (std::int64_t i = 0; i < n; ++i)
    if (alive[static_cast<std::size_t>(i)]) body(static_cast<NodeId>(i));
}

std::size_t alive_degree(const Graph& g, std::span<const std::uint8_t> alive, NodeId v) {
  std::size_t deg = 0;
  for (NodeId u : g.neighbors(v)) deg += alive[u];
  return deg;
}

// Local peeling on the gathered ball of v. Returns v's layer if it is <= radius, else 0.
std::uint32_t peel_locally(NodeId v, std::span<const NodeId> own, std::span<const Received> gathered,
                           std::uint32_t radius, std::uint32_t d) {
  // index 0 is v itself
  std::vector<std::pair<NodeId, std::uint32_t>> ids;
  ids.reserve(gathered.size() + 1);
  ids.push_back({v, 0});
  for (std::uint32_t k = 0; k < gathered.size(); ++k) ids.push_back({gathered[k].src, k + 1});
  std::sort(ids.begin(), ids.end());
  auto lookup = [&](NodeId u) -> std::uint32_t {
    auto it = std::lower_bound(ids.begin(), ids.end(), std::pair{u, 0u});
    return (it != ids.end() && it->first == u) ? it->second : kNoNode;
  };
  const std::size_t size = ids.size();
  std::vector<std::vector<std::uint32_t>> adj(size);
  for (NodeId u : own) adj[0].push_back(lookup(u));
  for (std::uint32_t k = 0; k < gathered.size(); ++k)
    for (Word w : gathered[k].payload) adj[k + 1].push_back(lookup(static_cast<NodeId>(w)));

  constexpr std::uint32_t far = 0xffffffffu;
  std::vector<std::uint32_t> dist(size, far);
  std::deque<std::uint32_t> queue{0};
  dist[0] = 0;
  while (!queue.empty()) {
    std::uint32_t x = queue.front();
    queue.pop_front();
    if (dist[x] >= radius) continue;
    for (std::uint32_t y : adj[x])
      if (y != kNoNode && dist[y] == far) {
        dist[y] = dist[x] + 1;
        queue.push_back(y);
      }
  }

  // step s decides every node within distance radius - s + 1
  std::vector<std::uint32_t> removed_at(size, 0);
  std::vector<std::uint32_t> batch;
  for (std::uint32_t s = 1; s <= radius; ++s) {
    batch.clear();
    for (std::uint32_t x = 0; x < size; ++x) {
      if (removed_at[x] || dist[x] == far || dist[x] + s > radius + 1) continue;
      std::size_t rem = 0;
      for (std::uint32_t y : adj[x]) rem += (y == kNoNode || removed_at[y] == 0) ? 1 : 0;
      if (rem <= d) batch.push_back(x);
    }
    for (std::uint32_t x : batch) removed_at[x] = s;
    if (removed_at[0]) return s;
  }
  return 0;
}

}  // namespace

Neighborhoods initial_neighborhoods(const GraphView& view) {
  Neighborhoods nb(view.num_nodes());
  for (NodeId v = 0; v < view.num_nodes(); ++v)
    if (view.alive(v)) view.for_each_neighbor(v, [&](NodeId u) { nb[v].push_back(u); });
  return nb;
}

void connect_cliques(Cluster& cluster, std::span<const std::uint8_t> alive, Neighborhoods& virt,
                     const std::string& label) {
  cluster.execute_node_round(
      [&](NodeId v, Outbox& out) {
        if (!alive[v]) return;
        thread_local std::vector<Word> list;
        list.clear();
        for (NodeId u : virt[v])
          if (alive[u]) list.push_back(u);
        for (Word u : list) out.send(v, static_cast<NodeId>(u), list);
      },
      label);
  for_alive(cluster, alive, [&](NodeId v) {
    std::vector<NodeId> merged;
    for (NodeId u : virt[v])
      if (alive[u]) merged.push_back(u);
    for (const Received& r : cluster.inbox(v))
      for (Word w : r.payload)
        if (w != v) merged.push_back(static_cast<NodeId>(w));
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    virt[v] = std::move(merged);
  });
}

std::vector<std::uint32_t> gather_and_peel(Cluster& cluster, std::span<const std::uint8_t> alive,
                                           const Neighborhoods& virt, std::uint32_t radius, std::uint32_t d,
                                           const std::string& label) {
  const Graph& g = cluster.graph();
  std::vector<std::uint32_t> local(g.num_nodes(), 0);
  if (radius <= 1) {
    for_alive(cluster, alive, [&](NodeId v) { local[v] = alive_degree(g, alive, v) <= d ? 1 : 0; });
    return local;
  }
  cluster.execute_node_round(
      [&](NodeId v, Outbox& out) {
        if (!alive[v]) return;
        thread_local std::vector<Word> adj;
        adj.clear();
        for (NodeId u : g.neighbors(v))
          if (alive[u]) adj.push_back(u);
        for (NodeId u : virt[v])
          if (alive[u]) out.send(v, u, adj);
      },
      label);
  for_alive(cluster, alive, [&](NodeId v) {
    std::vector<NodeId> own;
    for (NodeId u : g.neighbors(v))
      if (alive[u]) own.push_back(u);
    local[v] = peel_locally(v, own, cluster.inbox(v), radius, d);
  });
  return local;
}

MpcPartition mpc_h_partition(Cluster& cluster, const GraphView& view, std::uint32_t d,
                             const ExponentiationSchedule& schedule, const PartitionOptions& opts) {
  if (d < 1) throw GraphError(GraphErrorKind::InvalidParameter, "partition threshold d must be >= 1");
  const Graph& g = cluster.graph();
  const NodeId n = g.num_nodes();
  const Word per_id = cluster.config().cost.words_per_id;
  const std::uint64_t start_rounds = cluster.rounds();

  MpcPartition out;
  out.schedule = schedule;
  out.hp.d = d;
  out.hp.layer.assign(n, 0);
  out.removal_chunk.assign(n, kNoChunk);
  out.retained.assign(n, {});
  out.retained_available = opts.c_pre > 0.0 && !schedule.fallback;
  out.alive_start = view.alive_count();

  std::vector<std::uint8_t> alive = view.mask();
  std::size_t remaining = view.alive_count();
  std::uint32_t offset = 0;  // layers removed so far
  Neighborhoods virt(n);

  auto refresh_words = [&] {
    for (NodeId v = 0; v < n; ++v)
      cluster.set_node_words(v, (g.degree(v) + (alive[v] ? virt[v].size() : 0) + out.retained[v].size()) * per_id);
  };
  auto rebalance_for = [&](auto&& extra) {
    std::vector<Word> projected(n);
    for (NodeId v = 0; v < n; ++v) projected[v] = cluster.node_words(v) + (alive[v] ? extra(v) : 0);
    cluster.rebalance(alive, projected);
  };

  // Removes the nodes with a local layer, notifies their neighborhoods and records the chunk.
  auto remove_chunk = [&](const std::vector<std::uint32_t>& local, Chunk chunk, bool use_virt) {
    std::uint32_t deepest = 0;
    std::size_t count = 0;
    for (NodeId v = 0; v < n; ++v)
      if (alive[v] && local[v]) {
        deepest = std::max(deepest, local[v]);
        ++count;
      }
    if (count == 0) throw PartitionStall(offset + 1, remaining, d);
    if (count < remaining && deepest != chunk.radius)
      throw InvariantError("repetition removed fewer layers than its radius");
    chunk.first = offset + 1;
    chunk.last = offset + deepest;
    const std::uint32_t index = static_cast<std::uint32_t>(out.chunks.size());
    out.chunks.append(chunk);
    for (NodeId v = 0; v < n; ++v)
      if (alive[v] && local[v]) {
        out.hp.layer[v] = offset + local[v];
        out.removal_chunk[v] = index;
      }
    cluster.execute_node_round(
        [&](NodeId v, Outbox& out_box) {
          if (!alive[v] || !local[v]) return;
          const Word layer = offset + local[v];
          if (use_virt) {
            for (NodeId u : virt[v])
              if (alive[u]) out_box.send(v, u, layer);
          } else {
            for (NodeId u : g.neighbors(v))
              if (alive[u]) out_box.send(v, u, layer);
          }
        },
        "notify-removal");
    if (out.retained_available && use_virt) {
      for_alive(cluster, alive, [&](NodeId v) {
        if (!local[v]) return;
        auto& keep = out.retained[v];
        for (const Received& r : cluster.inbox(v)) keep.push_back(r.src);
        std::sort(keep.begin(), keep.end());
      });
    }
    for (NodeId v = 0; v < n; ++v)
      if (alive[v] && local[v]) alive[v] = 0;
    remaining -= count;
    offset += deepest;
  };

  cluster.rebalance(alive);

  if (!schedule.fallback && opts.c_pre > 0.0) {
    for (std::uint32_t j = 0; j < schedule.preprocessing_layers && remaining > 0; ++j) {
      auto local = gather_and_peel(cluster, alive, virt, 1, d);
      remove_chunk(local, Chunk{0, 0, j, 0, 0, 1, true}, false);
    }
  }

  while (remaining > 0) {
    const std::uint32_t phase = ++out.phases;
    if (schedule.fallback) {
      IterationStats st{phase, 0, 1, 0, remaining, 0, 0, 0, 0};
      const std::uint64_t r0 = cluster.rounds();
      for (std::uint32_t j = 0; remaining > 0; ++j) {
        auto local = gather_and_peel(cluster, alive, virt, 1, d);
        remove_chunk(local, Chunk{phase, 0, j, 0, 0, 1, false}, false);
        ++st.repetitions_run;
      }
      st.alive_after = remaining;
      st.rounds = cluster.rounds() - r0;
      out.iterations.push_back(st);
      break;
    }

    const double n_prime = static_cast<double>(remaining) / static_cast<double>(std::max<std::size_t>(schedule.delta_max, 1));
    for (std::uint32_t i = 0; i < schedule.iterations() && remaining > 0; ++i) {
      const std::uint32_t radius = schedule.radius(i);
      IterationStats st{phase, i, radius, 0, remaining, 0, 0, 0, 0};
      const std::uint64_t r0 = cluster.rounds();
      if (i >= 1) {
        if (i == 1) virt = initial_neighborhoods(GraphView(g, alive));
        for (NodeId v = 0; v < n; ++v) {
          if (!alive[v]) continue;
          std::erase_if(virt[v], [&](NodeId u) { return !alive[u]; });
        }
        refresh_words();
        rebalance_for([&](NodeId v) { return Word{virt[v].size()} * virt[v].size() * per_id; });
        connect_cliques(cluster, alive, virt, "connect");
        refresh_words();
        std::size_t total = 0;
        for (NodeId v = 0; v < n; ++v) {
          if (!alive[v]) continue;
          total += virt[v].size() - alive_degree(g, alive, v);
          st.max_virtual_degree = std::max(st.max_virtual_degree, virt[v].size());
        }
        st.virtual_edges = total / 2;
        const Word gather_factor = (schedule.delta_max + 1) * per_id;
        rebalance_for([&](NodeId v) { return Word{virt[v].size()} * gather_factor; });
      }
      const double target =
          n_prime / std::pow(static_cast<double>(std::max<std::size_t>(schedule.delta_max, 1)), std::ldexp(1.0, static_cast<int>(i) + 1));
      for (std::uint32_t j = 0; j < schedule.repetitions[i] && remaining > 0; ++j) {
        if (opts.adaptive && static_cast<double>(remaining) <= target) break;
        auto local = gather_and_peel(cluster, alive, virt, radius, d);
        remove_chunk(local, Chunk{phase, i, j, 0, 0, radius, false}, i >= 1);
        ++st.repetitions_run;
      }
      st.alive_after = remaining;
      st.rounds = cluster.rounds() - r0;
      out.iterations.push_back(st);
    }
    // added edges are dropped at the end of a phase
    for (auto& list : virt) std::vector<NodeId>().swap(list);
    refresh_words();
  }

  out.hp.ell = offset;
  out.rounds = cluster.rounds() - start_rounds;
  return out;
}

}  // namespace mpcsim
