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

#include <algorithm>
#include <bit>

#include "mpcsim/mpc_reduction.hpp"
#include "mpcsim/rng.hpp"

namespace mpcsim {

namespace {

constexpr Word kNone = kNoNode;

void for_nodes(const Cluster& cluster, std::span<const NodeId> nodes, auto&& body) {
  const std::int64_t count = static_cast<std::int64_t>(nodes.size());
#pragma omp parallel for schedule(dynamic, 256) if (cluster.config().parallel)
  for (std::int64_t i = 0; i < count; ++i) body(nodes[static_cast<std::size_t>(i)]);
}

std::vector<NodeId> alive_nodes(const std::vector<std::uint8_t>& alive) {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < alive.size(); ++v)
    if (alive[v]) out.push_back(v);
  return out;
}

std::size_t neighbor_slot(const Graph& g, NodeId v, NodeId u) {
  auto nb = g.neighbors(v);
  auto it = std::lower_bound(nb.begin(), nb.end(), u);
  if (it == nb.end() || *it != u) throw InvariantError("message from a non-neighbor");
  return static_cast<std::size_t>(it - nb.begin());
}

// Records gathered from the in-chunk neighborhood, looked up by sender.
class RecordTable {
 public:
  RecordTable(NodeId self, std::span<const Word> own, std::span<const Received> inbox) {
    rows_.reserve(inbox.size() + 1);
    rows_.push_back({self, own});
    for (const Received& r : inbox) rows_.push_back({r.src, r.payload});
    std::sort(rows_.begin(), rows_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  std::span<const Word> at(NodeId x) const {
    auto it = std::lower_bound(rows_.begin(), rows_.end(), x, [](const auto& row, NodeId key) { return row.first < key; });
    if (it == rows_.end() || it->first != x)
      throw InvariantError("record of node " + std::to_string(x) + " is outside the gathered neighborhood");
    return it->second;
  }

 private:
  std::vector<std::pair<NodeId, std::span<const Word>>> rows_;
};

}  // namespace

MpcProposals mpc_mark_propose(Cluster& cluster, const GraphView& view, const HPartition& hp, Kind kind,
                              std::uint64_t seed, std::uint64_t phase, std::optional<double> mis_probability) {
  const Graph& g = cluster.graph();
  const NodeId n = g.num_nodes();
  const std::vector<std::uint8_t>& alive = view.mask();
  const std::vector<NodeId> members = alive_nodes(alive);
  const std::uint64_t r0 = cluster.rounds();

  MpcProposals res;
  ProposalSet& props = res.props;
  props.kind = kind;
  props.seed = seed;
  props.phase = phase;
  res.neighbor_layer.assign(n, {});
  for (NodeId v : members) res.neighbor_layer[v].assign(g.degree(v), 0);

  auto learn_layers = [&](NodeId v) {
    for (const Received& r : cluster.inbox(v)) res.neighbor_layer[v][neighbor_slot(g, v, r.src)] = static_cast<std::uint32_t>(r.payload[0]);
  };

  if (kind == Kind::Matching) {
    props.marked_parent.assign(n, kNoNode);
    props.proposed_child.assign(n, kNoNode);
    cluster.execute_node_round(
        [&](NodeId v, Outbox& out) {
          if (!alive[v]) return;
          for (NodeId u : g.neighbors(v))
            if (alive[u]) out.send(v, u, Word{hp.layer[v]});
        },
        "exchange-layers");
    for_nodes(cluster, members, [&](NodeId v) {
      learn_layers(v);
      std::vector<NodeId> outgoing;
      auto nb = g.neighbors(v);
      for (std::size_t k = 0; k < nb.size(); ++k)
        if (res.neighbor_layer[v][k] > hp.layer[v]) outgoing.push_back(nb[k]);
      if (outgoing.empty()) return;
      Stream rng = node_stream(seed, phase, v, StreamTag::Mark);
      props.marked_parent[v] = outgoing[rng.uniform_below(outgoing.size())];
    });
    cluster.execute_node_round(
        [&](NodeId v, Outbox& out) {
          if (alive[v] && props.marked_parent[v] != kNoNode) out.send(v, props.marked_parent[v], Word{v});
        },
        "mark");
    for_nodes(cluster, members, [&](NodeId w) {
      auto inbox = cluster.inbox(w);
      if (inbox.empty()) return;
      std::vector<NodeId> children;
      for (const Received& r : inbox) children.push_back(r.src);
      std::sort(children.begin(), children.end());
      Stream rng = node_stream(seed, phase, w, StreamTag::Propose);
      props.proposed_child[w] = children[rng.uniform_below(children.size())];
    });
  } else {
    const double p = mis_probability.value_or(default_mis_probability(hp.d));
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("marking probability must be in (0, 1]");
    props.marked.assign(n, 0);
    props.proposed.assign(n, 0);
    for_nodes(cluster, members, [&](NodeId v) {
      Stream rng = node_stream(seed, phase, v, StreamTag::Mark);
      props.marked[v] = rng.bernoulli(p) ? 1 : 0;
    });
    cluster.execute_node_round(
        [&](NodeId v, Outbox& out) {
          if (!alive[v]) return;
          const Word msg[2] = {hp.layer[v], props.marked[v]};
          for (NodeId u : g.neighbors(v))
            if (alive[u]) out.send(v, u, msg);
        },
        "exchange-marks");
    for_nodes(cluster, members, [&](NodeId v) {
      learn_layers(v);
      if (!props.marked[v]) return;
      bool blocked = false;
      for (const Received& r : cluster.inbox(v))
        if (r.payload[0] == hp.layer[v] && r.payload[1]) blocked = true;
      props.proposed[v] = blocked ? 0 : 1;
    });
  }
  res.rounds = cluster.rounds() - r0;
  return res;
}

MpcSelection mpc_select(Cluster& cluster, const GraphView& view, const MpcPartition& part,
                        const MpcProposals& proposals) {
  const Graph& g = cluster.graph();
  const NodeId n = g.num_nodes();
  const ProposalSet& props = proposals.props;
  const auto& layer = part.hp.layer;
  const auto& nlayer = proposals.neighbor_layer;
  const std::vector<std::uint8_t>& alive = view.mask();
  const Kind kind = props.kind;
  const Word per_id = cluster.config().cost.words_per_id;
  const std::uint64_t r0 = cluster.rounds();
  check_proposals(view, part.hp, props);

  std::vector<std::vector<NodeId>> members(part.chunks.size());
  for (NodeId v = 0; v < n; ++v)
    if (alive[v]) members.at(part.removal_chunk[v]).push_back(v);

  {
    const Word record = kind == Kind::Matching ? 4 : g.max_degree() + 2;
    std::vector<Word> projected(n);
    for (NodeId v = 0; v < n; ++v)
      projected[v] = cluster.node_words(v) + Word{part.retained[v].size()} * record * per_id;
    cluster.rebalance(alive, projected);
  }

  // matching: up[v] = the edge v marked was selected; pick[v] = edge (prop[v], v) selected
  // mis: up[v] = a selected higher-chunk neighbor exists; pick[v] = v selected
  std::vector<std::uint8_t> up(n, 0), pick(n, 0);
  std::vector<std::uint8_t> in_chunk(n, 0);

  for (std::size_t c = part.chunks.size(); c-- > 0;) {
    const Chunk& ch = part.chunks[c];
    const std::vector<NodeId>& mem = members[c];
    auto within = [&](std::uint32_t l) { return l >= ch.first && l <= ch.last; };

    if (ch.width() > 1) {
      for (NodeId v : mem) in_chunk[v] = 1;
      Neighborhoods rebuilt;
      const Neighborhoods* nb = &part.retained;
      if (!part.retained_available) {
        // rebuild the in-chunk balls: original in-chunk edges, then log2(radius) clique steps
        rebuilt.assign(n, {});
        for (NodeId v : mem) {
          auto adj = g.neighbors(v);
          for (std::size_t k = 0; k < adj.size(); ++k)
            if (within(nlayer[v][k])) rebuilt[v].push_back(adj[k]);
        }
        const int steps = std::bit_width(ch.radius) - 1;
        for (int s = 0; s < steps; ++s) connect_cliques(cluster, in_chunk, rebuilt, "select-connect");
        nb = &rebuilt;
      }
      cluster.execute_node_round(
          [&](NodeId x, Outbox& out) {
            if (!in_chunk[x]) return;
            thread_local std::vector<Word> rec;
            rec.clear();
            if (kind == Kind::Matching) {
              const NodeId m = props.marked_parent[x];
              const bool m_in = m != kNoNode && within(layer[m]);
              rec = {m == kNoNode ? kNone : Word{m}, m_in ? Word{1} : Word{0},
                     props.proposed_child[x] == kNoNode ? kNone : Word{props.proposed_child[x]}, up[x]};
            } else {
              rec = {props.proposed[x], up[x]};
              auto adj = g.neighbors(x);
              for (std::size_t k = 0; k < adj.size(); ++k)
                if (nlayer[x][k] > layer[x] && within(nlayer[x][k])) rec.push_back(adj[k]);
            }
            for (NodeId y : (*nb)[x]) out.send(x, y, rec);
          },
          "select-gather");
      for_nodes(cluster, mem, [&](NodeId v) {
        // own record, rebuilt locally
        std::vector<Word> own;
        if (kind == Kind::Matching) {
          const NodeId m = props.marked_parent[v];
          own = {m == kNoNode ? kNone : Word{m}, (m != kNoNode && within(nlayer[v][neighbor_slot(g, v, m)])) ? Word{1} : Word{0},
                 props.proposed_child[v] == kNoNode ? kNone : Word{props.proposed_child[v]}, up[v]};
        } else {
          own = {props.proposed[v], up[v]};
          auto adj = g.neighbors(v);
          for (std::size_t k = 0; k < adj.size(); ++k)
            if (nlayer[v][k] > layer[v] && within(nlayer[v][k])) own.push_back(adj[k]);
        }
        RecordTable table(v, own, cluster.inbox(v));
        if (kind == Kind::Matching) {
          // follow the chain of marked edges upward inside the chunk
          std::vector<NodeId> chain{v};
          bool value = false;
          for (;;) {
            auto rec = table.at(chain.back());
            if (rec[0] == kNone) break;
            if (!rec[1]) {
              value = rec[3] != 0;
              break;
            }
            chain.push_back(static_cast<NodeId>(rec[0]));
            if (chain.size() > ch.width()) throw InvariantError("marked chain longer than its chunk");
          }
          for (std::size_t t = chain.size() - 1; t-- > 0;) {
            auto parent = table.at(chain[t + 1]);
            value = parent[2] == chain[t] && !value;
          }
          up[v] = value ? 1 : 0;
          pick[v] = (props.proposed_child[v] != kNoNode && !value) ? 1 : 0;
        } else {
          std::vector<std::pair<NodeId, std::uint8_t>> memo;
          auto selected = [&](auto&& self, NodeId x, std::uint32_t depth) -> bool {
            for (const auto& [id, val] : memo)
              if (id == x) return val != 0;
            if (depth > ch.width()) throw InvariantError("in-chunk dependency deeper than its chunk");
            auto rec = table.at(x);
            bool val = rec[0] != 0 && rec[1] == 0;
            for (std::size_t k = 2; val && k < rec.size(); ++k)
              if (self(self, static_cast<NodeId>(rec[k]), depth + 1)) val = false;
            memo.push_back({x, val ? std::uint8_t{1} : std::uint8_t{0}});
            return val;
          };
          pick[v] = selected(selected, v, 0) ? 1 : 0;
        }
      });
      for (NodeId v : mem) in_chunk[v] = 0;
    } else {
      for (NodeId v : mem) {
        if (kind == Kind::Matching) {
          const NodeId m = props.marked_parent[v];
          const bool value = m != kNoNode && up[v];
          if (m != kNoNode && within(layer[m])) throw InvariantError("marked edge inside a one-layer chunk");
          up[v] = value ? 1 : 0;
          pick[v] = (props.proposed_child[v] != kNoNode && !value) ? 1 : 0;
        } else {
          pick[v] = (props.proposed[v] && !up[v]) ? 1 : 0;
        }
      }
    }

    cluster.execute_node_round(
        [&](NodeId v, Outbox& out) {
          if (!alive[v] || part.removal_chunk[v] != c || !pick[v]) return;
          if (kind == Kind::Matching) {
            const NodeId child = props.proposed_child[v];
            if (nlayer[v][neighbor_slot(g, v, child)] < ch.first) out.send(v, child, Word{1});
          } else {
            for (NodeId u : g.neighbors(v))
              if (alive[u]) out.send(v, u, Word{1});
          }
        },
        "select-notify");
    for (std::size_t k = 0; k < c; ++k)
      for (NodeId v : members[k])
        if (!cluster.inbox(v).empty()) up[v] = 1;
  }

  MpcSelection res;
  PartialSolution& sol = res.solution;
  sol.kind = kind;
  for (NodeId v = 0; v < n; ++v) {
    if (!alive[v] || !pick[v]) continue;
    if (kind == Kind::Matching) {
      const NodeId child = props.proposed_child[v];
      sol.edges.push_back(normalized({child, v}));
      sol.removed.push_back(child);
      sol.removed.push_back(v);
    } else {
      sol.nodes.push_back(v);
      sol.removed.push_back(v);
      view.for_each_neighbor(v, [&](NodeId u) { sol.removed.push_back(u); });
    }
  }
  sol.normalize();
  res.rounds = cluster.rounds() - r0;
  return res;
}

namespace {

NodeId best_alive_partner(const Graph& g, const std::vector<std::uint8_t>& alive, std::uint64_t seed,
                          std::size_t round, NodeId v) {
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

}  // namespace

FinishResult mpc_finish(Cluster& cluster, const GraphView& view, Kind kind, std::uint64_t seed) {
  const Graph& g = cluster.graph();
  const NodeId n = g.num_nodes();
  std::vector<std::uint8_t> alive = view.mask();
  FinishResult out;
  out.solution.kind = kind;

  auto has_alive_neighbor = [&](NodeId v) {
    for (NodeId u : g.neighbors(v))
      if (alive[u]) return true;
    return false;
  };

  if (kind == Kind::Mis) {
    std::vector<std::uint8_t> joins(n, 0);
    std::size_t remaining = view.alive_count();
    while (remaining > 0) {
      const std::size_t round = out.rounds++;
      const std::vector<NodeId> members = alive_nodes(alive);
      for_nodes(cluster, members, [&](NodeId v) {
        const auto mine = std::pair{finish_node_priority(seed, round, v), v};
        bool best = true;
        for (NodeId u : g.neighbors(v))
          if (alive[u] && std::pair{finish_node_priority(seed, round, u), u} > mine) {
            best = false;
            break;
          }
        joins[v] = best ? 1 : 0;
      });
      cluster.execute_node_round(
          [&](NodeId v, Outbox& o) {
            if (!alive[v] || !joins[v]) return;
            for (NodeId u : g.neighbors(v))
              if (alive[u]) o.send(v, u, Word{1});
          },
          "finish-join");
      std::vector<NodeId> dominated;
      for (NodeId v : members) {
        if (joins[v]) {
          out.solution.nodes.push_back(v);
          out.solution.removed.push_back(v);
        } else if (!cluster.inbox(v).empty()) {
          dominated.push_back(v);
          out.solution.removed.push_back(v);
        }
      }
      for (NodeId v : members)
        if (joins[v]) alive[v] = 0;
      cluster.execute_node_round(
          [&](NodeId v, Outbox& o) {
            if (!alive[v] || joins[v] || cluster.inbox(v).empty()) return;
            for (NodeId u : g.neighbors(v))
              if (alive[u] && u != v) o.send(v, u, Word{1});
          },
          "finish-drop");
      for (NodeId v : dominated) alive[v] = 0;
      for (NodeId v : members) joins[v] = 0;
      remaining = static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1));
    }
    out.solution.normalize();
    return out;
  }

  for (NodeId v = 0; v < n; ++v)
    if (alive[v] && !has_alive_neighbor(v)) alive[v] = 0;
  std::size_t active = static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1));
  std::vector<NodeId> choice(n, kNoNode);
  std::vector<std::uint8_t> matched(n, 0);
  while (active > 0) {
    const std::size_t round = out.rounds++;
    const std::vector<NodeId> members = alive_nodes(alive);
    for_nodes(cluster, members, [&](NodeId v) { choice[v] = best_alive_partner(g, alive, seed, round, v); });
    cluster.execute_node_round(
        [&](NodeId v, Outbox& o) {
          if (alive[v] && choice[v] != kNoNode) o.send(v, choice[v], Word{1});
        },
        "finish-propose");
    for_nodes(cluster, members, [&](NodeId v) {
      matched[v] = 0;
      for (const Received& r : cluster.inbox(v))
        if (r.src == choice[v]) matched[v] = 1;
    });
    cluster.execute_node_round(
        [&](NodeId v, Outbox& o) {
          if (!alive[v] || !matched[v]) return;
          for (NodeId u : g.neighbors(v))
            if (alive[u] && u != choice[v]) o.send(v, u, Word{1});
        },
        "finish-matched");
    for (NodeId v : members)
      if (matched[v]) {
        if (v < choice[v]) out.solution.edges.push_back({v, choice[v]});
        out.solution.removed.push_back(v);
        alive[v] = 0;
      }
    for (NodeId v : members)
      if (alive[v] && !has_alive_neighbor(v)) alive[v] = 0;
    active = static_cast<std::size_t>(std::count(alive.begin(), alive.end(), 1));
  }
  out.solution.normalize();
  return out;
}

}  // namespace mpcsim
