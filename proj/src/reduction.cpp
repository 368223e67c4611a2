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

#include "mpcsim/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mpcsim/rng.hpp"

namespace mpcsim {

std::string_view kind_name(Kind k) { return k == Kind::Matching ? "matching" : "mis"; }

Kind parse_kind(std::string_view name) {
  if (name == "matching") return Kind::Matching;
  if (name == "mis") return Kind::Mis;
  throw std::invalid_argument("unknown kind '" + std::string(name) + "' (expected matching or mis)");
}

std::size_t ProposalSet::marked_count() const {
  if (kind == Kind::Mis) return static_cast<std::size_t>(std::count(marked.begin(), marked.end(), 1));
  return static_cast<std::size_t>(
      std::count_if(marked_parent.begin(), marked_parent.end(), [](NodeId p) { return p != kNoNode; }));
}

std::size_t ProposalSet::proposed_count() const {
  if (kind == Kind::Mis) return static_cast<std::size_t>(std::count(proposed.begin(), proposed.end(), 1));
  return static_cast<std::size_t>(
      std::count_if(proposed_child.begin(), proposed_child.end(), [](NodeId c) { return c != kNoNode; }));
}

void PartialSolution::normalize() {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::sort(removed.begin(), removed.end());
  removed.erase(std::unique(removed.begin(), removed.end()), removed.end());
}

void PartialSolution::merge(const PartialSolution& other) {
  if (other.kind != kind) throw InvariantError("cannot merge solutions of different kinds");
  edges.insert(edges.end(), other.edges.begin(), other.edges.end());
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  removed.insert(removed.end(), other.removed.begin(), other.removed.end());
  normalize();
}

double default_mis_probability(std::uint32_t d) { return 1.0 / (static_cast<double>(d) * static_cast<double>(d)); }

ProposalSet mark_and_propose_matching(const GraphView& view, const HPartition& hp, std::uint64_t seed,
                                      std::uint64_t phase) {
  const NodeId n = view.num_nodes();
  ProposalSet props;
  props.kind = Kind::Matching;
  props.seed = seed;
  props.phase = phase;
  props.marked_parent.assign(n, kNoNode);
  props.proposed_child.assign(n, kNoNode);

  std::vector<NodeId> outgoing;
  for (NodeId v = 0; v < n; ++v) {
    if (!view.alive(v)) continue;
    outgoing.clear();
    view.for_each_neighbor(v, [&](NodeId u) {
      if (hp.layer[u] > hp.layer[v]) outgoing.push_back(u);
    });
    if (outgoing.empty()) continue;
    Stream rng = node_stream(seed, phase, v, StreamTag::Mark);
    props.marked_parent[v] = outgoing[rng.uniform_below(outgoing.size())];
  }

  // marked incoming edges per parent, children in ascending id order
  std::vector<std::uint32_t> count(n, 0);
  for (NodeId v = 0; v < n; ++v)
    if (props.marked_parent[v] != kNoNode) ++count[props.marked_parent[v]];
  std::vector<std::size_t> offset(std::size_t{n} + 1, 0);
  for (NodeId v = 0; v < n; ++v) offset[v + 1] = offset[v] + count[v];
  std::vector<NodeId> incoming(offset[n]);
  std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
  for (NodeId v = 0; v < n; ++v)
    if (props.marked_parent[v] != kNoNode) incoming[fill[props.marked_parent[v]]++] = v;

  for (NodeId w = 0; w < n; ++w) {
    if (count[w] == 0) continue;
    Stream rng = node_stream(seed, phase, w, StreamTag::Propose);
    props.proposed_child[w] = incoming[offset[w] + rng.uniform_below(count[w])];
  }
  return props;
}

ProposalSet mark_and_propose_mis(const GraphView& view, const HPartition& hp, double p, std::uint64_t seed,
                                 std::uint64_t phase) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("marking probability must be in (0, 1]");
  const NodeId n = view.num_nodes();
  ProposalSet props;
  props.kind = Kind::Mis;
  props.seed = seed;
  props.phase = phase;
  props.marked.assign(n, 0);
  props.proposed.assign(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    if (!view.alive(v)) continue;
    Stream rng = node_stream(seed, phase, v, StreamTag::Mark);
    props.marked[v] = rng.bernoulli(p) ? 1 : 0;
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!props.marked[v]) continue;
    bool blocked = false;
    view.for_each_neighbor(v, [&](NodeId u) {
      if (hp.layer[u] == hp.layer[v] && props.marked[u]) blocked = true;
    });
    props.proposed[v] = blocked ? 0 : 1;
  }
  return props;
}

void check_proposals(const GraphView& view, const HPartition& hp, const ProposalSet& props) {
  const NodeId n = view.num_nodes();
  if (props.kind == Kind::Matching) {
    if (props.marked_parent.size() != n || props.proposed_child.size() != n)
      throw InvariantError("matching proposal set has the wrong size");
    for (NodeId v = 0; v < n; ++v) {
      NodeId p = props.marked_parent[v];
      if (p != kNoNode && (!view.alive(v) || !view.alive(p) || hp.layer[p] <= hp.layer[v] || !view.graph().has_edge(v, p)))
        throw InvariantError("node " + std::to_string(v) + " marked a non-outgoing edge");
      NodeId c = props.proposed_child[v];
      if (c != kNoNode && (c >= n || props.marked_parent[c] != v))
        throw InvariantError("node " + std::to_string(v) + " proposed an edge that was not marked towards it");
    }
    return;
  }
  if (props.marked.size() != n || props.proposed.size() != n) throw InvariantError("mis proposal set has the wrong size");
  for (NodeId v = 0; v < n; ++v) {
    if (!props.proposed[v]) continue;
    if (!props.marked[v] || !view.alive(v))
      throw InvariantError("node " + std::to_string(v) + " is proposed but not marked");
    view.for_each_neighbor(v, [&](NodeId u) {
      if (hp.layer[u] == hp.layer[v] && props.marked[u])
        throw InvariantError("proposed node " + std::to_string(v) + " has marked same-layer neighbor " +
                             std::to_string(u));
    });
  }
}

namespace {

// nodes of the view bucketed by layer, ascending ids inside a layer
std::vector<std::vector<NodeId>> nodes_by_layer(const GraphView& view, const HPartition& hp) {
  std::vector<std::vector<NodeId>> buckets(std::size_t{hp.ell} + 1);
  for (NodeId v = 0; v < view.num_nodes(); ++v)
    if (view.alive(v)) buckets[hp.layer[v]].push_back(v);
  return buckets;
}

}  // namespace

PartialSolution select_matching(const GraphView& view, const HPartition& hp, const ProposalSet& props) {
  if (props.kind != Kind::Matching) throw InvariantError("select_matching needs a matching proposal set");
  check_proposals(view, hp, props);
  PartialSolution sol;
  sol.kind = Kind::Matching;
  std::vector<std::uint8_t> removed(view.num_nodes(), 0);
  auto buckets = nodes_by_layer(view, hp);
  for (std::uint32_t i = hp.ell; i >= 1; --i) {
    for (NodeId v : buckets[i]) {
      NodeId c = props.proposed_child[v];
      if (c == kNoNode || removed[v] || removed[c]) continue;
      sol.edges.push_back(normalized({c, v}));
      removed[v] = removed[c] = 1;
    }
  }
  for (const Edge& e : sol.edges) {
    sol.removed.push_back(e.u);
    sol.removed.push_back(e.v);
  }
  sol.normalize();
  return sol;
}

PartialSolution select_mis(const GraphView& view, const HPartition& hp, const ProposalSet& props) {
  if (props.kind != Kind::Mis) throw InvariantError("select_mis needs a mis proposal set");
  check_proposals(view, hp, props);
  PartialSolution sol;
  sol.kind = Kind::Mis;
  std::vector<std::uint8_t> removed(view.num_nodes(), 0);
  auto buckets = nodes_by_layer(view, hp);
  for (std::uint32_t i = hp.ell; i >= 1; --i) {
    for (NodeId v : buckets[i]) {
      if (!props.proposed[v] || removed[v]) continue;
      sol.nodes.push_back(v);
      removed[v] = 1;
      sol.removed.push_back(v);
      view.for_each_neighbor(v, [&](NodeId u) {
        if (!removed[u]) {
          removed[u] = 1;
          sol.removed.push_back(u);
        }
      });
    }
  }
  sol.normalize();
  return sol;
}

PhaseEntry phase_statistics(const GraphView& before, const HPartition& hp, const GraphView& after) {
  PhaseEntry e;
  e.delta_before = before.max_degree();
  e.delta_after = after.max_degree();
  e.d_used = hp.d;
  e.layers = hp.ell;
  const std::uint64_t d4 = std::uint64_t{hp.d} * hp.d * hp.d * hp.d;
  for (NodeId v = 0; v < before.num_nodes(); ++v) {
    if (!before.alive(v)) continue;
    std::uint64_t children = 0, children_after = 0;
    before.for_each_neighbor(v, [&](NodeId u) {
      if (hp.layer[u] < hp.layer[v]) {
        ++children;
        if (after.alive(u)) ++children_after;
      }
    });
    if (children < d4) continue;
    ++e.heavy_nodes_before;
    if (after.alive(v) && children_after >= d4) ++e.heavy_survivors_after;
  }
  return e;
}

ReduceResult reduce_once(const GraphView& view, Kind kind, std::uint32_t d, std::uint64_t seed, std::uint64_t phase,
                         std::optional<double> mis_probability) {
  HPartition hp = h_partition(view, d);
  ProposalSet props = kind == Kind::Matching
                          ? mark_and_propose_matching(view, hp, seed, phase)
                          : mark_and_propose_mis(view, hp, mis_probability.value_or(default_mis_probability(d)), seed,
                                                 phase);
  PartialSolution sol = kind == Kind::Matching ? select_matching(view, hp, props) : select_mis(view, hp, props);
  GraphView rest = view.without(sol.removed);
  PhaseEntry entry = phase_statistics(view, hp, rest);
  return ReduceResult{std::move(sol), std::move(rest), entry, std::move(hp), std::move(props)};
}

Rational Rational::parse(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("bad exponent '" + std::string(text) + "'"); };
  Rational r;
  auto slash = text.find('/');
  try {
    if (slash != std::string_view::npos) {
      r.num = std::stoull(std::string(text.substr(0, slash)));
      r.den = std::stoull(std::string(text.substr(slash + 1)));
    } else {
      auto dot = text.find('.');
      std::string digits(text);
      r.den = 1;
      if (dot != std::string_view::npos) {
        digits.erase(dot, 1);
        for (std::size_t i = dot + 1; i < text.size(); ++i) r.den *= 10;
      }
      r.num = std::stoull(digits);
    }
  } catch (const std::exception&) {
    throw fail();
  }
  if (r.den == 0 || r.num == 0 || r.num > r.den) throw fail();
  std::uint64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

namespace {

using u128 = unsigned __int128;

u128 saturating_pow(std::uint64_t base, std::uint64_t exp) {
  constexpr u128 cap = u128{1} << 120;
  u128 r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    r *= base;
    if (r > cap) return cap;
  }
  return r;
}

}  // namespace

std::uint32_t ceil_rational_power(std::uint64_t base, Rational exponent) {
  if (base <= 1) return 1;
  const u128 target = saturating_pow(base, exponent.num);
  std::uint64_t x = static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(base), exponent.value())));
  x = std::max<std::uint64_t>(x, 1);
  while (x > 1 && saturating_pow(x - 1, exponent.den) >= target) --x;
  while (saturating_pow(x, exponent.den) < target) ++x;
  return static_cast<std::uint32_t>(x);
}

std::uint32_t phase_threshold(std::size_t delta, const DegreeReduceOptions& opts) {
  return std::max(ceil_rational_power(delta, opts.exponent), std::max<std::uint32_t>(opts.d_floor, 1));
}

DegreeReduceResult degree_reduce(const Graph& g, const DegreeReduceOptions& opts) {
  if (opts.target_delta < 1) throw std::invalid_argument("target_delta must be >= 1");
  DegreeReduceResult result{PartialSolution{opts.kind, {}, {}, {}}, GraphView(g), {}, {}};
  for (std::uint64_t phase = 0;; ++phase) {
    const std::size_t delta = result.remainder.max_degree();
    if (delta <= opts.target_delta) break;
    const std::uint32_t d = phase_threshold(delta, opts);
    std::optional<ReduceResult> step;
    try {
      step.emplace(reduce_once(result.remainder, opts.kind, d, opts.seed, phase, opts.mis_probability));
    } catch (const PartitionStall&) {
      result.report.stop_reason = "partition-stall";
      break;
    }
    result.solution.merge(step->solution);
    result.report.phases.push_back(step->entry);
    result.partitions.push_back(std::move(step->partition));
    result.remainder = std::move(step->remainder);
    if (step->entry.delta_after >= delta) {
      result.report.stop_reason = "no-progress";
      break;
    }
  }
  return result;
}

namespace {

constexpr std::uint64_t kFinishPhaseBase = 1ULL << 40;

}  // namespace

std::uint64_t finish_node_priority(std::uint64_t seed, std::size_t round, NodeId v) {
  return stream_key(seed, kFinishPhaseBase + round, v, StreamTag::FinishPriority);
}

std::uint64_t finish_edge_priority(std::uint64_t seed, std::size_t round, NodeId u, NodeId v) {
  Edge e = normalized({u, v});
  return stream_key(seed, kFinishPhaseBase + round, (std::uint64_t{e.u} << 32) | e.v, StreamTag::FinishPriority);
}

bool verify_maximal(const Graph& g, const PartialSolution& sol) {
  const NodeId n = g.num_nodes();
  if (sol.kind == Kind::Matching) {
    std::vector<std::uint8_t> matched(n, 0);
    for (const Edge& e : sol.edges) {
      if (e.u >= n || e.v >= n || !g.has_edge(e.u, e.v)) return false;
      if (matched[e.u] || matched[e.v]) return false;
      matched[e.u] = matched[e.v] = 1;
    }
    for (const Edge& e : g.edges())
      if (!matched[e.u] && !matched[e.v]) return false;
    return true;
  }
  std::vector<std::uint8_t> in_set(n, 0);
  for (NodeId v : sol.nodes) {
    if (v >= n || in_set[v]) return false;
    in_set[v] = 1;
  }
  for (NodeId v = 0; v < n; ++v) {
    bool dominated = in_set[v] != 0;
    for (NodeId u : g.neighbors(v)) {
      if (in_set[u] && in_set[v]) return false;
      if (in_set[u]) dominated = true;
    }
    if (!dominated) return false;
  }
  return true;
}

PipelineResult solve_centralized(const Graph& g, const DegreeReduceOptions& opts) {
  DegreeReduceResult reduced = degree_reduce(g, opts);
  FinishResult finish = finish_greedy(reduced.remainder, opts.kind, opts.seed);
  PipelineResult out;
  out.solution = std::move(reduced.solution);
  out.solution.merge(finish.solution);
  out.report = std::move(reduced.report);
  out.finish_rounds = finish.rounds;
  return out;
}

bool layer_decay_holds(const HPartition& hp, std::uint64_t lambda) {
  auto suffix = hp.suffix_sizes();
  for (std::uint32_t i = 1; i <= hp.ell; ++i)
    if (u128{hp.d} * suffix[i + 1] > u128{2} * lambda * suffix[i]) return false;
  return true;
}

ArboricityScheduleResult arboricity_schedule(const Graph& g, Kind kind, std::uint64_t seed,
                                             const DegreeReduceOptions& base) {
  ArboricityScheduleResult out;
  DegreeReduceOptions opts = base;
  opts.kind = kind;
  opts.seed = seed;
  for (std::uint64_t lambda_hat = 2;; lambda_hat = lambda_hat * lambda_hat) {
    const std::uint64_t floor64 = 2 * lambda_hat + 1;
    opts.d_floor = static_cast<std::uint32_t>(std::min<std::uint64_t>(std::max<std::uint64_t>(base.d_floor, floor64),
                                                                      std::numeric_limits<std::uint32_t>::max()));
    DegreeReduceResult run = degree_reduce(g, opts);
    bool ok = run.report.stop_reason != "partition-stall";
    for (const HPartition& hp : run.partitions) ok = ok && layer_decay_holds(hp, lambda_hat);
    // first phase threshold, or the floor when nothing ran
    std::uint32_t d_first = run.report.phases.empty() ? opts.d_floor : run.report.phases.front().d_used;
    out.attempts.push_back({lambda_hat, d_first, ok});
    // once 2λ̂+1 exceeds Δ every node sits in layer 1 and the check cannot fail
    if (ok || floor64 > g.max_degree() || lambda_hat >= (1ULL << 31)) {
      FinishResult finish = finish_greedy(run.remainder, kind, seed);
      out.solution = std::move(run.solution);
      out.solution.merge(finish.solution);
      out.report = std::move(run.report);
      return out;
    }
  }
}

nlohmann::ordered_json to_json(const ReductionReport& report) {
  nlohmann::ordered_json phases = nlohmann::ordered_json::array();
  for (const PhaseEntry& e : report.phases) {
    nlohmann::ordered_json j;
    j["delta_before"] = e.delta_before;
    j["d_used"] = e.d_used;
    j["layers"] = e.layers;
    j["heavy_nodes_before"] = e.heavy_nodes_before;
    j["heavy_survivors_after"] = e.heavy_survivors_after;
    j["delta_after"] = e.delta_after;
    phases.push_back(std::move(j));
  }
  nlohmann::ordered_json j;
  j["phases"] = std::move(phases);
  j["stop_reason"] = report.stop_reason;
  return j;
}

nlohmann::ordered_json solution_to_json(const PartialSolution& sol, std::uint64_t seed, const ReductionReport& report) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(kind_name(sol.kind));
  nlohmann::ordered_json selected = nlohmann::ordered_json::array();
  if (sol.kind == Kind::Matching)
    for (const Edge& e : sol.edges) selected.push_back({e.u, e.v});
  else
    for (NodeId v : sol.nodes) selected.push_back(v);
  j["selected"] = std::move(selected);
  j["seed"] = seed;
  j["phases"] = to_json(report);
  return j;
}

}  // namespace mpcsim
