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

// Sequential reference for the layered degree reduction: partition, mark and
// propose, top-down selection, iterated until the degree is small, followed by a
// randomized greedy finish. The MPC simulation in mpc_reduction.hpp must agree
// with these functions bit for bit under the same seed.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mpcsim/graph.hpp"

namespace mpcsim {

enum class Kind { Matching, Mis };

std::string_view kind_name(Kind k);
Kind parse_kind(std::string_view name);

class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Marked and proposed candidates of one mark-and-propose round.
///
/// Matching: marked_parent[v] is the parent v marked (kNoNode if none) and
/// proposed_child[v] is the child whose marked edge into v was proposed.
/// Mis: marked[v] and proposed[v] flags.
struct ProposalSet {
  Kind kind = Kind::Matching;
  std::uint64_t seed = 0;
  std::uint64_t phase = 0;
  std::vector<NodeId> marked_parent;
  std::vector<NodeId> proposed_child;
  std::vector<std::uint8_t> marked;
  std::vector<std::uint8_t> proposed;

  std::size_t marked_count() const;
  std::size_t proposed_count() const;
  friend bool operator==(const ProposalSet&, const ProposalSet&) = default;
};

/// Selected edges (matching) or nodes (mis) and the nodes they remove.
/// All three vectors are kept sorted.
struct PartialSolution {
  Kind kind = Kind::Matching;
  std::vector<Edge> edges;
  std::vector<NodeId> nodes;
  std::vector<NodeId> removed;

  std::size_t size() const { return kind == Kind::Matching ? edges.size() : nodes.size(); }
  void merge(const PartialSolution& other);
  void normalize();
  friend bool operator==(const PartialSolution&, const PartialSolution&) = default;
};

struct PhaseEntry {
  std::size_t delta_before = 0;
  std::uint32_t d_used = 0;
  std::uint32_t layers = 0;
  std::size_t heavy_nodes_before = 0;     // in-degree >= d^4 in the partition
  std::size_t heavy_survivors_after = 0;  // still alive with >= d^4 alive children
  std::size_t delta_after = 0;
  friend bool operator==(const PhaseEntry&, const PhaseEntry&) = default;
};

struct ReductionReport {
  std::vector<PhaseEntry> phases;
  /// "target-reached", "partition-stall" or "no-progress".
  std::string stop_reason = "target-reached";

  bool stalled() const { return stop_reason != "target-reached"; }
  friend bool operator==(const ReductionReport&, const ReductionReport&) = default;
};

/// p = d^-2.
double default_mis_probability(std::uint32_t d);

ProposalSet mark_and_propose_matching(const GraphView& view, const HPartition& hp, std::uint64_t seed,
                                      std::uint64_t phase = 0);
ProposalSet mark_and_propose_mis(const GraphView& view, const HPartition& hp, double p, std::uint64_t seed,
                                 std::uint64_t phase = 0);

/// Sweep layers ell..1; commit every remaining proposed edge into the layer.
PartialSolution select_matching(const GraphView& view, const HPartition& hp, const ProposalSet& props);
/// Sweep layers ell..1; commit every remaining proposed node of the layer and drop its
/// neighbors. Throws InvariantError if two adjacent same-layer nodes are proposed.
PartialSolution select_mis(const GraphView& view, const HPartition& hp, const ProposalSet& props);

/// Throws InvariantError unless props satisfies the ProposalSet contract for (view, hp).
void check_proposals(const GraphView& view, const HPartition& hp, const ProposalSet& props);

struct ReduceResult {
  PartialSolution solution;
  GraphView remainder;
  PhaseEntry entry;
  HPartition partition;
  ProposalSet proposals;
};

/// One partition + mark/propose + select round with explicit d. For Mis the marking
/// probability defaults to d^-2. Propagates PartitionStall.
ReduceResult reduce_once(const GraphView& view, Kind kind, std::uint32_t d, std::uint64_t seed,
                         std::uint64_t phase = 0, std::optional<double> mis_probability = std::nullopt);

/// Per-phase heavy-node statistics for a finished round.
PhaseEntry phase_statistics(const GraphView& before, const HPartition& hp, const GraphView& after);

struct Rational {
  std::uint64_t num = 1;
  std::uint64_t den = 10;
  /// Accepts "a/b" or a decimal like "0.25".
  static Rational parse(std::string_view text);
  std::string str() const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Smallest integer x >= 1 with x^den >= base^num, i.e. ceil(base^(num/den)).
std::uint32_t ceil_rational_power(std::uint64_t base, Rational exponent);

struct DegreeReduceOptions {
  Kind kind = Kind::Matching;
  std::size_t target_delta = 1;
  Rational exponent{1, 10};
  std::uint32_t d_floor = 1;                 // d = max(ceil(Δ^exponent), d_floor)
  std::optional<double> mis_probability;     // default d^-2
  std::uint64_t seed = 0;
};

std::uint32_t phase_threshold(std::size_t delta, const DegreeReduceOptions& opts);

struct DegreeReduceResult {
  PartialSolution solution;
  GraphView remainder;
  ReductionReport report;
  std::vector<HPartition> partitions;  // one per executed phase
};

/// Repeats reduce_once until Δ <= target_delta. A stalled partition or a phase that
/// does not lower Δ ends the loop and is flagged in the report.
DegreeReduceResult degree_reduce(const Graph& g, const DegreeReduceOptions& opts);

struct FinishResult {
  PartialSolution solution;
  std::size_t rounds = 0;
};

/// Randomized greedy finish on the view. Mis: nodes whose priority beats every alive
/// neighbor join. Matching: an edge joins when it is the top-priority edge at both ends.
/// Runs until no alive edge is left; for Mis every remaining node is decided.
FinishResult finish_greedy(const GraphView& view, Kind kind, std::uint64_t seed);

/// Priority of node v (Mis) in finish round r.
std::uint64_t finish_node_priority(std::uint64_t seed, std::size_t round, NodeId v);
/// Priority of edge {u, v} (Matching) in finish round r.
std::uint64_t finish_edge_priority(std::uint64_t seed, std::size_t round, NodeId u, NodeId v);

bool verify_maximal(const Graph& g, const PartialSolution& sol);

struct PipelineResult {
  PartialSolution solution;
  ReductionReport report;
  std::size_t finish_rounds = 0;
};

/// degree_reduce followed by finish_greedy on its remainder.
PipelineResult solve_centralized(const Graph& g, const DegreeReduceOptions& opts);

struct EstimateAttempt {
  std::uint64_t lambda_hat = 0;
  std::uint32_t d = 0;
  bool decay_ok = false;
};

struct ArboricityScheduleResult {
  PartialSolution solution;
  std::vector<EstimateAttempt> attempts;
  ReductionReport report;
};

/// Runs the reduction with λ̂ = 2, 4, 16, 256, ... and d = max(ceil(Δ^exponent), 2λ̂+1)
/// until every phase partition satisfies |L_{>=i+1}| <= (2λ̂/d)|L_{>=i}|, then finishes.
ArboricityScheduleResult arboricity_schedule(const Graph& g, Kind kind, std::uint64_t seed,
                                             const DegreeReduceOptions& base = {});

/// True iff d * |L_{>=i+1}| <= 2 * lambda * |L_{>=i}| for every layer i.
bool layer_decay_holds(const HPartition& hp, std::uint64_t lambda);

nlohmann::ordered_json to_json(const ReductionReport& report);
/// {kind, selected, seed, phases}; selected lists edges as [u, v] pairs or node ids.
nlohmann::ordered_json solution_to_json(const PartialSolution& sol, std::uint64_t seed, const ReductionReport& report);

}  // namespace mpcsim
