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

// The layered reduction executed on a simulated cluster.
//
// Partition: phases of iterations i = 0..k. Iteration i >= 1 first connects every
// node's virtual neighborhood to a clique, so a node sees its 2^i-hop ball in one
// gather round; each repetition then removes the lowest 2^i layers. The removed
// blocks ("chunks") are replayed top down for selection.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mpcsim/graph.hpp"
#include "mpcsim/reduction.hpp"
#include "mpcsim/runtime.hpp"

namespace mpcsim {

struct RepetitionCounts {
  std::uint32_t first = 60;  // iteration 0
  std::uint32_t later = 20;  // iterations >= 1
  friend bool operator==(const RepetitionCounts&, const RepetitionCounts&) = default;
};

struct ExponentiationSchedule {
  std::size_t delta_max = 0;
  Word capacity = 0;
  /// Δ² > S: no exponentiation, one layer per round.
  bool fallback = false;
  std::uint32_t k = 0;
  std::vector<std::uint32_t> repetitions;  // per iteration 0..k; empty in fallback mode
  std::uint32_t preprocessing_layers = 0;
  bool overridden = false;

  std::uint32_t iterations() const { return static_cast<std::uint32_t>(repetitions.size()); }
  std::uint32_t radius(std::uint32_t i) const { return fallback ? 1 : 1u << i; }
};

/// ceil(c_pre * log2((1/delta) * log2 log2 n)), at least 0.
std::uint32_t preprocessing_layer_count(NodeId n, double delta, double c_pre);

/// k = largest integer with Δ^(2^k+1) <= S, capped so that 2^k <= max(n, 2).
ExponentiationSchedule compute_schedule(std::size_t delta_max, Word capacity, NodeId n, double delta,
                                        double c_pre = 2.0,
                                        std::optional<RepetitionCounts> repetitions = std::nullopt);

struct Chunk {
  std::uint32_t phase = 0;  // 0 for the pre-processing layers
  std::uint32_t iteration = 0;
  std::uint32_t repetition = 0;
  std::uint32_t first = 0;  // layer interval [first, last]
  std::uint32_t last = 0;
  std::uint32_t radius = 1;
  bool preprocessing = false;

  std::uint32_t width() const { return last - first + 1; }
  friend bool operator==(const Chunk&, const Chunk&) = default;
};

inline constexpr std::uint32_t kNoChunk = 0xffffffffu;

class ChunkIndex {
 public:
  /// Throws InvariantError unless c starts right after the previous chunk.
  void append(const Chunk& c);
  const std::vector<Chunk>& chunks() const { return chunks_; }
  std::size_t size() const { return chunks_.size(); }
  const Chunk& operator[](std::size_t i) const { return chunks_[i]; }
  std::uint32_t layers() const { return chunks_.empty() ? 0 : chunks_.back().last; }
  /// Index of the chunk holding this layer. Throws std::out_of_range.
  std::uint32_t chunk_of(std::uint32_t layer) const;

 private:
  std::vector<Chunk> chunks_;
};

using Neighborhoods = std::vector<std::vector<NodeId>>;

/// Alive original neighbors of every alive node (empty lists for the rest).
Neighborhoods initial_neighborhoods(const GraphView& view);

/// One round: each alive node sends its alive virtual neighbors to each of them and
/// takes the union of what it receives. Lists stay sorted and never contain the owner.
void connect_cliques(Cluster& cluster, std::span<const std::uint8_t> alive, Neighborhoods& virt,
                     const std::string& label = "connect");

/// Layer (1..radius) of every alive node in the subgraph induced by `alive`, or 0 when
/// it lies deeper. For radius 1 the answer is local; otherwise one gather round ships
/// each node's alive original adjacency to its virtual neighbors and the peeling is
/// simulated on original edges only.
std::vector<std::uint32_t> gather_and_peel(Cluster& cluster, std::span<const std::uint8_t> alive,
                                           const Neighborhoods& virt, std::uint32_t radius, std::uint32_t d,
                                           const std::string& label = "gather");

struct PartitionOptions {
  double c_pre = 2.0;     // 0 disables pre-processing and the retained neighborhoods
  bool adaptive = false;  // leave a repetition loop once the node-decrease target is met
};

struct IterationStats {
  std::uint32_t phase = 0;
  std::uint32_t iteration = 0;
  std::uint32_t radius = 1;
  std::uint32_t repetitions_run = 0;
  std::size_t alive_before = 0;
  std::size_t alive_after = 0;
  std::size_t virtual_edges = 0;  // added edges after the connect step, each counted once
  std::size_t max_virtual_degree = 0;
  std::uint64_t rounds = 0;
};

struct MpcPartition {
  HPartition hp;
  ChunkIndex chunks;
  std::vector<std::uint32_t> removal_chunk;  // chunk that removed v, kNoChunk outside the view
  /// In-chunk virtual neighbors kept for selection (chunks wider than one layer).
  Neighborhoods retained;
  bool retained_available = false;
  std::vector<IterationStats> iterations;
  std::uint32_t phases = 0;
  std::size_t alive_start = 0;
  std::uint64_t rounds = 0;
  ExponentiationSchedule schedule;
};

/// Layer map identical to h_partition(view, d). Throws PartitionStall like the
/// sequential version and BudgetExceeded on a violated budget.
MpcPartition mpc_h_partition(Cluster& cluster, const GraphView& view, std::uint32_t d,
                             const ExponentiationSchedule& schedule, const PartitionOptions& opts = {});

struct MpcProposals {
  ProposalSet props;
  /// Layers of v's neighbors, aligned with graph().neighbors(v); 0 if not alive.
  std::vector<std::vector<std::uint32_t>> neighbor_layer;
  std::uint64_t rounds = 0;
};

/// Matching: a layer exchange round, then a round carrying each mark to its parent.
/// Mis: one round carrying (layer, mark) to every neighbor.
MpcProposals mpc_mark_propose(Cluster& cluster, const GraphView& view, const HPartition& hp, Kind kind,
                              std::uint64_t seed, std::uint64_t phase = 0,
                              std::optional<double> mis_probability = std::nullopt);

struct MpcSelection {
  PartialSolution solution;
  std::uint64_t rounds = 0;
};

/// Replays the chunks from the top. A chunk wider than one layer gathers the records
/// of its members' in-chunk neighborhoods in one round; every chunk ends with a round
/// that tells lower chunks about selected edges or nodes.
MpcSelection mpc_select(Cluster& cluster, const GraphView& view, const MpcPartition& part,
                        const MpcProposals& proposals);

/// Luby-style finish replayed on the cluster, two rounds per LOCAL round.
/// Equal to finish_greedy under the same seed.
FinishResult mpc_finish(Cluster& cluster, const GraphView& view, Kind kind, std::uint64_t seed);

struct PipelineConfig {
  Kind kind = Kind::Matching;
  double delta = 0.5;
  double c_total = 4.0;
  double c_pre = 2.0;
  Rational exponent{1, 10};
  std::uint32_t d_floor = 1;  // d = max(ceil(Δ^exponent), d_floor)
  std::size_t target_delta = 1;
  std::uint64_t seed = 0;
  bool adaptive = false;
  std::optional<RepetitionCounts> repetitions;
  bool parallel = true;
  std::optional<std::filesystem::path> trace_dir;
  std::string trace_name = "run";
};

/// key = value lines; '#' starts a comment. Keys: kind, delta, c_total, c_pre,
/// exponent, d_floor, target_delta, seed, adaptive, repetitions ("60/20"), parallel,
/// trace_dir, trace_name. Throws std::invalid_argument.
PipelineConfig parse_pipeline_config(std::string_view text);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
std::string pipeline_config_to_string(const PipelineConfig& cfg);

/// Options for the sequential reference that must reproduce the MPC run.
DegreeReduceOptions centralized_options(const PipelineConfig& cfg);

struct MpcPhaseMetrics {
  std::size_t delta = 0;
  std::uint32_t d = 0;
  std::uint32_t k = 0;
  bool fallback = false;
  std::uint32_t layers = 0;
  std::size_t chunks = 0;
  std::uint32_t partition_phases = 0;
  std::uint64_t partition_rounds = 0;
  std::uint64_t propose_rounds = 0;
  std::uint64_t select_rounds = 0;
  std::vector<IterationStats> iterations;
};

struct MpcPipelineResult {
  PartialSolution solution;
  ReductionReport report;
  RunSummary run;
  std::vector<MpcPhaseMetrics> phases;
  std::uint64_t partition_rounds = 0;
  std::uint64_t finish_rounds = 0;  // cluster rounds
  std::size_t finish_iterations = 0;
};

MpcPipelineResult mpc_pipeline(const Graph& g, const PipelineConfig& cfg);

nlohmann::ordered_json to_json(const IterationStats& s);
nlohmann::ordered_json metrics_to_json(const MpcPipelineResult& r);

}  // namespace mpcsim
