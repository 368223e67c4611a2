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

// Experiment runner: corpus materialization, centralized and MPC runs, oracle
// comparison, derived cover, CSV / JSON reports.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mpcsim/generators.hpp"
#include "mpcsim/mpc_reduction.hpp"

namespace mpcsim {

enum class Mode { Centralized, Mpc, Both };
std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

struct InstanceSpec {
  Family family = Family::Tree;
  GeneratorParams params;
  std::vector<std::uint64_t> seeds;  // one instance per generator seed
  std::optional<std::filesystem::path> file;  // load instead of generating
};

struct ExperimentSpec {
  std::string name = "experiment";
  std::vector<InstanceSpec> corpus;
  PipelineConfig pipeline;
  std::vector<Kind> kinds{Kind::Matching};
  std::vector<std::uint64_t> seeds;  // pipeline seeds
  Mode mode = Mode::Both;
  std::filesystem::path output = "out";
};

class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws std::invalid_argument on a malformed spec or when it names no instance or seed.
ExperimentSpec parse_experiment_spec(const nlohmann::json& j);
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ExperimentSpec& spec);

struct Instance {
  std::string id;
  Graph graph;
  GraphMetadata meta;
};

std::vector<Instance> materialize(const ExperimentSpec& spec);

/// FNV-1a 64-bit, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);
/// Digest of the canonical solution JSON text.
std::string solution_digest(const nlohmann::ordered_json& solution);

struct TwoApprox {
  std::size_t matching_size = 0;
  std::vector<NodeId> cover;  // matched endpoints, sorted
};

/// Throws InvariantError unless sol is a maximal matching of g.
TwoApprox derive_2approx(const Graph& g, const PartialSolution& sol);
bool is_vertex_cover(const Graph& g, std::span<const NodeId> cover);

struct RunRecord {
  std::string instance;
  std::string family;
  NodeId n = 0;
  std::size_t m = 0;
  std::size_t max_degree = 0;
  std::uint32_t degeneracy = 0;
  Kind kind = Kind::Matching;
  std::uint64_t seed = 0;
  Mode mode = Mode::Both;
  std::string digest_centralized;  // empty when not run
  std::string digest_mpc;
  std::size_t solution_size = 0;
  std::vector<std::size_t> delta_before;
  std::vector<std::size_t> delta_after;
  std::string stop_reason;
  std::uint64_t rounds = 0;  // cluster rounds (MPC runs only)
  std::uint64_t partition_rounds = 0;
  Word peak_words = 0;
  std::optional<std::size_t> matching_size;
  std::optional<std::size_t> cover_size;
  std::vector<std::pair<std::string, bool>> invariants;
  nlohmann::ordered_json metrics;

  bool passed() const;
  std::string label() const;  // instance:kind:seed
};

nlohmann::ordered_json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

/// Runs one instance under one kind and seed.
RunRecord run_instance(const Instance& inst, const PipelineConfig& pipeline, Kind kind, std::uint64_t seed, Mode mode,
                       const std::optional<std::filesystem::path>& solution_dir = std::nullopt);

/// One record per (instance, kind, seed). Writes records.jsonl and solutions/ under
/// spec.output. Errors are rethrown as HarnessError naming the instance.
std::vector<RunRecord> run(const ExperimentSpec& spec);

std::vector<RunRecord> load_records(const std::filesystem::path& jsonl);

struct ReportRow {
  std::string instance;
  NodeId n = 0;
  std::size_t m = 0;
  std::uint32_t degeneracy = 0;
  std::vector<std::size_t> delta_before;
  std::vector<std::size_t> delta_after;
  std::uint64_t rounds = 0;
  Word peak_words = 0;
  std::vector<std::pair<std::string, bool>> invariants;
};

ReportRow report_row(const RunRecord& r);
std::string report_csv(const std::vector<ReportRow>& rows);
std::vector<ReportRow> parse_report_csv(std::string_view text);
nlohmann::ordered_json summarize(const std::vector<ReportRow>& rows);

/// Writes report.csv and summary.json into dir and returns the summary.
nlohmann::ordered_json report(const std::vector<RunRecord>& records, const std::filesystem::path& dir);

}  // namespace mpcsim
