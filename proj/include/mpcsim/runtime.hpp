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

// Low-memory MPC cluster simulator.
//
// M machines with S words each run synchronous rounds. In a round every machine
// runs a local step over its resident nodes and emits messages addressed to a node
// (routed to whichever machine hosts it) or to a machine. After routing, each
// machine's ledger is checked: words sent <= S, words received <= S and resident
// words plus inbox <= S. The first violation is recorded in the trace and thrown.
//
// Local steps may run concurrently (OpenMP, one machine per iteration). Messages are
// merged in machine order, so traces do not depend on the schedule.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mpcsim/graph.hpp"

namespace mpcsim {

using Word = std::uint64_t;
using MachineId = std::uint32_t;

struct CostModel {
  Word words_per_id = 1;    // a node id; one adjacency entry
  Word words_per_edge = 2;  // an explicit (u, v) pair
};

struct ClusterConfig {
  NodeId n = 0;
  std::size_t m = 0;
  double delta = 0.5;
  Word capacity = 0;       // S = ceil(n^delta)
  MachineId machines = 0;  // M with M*S >= c_total * m * log2 n
  double c_total = 4.0;
  CostModel cost;
  bool parallel = true;
  bool record_snapshots = false;  // per-machine ledgers in every RoundTrace
  std::string trace_name = "run";
  /// Trace directory; when unset, MPC_TRACE_DIR is consulted at cluster creation.
  std::optional<std::filesystem::path> trace_dir;

  static ClusterConfig for_graph(const Graph& g, double delta, double c_total = 4.0);
  /// Throws std::invalid_argument unless M >= 1, S >= 1 and M*S >= m.
  void validate() const;
};

/// ceil(n^delta), robust to floating error at exact powers.
Word capacity_for(NodeId n, double delta);

struct MachineLedger {
  MachineId machine = 0;
  Word words_used = 0;
  Word sent = 0;
  Word received = 0;
  friend bool operator==(const MachineLedger&, const MachineLedger&) = default;
};

struct RoundTrace {
  std::uint64_t round = 0;
  std::string label;
  std::vector<MachineLedger> snapshots;  // every machine, when recording is on
  Word peak_words = 0;
  MachineId peak_machine = 0;
  Word max_sent = 0;
  Word max_received = 0;
  Word total_message_words = 0;
  std::uint64_t message_count = 0;
  std::string violation;
};

enum class BudgetKind { Send, Receive, Memory };
std::string_view budget_kind_name(BudgetKind k);

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(BudgetKind kind, MachineId machine, std::uint64_t round, Word words, Word capacity,
                 const std::string& label);
  BudgetKind kind() const { return kind_; }
  MachineId machine() const { return machine_; }
  std::uint64_t round() const { return round_; }
  Word words() const { return words_; }

 private:
  BudgetKind kind_;
  MachineId machine_;
  std::uint64_t round_;
  Word words_;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunSummary {
  std::uint64_t rounds = 0;
  double rounds_normalized = 0;  // rounds * delta, i.e. rounds / (1/delta)
  Word peak_words = 0;
  MachineId peak_machine = 0;
  Word total_message_words = 0;
  std::uint64_t message_count = 0;
  std::vector<std::string> violations;
  Word capacity = 0;
  MachineId machines = 0;
  double c_total = 0;
  double delta = 0;
};

nlohmann::ordered_json to_json(const RunSummary& s);

class Outbox {
 public:
  void send(NodeId from, NodeId to, std::span<const Word> payload);
  void send(NodeId from, NodeId to, Word w) { send(from, to, std::span<const Word>(&w, 1)); }
  void send_to_machine(MachineId to, std::span<const Word> payload);
  Word words() const { return data_.size(); }
  std::size_t count() const { return headers_.size(); }

 private:
  friend class Cluster;
  struct Header {
    NodeId src;
    std::uint32_t dst;
    bool to_machine;
    std::size_t offset;
    std::size_t len;
  };
  void clear() {
    headers_.clear();
    data_.clear();
  }
  std::vector<Header> headers_;
  std::vector<Word> data_;
};

struct Received {
  NodeId src = kNoNode;  // kNoNode for machine-level messages
  std::span<const Word> payload;
};

class Cluster {
 public:
  using MachineStep = std::function<void(MachineId, std::span<const NodeId>, Outbox&)>;
  using NodeStep = std::function<void(NodeId, Outbox&)>;

  /// Places every node with its adjacency on one machine (longest-processing-time
  /// packing). Throws CapacityError if a single adjacency exceeds S.
  Cluster(const Graph& g, ClusterConfig cfg, std::uint64_t seed);

  const Graph& graph() const { return *g_; }
  const ClusterConfig& config() const { return cfg_; }
  Word capacity() const { return cfg_.capacity; }
  MachineId num_machines() const { return cfg_.machines; }

  MachineId host(NodeId v) const { return host_[v]; }
  std::span<const NodeId> resident(MachineId m) const {
    return {resident_.data() + resident_offsets_[m], resident_.data() + resident_offsets_[m + 1]};
  }
  Word node_words(NodeId v) const { return node_words_[v]; }
  /// Words stored for node v on its host. Safe to call from v's machine step.
  void set_node_words(NodeId v, Word w) { node_words_[v] = w; }
  Word machine_words(MachineId m) const;

  /// One synchronous round. Throws BudgetExceeded on the first violated budget.
  const RoundTrace& execute_round(const MachineStep& step, const std::string& label = {});
  /// Round whose local step runs independently for each resident node.
  const RoundTrace& execute_node_round(const NodeStep& step, const std::string& label = {});

  /// Messages delivered to v in the most recent round, in deterministic order.
  std::span<const Received> inbox(NodeId v) const;
  std::span<const Received> machine_inbox(MachineId m) const;

  /// Redistributes nodes by weight (projected words when given, else stored words).
  /// Returns the per-node budget floor(M*S / alive) capped at S; a zero alive count
  /// leaves the placement untouched.
  Word rebalance(std::span<const std::uint8_t> alive, std::span<const Word> projected = {});
  Word per_node_budget() const { return per_node_budget_; }

  /// Max over per-node values via a fan-in-S tree to machine 0 and back.
  /// Costs 2 * ceil(log_S M) rounds (none for a single machine).
  Word all_reduce_max(std::span<const Word> per_node, const std::string& label = "all-reduce");
  Word all_reduce_sum(std::span<const Word> per_node, const std::string& label = "all-reduce");

  const std::vector<RoundTrace>& traces() const { return traces_; }
  std::uint64_t rounds() const { return traces_.size(); }
  RunSummary metrics() const;
  /// Path of the newline-delimited JSON trace log, if one is being written.
  std::optional<std::filesystem::path> trace_path() const { return trace_path_; }

 private:
  void place(std::span<const Word> weights);
  Word all_reduce(std::span<const Word> per_node, bool sum, const std::string& label);

  const Graph* g_;
  ClusterConfig cfg_;
  std::uint64_t seed_;
  std::vector<MachineId> host_;
  std::vector<std::size_t> resident_offsets_;
  std::vector<NodeId> resident_;
  std::vector<Word> node_words_;
  Word per_node_budget_ = 0;

  std::vector<Outbox> outboxes_;
  std::vector<Word> inbox_data_;
  std::vector<Received> inbox_;
  std::vector<std::size_t> inbox_offsets_;          // per node
  std::vector<Received> machine_inbox_;
  std::vector<std::size_t> machine_inbox_offsets_;  // per machine

  std::vector<RoundTrace> traces_;
  std::optional<std::filesystem::path> trace_path_;
  std::unique_ptr<std::ofstream> trace_log_;
};

/// Same as constructing a Cluster; kept for symmetry with the other entry points.
Cluster init_cluster(const Graph& g, const ClusterConfig& cfg, std::uint64_t seed);

/// Peak words recomputed from a trace log written by a Cluster.
Word peak_from_trace_log(const std::filesystem::path& path);

}  // namespace mpcsim
