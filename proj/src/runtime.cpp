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

#include "mpcsim/runtime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <queue>

#include "mpcsim/rng.hpp"

namespace mpcsim {

namespace {

// fan-in of the all-reduce tree
Word aggregation_fan(Word capacity) { return std::max<Word>(2, capacity / 2); }

}  // namespace

Word capacity_for(NodeId n, double delta) {
  if (n <= 1) return 1;
  const double raw = std::pow(static_cast<double>(n), delta);
  return std::max<Word>(1, static_cast<Word>(std::ceil(raw - 1e-9 * raw)));
}

ClusterConfig ClusterConfig::for_graph(const Graph& g, double delta, double c_total) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must be in (0, 1]");
  ClusterConfig cfg;
  cfg.n = g.num_nodes();
  cfg.m = g.num_edges();
  cfg.delta = delta;
  cfg.c_total = c_total;
  cfg.capacity = capacity_for(cfg.n, delta);
  const double logn = std::log2(std::max<double>(cfg.n, 2));
  const double total = c_total * static_cast<double>(std::max<std::size_t>({cfg.m, cfg.n, 1})) * logn;
  cfg.machines = static_cast<MachineId>(std::max(1.0, std::ceil(total / static_cast<double>(cfg.capacity))));
  return cfg;
}

void ClusterConfig::validate() const {
  if (machines < 1) throw std::invalid_argument("cluster needs at least one machine");
  if (capacity < 1) throw std::invalid_argument("machine capacity must be positive");
  if (static_cast<double>(machines) * static_cast<double>(capacity) < static_cast<double>(m))
    throw std::invalid_argument("total memory M*S is below the input size m");
}

std::string_view budget_kind_name(BudgetKind k) {
  switch (k) {
    case BudgetKind::Send: return "SendBudgetExceeded";
    case BudgetKind::Receive: return "ReceiveBudgetExceeded";
    case BudgetKind::Memory: return "MemoryExceeded";
  }
  return "unknown";
}

BudgetExceeded::BudgetExceeded(BudgetKind kind, MachineId machine, std::uint64_t round, Word words, Word capacity,
                               const std::string& label)
    : std::runtime_error(std::string(budget_kind_name(kind)) + ": machine " + std::to_string(machine) + " round " +
                         std::to_string(round) + (label.empty() ? "" : " (" + label + ")") + " uses " +
                         std::to_string(words) + " words of " + std::to_string(capacity)),
      kind_(kind),
      machine_(machine),
      round_(round),
      words_(words) {}

nlohmann::ordered_json to_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["rounds"] = s.rounds;
  j["rounds_normalized"] = s.rounds_normalized;
  j["peak_words"] = s.peak_words;
  j["peak_machine"] = s.peak_machine;
  j["total_message_words"] = s.total_message_words;
  j["message_count"] = s.message_count;
  j["violations"] = s.violations;
  j["capacity"] = s.capacity;
  j["machines"] = s.machines;
  j["c_total"] = s.c_total;
  j["delta"] = s.delta;
  return j;
}

void Outbox::send(NodeId from, NodeId to, std::span<const Word> payload) {
  headers_.push_back({from, to, false, data_.size(), payload.size()});
  data_.insert(data_.end(), payload.begin(), payload.end());
}

void Outbox::send_to_machine(MachineId to, std::span<const Word> payload) {
  headers_.push_back({kNoNode, to, true, data_.size(), payload.size()});
  data_.insert(data_.end(), payload.begin(), payload.end());
}

Cluster::Cluster(const Graph& g, ClusterConfig cfg, std::uint64_t seed) : g_(&g), cfg_(std::move(cfg)), seed_(seed) {
  cfg_.validate();
  const NodeId n = g.num_nodes();
  if (cfg_.n != n) throw std::invalid_argument("cluster config was made for a different node count");
  node_words_.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    node_words_[v] = g.degree(v) * cfg_.cost.words_per_id;
    if (node_words_[v] > cfg_.capacity)
      throw CapacityError("node " + std::to_string(v) + " needs " + std::to_string(node_words_[v]) +
                          " words for its adjacency but machines hold S=" + std::to_string(cfg_.capacity));
  }
  host_.assign(n, 0);
  place(node_words_);
  per_node_budget_ = n == 0 ? cfg_.capacity
                            : std::min<Word>(cfg_.capacity, static_cast<Word>(cfg_.machines) * cfg_.capacity / n);
  outboxes_.resize(cfg_.machines);
  inbox_offsets_.assign(std::size_t{n} + 1, 0);
  machine_inbox_offsets_.assign(std::size_t{cfg_.machines} + 1, 0);

  if (!cfg_.trace_dir) {
    if (const char* env = std::getenv("MPC_TRACE_DIR"); env && *env) cfg_.trace_dir = std::filesystem::path(env);
  }
  if (cfg_.trace_dir) {
    std::filesystem::create_directories(*cfg_.trace_dir);
    trace_path_ = *cfg_.trace_dir / (cfg_.trace_name + ".ndjson");
    trace_log_ = std::make_unique<std::ofstream>(*trace_path_, std::ios::trunc);
  }
}

Cluster init_cluster(const Graph& g, const ClusterConfig& cfg, std::uint64_t seed) { return Cluster(g, cfg, seed); }

void Cluster::place(std::span<const Word> weights) {
  // Longest processing time first: heaviest node to the least loaded machine.
  // Ties between equal weights follow a seeded order. Every machine keeps one word
  // free for all-reduce results and inner tree machines keep room for a fan-in.
  const NodeId n = g_->num_nodes();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::uint64_t> tie(n);
  for (NodeId v = 0; v < n; ++v) tie[v] = stream_key(seed_, 0, v, StreamTag::Placement);
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    return tie[a] < tie[b];
  });
  using Slot = std::pair<Word, MachineId>;
  std::priority_queue<Slot, std::vector<Slot>, std::greater<>> heap;
  const Word fan = aggregation_fan(cfg_.capacity);
  for (MachineId m = 0; m < cfg_.machines; ++m) {
    const Word reserve = cfg_.machines == 1 ? 0 : (m % fan == 0 ? fan : 1);
    heap.push({reserve, m});
  }
  for (NodeId v : order) {
    auto [load, m] = heap.top();
    heap.pop();
    host_[v] = m;
    heap.push({load + weights[v], m});
  }
  resident_offsets_.assign(std::size_t{cfg_.machines} + 1, 0);
  for (NodeId v = 0; v < n; ++v) ++resident_offsets_[host_[v] + 1];
  for (MachineId m = 0; m < cfg_.machines; ++m) resident_offsets_[m + 1] += resident_offsets_[m];
  resident_.resize(n);
  std::vector<std::size_t> fill(resident_offsets_.begin(), resident_offsets_.end() - 1);
  for (NodeId v = 0; v < n; ++v) resident_[fill[host_[v]]++] = v;
}

Word Cluster::machine_words(MachineId m) const {
  Word w = 0;
  for (NodeId v : resident(m)) w += node_words_[v];
  return w;
}

std::span<const Received> Cluster::inbox(NodeId v) const {
  return {inbox_.data() + inbox_offsets_[v], inbox_.data() + inbox_offsets_[v + 1]};
}

std::span<const Received> Cluster::machine_inbox(MachineId m) const {
  return {machine_inbox_.data() + machine_inbox_offsets_[m], machine_inbox_.data() + machine_inbox_offsets_[m + 1]};
}

const RoundTrace& Cluster::execute_node_round(const NodeStep& step, const std::string& label) {
  return execute_round(
      [&](MachineId, std::span<const NodeId> nodes, Outbox& out) {
        for (NodeId v : nodes) step(v, out);
      },
      label);
}

const RoundTrace& Cluster::execute_round(const MachineStep& step, const std::string& label) {
  const NodeId n = g_->num_nodes();
  const MachineId machines = cfg_.machines;
  const std::uint64_t round = traces_.size();

  for (Outbox& o : outboxes_) o.clear();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 64) if (cfg_.parallel)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(machines); ++i) {
    const MachineId m = static_cast<MachineId>(i);
    try {
      step(m, resident(m), outboxes_[m]);
    } catch (...) {
#pragma omp critical(mpcsim_step_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  // route: stable by (destination, source machine, send order)
  std::vector<std::size_t> node_count(std::size_t{n} + 1, 0);
  std::vector<std::size_t> machine_count(std::size_t{machines} + 1, 0);
  std::vector<Word> sent(machines, 0), received(machines, 0);
  RoundTrace trace;
  trace.round = round;
  trace.label = label;
  for (MachineId m = 0; m < machines; ++m) {
    sent[m] = outboxes_[m].words();
    for (const auto& h : outboxes_[m].headers_) {
      if (h.to_machine) {
        if (h.dst >= machines) throw std::out_of_range("message to unknown machine " + std::to_string(h.dst));
        ++machine_count[h.dst + 1];
        received[h.dst] += h.len;
      } else {
        if (h.dst >= n) throw std::out_of_range("message to unknown node " + std::to_string(h.dst));
        ++node_count[h.dst + 1];
        received[host_[h.dst]] += h.len;
      }
      trace.total_message_words += h.len;
      ++trace.message_count;
    }
  }
  for (NodeId v = 0; v < n; ++v) node_count[v + 1] += node_count[v];
  for (MachineId m = 0; m < machines; ++m) machine_count[m + 1] += machine_count[m];
  const std::size_t node_msgs = node_count[n];

  struct Slot {
    MachineId machine;
    std::size_t header;
  };
  std::vector<Slot> slots(trace.message_count);
  {
    std::vector<std::size_t> node_fill(node_count.begin(), node_count.end() - 1);
    std::vector<std::size_t> machine_fill(machine_count.begin(), machine_count.end() - 1);
    for (MachineId m = 0; m < machines; ++m) {
      const auto& headers = outboxes_[m].headers_;
      for (std::size_t k = 0; k < headers.size(); ++k) {
        const auto& h = headers[k];
        const std::size_t at = h.to_machine ? node_msgs + machine_fill[h.dst]++ : node_fill[h.dst]++;
        slots[at] = {m, k};
      }
    }
  }
  inbox_data_.assign(trace.total_message_words, 0);
  std::vector<Received> delivered(trace.message_count);
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const Outbox& box = outboxes_[slots[s].machine];
    const auto& h = box.headers_[slots[s].header];
    std::copy_n(box.data_.begin() + static_cast<std::ptrdiff_t>(h.offset), h.len, inbox_data_.begin() + cursor);
    delivered[s] = {h.src, std::span<const Word>(inbox_data_.data() + cursor, h.len)};
    cursor += h.len;
  }
  inbox_.assign(delivered.begin(), delivered.begin() + static_cast<std::ptrdiff_t>(node_msgs));
  machine_inbox_.assign(delivered.begin() + static_cast<std::ptrdiff_t>(node_msgs), delivered.end());
  inbox_offsets_ = std::move(node_count);
  machine_inbox_offsets_ = std::move(machine_count);

  // ledgers
  const Word cap = cfg_.capacity;
  std::optional<BudgetExceeded> violation;
  if (cfg_.record_snapshots) trace.snapshots.reserve(machines);
  for (MachineId m = 0; m < machines; ++m) {
    const Word used = machine_words(m) + received[m];
    if (cfg_.record_snapshots) trace.snapshots.push_back({m, used, sent[m], received[m]});
    if (used > trace.peak_words || m == 0) {
      trace.peak_words = std::max(trace.peak_words, used);
      if (used == trace.peak_words) trace.peak_machine = m;
    }
    trace.max_sent = std::max(trace.max_sent, sent[m]);
    trace.max_received = std::max(trace.max_received, received[m]);
    if (!violation) {
      if (sent[m] > cap)
        violation.emplace(BudgetKind::Send, m, round, sent[m], cap, label);
      else if (received[m] > cap)
        violation.emplace(BudgetKind::Receive, m, round, received[m], cap, label);
      else if (used > cap)
        violation.emplace(BudgetKind::Memory, m, round, used, cap, label);
    }
  }
  if (violation) trace.violation = violation->what();

  if (trace_log_) {
    auto& log = *trace_log_;
    for (MachineId m = 0; m < machines; ++m) {
      log << "{\"round\":" << round << ",\"machine\":" << m << ",\"words_used\":" << machine_words(m) + received[m]
          << ",\"sent\":" << sent[m] << ",\"received\":" << received[m] << "}\n";
    }
    log.flush();
  }
  traces_.push_back(std::move(trace));
  if (violation) throw *violation;
  return traces_.back();
}

Word Cluster::rebalance(std::span<const std::uint8_t> alive, std::span<const Word> projected) {
  const NodeId n = g_->num_nodes();
  const std::size_t alive_count = static_cast<std::size_t>(std::count_if(alive.begin(), alive.end(), [](auto a) { return a != 0; }));
  if (alive_count == 0) return per_node_budget_;
  std::vector<Word> weights(n);
  for (NodeId v = 0; v < n; ++v) weights[v] = (alive[v] && !projected.empty()) ? projected[v] : node_words_[v];
  place(weights);
  per_node_budget_ =
      std::min<Word>(cfg_.capacity, static_cast<Word>(cfg_.machines) * cfg_.capacity / static_cast<Word>(alive_count));
  return per_node_budget_;
}

Word Cluster::all_reduce(std::span<const Word> per_node, bool sum, const std::string& label) {
  const MachineId machines = cfg_.machines;
  auto combine = [sum](Word a, Word b) { return sum ? a + b : std::max(a, b); };
  std::vector<Word> partial(machines, 0);
  for (MachineId m = 0; m < machines; ++m)
    for (NodeId v : resident(m)) partial[m] = combine(partial[m], per_node[v]);
  if (machines == 1) return partial[0];

  const std::uint64_t fan = aggregation_fan(cfg_.capacity);
  std::vector<std::uint64_t> stride{1};
  while (stride.back() < machines) stride.push_back(stride.back() * fan);
  const std::size_t levels = stride.size() - 1;

  auto absorb = [&](MachineId m) {
    for (const Received& r : machine_inbox(m))
      for (Word w : r.payload) partial[m] = combine(partial[m], w);
  };
  for (std::size_t t = 1; t <= levels; ++t) {
    execute_round(
        [&](MachineId m, std::span<const NodeId>, Outbox& out) {
          if (t > 1) absorb(m);
          if (m % stride[t - 1] != 0 || m % stride[t] == 0) return;
          const Word w = partial[m];
          out.send_to_machine(static_cast<MachineId>(m / stride[t] * stride[t]), std::span<const Word>(&w, 1));
        },
        label + "/up");
  }
  absorb(0);
  const Word result = partial[0];
  std::vector<Word> known(machines, 0);
  known[0] = result;
  for (std::size_t t = levels; t >= 1; --t) {
    execute_round(
        [&](MachineId m, std::span<const NodeId>, Outbox& out) {
          if (m % stride[t] != 0) return;
          const Word w = known[m];
          for (std::uint64_t j = 1; j < fan; ++j) {
            const std::uint64_t child = m + j * stride[t - 1];
            if (child >= machines) break;
            out.send_to_machine(static_cast<MachineId>(child), std::span<const Word>(&w, 1));
          }
        },
        label + "/down");
    for (MachineId m = 0; m < machines; ++m)
      for (const Received& r : machine_inbox(m)) known[m] = r.payload[0];
  }
  return result;
}

Word Cluster::all_reduce_max(std::span<const Word> per_node, const std::string& label) {
  return all_reduce(per_node, false, label);
}

Word Cluster::all_reduce_sum(std::span<const Word> per_node, const std::string& label) {
  return all_reduce(per_node, true, label);
}

RunSummary Cluster::metrics() const {
  RunSummary s;
  s.rounds = traces_.size();
  s.rounds_normalized = static_cast<double>(s.rounds) * cfg_.delta;
  s.capacity = cfg_.capacity;
  s.machines = cfg_.machines;
  s.c_total = cfg_.c_total;
  s.delta = cfg_.delta;
  for (const RoundTrace& t : traces_) {
    if (t.peak_words > s.peak_words || (s.peak_words == 0 && t.round == 0)) {
      s.peak_words = t.peak_words;
      s.peak_machine = t.peak_machine;
    }
    s.total_message_words += t.total_message_words;
    s.message_count += t.message_count;
    if (!t.violation.empty()) s.violations.push_back(t.violation);
  }
  return s;
}

Word peak_from_trace_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  Word peak = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    peak = std::max<Word>(peak, nlohmann::json::parse(line).at("words_used").get<Word>());
  }
  return peak;
}

}  // namespace mpcsim
