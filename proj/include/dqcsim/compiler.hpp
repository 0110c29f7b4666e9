// Copyright 2026 The dqcsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Distributed compiler: partitions logical qubits over QPUs so that few
/// two-qubit gates straddle devices, then lowers the abstract circuit into
/// per-QPU instruction streams in which every remote gate becomes a telegate
/// (one EPR pair, two classical bits, at most two Pauli corrections).

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "dqcsim/circuit.hpp"
#include "dqcsim/error.hpp"
#include "dqcsim/network.hpp"
#include "json.hpp"

namespace dqcsim {

/// Weighted graph over logical qubits; edge weight = number of two-qubit
/// gates acting on the pair.
class InteractionGraph {
   public:
    explicit InteractionGraph(std::size_t num_vertices) : adjacency_(num_vertices) {
    }

    void add_edge(std::size_t a, std::size_t b, std::size_t weight = 1) {
        if (a == b || a >= adjacency_.size() || b >= adjacency_.size()) {
            throw CompileError("bad interaction edge " + std::to_string(a) + "-" + std::to_string(b));
        }
        edges_[std::minmax(a, b)] += weight;
        bump(a, b, weight);
        bump(b, a, weight);
    }

    std::size_t num_vertices() const noexcept {
        return adjacency_.size();
    }
    std::size_t weight(std::size_t a, std::size_t b) const {
        auto it = edges_.find(std::minmax(a, b));
        return it == edges_.end() ? 0 : it->second;
    }
    const std::map<std::pair<std::size_t, std::size_t>, std::size_t> &edges() const noexcept {
        return edges_;
    }
    /// (neighbor, weight) pairs in ascending neighbor order.
    const std::vector<std::pair<std::size_t, std::size_t>> &neighbors(std::size_t v) const {
        return adjacency_.at(v);
    }

    /// Total weight of edges whose endpoints carry different part labels.
    std::size_t cut_weight(std::span<const std::size_t> part) const {
        std::size_t cut = 0;
        for (const auto &[e, w] : edges_) {
            if (part[e.first] != part[e.second]) {
                cut += w;
            }
        }
        return cut;
    }

   private:
    void bump(std::size_t from, std::size_t to, std::size_t weight) {
        auto &adj = adjacency_[from];
        auto it = std::lower_bound(adj.begin(), adj.end(), std::make_pair(to, std::size_t{0}));
        if (it != adj.end() && it->first == to) {
            it->second += weight;
        } else {
            adj.insert(it, {to, weight});
        }
    }

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edges_;
};

inline InteractionGraph build_interaction_graph(const AbstractCircuit &c) {
    InteractionGraph g(c.num_qubits());
    for (const auto &gate : c.gates()) {
        if (gate.operands.size() == 2) {
            g.add_edge(gate.operands[0], gate.operands[1]);
        }
    }
    return g;
}

enum class PartitionMethod {
    /// Exhaustive search when the instance is small enough, else heuristic.
    Automatic,
    /// Greedy seeding followed by Kernighan-Lin swap/move refinement.
    Heuristic,
    /// Minimum cut over every capacity-feasible assignment.
    Exhaustive,
    /// Greedy seeding alone; the baseline the heuristic must not lose to.
    Greedy,
};

namespace detail {

inline void check_capacity(std::size_t n, std::span<const std::size_t> capacities) {
    std::size_t total = 0;
    for (auto c : capacities) {
        total += c;
    }
    if (capacities.empty() || total < n) {
        throw CompileError("insufficient capacity: " + std::to_string(n) + " logical qubits, " +
                           std::to_string(total) + " data qubits");
    }
}

/// Each vertex in index order goes to the part it is most strongly connected
/// to; ties prefer the part with more free capacity, then the lower index.
inline std::vector<std::size_t> greedy_assignment(const InteractionGraph &g, std::span<const std::size_t> caps) {
    std::size_t n = g.num_vertices();
    std::size_t k = caps.size();
    std::vector<std::size_t> part(n, k);
    std::vector<std::size_t> load(k, 0);
    for (std::size_t v = 0; v < n; v++) {
        std::vector<std::size_t> conn(k, 0);
        for (auto [u, w] : g.neighbors(v)) {
            if (part[u] < k) {
                conn[part[u]] += w;
            }
        }
        std::size_t best = k;
        for (std::size_t p = 0; p < k; p++) {
            if (load[p] >= caps[p]) {
                continue;
            }
            if (best == k || conn[p] > conn[best] ||
                (conn[p] == conn[best] && caps[p] - load[p] > caps[best] - load[best])) {
                best = p;
            }
        }
        part[v] = best;
        load[best]++;
    }
    return part;
}

/// Kernighan-Lin style refinement. Each pass tentatively applies the best
/// unlocked swap or move (even when negative), locks the touched vertices,
/// and finally keeps the prefix of the pass with the largest total gain.
inline void kernighan_lin_refine(const InteractionGraph &g, std::span<const std::size_t> caps,
                                 std::vector<std::size_t> &part) {
    std::size_t n = g.num_vertices();
    std::size_t k = caps.size();
    using Gain = long long;
    auto move_gain = [&](std::size_t v, std::size_t to) {
        Gain gain = 0;
        for (auto [u, w] : g.neighbors(v)) {
            if (part[u] == to) {
                gain += static_cast<Gain>(w);
            } else if (part[u] == part[v]) {
                gain -= static_cast<Gain>(w);
            }
        }
        return gain;
    };
    while (true) {
        std::vector<std::size_t> load(k, 0);
        for (auto p : part) {
            load[p]++;
        }
        std::vector<bool> locked(n, false);
        struct Step {
            std::size_t u, from_u, v, from_v;  // v == n for single moves
        };
        std::vector<Step> steps;
        Gain running = 0, best_total = 0;
        std::size_t best_len = 0;
        while (true) {
            std::optional<Step> pick;
            std::size_t pick_target = 0;
            Gain pick_gain = std::numeric_limits<Gain>::min();
            for (std::size_t u = 0; u < n; u++) {
                if (locked[u]) {
                    continue;
                }
                for (std::size_t v = u + 1; v < n; v++) {
                    if (locked[v] || part[u] == part[v]) {
                        continue;
                    }
                    Gain gain = move_gain(u, part[v]) + move_gain(v, part[u]) - 2 * static_cast<Gain>(g.weight(u, v));
                    if (gain > pick_gain) {
                        pick_gain = gain;
                        pick = Step{u, part[u], v, part[v]};
                        pick_target = 0;
                    }
                }
                for (std::size_t p = 0; p < k; p++) {
                    if (p == part[u] || load[p] >= caps[p]) {
                        continue;
                    }
                    Gain gain = move_gain(u, p);
                    if (gain > pick_gain) {
                        pick_gain = gain;
                        pick = Step{u, part[u], n, 0};
                        pick_target = p;
                    }
                }
            }
            if (!pick) {
                break;
            }
            if (pick->v == n) {
                load[part[pick->u]]--;
                part[pick->u] = pick_target;
                load[part[pick->u]]++;
            } else {
                std::swap(part[pick->u], part[pick->v]);
                locked[pick->v] = true;
            }
            locked[pick->u] = true;
            steps.push_back(*pick);
            running += pick_gain;
            if (running > best_total) {
                best_total = running;
                best_len = steps.size();
            }
        }
        for (std::size_t i = steps.size(); i > best_len; i--) {
            const auto &s = steps[i - 1];
            part[s.u] = s.from_u;
            if (s.v != n) {
                part[s.v] = s.from_v;
            }
        }
        if (best_total <= 0) {
            return;
        }
    }
}

/// Depth-first enumeration in lexicographic order of the assignment vector;
/// the first assignment reaching the minimum cut wins.
inline std::vector<std::size_t> exhaustive_assignment(const InteractionGraph &g, std::span<const std::size_t> caps) {
    std::size_t n = g.num_vertices();
    std::size_t k = caps.size();
    std::vector<std::size_t> part(n, k), best;
    std::vector<std::size_t> load(k, 0);
    std::size_t best_cut = std::numeric_limits<std::size_t>::max();
    auto recurse = [&](auto &&self, std::size_t v, std::size_t cut) -> void {
        if (cut >= best_cut) {
            return;
        }
        if (v == n) {
            best_cut = cut;
            best = part;
            return;
        }
        for (std::size_t p = 0; p < k; p++) {
            if (load[p] >= caps[p]) {
                continue;
            }
            std::size_t added = 0;
            for (auto [u, w] : g.neighbors(v)) {
                if (u < v && part[u] != p) {
                    added += w;
                }
            }
            part[v] = p;
            load[p]++;
            self(self, v + 1, cut + added);
            load[p]--;
            part[v] = k;
        }
    };
    recurse(recurse, 0, 0);
    return best;
}

inline bool small_enough_for_exhaustive(std::size_t n, std::size_t k) {
    if (n > 12) {
        return false;
    }
    double states = 1.0;
    for (std::size_t i = 0; i < n; i++) {
        states *= static_cast<double>(k);
    }
    return states <= static_cast<double>(1 << 20);
}

}  // namespace detail

/// Part index per vertex. Deterministic for identical inputs.
inline std::vector<std::size_t> partition_assignment(const InteractionGraph &g, std::span<const std::size_t> capacities,
                                                     PartitionMethod method = PartitionMethod::Automatic) {
    detail::check_capacity(g.num_vertices(), capacities);
    if (method == PartitionMethod::Automatic) {
        method = detail::small_enough_for_exhaustive(g.num_vertices(), capacities.size()) ? PartitionMethod::Exhaustive
                                                                                           : PartitionMethod::Heuristic;
    }
    switch (method) {
        case PartitionMethod::Exhaustive:
            return detail::exhaustive_assignment(g, capacities);
        case PartitionMethod::Greedy:
            return detail::greedy_assignment(g, capacities);
        default: {
            auto part = detail::greedy_assignment(g, capacities);
            detail::kernighan_lin_refine(g, capacities, part);
            return part;
        }
    }
}

struct PhysicalQubit {
    std::string qpu;
    std::size_t index = 0;

    bool operator==(const PhysicalQubit &) const = default;
    auto operator<=>(const PhysicalQubit &) const = default;
};

/// Logical qubit -> (QPU, physical data-qubit index).
class Placement {
   public:
    Placement() = default;
    explicit Placement(std::vector<PhysicalQubit> assignment) : assignment_(std::move(assignment)) {
    }

    std::size_t size() const noexcept {
        return assignment_.size();
    }
    const PhysicalQubit &operator[](std::size_t logical) const {
        return assignment_.at(logical);
    }
    const std::vector<PhysicalQubit> &assignment() const noexcept {
        return assignment_;
    }
    /// Logical qubits hosted on `qpu`, ascending.
    std::vector<std::size_t> logical_on(std::string_view qpu) const {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < assignment_.size(); q++) {
            if (assignment_[q].qpu == qpu) {
                out.push_back(q);
            }
        }
        return out;
    }

    void validate(std::span<const QpuSpec> qpus, std::size_t num_logical) const {
        if (assignment_.size() != num_logical) {
            throw CompileError("placement covers " + std::to_string(assignment_.size()) + " qubits, circuit has " +
                               std::to_string(num_logical));
        }
        std::set<PhysicalQubit> used;
        for (std::size_t q = 0; q < assignment_.size(); q++) {
            const auto &p = assignment_[q];
            auto it = std::find_if(qpus.begin(), qpus.end(), [&](const QpuSpec &s) { return s.name == p.qpu; });
            if (it == qpus.end()) {
                throw CompileError("placement of q" + std::to_string(q) + " names unknown QPU '" + p.qpu + "'");
            }
            if (p.index >= it->data_qubits) {
                throw CompileError("placement of q" + std::to_string(q) + " uses " + p.qpu + "[" +
                                   std::to_string(p.index) + "], not a data qubit");
            }
            if (!used.insert(p).second) {
                throw CompileError("placement maps two logical qubits to " + p.qpu + "[" + std::to_string(p.index) +
                                   "]");
            }
        }
    }

    bool operator==(const Placement &) const = default;

   private:
    std::vector<PhysicalQubit> assignment_;
};

/// Placement minimizing the cut; logical qubits sharing a QPU take its data
/// qubits in ascending order.
inline Placement partition(const InteractionGraph &g, std::span<const QpuSpec> qpus,
                           PartitionMethod method = PartitionMethod::Automatic) {
    std::vector<std::size_t> caps;
    for (const auto &q : qpus) {
        caps.push_back(q.data_qubits);
    }
    auto part = partition_assignment(g, caps, method);
    std::vector<std::size_t> next(qpus.size(), 0);
    std::vector<PhysicalQubit> out;
    for (auto p : part) {
        out.push_back({qpus[p].name, next[p]++});
    }
    return Placement(std::move(out));
}

inline std::size_t cut_weight(const InteractionGraph &g, const Placement &placement) {
    std::map<std::string, std::size_t> ids;
    std::vector<std::size_t> part;
    for (const auto &p : placement.assignment()) {
        part.push_back(ids.emplace(p.qpu, ids.size()).first->second);
    }
    return g.cut_weight(part);
}

/// Placement file: {"placement": [{"qubit": 0, "qpu": "QPU0", "index": 0}, ...]}
inline Placement parse_placement(std::string_view text) {
    try {
        auto doc = nlohmann::json::parse(text);
        const auto &entries = doc.at("placement");
        std::vector<std::optional<PhysicalQubit>> slots(entries.size());
        for (const auto &e : entries) {
            auto q = e.at("qubit").get<std::size_t>();
            if (q >= slots.size() || slots[q]) {
                throw ConfigError("placement: logical qubit " + std::to_string(q) + " missing or repeated");
            }
            slots[q] = PhysicalQubit{e.at("qpu").get<std::string>(), e.at("index").get<std::size_t>()};
        }
        std::vector<PhysicalQubit> out;
        for (auto &s : slots) {
            out.push_back(*s);
        }
        return Placement(std::move(out));
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("placement file: ") + e.what());
    }
}

inline std::string serialize_placement(const Placement &p) {
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t q = 0; q < p.size(); q++) {
        entries.push_back({{"qubit", q}, {"qpu", p[q].qpu}, {"index", p[q].index}});
    }
    return nlohmann::json{{"placement", entries}}.dump(2) + "\n";
}

// Instructions of one QPU's stream. Qubit indices are physical indices of the
// QPU that owns the stream.

struct LocalGate {
    Gate gate;
};

/// Issued by the initiating QPU; blocks until the pair is delivered.
struct EprRequest {
    std::string link;
    std::size_t local_comm = 0;
    std::string remote_qpu;
    std::size_t remote_comm = 0;
    std::size_t pair_id = 0;
};

struct MeasureCommQubit {
    std::size_t comm_qubit = 0;
    std::size_t message_id = 0;
};

struct SendBit {
    std::string to;
    std::size_t message_id = 0;
};

struct RecvBit {
    std::string from;
    std::size_t message_id = 0;
};

/// Applied iff the received bit `condition` is 1.
struct ConditionalGate {
    Gate gate;
    std::size_t condition = 0;
};

struct ResetComm {
    std::size_t comm_qubit = 0;
};

using DistributedInstruction =
    std::variant<LocalGate, EprRequest, MeasureCommQubit, SendBit, RecvBit, ConditionalGate, ResetComm>;

struct QpuStream {
    std::string qpu;
    std::vector<DistributedInstruction> instructions;
};

struct DistributedProgram {
    std::size_t num_logical_qubits = 0;
    std::size_t num_clbits = 0;
    Placement placement;
    /// One stream per QPU, in the order the QPUs were given to the compiler.
    std::vector<QpuStream> streams;
    std::size_t remote_gate_count = 0;

    const QpuStream &stream(std::string_view qpu) const {
        for (const auto &s : streams) {
            if (s.qpu == qpu) {
                return s;
            }
        }
        throw SimulationError("program has no stream for QPU '" + std::string(qpu) + "'");
    }

    template <typename T>
    std::size_t count() const {
        std::size_t n = 0;
        for (const auto &s : streams) {
            for (const auto &ins : s.instructions) {
                n += std::holds_alternative<T>(ins) ? 1 : 0;
            }
        }
        return n;
    }
};

namespace detail {

inline const QpuSpec &find_spec(std::span<const QpuSpec> qpus, std::string_view name) {
    for (const auto &q : qpus) {
        if (q.name == name) {
            return q;
        }
    }
    throw CompileError("unknown QPU '" + std::string(name) + "'");
}

inline std::size_t stream_index(std::span<const QpuSpec> qpus, std::string_view name) {
    for (std::size_t i = 0; i < qpus.size(); i++) {
        if (qpus[i].name == name) {
            return i;
        }
    }
    throw CompileError("unknown QPU '" + std::string(name) + "'");
}

/// Communication qubit a QPU dedicates to a given peer: peers share the
/// available comm qubits round-robin in QPU order.
inline std::size_t comm_for_peer(std::span<const QpuSpec> qpus, std::size_t self, std::size_t peer) {
    const auto &spec = qpus[self];
    if (spec.comm_qubits == 0) {
        throw CompileError("QPU " + spec.name + " hosts a remote gate but has no communication qubit");
    }
    std::size_t slot = peer < self ? peer : peer - 1;
    return spec.comm_qubit(slot % spec.comm_qubits);
}

inline void require_adjacent(const QpuSpec &spec, std::size_t a, std::size_t b) {
    if (!spec.adjacent(a, b)) {
        throw CompileError("QPU " + spec.name + ": physical qubits " + std::to_string(a) + " and " + std::to_string(b) +
                           " are not coupled (no routing is performed)");
    }
}

}  // namespace detail

/// Lowers `c` onto `qpus`. Local gates keep their place in the owning QPU's
/// stream; a remote CZ/CNOT with control on QPU A and target on QPU B becomes
///
///   A: epr_request; cnot(c, eA); measure eA -> m1; send m1
///   B: recv m1; if m1 x(eB); cz(eB, t) | cnot(eB, t); h(eB); measure eB -> m2;
///      send m2; reset eB
///   A: recv m2; if m2 z(c); reset eA
inline DistributedProgram compile(const AbstractCircuit &c, std::span<const QpuSpec> qpus,
                                  const std::optional<Placement> &placement = std::nullopt,
                                  PartitionMethod method = PartitionMethod::Automatic) {
    if (qpus.empty()) {
        throw CompileError("no QPUs to compile for");
    }
    for (const auto &q : qpus) {
        try {
            q.validate();
        } catch (const ConfigError &e) {
            throw CompileError(e.what());
        }
    }
    DistributedProgram prog;
    prog.num_logical_qubits = c.num_qubits();
    prog.num_clbits = c.num_clbits();
    prog.placement = placement ? *placement : partition(build_interaction_graph(c), qpus, method);
    prog.placement.validate(qpus, c.num_qubits());
    for (const auto &q : qpus) {
        prog.streams.push_back({q.name, {}});
    }

    std::size_t next_pair = 0;
    std::size_t next_message = 0;
    for (const auto &g : c.gates()) {
        const auto &p0 = prog.placement[g.operands[0]];
        std::size_t s0 = detail::stream_index(qpus, p0.qpu);
        if (g.operands.size() == 1) {
            Gate local = g;
            local.operands = {p0.index};
            prog.streams[s0].instructions.push_back(LocalGate{local});
            continue;
        }
        const auto &p1 = prog.placement[g.operands[1]];
        std::size_t s1 = detail::stream_index(qpus, p1.qpu);
        if (s0 == s1) {
            detail::require_adjacent(qpus[s0], p0.index, p1.index);
            Gate local = g;
            local.operands = {p0.index, p1.index};
            prog.streams[s0].instructions.push_back(LocalGate{local});
            continue;
        }

        const auto &a = qpus[s0];
        const auto &b = qpus[s1];
        std::size_t ea = detail::comm_for_peer(qpus, s0, s1);
        std::size_t eb = detail::comm_for_peer(qpus, s1, s0);
        detail::require_adjacent(a, p0.index, ea);
        detail::require_adjacent(b, eb, p1.index);
        std::size_t m1 = next_message++;
        std::size_t m2 = next_message++;
        auto &sa = prog.streams[s0].instructions;
        auto &sb = prog.streams[s1].instructions;

        sa.push_back(EprRequest{a.name + "-" + b.name, ea, b.name, eb, next_pair++});
        sa.push_back(LocalGate{Gate::cnot(p0.index, ea)});
        sa.push_back(MeasureCommQubit{ea, m1});
        sa.push_back(SendBit{b.name, m1});

        sb.push_back(RecvBit{a.name, m1});
        sb.push_back(ConditionalGate{Gate::x(eb), m1});
        sb.push_back(LocalGate{g.kind == GateKind::CZ ? Gate::cz(eb, p1.index) : Gate::cnot(eb, p1.index)});
        sb.push_back(LocalGate{Gate::h(eb)});
        sb.push_back(MeasureCommQubit{eb, m2});
        sb.push_back(SendBit{a.name, m2});
        sb.push_back(ResetComm{eb});

        sa.push_back(RecvBit{b.name, m2});
        sa.push_back(ConditionalGate{Gate::z(p0.index), m2});
        sa.push_back(ResetComm{ea});
        prog.remote_gate_count++;
    }
    return prog;
}

inline std::string instruction_str(const DistributedInstruction &ins) {
    return std::visit(
        [](const auto &i) -> std::string {
            using T = std::decay_t<decltype(i)>;
            if constexpr (std::is_same_v<T, LocalGate>) {
                return i.gate.str();
            } else if constexpr (std::is_same_v<T, EprRequest>) {
                return "epr_request pair=" + std::to_string(i.pair_id) + " link=" + i.link +
                       " local=" + std::to_string(i.local_comm) + " remote=" + i.remote_qpu + "[" +
                       std::to_string(i.remote_comm) + "]";
            } else if constexpr (std::is_same_v<T, MeasureCommQubit>) {
                return "measure_comm " + std::to_string(i.comm_qubit) + " -> m" + std::to_string(i.message_id);
            } else if constexpr (std::is_same_v<T, SendBit>) {
                return "send m" + std::to_string(i.message_id) + " -> " + i.to;
            } else if constexpr (std::is_same_v<T, RecvBit>) {
                return "recv m" + std::to_string(i.message_id) + " <- " + i.from;
            } else if constexpr (std::is_same_v<T, ConditionalGate>) {
                return "if m" + std::to_string(i.condition) + " " + i.gate.str();
            } else {
                return "reset_comm " + std::to_string(i.comm_qubit);
            }
        },
        ins);
}

/// Stable text listing of a compiled program.
inline std::string dump_program(const DistributedProgram &p) {
    std::ostringstream out;
    out << "remote_gate_count " << p.remote_gate_count << "\n";
    out << "epr_pairs " << p.count<EprRequest>() << "\n";
    out << "placement\n";
    for (std::size_t q = 0; q < p.placement.size(); q++) {
        out << "  q" << q << " -> " << p.placement[q].qpu << "[" << p.placement[q].index << "]\n";
    }
    for (const auto &s : p.streams) {
        out << "qpu " << s.qpu << "\n";
        for (const auto &ins : s.instructions) {
            out << "  " << instruction_str(ins) << "\n";
        }
    }
    return out.str();
}

}  // namespace dqcsim
