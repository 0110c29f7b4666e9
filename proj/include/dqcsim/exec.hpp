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

/// Execution manager: a discrete-event scheduler that interleaves the per-QPU
/// instruction streams of one compiled program over the simulated network and
/// nodes, and records every step in an ExecutionLog.
///
/// Local instructions take zero time. EPR requests complete after the route's
/// latency; classical bits arrive after the classical route's latency. At each
/// step the runnable instruction with the earliest start time executes
/// (pending EPR deliveries first); ties between QPUs are broken by the
/// scheduling policy.
///
/// In exact mode a communication-qubit measurement and the conditional gates
/// that consume its bit are folded into one measure-and-correct channel, and
/// terminal data measurements are not sampled: the run yields the
/// pre-measurement state instead of a bitstring.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "dqcsim/analytics.hpp"
#include "dqcsim/circuit.hpp"
#include "dqcsim/compiler.hpp"
#include "dqcsim/detail/parallel.hpp"
#include "dqcsim/error.hpp"
#include "dqcsim/network.hpp"
#include "dqcsim/state.hpp"

namespace dqcsim {

enum class ExecutionMode { Trajectory, Exact };

inline std::string_view mode_name(ExecutionMode mode) {
    return mode == ExecutionMode::Exact ? "exact" : "trajectory";
}

inline ExecutionMode parse_mode(std::string_view name) {
    if (name == "exact") {
        return ExecutionMode::Exact;
    }
    if (name == "trajectory") {
        return ExecutionMode::Trajectory;
    }
    throw ConfigError("unknown mode '" + std::string(name) + "' (expected exact or trajectory)");
}

enum class SchedulePolicy {
    /// Among equally early instructions, rotate to the QPU after the last one.
    RoundRobin,
    /// Among equally early instructions, stay on the last QPU.
    Greedy,
};

enum class EventKind {
    GATE_APPLIED,
    EPR_REQUESTED,
    EPR_DELIVERED,
    MEASUREMENT,
    CLASSICAL_SENT,
    CLASSICAL_RECEIVED,
    COMM_RESET,
    RUN_START,
    RUN_END,
};

inline std::string_view event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::GATE_APPLIED:
            return "GATE_APPLIED";
        case EventKind::EPR_REQUESTED:
            return "EPR_REQUESTED";
        case EventKind::EPR_DELIVERED:
            return "EPR_DELIVERED";
        case EventKind::MEASUREMENT:
            return "MEASUREMENT";
        case EventKind::CLASSICAL_SENT:
            return "CLASSICAL_SENT";
        case EventKind::CLASSICAL_RECEIVED:
            return "CLASSICAL_RECEIVED";
        case EventKind::COMM_RESET:
            return "COMM_RESET";
        case EventKind::RUN_START:
            return "RUN_START";
        case EventKind::RUN_END:
            return "RUN_END";
    }
    return "?";
}

struct Event {
    SimTime time = 0;
    EventKind kind = EventKind::RUN_START;
    std::string qpu;  ///< empty for run-level events
    std::vector<std::pair<std::string, std::string>> fields;

    std::optional<std::string> field(std::string_view key) const {
        for (const auto &[k, v] : fields) {
            if (k == key) {
                return v;
            }
        }
        return std::nullopt;
    }

    /// `time kind qpu key=value...`; qpu is `-` for run-level events.
    std::string str() const {
        std::string out = std::to_string(time) + " " + std::string(event_kind_name(kind)) + " " +
                          (qpu.empty() ? std::string("-") : qpu);
        for (const auto &[k, v] : fields) {
            out += " " + k + "=" + v;
        }
        return out;
    }
};

struct ExecutionLog {
    std::string run_id;
    std::uint64_t seed = 0;
    ExecutionMode mode = ExecutionMode::Exact;
    std::vector<Event> events;
    std::optional<ClassicalOutcome> final_outcome;
    std::shared_ptr<const GlobalQuantumState> final_state;

    std::string serialize() const {
        std::string out;
        for (const auto &e : events) {
            out += e.str();
            out += '\n';
        }
        return out;
    }

    void write(const std::string &path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw SimulationError("cannot write log '" + path + "'");
        }
        f << serialize();
    }
};

struct ExecOptions {
    ExecutionMode mode = ExecutionMode::Exact;
    std::uint64_t seed = 0;
    SchedulePolicy policy = SchedulePolicy::RoundRobin;
    /// Treat single-qubit gates as perfect regardless of gate fidelity.
    bool noiseless_single_qubit = false;
    bool record_events = true;
    std::string run_id = "run";
};

struct RunResult {
    ExecutionLog log;
    /// Exact mode: state of the logical qubits (logical order) before the
    /// terminal measurements.
    std::optional<GlobalQuantumState> pre_measurement_state;
    /// Trajectory mode: the sampled classical register.
    std::optional<ClassicalOutcome> outcome;
    /// Exact mode: logical qubit read into each classical bit, and the readout
    /// error of the QPU that reads it.
    std::vector<std::optional<std::size_t>> clbit_sources;
    std::vector<double> clbit_errors;

    /// Exact-mode classical output distribution.
    Pmf exact_outcome_pmf() const {
        if (!pre_measurement_state) {
            throw SimulationError("outcome distribution needs an exact-mode result");
        }
        return clbit_pmf(pre_measurement_state->rho(), clbit_sources, clbit_errors);
    }
};

namespace detail {

class Executor {
   public:
    Executor(const DistributedProgram &program, const NetworkModel &net, const ExecOptions &options)
        : program_(program), net_(net), options_(options), rng_(options.seed) {
        allocate();
        for (std::size_t s = 0; s < program_.streams.size(); s++) {
            const auto &ins = program_.streams[s].instructions;
            for (std::size_t i = 0; i < ins.size(); i++) {
                if (auto *c = std::get_if<ConditionalGate>(&ins[i])) {
                    consumers_[c->condition].emplace_back(s, i);
                }
            }
        }
    }

    RunResult run() {
        log(EventKind::RUN_START, "",
            {{"run", options_.run_id}, {"seed", std::to_string(options_.seed)},
             {"mode", std::string(mode_name(options_.mode))}, {"qubits", std::to_string(qmap_.size())}});
        std::size_t k = streams_.size();
        last_ = options_.policy == SchedulePolicy::RoundRobin ? k - 1 : 0;
        while (true) {
            std::optional<std::size_t> chosen;
            SimTime best = 0;
            for (std::size_t step = 0; step < k; step++) {
                std::size_t s = options_.policy == SchedulePolicy::RoundRobin ? (last_ + 1 + step) % k
                                                                               : (last_ + step) % k;
                auto t = ready_time(s);
                if (t && (!chosen || *t < best)) {
                    chosen = s;
                    best = *t;
                }
            }
            auto delivery = std::min_element(deliveries_.begin(), deliveries_.end(), [](const auto &a, const auto &b) {
                return std::tie(a.time, a.seq) < std::tie(b.time, b.seq);
            });
            if (delivery != deliveries_.end() && (!chosen || delivery->time <= best)) {
                deliver(*delivery);
                deliveries_.erase(delivery);
                continue;
            }
            if (!chosen) {
                if (std::all_of(streams_.begin(), streams_.end(), [](const auto &st) { return st.done(); })) {
                    break;
                }
                throw SimulationError(deadlock_report());
            }
            last_ = *chosen;
            step_stream(*chosen, std::max(best, now_));
        }
        log(EventKind::RUN_END, "", {});
        return finish();
    }

   private:
    struct StreamState {
        const QpuSpec *spec = nullptr;
        const std::vector<DistributedInstruction> *instructions = nullptr;
        std::size_t pc = 0;
        SimTime clock = 0;
        bool epr_in_flight = false;
        bool done() const {
            return pc >= instructions->size();
        }
    };
    struct Message {
        std::optional<int> value;  // unknown in exact mode
        bool sent = false;
        SimTime arrival = 0;
        std::set<std::size_t> received_by;
    };
    struct CommStatus {
        bool busy = false;
        SimTime free_since = 0;
    };
    struct Delivery {
        SimTime time;
        std::size_t seq;
        std::size_t stream;
        std::size_t qubit_a, qubit_b;
        std::size_t pair_id;
        EprRoute route;
    };

    void allocate() {
        std::map<std::string, std::set<std::size_t>> comm;
        for (const auto &st : program_.streams) {
            for (const auto &ins : st.instructions) {
                if (auto *e = std::get_if<EprRequest>(&ins)) {
                    comm[st.qpu].insert(e->local_comm);
                    comm[e->remote_qpu].insert(e->remote_comm);
                } else if (auto *m = std::get_if<MeasureCommQubit>(&ins)) {
                    comm[st.qpu].insert(m->comm_qubit);
                } else if (auto *r = std::get_if<ResetComm>(&ins)) {
                    comm[st.qpu].insert(r->comm_qubit);
                }
            }
        }
        for (const auto &st : program_.streams) {
            const QpuSpec *spec = net_.find_qpu(st.qpu);
            if (!spec) {
                throw SimulationError("program uses QPU '" + st.qpu + "' which the network does not declare");
            }
            streams_.push_back({spec, &st.instructions});
            std::set<std::size_t> data;
            for (auto q : program_.placement.logical_on(st.qpu)) {
                data.insert(program_.placement[q].index);
            }
            std::size_t needed = qmap_.size() + data.size() + comm[st.qpu].size();
            if (needed > kMaxQubits) {
                throw SimulationError("program needs more than " + std::to_string(kMaxQubits) + " physical qubits");
            }
            for (auto d : data) {
                qmap_.add(st.qpu, d);
            }
            for (auto c : comm[st.qpu]) {
                if (c >= spec->total_qubits()) {
                    throw SimulationError("QPU " + st.qpu + " has no qubit " + std::to_string(c));
                }
                comm_status_[qmap_.add(st.qpu, c)] = {};
            }
        }
        if (qmap_.size() == 0) {
            throw SimulationError("program allocates no qubits");
        }
        state_.emplace(qmap_.size());
        for (std::size_t q = 0; q < program_.placement.size(); q++) {
            logical_global_.push_back(qmap_.at(program_.placement[q].qpu, program_.placement[q].index));
        }
        clbit_sources_.assign(program_.num_clbits, std::nullopt);
        clbit_errors_.assign(program_.num_clbits, 0.0);
        outcome_ = ClassicalOutcome(program_.num_clbits);
    }

    std::size_t global(std::size_t s, std::size_t physical) const {
        return qmap_.at(program_.streams[s].qpu, physical);
    }

    Gate to_global(std::size_t s, const Gate &g) const {
        Gate out = g;
        for (auto &q : out.operands) {
            q = global(s, q);
        }
        return out;
    }

    double fidelity_for(const QpuSpec &spec, const Gate &g) const {
        return options_.noiseless_single_qubit && g.operands.size() == 1 ? 1.0 : spec.gate_fidelity;
    }

    std::optional<SimTime> ready_time(std::size_t s) const {
        const auto &st = streams_[s];
        if (st.done() || st.epr_in_flight) {
            return std::nullopt;
        }
        const auto &ins = (*st.instructions)[st.pc];
        SimTime t = st.clock;
        if (auto *r = std::get_if<RecvBit>(&ins)) {
            auto it = messages_.find(r->message_id);
            if (it == messages_.end() || !it->second.sent) {
                return std::nullopt;
            }
            t = std::max(t, it->second.arrival);
        } else if (auto *c = std::get_if<ConditionalGate>(&ins)) {
            auto it = messages_.find(c->condition);
            if (it == messages_.end() || !it->second.received_by.count(s)) {
                return std::nullopt;
            }
        } else if (auto *e = std::get_if<EprRequest>(&ins)) {
            for (auto q : {global(s, e->local_comm), qmap_.at(e->remote_qpu, e->remote_comm)}) {
                const auto &cs = comm_status_.at(q);
                if (cs.busy) {
                    return std::nullopt;
                }
                t = std::max(t, cs.free_since);
            }
        }
        return std::max(t, now_);
    }

    void log(EventKind kind, const std::string &qpu, std::vector<std::pair<std::string, std::string>> fields) {
        if (options_.record_events) {
            events_.push_back({now_, kind, qpu, std::move(fields)});
        }
    }

    static std::string qubit_list(const std::vector<std::size_t> &qs) {
        std::string out;
        for (auto q : qs) {
            out += (out.empty() ? "" : ",") + std::to_string(q);
        }
        return out;
    }

    /// Exact mode keeps terminal measurements unsampled, so a measured data
    /// qubit may not be touched again; folded corrections must not be
    /// overtaken by other operations on their qubits.
    void check_touch(std::size_t s, const std::vector<std::size_t> &globals) const {
        for (auto q : globals) {
            if (measured_.count(q)) {
                throw SimulationError("exact mode needs terminal measurements: " + program_.streams[s].qpu +
                                      " qubit " + std::to_string(qmap_.physical(q).second) +
                                      " is used after being measured; use trajectory mode");
            }
            if (guarded_.count(q)) {
                throw SimulationError("exact mode cannot fold the correction for m" + std::to_string(guarded_.at(q)) +
                                      ": " + program_.streams[s].qpu + " touches its qubit first");
            }
        }
    }

    void step_stream(std::size_t s, SimTime t) {
        auto &st = streams_[s];
        now_ = t;
        st.clock = t;
        const auto &qpu = program_.streams[s].qpu;
        const auto &ins = (*st.instructions)[st.pc];
        bool advance = true;
        std::visit(
            [&](const auto &i) {
                using T = std::decay_t<decltype(i)>;
                if constexpr (std::is_same_v<T, LocalGate>) {
                    run_local(s, i.gate);
                } else if constexpr (std::is_same_v<T, EprRequest>) {
                    std::size_t qa = global(s, i.local_comm);
                    std::size_t qb = qmap_.at(i.remote_qpu, i.remote_comm);
                    comm_status_[qa].busy = comm_status_[qb].busy = true;
                    EprRoute route = resolve_route(net_, qpu, i.remote_qpu);
                    log(EventKind::EPR_REQUESTED, qpu,
                        {{"pair", std::to_string(i.pair_id)},
                         {"link", i.link},
                         {"latency", std::to_string(route.total_latency)}});
                    deliveries_.push_back({t + route.total_latency, next_seq_++, s, qa, qb, i.pair_id, route});
                    st.epr_in_flight = true;
                    advance = false;
                } else if constexpr (std::is_same_v<T, MeasureCommQubit>) {
                    measure_comm(s, i);
                } else if constexpr (std::is_same_v<T, SendBit>) {
                    auto &m = messages_[i.message_id];
                    if (m.sent) {
                        throw SimulationError("message m" + std::to_string(i.message_id) + " sent twice");
                    }
                    auto route = resolve_classical_route(net_, qpu, i.to);
                    m.sent = true;
                    m.arrival = t + route.total_latency;
                    std::vector<std::pair<std::string, std::string>> f{{"message", std::to_string(i.message_id)},
                                                                       {"to", i.to}};
                    if (m.value) {
                        f.emplace_back("value", std::to_string(*m.value));
                    }
                    log(EventKind::CLASSICAL_SENT, qpu, std::move(f));
                } else if constexpr (std::is_same_v<T, RecvBit>) {
                    messages_[i.message_id].received_by.insert(s);
                    log(EventKind::CLASSICAL_RECEIVED, qpu,
                        {{"message", std::to_string(i.message_id)}, {"from", i.from}});
                } else if constexpr (std::is_same_v<T, ConditionalGate>) {
                    run_conditional(s, st.pc, i);
                } else {
                    std::size_t q = global(s, i.comm_qubit);
                    check_touch(s, {q});
                    reset(*state_, q);
                    comm_status_[q] = {false, t};
                    log(EventKind::COMM_RESET, qpu, {{"qubit", std::to_string(i.comm_qubit)}});
                }
            },
            ins);
        if (advance) {
            st.pc++;
        }
    }

    void run_local(std::size_t s, const Gate &g) {
        const auto &spec = *streams_[s].spec;
        const auto &qpu = program_.streams[s].qpu;
        Gate gg = to_global(s, g);
        if (options_.mode == ExecutionMode::Exact) {
            check_touch(s, gg.operands);
        }
        if (g.kind == GateKind::MEASURE) {
            std::size_t q = gg.operands[0];
            std::size_t c = *g.classical_target;
            auto logical = std::find(logical_global_.begin(), logical_global_.end(), q);
            if (logical == logical_global_.end()) {
                throw SimulationError("measure on " + qpu + " qubit " + std::to_string(g.operands[0]) +
                                      " which holds no logical qubit");
            }
            std::vector<std::pair<std::string, std::string>> f{{"qubit", std::to_string(g.operands[0])},
                                                               {"clbit", std::to_string(c)}};
            if (options_.mode == ExecutionMode::Exact) {
                measured_.insert(q);
                clbit_sources_.at(c) = static_cast<std::size_t>(logical - logical_global_.begin());
                clbit_errors_.at(c) = spec.measurement_error;
                f.emplace_back("outcome", "deferred");
            } else {
                auto r = measure(*state_, q, spec.measurement_error, rng_);
                outcome_.set(c, r.reported);
                f.emplace_back("outcome", std::to_string(r.reported));
            }
            log(EventKind::MEASUREMENT, qpu, std::move(f));
            return;
        }
        if (g.kind == GateKind::RESET) {
            reset(*state_, gg.operands[0]);
        } else {
            apply_gate(*state_, gg, fidelity_for(spec, g));
        }
        log(EventKind::GATE_APPLIED, qpu, {{"gate", std::string(gate_name(g.kind))}, {"qubits", qubit_list(g.operands)}});
    }

    void measure_comm(std::size_t s, const MeasureCommQubit &i) {
        const auto &spec = *streams_[s].spec;
        std::size_t q = global(s, i.comm_qubit);
        auto &msg = messages_[i.message_id];
        if (msg.value || folded_messages_.count(i.message_id)) {
            throw SimulationError("message m" + std::to_string(i.message_id) + " produced twice");
        }
        std::vector<std::pair<std::string, std::string>> f{{"qubit", std::to_string(i.comm_qubit)},
                                                           {"message", std::to_string(i.message_id)}};
        if (options_.mode == ExecutionMode::Trajectory) {
            auto r = measure(*state_, q, spec.measurement_error, rng_);
            msg.value = r.reported;
            f.emplace_back("outcome", std::to_string(r.reported));
        } else {
            check_touch(s, {q});
            std::array<std::vector<Gate>, 2> corrections;
            std::optional<double> fidelity;
            for (auto [cs, ci] : consumers_[i.message_id]) {
                const auto &cg = std::get<ConditionalGate>((*streams_[cs].instructions)[ci]);
                double f_gate = fidelity_for(*streams_[cs].spec, cg.gate);
                if (fidelity && *fidelity != f_gate) {
                    throw SimulationError("exact mode cannot fold corrections of m" + std::to_string(i.message_id) +
                                          " with different gate fidelities");
                }
                fidelity = f_gate;
                Gate gg = to_global(cs, cg.gate);
                check_touch(cs, gg.operands);
                corrections[1].push_back(gg);
                for (auto g : gg.operands) {
                    guarded_[g] = i.message_id;
                }
            }
            apply_measure_channel(*state_, q, corrections, spec.measurement_error, fidelity.value_or(1.0));
            folded_messages_.insert(i.message_id);
            f.emplace_back("outcome", "deferred");
        }
        log(EventKind::MEASUREMENT, program_.streams[s].qpu, std::move(f));
    }

    void run_conditional(std::size_t s, std::size_t pc, const ConditionalGate &i) {
        const auto &qpu = program_.streams[s].qpu;
        Gate gg = to_global(s, i.gate);
        std::vector<std::pair<std::string, std::string>> f{{"gate", std::string(gate_name(i.gate.kind))},
                                                           {"qubits", qubit_list(i.gate.operands)},
                                                           {"cond", std::to_string(i.condition)}};
        if (folded_messages_.count(i.condition)) {
            for (auto q : gg.operands) {
                guarded_.erase(q);
            }
            f.emplace_back("applied", "folded");
        } else {
            const auto &msg = messages_.at(i.condition);
            if (!msg.value) {
                throw SimulationError("condition m" + std::to_string(i.condition) + " has no value");
            }
            if (*msg.value) {
                apply_gate(*state_, gg, fidelity_for(*streams_[s].spec, i.gate));
            }
            f.emplace_back("applied", std::to_string(*msg.value));
        }
        (void)pc;
        log(EventKind::GATE_APPLIED, qpu, std::move(f));
    }

    void deliver(const Delivery &d) {
        now_ = std::max(now_, d.time);
        deliver_epr(d.route, *state_, d.qubit_a, d.qubit_b);
        auto &st = streams_[d.stream];
        st.epr_in_flight = false;
        st.clock = std::max(st.clock, d.time);
        st.pc++;
        char fid[32];
        std::snprintf(fid, sizeof fid, "%.9g", d.route.effective_fidelity);
        log(EventKind::EPR_DELIVERED, program_.streams[d.stream].qpu,
            {{"pair", std::to_string(d.pair_id)}, {"fidelity", fid}});
    }

    std::string deadlock_report() const {
        std::string out = "deadlock: no runnable instruction";
        for (std::size_t s = 0; s < streams_.size(); s++) {
            const auto &st = streams_[s];
            if (!st.done()) {
                out += "; " + program_.streams[s].qpu + " blocked at #" + std::to_string(st.pc) + " '" +
                       instruction_str((*st.instructions)[st.pc]) + "'";
            }
        }
        return out;
    }

    RunResult finish() {
        RunResult result;
        result.log.run_id = options_.run_id;
        result.log.seed = options_.seed;
        result.log.mode = options_.mode;
        result.log.events = std::move(events_);
        if (options_.mode == ExecutionMode::Exact) {
            std::vector<std::size_t> sorted = logical_global_;
            std::sort(sorted.begin(), sorted.end());
            std::vector<std::size_t> order;
            for (auto g : logical_global_) {
                order.push_back(
                    static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), g) - sorted.begin()));
            }
            DensityMatrix data = permute_qubits(partial_trace(state_->rho(), sorted), order);
            result.pre_measurement_state = GlobalQuantumState::from_matrix(std::move(data));
            result.clbit_sources = clbit_sources_;
            result.clbit_errors = clbit_errors_;
            result.log.final_state = std::make_shared<const GlobalQuantumState>(std::move(*state_));
        } else {
            result.outcome = outcome_;
            result.log.final_outcome = outcome_;
        }
        return result;
    }

    const DistributedProgram &program_;
    const NetworkModel &net_;
    ExecOptions options_;
    Rng rng_;
    QubitMap qmap_;
    std::optional<GlobalQuantumState> state_;
    std::vector<StreamState> streams_;
    std::vector<std::size_t> logical_global_;
    std::map<std::size_t, CommStatus> comm_status_;
    std::map<std::size_t, Message> messages_;
    std::map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> consumers_;
    std::set<std::size_t> folded_messages_;
    std::map<std::size_t, std::size_t> guarded_;
    std::set<std::size_t> measured_;
    std::vector<Delivery> deliveries_;
    std::size_t next_seq_ = 0;
    std::size_t last_ = 0;
    SimTime now_ = 0;
    std::vector<Event> events_;
    std::vector<std::optional<std::size_t>> clbit_sources_;
    std::vector<double> clbit_errors_;
    ClassicalOutcome outcome_{0};
};

}  // namespace detail

/// Runs one compiled program to completion.
inline RunResult execute(const DistributedProgram &program, const NetworkModel &net, const ExecOptions &options = {}) {
    if (program.streams.empty()) {
        throw SimulationError("program has no instruction streams");
    }
    return detail::Executor(program, net, options).run();
}

/// `rounds` independent trajectory-mode runs with seeds base_seed + i.
inline std::vector<ExecutionLog> run_rounds(const DistributedProgram &program, const NetworkModel &net,
                                            std::size_t rounds, std::uint64_t base_seed, ExecOptions options = {},
                                            std::size_t jobs = 1) {
    if (rounds == 0) {
        throw ConfigError("rounds must be at least 1");
    }
    options.mode = ExecutionMode::Trajectory;
    std::vector<ExecutionLog> logs(rounds);
    std::string prefix = options.run_id;
    detail::parallel_for(rounds, jobs, [&](std::size_t i) {
        ExecOptions o = options;
        o.seed = base_seed + i;
        o.run_id = prefix + "-r" + std::to_string(i);
        logs[i] = execute(program, net, o).log;
    });
    return logs;
}

/// Outcomes only (no event recording) of `rounds` trajectory runs.
inline std::vector<ClassicalOutcome> sample_outcomes(const DistributedProgram &program, const NetworkModel &net,
                                                     std::size_t rounds, std::uint64_t base_seed,
                                                     ExecOptions options = {}, std::size_t jobs = 1) {
    if (rounds == 0) {
        throw ConfigError("rounds must be at least 1");
    }
    options.mode = ExecutionMode::Trajectory;
    options.record_events = false;
    std::vector<ClassicalOutcome> out(rounds, ClassicalOutcome(program.num_clbits));
    detail::parallel_for(rounds, jobs, [&](std::size_t i) {
        ExecOptions o = options;
        o.seed = base_seed + i;
        out[i] = *execute(program, net, o).outcome;
    });
    return out;
}

/// Noise-free monolithic simulation of the abstract circuit up to its
/// terminal measurements. A measurement followed by further use of its qubit
/// is applied as a dephasing channel.
inline GlobalQuantumState simulate_monolithic(const AbstractCircuit &c) {
    GlobalQuantumState state(c.num_qubits());
    const auto &gates = c.gates();
    for (std::size_t i = 0; i < gates.size(); i++) {
        const auto &g = gates[i];
        if (g.kind == GateKind::RESET) {
            reset(state, g.operands[0]);
        } else if (g.kind == GateKind::MEASURE) {
            bool terminal = std::none_of(gates.begin() + static_cast<std::ptrdiff_t>(i) + 1, gates.end(),
                                         [&](const Gate &later) {
                                             return std::find(later.operands.begin(), later.operands.end(),
                                                              g.operands[0]) != later.operands.end();
                                         });
            if (!terminal) {
                apply_measure_channel(state, g.operands[0], {});
            }
        } else {
            apply_gate(state, g);
        }
    }
    return state;
}

}  // namespace dqcsim
