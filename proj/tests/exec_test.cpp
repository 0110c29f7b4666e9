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


#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "dqcsim/analytics.hpp"
#include "dqcsim/compiler.hpp"
#include "dqcsim/exec.hpp"
#include "support/oracles.hpp"

namespace dqcsim {
namespace {

Placement two_telegate_placement() {
    return Placement({{"QPU0", 0}, {"QPU1", 0}, {"QPU1", 1}, {"QPU0", 1}, {"QPU0", 2}});
}

std::size_t count_kind(const ExecutionLog &log, EventKind k) {
    std::size_t n = 0;
    for (const auto &e : log.events) {
        n += e.kind == k;
    }
    return n;
}

TEST(ExecuteTest, IdealGhzExact) {
    auto net = oracle::two_qpu_network(3);
    for (const auto &placement : {std::optional<Placement>{}, std::optional<Placement>{two_telegate_placement()}}) {
        auto program = compile(ghz_circuit(5), net.qpus, placement);
        auto r = execute(program, net);
        ASSERT_TRUE(r.pre_measurement_state);
        EXPECT_FALSE(r.outcome);
        EXPECT_TRUE(r.log.final_state);
        EXPECT_FALSE(r.log.final_outcome);
        EXPECT_NEAR(quantum_fidelity(r.pre_measurement_state->rho(), ghz_vector(5)), 1.0, 1e-9);
        auto pmf = r.exact_outcome_pmf();
        EXPECT_NEAR(pmf("00000"), 0.5, 1e-9);
        EXPECT_NEAR(pmf("11111"), 0.5, 1e-9);
    }
}

TEST(ExecuteTest, TwoTelegatePlacementDeliversTwoPairs) {
    auto net = oracle::two_qpu_network(3);
    auto r = execute(compile(ghz_circuit(5), net.qpus, two_telegate_placement()), net);
    EXPECT_EQ(count_kind(r.log, EventKind::EPR_DELIVERED), 2u);
    EXPECT_EQ(count_kind(r.log, EventKind::EPR_REQUESTED), 2u);
}

TEST(ExecuteTest, SingleQpuHasNoNetworkEvents) {
    auto net = parse_network(R"({"qpu": [{"name": "Q", "data_qubits": 5, "coupling": "full"}]})");
    auto r = execute(compile(ghz_circuit(5), net.qpus), net);
    for (auto k : {EventKind::EPR_REQUESTED, EventKind::EPR_DELIVERED, EventKind::CLASSICAL_SENT,
                   EventKind::CLASSICAL_RECEIVED}) {
        EXPECT_EQ(count_kind(r.log, k), 0u);
    }
    EXPECT_NEAR(quantum_fidelity(r.pre_measurement_state->rho(), ghz_vector(5)), 1.0, 1e-9);
}

TEST(ExecuteTest, TrajectoryPayload) {
    auto net = oracle::two_qpu_network(3);
    ExecOptions o;
    o.mode = ExecutionMode::Trajectory;
    auto r = execute(compile(ghz_circuit(5), net.qpus), net, o);
    ASSERT_TRUE(r.outcome);
    EXPECT_FALSE(r.pre_measurement_state);
    EXPECT_EQ(r.log.final_outcome, r.outcome);
    EXPECT_TRUE(r.outcome->str() == "00000" || r.outcome->str() == "11111");
}

TEST(ExecuteTest, LogFormat) {
    auto net = oracle::two_qpu_network(3);
    ExecOptions o;
    o.seed = 12;
    o.run_id = "demo";
    auto text = execute(compile(ghz_circuit(5), net.qpus), net, o).log.serialize();
    EXPECT_EQ(text.rfind("0 RUN_START - run=demo seed=12 mode=exact qubits=7\n", 0), 0u);
    EXPECT_NE(text.find(" EPR_DELIVERED QPU0 pair=0 fidelity=1\n"), std::string::npos);
    EXPECT_EQ(text.substr(text.size() - 11), " RUN_END -\n");
}

// Causality and latency invariants over noisy trajectory runs.
TEST(ExecuteTest, LogInvariants) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; trial++) {
        std::size_t n = 3 + trial % 3;
        auto c = oracle::random_circuit(rng, n, 15);
        auto net = oracle::two_qpu_network(n, 0.95, 0.9, 0.05);
        net.quantum_links[0].epr_latency = 3 + trial % 5;
        net.classical_links[0].latency = trial % 3;
        auto program = compile(c, net.qpus, oracle::random_placement(rng, n, n));
        ExecOptions o;
        o.mode = trial % 2 ? ExecutionMode::Trajectory : ExecutionMode::Exact;
        o.seed = trial;
        o.policy = trial % 4 < 2 ? SchedulePolicy::RoundRobin : SchedulePolicy::Greedy;
        auto log = execute(program, net, o).log;

        std::map<std::string, SimTime> sent, requested;
        std::set<std::pair<std::string, std::string>> received;  // (qpu, message)
        SimTime last = 0;
        for (const auto &e : log.events) {
            EXPECT_GE(e.time, last);
            last = e.time;
            if (e.kind == EventKind::CLASSICAL_SENT) {
                sent[*e.field("message")] = e.time;
            } else if (e.kind == EventKind::CLASSICAL_RECEIVED) {
                auto m = *e.field("message");
                ASSERT_TRUE(sent.count(m));
                EXPECT_EQ(e.time - sent[m], net.classical_links[0].latency);
                received.insert({e.qpu, m});
            } else if (e.kind == EventKind::EPR_REQUESTED) {
                requested[*e.field("pair")] = e.time;
            } else if (e.kind == EventKind::EPR_DELIVERED) {
                auto p = *e.field("pair");
                ASSERT_TRUE(requested.count(p));
                EXPECT_EQ(e.time - requested[p], net.quantum_links[0].epr_latency);
            } else if (e.kind == EventKind::GATE_APPLIED && e.field("cond")) {
                EXPECT_TRUE(received.count({e.qpu, *e.field("cond")}));
            }
        }
        EXPECT_EQ(requested.size(), program.remote_gate_count);
    }
}

TEST(ExecuteTest, SameSeedSameLog) {
    auto net = oracle::two_qpu_network(3, 0.9, 0.9, 0.05);
    auto program = compile(ghz_circuit(5), net.qpus, two_telegate_placement());
    ExecOptions o;
    o.mode = ExecutionMode::Trajectory;
    for (std::uint64_t seed : {0u, 1u, 99u}) {
        o.seed = seed;
        EXPECT_EQ(execute(program, net, o).log.serialize(), execute(program, net, o).log.serialize());
    }
}

TEST(ExecuteTest, DistributedMatchesStatevectorOracle) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; trial++) {
        std::size_t n = 2 + trial % 5;
        auto c = oracle::random_circuit(rng, n, 10 + trial % 16);
        auto net = oracle::two_qpu_network(n);
        auto program = compile(c, net.qpus, oracle::random_placement(rng, n, n));
        auto r = execute(program, net);
        EXPECT_GE(quantum_fidelity(r.pre_measurement_state->rho(), oracle::statevector(c)), 1.0 - 1e-9)
            << serialize_circuit(c);
    }
}

TEST(ExecuteTest, SchedulingPolicyInvariance) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 30; trial++) {
        std::size_t n = 3 + trial % 4;
        auto c = oracle::random_circuit(rng, n, 20);
        auto net = oracle::two_qpu_network(n);
        auto program = compile(c, net.qpus, oracle::random_placement(rng, n, n));
        ExecOptions rr, greedy;
        greedy.policy = SchedulePolicy::Greedy;
        auto a = execute(program, net, rr).pre_measurement_state->rho();
        auto b = execute(program, net, greedy).pre_measurement_state->rho();
        EXPECT_GE(quantum_fidelity(a, b), 1.0 - 1e-9);
    }
}

TEST(ExecuteTest, ExactMatchesTrajectoryHistogram) {
    auto net = oracle::two_qpu_network(3, 0.9, 0.925, 0.02);
    auto program = compile(ghz_circuit(5), net.qpus, two_telegate_placement());
    const std::size_t rounds = 2000;
    auto exact = execute(program, net).exact_outcome_pmf();
    auto empirical = estimate_pmf(sample_outcomes(program, net, rounds, 500));
    double bound = 5.0 * std::sqrt(std::log(2.0 * 32.0) / (2.0 * rounds));
    EXPECT_LE(total_variation(exact, empirical), bound);
}

TEST(ExecuteTest, NonTerminalMeasurementNeedsTrajectoryMode) {
    AbstractCircuit c(2, 2, {Gate::h(0), Gate::cnot(0, 1), Gate::measure(0, 0), Gate::reset(0), Gate::h(0),
                             Gate::measure(0, 1)});
    auto net = oracle::two_qpu_network(2);
    auto program = compile(c, net.qpus, Placement({{"QPU0", 0}, {"QPU1", 0}}));
    EXPECT_THROW(execute(program, net), SimulationError);
    ExecOptions o;
    o.mode = ExecutionMode::Trajectory;
    std::map<std::string, int> seen;
    for (const auto &out : sample_outcomes(program, net, 400, 1, o)) {
        seen[out.str()]++;
    }
    EXPECT_EQ(seen.size(), 4u);
}

TEST(ExecuteTest, DeadlockIsReported) {
    auto net = oracle::two_qpu_network(1);
    DistributedProgram p;
    p.num_logical_qubits = 2;
    p.placement = Placement({{"QPU0", 0}, {"QPU1", 0}});
    p.streams = {{"QPU0", {RecvBit{"QPU1", 0}, SendBit{"QPU1", 1}}}, {"QPU1", {RecvBit{"QPU0", 1}, SendBit{"QPU0", 0}}}};
    try {
        execute(p, net);
        FAIL();
    } catch (const SimulationError &e) {
        std::string what = e.what();
        EXPECT_NE(what.find("deadlock"), std::string::npos);
        EXPECT_NE(what.find("QPU0 blocked"), std::string::npos);
        EXPECT_NE(what.find("QPU1 blocked"), std::string::npos);
    }
}

TEST(ExecuteTest, RoutelessPairIsAnError) {
    auto net = parse_network(R"({"qpu": [{"name": "QPU0", "data_qubits": 1, "coupling": "full"},
                                         {"name": "QPU1", "data_qubits": 1, "coupling": "full"}]})");
    auto program = compile(AbstractCircuit(2, 0, {Gate::cz(0, 1)}), net.qpus);
    EXPECT_THROW(execute(program, net), SimulationError);
}

TEST(ExecuteTest, UnknownQpuIsAnError) {
    auto net = oracle::two_qpu_network(3);
    auto program = compile(ghz_circuit(2), net.qpus);
    auto other = parse_network(R"({"qpu": [{"name": "X", "data_qubits": 3, "coupling": "full"}]})");
    EXPECT_THROW(execute(program, other), SimulationError);
}

TEST(RunRoundsTest, IdealGhzSupport) {
    auto net = oracle::two_qpu_network(3);
    auto program = compile(ghz_circuit(5), net.qpus, two_telegate_placement());
    auto logs = run_rounds(program, net, 100, 7);
    ASSERT_EQ(logs.size(), 100u);
    for (std::size_t i = 0; i < logs.size(); i++) {
        ASSERT_TRUE(logs[i].final_outcome);
        auto s = logs[i].final_outcome->str();
        EXPECT_TRUE(s == "00000" || s == "11111");
        EXPECT_EQ(logs[i].seed, 7 + i);
        EXPECT_EQ(logs[i].mode, ExecutionMode::Trajectory);
    }
    EXPECT_EQ(run_rounds(program, net, 1, 7).size(), 1u);
    EXPECT_THROW(run_rounds(program, net, 0, 7), ConfigError);
}

TEST(RunRoundsTest, ReplayAndThreadIndependence) {
    auto net = oracle::two_qpu_network(3, 0.9, 0.9, 0.05);
    auto program = compile(ghz_circuit(5), net.qpus);
    auto a = run_rounds(program, net, 40, 3, {}, 1);
    auto b = run_rounds(program, net, 40, 3, {}, 4);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        EXPECT_EQ(a[i].serialize(), b[i].serialize());
        EXPECT_EQ(a[i].final_outcome, b[i].final_outcome);
    }
    auto outcomes = sample_outcomes(program, net, 40, 3);
    for (std::size_t i = 0; i < a.size(); i++) {
        EXPECT_EQ(outcomes[i], *a[i].final_outcome);
    }
}

TEST(MonolithicTest, MidCircuitMeasurementAndReset) {
    AbstractCircuit c(1, 1, {Gate::x(0), Gate::measure(0, 0), Gate::reset(0), Gate::h(0)});
    auto rho = simulate_monolithic(c).rho();
    EXPECT_NEAR(rho(0, 1).real(), 0.5, 1e-12);
    AbstractCircuit d(2, 1, {Gate::h(0), Gate::cnot(0, 1), Gate::measure(0, 0), Gate::reset(0)});
    auto rd = simulate_monolithic(d).rho();
    EXPECT_NEAR(rd(0, 0).real(), 0.5, 1e-12);
    EXPECT_NEAR(rd(1, 1).real(), 0.5, 1e-12);
    EXPECT_NEAR(std::abs(rd(0, 1)), 0.0, 1e-12);
}

}  // namespace
}  // namespace dqcsim
