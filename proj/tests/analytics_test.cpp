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
#include <vector>

#include "dqcsim/analytics.hpp"
#include "dqcsim/exec.hpp"
#include "support/oracles.hpp"

namespace dqcsim {
namespace {

std::vector<ClassicalOutcome> outcomes(std::initializer_list<std::pair<const char *, int>> counts) {
    std::vector<ClassicalOutcome> out;
    for (auto [bits, n] : counts) {
        for (int i = 0; i < n; i++) {
            out.emplace_back(std::string(bits));
        }
    }
    return out;
}

TEST(EstimatePmfTest, Frequencies) {
    auto ghz = estimate_pmf(outcomes({{"00000", 50}, {"11111", 50}}));
    EXPECT_DOUBLE_EQ(ghz("00000"), 0.5);
    EXPECT_DOUBLE_EQ(ghz("11111"), 0.5);
    EXPECT_DOUBLE_EQ(estimate_pmf(outcomes({{"0", 1}}))("0"), 1.0);
    auto p = estimate_pmf(outcomes({{"00", 1}, {"01", 2}, {"11", 1}}));
    EXPECT_DOUBLE_EQ(p("00"), 0.25);
    EXPECT_DOUBLE_EQ(p("01"), 0.5);
    EXPECT_DOUBLE_EQ(p("11"), 0.25);
    EXPECT_DOUBLE_EQ(p("10"), 0.0);
    EXPECT_THROW(estimate_pmf(std::vector<ClassicalOutcome>{}), ConfigError);
}

TEST(PmfTest, Validation) {
    EXPECT_THROW(Pmf({{"0", 0.5}}), ConfigError);
    EXPECT_THROW(Pmf({{"0", 1.5}, {"1", -0.5}}), ConfigError);
    EXPECT_THROW(Pmf({{"0", 0.5}, {"10", 0.5}}), ConfigError);
}

TEST(HellingerTest, Examples) {
    Pmf p({{"0", 0.3}, {"1", 0.7}});
    EXPECT_NEAR(hellinger_fidelity(p, p), 1.0, 1e-15);
    EXPECT_EQ(hellinger_fidelity(Pmf({{"0", 1.0}}), Pmf({{"1", 1.0}})), 0.0);
    EXPECT_EQ(hellinger_fidelity(Pmf({{"0", 1.0}}), Pmf({{"0", 0.5}, {"1", 0.5}})), 0.5);
}

TEST(QuantumFidelityTest, Examples) {
    std::mt19937_64 rng(4);
    auto rho = simulate_monolithic(oracle::random_circuit(rng, 3, 10, false)).rho();
    EXPECT_NEAR(quantum_fidelity(rho, rho), 1.0, 1e-9);
    DensityMatrix mixed = 0.5 * oracle::werner(0.7) + 0.5 * oracle::werner(0.4);
    EXPECT_NEAR(quantum_fidelity(mixed, mixed), 1.0, 1e-9);

    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(2), one = Eigen::VectorXcd::Zero(2);
    zero(0) = one(1) = 1.0;
    EXPECT_NEAR(quantum_fidelity(DensityMatrix(zero * zero.adjoint()), DensityMatrix(one * one.adjoint())), 0.0,
                1e-12);

    for (std::size_t n = 1; n <= 3; n++) {
        auto d = Eigen::Index{1} << n;
        DensityMatrix maximally_mixed = DensityMatrix::Identity(d, d) / static_cast<double>(d);
        EXPECT_NEAR(quantum_fidelity(maximally_mixed, ghz_vector(n)), std::pow(2.0, -double(n)), 1e-9);
    }
}

TEST(QuantumFidelityTest, Errors) {
    DensityMatrix one = DensityMatrix::Identity(2, 2) / 2.0, two = DensityMatrix::Identity(4, 4) / 4.0;
    EXPECT_THROW(quantum_fidelity(one, two), SimulationError);
    DensityMatrix bad = DensityMatrix::Zero(2, 2);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    EXPECT_THROW(quantum_fidelity(bad, one), SimulationError);
}

TEST(QuantumFidelityTest, WernerAgainstBell) {
    for (double f : {0.3, 0.6, 0.9, 1.0}) {
        EXPECT_NEAR(quantum_fidelity(oracle::werner(f), oracle::bell(0)), f, 1e-12);
        DensityMatrix bell = oracle::bell(0) * oracle::bell(0).adjoint();
        EXPECT_NEAR(quantum_fidelity_general(oracle::werner(f), bell), f, 1e-7);
    }
}

TEST(PartialTraceTest, Examples) {
    // |0> (x) |+>
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(0) = psi(1) = 1.0 / std::sqrt(2.0);
    DensityMatrix first = partial_trace(DensityMatrix(psi * psi.adjoint()), {0});
    EXPECT_NEAR(first(0, 0).real(), 1.0, 1e-15);
    EXPECT_NEAR(first.cwiseAbs().sum(), 1.0, 1e-15);

    DensityMatrix bell = oracle::bell(0) * oracle::bell(0).adjoint();
    for (std::size_t keep : {0u, 1u}) {
        DensityMatrix half = partial_trace(bell, {keep});
        EXPECT_LT((half - DensityMatrix::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-9);
    }
    EXPECT_THROW(partial_trace(bell, std::vector<std::size_t>{}), SimulationError);
    EXPECT_THROW(partial_trace(bell, {2}), SimulationError);
}

TEST(PartialTraceTest, GhzOnThreeQubitsAgainstDirectSum) {
    Eigen::VectorXcd g = ghz_vector(5);
    DensityMatrix rho = g * g.adjoint();
    DensityMatrix reduced = partial_trace(rho, {0, 3, 4});
    // Direct 32x32 oracle: sum over the traced qubits (1, 2).
    DensityMatrix expected = DensityMatrix::Zero(8, 8);
    for (int i = 0; i < 32; i++) {
        for (int j = 0; j < 32; j++) {
            int ti = (i >> 2) & 3, tj = (j >> 2) & 3;
            if (ti != tj) {
                continue;
            }
            auto keep = [](int x) { return ((x >> 4) & 1) << 2 | (x & 3); };
            expected(keep(i), keep(j)) += rho(i, j);
        }
    }
    EXPECT_LT((reduced - expected).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(reduced(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(reduced(7, 7).real(), 0.5, 1e-15);
    EXPECT_NEAR(std::abs(reduced(0, 7)), 0.0, 1e-15);
}

TEST(PermuteQubitsTest, MovesBasisLabels) {
    auto s = GlobalQuantumState(3);
    apply_gate(s, Gate::x(0));
    DensityMatrix p = permute_qubits(s.rho(), std::vector<std::size_t>{1, 2, 0});
    EXPECT_NEAR(p(1, 1).real(), 1.0, 1e-15);
    EXPECT_THROW(permute_qubits(s.rho(), std::vector<std::size_t>{0, 0, 1}), SimulationError);
}

TEST(ExactPmfTest, Examples) {
    Eigen::VectorXcd g = ghz_vector(5);
    auto ghz = exact_pmf(DensityMatrix(g * g.adjoint()), 0.0);
    EXPECT_NEAR(ghz("00000"), 0.5, 1e-15);
    EXPECT_NEAR(ghz("11111"), 0.5, 1e-15);
    EXPECT_EQ(ghz.probabilities().size(), 2u);

    DensityMatrix zero = DensityMatrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    auto noisy = exact_pmf(zero, 0.1);
    EXPECT_NEAR(noisy("0"), 0.9, 1e-15);
    EXPECT_NEAR(noisy("1"), 0.1, 1e-15);

    DensityMatrix plus = DensityMatrix::Constant(2, 2, 0.5);
    auto p = exact_pmf(plus, 0.1);
    EXPECT_NEAR(p("0"), 0.5, 1e-15);
    EXPECT_NEAR(p("1"), 0.5, 1e-15);
}

TEST(ClbitPmfTest, RoutesQubitsToBits) {
    // q0 = |1>, q1 = |0>, read q0 into bit 2, q1 into bit 0; bit 1 unwritten.
    GlobalQuantumState s(2);
    apply_gate(s, Gate::x(0));
    std::vector<std::optional<std::size_t>> src{1, std::nullopt, 0};
    auto p = clbit_pmf(s.rho(), src, std::vector<double>{0.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(p("001"), 1.0);
    std::vector<std::optional<std::size_t>> twice{0, 0};
    EXPECT_THROW(clbit_pmf(s.rho(), twice, std::vector<double>{0.0, 0.0}), SimulationError);
}

TEST(FidelityReportTest, CsvRow) {
    FidelityReport r{0.975, 1.0, 100, 0.123456789123, std::nullopt, std::nullopt, std::nullopt};
    EXPECT_EQ(std::string(FidelityReport::csv_header()),
              "gate_fidelity,link_fidelity,rounds,hellinger,quantum,quantum_qpu0,quantum_qpu1");
    EXPECT_EQ(r.csv_row(), "0.975,1,100,0.123456789,,,");
    r.quantum = 0.5;
    r.quantum_qpu0 = 1.0;
    r.quantum_qpu1 = 0.25;
    EXPECT_EQ(r.csv_row(), "0.975,1,100,0.123456789,0.5,1,0.25");
}

}  // namespace
}  // namespace dqcsim
