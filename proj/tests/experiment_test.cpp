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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dqcsim/experiment.hpp"

namespace dqcsim {
namespace {

namespace fs = std::filesystem;

const char *kNetwork = R"({
  "qpu": [
    {"name": "QPU0", "data_qubits": 3, "comm_qubits": 1, "coupling": "full"},
    {"name": "QPU1", "data_qubits": 3, "comm_qubits": 1, "coupling": "full"}
  ],
  "qlink": [{"endpoints": ["QPU0", "QPU1"], "fidelity": 1.0}],
  "clink": [{"endpoints": ["QPU0", "QPU1"]}]
})";

const char *kTwoTelegatePlacement = R"({"placement": [
  {"qubit": 0, "qpu": "QPU0", "index": 0}, {"qubit": 1, "qpu": "QPU1", "index": 0},
  {"qubit": 2, "qpu": "QPU1", "index": 1}, {"qubit": 3, "qpu": "QPU0", "index": 1},
  {"qubit": 4, "qpu": "QPU0", "index": 2}]})";

class ExperimentTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("dqcsim-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write("ghz5.circ", serialize_circuit(ghz_circuit(5)));
        write("network.json", kNetwork);
        write("placement.json", kTwoTelegatePlacement);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    void write(const std::string &name, const std::string &text) {
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }
    static std::string read(const fs::path &p) {
        return read_text_file(p.string());
    }
    ExperimentConfig config(const std::string &extra) {
        std::string text = R"({"circuit": "ghz5.circ", "network": "network.json", "placement": "placement.json")";
        text += extra + "}";
        return parse_experiment_config(text, dir_);
    }

    fs::path dir_;
};

TEST_F(ExperimentTest, ConfigDefaultsAndPaths) {
    auto c = config("");
    EXPECT_EQ(c.circuit, dir_ / "ghz5.circ");
    EXPECT_EQ(c.out_dir, dir_ / "out");
    EXPECT_EQ(c.mode, ExecutionMode::Exact);
    EXPECT_EQ(c.gate_fidelities, kDefaultSweep);
    EXPECT_EQ(c.link_fidelities, kDefaultSweep);
    auto t = config(R"(, "mode": "trajectory", "rounds": 7, "seed": 3, "sweep": {"gate_fidelity": [0.9]})");
    EXPECT_EQ(t.mode, ExecutionMode::Trajectory);
    EXPECT_EQ(t.rounds, 7u);
    EXPECT_EQ(t.seed, 3u);
    EXPECT_EQ(t.gate_fidelities, std::vector<double>{0.9});
}

TEST_F(ExperimentTest, ConfigRejections) {
    EXPECT_THROW(config(R"(, "rounds": 0)"), ConfigError);
    EXPECT_THROW(config(R"(, "mode": "fast")"), ConfigError);
    EXPECT_THROW(config(R"(, "sweep": {"gate_fidelity": [1.1]})"), ConfigError);
    EXPECT_THROW(config(R"(, "sweep": {"gate_fidelity": []})"), ConfigError);
    EXPECT_THROW(config(R"(, "sweeps": {})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"network": "n.json"})"), ConfigError);
    EXPECT_THROW(parse_experiment_config("not json"), ConfigError);
}

TEST_F(ExperimentTest, CircuitErrorsNameFileAndLine) {
    write("bad.circ", "qubits 2\nclbits 0\nh 0\ncz 1 1\n");
    try {
        load_circuit(dir_ / "bad.circ");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("bad.circ:4:"), std::string::npos) << e.what();
    }
}

TEST_F(ExperimentTest, ExactIdealPoint) {
    auto c = config(R"(, "sweep": {"gate_fidelity": [1.0], "link_fidelity": [1.0]})");
    auto rows = run_experiment(c);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].hellinger, 1.0, 1e-9);
    EXPECT_NEAR(*rows[0].quantum, 1.0, 1e-9);
    EXPECT_NEAR(*rows[0].quantum_qpu0, 1.0, 1e-9);
    EXPECT_NEAR(*rows[0].quantum_qpu1, 1.0, 1e-9);
    EXPECT_TRUE(fs::exists(c.out_dir / "runs" / "g0-l0.log"));
    EXPECT_EQ(read(c.out_dir / "results.csv"),
              std::string(FidelityReport::csv_header()) + "\n1,1,1,1,1,1,1\n");
}

TEST_F(ExperimentTest, TrajectorySweepRows) {
    auto c = config(R"(, "mode": "trajectory", "rounds": 100, "seed": 5)");
    auto rows = run_experiment(c, 2);
    ASSERT_EQ(rows.size(), 25u);
    EXPECT_EQ(rows[0].gate_fidelity, 1.0);
    EXPECT_EQ(rows[1].link_fidelity, 0.975);
    // Ideal point: only sampling error remains.
    EXPECT_GT(rows[0].hellinger, 0.98);
    EXPECT_LE(rows[0].hellinger, 1.0);
    for (const auto &r : rows) {
        EXPECT_EQ(r.rounds, 100u);
        EXPECT_FALSE(r.quantum);
    }
    std::size_t logs = 0;
    for (const auto &e : fs::directory_iterator(c.out_dir / "runs")) {
        logs += e.path().extension() == ".log";
    }
    EXPECT_EQ(logs, 2500u);
}

TEST_F(ExperimentTest, SameSeedSameOutputs) {
    auto c = config(R"(, "mode": "trajectory", "rounds": 20, "seed": 9,
                       "sweep": {"gate_fidelity": [1.0, 0.9], "link_fidelity": [0.95]})");
    run_experiment(c, 1);
    auto csv = read(c.out_dir / "results.csv");
    auto log = read(c.out_dir / "runs" / "g1-l0-r7.log");
    run_experiment(c, 3);
    EXPECT_EQ(read(c.out_dir / "results.csv"), csv);
    EXPECT_EQ(read(c.out_dir / "runs" / "g1-l0-r7.log"), log);
}

TEST(ResultsCsvTest, RoundTripAndErrors) {
    std::vector<FidelityReport> rows{{1.0, 1.0, 1, 1.0, 1.0, 1.0, 1.0}, {0.9, 1.0, 100, 0.8, {}, {}, {}}};
    std::string text = std::string(FidelityReport::csv_header()) + "\n" + rows[0].csv_row() + "\n" +
                       rows[1].csv_row() + "\n";
    auto parsed = parse_results_csv(text);
    ASSERT_EQ(parsed.size(), 2u);
    EXPECT_EQ(parsed[1].rounds, 100u);
    EXPECT_FALSE(parsed[1].quantum);
    EXPECT_EQ(*parsed[0].quantum_qpu1, 1.0);

    EXPECT_THROW(parse_results_csv(""), ConfigError);
    EXPECT_THROW(parse_results_csv(std::string(FidelityReport::csv_header()) + "\n"), ConfigError);
    EXPECT_THROW(parse_results_csv("a,b\n1,2\n"), ParseError);
    EXPECT_THROW(parse_results_csv(std::string(FidelityReport::csv_header()) + "\n1,1,x,1,,,\n"), ParseError);
    EXPECT_THROW(parse_results_csv(std::string(FidelityReport::csv_header()) + "\n1,1,1\n"), ParseError);
}

TEST(ReportTest, IdealOnlyMatrices) {
    std::vector<FidelityReport> rows{{1.0, 1.0, 1, 1.0, 1.0, 1.0, 1.0}};
    std::ostringstream out;
    report(rows, out);
    SweepSummary s(rows);
    EXPECT_EQ(s.matrix("hellinger"), "gate\\link 1\n1 1\n");
    EXPECT_EQ(s.matrix("quantum"), "gate\\link 1\n1 1\n");
    EXPECT_NE(out.str().find("gate>link impact: FAIL"), std::string::npos);
}

TEST(ReportTest, DominanceAndMonotonicity) {
    // Gate noise hurts more than link noise at each level.
    std::vector<FidelityReport> rows;
    for (double g : {1.0, 0.9}) {
        for (double l : {1.0, 0.9}) {
            double v = 1.0 - 2.0 * (1.0 - g) - (1.0 - l);
            rows.push_back({g, l, 1, v, v, {}, {}});
        }
    }
    std::ostringstream out;
    EXPECT_TRUE(report(rows, out));
    EXPECT_NE(out.str().find("gate>link impact: PASS"), std::string::npos);
    EXPECT_NE(out.str().find("monotone: PASS"), std::string::npos);

    std::swap(rows[1].hellinger, rows[2].hellinger);
    std::ostringstream flipped;
    EXPECT_FALSE(report(rows, flipped));
    EXPECT_NE(flipped.str().find("gate>link impact: FAIL"), std::string::npos);

    rows[3].quantum = 1.0;
    EXPECT_FALSE(SweepSummary(rows).monotone("quantum"));
}

}  // namespace
}  // namespace dqcsim
