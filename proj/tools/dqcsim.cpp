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

// dqcsim: compile, run and report distributed quantum circuit experiments.
//
//   dqcsim compile <circuit> <network> [--placement FILE] [--out FILE]
//   dqcsim run <config> [--seed N] [--rounds N] [--mode exact|trajectory]
//                       [--jobs N] [--out-dir DIR]
//   dqcsim report <results.csv>
//
// Exit codes: 0 success, 2 configuration error, 3 compile error,
// 4 simulation error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dqcsim/dqcsim.hpp"

namespace {

int cmd_compile(const std::string &circuit_path, const std::string &network_path,
                const std::optional<std::string> &placement_path, const std::optional<std::string> &out_path) {
    auto circuit = dqcsim::load_circuit(circuit_path);
    auto net = dqcsim::load_network(network_path);
    std::optional<dqcsim::Placement> placement;
    if (placement_path) {
        placement = dqcsim::load_placement(*placement_path);
    }
    auto program = dqcsim::compile(circuit, net.qpus, placement);
    std::string dump = dqcsim::dump_program(program);
    if (out_path) {
        std::ofstream f(*out_path, std::ios::binary);
        if (!f) {
            throw dqcsim::ConfigError("cannot write '" + *out_path + "'");
        }
        f << dump;
    } else {
        std::cout << dump;
    }
    auto graph = dqcsim::build_interaction_graph(circuit);
    std::cout << "remote_gate_count " << program.remote_gate_count << '\n'
              << "cut_weight " << dqcsim::cut_weight(graph, program.placement) << '\n';
    return 0;
}

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> rounds;
    std::optional<std::string> mode;
    std::optional<std::string> out_dir;
    std::size_t jobs = dqcsim::detail::default_jobs();
};

int cmd_run(const std::string &config_path, const RunOverrides &o) {
    auto config = dqcsim::load_experiment_config(config_path);
    if (o.seed) {
        config.seed = *o.seed;
    }
    if (o.rounds) {
        config.rounds = *o.rounds;
    }
    if (o.mode) {
        config.mode = dqcsim::parse_mode(*o.mode);
    }
    if (o.out_dir) {
        config.out_dir = *o.out_dir;
    }
    auto rows = dqcsim::run_experiment(config, o.jobs);
    std::cout << "mode " << dqcsim::mode_name(config.mode) << ", " << rows.size() << " grid points\n"
              << "wrote " << (config.out_dir / "results.csv").string() << '\n';
    return 0;
}

int cmd_report(const std::string &csv_path) {
    auto rows = dqcsim::parse_results_csv(dqcsim::read_text_file(csv_path));
    auto dir = std::filesystem::path(csv_path).parent_path();
    dqcsim::report(rows, std::cout, dir.empty() ? std::filesystem::path(".") : dir);
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Distributed quantum computing simulator"};
    app.require_subcommand(1);

    std::string circuit, network, config, csv;
    std::optional<std::string> placement, out;
    auto *compile = app.add_subcommand("compile", "Partition and compile a circuit for a network");
    compile->add_option("circuit", circuit, "Circuit file")->required();
    compile->add_option("network", network, "Network JSON file")->required();
    compile->add_option("--placement", placement, "Placement JSON overriding the partitioner");
    compile->add_option("--out", out, "Write the compiled program here instead of stdout");

    RunOverrides overrides;
    auto *run = app.add_subcommand("run", "Run a fidelity sweep described by a config file");
    run->add_option("config", config, "Experiment config JSON")->required();
    run->add_option("--seed", overrides.seed, "Base seed");
    run->add_option("--rounds", overrides.rounds, "Trajectory rounds per grid point")->check(CLI::PositiveNumber);
    run->add_option("--mode", overrides.mode, "exact or trajectory")->check(CLI::IsMember({"exact", "trajectory"}));
    run->add_option("--jobs", overrides.jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--out-dir", overrides.out_dir, "Output directory");

    auto *rep = app.add_subcommand("report", "Summarize a results.csv");
    rep->add_option("csv", csv, "results.csv from a run")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*compile) {
            return cmd_compile(circuit, network, placement, out);
        }
        if (*run) {
            return cmd_run(config, overrides);
        }
        return cmd_report(csv);
    } catch (const dqcsim::Error &e) {
        std::cerr << "dqcsim: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception &e) {
        std::cerr << "dqcsim: " << e.what() << '\n';
        return 4;
    }
}
