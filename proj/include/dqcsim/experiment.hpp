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

/// Fidelity sweeps over a (gate fidelity x link fidelity) grid, the
/// results.csv format, and the report that summarizes it.
///
/// Config file (JSON, relative paths resolve against the config's directory):
///
///   {
///     "circuit": "ghz5.circ",
///     "network": "network.json",
///     "placement": "placement.json",          // optional
///     "mode": "exact",                        // or "trajectory"
///     "rounds": 100,
///     "sweep": {"gate_fidelity": [1, 0.95], "link_fidelity": [1, 0.95]},
///     "seed": 7,
///     "out_dir": "out",
///     "noiseless_single_qubit": false
///   }

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dqcsim/analytics.hpp"
#include "dqcsim/circuit.hpp"
#include "dqcsim/compiler.hpp"
#include "dqcsim/error.hpp"
#include "dqcsim/exec.hpp"
#include "dqcsim/network.hpp"

namespace dqcsim {

inline const std::vector<double> kDefaultSweep = {1.0, 0.975, 0.95, 0.925, 0.9};

struct ExperimentConfig {
    std::filesystem::path circuit;
    std::filesystem::path network;
    std::optional<std::filesystem::path> placement;
    ExecutionMode mode = ExecutionMode::Exact;
    std::size_t rounds = 100;
    std::vector<double> gate_fidelities = kDefaultSweep;
    std::vector<double> link_fidelities = kDefaultSweep;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";
    bool noiseless_single_qubit = false;

    void validate() const {
        if (rounds == 0) {
            throw ConfigError("rounds must be at least 1");
        }
        for (const auto *axis : {&gate_fidelities, &link_fidelities}) {
            if (axis->empty()) {
                throw ConfigError("sweep axes must not be empty");
            }
            for (double v : *axis) {
                if (!(v > 0.0 && v <= 1.0)) {
                    throw ConfigError("sweep value " + std::to_string(v) + " outside (0, 1]");
                }
            }
        }
    }
};

namespace detail {

inline std::vector<double> fidelity_list(const nlohmann::json &j, const char *key) {
    if (!j.is_array()) {
        throw ConfigError(std::string("sweep.") + key + " must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto &v : j) {
        if (!v.is_number()) {
            throw ConfigError(std::string("sweep.") + key + " must be an array of numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace detail

/// Parses a config; relative paths are resolved against `base_dir`.
inline ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path &base_dir = {}) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    static const std::set<std::string> known = {"circuit", "network", "placement", "mode",
                                                "rounds",  "sweep",   "seed",      "out_dir",
                                                "noiseless_single_qubit"};
    for (const auto &[k, v] : j.items()) {
        if (!known.count(k)) {
            throw ConfigError("config: unknown key '" + k + "'");
        }
    }
    auto path = [&](const char *key) {
        if (!j.contains(key) || !j[key].is_string()) {
            throw ConfigError(std::string("config: '") + key + "' must be a path string");
        }
        std::filesystem::path p = j[key].get<std::string>();
        return p.is_absolute() ? p : base_dir / p;
    };
    ExperimentConfig c;
    try {
        c.circuit = path("circuit");
        c.network = path("network");
        if (j.contains("placement")) {
            c.placement = path("placement");
        }
        if (j.contains("out_dir")) {
            c.out_dir = path("out_dir");
        } else {
            c.out_dir = base_dir / c.out_dir;
        }
        if (j.contains("mode")) {
            c.mode = parse_mode(j["mode"].get<std::string>());
        }
        if (j.contains("rounds")) {
            auto r = j["rounds"].get<std::int64_t>();
            if (r < 1) {
                throw ConfigError("rounds must be at least 1");
            }
            c.rounds = static_cast<std::size_t>(r);
        }
        if (j.contains("seed")) {
            c.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("noiseless_single_qubit")) {
            c.noiseless_single_qubit = j["noiseless_single_qubit"].get<bool>();
        }
        if (j.contains("sweep")) {
            const auto &s = j["sweep"];
            for (const auto &[k, v] : s.items()) {
                if (k == "gate_fidelity") {
                    c.gate_fidelities = detail::fidelity_list(v, "gate_fidelity");
                } else if (k == "link_fidelity") {
                    c.link_fidelities = detail::fidelity_list(v, "link_fidelity");
                } else {
                    throw ConfigError("config: unknown sweep key '" + k + "'");
                }
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
    return parse_experiment_config(read_text_file(path.string()), path.parent_path());
}

inline AbstractCircuit load_circuit(const std::filesystem::path &path) {
    std::string text = read_text_file(path.string());
    try {
        return parse_circuit(text);
    } catch (const ParseError &e) {
        throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ": " + e.detail());
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

inline Placement load_placement(const std::filesystem::path &path) {
    try {
        return parse_placement(read_text_file(path.string()));
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

/// Noise-free reference for one circuit: its pre-measurement state and
/// ideal classical output distribution.
struct IdealReference {
    DensityMatrix state;
    Pmf pmf;

    explicit IdealReference(const AbstractCircuit &c)
        : state(simulate_monolithic(c).rho()),
          pmf(clbit_pmf(state, clbit_sources(c), std::vector<double>(c.num_clbits(), 0.0))) {}
};

/// Quantum fidelities (global and per the first two QPUs) of an exact-mode
/// result against the ideal state. Data qubits are in logical order.
inline void fill_quantum(FidelityReport &report, const DensityMatrix &rho, const IdealReference &ideal,
                         const DistributedProgram &program) {
    report.quantum = quantum_fidelity(rho, ideal.state);
    std::optional<double> *slots[] = {&report.quantum_qpu0, &report.quantum_qpu1};
    for (std::size_t k = 0; k < 2 && k < program.streams.size(); k++) {
        auto keep = program.placement.logical_on(program.streams[k].qpu);
        std::sort(keep.begin(), keep.end());
        if (!keep.empty()) {
            *slots[k] = quantum_fidelity(partial_trace(rho, keep), partial_trace(ideal.state, keep));
        }
    }
}

/// One grid point evaluated from a single exact-mode run.
inline FidelityReport exact_point(const DistributedProgram &program, const NetworkModel &net,
                                  const IdealReference &ideal, const ExecOptions &options, ExecutionLog *log = nullptr) {
    ExecOptions o = options;
    o.mode = ExecutionMode::Exact;
    RunResult r = execute(program, net, o);
    FidelityReport report;
    report.rounds = 1;
    report.hellinger = hellinger_fidelity(r.exact_outcome_pmf(), ideal.pmf);
    fill_quantum(report, r.pre_measurement_state->rho(), ideal, program);
    if (log) {
        *log = std::move(r.log);
    }
    return report;
}

/// Runs the whole sweep. Writes `results.csv` and one log per run under
/// `out_dir/runs/`, and returns the rows in grid order (gate-major).
inline std::vector<FidelityReport> run_experiment(const ExperimentConfig &config, std::size_t jobs = 1) {
    config.validate();
    AbstractCircuit circuit = load_circuit(config.circuit);
    NetworkModel net = load_network(config.network.string());
    std::optional<Placement> placement;
    if (config.placement) {
        placement = load_placement(*config.placement);
    }
    DistributedProgram program = compile(circuit, net.qpus, placement);
    IdealReference ideal(circuit);

    struct Point {
        double gate, link;
        std::string id;
        NetworkModel net;
    };
    std::vector<Point> points;
    for (std::size_t gi = 0; gi < config.gate_fidelities.size(); gi++) {
        for (std::size_t li = 0; li < config.link_fidelities.size(); li++) {
            double g = config.gate_fidelities[gi], l = config.link_fidelities[li];
            points.push_back({g, l, "g" + std::to_string(gi) + "-l" + std::to_string(li),
                              with_uniform_noise(net, g, l)});
        }
    }

    std::filesystem::path runs = config.out_dir / "runs";
    std::filesystem::create_directories(runs);
    for (const auto &entry : std::filesystem::directory_iterator(runs)) {
        if (entry.path().extension() == ".log") {
            std::filesystem::remove(entry.path());
        }
    }

    ExecOptions base;
    base.noiseless_single_qubit = config.noiseless_single_qubit;
    std::vector<FidelityReport> reports(points.size());
    if (config.mode == ExecutionMode::Exact) {
        detail::parallel_for(points.size(), jobs, [&](std::size_t p) {
            ExecOptions o = base;
            o.seed = config.seed;
            o.run_id = points[p].id;
            ExecutionLog log;
            reports[p] = exact_point(program, points[p].net, ideal, o, &log);
            log.write((runs / (o.run_id + ".log")).string());
        });
    } else {
        std::size_t rounds = config.rounds;
        std::vector<ClassicalOutcome> outcomes(points.size() * rounds, ClassicalOutcome(program.num_clbits));
        detail::parallel_for(outcomes.size(), jobs, [&](std::size_t task) {
            std::size_t p = task / rounds, i = task % rounds;
            ExecOptions o = base;
            o.mode = ExecutionMode::Trajectory;
            o.seed = config.seed + task;
            o.run_id = points[p].id + "-r" + std::to_string(i);
            RunResult r = execute(program, points[p].net, o);
            r.log.write((runs / (o.run_id + ".log")).string());
            outcomes[task] = *r.outcome;
        });
        for (std::size_t p = 0; p < points.size(); p++) {
            std::span<const ClassicalOutcome> mine(outcomes.data() + p * rounds, rounds);
            reports[p].rounds = rounds;
            reports[p].hellinger = hellinger_fidelity(estimate_pmf(mine), ideal.pmf);
        }
    }
    for (std::size_t p = 0; p < points.size(); p++) {
        reports[p].gate_fidelity = points[p].gate;
        reports[p].link_fidelity = points[p].link;
    }

    std::ofstream csv(config.out_dir / "results.csv", std::ios::binary);
    if (!csv) {
        throw SimulationError("cannot write " + (config.out_dir / "results.csv").string());
    }
    csv << FidelityReport::csv_header() << '\n';
    for (const auto &r : reports) {
        csv << r.csv_row() << '\n';
    }
    return reports;
}

inline std::vector<FidelityReport> parse_results_csv(std::string_view text) {
    std::vector<std::string> lines;
    std::istringstream in{std::string(text)};
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) {
        lines.pop_back();
    }
    if (lines.empty()) {
        throw ConfigError("results CSV is empty");
    }
    if (lines[0] != FidelityReport::csv_header()) {
        throw ParseError(1, "unexpected CSV header");
    }
    std::vector<FidelityReport> out;
    for (std::size_t n = 1; n < lines.size(); n++) {
        std::vector<std::string> cells;
        std::stringstream row(lines[n]);
        for (std::string cell; std::getline(row, cell, ',');) {
            cells.push_back(cell);
        }
        if (!lines[n].empty() && lines[n].back() == ',') {
            cells.emplace_back();
        }
        if (cells.size() != 7) {
            throw ParseError(n + 1, "expected 7 fields, got " + std::to_string(cells.size()));
        }
        auto num = [&](const std::string &s) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used == 0 || used != s.size()) {
                throw ParseError(n + 1, "bad number '" + s + "'");
            }
            return v;
        };
        auto opt = [&](const std::string &s) { return s.empty() ? std::nullopt : std::optional<double>(num(s)); };
        FidelityReport r;
        r.gate_fidelity = num(cells[0]);
        r.link_fidelity = num(cells[1]);
        r.rounds = static_cast<std::size_t>(num(cells[2]));
        r.hellinger = num(cells[3]);
        r.quantum = opt(cells[4]);
        r.quantum_qpu0 = opt(cells[5]);
        r.quantum_qpu1 = opt(cells[6]);
        out.push_back(r);
    }
    if (out.empty()) {
        throw ConfigError("results CSV has no rows");
    }
    return out;
}

/// Sweep rows arranged as gate x link matrices, with the two ordering checks.
class SweepSummary {
   public:
    explicit SweepSummary(const std::vector<FidelityReport> &rows) {
        for (const auto &r : rows) {
            gates_.push_back(r.gate_fidelity);
            links_.push_back(r.link_fidelity);
        }
        auto unique_desc = [](std::vector<double> &v) {
            std::sort(v.begin(), v.end(), std::greater<>());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        unique_desc(gates_);
        unique_desc(links_);
        for (const auto &r : rows) {
            cells_[{r.gate_fidelity, r.link_fidelity}] = r;
        }
    }

    const std::vector<double> &gates() const {
        return gates_;
    }
    const std::vector<double> &links() const {
        return links_;
    }

    std::optional<double> value(const std::string &metric, double gate, double link) const {
        auto it = cells_.find({gate, link});
        if (it == cells_.end()) {
            return std::nullopt;
        }
        const auto &r = it->second;
        if (metric == "hellinger") {
            return r.hellinger;
        }
        if (metric == "quantum") {
            return r.quantum;
        }
        if (metric == "quantum_qpu0") {
            return r.quantum_qpu0;
        }
        if (metric == "quantum_qpu1") {
            return r.quantum_qpu1;
        }
        throw ConfigError("unknown metric '" + metric + "'");
    }

    bool has_metric(const std::string &metric) const {
        return std::any_of(cells_.begin(), cells_.end(),
                           [&](const auto &kv) { return value(metric, kv.first.first, kv.first.second).has_value(); });
    }

    /// Plot-ready matrix: header row of link fidelities, then one row per
    /// gate fidelity. Missing cells print as `nan`.
    std::string matrix(const std::string &metric) const {
        auto num = [](std::optional<double> v) {
            if (!v) {
                return std::string("nan");
            }
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9g", *v);
            return std::string(buf);
        };
        std::string out = "gate\\link";
        for (double l : links_) {
            out += " " + num(l);
        }
        out += '\n';
        for (double g : gates_) {
            out += num(g);
            for (double l : links_) {
                out += " " + num(value(metric, g, l));
            }
            out += '\n';
        }
        return out;
    }

    /// For every noise level x on both axes: metric(gate=x, link=1) <=
    /// metric(gate=1, link=x). Vacuously false when no pair is comparable.
    bool gate_dominates(const std::string &metric) const {
        std::size_t compared = 0;
        for (double x : gates_) {
            if (x == 1.0) {
                continue;
            }
            auto gate_noisy = value(metric, x, 1.0);
            auto link_noisy = value(metric, 1.0, x);
            if (gate_noisy && link_noisy) {
                compared++;
                if (*gate_noisy > *link_noisy) {
                    return false;
                }
            }
        }
        return compared > 0;
    }

    /// Non-increasing as either fidelity decreases.
    bool monotone(const std::string &metric) const {
        for (std::size_t gi = 0; gi < gates_.size(); gi++) {
            for (std::size_t li = 0; li < links_.size(); li++) {
                auto v = value(metric, gates_[gi], links_[li]);
                if (!v) {
                    continue;
                }
                if (gi + 1 < gates_.size()) {
                    auto next = value(metric, gates_[gi + 1], links_[li]);
                    if (next && *next > *v) {
                        return false;
                    }
                }
                if (li + 1 < links_.size()) {
                    auto next = value(metric, gates_[gi], links_[li + 1]);
                    if (next && *next > *v) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

   private:
    std::vector<double> gates_, links_;
    std::map<std::pair<double, double>, FidelityReport> cells_;
};

/// Prints the matrices and ordering checks; writes `<metric>.dat` next to
/// the CSV when `data_dir` is given. Returns whether all checks passed.
inline bool report(const std::vector<FidelityReport> &rows, std::ostream &out,
                   const std::optional<std::filesystem::path> &data_dir = std::nullopt) {
    SweepSummary s(rows);
    bool dominance = true, monotone = true;
    for (const std::string metric : {"hellinger", "quantum", "quantum_qpu0", "quantum_qpu1"}) {
        if (!s.has_metric(metric)) {
            continue;
        }
        std::string m = s.matrix(metric);
        out << "# " << metric << '\n' << m << '\n';
        if (data_dir) {
            std::ofstream f(*data_dir / (metric + ".dat"), std::ios::binary);
            if (!f) {
                throw SimulationError("cannot write " + (*data_dir / (metric + ".dat")).string());
            }
            f << m;
        }
        if (metric == "hellinger" || metric == "quantum") {
            dominance = dominance && s.gate_dominates(metric);
            monotone = monotone && s.monotone(metric);
        }
    }
    out << "gate>link impact: " << (dominance ? "PASS" : "FAIL") << '\n';
    out << "monotone: " << (monotone ? "PASS" : "FAIL") << '\n';
    return dominance && monotone;
}

}  // namespace dqcsim
