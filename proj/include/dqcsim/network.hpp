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

/// Simulated network: QPU nodes, repeaters, quantum links delivering Werner
/// pairs and classical links with latency.
///
/// Network files are JSON documents with four arrays:
///
///     {
///       "qpu":      [{"name": "QPU0", "data_qubits": 3, "comm_qubits": 1,
///                     "coupling": "full", "gate_fidelity": 1.0,
///                     "measurement_error": 0.0}],
///       "repeater": [{"name": "R0", "swap_fidelity": 1.0}],
///       "qlink":    [{"endpoints": ["QPU0", "R0"], "fidelity": 0.95, "epr_latency": 10}],
///       "clink":    [{"endpoints": ["QPU0", "R0"], "latency": 1}]
///     }
///
/// `coupling` is either "full" or an adjacency list with one entry per
/// physical qubit (data qubits first, then communication qubits).

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dqcsim/error.hpp"
#include "dqcsim/state.hpp"
#include "json.hpp"

namespace dqcsim {

using SimTime = std::int64_t;

inline constexpr SimTime kDefaultEprLatency = 10;
inline constexpr SimTime kDefaultClassicalLatency = 1;

struct QpuSpec {
    std::string name;
    std::size_t data_qubits = 0;
    std::size_t comm_qubits = 0;
    /// Adjacency list over physical indices 0..total_qubits()-1.
    std::vector<std::vector<std::size_t>> coupling;
    double gate_fidelity = 1.0;
    double measurement_error = 0.0;

    std::size_t total_qubits() const noexcept {
        return data_qubits + comm_qubits;
    }
    std::size_t comm_qubit(std::size_t k) const {
        if (k >= comm_qubits) {
            throw CompileError("QPU " + name + " has no communication qubit " + std::to_string(k));
        }
        return data_qubits + k;
    }
    bool adjacent(std::size_t a, std::size_t b) const {
        if (a >= coupling.size()) {
            return false;
        }
        const auto &n = coupling[a];
        return std::find(n.begin(), n.end(), b) != n.end();
    }

    static std::vector<std::vector<std::size_t>> full_coupling(std::size_t n) {
        std::vector<std::vector<std::size_t>> adj(n);
        for (std::size_t a = 0; a < n; a++) {
            for (std::size_t b = 0; b < n; b++) {
                if (a != b) {
                    adj[a].push_back(b);
                }
            }
        }
        return adj;
    }

    /// Fully connected QPU, the common case in tests and examples.
    static QpuSpec fully_connected(std::string name, std::size_t data_qubits, std::size_t comm_qubits,
                                   double gate_fidelity = 1.0, double measurement_error = 0.0) {
        QpuSpec q{std::move(name), data_qubits, comm_qubits, {}, gate_fidelity, measurement_error};
        q.coupling = full_coupling(q.total_qubits());
        return q;
    }

    void validate() const {
        if (name.empty()) {
            throw ConfigError("QPU without a name");
        }
        if (data_qubits < 1) {
            throw ConfigError("QPU " + name + " needs at least one data qubit");
        }
        if (!(gate_fidelity > 0.0 && gate_fidelity <= 1.0)) {
            throw ConfigError("QPU " + name + ": gate_fidelity must be in (0, 1]");
        }
        if (!(measurement_error >= 0.0 && measurement_error < 1.0)) {
            throw ConfigError("QPU " + name + ": measurement_error must be in [0, 1)");
        }
        if (coupling.size() != total_qubits()) {
            throw ConfigError("QPU " + name + ": coupling map has " + std::to_string(coupling.size()) +
                              " rows, expected " + std::to_string(total_qubits()));
        }
        for (std::size_t a = 0; a < coupling.size(); a++) {
            for (auto b : coupling[a]) {
                if (b >= total_qubits() || b == a) {
                    throw ConfigError("QPU " + name + ": bad coupling edge " + std::to_string(a) + "-" +
                                      std::to_string(b));
                }
                if (!adjacent(b, a)) {
                    throw ConfigError("QPU " + name + ": coupling map is not symmetric at " + std::to_string(a) +
                                      "-" + std::to_string(b));
                }
            }
        }
    }
};

struct Repeater {
    std::string name;
    double swap_fidelity = 1.0;
};

struct QuantumLink {
    std::string a;
    std::string b;
    double fidelity = 1.0;
    SimTime epr_latency = kDefaultEprLatency;
};

struct ClassicalLink {
    std::string a;
    std::string b;
    SimTime latency = kDefaultClassicalLatency;
};

namespace detail {

inline bool werner_range(double f) {
    return f > 0.25 && f <= 1.0;
}

inline double werner_parameter(double fidelity) {
    return (4.0 * fidelity - 1.0) / 3.0;
}

inline double werner_fidelity(double parameter) {
    return (1.0 + 3.0 * parameter) / 4.0;
}

}  // namespace detail

struct NetworkModel {
    std::vector<QpuSpec> qpus;
    std::vector<Repeater> repeaters;
    std::vector<QuantumLink> quantum_links;
    std::vector<ClassicalLink> classical_links;

    const QpuSpec *find_qpu(std::string_view name) const {
        for (const auto &q : qpus) {
            if (q.name == name) {
                return &q;
            }
        }
        return nullptr;
    }
    const QpuSpec &qpu(std::string_view name) const {
        if (auto *q = find_qpu(name)) {
            return *q;
        }
        throw ConfigError("unknown QPU '" + std::string(name) + "'");
    }
    const Repeater *find_repeater(std::string_view name) const {
        for (const auto &r : repeaters) {
            if (r.name == name) {
                return &r;
            }
        }
        return nullptr;
    }
    bool has_node(std::string_view name) const {
        return find_qpu(name) != nullptr || find_repeater(name) != nullptr;
    }
    const QuantumLink *find_quantum_link(std::string_view a, std::string_view b) const {
        for (const auto &l : quantum_links) {
            if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) {
                return &l;
            }
        }
        return nullptr;
    }
    const ClassicalLink *find_classical_link(std::string_view a, std::string_view b) const {
        for (const auto &l : classical_links) {
            if ((l.a == a && l.b == b) || (l.a == b && l.b == a)) {
                return &l;
            }
        }
        return nullptr;
    }

    void validate() const {
        std::set<std::string> names;
        for (const auto &q : qpus) {
            q.validate();
            if (!names.insert(q.name).second) {
                throw ConfigError("duplicate node name '" + q.name + "'");
            }
        }
        for (const auto &r : repeaters) {
            if (r.name.empty()) {
                throw ConfigError("repeater without a name");
            }
            if (!names.insert(r.name).second) {
                throw ConfigError("duplicate node name '" + r.name + "'");
            }
            if (!detail::werner_range(r.swap_fidelity)) {
                throw ConfigError("repeater " + r.name + ": swap_fidelity must be in (1/4, 1]");
            }
        }
        auto check_endpoints = [&](const std::string &a, const std::string &b, const char *what) {
            if (!has_node(a) || !has_node(b)) {
                throw ConfigError(std::string(what) + " " + a + "-" + b + " references an undeclared node");
            }
            if (a == b) {
                throw ConfigError(std::string(what) + " " + a + "-" + b + " is a self loop");
            }
        };
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto &l : quantum_links) {
            check_endpoints(l.a, l.b, "qlink");
            if (!seen.insert(std::minmax(l.a, l.b)).second) {
                throw ConfigError("duplicate qlink " + l.a + "-" + l.b);
            }
            if (!detail::werner_range(l.fidelity)) {
                throw ConfigError("qlink " + l.a + "-" + l.b + ": fidelity must be in (1/4, 1]");
            }
            if (l.epr_latency < 0) {
                throw ConfigError("qlink " + l.a + "-" + l.b + ": negative latency");
            }
            if (!find_classical_link(l.a, l.b)) {
                throw ConfigError("qlink " + l.a + "-" + l.b + " has no classical link alongside it");
            }
        }
        seen.clear();
        for (const auto &l : classical_links) {
            check_endpoints(l.a, l.b, "clink");
            if (!seen.insert(std::minmax(l.a, l.b)).second) {
                throw ConfigError("duplicate clink " + l.a + "-" + l.b);
            }
            if (l.latency < 0) {
                throw ConfigError("clink " + l.a + "-" + l.b + ": negative latency");
            }
        }
    }
};

namespace detail {

inline std::pair<std::string, std::string> endpoints(const nlohmann::json &j, const char *what) {
    const auto &e = j.at("endpoints");
    if (!e.is_array() || e.size() != 2) {
        throw ConfigError(std::string(what) + ": 'endpoints' must list two node names");
    }
    return {e[0].get<std::string>(), e[1].get<std::string>()};
}

}  // namespace detail

inline NetworkModel parse_network(std::string_view text) {
    NetworkModel net;
    try {
        auto doc = nlohmann::json::parse(text);
        for (const auto &jq : doc.value("qpu", nlohmann::json::array())) {
            QpuSpec q;
            q.name = jq.at("name").get<std::string>();
            q.data_qubits = jq.at("data_qubits").get<std::size_t>();
            q.comm_qubits = jq.value("comm_qubits", std::size_t{1});
            q.gate_fidelity = jq.value("gate_fidelity", 1.0);
            q.measurement_error = jq.value("measurement_error", 0.0);
            auto coupling = jq.value("coupling", nlohmann::json("full"));
            if (coupling.is_string()) {
                if (coupling.get<std::string>() != "full") {
                    throw ConfigError("QPU " + q.name + ": coupling must be \"full\" or an adjacency list");
                }
                q.coupling = QpuSpec::full_coupling(q.total_qubits());
            } else {
                q.coupling = coupling.get<std::vector<std::vector<std::size_t>>>();
            }
            net.qpus.push_back(std::move(q));
        }
        for (const auto &jr : doc.value("repeater", nlohmann::json::array())) {
            net.repeaters.push_back({jr.at("name").get<std::string>(), jr.value("swap_fidelity", 1.0)});
        }
        for (const auto &jl : doc.value("qlink", nlohmann::json::array())) {
            auto [a, b] = detail::endpoints(jl, "qlink");
            net.quantum_links.push_back({a, b, jl.value("fidelity", 1.0), jl.value("epr_latency", kDefaultEprLatency)});
        }
        for (const auto &jl : doc.value("clink", nlohmann::json::array())) {
            auto [a, b] = detail::endpoints(jl, "clink");
            net.classical_links.push_back({a, b, jl.value("latency", kDefaultClassicalLatency)});
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("network file: ") + e.what());
    }
    if (net.qpus.empty()) {
        throw ConfigError("network declares no QPUs");
    }
    net.validate();
    return net;
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline NetworkModel load_network(const std::string &path) {
    return parse_network(read_text_file(path));
}

/// Entanglement swapping of two Werner pairs: the Werner parameters
/// w = (4F - 1)/3 multiply, and an imperfect swap contributes its own factor.
inline double compose_werner(double f1, double f2, double swap_fidelity = 1.0) {
    if (!detail::werner_range(f1) || !detail::werner_range(f2) || !detail::werner_range(swap_fidelity)) {
        throw ConfigError("Werner fidelities must be in (1/4, 1]");
    }
    return detail::werner_fidelity(detail::werner_parameter(f1) * detail::werner_parameter(f2) *
                                   detail::werner_parameter(swap_fidelity));
}

struct EprRoute {
    std::vector<std::string> path;
    double effective_fidelity = 1.0;
    SimTime total_latency = 0;
};

struct ClassicalRoute {
    std::vector<std::string> path;
    SimTime total_latency = 0;
};

namespace detail {

/// Shortest path by hop count; among equal-length paths the one whose node
/// sequence is lexicographically smallest. `may_relay(node)` decides which
/// nodes can sit in the interior of the path.
template <typename Neighbors, typename Relay>
std::optional<std::vector<std::string>> shortest_path(const std::string &from, const std::string &to,
                                                      Neighbors neighbors, Relay may_relay) {
    std::map<std::string, std::size_t> dist{{to, 0}};
    std::deque<std::string> queue{to};
    while (!queue.empty()) {
        auto u = queue.front();
        queue.pop_front();
        if (u == from || (u != to && !may_relay(u))) {
            continue;
        }
        for (const auto &v : neighbors(u)) {
            if (!dist.count(v)) {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if (!dist.count(from)) {
        return std::nullopt;
    }
    std::vector<std::string> path{from};
    while (path.back() != to) {
        auto d = dist[path.back()];
        std::optional<std::string> next;
        for (const auto &v : neighbors(path.back())) {
            auto it = dist.find(v);
            if (it == dist.end() || it->second + 1 != d || (v != to && !may_relay(v))) {
                continue;
            }
            if (!next || v < *next) {
                next = v;
            }
        }
        path.push_back(*next);
    }
    return path;
}

}  // namespace detail

/// EPR route between two QPUs: only repeaters may relay. The effective
/// fidelity multiplies the Werner parameters of every hop and every swap.
inline EprRoute resolve_route(const NetworkModel &net, const std::string &a, const std::string &b) {
    if (a == b) {
        throw SimulationError("EPR route endpoints must differ (" + a + ")");
    }
    if (!net.find_qpu(a) || !net.find_qpu(b)) {
        throw SimulationError("EPR route " + a + "-" + b + " must connect two QPUs");
    }
    auto neighbors = [&](const std::string &u) {
        std::vector<std::string> out;
        for (const auto &l : net.quantum_links) {
            if (l.a == u) {
                out.push_back(l.b);
            } else if (l.b == u) {
                out.push_back(l.a);
            }
        }
        return out;
    };
    auto relay = [&](const std::string &u) { return net.find_repeater(u) != nullptr; };
    auto path = detail::shortest_path(a, b, neighbors, relay);
    if (!path) {
        throw SimulationError("no quantum route between " + a + " and " + b);
    }
    EprRoute route{*path, 1.0, 0};
    double w = 1.0;
    for (std::size_t i = 0; i + 1 < path->size(); i++) {
        const auto *link = net.find_quantum_link((*path)[i], (*path)[i + 1]);
        w *= detail::werner_parameter(link->fidelity);
        route.total_latency += link->epr_latency;
        if (i > 0) {
            w *= detail::werner_parameter(net.find_repeater((*path)[i])->swap_fidelity);
        }
    }
    route.effective_fidelity = detail::werner_fidelity(w);
    return route;
}

/// Classical route: any node forwards messages.
inline ClassicalRoute resolve_classical_route(const NetworkModel &net, const std::string &a, const std::string &b) {
    if (a == b) {
        return {{a}, 0};
    }
    auto neighbors = [&](const std::string &u) {
        std::vector<std::string> out;
        for (const auto &l : net.classical_links) {
            if (l.a == u) {
                out.push_back(l.b);
            } else if (l.b == u) {
                out.push_back(l.a);
            }
        }
        return out;
    };
    auto path = detail::shortest_path(a, b, neighbors, [](const std::string &) { return true; });
    if (!path) {
        throw SimulationError("no classical route between " + a + " and " + b);
    }
    ClassicalRoute route{*path, 0};
    for (std::size_t i = 0; i + 1 < path->size(); i++) {
        route.total_latency += net.find_classical_link((*path)[i], (*path)[i + 1])->latency;
    }
    return route;
}

/// Places the route's Werner pair on two fresh communication qubits and
/// returns the delivery latency.
inline SimTime deliver_epr(const EprRoute &route, GlobalQuantumState &state, std::size_t qubit_a,
                           std::size_t qubit_b) {
    inject_epr(state, qubit_a, qubit_b, route.effective_fidelity);
    return route.total_latency;
}

/// Copy of `net` with every QPU's gate fidelity and every quantum link's
/// fidelity replaced (the sweep axes).
inline NetworkModel with_uniform_noise(const NetworkModel &net, double gate_fidelity, double link_fidelity) {
    NoiseSpec{gate_fidelity, link_fidelity, 0.0}.validate();
    if (!detail::werner_range(link_fidelity)) {
        throw ConfigError("link fidelity must be in (1/4, 1]");
    }
    NetworkModel out = net;
    for (auto &q : out.qpus) {
        q.gate_fidelity = gate_fidelity;
    }
    for (auto &l : out.quantum_links) {
        l.fidelity = link_fidelity;
    }
    return out;
}

}  // namespace dqcsim
