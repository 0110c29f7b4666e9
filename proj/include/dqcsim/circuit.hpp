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

/// Gate-level intermediate representation shared by the abstract (monolithic)
/// circuit and the compiled per-QPU programs, plus the line-oriented circuit
/// text format:
///
///     qubits 5;
///     clbits 5;
///     h 0
///     cz 0 1        # comment
///     measure 0 -> 0
///
/// Statements are separated by `;` or newlines. `#` starts a comment.

#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dqcsim/error.hpp"

namespace dqcsim {

enum class GateKind { H, X, Z, CZ, CNOT, MEASURE, RESET };

inline std::string_view gate_name(GateKind kind) {
    switch (kind) {
        case GateKind::H:
            return "h";
        case GateKind::X:
            return "x";
        case GateKind::Z:
            return "z";
        case GateKind::CZ:
            return "cz";
        case GateKind::CNOT:
            return "cnot";
        case GateKind::MEASURE:
            return "measure";
        case GateKind::RESET:
            return "reset";
    }
    return "?";
}

inline std::optional<GateKind> gate_kind_from_name(std::string_view name) {
    for (auto k : {GateKind::H, GateKind::X, GateKind::Z, GateKind::CZ, GateKind::CNOT, GateKind::MEASURE,
                   GateKind::RESET}) {
        if (gate_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

inline std::size_t gate_arity(GateKind kind) {
    return kind == GateKind::CZ || kind == GateKind::CNOT ? 2 : 1;
}

inline bool is_unitary(GateKind kind) {
    return kind != GateKind::MEASURE && kind != GateKind::RESET;
}

struct Gate {
    GateKind kind = GateKind::H;
    std::vector<std::size_t> operands;
    std::optional<std::size_t> classical_target;

    static Gate h(std::size_t q) {
        return {GateKind::H, {q}, std::nullopt};
    }
    static Gate x(std::size_t q) {
        return {GateKind::X, {q}, std::nullopt};
    }
    static Gate z(std::size_t q) {
        return {GateKind::Z, {q}, std::nullopt};
    }
    static Gate reset(std::size_t q) {
        return {GateKind::RESET, {q}, std::nullopt};
    }
    static Gate cz(std::size_t a, std::size_t b) {
        return {GateKind::CZ, {a, b}, std::nullopt};
    }
    static Gate cnot(std::size_t control, std::size_t target) {
        return {GateKind::CNOT, {control, target}, std::nullopt};
    }
    static Gate measure(std::size_t q, std::size_t clbit) {
        return {GateKind::MEASURE, {q}, clbit};
    }

    bool operator==(const Gate &other) const = default;

    /// Shape check independent of any circuit: arity, distinct operands,
    /// classical target present exactly for MEASURE.
    std::optional<std::string> shape_error() const {
        if (operands.size() != gate_arity(kind)) {
            return std::string(gate_name(kind)) + " takes " + std::to_string(gate_arity(kind)) + " operand(s)";
        }
        if (operands.size() == 2 && operands[0] == operands[1]) {
            return std::string(gate_name(kind)) + " has duplicate operands";
        }
        if ((kind == GateKind::MEASURE) != classical_target.has_value()) {
            return kind == GateKind::MEASURE ? "measure needs a classical target"
                                             : "only measure may write a classical bit";
        }
        return std::nullopt;
    }

    /// Text form used by the circuit format and program dumps.
    std::string str() const {
        std::string out(gate_name(kind));
        for (auto q : operands) {
            out += ' ';
            out += std::to_string(q);
        }
        if (classical_target) {
            out += " -> " + std::to_string(*classical_target);
        }
        return out;
    }
};

namespace detail {

struct CircuitViolation {
    std::size_t gate_index;
    std::string message;
};

/// Validates gates in order and reports the first violation.
inline std::optional<CircuitViolation> find_violation(std::size_t num_qubits, std::size_t num_clbits,
                                                      const std::vector<Gate> &gates) {
    // Per qubit: measured and not yet reset. Per clbit: the qubit that wrote it,
    // which must be reset before the bit may be written again.
    std::vector<bool> measured(num_qubits, false);
    std::vector<std::optional<std::size_t>> writer(num_clbits);
    std::vector<bool> writer_reset(num_clbits, false);
    for (std::size_t i = 0; i < gates.size(); i++) {
        const Gate &g = gates[i];
        if (auto e = g.shape_error()) {
            return CircuitViolation{i, *e};
        }
        for (auto q : g.operands) {
            if (q >= num_qubits) {
                return CircuitViolation{i, "qubit " + std::to_string(q) + " out of range (circuit has " +
                                               std::to_string(num_qubits) + ")"};
            }
        }
        if (g.classical_target && *g.classical_target >= num_clbits) {
            return CircuitViolation{i, "classical bit " + std::to_string(*g.classical_target) +
                                           " out of range (circuit has " + std::to_string(num_clbits) + ")"};
        }
        if (g.kind == GateKind::RESET) {
            measured[g.operands[0]] = false;
            for (std::size_t c = 0; c < num_clbits; c++) {
                if (writer[c] == g.operands[0]) {
                    writer_reset[c] = true;
                }
            }
            continue;
        }
        for (auto q : g.operands) {
            if (measured[q]) {
                return CircuitViolation{i, "qubit " + std::to_string(q) + " used after measurement without reset"};
            }
        }
        if (g.kind == GateKind::MEASURE) {
            auto c = *g.classical_target;
            if (writer[c] && !writer_reset[c]) {
                return CircuitViolation{i, "classical bit " + std::to_string(c) + " written twice"};
            }
            writer[c] = g.operands[0];
            writer_reset[c] = false;
            measured[g.operands[0]] = true;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Platform-independent gate list over logical qubits. Immutable once built;
/// the constructor enforces every IR invariant.
class AbstractCircuit {
   public:
    AbstractCircuit(std::size_t num_qubits, std::size_t num_clbits, std::vector<Gate> gates = {})
        : num_qubits_(num_qubits), num_clbits_(num_clbits), gates_(std::move(gates)) {
        if (num_qubits_ == 0) {
            throw CircuitError("circuit needs at least one qubit");
        }
        if (auto v = detail::find_violation(num_qubits_, num_clbits_, gates_)) {
            throw CircuitError("gate " + std::to_string(v->gate_index) + " (" + gates_[v->gate_index].str() +
                               "): " + v->message);
        }
    }

    std::size_t num_qubits() const noexcept {
        return num_qubits_;
    }
    std::size_t num_clbits() const noexcept {
        return num_clbits_;
    }
    const std::vector<Gate> &gates() const noexcept {
        return gates_;
    }

    /// The circuit with every MEASURE removed (the pre-measurement evolution).
    AbstractCircuit without_measurements() const {
        std::vector<Gate> kept;
        for (const auto &g : gates_) {
            if (g.kind != GateKind::MEASURE) {
                kept.push_back(g);
            }
        }
        return AbstractCircuit(num_qubits_, num_clbits_, std::move(kept));
    }

    bool operator==(const AbstractCircuit &other) const = default;

   private:
    std::size_t num_qubits_;
    std::size_t num_clbits_;
    std::vector<Gate> gates_;
};

/// One classical output string. Index 0 is the leftmost character.
class ClassicalOutcome {
   public:
    explicit ClassicalOutcome(std::size_t num_bits) : bits_(num_bits, '0') {
    }
    explicit ClassicalOutcome(std::string bits) : bits_(std::move(bits)) {
        for (char c : bits_) {
            if (c != '0' && c != '1') {
                throw ConfigError("classical outcome must consist of 0/1 characters: '" + bits_ + "'");
            }
        }
    }

    std::size_t size() const noexcept {
        return bits_.size();
    }
    bool operator[](std::size_t i) const {
        return bits_.at(i) == '1';
    }
    void set(std::size_t i, bool value) {
        bits_.at(i) = value ? '1' : '0';
    }
    const std::string &str() const noexcept {
        return bits_;
    }
    bool operator==(const ClassicalOutcome &other) const = default;
    auto operator<=>(const ClassicalOutcome &other) const = default;

   private:
    std::string bits_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) {
            i++;
        }
        std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) {
            i++;
        }
        if (i > start) {
            out.push_back(s.substr(start, i - start));
        }
    }
    return out;
}

inline std::optional<std::size_t> parse_index(std::string_view s) {
    std::size_t value = 0;
    if (s.empty()) {
        return std::nullopt;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return value;
}

}  // namespace detail

/// Parses the circuit text format. Errors carry the 1-based line number.
inline AbstractCircuit parse_circuit(std::string_view text) {
    struct Statement {
        std::size_t line;
        std::string_view body;
    };
    std::vector<Statement> statements;
    std::size_t line = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = text.size();
        }
        std::string_view raw = text.substr(pos, eol - pos);
        if (auto hash = raw.find('#'); hash != std::string_view::npos) {
            raw = raw.substr(0, hash);
        }
        std::size_t start = 0;
        while (start <= raw.size()) {
            std::size_t semi = raw.find(';', start);
            if (semi == std::string_view::npos) {
                semi = raw.size();
            }
            auto body = detail::trim(raw.substr(start, semi - start));
            if (!body.empty()) {
                statements.push_back({line, body});
            }
            start = semi + 1;
        }
        pos = eol + 1;
        line++;
    }

    std::optional<std::size_t> num_qubits;
    std::optional<std::size_t> num_clbits;
    std::vector<Gate> gates;
    std::vector<std::size_t> gate_lines;
    for (const auto &st : statements) {
        auto tokens = detail::split_ws(st.body);
        std::string_view head = tokens[0];
        if (head == "qubits" || head == "clbits") {
            auto &slot = head == "qubits" ? num_qubits : num_clbits;
            if (slot) {
                throw ParseError(st.line, "duplicate '" + std::string(head) + "' header");
            }
            if (!gates.empty()) {
                throw ParseError(st.line, "'" + std::string(head) + "' header after first instruction");
            }
            if (tokens.size() != 2) {
                throw ParseError(st.line, "expected '" + std::string(head) + " <count>'");
            }
            auto n = detail::parse_index(tokens[1]);
            if (!n) {
                throw ParseError(st.line, "bad count '" + std::string(tokens[1]) + "'");
            }
            slot = *n;
            continue;
        }
        auto kind = gate_kind_from_name(head);
        if (!kind) {
            throw ParseError(st.line, "unknown instruction '" + std::string(head) + "'");
        }
        if (!num_qubits || !num_clbits) {
            throw ParseError(st.line, "instruction before 'qubits' and 'clbits' headers");
        }
        Gate g{*kind, {}, std::nullopt};
        std::size_t i = 1;
        for (; i < tokens.size() && tokens[i] != "->"; i++) {
            auto q = detail::parse_index(tokens[i]);
            if (!q) {
                throw ParseError(st.line, "bad qubit index '" + std::string(tokens[i]) + "'");
            }
            g.operands.push_back(*q);
        }
        if (i < tokens.size()) {
            if (i + 2 != tokens.size()) {
                throw ParseError(st.line, "expected a single classical bit after '->'");
            }
            auto c = detail::parse_index(tokens[i + 1]);
            if (!c) {
                throw ParseError(st.line, "bad classical bit '" + std::string(tokens[i + 1]) + "'");
            }
            g.classical_target = *c;
        }
        gates.push_back(std::move(g));
        gate_lines.push_back(st.line);
    }
    if (!num_qubits || !num_clbits) {
        throw ParseError(line > 1 ? line - 1 : 1, "missing 'qubits' or 'clbits' header");
    }
    if (*num_qubits == 0) {
        throw ParseError(1, "circuit needs at least one qubit");
    }
    if (auto v = detail::find_violation(*num_qubits, *num_clbits, gates)) {
        throw ParseError(gate_lines[v->gate_index], v->message);
    }
    return AbstractCircuit(*num_qubits, *num_clbits, std::move(gates));
}

/// Canonical text: header on the first line, then one gate per line.
inline std::string serialize_circuit(const AbstractCircuit &c) {
    std::ostringstream out;
    out << "qubits " << c.num_qubits() << "; clbits " << c.num_clbits() << ";\n";
    for (const auto &g : c.gates()) {
        out << g.str() << '\n';
    }
    return out.str();
}

/// GHZ preparation from H and CZ only: H on q0, then H-CZ-H ladders down the
/// chain (each ladder is a CNOT from q_i to q_{i+1}), then measure q_i -> c_i.
inline AbstractCircuit ghz_circuit(std::size_t n) {
    if (n == 0) {
        throw CircuitError("GHZ circuit needs at least one qubit");
    }
    std::vector<Gate> gates{Gate::h(0)};
    for (std::size_t i = 0; i + 1 < n; i++) {
        gates.push_back(Gate::h(i + 1));
        gates.push_back(Gate::cz(i, i + 1));
        gates.push_back(Gate::h(i + 1));
    }
    for (std::size_t i = 0; i < n; i++) {
        gates.push_back(Gate::measure(i, i));
    }
    return AbstractCircuit(n, n, std::move(gates));
}

}  // namespace dqcsim
