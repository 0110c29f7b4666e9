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

/// Performance indicators: output distributions, classical (Hellinger) and
/// quantum fidelity, and reduced density operators.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "dqcsim/circuit.hpp"
#include "dqcsim/error.hpp"
#include "dqcsim/state.hpp"

namespace dqcsim {

inline constexpr double kPsdTolerance = 1e-7;

/// Probability mass function over fixed-length bitstrings. Missing keys have
/// probability zero.
class Pmf {
   public:
    Pmf() = default;
    explicit Pmf(std::map<std::string, double> probabilities) : probs_(std::move(probabilities)) {
        double total = 0.0;
        std::optional<std::size_t> width;
        for (const auto &[k, p] : probs_) {
            if (!(p >= 0.0)) {
                throw ConfigError("negative probability for '" + k + "'");
            }
            if (width && *width != k.size()) {
                throw ConfigError("PMF keys must have equal length");
            }
            width = k.size();
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw ConfigError("PMF sums to " + std::to_string(total) + ", expected 1");
        }
    }

    double operator()(const std::string &key) const {
        auto it = probs_.find(key);
        return it == probs_.end() ? 0.0 : it->second;
    }
    const std::map<std::string, double> &probabilities() const noexcept {
        return probs_;
    }
    bool empty() const noexcept {
        return probs_.empty();
    }

   private:
    std::map<std::string, double> probs_;
};

inline Pmf estimate_pmf(std::span<const ClassicalOutcome> outcomes) {
    if (outcomes.empty()) {
        throw ConfigError("cannot estimate a PMF from zero outcomes");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto &o : outcomes) {
        counts[o.str()]++;
    }
    std::map<std::string, double> probs;
    for (const auto &[k, c] : counts) {
        probs[k] = static_cast<double>(c) / static_cast<double>(outcomes.size());
    }
    return Pmf(std::move(probs));
}

/// Squared Bhattacharyya coefficient (sum_x sqrt(p(x) q(x)))^2.
inline double hellinger_fidelity(const Pmf &p, const Pmf &q) {
    if (p.empty() || q.empty()) {
        throw ConfigError("Hellinger fidelity of an empty PMF");
    }
    // Expanded square: sum_x p q + 2 sum_{x<y} sqrt(p q p' q'). Exact when a
    // single outcome overlaps.
    std::vector<double> overlap;
    for (const auto &[k, pk] : p.probabilities()) {
        if (double x = pk * q(k); x > 0.0) {
            overlap.push_back(x);
        }
    }
    double diag = 0.0, cross = 0.0;
    for (std::size_t i = 0; i < overlap.size(); i++) {
        diag += overlap[i];
        for (std::size_t j = i + 1; j < overlap.size(); j++) {
            cross += std::sqrt(overlap[i] * overlap[j]);
        }
    }
    return std::clamp(diag + 2.0 * cross, 0.0, 1.0);
}

inline double total_variation(const Pmf &p, const Pmf &q) {
    std::set<std::string> keys;
    for (const auto &[k, v] : p.probabilities()) {
        keys.insert(k);
    }
    for (const auto &[k, v] : q.probabilities()) {
        keys.insert(k);
    }
    double tv = 0.0;
    for (const auto &k : keys) {
        tv += std::abs(p(k) - q(k));
    }
    return tv / 2.0;
}

namespace detail {

inline std::size_t qubit_count(const DensityMatrix &rho) {
    auto d = static_cast<std::size_t>(rho.rows());
    if (rho.rows() != rho.cols() || d == 0 || (d & (d - 1)) != 0) {
        throw SimulationError("density matrix must be square with power-of-two dimension");
    }
    std::size_t n = 0;
    while ((std::size_t{1} << n) < d) {
        n++;
    }
    return n;
}

inline std::vector<std::size_t> masks_of(std::size_t n, std::span<const std::size_t> qubits) {
    std::vector<std::size_t> masks;
    for (auto q : qubits) {
        masks.push_back(std::size_t{1} << (n - 1 - q));
    }
    return masks;
}

/// Eigen-decomposes the Hermitian part, rejecting eigenvalues below
/// -kPsdTolerance and clamping the rest at zero.
inline Eigen::SelfAdjointEigenSolver<DensityMatrix> psd_eigen(const DensityMatrix &m, const char *what) {
    DensityMatrix herm = (m + m.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(herm);
    if (solver.eigenvalues().minCoeff() < -kPsdTolerance) {
        throw SimulationError(std::string(what) + " is not positive semidefinite");
    }
    return solver;
}

inline DensityMatrix psd_sqrt(const DensityMatrix &m) {
    auto solver = psd_eigen(m, "density matrix");
    Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().adjoint();
}

inline void check_same_shape(const DensityMatrix &a, const DensityMatrix &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw SimulationError("fidelity between operators of different dimension");
    }
    qubit_count(a);
}

}  // namespace detail

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, always via eigendecompositions.
inline double quantum_fidelity_general(const DensityMatrix &rho, const DensityMatrix &sigma) {
    detail::check_same_shape(rho, sigma);
    DensityMatrix root = detail::psd_sqrt(rho);
    detail::psd_eigen(sigma, "density matrix");
    DensityMatrix inner = root * sigma * root;
    auto solver = detail::psd_eigen(inner, "fidelity kernel");
    double tr = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(tr * tr, 0.0, 1.0);
}

/// <psi| rho |psi> for a normalized state vector.
inline double quantum_fidelity(const DensityMatrix &rho, const Eigen::VectorXcd &psi) {
    if (psi.size() != rho.rows() || rho.rows() != rho.cols()) {
        throw SimulationError("fidelity between operators of different dimension");
    }
    return std::clamp((psi.adjoint() * rho * psi)(0, 0).real(), 0.0, 1.0);
}

/// Quantum fidelity; takes the pure-state shortcut when either argument has
/// unit purity.
inline double quantum_fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
    detail::check_same_shape(rho, sigma);
    auto pure_vector = [](const DensityMatrix &m) -> std::optional<Eigen::VectorXcd> {
        if (std::abs((m * m).trace().real() - 1.0) > 1e-9) {
            return std::nullopt;
        }
        auto solver = detail::psd_eigen(m, "density matrix");
        Eigen::Index top = 0;
        solver.eigenvalues().maxCoeff(&top);
        return Eigen::VectorXcd(solver.eigenvectors().col(top));
    };
    if (auto psi = pure_vector(sigma)) {
        detail::psd_eigen(rho, "density matrix");
        return quantum_fidelity(rho, *psi);
    }
    if (auto psi = pure_vector(rho)) {
        return quantum_fidelity(sigma, *psi);
    }
    return quantum_fidelity_general(rho, sigma);
}

/// Reduced density operator on `keep` (ascending global order).
inline DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const std::size_t> keep) {
    std::size_t n = detail::qubit_count(rho);
    if (keep.empty()) {
        throw SimulationError("partial trace needs at least one qubit to keep");
    }
    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end() || kept.back() >= n) {
        throw SimulationError("partial trace keep set has duplicates or out-of-range qubits");
    }
    std::vector<std::size_t> traced;
    for (std::size_t q = 0; q < n; q++) {
        if (!std::binary_search(kept.begin(), kept.end(), q)) {
            traced.push_back(q);
        }
    }
    auto keep_masks = detail::masks_of(n, kept);
    auto trace_masks = detail::masks_of(n, traced);
    auto ko = detail::subset_offsets(keep_masks);
    auto to = detail::subset_offsets(trace_masks);
    auto d = static_cast<Eigen::Index>(ko.size());
    DensityMatrix out = DensityMatrix::Zero(d, d);
    for (Eigen::Index b = 0; b < d; b++) {
        for (Eigen::Index a = 0; a < d; a++) {
            Complex sum = 0.0;
            for (auto t : to) {
                sum += rho(static_cast<Eigen::Index>(ko[a] | t), static_cast<Eigen::Index>(ko[b] | t));
            }
            out(a, b) = sum;
        }
    }
    return out;
}

inline DensityMatrix partial_trace(const DensityMatrix &rho, std::initializer_list<std::size_t> keep) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Relabels qubits: qubit k of the result is qubit order[k] of the input.
inline DensityMatrix permute_qubits(const DensityMatrix &rho, std::span<const std::size_t> order) {
    std::size_t n = detail::qubit_count(rho);
    std::vector<std::size_t> sorted(order.begin(), order.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); k++) {
        if (sorted.size() != n || sorted[k] != k) {
            throw SimulationError("qubit order must be a permutation");
        }
    }
    auto off = detail::subset_offsets(detail::masks_of(n, order));
    DensityMatrix out(rho.rows(), rho.cols());
    for (Eigen::Index j = 0; j < rho.cols(); j++) {
        for (Eigen::Index i = 0; i < rho.rows(); i++) {
            out(i, j) = rho(static_cast<Eigen::Index>(off[i]), static_cast<Eigen::Index>(off[j]));
        }
    }
    return out;
}

/// Computational-basis distribution of rho (qubit 0 = leftmost bit) after
/// independent per-bit readout flips.
inline Pmf exact_pmf(const DensityMatrix &rho, std::span<const double> bit_errors) {
    std::size_t n = detail::qubit_count(rho);
    if (bit_errors.size() != n) {
        throw SimulationError("need one readout error per qubit");
    }
    std::vector<double> p(static_cast<std::size_t>(rho.rows()));
    for (std::size_t i = 0; i < p.size(); i++) {
        p[i] = std::max(0.0, rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real());
    }
    for (std::size_t k = 0; k < n; k++) {
        double e = bit_errors[k];
        if (!(e >= 0.0 && e < 1.0)) {
            throw SimulationError("measurement error must be in [0, 1)");
        }
        if (e == 0.0) {
            continue;
        }
        std::size_t m = std::size_t{1} << (n - 1 - k);
        std::vector<double> q(p.size());
        for (std::size_t i = 0; i < p.size(); i++) {
            q[i] = (1.0 - e) * p[i] + e * p[i ^ m];
        }
        p = std::move(q);
    }
    std::map<std::string, double> probs;
    double total = 0.0;
    for (double v : p) {
        total += v;
    }
    for (std::size_t i = 0; i < p.size(); i++) {
        if (p[i] > 1e-15) {
            std::string key(n, '0');
            for (std::size_t k = 0; k < n; k++) {
                if (i & (std::size_t{1} << (n - 1 - k))) {
                    key[k] = '1';
                }
            }
            probs[key] = p[i] / total;
        }
    }
    return Pmf(std::move(probs));
}

inline Pmf exact_pmf(const DensityMatrix &rho, double measurement_error) {
    std::vector<double> errors(detail::qubit_count(rho), measurement_error);
    return exact_pmf(rho, errors);
}

/// For each classical bit, the logical qubit whose final measurement writes
/// it (nullopt if never written).
inline std::vector<std::optional<std::size_t>> clbit_sources(const AbstractCircuit &c) {
    std::vector<std::optional<std::size_t>> src(c.num_clbits());
    for (const auto &g : c.gates()) {
        if (g.kind == GateKind::MEASURE) {
            src[*g.classical_target] = g.operands[0];
        }
    }
    return src;
}

/// Distribution of the classical register when the qubits of `rho` are read
/// out into the bits named by `sources`. Unwritten bits read 0.
inline Pmf clbit_pmf(const DensityMatrix &rho, std::span<const std::optional<std::size_t>> sources,
                     std::span<const double> clbit_errors) {
    std::vector<std::size_t> qubits;
    std::vector<std::size_t> written;
    std::vector<double> errors;
    for (std::size_t c = 0; c < sources.size(); c++) {
        if (sources[c]) {
            qubits.push_back(*sources[c]);
            written.push_back(c);
            errors.push_back(c < clbit_errors.size() ? clbit_errors[c] : 0.0);
        }
    }
    if (qubits.empty()) {
        return Pmf({{std::string(sources.size(), '0'), 1.0}});
    }
    std::vector<std::size_t> sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw SimulationError("a qubit writes more than one classical bit; use trajectory mode");
    }
    DensityMatrix reduced = partial_trace(rho, sorted);
    std::vector<std::size_t> order;
    for (auto q : qubits) {
        order.push_back(static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), q) - sorted.begin()));
    }
    Pmf measured = exact_pmf(permute_qubits(reduced, order), errors);
    std::map<std::string, double> probs;
    for (const auto &[k, p] : measured.probabilities()) {
        std::string key(sources.size(), '0');
        for (std::size_t i = 0; i < written.size(); i++) {
            key[written[i]] = k[i];
        }
        probs[key] += p;
    }
    return Pmf(std::move(probs));
}

/// (|0...0> + |1...1>)/sqrt(2).
inline Eigen::VectorXcd ghz_vector(std::size_t n) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
    psi(0) = psi(psi.size() - 1) = 1.0 / std::sqrt(2.0);
    return psi;
}

/// Indicators for one sweep grid point. `quantum*` are absent when the run
/// produced no final state (trajectory mode) or the QPU does not exist.
struct FidelityReport {
    double gate_fidelity = 1.0;
    double link_fidelity = 1.0;
    std::size_t rounds = 0;
    double hellinger = 0.0;
    std::optional<double> quantum;
    std::optional<double> quantum_qpu0;
    std::optional<double> quantum_qpu1;

    static const char *csv_header() {
        return "gate_fidelity,link_fidelity,rounds,hellinger,quantum,quantum_qpu0,quantum_qpu1";
    }

    std::string csv_row() const {
        auto num = [](double v) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9g", v);
            return std::string(buf);
        };
        auto opt = [&](const std::optional<double> &v) { return v ? num(*v) : std::string(); };
        return num(gate_fidelity) + "," + num(link_fidelity) + "," + std::to_string(rounds) + "," + num(hellinger) +
               "," + opt(quantum) + "," + opt(quantum_qpu0) + "," + opt(quantum_qpu1);
    }
};

}  // namespace dqcsim
