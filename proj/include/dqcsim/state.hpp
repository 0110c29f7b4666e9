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

/// Exact density-matrix backend for the simulated nodes.
///
/// A single density matrix spans every allocated physical qubit of every QPU;
/// `QubitMap` translates (qpu, physical index) pairs into global indices.
/// Global qubit 0 is the most significant bit of a basis-state label, so the
/// basis state |q0 q1 ... q_{n-1}> has index sum_k q_k * 2^(n-1-k).

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dqcsim/circuit.hpp"
#include "dqcsim/error.hpp"

namespace dqcsim {

using Complex = std::complex<double>;
using DensityMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

inline constexpr std::size_t kMaxQubits = 12;

/// Per-run noise knobs. Gate fidelity drives a depolarizing channel after each
/// gate; link fidelity is the Werner parameter of delivered EPR pairs;
/// measurement error flips the reported bit.
struct NoiseSpec {
    double gate_fidelity = 1.0;
    double link_fidelity = 1.0;
    double measurement_error = 0.0;

    void validate() const {
        if (!(gate_fidelity > 0.0 && gate_fidelity <= 1.0)) {
            throw ConfigError("gate fidelity must be in (0, 1], got " + std::to_string(gate_fidelity));
        }
        if (!(link_fidelity > 0.0 && link_fidelity <= 1.0)) {
            throw ConfigError("link fidelity must be in (0, 1], got " + std::to_string(link_fidelity));
        }
        if (!(measurement_error >= 0.0 && measurement_error < 1.0)) {
            throw ConfigError("measurement error must be in [0, 1), got " + std::to_string(measurement_error));
        }
    }
};

/// Bijection (qpu name, physical qubit) -> global qubit index, assigned in
/// insertion order.
class QubitMap {
   public:
    std::size_t add(const std::string &qpu, std::size_t physical) {
        auto [it, inserted] = index_.emplace(std::make_pair(qpu, physical), entries_.size());
        if (!inserted) {
            throw SimulationError("qubit " + qpu + "[" + std::to_string(physical) + "] mapped twice");
        }
        entries_.emplace_back(qpu, physical);
        return it->second;
    }
    bool contains(const std::string &qpu, std::size_t physical) const {
        return index_.count({qpu, physical}) != 0;
    }
    std::size_t at(const std::string &qpu, std::size_t physical) const {
        auto it = index_.find({qpu, physical});
        if (it == index_.end()) {
            throw SimulationError("qubit " + qpu + "[" + std::to_string(physical) + "] is not allocated");
        }
        return it->second;
    }
    const std::pair<std::string, std::size_t> &physical(std::size_t global) const {
        return entries_.at(global);
    }
    std::size_t size() const noexcept {
        return entries_.size();
    }

   private:
    std::map<std::pair<std::string, std::size_t>, std::size_t> index_;
    std::vector<std::pair<std::string, std::size_t>> entries_;
};

class GlobalQuantumState {
   public:
    /// |0...0><0...0| over n qubits, 1 <= n <= kMaxQubits.
    explicit GlobalQuantumState(std::size_t num_qubits) : num_qubits_(num_qubits) {
        if (num_qubits == 0 || num_qubits > kMaxQubits) {
            throw SimulationError("state size must be 1.." + std::to_string(kMaxQubits) + " qubits, got " +
                                  std::to_string(num_qubits));
        }
        rho_ = DensityMatrix::Zero(dim(), dim());
        rho_(0, 0) = 1.0;
    }

    /// Wraps an existing matrix; checks it is square with power-of-two size and
    /// unit trace. Positivity is not checked here (see `diagnose`).
    static GlobalQuantumState from_matrix(DensityMatrix rho) {
        auto d = static_cast<std::size_t>(rho.rows());
        if (rho.rows() != rho.cols() || d < 2 || (d & (d - 1)) != 0) {
            throw SimulationError("density matrix must be square with power-of-two dimension >= 2");
        }
        std::size_t n = 0;
        while ((std::size_t{1} << n) < d) {
            n++;
        }
        if (std::abs(rho.trace() - Complex(1.0)) > 1e-9) {
            throw SimulationError("density matrix trace must be 1");
        }
        GlobalQuantumState s(n);
        s.rho_ = std::move(rho);
        return s;
    }

    std::size_t num_qubits() const noexcept {
        return num_qubits_;
    }
    std::size_t dim() const noexcept {
        return std::size_t{1} << num_qubits_;
    }
    const DensityMatrix &rho() const noexcept {
        return rho_;
    }
    DensityMatrix &mutable_rho() noexcept {
        return rho_;
    }
    /// Basis-index bit that holds global qubit q.
    std::size_t mask(std::size_t q) const {
        if (q >= num_qubits_) {
            throw SimulationError("qubit " + std::to_string(q) + " out of range (state has " +
                                  std::to_string(num_qubits_) + ")");
        }
        return std::size_t{1} << (num_qubits_ - 1 - q);
    }

   private:
    std::size_t num_qubits_;
    DensityMatrix rho_;
};

inline GlobalQuantumState init_state(std::size_t n) {
    return GlobalQuantumState(n);
}

namespace detail {

using Mat2 = std::array<std::array<Complex, 2>, 2>;

/// Offsets of the 2^k sub-basis states of `masks` (first mask = most
/// significant local bit).
inline std::vector<std::size_t> subset_offsets(std::span<const std::size_t> masks) {
    std::size_t k = masks.size();
    std::vector<std::size_t> off(std::size_t{1} << k, 0);
    for (std::size_t s = 0; s < off.size(); s++) {
        for (std::size_t t = 0; t < k; t++) {
            if (s & (std::size_t{1} << (k - 1 - t))) {
                off[s] |= masks[t];
            }
        }
    }
    return off;
}

inline std::vector<std::size_t> base_indices(std::size_t dim, std::size_t combined_mask) {
    std::vector<std::size_t> out;
    out.reserve(dim);
    for (std::size_t i = 0; i < dim; i++) {
        if ((i & combined_mask) == 0) {
            out.push_back(i);
        }
    }
    return out;
}

/// Complex product without the inf/nan recovery of std::complex operator*.
inline Complex mul(Complex a, Complex b) {
    return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// rho <- U rho U^dagger for a single-qubit U.
inline void apply_1q(DensityMatrix &rho, std::size_t m, const Mat2 &u) {
    auto dim = static_cast<std::size_t>(rho.rows());
    Complex *d = rho.data();
    for (std::size_t j = 0; j < dim; j++) {
        Complex *col = d + j * dim;
        for (std::size_t i = 0; i < dim; i++) {
            if (i & m) {
                continue;
            }
            Complex a = col[i], b = col[i | m];
            col[i] = mul(u[0][0], a) + mul(u[0][1], b);
            col[i | m] = mul(u[1][0], a) + mul(u[1][1], b);
        }
    }
    Complex c00 = std::conj(u[0][0]), c01 = std::conj(u[0][1]), c10 = std::conj(u[1][0]),
            c11 = std::conj(u[1][1]);
    for (std::size_t j = 0; j < dim; j++) {
        if (j & m) {
            continue;
        }
        Complex *c0 = d + j * dim;
        Complex *c1 = d + (j | m) * dim;
        for (std::size_t i = 0; i < dim; i++) {
            Complex a = c0[i], b = c1[i];
            c0[i] = mul(a, c00) + mul(b, c01);
            c1[i] = mul(a, c10) + mul(b, c11);
        }
    }
}

/// Permutes basis labels: rho(i, j) <- rho(f(i), f(j)) for an involution f.
template <typename F>
inline void apply_involution(DensityMatrix &rho, F f) {
    auto dim = static_cast<std::size_t>(rho.rows());
    for (std::size_t j = 0; j < dim; j++) {
        std::size_t fj = f(j);
        for (std::size_t i = 0; i < dim; i++) {
            std::size_t fi = f(i);
            // Visit each swapped pair once.
            if (fj > j || (fj == j && fi > i)) {
                std::swap(rho(i, j), rho(fi, fj));
            }
        }
    }
}

/// rho(i, j) <- s(i) s(j) rho(i, j) for a +-1 diagonal unitary s.
template <typename S>
inline void apply_sign_diagonal(DensityMatrix &rho, S negative) {
    auto dim = static_cast<std::size_t>(rho.rows());
    for (std::size_t j = 0; j < dim; j++) {
        bool nj = negative(j);
        for (std::size_t i = 0; i < dim; i++) {
            if (negative(i) != nj) {
                rho(i, j) = -rho(i, j);
            }
        }
    }
}

/// Sum over the sub-basis of `offsets` of rho(ib|s, jb|s): the (ib, jb) entry
/// of the operator with those qubits traced out.
inline Complex traced_entry(const DensityMatrix &rho, std::size_t ib, std::size_t jb,
                            const std::vector<std::size_t> &off) {
    Complex sum = 0.0;
    for (auto o : off) {
        sum += rho(ib | o, jb | o);
    }
    return sum;
}

/// rho <- (1 - p) rho + p * Tr_S(rho) (x) I/d on the qubits with `masks`.
inline void depolarize(DensityMatrix &rho, std::span<const std::size_t> masks, double p) {
    if (p == 0.0) {
        return;
    }
    auto dim = static_cast<std::size_t>(rho.rows());
    std::size_t combined = 0;
    for (auto m : masks) {
        combined |= m;
    }
    auto off = subset_offsets(masks);
    auto bases = base_indices(dim, combined);
    double keep = 1.0 - p;
    double mix = p / static_cast<double>(off.size());
    for (auto jb : bases) {
        for (auto ib : bases) {
            Complex rest = traced_entry(rho, ib, jb, off);
            for (std::size_t s = 0; s < off.size(); s++) {
                for (std::size_t t = 0; t < off.size(); t++) {
                    Complex &e = rho(ib | off[s], jb | off[t]);
                    e *= keep;
                    if (s == t) {
                        e += mix * rest;
                    }
                }
            }
        }
    }
}

/// Traces out the qubits with `masks` and re-prepares them in `sigma`
/// (a 2^k x 2^k density matrix in local order).
inline void replace_subsystem(DensityMatrix &rho, std::span<const std::size_t> masks, const DensityMatrix &sigma) {
    auto dim = static_cast<std::size_t>(rho.rows());
    std::size_t combined = 0;
    for (auto m : masks) {
        combined |= m;
    }
    auto off = subset_offsets(masks);
    auto bases = base_indices(dim, combined);
    for (auto jb : bases) {
        for (auto ib : bases) {
            Complex rest = traced_entry(rho, ib, jb, off);
            for (std::size_t s = 0; s < off.size(); s++) {
                for (std::size_t t = 0; t < off.size(); t++) {
                    rho(ib | off[s], jb | off[t]) =
                        mul(rest, sigma(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)));
                }
            }
        }
    }
}

/// Probability that the qubit with mask m reads 1.
inline double prob_one(const DensityMatrix &rho, std::size_t m) {
    double p = 0.0;
    for (Eigen::Index i = 0; i < rho.rows(); i++) {
        if (static_cast<std::size_t>(i) & m) {
            p += rho(i, i).real();
        }
    }
    return p;
}

/// Unnormalized P_b rho P_b for the qubit with mask m.
inline void project(DensityMatrix &rho, std::size_t m, int outcome) {
    auto dim = static_cast<std::size_t>(rho.rows());
    std::size_t want = outcome ? m : 0;
    for (std::size_t j = 0; j < dim; j++) {
        for (std::size_t i = 0; i < dim; i++) {
            if ((i & m) != want || (j & m) != want) {
                rho(i, j) = 0.0;
            }
        }
    }
}

inline void apply_unitary(DensityMatrix &rho, const GlobalQuantumState &shape, const Gate &gate) {
    switch (gate.kind) {
        case GateKind::H: {
            const double r = 1.0 / std::sqrt(2.0);
            apply_1q(rho, shape.mask(gate.operands[0]), Mat2{{{r, r}, {r, -r}}});
            return;
        }
        case GateKind::X: {
            auto m = shape.mask(gate.operands[0]);
            apply_involution(rho, [m](std::size_t i) { return i ^ m; });
            return;
        }
        case GateKind::Z: {
            auto m = shape.mask(gate.operands[0]);
            apply_sign_diagonal(rho, [m](std::size_t i) { return (i & m) != 0; });
            return;
        }
        case GateKind::CZ: {
            auto m = shape.mask(gate.operands[0]) | shape.mask(gate.operands[1]);
            apply_sign_diagonal(rho, [m](std::size_t i) { return (i & m) == m; });
            return;
        }
        case GateKind::CNOT: {
            auto mc = shape.mask(gate.operands[0]);
            auto mt = shape.mask(gate.operands[1]);
            apply_involution(rho, [mc, mt](std::size_t i) { return (i & mc) ? i ^ mt : i; });
            return;
        }
        default:
            throw SimulationError(std::string("gate '") + std::string(gate_name(gate.kind)) + "' is not unitary");
    }
}

}  // namespace detail

/// Ideal unitary followed by depolarizing noise of strength 1 - fidelity on
/// the operand qubits.
inline void apply_gate(GlobalQuantumState &state, const Gate &gate, double fidelity = 1.0) {
    if (!is_unitary(gate.kind)) {
        throw SimulationError(std::string("gate '") + std::string(gate_name(gate.kind)) + "' is not unitary");
    }
    if (auto e = gate.shape_error()) {
        throw SimulationError(*e);
    }
    if (!(fidelity > 0.0 && fidelity <= 1.0)) {
        throw SimulationError("gate fidelity must be in (0, 1], got " + std::to_string(fidelity));
    }
    detail::apply_unitary(state.mutable_rho(), state, gate);
    if (fidelity < 1.0) {
        std::vector<std::size_t> masks;
        for (auto q : gate.operands) {
            masks.push_back(state.mask(q));
        }
        detail::depolarize(state.mutable_rho(), masks, 1.0 - fidelity);
    }
}

struct MeasureResult {
    int reported;   ///< bit handed to the classical side (possibly flipped)
    int collapsed;  ///< basis state the qubit was projected onto
};

/// Samples a computational-basis measurement and collapses the state. With
/// probability `error` the reported bit is flipped; the state is not.
inline MeasureResult measure(GlobalQuantumState &state, std::size_t qubit, double error, Rng &rng) {
    if (!(error >= 0.0 && error < 1.0)) {
        throw SimulationError("measurement error must be in [0, 1), got " + std::to_string(error));
    }
    auto m = state.mask(qubit);
    double p1 = detail::prob_one(state.rho(), m);
    if (p1 < -1e-9 || p1 > 1.0 + 1e-9) {
        throw SimulationError("marginal probability " + std::to_string(p1) + " outside [0, 1]");
    }
    p1 = std::clamp(p1, 0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    int outcome = uniform(rng) < p1 ? 1 : 0;
    double p = outcome ? p1 : 1.0 - p1;
    detail::project(state.mutable_rho(), m, outcome);
    state.mutable_rho() /= p;
    int reported = outcome;
    if (error > 0.0 && uniform(rng) < error) {
        reported ^= 1;
    }
    return {reported, outcome};
}

/// Deterministic measure-and-correct channel:
///   rho <- sum_m sum_r P(r|m) C_r(P_m rho P_m)
/// where P(r|m) is the readout confusion for `readout_error` and C_r applies
/// `corrections[r]` (each with `correction_fidelity`).
inline void apply_measure_channel(GlobalQuantumState &state, std::size_t qubit,
                                  const std::array<std::vector<Gate>, 2> &corrections, double readout_error = 0.0,
                                  double correction_fidelity = 1.0) {
    if (!(readout_error >= 0.0 && readout_error < 1.0)) {
        throw SimulationError("measurement error must be in [0, 1), got " + std::to_string(readout_error));
    }
    auto m = state.mask(qubit);
    std::array<DensityMatrix, 2> branch{state.rho(), state.rho()};
    detail::project(branch[0], m, 0);
    detail::project(branch[1], m, 1);
    DensityMatrix out = DensityMatrix::Zero(state.rho().rows(), state.rho().cols());
    for (int r = 0; r < 2; r++) {
        double keep = 1.0 - readout_error;
        GlobalQuantumState part(state.num_qubits());
        part.mutable_rho() = keep * branch[r] + readout_error * branch[1 - r];
        for (const auto &g : corrections[r]) {
            apply_gate(part, g, correction_fidelity);
        }
        out += part.rho();
    }
    state.mutable_rho() = std::move(out);
}

/// Traces the qubit out and re-prepares it in |0>.
inline void reset(GlobalQuantumState &state, std::size_t qubit) {
    std::array<std::size_t, 1> masks{state.mask(qubit)};
    DensityMatrix zero = DensityMatrix::Zero(2, 2);
    zero(0, 0) = 1.0;
    detail::replace_subsystem(state.mutable_rho(), masks, zero);
}

/// F |Phi+><Phi+| + (1 - F)/3 (|Phi-><Phi-| + |Psi+><Psi+| + |Psi-><Psi-|).
inline DensityMatrix werner_state(double fidelity) {
    double w = (4.0 * fidelity - 1.0) / 3.0;
    DensityMatrix rho = DensityMatrix::Identity(4, 4) * ((1.0 - w) / 4.0);
    rho(0, 0) += w / 2.0;
    rho(0, 3) += w / 2.0;
    rho(3, 0) += w / 2.0;
    rho(3, 3) += w / 2.0;
    return rho;
}

/// Places a Werner pair of the given fidelity on two fresh (|00>) qubits.
inline void inject_epr(GlobalQuantumState &state, std::size_t qubit_a, std::size_t qubit_b, double link_fidelity) {
    if (!(link_fidelity > 0.25 && link_fidelity <= 1.0)) {
        throw SimulationError("link fidelity must be in (1/4, 1], got " + std::to_string(link_fidelity));
    }
    if (qubit_a == qubit_b) {
        throw SimulationError("EPR pair needs two distinct qubits");
    }
    std::array<std::size_t, 2> masks{state.mask(qubit_a), state.mask(qubit_b)};
    double fresh = 0.0;
    for (Eigen::Index i = 0; i < state.rho().rows(); i++) {
        if ((static_cast<std::size_t>(i) & (masks[0] | masks[1])) == 0) {
            fresh += state.rho()(i, i).real();
        }
    }
    if (fresh < 1.0 - 1e-9) {
        throw SimulationError("EPR target qubits " + std::to_string(qubit_a) + "," + std::to_string(qubit_b) +
                              " are not in |00>");
    }
    detail::replace_subsystem(state.mutable_rho(), masks, werner_state(link_fidelity));
}

struct StateDiagnostics {
    double trace_error;
    double hermiticity_error;
    double min_eigenvalue;

    bool ok(double trace_tol = 1e-8, double herm_tol = 1e-8, double eig_tol = 1e-7) const {
        return trace_error <= trace_tol && hermiticity_error <= herm_tol && min_eigenvalue >= -eig_tol;
    }
};

inline StateDiagnostics diagnose(const GlobalQuantumState &state) {
    const auto &rho = state.rho();
    StateDiagnostics d{};
    d.trace_error = std::abs(rho.trace() - Complex(1.0));
    d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    DensityMatrix herm = (rho + rho.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<DensityMatrix> solver(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

/// Row-major text dump, one row per line, entries as "re,im".
inline void dump_state(std::ostream &out, const GlobalQuantumState &state) {
    auto old = out.precision(17);
    for (Eigen::Index i = 0; i < state.rho().rows(); i++) {
        for (Eigen::Index j = 0; j < state.rho().cols(); j++) {
            if (j) {
                out << ' ';
            }
            out << state.rho()(i, j).real() << ',' << state.rho()(i, j).imag();
        }
        out << '\n';
    }
    out.precision(old);
}

}  // namespace dqcsim
