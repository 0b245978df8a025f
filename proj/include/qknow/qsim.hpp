// Copyright 2026 The qknow Authors
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

#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qknow::qsim {

using Complex = std::complex<double>;

inline constexpr double kCompareTolerance = 1e-9;
inline constexpr double kPruneThreshold = 1e-12;
inline constexpr double kInputNormSlack = 1e-6;

/// Network-wide qubit name. Stable for the whole run, independent of which
/// agent currently owns the qubit.
struct QubitId {
    int value = 0;

    constexpr QubitId() = default;
    constexpr explicit QubitId(int v) : value(v) {}

    auto operator<=>(const QubitId &) const = default;
};

std::string to_string(QubitId q);

enum class Gate { X, Z, H, CZ, CNOT };

std::string_view gate_name(Gate g);
std::size_t gate_arity(Gate g);
std::optional<Gate> gate_from_name(std::string_view name);

/// Pure state over an ordered set of qubits. Qubits are kept sorted by id and
/// the first qubit is the most significant bit of the amplitude index.
/// Instances are always normalized.
class StateVector {
 public:
    /// The empty register (no qubits, amplitude 1).
    StateVector();

    const std::vector<QubitId> &qubits() const { return qubits_; }
    const std::vector<Complex> &amplitudes() const { return amplitudes_; }
    std::size_t num_qubits() const { return qubits_.size(); }
    std::size_t dimension() const { return amplitudes_.size(); }

    bool contains(QubitId q) const;
    /// Position of q in qubits(); throws QuantumError for an unknown qubit.
    std::size_t position(QubitId q) const;
    /// Bit mask selecting qubit q inside an amplitude index.
    std::size_t mask(QubitId q) const;

    double norm() const;

    /// Short human-readable ket expansion, e.g. "0.7071|00> + 0.7071|11>".
    std::string summary(int precision = 4) const;

 private:
    friend struct StateAccess;

    std::vector<QubitId> qubits_;
    std::vector<Complex> amplitudes_;
};

struct DensityMatrix {
    std::vector<QubitId> qubits;
    std::size_t dim = 1;
    std::vector<Complex> entries;  // row-major, dim x dim

    Complex at(std::size_t row, std::size_t col) const { return entries[row * dim + col]; }
    Complex trace() const;
};

struct MeasurementBranch {
    std::vector<int> outcome;
    double probability = 0.0;
    StateVector post_state;
};

/// Validates and normalizes. Qubits may be listed in any order; amplitudes are
/// indexed with the first listed qubit as the most significant bit and are
/// permuted into sorted-id order.
StateVector make_state(std::vector<QubitId> qubits, std::vector<Complex> amplitudes);

/// Computational basis state |bits> on the given qubits.
StateVector basis_state(std::vector<QubitId> qubits, std::size_t index);

/// (|00> + |11>)/sqrt(2) on (a, b).
StateVector ebit(QubitId a, QubitId b);

StateVector tensor(const StateVector &a, const StateVector &b);

StateVector apply_gate(const StateVector &s, Gate gate, std::span<const QubitId> targets);
inline StateVector apply_gate(const StateVector &s, Gate gate, std::initializer_list<QubitId> targets) {
    return apply_gate(s, gate, std::span<const QubitId>(targets.begin(), targets.size()));
}

std::vector<MeasurementBranch> measure_computational(const StateVector &s, QubitId q);

/// Bell-basis measurement of (qa, qb). Outcome bits (s1, s2): s1 is the phase
/// bit and s2 the bit-flip bit, i.e. Phi+ -> (0,0), Psi+ -> (0,1),
/// Phi- -> (1,0), Psi- -> (1,1).
std::vector<MeasurementBranch> measure_bell(const StateVector &s, QubitId qa, QubitId qb);

/// Partial trace keeping `keep`, in the listed order.
DensityMatrix reduced_density(const StateVector &s, std::span<const QubitId> keep);
DensityMatrix reduced_density(const StateVector &s, std::initializer_list<QubitId> keep);

DensityMatrix pure_density(const StateVector &s);

bool dm_equal(const DensityMatrix &a, const DensityMatrix &b, double tol = kCompareTolerance);

/// Entry-wise amplitude comparison (phase sensitive) on identical qubit lists.
bool amplitudes_close(const StateVector &a, const StateVector &b, double tol = kCompareTolerance);

/// Single-qubit sample states addressed by the aliases
/// 0, 1, plus, minus, plusi, minusi.
std::optional<std::vector<Complex>> named_sample(std::string_view alias);
const std::vector<std::string> &named_sample_aliases();

}  // namespace qknow::qsim
