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

#include "qknow/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qknow/error.hpp"

namespace qknow::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double squared_norm(const std::vector<Complex> &v) {
    double total = 0.0;
    for (const auto &a : v) total += std::norm(a);
    return total;
}

void check_unique(const std::vector<QubitId> &qubits) {
    auto sorted = qubits;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw QuantumError("duplicate qubit id in register");
    }
}

// Reorders amplitudes indexed by `order` (first = MSB) into sorted-id order.
std::vector<Complex> permute_to_sorted(const std::vector<QubitId> &order, const std::vector<Complex> &amps,
                                       std::vector<QubitId> &sorted_out) {
    const std::size_t n = order.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::sort(perm.begin(), perm.end(), [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
    sorted_out.resize(n);
    for (std::size_t i = 0; i < n; ++i) sorted_out[i] = order[perm[i]];
    if (std::is_sorted(order.begin(), order.end())) return amps;

    std::vector<Complex> out(amps.size());
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        std::size_t target = 0;
        for (std::size_t i = 0; i < n; ++i) {
            // bit of original position perm[i] moves to sorted position i
            std::size_t bit = (idx >> (n - 1 - perm[i])) & 1U;
            target |= bit << (n - 1 - i);
        }
        out[target] = amps[idx];
    }
    return out;
}

std::size_t extract_bits(std::size_t index, const std::vector<std::size_t> &masks) {
    std::size_t out = 0;
    for (std::size_t m : masks) out = (out << 1) | ((index & m) ? 1U : 0U);
    return out;
}

}  // namespace

// Internal constructor helper for functions that already hold a normalized,
// sorted representation.
struct StateAccess {
    static StateVector build(std::vector<QubitId> qubits, std::vector<Complex> amps) {
        StateVector s;
        s.qubits_ = std::move(qubits);
        s.amplitudes_ = std::move(amps);
        return s;
    }
};

std::string to_string(QubitId q) { return fmt::format("q{}", q.value); }

std::string_view gate_name(Gate g) {
    switch (g) {
        case Gate::X: return "X";
        case Gate::Z: return "Z";
        case Gate::H: return "H";
        case Gate::CZ: return "CZ";
        case Gate::CNOT: return "CNOT";
    }
    return "?";
}

std::size_t gate_arity(Gate g) { return (g == Gate::CZ || g == Gate::CNOT) ? 2 : 1; }

std::optional<Gate> gate_from_name(std::string_view name) {
    for (Gate g : {Gate::X, Gate::Z, Gate::H, Gate::CZ, Gate::CNOT}) {
        if (gate_name(g) == name) return g;
    }
    return std::nullopt;
}

StateVector::StateVector() : amplitudes_{Complex{1.0, 0.0}} {}

bool StateVector::contains(QubitId q) const { return std::binary_search(qubits_.begin(), qubits_.end(), q); }

std::size_t StateVector::position(QubitId q) const {
    auto it = std::lower_bound(qubits_.begin(), qubits_.end(), q);
    if (it == qubits_.end() || *it != q) {
        throw QuantumError(fmt::format("unknown qubit {}", to_string(q)));
    }
    return static_cast<std::size_t>(it - qubits_.begin());
}

std::size_t StateVector::mask(QubitId q) const {
    return std::size_t{1} << (qubits_.size() - 1 - position(q));
}

double StateVector::norm() const { return std::sqrt(squared_norm(amplitudes_)); }

std::string StateVector::summary(int precision) const {
    std::string out;
    const double cutoff = std::pow(10.0, -precision) / 2;
    for (std::size_t idx = 0; idx < amplitudes_.size(); ++idx) {
        const Complex a = amplitudes_[idx];
        if (std::abs(a) < cutoff) continue;
        std::string coeff;
        if (std::abs(a.imag()) < cutoff) {
            coeff = fmt::format("{:.{}f}", a.real(), precision);
        } else if (std::abs(a.real()) < cutoff) {
            coeff = fmt::format("{:.{}f}i", a.imag(), precision);
        } else {
            coeff = fmt::format("({:.{}f}{:+.{}f}i)", a.real(), precision, a.imag(), precision);
        }
        std::string ket;
        for (std::size_t i = 0; i < qubits_.size(); ++i) {
            ket += ((idx >> (qubits_.size() - 1 - i)) & 1U) ? '1' : '0';
        }
        if (!out.empty()) {
            if (coeff.front() == '-') {
                out += " - ";
                coeff.erase(0, 1);
            } else {
                out += " + ";
            }
        }
        out += fmt::format("{}|{}>", coeff, ket);
    }
    return out.empty() ? "0" : out;
}

Complex DensityMatrix::trace() const {
    Complex t{};
    for (std::size_t i = 0; i < dim; ++i) t += at(i, i);
    return t;
}

StateVector make_state(std::vector<QubitId> qubits, std::vector<Complex> amplitudes) {
    check_unique(qubits);
    if (qubits.size() >= 8 * sizeof(std::size_t) - 1 || amplitudes.size() != (std::size_t{1} << qubits.size())) {
        throw QuantumError(fmt::format("amplitude vector has length {}, expected 2^{}", amplitudes.size(),
                                       qubits.size()));
    }
    const double n2 = squared_norm(amplitudes);
    if (n2 == 0.0) throw QuantumError("zero vector is not a quantum state");
    const double n = std::sqrt(n2);
    if (std::abs(n - 1.0) > kInputNormSlack) {
        throw QuantumError(fmt::format("state is not normalized (norm {})", n));
    }
    for (auto &a : amplitudes) a /= n;
    std::vector<QubitId> sorted;
    auto amps = permute_to_sorted(qubits, amplitudes, sorted);
    return StateAccess::build(std::move(sorted), std::move(amps));
}

StateVector basis_state(std::vector<QubitId> qubits, std::size_t index) {
    std::vector<Complex> amps(std::size_t{1} << qubits.size());
    if (index >= amps.size()) throw QuantumError("basis index out of range");
    amps[index] = 1.0;
    return make_state(std::move(qubits), std::move(amps));
}

StateVector ebit(QubitId a, QubitId b) {
    return make_state({a, b}, {kInvSqrt2, 0.0, 0.0, kInvSqrt2});
}

StateVector tensor(const StateVector &a, const StateVector &b) {
    for (QubitId q : b.qubits()) {
        if (a.contains(q)) throw QuantumError(fmt::format("tensor: qubit {} appears in both factors", to_string(q)));
    }
    std::vector<QubitId> order = a.qubits();
    order.insert(order.end(), b.qubits().begin(), b.qubits().end());
    std::vector<Complex> amps;
    amps.reserve(a.dimension() * b.dimension());
    for (const auto &x : a.amplitudes()) {
        for (const auto &y : b.amplitudes()) amps.push_back(x * y);
    }
    std::vector<QubitId> sorted;
    auto permuted = permute_to_sorted(order, amps, sorted);
    return StateAccess::build(std::move(sorted), std::move(permuted));
}

StateVector apply_gate(const StateVector &s, Gate gate, std::span<const QubitId> targets) {
    if (targets.size() != gate_arity(gate)) {
        throw QuantumError(fmt::format("gate {} takes {} qubit(s), got {}", gate_name(gate), gate_arity(gate),
                                       targets.size()));
    }
    if (targets.size() == 2 && targets[0] == targets[1]) {
        throw QuantumError(fmt::format("gate {} needs two distinct qubits", gate_name(gate)));
    }
    std::vector<Complex> amps = s.amplitudes();
    const std::size_t m0 = s.mask(targets[0]);
    switch (gate) {
        case Gate::X:
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if (!(i & m0)) std::swap(amps[i], amps[i | m0]);
            }
            break;
        case Gate::Z:
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if (i & m0) amps[i] = -amps[i];
            }
            break;
        case Gate::H:
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if (i & m0) continue;
                const Complex a = amps[i];
                const Complex b = amps[i | m0];
                amps[i] = kInvSqrt2 * (a + b);
                amps[i | m0] = kInvSqrt2 * (a - b);
            }
            break;
        case Gate::CZ: {
            const std::size_t m1 = s.mask(targets[1]);
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if ((i & m0) && (i & m1)) amps[i] = -amps[i];
            }
            break;
        }
        case Gate::CNOT: {
            const std::size_t m1 = s.mask(targets[1]);  // control m0, target m1
            for (std::size_t i = 0; i < amps.size(); ++i) {
                if ((i & m0) && !(i & m1)) std::swap(amps[i], amps[i | m1]);
            }
            break;
        }
    }
    return StateAccess::build(s.qubits(), std::move(amps));
}

std::vector<MeasurementBranch> measure_computational(const StateVector &s, QubitId q) {
    const std::size_t m = s.mask(q);
    std::vector<MeasurementBranch> branches;
    for (int bit : {0, 1}) {
        std::vector<Complex> amps(s.dimension());
        double p = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (((i & m) != 0) == (bit == 1)) {
                amps[i] = s.amplitudes()[i];
                p += std::norm(amps[i]);
            }
        }
        if (p <= kPruneThreshold) continue;
        const double scale = 1.0 / std::sqrt(p);
        for (auto &a : amps) a *= scale;
        branches.push_back({{bit}, p, StateAccess::build(s.qubits(), std::move(amps))});
    }
    return branches;
}

std::vector<MeasurementBranch> measure_bell(const StateVector &s, QubitId qa, QubitId qb) {
    if (qa == qb) throw QuantumError("Bell measurement needs two distinct qubits");
    const std::size_t ma = s.mask(qa);
    const std::size_t mb = s.mask(qb);

    // Coefficients on |ab> for a = bit of qa, b = bit of qb, in order 00,01,10,11.
    struct BellState {
        int s1, s2;
        double c[4];
    };
    static constexpr BellState kBasis[] = {
        {0, 0, {kInvSqrt2, 0, 0, kInvSqrt2}},   // Phi+
        {0, 1, {0, kInvSqrt2, kInvSqrt2, 0}},   // Psi+
        {1, 0, {kInvSqrt2, 0, 0, -kInvSqrt2}},  // Phi-
        {1, 1, {0, kInvSqrt2, -kInvSqrt2, 0}},  // Psi-
    };
    const std::size_t offsets[4] = {0, mb, ma, ma | mb};

    std::vector<MeasurementBranch> branches;
    for (const auto &bell : kBasis) {
        std::vector<Complex> amps(s.dimension());
        double p = 0.0;
        for (std::size_t base = 0; base < amps.size(); ++base) {
            if (base & (ma | mb)) continue;
            Complex overlap{};
            for (int k = 0; k < 4; ++k) overlap += bell.c[k] * s.amplitudes()[base | offsets[k]];
            p += std::norm(overlap);
            for (int k = 0; k < 4; ++k) amps[base | offsets[k]] = bell.c[k] * overlap;
        }
        if (p <= kPruneThreshold) continue;
        const double scale = 1.0 / std::sqrt(p);
        for (auto &a : amps) a *= scale;
        branches.push_back({{bell.s1, bell.s2}, p, StateAccess::build(s.qubits(), std::move(amps))});
    }
    return branches;
}

DensityMatrix reduced_density(const StateVector &s, std::span<const QubitId> keep) {
    std::vector<QubitId> kept(keep.begin(), keep.end());
    check_unique(kept);
    std::vector<std::size_t> keep_masks;
    std::size_t keep_all = 0;
    for (QubitId q : kept) {
        keep_masks.push_back(s.mask(q));
        keep_all |= keep_masks.back();
    }
    std::vector<std::size_t> rest_masks;
    for (QubitId q : s.qubits()) {
        if (!(s.mask(q) & keep_all)) rest_masks.push_back(s.mask(q));
    }

    const std::size_t dim = std::size_t{1} << kept.size();
    const std::size_t rest_dim = std::size_t{1} << rest_masks.size();
    std::vector<Complex> table(rest_dim * dim);
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        table[extract_bits(i, rest_masks) * dim + extract_bits(i, keep_masks)] = s.amplitudes()[i];
    }

    DensityMatrix rho{kept, dim, std::vector<Complex>(dim * dim)};
    for (std::size_t r = 0; r < rest_dim; ++r) {
        const Complex *v = &table[r * dim];
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) rho.entries[i * dim + j] += v[i] * std::conj(v[j]);
        }
    }
    return rho;
}

DensityMatrix reduced_density(const StateVector &s, std::initializer_list<QubitId> keep) {
    return reduced_density(s, std::span<const QubitId>(keep.begin(), keep.size()));
}

DensityMatrix pure_density(const StateVector &s) { return reduced_density(s, s.qubits()); }

bool dm_equal(const DensityMatrix &a, const DensityMatrix &b, double tol) {
    if (a.dim != b.dim) {
        throw QuantumError(fmt::format("density matrices differ in dimension ({} vs {})", a.dim, b.dim));
    }
    for (std::size_t i = 0; i < a.entries.size(); ++i) {
        if (std::abs(a.entries[i] - b.entries[i]) > tol) return false;
    }
    return true;
}

bool amplitudes_close(const StateVector &a, const StateVector &b, double tol) {
    if (a.qubits() != b.qubits()) return false;
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        if (std::abs(a.amplitudes()[i] - b.amplitudes()[i]) > tol) return false;
    }
    return true;
}

const std::vector<std::string> &named_sample_aliases() {
    static const std::vector<std::string> aliases = {"0", "1", "plus", "minus", "plusi", "minusi"};
    return aliases;
}

std::optional<std::vector<Complex>> named_sample(std::string_view alias) {
    const Complex r{kInvSqrt2, 0.0};
    const Complex i{0.0, kInvSqrt2};
    if (alias == "0") return std::vector<Complex>{1.0, 0.0};
    if (alias == "1") return std::vector<Complex>{0.0, 1.0};
    if (alias == "plus") return std::vector<Complex>{r, r};
    if (alias == "minus") return std::vector<Complex>{r, -r};
    if (alias == "plusi") return std::vector<Complex>{r, i};
    if (alias == "minusi") return std::vector<Complex>{r, -i};
    return std::nullopt;
}

}  // namespace qknow::qsim
