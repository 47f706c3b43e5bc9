// Copyright 2026 The qnet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNET_TABLEAU_HPP
#define QNET_TABLEAU_HPP

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qnet/engine.hpp"
#include "qnet/pauli.hpp"

namespace qnet {

/// Stabilizer tableau with destabilizers and sign bits.
///
/// Layout: rows [0, n) are destabilizers, rows [n, 2n) stabilizers. Each row
/// is a Hermitian PauliString (phase 0 or 2). Gate updates follow the
/// standard conjugation rules; Z measurement uses the destabilizer rows to
/// find deterministic outcomes without elimination.
class Tableau {
   public:
    Tableau() = default;
    /// |0...0> on n qubits.
    explicit Tableau(std::size_t n);
    /// Builds a tableau from n commuting, independent Hermitian generators.
    /// Throws "rank-mismatch" when the count differs from the length and
    /// "invalid-stabilizer-group" when the set is not a valid group basis.
    static Tableau from_stabilizers(const std::vector<PauliString> &gens);
    static Tableau direct_sum(const Tableau &a, const Tableau &b);

    std::size_t num_qubits() const {
        return n_;
    }
    const PauliString &destabilizer(std::size_t i) const {
        return rows_[i];
    }
    const PauliString &stabilizer(std::size_t i) const {
        return rows_[n_ + i];
    }
    std::vector<PauliString> stabilizers() const;

    void h(std::size_t q);
    void s(std::size_t q);
    void sdag(std::size_t q);
    void x(std::size_t q);
    void y(std::size_t q);
    void z(std::size_t q);
    void cnot(std::size_t c, std::size_t t);
    void cz(std::size_t a, std::size_t b);
    /// Conjugates by a full-width Pauli operator (sign flips only).
    void apply_pauli(const PauliString &p);

    /// Z-basis measurement returning a bit (0 for +1). `forced` selects an
    /// outcome: for random outcomes it is taken as-is, for deterministic ones
    /// a mismatch raises "impossible-outcome".
    struct Outcome {
        int bit;
        bool deterministic;
    };
    Outcome measure_z(std::size_t q, Rng &rng, std::optional<int> forced = std::nullopt);
    Outcome measure(std::size_t q, Axis axis, Rng &rng, std::optional<int> forced = std::nullopt);
    /// +1 / -1 if +-P is in the stabilizer group, 0 otherwise.
    int expectation(const PauliString &p) const;

    /// Discards qubit q. If the qubit is an eigenstate of a single-qubit
    /// Pauli it is dropped exactly; otherwise it is first Z-measured (one
    /// trajectory). Returns true in the latter case.
    bool remove_qubit(std::size_t q, Rng &rng);

    /// Stabilizer generators in reduced row echelon form (X columns first,
    /// then Z columns). Equal groups give equal lists.
    std::vector<PauliString> canonical_stabilizers() const;
    bool same_state(const Tableau &other) const {
        return canonical_stabilizers() == other.canonical_stabilizers();
    }

    /// Density matrix prod (I + g)/2, qubit 0 most significant. Small n only.
    Eigen::MatrixXcd density() const;

    /// True when the destabilizer/stabilizer rows form a symplectic basis.
    bool is_consistent() const;

   private:
    void rowmul(std::size_t h, std::size_t i);

    std::size_t n_ = 0;
    std::vector<PauliString> rows_;
};

}  // namespace qnet

#endif
