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

#ifndef QNET_SYMBOLIC_HPP
#define QNET_SYMBOLIC_HPP

#include <array>
#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qnet/engine.hpp"
#include "qnet/pauli.hpp"
#include "qnet/tableau.hpp"

namespace qnet {

using Complex = std::complex<double>;

/// Backend-agnostic state expression.
///
/// Pure nodes: basis kets, stabilizer states, tensor products and linear
/// combinations of pure nodes. Mixed nodes: projectors, maximally mixed
/// states, tensor products involving a mixed node and real combinations of
/// mixed nodes. Only scalar folding and flattening happen at construction;
/// everything else is evaluated when expressed on a backend.
class SymState {
   public:
    enum class Kind { basis, stabilizer, mixed, projector, tensor, sum };

    /// Eigenstate `index` (1 or 2) of a Pauli axis: X1=|+>, X2=|->, Z1=|0>, Z2=|1>.
    static SymState basis(Axis axis, int index);
    static SymState stabilizer(std::vector<PauliString> generators);
    /// Maximally mixed state I/d on subsystems with the given dimensions.
    static SymState mixed(std::vector<int> dims);
    static SymState mixed_qubits(std::size_t n) {
        return mixed(std::vector<int>(n, 2));
    }
    /// Outer product |psi><psi| of a pure expression.
    static SymState projector(const SymState &pure);

    friend SymState tensor(const SymState &a, const SymState &b);
    friend SymState operator+(const SymState &a, const SymState &b);
    friend SymState operator*(Complex c, const SymState &s);
    friend SymState operator*(double c, const SymState &s) {
        return Complex(c, 0) * s;
    }
    friend SymState operator/(const SymState &s, double c) {
        return Complex(1.0 / c, 0) * s;
    }

    Kind kind() const;
    bool is_pure() const;
    std::size_t num_subsystems() const {
        return dims().size();
    }
    std::vector<int> dims() const;
    std::string str() const;

    /// Normalized state vector (pure expressions only).
    Eigen::VectorXcd ket() const;
    /// Unit-trace density matrix.
    Eigen::MatrixXcd density() const;

    /// For stabilizer nodes: the generators. Empty otherwise.
    const std::vector<PauliString> &generators() const;

    struct Node;
    explicit SymState(std::shared_ptr<const Node> n) : node_(std::move(n)) {
    }
    const Node &node() const {
        return *node_;
    }

   private:
    std::shared_ptr<const Node> node_;
};

SymState tensor(const SymState &a, const SymState &b);
SymState tensor(const std::vector<SymState> &parts);

/// Parses "ZZ XX" style generator strings (optional +/- per word).
/// Errors: "rank-mismatch" when the word count differs from the word
/// length, "invalid-stabilizer-group" for anticommuting or dependent words.
SymState parse_stabilizer(std::string_view text);
/// Renders stabilizer generators back into the textual form.
std::string render_stabilizer(const SymState &s);

/// F |Phi+><Phi+| + (1-F) I/4. Bell fidelity is F + (1-F)/4.
SymState depolarized_pair(double f);
/// (Z1 Z1 + Z2 Z2) / sqrt(2).
SymState perfect_pair();
/// Stand-in for a physical source model: an emitted pair is ideal with
/// probability `efficiency` and fully mixed otherwise, i.e.
/// depolarized_pair(efficiency). This is not a physical source model.
SymState noisy_pair_surrogate(double efficiency);

enum class Gate { I, X, Y, Z, H, S, Sdag, T, CNOT, CZ };

std::string gate_name(Gate g);
std::size_t gate_arity(Gate g);

/// Backend-agnostic operator: named gates, products and tensor products.
class SymOperator {
   public:
    explicit SymOperator(Gate g);
    /// `a * b` applies b first.
    friend SymOperator operator*(const SymOperator &a, const SymOperator &b);
    friend SymOperator tensor(const SymOperator &a, const SymOperator &b);

    std::size_t arity() const;
    std::string str() const;
    /// Dense unitary, first target most significant.
    Eigen::MatrixXcd matrix() const;

    struct Step {
        Gate gate;
        std::array<std::size_t, 2> targets;
    };
    /// Clifford gate list in application order. Throws
    /// "unsupported-on-backend" for non-Clifford gates.
    std::vector<Step> clifford_steps() const;

    struct Node;
    const Node &node() const {
        return *node_;
    }

   private:
    explicit SymOperator(std::shared_ptr<const Node> n) : node_(std::move(n)) {
    }
    std::shared_ptr<const Node> node_;
};

namespace ops {
inline SymOperator X() {
    return SymOperator(Gate::X);
}
inline SymOperator Y() {
    return SymOperator(Gate::Y);
}
inline SymOperator Z() {
    return SymOperator(Gate::Z);
}
inline SymOperator H() {
    return SymOperator(Gate::H);
}
inline SymOperator S() {
    return SymOperator(Gate::S);
}
inline SymOperator Sdag() {
    return SymOperator(Gate::Sdag);
}
inline SymOperator T() {
    return SymOperator(Gate::T);
}
inline SymOperator CNOT() {
    return SymOperator(Gate::CNOT);
}
inline SymOperator CZ() {
    return SymOperator(Gate::CZ);
}
}  // namespace ops

/// Noisy channel description.
class SymChannel {
   public:
    enum class Kind { depolarize, dephase, amplitude_damp, pauli_mixture };

    /// rho -> (1-p) rho + p I/d on `arity` qubits.
    static SymChannel depolarize(double p, std::size_t arity = 1);
    /// rho -> (1-p) rho + p Z rho Z.
    static SymChannel dephase(double p);
    static SymChannel amplitude_damp(double gamma);
    static SymChannel pauli_mixture(std::vector<std::pair<PauliString, double>> terms);

    Kind kind() const {
        return kind_;
    }
    double parameter() const {
        return param_;
    }
    std::size_t arity() const {
        return arity_;
    }
    std::string str() const;

    /// Kraus operators for subsystem dimension `dim` (qudits only for depolarize).
    std::vector<Eigen::MatrixXcd> kraus(int dim = 2) const;

    struct PauliForm {
        std::vector<std::pair<PauliString, double>> terms;
        /// True when the channel was Pauli-twirled (not exactly a Pauli channel).
        bool approximate = false;
    };
    PauliForm pauli_form() const;
    /// True for a channel that acts as the identity (all weight on I).
    bool is_identity() const;

   private:
    SymChannel() = default;
    Kind kind_ = Kind::depolarize;
    double param_ = 0;
    std::size_t arity_ = 1;
    std::vector<std::pair<PauliString, double>> terms_;
};

/// A stabilizer-backend preparation: a base stabilizer state followed by
/// one Pauli drawn from a mixture, once per trajectory.
struct StabilizerPrep {
    Tableau base;
    std::vector<std::pair<double, PauliString>> mixture;

    Tableau sample(Rng &rng) const;
};

/// Translation onto the stabilizer backend. Throws "unsupported-on-backend"
/// naming the offending node when the expression is not a stabilizer state
/// or a Pauli mixture over one.
StabilizerPrep express_stabilizer(const SymState &s);

}  // namespace qnet

#endif
