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

#ifndef QNET_BACKEND_HPP
#define QNET_BACKEND_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qnet/dense.hpp"
#include "qnet/symbolic.hpp"
#include "qnet/tableau.hpp"

namespace qnet {

enum class BackendId { stabilizer, dense };

std::string backend_name(BackendId id);
/// "stabilizer" or "dense"; anything else raises "unknown-backend".
BackendId parse_backend(const std::string &name);

/// Numerical state of one group of subsystems on some backend.
class BackendState {
   public:
    virtual ~BackendState() = default;

    virtual BackendId backend() const = 0;
    virtual std::size_t size() const = 0;
    virtual std::vector<int> dims() const = 0;
    virtual std::unique_ptr<BackendState> clone() const = 0;

    virtual void apply_unitary(const SymOperator &op, const std::vector<std::size_t> &targets) = 0;
    /// Returns true when the channel had to be approximated (Pauli twirl).
    virtual bool apply_channel(const SymChannel &ch, const std::vector<std::size_t> &targets, Rng &rng) = 0;

    struct Measurement {
        /// 1 for the +1 eigenvalue, 2 for -1.
        int outcome;
        double probability;
    };
    virtual Measurement measure(std::size_t target, Axis axis, Rng &rng, std::optional<int> forced = std::nullopt) = 0;
    /// Removes one subsystem. Returns true when the removal sampled a
    /// trajectory (stabilizer backend) rather than tracing out exactly.
    virtual bool discard(std::size_t target, Rng &rng) = 0;

    /// Dense density matrix of the state (tableau: lift of the current trajectory).
    virtual Eigen::MatrixXcd density() const = 0;
    /// Expectation of a Pauli word with one letter (I, X, Y, Z) per subsystem.
    virtual double expectation(const std::string &letters) const = 0;
    virtual std::size_t memory_bytes() const = 0;
    /// Largest matrix dimension held (dense: product of dims).
    virtual std::size_t dimension() const = 0;
};

class DenseBackendState : public BackendState {
   public:
    explicit DenseBackendState(DenseState s) : state_(std::move(s)) {
    }
    BackendId backend() const override {
        return BackendId::dense;
    }
    std::size_t size() const override {
        return state_.size();
    }
    std::vector<int> dims() const override {
        return state_.dims();
    }
    std::unique_ptr<BackendState> clone() const override {
        return std::make_unique<DenseBackendState>(state_);
    }
    void apply_unitary(const SymOperator &op, const std::vector<std::size_t> &targets) override;
    bool apply_channel(const SymChannel &ch, const std::vector<std::size_t> &targets, Rng &rng) override;
    Measurement measure(std::size_t target, Axis axis, Rng &rng, std::optional<int> forced) override;
    bool discard(std::size_t target, Rng &rng) override;
    Eigen::MatrixXcd density() const override {
        return state_.density();
    }
    double expectation(const std::string &letters) const override;
    std::size_t memory_bytes() const override {
        return state_.memory_bytes();
    }
    std::size_t dimension() const override {
        return state_.dimension();
    }
    const DenseState &state() const {
        return state_;
    }

   private:
    DenseState state_;
};

class TableauBackendState : public BackendState {
   public:
    explicit TableauBackendState(Tableau t) : tab_(std::move(t)) {
    }
    BackendId backend() const override {
        return BackendId::stabilizer;
    }
    std::size_t size() const override {
        return tab_.num_qubits();
    }
    std::vector<int> dims() const override {
        return std::vector<int>(tab_.num_qubits(), 2);
    }
    std::unique_ptr<BackendState> clone() const override {
        return std::make_unique<TableauBackendState>(tab_);
    }
    void apply_unitary(const SymOperator &op, const std::vector<std::size_t> &targets) override;
    bool apply_channel(const SymChannel &ch, const std::vector<std::size_t> &targets, Rng &rng) override;
    Measurement measure(std::size_t target, Axis axis, Rng &rng, std::optional<int> forced) override;
    bool discard(std::size_t target, Rng &rng) override;
    Eigen::MatrixXcd density() const override;
    double expectation(const std::string &letters) const override {
        return tab_.expectation(PauliString::parse(letters));
    }
    std::size_t memory_bytes() const override;
    std::size_t dimension() const override {
        return std::size_t{2} * tab_.num_qubits();
    }
    const Tableau &tableau() const {
        return tab_;
    }

   private:
    Tableau tab_;
};

/// Tensor product with a's subsystems first. Throws "backend-mismatch".
std::unique_ptr<BackendState> compose(const BackendState &a, const BackendState &b);

/// Translates a symbolic state onto a backend. The stabilizer backend draws
/// one member of a Pauli mixture from `rng`.
std::unique_ptr<BackendState> express(const SymState &s, BackendId backend, Rng &rng);

/// Dense state for a symbolic expression.
DenseState express_dense(const SymState &s);

/// <psi| rho |psi> for a pure target. Throws "dim-mismatch".
double fidelity(const Eigen::MatrixXcd &rho, const SymState &target);

}  // namespace qnet

#endif
