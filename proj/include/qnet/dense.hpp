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

#ifndef QNET_DENSE_HPP
#define QNET_DENSE_HPP

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qnet/engine.hpp"
#include "qnet/pauli.hpp"

namespace qnet {

/// Exact finite-dimensional state over subsystems with arbitrary dimensions.
///
/// Subsystem 0 is the most significant index. The state is held as a unit
/// vector while it is known to be pure and as a density matrix after the
/// first non-unitary channel or entangled partial trace; both forms give
/// identical results.
class DenseState {
   public:
    DenseState() = default;
    static DenseState from_ket(std::vector<int> dims, Eigen::VectorXcd psi);
    static DenseState from_density(std::vector<int> dims, Eigen::MatrixXcd rho);
    /// a (x) b with a's subsystems first.
    static DenseState compose(const DenseState &a, const DenseState &b);

    const std::vector<int> &dims() const {
        return dims_;
    }
    std::size_t size() const {
        return dims_.size();
    }
    std::size_t dimension() const;
    bool is_ket() const {
        return is_ket_;
    }
    const Eigen::VectorXcd &ket() const {
        return psi_;
    }
    Eigen::MatrixXcd density() const;

    void apply_unitary(const Eigen::MatrixXcd &u, const std::vector<std::size_t> &targets);
    void apply_kraus(const std::vector<Eigen::MatrixXcd> &ks, const std::vector<std::size_t> &targets);

    struct Measurement {
        /// 1 for the +1 eigenvalue, 2 for -1.
        int outcome;
        double probability;
    };
    /// Pauli-axis measurement of a qubit subsystem. A forced outcome with zero
    /// probability raises "impossible-outcome".
    Measurement measure(std::size_t target, Axis axis, Rng &rng, std::optional<int> forced = std::nullopt);
    /// Probability of outcome (1 or 2) without changing the state.
    double probability(std::size_t target, Axis axis, int outcome) const;

    /// Traces out one subsystem. Keeps the vector form when the subsystem is
    /// in a product state with the rest.
    void remove(std::size_t target);
    /// Reduced state on `keep` (sorted ascending). Throws "empty-keep".
    DenseState partial_trace(std::vector<std::size_t> keep) const;

    /// <psi| rho |psi>. Throws "dim-mismatch".
    double fidelity(const Eigen::VectorXcd &psi) const;
    std::size_t memory_bytes() const;

   private:
    void promote();

    std::vector<int> dims_;
    bool is_ket_ = true;
    Eigen::VectorXcd psi_;
    Eigen::MatrixXcd rho_;
};

}  // namespace qnet

#endif
