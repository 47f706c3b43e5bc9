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

#include "qnet/backend.hpp"

#include "qnet/error.hpp"

namespace qnet {

std::string backend_name(BackendId id) {
    return id == BackendId::dense ? "dense" : "stabilizer";
}

BackendId parse_backend(const std::string &name) {
    if (name == "dense") {
        return BackendId::dense;
    }
    if (name == "stabilizer" || name == "tableau") {
        return BackendId::stabilizer;
    }
    throw Error("unknown-backend", name);
}

namespace {

void check_arity(std::size_t arity, const std::vector<std::size_t> &targets) {
    if (arity != targets.size()) {
        throw Error("arity-mismatch", "operation acts on " + std::to_string(arity) + " subsystems, got " +
                                          std::to_string(targets.size()));
    }
}

}  // namespace

void DenseBackendState::apply_unitary(const SymOperator &op, const std::vector<std::size_t> &targets) {
    check_arity(op.arity(), targets);
    state_.apply_unitary(op.matrix(), targets);
}

bool DenseBackendState::apply_channel(const SymChannel &ch, const std::vector<std::size_t> &targets, Rng &) {
    check_arity(ch.arity(), targets);
    if (ch.is_identity() && ch.kind() != SymChannel::Kind::amplitude_damp) {
        return false;
    }
    if (ch.kind() == SymChannel::Kind::amplitude_damp && ch.parameter() == 0) {
        return false;
    }
    int dim = targets.size() == 1 ? state_.dims()[targets[0]] : 2;
    state_.apply_kraus(ch.kraus(dim), targets);
    return false;
}

BackendState::Measurement DenseBackendState::measure(std::size_t target, Axis axis, Rng &rng,
                                                     std::optional<int> forced) {
    auto m = state_.measure(target, axis, rng, forced);
    return Measurement{m.outcome, m.probability};
}

double DenseBackendState::expectation(const std::string &letters) const {
    if (letters.size() != state_.size()) {
        throw Error("arity-mismatch", "Pauli word " + letters + " does not cover the state");
    }
    std::vector<std::size_t> support;
    std::string word;
    for (std::size_t i = 0; i < letters.size(); i++) {
        if (letters[i] != 'I') {
            support.push_back(i);
            word += letters[i];
        }
    }
    if (support.empty()) {
        return 1.0;
    }
    for (std::size_t q : support) {
        if (state_.dims()[q] != 2) {
            throw Error("dim-mismatch", "Pauli expectation on a non-qubit subsystem");
        }
    }
    Eigen::MatrixXcd rho = state_.partial_trace(support).density();
    return (PauliString::parse(word).matrix() * rho).trace().real();
}

bool DenseBackendState::discard(std::size_t target, Rng &) {
    state_.remove(target);
    return false;
}

void TableauBackendState::apply_unitary(const SymOperator &op, const std::vector<std::size_t> &targets) {
    check_arity(op.arity(), targets);
    for (const auto &step : op.clifford_steps()) {
        std::size_t a = targets[step.targets[0]];
        std::size_t b = gate_arity(step.gate) == 2 ? targets[step.targets[1]] : a;
        switch (step.gate) {
            case Gate::I:
            case Gate::T:
                break;
            case Gate::X:
                tab_.x(a);
                break;
            case Gate::Y:
                tab_.y(a);
                break;
            case Gate::Z:
                tab_.z(a);
                break;
            case Gate::H:
                tab_.h(a);
                break;
            case Gate::S:
                tab_.s(a);
                break;
            case Gate::Sdag:
                tab_.sdag(a);
                break;
            case Gate::CNOT:
                tab_.cnot(a, b);
                break;
            case Gate::CZ:
                tab_.cz(a, b);
                break;
        }
    }
}

bool TableauBackendState::apply_channel(const SymChannel &ch, const std::vector<std::size_t> &targets, Rng &rng) {
    check_arity(ch.arity(), targets);
    SymChannel::PauliForm form = ch.pauli_form();
    std::vector<std::pair<PauliString, double>> terms;
    for (auto &t : form.terms) {
        if (t.second > 0) {
            terms.push_back(std::move(t));
        }
    }
    if (terms.size() == 1 && terms[0].first.is_identity()) {
        return form.approximate;
    }
    const PauliString *pick = &terms.back().first;
    if (terms.size() > 1) {
        double u = rng.uniform();
        double acc = 0;
        for (const auto &[p, w] : terms) {
            acc += w;
            if (u < acc) {
                pick = &p;
                break;
            }
        }
    }
    if (!pick->is_identity()) {
        PauliString full(tab_.num_qubits());
        for (std::size_t k = 0; k < targets.size(); k++) {
            full.xs[targets[k]] = pick->xs[k];
            full.zs[targets[k]] = pick->zs[k];
        }
        tab_.apply_pauli(full);
    }
    return form.approximate;
}

BackendState::Measurement TableauBackendState::measure(std::size_t target, Axis axis, Rng &rng,
                                                       std::optional<int> forced) {
    std::optional<int> bit;
    if (forced) {
        bit = *forced == 1 ? 0 : 1;
    }
    auto o = tab_.measure(target, axis, rng, bit);
    return Measurement{o.bit == 0 ? 1 : 2, o.deterministic ? 1.0 : 0.5};
}

bool TableauBackendState::discard(std::size_t target, Rng &rng) {
    return tab_.remove_qubit(target, rng);
}

Eigen::MatrixXcd TableauBackendState::density() const {
    if (tab_.num_qubits() > 12) {
        throw Error("unsupported-on-backend", "dense lift limited to 12 qubits");
    }
    return tab_.density();
}

std::size_t TableauBackendState::memory_bytes() const {
    const std::size_t n = tab_.num_qubits();
    return 2 * n * (2 * n + sizeof(int));
}

std::unique_ptr<BackendState> compose(const BackendState &a, const BackendState &b) {
    if (a.backend() != b.backend()) {
        throw Error("backend-mismatch", "cannot compose " + backend_name(a.backend()) + " with " +
                                            backend_name(b.backend()));
    }
    if (a.backend() == BackendId::dense) {
        const auto &da = static_cast<const DenseBackendState &>(a).state();
        const auto &db = static_cast<const DenseBackendState &>(b).state();
        return std::make_unique<DenseBackendState>(DenseState::compose(da, db));
    }
    const auto &ta = static_cast<const TableauBackendState &>(a).tableau();
    const auto &tb = static_cast<const TableauBackendState &>(b).tableau();
    return std::make_unique<TableauBackendState>(Tableau::direct_sum(ta, tb));
}

DenseState express_dense(const SymState &s) {
    if (s.is_pure()) {
        return DenseState::from_ket(s.dims(), s.ket());
    }
    return DenseState::from_density(s.dims(), s.density());
}

std::unique_ptr<BackendState> express(const SymState &s, BackendId backend, Rng &rng) {
    if (backend == BackendId::dense) {
        return std::make_unique<DenseBackendState>(express_dense(s));
    }
    return std::make_unique<TableauBackendState>(express_stabilizer(s).sample(rng));
}

double fidelity(const Eigen::MatrixXcd &rho, const SymState &target) {
    if (!target.is_pure()) {
        throw Error("invalid-expression", "fidelity target must be pure");
    }
    Eigen::VectorXcd psi = target.ket();
    if (psi.size() != rho.rows()) {
        throw Error("dim-mismatch", "fidelity target has a different dimension");
    }
    return psi.dot(rho * psi).real();
}

}  // namespace qnet
