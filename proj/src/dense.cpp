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

#include "qnet/dense.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qnet/error.hpp"

namespace qnet {

namespace {

using Index = std::size_t;

std::vector<Index> strides_of(const std::vector<int> &dims) {
    std::vector<Index> s(dims.size(), 1);
    for (std::size_t k = dims.size(); k-- > 1;) {
        s[k - 1] = s[k] * static_cast<Index>(dims[k]);
    }
    return s;
}

// Offsets of every joint value of `subset` (first listed most significant),
// relative to an index whose `subset` digits are zero.
std::vector<Index> subset_offsets(const std::vector<int> &dims, const std::vector<Index> &strides,
                                  const std::vector<std::size_t> &subset) {
    std::vector<Index> offs{0};
    for (std::size_t t : subset) {
        std::vector<Index> next;
        next.reserve(offs.size() * dims[t]);
        for (Index o : offs) {
            for (int d = 0; d < dims[t]; d++) {
                next.push_back(o + d * strides[t]);
            }
        }
        offs = std::move(next);
    }
    return offs;
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t> &subset) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < n; k++) {
        if (std::find(subset.begin(), subset.end(), k) == subset.end()) {
            rest.push_back(k);
        }
    }
    return rest;
}

struct TargetMap {
    std::vector<Index> offsets;
    std::vector<Index> bases;
};

TargetMap target_map(const std::vector<int> &dims, const std::vector<std::size_t> &targets) {
    auto strides = strides_of(dims);
    for (std::size_t t : targets) {
        if (t >= dims.size()) {
            throw Error("dim-mismatch", "target out of range");
        }
    }
    TargetMap m;
    m.offsets = subset_offsets(dims, strides, targets);
    m.bases = subset_offsets(dims, strides, complement(dims.size(), targets));
    return m;
}

// M := U_targets * M (acting on row indices).
void apply_left(Eigen::MatrixXcd &m, const Eigen::MatrixXcd &u, const TargetMap &tm) {
    const Eigen::Index dt = static_cast<Eigen::Index>(tm.offsets.size());
    Eigen::MatrixXcd g(dt, m.cols());
    for (Index b : tm.bases) {
        for (Eigen::Index a = 0; a < dt; a++) {
            g.row(a) = m.row(static_cast<Eigen::Index>(b + tm.offsets[a]));
        }
        Eigen::MatrixXcd r = u * g;
        for (Eigen::Index a = 0; a < dt; a++) {
            m.row(static_cast<Eigen::Index>(b + tm.offsets[a])) = r.row(a);
        }
    }
}

// M := M * U_targets^dagger (acting on column indices).
void apply_right_adjoint(Eigen::MatrixXcd &m, const Eigen::MatrixXcd &u, const TargetMap &tm) {
    const Eigen::Index dt = static_cast<Eigen::Index>(tm.offsets.size());
    Eigen::MatrixXcd g(m.rows(), dt);
    Eigen::MatrixXcd ua = u.adjoint();
    for (Index b : tm.bases) {
        for (Eigen::Index a = 0; a < dt; a++) {
            g.col(a) = m.col(static_cast<Eigen::Index>(b + tm.offsets[a]));
        }
        Eigen::MatrixXcd r = g * ua;
        for (Eigen::Index a = 0; a < dt; a++) {
            m.col(static_cast<Eigen::Index>(b + tm.offsets[a])) = r.col(a);
        }
    }
}

void apply_left(Eigen::VectorXcd &v, const Eigen::MatrixXcd &u, const TargetMap &tm) {
    const Eigen::Index dt = static_cast<Eigen::Index>(tm.offsets.size());
    Eigen::VectorXcd g(dt);
    for (Index b : tm.bases) {
        for (Eigen::Index a = 0; a < dt; a++) {
            g(a) = v(static_cast<Eigen::Index>(b + tm.offsets[a]));
        }
        Eigen::VectorXcd r = u * g;
        for (Eigen::Index a = 0; a < dt; a++) {
            v(static_cast<Eigen::Index>(b + tm.offsets[a])) = r(a);
        }
    }
}

Eigen::MatrixXcd axis_projector(Axis axis, int outcome) {
    Eigen::MatrixXcd sigma(2, 2);
    switch (axis) {
        case Axis::X:
            sigma << 0, 1, 1, 0;
            break;
        case Axis::Y:
            sigma << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
            break;
        case Axis::Z:
            sigma << 1, 0, 0, -1;
            break;
    }
    double sign = outcome == 1 ? 1.0 : -1.0;
    return (Eigen::MatrixXcd::Identity(2, 2) + sign * sigma) * 0.5;
}

bool is_unitary(const Eigen::MatrixXcd &k) {
    return (k.adjoint() * k - Eigen::MatrixXcd::Identity(k.rows(), k.cols())).norm() < 1e-12;
}

}  // namespace

DenseState DenseState::from_ket(std::vector<int> dims, Eigen::VectorXcd psi) {
    DenseState s;
    s.dims_ = std::move(dims);
    if (static_cast<std::size_t>(psi.size()) != s.dimension()) {
        throw Error("dim-mismatch", "state vector size does not match dimensions");
    }
    s.is_ket_ = true;
    s.psi_ = std::move(psi);
    return s;
}

DenseState DenseState::from_density(std::vector<int> dims, Eigen::MatrixXcd rho) {
    DenseState s;
    s.dims_ = std::move(dims);
    if (static_cast<std::size_t>(rho.rows()) != s.dimension() || rho.rows() != rho.cols()) {
        throw Error("dim-mismatch", "density matrix size does not match dimensions");
    }
    s.is_ket_ = false;
    s.rho_ = std::move(rho);
    return s;
}

DenseState DenseState::compose(const DenseState &a, const DenseState &b) {
    std::vector<int> dims = a.dims_;
    dims.insert(dims.end(), b.dims_.begin(), b.dims_.end());
    if (a.is_ket_ && b.is_ket_) {
        Eigen::VectorXcd v(a.psi_.size() * b.psi_.size());
        for (Eigen::Index i = 0; i < a.psi_.size(); i++) {
            v.segment(i * b.psi_.size(), b.psi_.size()) = a.psi_(i) * b.psi_;
        }
        return from_ket(std::move(dims), std::move(v));
    }
    Eigen::MatrixXcd ra = a.density();
    Eigen::MatrixXcd rb = b.density();
    Eigen::MatrixXcd r(ra.rows() * rb.rows(), ra.cols() * rb.cols());
    for (Eigen::Index i = 0; i < ra.rows(); i++) {
        for (Eigen::Index j = 0; j < ra.cols(); j++) {
            r.block(i * rb.rows(), j * rb.cols(), rb.rows(), rb.cols()) = ra(i, j) * rb;
        }
    }
    return from_density(std::move(dims), std::move(r));
}

std::size_t DenseState::dimension() const {
    std::size_t d = 1;
    for (int k : dims_) {
        d *= static_cast<std::size_t>(k);
    }
    return d;
}

Eigen::MatrixXcd DenseState::density() const {
    if (is_ket_) {
        return psi_ * psi_.adjoint();
    }
    return rho_;
}

void DenseState::promote() {
    if (is_ket_) {
        rho_ = psi_ * psi_.adjoint();
        psi_.resize(0);
        is_ket_ = false;
    }
}

void DenseState::apply_unitary(const Eigen::MatrixXcd &u, const std::vector<std::size_t> &targets) {
    TargetMap tm = target_map(dims_, targets);
    if (static_cast<std::size_t>(u.rows()) != tm.offsets.size()) {
        throw Error("dim-mismatch", "operator size does not match targets");
    }
    if (is_ket_) {
        apply_left(psi_, u, tm);
    } else {
        apply_left(rho_, u, tm);
        apply_right_adjoint(rho_, u, tm);
    }
}

void DenseState::apply_kraus(const std::vector<Eigen::MatrixXcd> &ks, const std::vector<std::size_t> &targets) {
    if (ks.empty()) {
        return;
    }
    if (ks.size() == 1 && is_unitary(ks[0])) {
        apply_unitary(ks[0], targets);
        return;
    }
    TargetMap tm = target_map(dims_, targets);
    promote();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(rho_.rows(), rho_.cols());
    for (const auto &k : ks) {
        if (static_cast<std::size_t>(k.rows()) != tm.offsets.size()) {
            throw Error("dim-mismatch", "Kraus operator size does not match targets");
        }
        Eigen::MatrixXcd term = rho_;
        apply_left(term, k, tm);
        apply_right_adjoint(term, k, tm);
        acc += term;
    }
    rho_ = std::move(acc);
}

double DenseState::probability(std::size_t target, Axis axis, int outcome) const {
    if (target >= dims_.size() || dims_[target] != 2) {
        throw Error("dim-mismatch", "Pauli measurement needs a qubit subsystem");
    }
    TargetMap tm = target_map(dims_, {target});
    Eigen::MatrixXcd p = axis_projector(axis, outcome);
    if (is_ket_) {
        Eigen::VectorXcd v = psi_;
        apply_left(v, p, tm);
        return v.squaredNorm();
    }
    Eigen::MatrixXcd r = rho_;
    apply_left(r, p, tm);
    return std::max(0.0, r.trace().real());
}

DenseState::Measurement DenseState::measure(std::size_t target, Axis axis, Rng &rng, std::optional<int> forced) {
    double p1 = probability(target, axis, 1);
    int outcome;
    if (forced) {
        outcome = *forced;
    } else {
        outcome = rng.uniform() < p1 ? 1 : 2;
    }
    double p = outcome == 1 ? p1 : 1.0 - p1;
    if (p < 1e-14) {
        throw Error("impossible-outcome", "requested outcome has zero probability");
    }
    TargetMap tm = target_map(dims_, {target});
    Eigen::MatrixXcd proj = axis_projector(axis, outcome);
    if (is_ket_) {
        apply_left(psi_, proj, tm);
        psi_ /= std::sqrt(p);
    } else {
        apply_left(rho_, proj, tm);
        apply_right_adjoint(rho_, proj, tm);
        rho_ /= p;
    }
    return Measurement{outcome, p};
}

void DenseState::remove(std::size_t target) {
    if (target >= dims_.size()) {
        throw Error("dim-mismatch", "target out of range");
    }
    std::vector<std::size_t> keep = complement(dims_.size(), {target});
    if (keep.empty()) {
        dims_.clear();
        psi_ = Eigen::VectorXcd::Ones(1);
        rho_.resize(0, 0);
        is_ket_ = true;
        return;
    }
    if (is_ket_) {
        DenseState local = partial_trace({target});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(local.rho_);
        double top = es.eigenvalues()(es.eigenvalues().size() - 1);
        if (top > 1.0 - 1e-12) {
            Eigen::VectorXcd e = es.eigenvectors().col(es.eigenvalues().size() - 1);
            auto strides = strides_of(dims_);
            auto rest_offs = subset_offsets(dims_, strides, keep);
            Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rest_offs.size()));
            for (std::size_t r = 0; r < rest_offs.size(); r++) {
                for (int i = 0; i < dims_[target]; i++) {
                    out(r) += std::conj(e(i)) * psi_(rest_offs[r] + i * strides[target]);
                }
            }
            out /= out.norm();
            std::vector<int> nd;
            for (std::size_t k : keep) {
                nd.push_back(dims_[k]);
            }
            dims_ = std::move(nd);
            psi_ = std::move(out);
            return;
        }
    }
    *this = partial_trace(keep);
}

DenseState DenseState::partial_trace(std::vector<std::size_t> keep) const {
    if (keep.empty()) {
        throw Error("empty-keep", "partial trace must keep at least one subsystem");
    }
    std::sort(keep.begin(), keep.end());
    auto strides = strides_of(dims_);
    auto ko = subset_offsets(dims_, strides, keep);
    auto to = subset_offsets(dims_, strides, complement(dims_.size(), keep));
    const Eigen::Index dk = static_cast<Eigen::Index>(ko.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; a++) {
        for (Eigen::Index b = 0; b < dk; b++) {
            std::complex<double> acc = 0;
            for (Index e : to) {
                Eigen::Index i = static_cast<Eigen::Index>(ko[a] + e);
                Eigen::Index j = static_cast<Eigen::Index>(ko[b] + e);
                acc += is_ket_ ? psi_(i) * std::conj(psi_(j)) : rho_(i, j);
            }
            out(a, b) = acc;
        }
    }
    std::vector<int> nd;
    for (std::size_t k : keep) {
        nd.push_back(dims_[k]);
    }
    return from_density(std::move(nd), std::move(out));
}

double DenseState::fidelity(const Eigen::VectorXcd &psi) const {
    if (static_cast<std::size_t>(psi.size()) != dimension()) {
        throw Error("dim-mismatch", "target state size does not match");
    }
    if (is_ket_) {
        return std::norm(psi.dot(psi_));
    }
    return psi.dot(rho_ * psi).real();
}

std::size_t DenseState::memory_bytes() const {
    std::size_t entries = is_ket_ ? static_cast<std::size_t>(psi_.size()) : static_cast<std::size_t>(rho_.size());
    return entries * sizeof(std::complex<double>) + dims_.size() * sizeof(int);
}

}  // namespace qnet
