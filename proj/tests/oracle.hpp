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

// Brute-force density-matrix helpers for test oracles. Everything here is
// built from explicit Kronecker products so it shares no code with the
// simulator's backends.
#ifndef QNET_TESTS_ORACLE_HPP
#define QNET_TESTS_ORACLE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace oracle {

using M = Eigen::MatrixXcd;
using C = std::complex<double>;

inline M kron(const M &a, const M &b) {
    M out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline M pauli(char p) {
    M m(2, 2);
    switch (p) {
        case 'X':
            m << 0, 1, 1, 0;
            break;
        case 'Y':
            m << 0, C(0, -1), C(0, 1), 0;
            break;
        case 'Z':
            m << 1, 0, 0, -1;
            break;
        default:
            m = M::Identity(2, 2);
    }
    return m;
}

inline M hadamard() {
    M m(2, 2);
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

inline M phase() {
    M m(2, 2);
    m << 1, 0, 0, C(0, 1);
    return m;
}

/// Qubit 0 is the most significant tensor factor.
inline M embed(const M &u, std::size_t q, std::size_t n) {
    M out = M::Identity(1, 1);
    for (std::size_t i = 0; i < n; i++) {
        out = kron(out, i == q ? u : M::Identity(2, 2));
    }
    return out;
}

inline M cnot(std::size_t c, std::size_t t, std::size_t n) {
    M p0 = M::Zero(2, 2);
    p0(0, 0) = 1;
    M p1 = M::Zero(2, 2);
    p1(1, 1) = 1;
    return embed(p0, c, n) + embed(p1, c, n) * embed(pauli('X'), t, n);
}

inline M cz(std::size_t a, std::size_t b, std::size_t n) {
    M p1 = M::Zero(2, 2);
    p1(1, 1) = 1;
    M id = M::Identity(std::size_t{1} << n, std::size_t{1} << n);
    return id - 2.0 * embed(p1, a, n) * embed(p1, b, n);
}

/// Projector onto eigenvalue (-1)^bit of Pauli `axis` on qubit q.
inline M projector(std::size_t q, char axis, int bit, std::size_t n) {
    double s = bit ? -1.0 : 1.0;
    return embed(0.5 * (M::Identity(2, 2) + s * pauli(axis)), q, n);
}

inline M conj(const M &u, const M &rho) {
    return u * rho * u.adjoint();
}

inline M bell() {
    M m = M::Zero(4, 4);
    m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
    return m;
}

/// F |Phi+><Phi+| + (1 - F) I/4.
inline M werner(double f) {
    return f * bell() + (1 - f) * M::Identity(4, 4) / 4.0;
}

/// Keeps the first `k` qubits of an n-qubit density matrix.
inline M keep_leading(const M &rho, std::size_t k, std::size_t n) {
    const Eigen::Index dk = Eigen::Index{1} << k;
    const Eigen::Index dr = Eigen::Index{1} << (n - k);
    M out = M::Zero(dk, dk);
    for (Eigen::Index i = 0; i < dk; i++) {
        for (Eigen::Index j = 0; j < dk; j++) {
            for (Eigen::Index r = 0; r < dr; r++) {
                out(i, j) += rho(i * dr + r, j * dr + r);
            }
        }
    }
    return out;
}

/// Moves qubit order: output qubit i is input qubit perm[i].
inline M reorder(const M &rho, const std::vector<std::size_t> &perm) {
    const std::size_t n = perm.size();
    const Eigen::Index d = rho.rows();
    std::vector<Eigen::Index> map(d);
    for (Eigen::Index idx = 0; idx < d; idx++) {
        Eigen::Index out = 0;
        for (std::size_t i = 0; i < n; i++) {
            out = (out << 1) | ((idx >> (n - 1 - perm[i])) & 1);
        }
        map[idx] = out;
    }
    M res(d, d);
    for (Eigen::Index r = 0; r < d; r++) {
        for (Eigen::Index c = 0; c < d; c++) {
            res(map[r], map[c]) = rho(r, c);
        }
    }
    return res;
}

inline double bell_fidelity(const M &rho2) {
    return (bell() * rho2).trace().real();
}

struct Heralded {
    double probability;
    double fidelity;
};

/// Bilateral CNOT distillation of two copies of the pair state `pair`.
/// Qubits: keep a, keep b, sacrificial a, sacrificial b.
inline Heralded purify2to1(const M &pair) {
    const std::size_t n = 4;
    M rho = kron(pair, pair);
    M g = cnot(0, 2, n) * cnot(1, 3, n);
    rho = conj(g, rho);
    M kept = M::Zero(4, 4);
    double p = 0;
    for (int b = 0; b < 2; b++) {
        M proj = projector(2, 'Z', b, n) * projector(3, 'Z', b, n);
        M r = proj * rho * proj;
        p += r.trace().real();
        kept += keep_leading(r, 2, n);
    }
    return {p, bell_fidelity(kept) / p};
}

inline Heralded purify2to1(double f) {
    return purify2to1(werner(f));
}

/// Local Clifford taking `axis` to Z.
inline M to_z(char axis) {
    if (axis == 'X') {
        return hadamard();
    }
    if (axis == 'Y') {
        return hadamard() * phase().adjoint();
    }
    return M::Identity(2, 2);
}

/// Double selection on three Werner pairs. Qubits: keep a/b, first
/// sacrificial a/b, second sacrificial a/b.
inline Heralded purify3to1(double f, char lo1, char lo2) {
    const std::size_t n = 6;
    M rho = kron(kron(werner(f), werner(f)), werner(f));
    // b side uses the conjugate frame so the Bell state is left invariant.
    auto check = [&](std::size_t ca, std::size_t cb, std::size_t ta, std::size_t tb, char axis) {
        M c = to_z(axis);
        M cc = c.conjugate();
        M u = embed(c, ca, n) * embed(cc, cb, n) * embed(c, ta, n) * embed(cc, tb, n);
        M g = u.adjoint() * cnot(ca, ta, n) * cnot(cb, tb, n) * u;
        rho = conj(g, rho);
    };
    check(0, 1, 2, 3, lo1);
    check(2, 3, 4, 5, lo2);
    M kept = M::Zero(4, 4);
    double p = 0;
    // Accepted outcomes: the parity (|00> + |11>)/sqrt(2) has, odd for Y.
    auto partner = [](char axis, int bit) { return axis == 'Y' ? 1 - bit : bit; };
    for (int b1 = 0; b1 < 2; b1++) {
        for (int b2 = 0; b2 < 2; b2++) {
            M proj = projector(2, lo1, b1, n) * projector(3, lo1, partner(lo1, b1), n) * projector(4, lo2, b2, n) *
                     projector(5, lo2, partner(lo2, b2), n);
            M r = proj * rho * proj;
            p += r.trace().real();
            kept += keep_leading(r, 2, n);
        }
    }
    return {p, bell_fidelity(kept) / p};
}

/// Entanglement swap of two Werner pairs (a, b1) and (b2, c) with exact
/// correction; returns the corrected (a, c) state averaged over outcomes.
inline M swapped(double f1, double f2) {
    const std::size_t n = 4;
    M rho = kron(werner(f1), werner(f2));
    rho = conj(embed(hadamard(), 1, n) * cnot(1, 2, n), rho);
    M out = M::Zero(4, 4);
    for (int z = 0; z < 2; z++) {
        for (int x = 0; x < 2; x++) {
            M proj = projector(1, 'Z', z, n) * projector(2, 'Z', x, n);
            M r = proj * rho * proj;
            M fix = M::Identity(16, 16);
            if (z) {
                fix = embed(pauli('Z'), 0, n) * fix;
            }
            if (x) {
                fix = embed(pauli('X'), 3, n) * fix;
            }
            r = conj(fix, r);
            out += keep_leading(reorder(r, {0, 3, 1, 2}), 2, n);
        }
    }
    return out;
}

}  // namespace oracle

#endif
