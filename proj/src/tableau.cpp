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

#include "qnet/tableau.hpp"

#include "qnet/error.hpp"
#include "qnet/gf2.hpp"

namespace qnet {

namespace {

gf2::Row symplectic(const PauliString &p) {
    gf2::Row r(p.xs.begin(), p.xs.end());
    r.insert(r.end(), p.zs.begin(), p.zs.end());
    return r;
}

int symplectic_product(const PauliString &a, const PauliString &b) {
    return a.commutes(b) ? 0 : 1;
}

}  // namespace

Tableau::Tableau(std::size_t n) : n_(n), rows_(2 * n, PauliString(n)) {
    for (std::size_t q = 0; q < n; q++) {
        rows_[q].xs[q] = 1;
        rows_[n + q].zs[q] = 1;
    }
}

Tableau Tableau::from_stabilizers(const std::vector<PauliString> &gens) {
    const std::size_t n = gens.empty() ? 0 : gens[0].size();
    for (const auto &g : gens) {
        if (g.size() != n) {
            throw Error("invalid-stabilizer-group", "generators have different lengths");
        }
        if (g.phase & 1) {
            throw Error("invalid-stabilizer-group", "generator " + g.str() + " is not Hermitian");
        }
    }
    if (gens.size() != n) {
        throw Error("rank-mismatch", std::to_string(gens.size()) + " generators for " + std::to_string(n) + " qubits");
    }
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = i + 1; j < n; j++) {
            if (!gens[i].commutes(gens[j])) {
                throw Error("invalid-stabilizer-group", gens[i].str() + " anticommutes with " + gens[j].str());
            }
        }
    }
    std::vector<gf2::Row> sym;
    for (const auto &g : gens) {
        sym.push_back(symplectic(g));
    }
    if (gf2::rank(sym) != n) {
        throw Error("invalid-stabilizer-group", "generators are dependent");
    }

    // Destabilizers: solve <d_i, s_j> = delta_ij, then make them commute by
    // adding stabilizers (which leaves the pairing untouched).
    std::vector<gf2::Row> pairing;
    for (const auto &g : gens) {
        gf2::Row r(g.zs.begin(), g.zs.end());
        r.insert(r.end(), g.xs.begin(), g.xs.end());
        pairing.push_back(std::move(r));
    }
    Tableau t;
    t.n_ = n;
    t.rows_.assign(2 * n, PauliString(n));
    for (std::size_t i = 0; i < n; i++) {
        gf2::Row e(n, 0);
        e[i] = 1;
        auto sol = gf2::solve(pairing, e, 2 * n);
        if (!sol) {
            throw Error("invalid-stabilizer-group", "no destabilizer basis");
        }
        PauliString d(n);
        for (std::size_t q = 0; q < n; q++) {
            d.xs[q] = (*sol)[q];
            d.zs[q] = (*sol)[n + q];
        }
        t.rows_[i] = d;
        t.rows_[n + i] = gens[i];
    }
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < i; j++) {
            if (symplectic_product(t.rows_[i], t.rows_[j])) {
                PauliString fixed = t.rows_[i] * gens[j];
                fixed.phase = 0;
                t.rows_[i] = fixed;
            }
        }
    }
    return t;
}

Tableau Tableau::direct_sum(const Tableau &a, const Tableau &b) {
    const std::size_t n = a.n_ + b.n_;
    Tableau t;
    t.n_ = n;
    t.rows_.assign(2 * n, PauliString(n));
    auto place = [n](const PauliString &src, std::size_t offset) {
        PauliString p(n);
        for (std::size_t q = 0; q < src.size(); q++) {
            p.xs[offset + q] = src.xs[q];
            p.zs[offset + q] = src.zs[q];
        }
        p.phase = src.phase;
        return p;
    };
    for (std::size_t i = 0; i < a.n_; i++) {
        t.rows_[i] = place(a.rows_[i], 0);
        t.rows_[n + i] = place(a.rows_[a.n_ + i], 0);
    }
    for (std::size_t i = 0; i < b.n_; i++) {
        t.rows_[a.n_ + i] = place(b.rows_[i], a.n_);
        t.rows_[n + a.n_ + i] = place(b.rows_[b.n_ + i], a.n_);
    }
    return t;
}

std::vector<PauliString> Tableau::stabilizers() const {
    return std::vector<PauliString>(rows_.begin() + n_, rows_.end());
}

void Tableau::h(std::size_t q) {
    for (auto &r : rows_) {
        if (r.xs[q] & r.zs[q]) {
            r.phase ^= 2;
        }
        std::swap(r.xs[q], r.zs[q]);
    }
}

void Tableau::s(std::size_t q) {
    for (auto &r : rows_) {
        if (r.xs[q] & r.zs[q]) {
            r.phase ^= 2;
        }
        r.zs[q] ^= r.xs[q];
    }
}

void Tableau::sdag(std::size_t q) {
    for (auto &r : rows_) {
        if (r.xs[q] & !r.zs[q]) {
            r.phase ^= 2;
        }
        r.zs[q] ^= r.xs[q];
    }
}

void Tableau::x(std::size_t q) {
    for (auto &r : rows_) {
        if (r.zs[q]) {
            r.phase ^= 2;
        }
    }
}

void Tableau::y(std::size_t q) {
    for (auto &r : rows_) {
        if (r.xs[q] ^ r.zs[q]) {
            r.phase ^= 2;
        }
    }
}

void Tableau::z(std::size_t q) {
    for (auto &r : rows_) {
        if (r.xs[q]) {
            r.phase ^= 2;
        }
    }
}

void Tableau::cnot(std::size_t c, std::size_t t) {
    for (auto &r : rows_) {
        if (r.xs[c] & r.zs[t] & (r.xs[t] ^ r.zs[c] ^ 1)) {
            r.phase ^= 2;
        }
        r.xs[t] ^= r.xs[c];
        r.zs[c] ^= r.zs[t];
    }
}

void Tableau::cz(std::size_t a, std::size_t b) {
    h(b);
    cnot(a, b);
    h(b);
}

void Tableau::apply_pauli(const PauliString &p) {
    for (auto &r : rows_) {
        if (!r.commutes(p)) {
            r.phase ^= 2;
        }
    }
}

void Tableau::rowmul(std::size_t h, std::size_t i) {
    // rows_[h] := rows_[i] * rows_[h]; both Hermitian and commuting or the
    // product is taken between a destabilizer and a stabilizer it commutes with.
    PauliString prod = rows_[i] * rows_[h];
    rows_[h] = std::move(prod);
}

Tableau::Outcome Tableau::measure_z(std::size_t q, Rng &rng, std::optional<int> forced) {
    std::size_t p = 2 * n_;
    for (std::size_t i = n_; i < 2 * n_; i++) {
        if (rows_[i].xs[q]) {
            p = i;
            break;
        }
    }
    if (p < 2 * n_) {
        for (std::size_t i = 0; i < 2 * n_; i++) {
            if (i != p && rows_[i].xs[q]) {
                rowmul(i, p);
            }
        }
        rows_[p - n_] = rows_[p];
        int bit = forced ? *forced : static_cast<int>(rng.next() & 1);
        PauliString zq(n_);
        zq.zs[q] = 1;
        zq.phase = bit ? 2 : 0;
        rows_[p] = zq;
        return Outcome{bit, false};
    }
    PauliString acc(n_);
    for (std::size_t i = 0; i < n_; i++) {
        if (rows_[i].xs[q]) {
            acc *= rows_[n_ + i];
        }
    }
    int bit = acc.phase == 2 ? 1 : 0;
    if (forced && *forced != bit) {
        throw Error("impossible-outcome", "deterministic Z outcome is " + std::to_string(bit));
    }
    return Outcome{bit, true};
}

Tableau::Outcome Tableau::measure(std::size_t q, Axis axis, Rng &rng, std::optional<int> forced) {
    switch (axis) {
        case Axis::Z:
            return measure_z(q, rng, forced);
        case Axis::X: {
            h(q);
            Outcome o = measure_z(q, rng, forced);
            h(q);
            return o;
        }
        case Axis::Y: {
            sdag(q);
            h(q);
            Outcome o = measure_z(q, rng, forced);
            h(q);
            s(q);
            return o;
        }
    }
    return Outcome{0, true};
}

int Tableau::expectation(const PauliString &p) const {
    for (std::size_t i = n_; i < 2 * n_; i++) {
        if (!rows_[i].commutes(p)) {
            return 0;
        }
    }
    PauliString acc(n_);
    for (std::size_t i = 0; i < n_; i++) {
        if (!rows_[i].commutes(p)) {
            acc *= rows_[n_ + i];
        }
    }
    if (acc.xs != p.xs || acc.zs != p.zs) {
        return 0;
    }
    int rel = ((acc.phase - p.phase) % 4 + 4) % 4;
    return rel == 0 ? 1 : -1;
}

bool Tableau::remove_qubit(std::size_t q, Rng &rng) {
    bool sampled = false;
    auto all_commute = [&](char c) {
        PauliString p = PauliString::single(n_, q, c);
        for (std::size_t i = n_; i < 2 * n_; i++) {
            if (!rows_[i].commutes(p)) {
                return false;
            }
        }
        return true;
    };
    if (all_commute('Z')) {
    } else if (all_commute('X')) {
        h(q);
    } else if (all_commute('Y')) {
        sdag(q);
        h(q);
    } else {
        measure_z(q, rng);
        sampled = true;
    }
    // Now +-Z_q is in the group, so no stabilizer has an X on q.
    std::vector<PauliString> gens = stabilizers();
    std::size_t pivot = gens.size();
    for (std::size_t i = 0; i < gens.size(); i++) {
        if (gens[i].zs[q]) {
            pivot = i;
            break;
        }
    }
    for (std::size_t i = 0; i < gens.size(); i++) {
        if (i != pivot && gens[i].zs[q]) {
            gens[i] *= gens[pivot];
        }
    }
    std::vector<PauliString> rest;
    for (std::size_t i = 0; i < gens.size(); i++) {
        if (i == pivot) {
            continue;
        }
        PauliString r(n_ - 1);
        for (std::size_t k = 0, j = 0; k < n_; k++) {
            if (k == q) {
                continue;
            }
            r.xs[j] = gens[i].xs[k];
            r.zs[j] = gens[i].zs[k];
            j++;
        }
        r.phase = gens[i].phase;
        rest.push_back(std::move(r));
    }
    *this = rest.empty() ? Tableau(0) : from_stabilizers(rest);
    return sampled;
}

std::vector<PauliString> Tableau::canonical_stabilizers() const {
    std::vector<PauliString> g = stabilizers();
    std::size_t r = 0;
    for (int part = 0; part < 2; part++) {
        for (std::size_t q = 0; q < n_ && r < g.size(); q++) {
            auto bit = [&](const PauliString &p) { return part == 0 ? p.xs[q] : p.zs[q]; };
            std::size_t p = r;
            while (p < g.size() && !bit(g[p])) {
                p++;
            }
            if (p == g.size()) {
                continue;
            }
            std::swap(g[r], g[p]);
            for (std::size_t i = 0; i < g.size(); i++) {
                if (i != r && bit(g[i])) {
                    g[i] *= g[r];
                }
            }
            r++;
        }
    }
    return g;
}

Eigen::MatrixXcd Tableau::density() const {
    const std::size_t dim = std::size_t{1} << n_;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    std::vector<PauliString> gens = stabilizers();
    // Sum over all 2^n group elements via a Gray code walk.
    PauliString cur(n_);
    rho += cur.matrix();
    for (std::size_t k = 1; k < dim; k++) {
        std::size_t flip = static_cast<std::size_t>(__builtin_ctzll(k));
        cur *= gens[flip];
        rho += cur.matrix();
    }
    return rho / static_cast<double>(dim);
}

bool Tableau::is_consistent() const {
    for (std::size_t i = 0; i < n_; i++) {
        for (std::size_t j = 0; j < n_; j++) {
            int want = i == j ? 1 : 0;
            if (symplectic_product(rows_[i], rows_[n_ + j]) != want) {
                return false;
            }
            if (symplectic_product(rows_[n_ + i], rows_[n_ + j]) != 0) {
                return false;
            }
            if (symplectic_product(rows_[i], rows_[j]) != 0) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace qnet
