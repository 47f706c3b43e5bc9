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

#include "qnet/pauli.hpp"

#include "qnet/error.hpp"

namespace qnet {

char axis_char(Axis a) {
    switch (a) {
        case Axis::X:
            return 'X';
        case Axis::Y:
            return 'Y';
        case Axis::Z:
            return 'Z';
    }
    return '?';
}

Axis parse_axis(char c) {
    switch (c) {
        case 'X':
        case 'x':
            return Axis::X;
        case 'Y':
        case 'y':
            return Axis::Y;
        case 'Z':
        case 'z':
            return Axis::Z;
        default:
            throw Error("invalid-axis", std::string(1, c));
    }
}

PauliString PauliString::parse(std::string_view word) {
    PauliString p;
    std::size_t i = 0;
    if (!word.empty() && (word[0] == '+' || word[0] == '-')) {
        p.phase = word[0] == '-' ? 2 : 0;
        i = 1;
    }
    if (i == word.size()) {
        throw Error("invalid-pauli", std::string(word));
    }
    for (; i < word.size(); i++) {
        char c = word[i];
        if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
            throw Error("invalid-pauli", std::string(word));
        }
        p.xs.push_back(c == 'X' || c == 'Y');
        p.zs.push_back(c == 'Z' || c == 'Y');
    }
    return p;
}

PauliString PauliString::single(std::size_t n, std::size_t q, char c) {
    PauliString p(n);
    p.set(q, c);
    return p;
}

char PauliString::at(std::size_t q) const {
    static constexpr char table[4] = {'I', 'Z', 'X', 'Y'};
    return table[xs[q] * 2 + zs[q]];
}

void PauliString::set(std::size_t q, char c) {
    xs[q] = c == 'X' || c == 'Y';
    zs[q] = c == 'Z' || c == 'Y';
}

bool PauliString::is_identity() const {
    for (std::size_t q = 0; q < size(); q++) {
        if (xs[q] || zs[q]) {
            return false;
        }
    }
    return true;
}

std::size_t PauliString::weight() const {
    std::size_t w = 0;
    for (std::size_t q = 0; q < size(); q++) {
        w += xs[q] || zs[q];
    }
    return w;
}

std::string PauliString::str() const {
    std::string s;
    s += (phase & 2) ? '-' : '+';
    if (phase & 1) {
        s += 'i';
    }
    for (std::size_t q = 0; q < size(); q++) {
        s += at(q);
    }
    return s;
}

bool PauliString::commutes(const PauliString &o) const {
    int acc = 0;
    for (std::size_t q = 0; q < size(); q++) {
        acc ^= (xs[q] & o.zs[q]) ^ (zs[q] & o.xs[q]);
    }
    return acc == 0;
}

PauliString &PauliString::operator*=(const PauliString &rhs) {
    if (rhs.size() != size()) {
        throw Error("dim-mismatch", "pauli product of different lengths");
    }
    int ph = phase + rhs.phase;
    for (std::size_t q = 0; q < size(); q++) {
        ph += pauli_product_phase(xs[q], zs[q], rhs.xs[q], rhs.zs[q]);
        xs[q] ^= rhs.xs[q];
        zs[q] ^= rhs.zs[q];
    }
    phase = ((ph % 4) + 4) % 4;
    return *this;
}

Eigen::MatrixXcd PauliString::matrix() const {
    using C = std::complex<double>;
    const std::size_t n = size();
    const std::size_t dim = std::size_t{1} << n;
    std::size_t xmask = 0;
    std::size_t zmask = 0;
    int ys = 0;
    for (std::size_t q = 0; q < n; q++) {
        std::size_t bit = std::size_t{1} << (n - 1 - q);
        if (xs[q]) {
            xmask |= bit;
        }
        if (zs[q]) {
            zmask |= bit;
        }
        ys += xs[q] & zs[q];
    }
    // Y = i X Z, so P = i^(phase + #Y) X^x Z^z.
    static const C powers[4] = {C(1, 0), C(0, 1), C(-1, 0), C(0, -1)};
    C global = powers[(phase + ys) % 4];
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::size_t j = 0; j < dim; j++) {
        double sign = (__builtin_popcountll(zmask & j) & 1) ? -1.0 : 1.0;
        m(j ^ xmask, j) = global * sign;
    }
    return m;
}

}  // namespace qnet
