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

#ifndef QNET_PAULI_HPP
#define QNET_PAULI_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qnet {

/// Single-qubit Pauli axis used for measurement bases and basis kets.
enum class Axis { X, Y, Z };

char axis_char(Axis a);
Axis parse_axis(char c);

/// An n-qubit Pauli operator i^phase * P_0 (x) P_1 (x) ... with P_k given by
/// the bit pair (x_k, z_k): (0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z.
class PauliString {
   public:
    PauliString() = default;
    explicit PauliString(std::size_t n) : xs(n, 0), zs(n, 0) {
    }
    /// Parses words such as "XZ", "+XZ", "-YI".
    static PauliString parse(std::string_view word);
    /// Single-qubit Pauli `p` ('I','X','Y','Z') on qubit q of n.
    static PauliString single(std::size_t n, std::size_t q, char p);

    std::size_t size() const {
        return xs.size();
    }
    char at(std::size_t q) const;
    void set(std::size_t q, char p);
    bool negative() const {
        return phase == 2;
    }
    bool is_identity() const;
    std::size_t weight() const;
    /// "+XZ" / "-XZ"; non-Hermitian phases render as "+iXZ" / "-iXZ".
    std::string str() const;

    bool commutes(const PauliString &other) const;
    /// this := this * rhs.
    PauliString &operator*=(const PauliString &rhs);
    friend PauliString operator*(PauliString a, const PauliString &b) {
        a *= b;
        return a;
    }
    bool operator==(const PauliString &o) const = default;

    /// Dense matrix, qubit 0 most significant.
    Eigen::MatrixXcd matrix() const;

    std::vector<std::uint8_t> xs;
    std::vector<std::uint8_t> zs;
    /// Power of i in the overall factor, 0..3.
    int phase = 0;
};

/// Exponent of i picked up by the single-qubit product (x1,z1)*(x2,z2).
inline int pauli_product_phase(int x1, int z1, int x2, int z2) {
    if (x1 == 0 && z1 == 0) {
        return 0;
    }
    if (x1 == 1 && z1 == 1) {
        return z2 - x2;
    }
    if (x1 == 1) {
        return z2 * (2 * x2 - 1);
    }
    return x2 * (1 - 2 * z2);
}

}  // namespace qnet

#endif
