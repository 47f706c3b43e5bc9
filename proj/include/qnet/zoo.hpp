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

#ifndef QNET_ZOO_HPP
#define QNET_ZOO_HPP

#include "qnet/registers.hpp"
#include "qnet/symbolic.hpp"

namespace qnet {

/// Two classical bits produced by a circuit.
struct Bits {
    int x = 0;
    int z = 0;
    bool operator==(const Bits &) const = default;
};

/// Maps a measurement outcome (1 or 2) to a bit (0 or 1).
inline int outcome_bit(int outcome) {
    return outcome - 1;
}

/// Bell measurement of two slots of one register: CNOT(a -> b), H(a), then
/// x from b and z from a. Both slots end up empty. The partners of a and b
/// then share (|00> + |11>)/sqrt(2) once Z^z is applied to a's partner and
/// X^x to b's partner.
Bits local_entanglement_swap(RegisterNet &net, RegRef a, RegRef b);

/// Merges the pair held in the comm slots of `local` and `remote` into a graph
/// edge between their storage slots. Local side: CZ(storage, comm), X
/// measurement of comm (bit x), X on the remote comm when x = 1. Remote side:
/// CZ(storage, comm), X measurement of comm (bit z), Z on the local storage
/// when z = 1. No residual correction is left. Throws "missing-pair" when the
/// comm slots do not hold a shared state, "slot-empty" for empty storage.
Bits fusion(RegisterNet &net, std::size_t local, std::size_t remote, std::size_t comm_slot, std::size_t storage_slot);

/// One round of bilateral-CNOT distillation. Keeps (keep_a, keep_b) iff the
/// Z outcomes on the sacrificial pair agree. Sacrificial slots always end
/// empty; on failure the kept pair is traced out too.
bool purify2to1(RegisterNet &net, RegRef keep_a, RegRef keep_b, RegRef sac_a, RegRef sac_b);

/// Double selection: the first sacrificial pair checks the kept pair in the
/// lo1 basis, then the second checks the first in the lo2 basis. Succeeds iff
/// both checks show the Bell-state parity; on failure all six slots are
/// emptied. Throws "invalid-leaveout" when lo1 == lo2.
bool purify3to1(RegisterNet &net, Axis lo1, Axis lo2, RegRef keep_a, RegRef keep_b, RegRef sac1_a, RegRef sac1_b,
                RegRef sac2_a, RegRef sac2_b);

/// Bilateral parity check of pair (ca, cb) onto pair (ta, tb) in basis L. The
/// a side conjugates by a Clifford C taking L to Z, the b side by conj(C), so
/// ideal pairs pass unchanged. Returns whether (ta, tb) shows the parity of
/// (|00> + |11>)/sqrt(2) in basis L (odd for Y). (ta, tb) end up empty.
bool bilateral_check(RegisterNet &net, Axis basis, RegRef ca, RegRef cb, RegRef ta, RegRef tb);

}  // namespace qnet

#endif
