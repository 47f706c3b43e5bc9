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

#include "qnet/zoo.hpp"

#include "qnet/error.hpp"

namespace qnet {

namespace {

void require_pair_layout(const RegisterNet &net, RegRef ka, RegRef kb, RegRef sa, RegRef sb) {
    if (ka.node != sa.node || kb.node != sb.node || ka.node == kb.node) {
        throw Error("mismatched-partners", "pairs must join the same two nodes");
    }
    for (RegRef r : {ka, kb, sa, sb}) {
        if (net.slot(r).empty()) {
            throw Error("slot-empty", r.str());
        }
    }
    if (!net.same_state(ka, kb) || !net.same_state(sa, sb)) {
        throw Error("mismatched-partners", "slots " + ka.str() + "/" + kb.str() + " and " + sa.str() + "/" +
                                               sb.str() + " are not entangled pairs");
    }
}

// Local Clifford C with C L C^dagger = +-Z, as the operator applied first.
// The b side uses the complex conjugate of the a side's Clifford, so that
// C (x) conj(C) leaves (|00> + |11>)/sqrt(2) unchanged.
SymOperator to_z_frame(Axis basis, bool b_side) {
    switch (basis) {
        case Axis::X:
            return ops::H();
        case Axis::Y:
            return b_side ? ops::H() * ops::S() : ops::H() * ops::Sdag();
        case Axis::Z:
            break;
    }
    return SymOperator(Gate::I);
}

SymOperator from_z_frame(Axis basis, bool b_side) {
    switch (basis) {
        case Axis::X:
            return ops::H();
        case Axis::Y:
            return b_side ? ops::Sdag() * ops::H() : ops::S() * ops::H();
        case Axis::Z:
            break;
    }
    return SymOperator(Gate::I);
}

// Bilateral CNOT from (ca, cb) onto (ta, tb) carried out in the basis-L frame.
void bilateral_cnot(RegisterNet &net, Axis basis, RegRef ca, RegRef cb, RegRef ta, RegRef tb) {
    if (basis != Axis::Z) {
        for (RegRef r : {ca, ta}) {
            net.apply({r}, to_z_frame(basis, false));
        }
        for (RegRef r : {cb, tb}) {
            net.apply({r}, to_z_frame(basis, true));
        }
    }
    net.apply({ca, ta}, ops::CNOT());
    net.apply({cb, tb}, ops::CNOT());
    if (basis != Axis::Z) {
        for (RegRef r : {ca, ta}) {
            net.apply({r}, from_z_frame(basis, false));
        }
        for (RegRef r : {cb, tb}) {
            net.apply({r}, from_z_frame(basis, true));
        }
    }
}

// Measures both halves in basis L; true when the outcome parity is the one
// the Bell state (|00> + |11>)/sqrt(2) has (odd for Y, even otherwise).
bool parity_ok(RegisterNet &net, Axis basis, RegRef ta, RegRef tb) {
    int ma = net.project_traceout(ta, basis);
    int mb = net.project_traceout(tb, basis);
    return (ma == mb) == (basis != Axis::Y);
}

}  // namespace

Bits local_entanglement_swap(RegisterNet &net, RegRef a, RegRef b) {
    if (a.node != b.node) {
        throw Error("not-adjacent", "swap slots must belong to one register");
    }
    for (RegRef r : {a, b}) {
        if (net.slot(r).empty()) {
            throw Error("slot-empty", r.str());
        }
    }
    net.apply({a, b}, ops::CNOT());
    net.apply({a}, ops::H());
    Bits bits;
    bits.x = outcome_bit(net.project_traceout(b, Axis::Z));
    bits.z = outcome_bit(net.project_traceout(a, Axis::Z));
    return bits;
}

Bits fusion(RegisterNet &net, std::size_t local, std::size_t remote, std::size_t comm_slot, std::size_t storage_slot) {
    RegRef lc{local, comm_slot};
    RegRef rc{remote, comm_slot};
    RegRef ls{local, storage_slot};
    RegRef rs{remote, storage_slot};
    if (!net.same_state(lc, rc)) {
        throw Error("missing-pair", "no shared pair in comm slots of nodes " + std::to_string(local) + " and " +
                                        std::to_string(remote));
    }
    for (RegRef r : {ls, rs}) {
        if (net.slot(r).empty()) {
            throw Error("slot-empty", r.str());
        }
    }
    Bits bits;
    net.apply({ls, lc}, ops::CZ());
    bits.x = outcome_bit(net.project_traceout(lc, Axis::X));
    if (bits.x) {
        net.apply({rc}, ops::X());
    }
    net.apply({rs, rc}, ops::CZ());
    bits.z = outcome_bit(net.project_traceout(rc, Axis::X));
    if (bits.z) {
        net.apply({ls}, ops::Z());
    }
    return bits;
}

bool bilateral_check(RegisterNet &net, Axis basis, RegRef ca, RegRef cb, RegRef ta, RegRef tb) {
    bilateral_cnot(net, basis, ca, cb, ta, tb);
    return parity_ok(net, basis, ta, tb);
}

bool purify2to1(RegisterNet &net, RegRef keep_a, RegRef keep_b, RegRef sac_a, RegRef sac_b) {
    require_pair_layout(net, keep_a, keep_b, sac_a, sac_b);
    bool ok = bilateral_check(net, Axis::Z, keep_a, keep_b, sac_a, sac_b);
    if (!ok) {
        net.traceout(keep_a);
        net.traceout(keep_b);
    }
    return ok;
}

bool purify3to1(RegisterNet &net, Axis lo1, Axis lo2, RegRef keep_a, RegRef keep_b, RegRef sac1_a, RegRef sac1_b,
                RegRef sac2_a, RegRef sac2_b) {
    if (lo1 == lo2) {
        throw Error("invalid-leaveout", "the two leave-out axes must differ");
    }
    require_pair_layout(net, keep_a, keep_b, sac1_a, sac1_b);
    require_pair_layout(net, keep_a, keep_b, sac2_a, sac2_b);

    // First pair checks the kept pair; second pair checks the first.
    bilateral_cnot(net, lo1, keep_a, keep_b, sac1_a, sac1_b);
    bool second = bilateral_check(net, lo2, sac1_a, sac1_b, sac2_a, sac2_b);
    bool first = parity_ok(net, lo1, sac1_a, sac1_b);
    bool ok = first && second;
    if (!ok) {
        for (RegRef r : {keep_a, keep_b, sac1_a, sac1_b, sac2_a, sac2_b}) {
            net.traceout(r);
        }
    }
    return ok;
}

}  // namespace qnet
