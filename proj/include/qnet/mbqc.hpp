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


#ifndef QNET_MBQC_HPP
#define QNET_MBQC_HPP

#include <cstdint>
#include <vector>

#include "qnet/engine.hpp"
#include "qnet/gf2.hpp"
#include "qnet/pauli.hpp"
#include "qnet/protocols.hpp"
#include "qnet/registers.hpp"
#include "qnet/symbolic.hpp"

namespace qnet {

/// CSS code given by binary X and Z parity checks over n qubits.
struct CssCode {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t d = 0;
    std::vector<gf2::Row> x_checks;
    std::vector<gf2::Row> z_checks;

    static CssCode code422();
    /// k = n, no checks.
    static CssCode identity(std::size_t n);
    /// Throws "not-css" when checks do not commute, rows have the wrong
    /// width or n - rank(Hx) - rank(Hz) != k.
    void validate() const;
};

/// Graph whose state equals the resource state up to local Cliffords.
struct ResourceSpec {
    /// Vertices 0..n-1 are code qubits, n..n+k-1 the outputs.
    std::size_t vertices = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    /// Per vertex, gates applied in order to the graph state to reach the
    /// resource state.
    std::vector<std::vector<Gate>> fixups;
    /// Logical operators: logical_x[j] * logical_z[i] anticommute iff i == j.
    std::vector<gf2::Row> logical_x;
    std::vector<gf2::Row> logical_z;
    /// Stabilizer generators of the resource state.
    std::vector<PauliString> target;
};

/// Resource state prod_j (|0_j> |0_{n+j}> + |1_j> |1_{n+j}>) for the code's
/// logical qubits j, and the graph plus local Cliffords that produce it.
/// Throws "not-css".
ResourceSpec resource_state_spec(const CssCode &code);

/// Converts stabilizer generators to a graph state and local Clifford
/// fixups (Gaussian elimination over GF(2)).
void graph_form(const std::vector<PauliString> &generators, std::vector<std::pair<std::size_t, std::size_t>> &edges,
                std::vector<std::vector<Gate>> &fixups);

struct MbqcConfig {
    CssCode code = CssCode::code422();
    /// n + k nodes per side; the first one is the chief.
    std::vector<std::size_t> alice;
    std::vector<std::size_t> bob;
    std::size_t comm_slot = 0;
    std::size_t storage_slot = 1;
    std::int64_t uuid = 1;
    double success_prob = 1.0;
    double attempt_duration = 1e-3;
    /// State of each of the n input pairs (alice side first); empty means
    /// perfect pairs.
    std::vector<SymState> input_pairs;
};

/// Default layout: alice = 0..n+k-1, bob = n+k..2(n+k)-1.
MbqcConfig mbqc_layout(const CssCode &code);

/// Builds a network with the quantum edges the session needs (graph edges on
/// each side, code node i of alice to code node i of bob) and mirrored
/// classical links of `latency`.
std::unique_ptr<RegisterNet> mbqc_network(Engine &engine, const MbqcConfig &cfg, const ResourceSpec &spec,
                                          BackendId backend, double latency = 1e-3);

/// Bell measurements (CNOT comm -> storage, H comm, Z on both) of every code
/// node on one side. Bit i of the words is code qubit i. Tags the chief's
/// storage slot with PurifierBellMeasurementResults(uuid, chief, xx, zz) and
/// sends the same tag to the remote chief. Throws "slot-empty".
Process purifier_bell_measurements(RegisterNet &net, MbqcConfig cfg, bool bob_side);

/// Waits for the local and remote results of session `uuid`, computes the
/// syndrome of their XOR and either applies Bob's logical fixups and tags the
/// outputs PurifiedEntanglementCounterpart, or discards every storage slot of
/// its side. Returns the success flag.
Process purification_tracker(RegisterNet &net, MbqcConfig cfg, ResourceSpec spec, bool bob_side);

struct MbqcOutcome {
    bool success = false;
};

/// Whole session: both resource states, n input pairs, Bell measurements and
/// both trackers.
Process mbqc_session(RegisterNet &net, MbqcConfig cfg);

}  // namespace qnet

#endif
