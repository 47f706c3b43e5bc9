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


#ifndef QNET_PROTOCOLS_HPP
#define QNET_PROTOCOLS_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnet/engine.hpp"
#include "qnet/registers.hpp"
#include "qnet/symbolic.hpp"
#include "qnet/tags.hpp"

namespace qnet {

/// Which slots of a register a protocol may use. Empty means all.
using SlotFilter = std::function<bool(std::size_t slot)>;

/// Slots lo..hi inclusive (0-based).
SlotFilter slot_range(std::size_t lo, std::size_t hi);
/// Exactly one slot.
SlotFilter only_slot(std::size_t slot);

/// Classifies remote nodes (swapper partner sides).
using NodePredicate = std::function<bool(std::size_t node)>;

NodePredicate node_is(std::size_t node);
NodePredicate node_below(std::size_t node);
NodePredicate node_above(std::size_t node);

struct EntanglerConfig {
    std::size_t node_a = 0;
    std::size_t node_b = 1;
    SymState pairstate = parse_stabilizer("ZZ XX");
    SlotFilter choose_a;
    SlotFilter choose_b;
    double success_prob = 1.0;
    double attempt_duration = 1e-3;
    /// Successful pairs to produce; nothing means run forever.
    std::optional<std::size_t> rounds;
    /// Tag both ends with EntanglementCounterpart(remote node, remote slot).
    bool tag = true;
    /// Lock the chosen slots during attempts. Callers already holding the
    /// slot locks (the graph-state constructor) turn this off.
    bool use_locks = true;
};

/// Result of one successful entangler round, also the value an entangler
/// process returns (for its last round).
struct EntanglerResult {
    std::size_t slot_a = 0;
    std::size_t slot_b = 0;
    std::size_t attempts = 0;
};

/// Throws "not-adjacent" or "invalid-probability" on a bad config.
void validate(const RegisterNet &net, const EntanglerConfig &cfg);
Process entangler_prot(RegisterNet &net, EntanglerConfig cfg);

struct SwapperConfig {
    std::size_t node = 0;
    NodePredicate node_l;
    NodePredicate node_h;
    SlotFilter chooseslots;
    std::optional<std::size_t> rounds;
};

/// Swaps the oldest pair towards node_l with the oldest towards node_h, then
/// sends EntanglementUpdateZ(z) to the low partner and EntanglementUpdateX(x)
/// to the high partner. Waits on register changes when nothing matches.
Process swapper_prot(RegisterNet &net, SwapperConfig cfg);

/// Keeps EntanglementCounterpart tags of `node` consistent with remote swaps
/// and deletions. Corrections are applied eagerly. Updates naming a partner
/// the slot does not (yet) have are left in the buffer until they match;
/// updates for empty slots without history are dropped.
Process entanglement_tracker(RegisterNet &net, std::size_t node);

struct CutoffConfig {
    std::size_t node = 0;
    double retention_time = std::numeric_limits<double>::infinity();
    double scan_period = 1.0;
};

/// Every scan period discards tagged pairs older than the retention time and
/// sends EntanglementDelete to the partner.
Process cutoff_prot(RegisterNet &net, CutoffConfig cfg);
/// Spawns the cutoff process unless the retention time is infinite (in which
/// case it could never act). Throws "invalid-duration".
std::optional<ProcessId> start_cutoff(RegisterNet &net, const CutoffConfig &cfg);

struct DistillerConfig {
    std::size_t node_a = 0;
    std::size_t node_b = 1;
    /// Marks distilled pairs; slots carrying it are never picked again.
    Symbol tag = vocab::Distilled;
    SlotFilter choose_a;
    SlotFilter choose_b;
    std::optional<std::size_t> rounds;
};

/// BBPPSW on reciprocal EntanglementCounterpart pairs between node_a and
/// node_b: keeps the oldest, sacrifices the next oldest, waits for the result
/// exchange, then retags the kept pair with `tag`(remote node, remote slot).
Process distiller_prot(RegisterNet &net, DistillerConfig cfg);

struct StopRequirement {
    Symbol type = vocab::Counterpart;
    /// Remote node named by the tag's first field; nothing accepts any.
    std::optional<std::size_t> remote;
    SlotFilter slots;
    std::size_t count = 1;
};

struct StopConfig {
    std::size_t node = 0;
    std::vector<StopRequirement> requirements;
    /// Record a pair-delivered row per counted tag before stopping.
    bool record = true;
};

/// Waits until every requirement holds at `node`, records the pairs, then
/// stops the engine.
Process stop_when_prot(RegisterNet &net, StopConfig cfg);

struct GraphSpec {
    std::vector<std::size_t> vertices;
    /// Edges as pairs of positions in `vertices`.
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t comm_slot = 0;
    std::size_t storage_slot = 1;
};

struct GraphConstructorConfig {
    GraphSpec spec;
    double success_prob = 1.0;
    double attempt_duration = 1e-3;
};

/// Maximum-cardinality matching; edges index vertices 0..n-1.
std::vector<std::pair<std::size_t, std::size_t>> maximum_matching(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges);

/// Entangling rounds the constructor will run: repeated maximum matchings of
/// the edges not yet covered.
std::vector<std::vector<std::pair<std::size_t, std::size_t>>> graph_rounds(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges);

/// Builds the graph state on the storage slots by matched entangling rounds
/// and fusions. Returns the rounds that ran (as std::any holding
/// std::vector<std::vector<std::pair<size_t, size_t>>>).
Process graph_state_constructor(RegisterNet &net, GraphConstructorConfig cfg);

/// Whether the storage slots are stabilized by X_v prod Z_neighbours for
/// every vertex (tolerance `tol`).
bool graph_state_holds(RegisterNet &net, const GraphSpec &spec, double tol = 1e-9);

/// Pair tags (EntanglementCounterpart, DistilledTag,
/// PurifiedEntanglementCounterpart) without a reciprocal tag of the same type
/// at the named slot. Meaningful at message quiescence.
std::vector<std::string> unreciprocated_tags(const RegisterNet &net);

}  // namespace qnet

#endif
