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

#ifndef QNET_REGISTERS_HPP
#define QNET_REGISTERS_HPP

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qnet/backend.hpp"
#include "qnet/engine.hpp"
#include "qnet/metrics.hpp"
#include "qnet/tags.hpp"

namespace qnet {

/// Address of one slot: (node, slot), both 0-based.
struct RegRef {
    std::size_t node = 0;
    std::size_t slot = 0;
    auto operator<=>(const RegRef &) const = default;
    std::string str() const;
};

/// Memory noise of an idle slot, applied lazily over elapsed time.
struct NoiseProcess {
    enum class Kind { none, t1, t2, depolarization };
    Kind kind = Kind::none;
    /// t1, t2 or tau in seconds.
    double time = 0;

    static NoiseProcess none() {
        return {};
    }
    static NoiseProcess t1_decay(double t1);
    static NoiseProcess t2_dephasing(double t2);
    static NoiseProcess depolarization(double tau);

    /// Channel for an idle period of `dt`, or nothing if noiseless.
    std::optional<SymChannel> channel(double dt) const;
    std::string str() const;
    bool operator==(const NoiseProcess &) const = default;
};

/// A jointly stored group of subsystems and the slots holding them.
struct StateRef {
    std::unique_ptr<BackendState> state;
    std::vector<RegRef> members;
};

struct Slot {
    Slot(TagSpace &space, std::shared_ptr<Signal> signal) : tags(space, std::move(signal)) {
    }
    int dim = 2;
    NoiseProcess noise;
    std::shared_ptr<StateRef> ref;
    std::size_t pos = 0;
    SimTime clock = 0;
    /// When the current content was initialized.
    SimTime birth = 0;
    std::shared_ptr<Lock> lock;
    Taggable tags;

    bool empty() const {
        return !ref;
    }
};

/// One match of a register-wide query.
struct SlotMatch {
    std::size_t slot;
    TagEntry entry;
};

class Register {
   public:
    Register(Engine &engine, TagSpace &space, std::size_t node, std::size_t nslots, BackendId backend);

    std::size_t node() const {
        return node_;
    }
    BackendId backend() const {
        return backend_;
    }
    std::size_t size() const {
        return slots_.size();
    }
    Slot &operator[](std::size_t i);
    const Slot &operator[](std::size_t i) const;

    /// Fires on tag changes of any slot, lock releases and slot content changes.
    const std::shared_ptr<Signal> &signal() const {
        return signal_;
    }
    Condition onchange() const {
        return Condition::changed(signal_);
    }

    /// Searches the slots in order and returns the first slot's oldest match.
    std::optional<SlotMatch> query(const QueryPattern &p) const;
    std::vector<SlotMatch> queryall(const QueryPattern &p) const;
    std::optional<SlotMatch> querydelete(const QueryPattern &p);
    Condition querywait(QueryPattern p) const;

   private:
    std::size_t node_;
    BackendId backend_;
    std::shared_ptr<Signal> signal_;
    std::vector<Slot> slots_;
};

struct RegisterSpec {
    std::size_t slots = 1;
    /// Per-slot noise; shorter than `slots` pads with the last entry (or none).
    std::vector<NoiseProcess> noise;
    std::optional<BackendId> backend;
    int dim = 2;
};

/// All registers of a network, their quantum and classical links, message
/// buffers and the metrics stream.
class RegisterNet {
   public:
    RegisterNet(Engine &engine, const std::vector<RegisterSpec> &regs, BackendId backend = BackendId::dense);
    RegisterNet(const RegisterNet &) = delete;
    RegisterNet &operator=(const RegisterNet &) = delete;

    Engine &engine() {
        return *engine_;
    }
    std::size_t size() const {
        return regs_.size();
    }
    Register &operator[](std::size_t node);
    const Register &operator[](std::size_t node) const;
    Slot &slot(RegRef r);
    const Slot &slot(RegRef r) const;
    TagSpace &tagspace() {
        return tagspace_;
    }

    // Topology.
    void add_quantum_edge(std::size_t u, std::size_t v);
    bool adjacent(std::size_t u, std::size_t v) const;
    std::vector<std::size_t> quantum_neighbors(std::size_t u) const;
    const std::map<std::pair<std::size_t, std::size_t>, double> &quantum_edges() const {
        return qedges_;
    }
    void add_classical_edge(std::size_t u, std::size_t v, double latency);
    /// Copies every quantum edge into the classical graph with `latency`.
    void mirror_classical(double latency);
    const std::map<std::pair<std::size_t, std::size_t>, double> &classical_edges() const {
        return cedges_;
    }
    /// Per-hop message forwarding; when off, only direct neighbours are reachable.
    bool forwarding = true;
    /// Bumped on every topology change (routing caches key on it).
    std::uint64_t topology_version() const {
        return topo_version_;
    }

    /// Message buffer of a node. Throws "no-such-node".
    Taggable &buffer(std::size_t node);
    /// Messages sent but not yet delivered.
    std::size_t messages_in_flight = 0;

    // Quantum operations on slots.
    void initialize(const std::vector<RegRef> &slots, const SymState &s);
    void apply(const std::vector<RegRef> &slots, const SymOperator &op);
    void apply_channel(const std::vector<RegRef> &slots, const SymChannel &ch);
    /// Measures without removing the subsystem; returns 1 or 2.
    int measure(RegRef r, Axis axis);
    /// Measures, then removes the subsystem and empties the slot.
    int project_traceout(RegRef r, Axis axis);
    /// Discards the slot content and its tags. No-op on empty slots.
    void traceout(RegRef r);
    /// Lazily applies idle noise up to `t`. Throws "clock-regression".
    void uptotime(const std::vector<RegRef> &slots, SimTime t);

    /// Expectation of a Pauli string laid over `slots` (brought up to now).
    double expectation(const std::vector<RegRef> &slots, const PauliString &p);
    /// Fidelity of two slots with the Bell state (|00> + |11>)/sqrt(2).
    double pair_fidelity(RegRef a, RegRef b);
    /// Reduced density matrix of `slots`, in the given order (small sets only).
    Eigen::MatrixXcd density(const std::vector<RegRef> &slots);
    bool same_state(RegRef a, RegRef b) const;

    /// Live StateRefs in slot order.
    std::vector<std::shared_ptr<StateRef>> state_refs() const;
    std::size_t resident_bytes() const;
    std::size_t peak_dimension() const {
        return peak_dim_;
    }
    /// Every occupied slot appears exactly once in its StateRef at the
    /// recorded position. Throws InvariantViolation otherwise.
    void check_invariants() const;

    /// Overrides measurement outcomes (branch enumeration). Returning nothing
    /// samples normally.
    std::function<std::optional<int>(RegRef, Axis)> outcome_hook;
    /// Product of the probabilities of every measurement outcome so far.
    double branch_probability = 1.0;
    /// Set once a non-Pauli channel was twirled on the stabilizer backend.
    bool approximated = false;

    std::vector<MetricsRecord> metrics;
    void record(MetricsRecord r);

   private:
    void require_initialized(const std::vector<RegRef> &slots, const char *what) const;
    std::shared_ptr<StateRef> merge(const std::vector<RegRef> &slots);
    void remove_member(RegRef r, bool sampled_ok);
    void note_channel_approx(bool approx, const SymChannel &ch);
    void bump_peak(const StateRef &ref);

    Engine *engine_;
    TagSpace tagspace_;
    std::vector<std::unique_ptr<Register>> regs_;
    std::vector<std::unique_ptr<Taggable>> buffers_;
    std::map<std::pair<std::size_t, std::size_t>, double> qedges_;
    std::map<std::pair<std::size_t, std::size_t>, double> cedges_;
    std::uint64_t topo_version_ = 0;
    std::size_t peak_dim_ = 0;
};

}  // namespace qnet

#endif
