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

#include "qnet/registers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qnet/error.hpp"

namespace qnet {

namespace {

std::string ref_name(RegRef r) {
    return "n" + std::to_string(r.node) + ".s" + std::to_string(r.slot);
}

// Reorders subsystems: output subsystem i is input subsystem perm[i].
Eigen::MatrixXcd permute(const Eigen::MatrixXcd &rho, const std::vector<int> &dims, const std::vector<std::size_t> &perm) {
    const std::size_t n = dims.size();
    const Eigen::Index total = rho.rows();
    std::vector<int> new_dims(n);
    for (std::size_t i = 0; i < n; i++) {
        new_dims[i] = dims[perm[i]];
    }
    // Map each input basis index to its output index.
    std::vector<Eigen::Index> map(total);
    std::vector<int> digits(n);
    for (Eigen::Index idx = 0; idx < total; idx++) {
        Eigen::Index rem = idx;
        for (std::size_t k = n; k-- > 0;) {
            digits[k] = static_cast<int>(rem % dims[k]);
            rem /= dims[k];
        }
        Eigen::Index out = 0;
        for (std::size_t i = 0; i < n; i++) {
            out = out * new_dims[i] + digits[perm[i]];
        }
        map[idx] = out;
    }
    Eigen::MatrixXcd res(total, total);
    for (Eigen::Index r = 0; r < total; r++) {
        for (Eigen::Index c = 0; c < total; c++) {
            res(map[r], map[c]) = rho(r, c);
        }
    }
    return res;
}

void require_distinct(const std::vector<RegRef> &slots) {
    std::set<RegRef> seen(slots.begin(), slots.end());
    if (seen.size() != slots.size()) {
        throw Error("arity-mismatch", "a slot is listed twice");
    }
}

}  // namespace

std::string RegRef::str() const {
    return ref_name(*this);
}

NoiseProcess NoiseProcess::t1_decay(double t1) {
    if (!(t1 > 0)) {
        throw Error("invalid-noise", "T1 must be positive");
    }
    return {Kind::t1, t1};
}

NoiseProcess NoiseProcess::t2_dephasing(double t2) {
    if (!(t2 > 0)) {
        throw Error("invalid-noise", "T2 must be positive");
    }
    return {Kind::t2, t2};
}

NoiseProcess NoiseProcess::depolarization(double tau) {
    if (!(tau > 0)) {
        throw Error("invalid-noise", "depolarization time must be positive");
    }
    return {Kind::depolarization, tau};
}

std::optional<SymChannel> NoiseProcess::channel(double dt) const {
    if (kind == Kind::none || dt <= 0) {
        return std::nullopt;
    }
    const double decay = -std::expm1(-dt / time);
    switch (kind) {
        case Kind::t1:
            return SymChannel::amplitude_damp(decay);
        case Kind::t2:
            return SymChannel::dephase(decay / 2);
        case Kind::depolarization:
            return SymChannel::depolarize(decay);
        case Kind::none:
            break;
    }
    return std::nullopt;
}

std::string NoiseProcess::str() const {
    switch (kind) {
        case Kind::t1:
            return "T1Decay(" + std::to_string(time) + ")";
        case Kind::t2:
            return "T2Dephasing(" + std::to_string(time) + ")";
        case Kind::depolarization:
            return "Depolarization(" + std::to_string(time) + ")";
        case Kind::none:
            break;
    }
    return "None";
}

Register::Register(Engine &engine, TagSpace &space, std::size_t node, std::size_t nslots, BackendId backend)
    : node_(node), backend_(backend), signal_(Signal::create(engine)) {
    slots_.reserve(nslots);
    std::weak_ptr<Signal> weak = signal_;
    for (std::size_t i = 0; i < nslots; i++) {
        Slot &s = slots_.emplace_back(space, signal_);
        s.lock = Lock::create(ref_name({node, i}));
        s.lock->on_release = [weak] {
            if (auto sig = weak.lock()) {
                sig->notify();
            }
        };
    }
}

Slot &Register::operator[](std::size_t i) {
    if (i >= slots_.size()) {
        throw Error("no-such-slot", ref_name({node_, i}));
    }
    return slots_[i];
}

const Slot &Register::operator[](std::size_t i) const {
    if (i >= slots_.size()) {
        throw Error("no-such-slot", ref_name({node_, i}));
    }
    return slots_[i];
}

std::optional<SlotMatch> Register::query(const QueryPattern &p) const {
    for (std::size_t i = 0; i < slots_.size(); i++) {
        if (auto e = slots_[i].tags.query(p)) {
            return SlotMatch{i, *e};
        }
    }
    return std::nullopt;
}

std::vector<SlotMatch> Register::queryall(const QueryPattern &p) const {
    std::vector<SlotMatch> out;
    for (std::size_t i = 0; i < slots_.size(); i++) {
        for (auto &e : slots_[i].tags.queryall(p)) {
            out.push_back(SlotMatch{i, std::move(e)});
        }
    }
    return out;
}

std::optional<SlotMatch> Register::querydelete(const QueryPattern &p) {
    for (std::size_t i = 0; i < slots_.size(); i++) {
        if (auto e = slots_[i].tags.querydelete(p)) {
            return SlotMatch{i, *e};
        }
    }
    return std::nullopt;
}

Condition Register::querywait(QueryPattern p) const {
    return Condition::query(signal_, [this, p = std::move(p)] { return query(p).has_value(); });
}

RegisterNet::RegisterNet(Engine &engine, const std::vector<RegisterSpec> &regs, BackendId backend)
    : engine_(&engine), tagspace_(engine) {
    for (std::size_t n = 0; n < regs.size(); n++) {
        const RegisterSpec &spec = regs[n];
        auto reg = std::make_unique<Register>(engine, tagspace_, n, spec.slots, spec.backend.value_or(backend));
        for (std::size_t i = 0; i < spec.slots; i++) {
            Slot &s = (*reg)[i];
            s.dim = spec.dim;
            if (!spec.noise.empty()) {
                s.noise = spec.noise[std::min(i, spec.noise.size() - 1)];
            }
        }
        regs_.push_back(std::move(reg));
        buffers_.push_back(std::make_unique<Taggable>(tagspace_, Signal::create(engine)));
    }
}

Register &RegisterNet::operator[](std::size_t node) {
    if (node >= regs_.size()) {
        throw Error("no-such-node", std::to_string(node));
    }
    return *regs_[node];
}

const Register &RegisterNet::operator[](std::size_t node) const {
    if (node >= regs_.size()) {
        throw Error("no-such-node", std::to_string(node));
    }
    return *regs_[node];
}

Slot &RegisterNet::slot(RegRef r) {
    return (*this)[r.node][r.slot];
}

const Slot &RegisterNet::slot(RegRef r) const {
    return (*this)[r.node][r.slot];
}

void RegisterNet::add_quantum_edge(std::size_t u, std::size_t v) {
    (*this)[u];
    (*this)[v];
    if (u == v) {
        throw Error("not-adjacent", "self loop on node " + std::to_string(u));
    }
    qedges_[{std::min(u, v), std::max(u, v)}] = 1.0;
    topo_version_++;
}

bool RegisterNet::adjacent(std::size_t u, std::size_t v) const {
    return qedges_.count({std::min(u, v), std::max(u, v)}) > 0;
}

std::vector<std::size_t> RegisterNet::quantum_neighbors(std::size_t u) const {
    std::vector<std::size_t> out;
    for (const auto &[e, w] : qedges_) {
        if (e.first == u) {
            out.push_back(e.second);
        } else if (e.second == u) {
            out.push_back(e.first);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

void RegisterNet::add_classical_edge(std::size_t u, std::size_t v, double latency) {
    (*this)[u];
    (*this)[v];
    if (!(latency >= 0) || !std::isfinite(latency)) {
        throw Error("invalid-latency", "classical latency must be finite and non-negative");
    }
    cedges_[{std::min(u, v), std::max(u, v)}] = latency;
    topo_version_++;
}

void RegisterNet::mirror_classical(double latency) {
    for (const auto &[e, w] : qedges_) {
        add_classical_edge(e.first, e.second, latency);
    }
}

Taggable &RegisterNet::buffer(std::size_t node) {
    if (node >= buffers_.size()) {
        throw Error("no-such-node", std::to_string(node));
    }
    return *buffers_[node];
}

void RegisterNet::require_initialized(const std::vector<RegRef> &slots, const char *what) const {
    for (RegRef r : slots) {
        if (slot(r).empty()) {
            throw Error("slot-empty", std::string(what) + " on empty slot " + ref_name(r));
        }
    }
}

void RegisterNet::bump_peak(const StateRef &ref) {
    peak_dim_ = std::max(peak_dim_, ref.state->dimension());
}

void RegisterNet::note_channel_approx(bool approx, const SymChannel &ch) {
    if (approx && !approximated) {
        approximated = true;
        engine_->trace("approximate", ch.str() + " replaced by its Pauli twirl");
    }
}

void RegisterNet::initialize(const std::vector<RegRef> &slots, const SymState &s) {
    if (slots.empty()) {
        throw Error("arity-mismatch", "initialize needs at least one slot");
    }
    require_distinct(slots);
    std::vector<int> dims = s.dims();
    if (dims.size() != slots.size()) {
        throw Error("arity-mismatch", std::to_string(dims.size()) + "-subsystem state on " +
                                          std::to_string(slots.size()) + " slots");
    }
    BackendId backend = (*this)[slots[0].node].backend();
    for (std::size_t i = 0; i < slots.size(); i++) {
        const Slot &sl = slot(slots[i]);
        if (!sl.empty()) {
            throw Error("slot-occupied", ref_name(slots[i]));
        }
        if (sl.dim != dims[i]) {
            throw Error("dim-mismatch", "slot " + ref_name(slots[i]) + " has dimension " + std::to_string(sl.dim));
        }
        if ((*this)[slots[i].node].backend() != backend) {
            throw Error("backend-mismatch", "initialize across registers with different backends");
        }
    }
    auto ref = std::make_shared<StateRef>();
    ref->state = express(s, backend, engine_->rng());
    ref->members = slots;
    for (std::size_t i = 0; i < slots.size(); i++) {
        Slot &sl = slot(slots[i]);
        sl.ref = ref;
        sl.pos = i;
        sl.clock = engine_->now();
        sl.birth = engine_->now();
    }
    bump_peak(*ref);
    std::set<std::size_t> nodes;
    for (RegRef r : slots) {
        nodes.insert(r.node);
    }
    for (std::size_t n : nodes) {
        (*this)[n].signal()->notify();
    }
}

void RegisterNet::uptotime(const std::vector<RegRef> &slots, SimTime t) {
    for (RegRef r : slots) {
        Slot &sl = slot(r);
        if (sl.empty()) {
            continue;
        }
        if (t < sl.clock) {
            throw Error("clock-regression", ref_name(r) + " is already at a later time");
        }
        if (t == sl.clock) {
            continue;
        }
        if (auto ch = sl.noise.channel(t - sl.clock)) {
            note_channel_approx(sl.ref->state->apply_channel(*ch, {sl.pos}, engine_->rng()), *ch);
        }
        sl.clock = t;
    }
}

std::shared_ptr<StateRef> RegisterNet::merge(const std::vector<RegRef> &slots) {
    std::vector<std::shared_ptr<StateRef>> refs;
    for (RegRef r : slots) {
        const auto &ref = slot(r).ref;
        if (std::find(refs.begin(), refs.end(), ref) == refs.end()) {
            refs.push_back(ref);
        }
    }
    if (refs.size() == 1) {
        return refs[0];
    }
    auto joint = std::make_shared<StateRef>();
    joint->state = refs[0]->state->clone();
    joint->members = refs[0]->members;
    for (std::size_t i = 1; i < refs.size(); i++) {
        joint->state = compose(*joint->state, *refs[i]->state);
        joint->members.insert(joint->members.end(), refs[i]->members.begin(), refs[i]->members.end());
    }
    for (std::size_t i = 0; i < joint->members.size(); i++) {
        Slot &sl = slot(joint->members[i]);
        sl.ref = joint;
        sl.pos = i;
    }
    bump_peak(*joint);
    return joint;
}

void RegisterNet::apply(const std::vector<RegRef> &slots, const SymOperator &op) {
    require_initialized(slots, "apply");
    require_distinct(slots);
    uptotime(slots, engine_->now());
    auto ref = merge(slots);
    std::vector<std::size_t> targets;
    for (RegRef r : slots) {
        targets.push_back(slot(r).pos);
    }
    ref->state->apply_unitary(op, targets);
}

void RegisterNet::apply_channel(const std::vector<RegRef> &slots, const SymChannel &ch) {
    require_initialized(slots, "apply_channel");
    require_distinct(slots);
    uptotime(slots, engine_->now());
    auto ref = merge(slots);
    std::vector<std::size_t> targets;
    for (RegRef r : slots) {
        targets.push_back(slot(r).pos);
    }
    note_channel_approx(ref->state->apply_channel(ch, targets, engine_->rng()), ch);
}

int RegisterNet::measure(RegRef r, Axis axis) {
    require_initialized({r}, "measure");
    uptotime({r}, engine_->now());
    std::optional<int> forced;
    if (outcome_hook) {
        forced = outcome_hook(r, axis);
    }
    Slot &sl = slot(r);
    auto m = sl.ref->state->measure(sl.pos, axis, engine_->rng(), forced);
    branch_probability *= m.probability;
    if (engine_->tracing()) {
        engine_->trace("measure", ref_name(r) + " " + std::string(1, axis_char(axis)) + " -> " + std::to_string(m.outcome));
    }
    return m.outcome;
}

void RegisterNet::remove_member(RegRef r, bool) {
    Slot &sl = slot(r);
    auto ref = sl.ref;
    if (ref->members.size() > 1) {
        ref->state->discard(sl.pos, engine_->rng());
        ref->members.erase(ref->members.begin() + static_cast<std::ptrdiff_t>(sl.pos));
        for (std::size_t i = sl.pos; i < ref->members.size(); i++) {
            slot(ref->members[i]).pos = i;
        }
    }
    sl.ref.reset();
    sl.pos = 0;
    (*this)[r.node].signal()->notify();
}

int RegisterNet::project_traceout(RegRef r, Axis axis) {
    int outcome = measure(r, axis);
    remove_member(r, false);
    return outcome;
}

void RegisterNet::traceout(RegRef r) {
    Slot &sl = slot(r);
    if (!sl.empty()) {
        uptotime({r}, engine_->now());
        remove_member(r, true);
    }
    sl.tags.clear();
}

double RegisterNet::expectation(const std::vector<RegRef> &slots, const PauliString &p) {
    if (p.size() != slots.size()) {
        throw Error("arity-mismatch", "Pauli word length differs from slot count");
    }
    require_initialized(slots, "expectation");
    require_distinct(slots);
    uptotime(slots, engine_->now());
    double value = p.negative() ? -1.0 : 1.0;
    std::vector<std::shared_ptr<StateRef>> seen;
    for (RegRef r : slots) {
        const auto &ref = slot(r).ref;
        if (std::find(seen.begin(), seen.end(), ref) != seen.end()) {
            continue;
        }
        seen.push_back(ref);
        std::string letters(ref->members.size(), 'I');
        for (std::size_t i = 0; i < slots.size(); i++) {
            if (slot(slots[i]).ref == ref) {
                letters[slot(slots[i]).pos] = p.at(i);
            }
        }
        value *= ref->state->expectation(letters);
    }
    return value;
}

double RegisterNet::pair_fidelity(RegRef a, RegRef b) {
    const double xx = expectation({a, b}, PauliString::parse("XX"));
    const double yy = expectation({a, b}, PauliString::parse("YY"));
    const double zz = expectation({a, b}, PauliString::parse("ZZ"));
    return (1 + xx - yy + zz) / 4;
}

Eigen::MatrixXcd RegisterNet::density(const std::vector<RegRef> &slots) {
    require_initialized(slots, "density");
    require_distinct(slots);
    uptotime(slots, engine_->now());
    std::vector<std::shared_ptr<StateRef>> refs;
    for (RegRef r : slots) {
        const auto &ref = slot(r).ref;
        if (std::find(refs.begin(), refs.end(), ref) == refs.end()) {
            refs.push_back(ref);
        }
    }
    // Reduced state of each StateRef on its listed members, in member order.
    std::optional<DenseState> joint;
    std::vector<RegRef> order;
    for (const auto &ref : refs) {
        std::vector<std::size_t> keep;
        for (RegRef r : slots) {
            if (slot(r).ref == ref) {
                keep.push_back(slot(r).pos);
            }
        }
        std::sort(keep.begin(), keep.end());
        for (std::size_t k : keep) {
            order.push_back(ref->members[k]);
        }
        DenseState full = DenseState::from_density(ref->state->dims(), ref->state->density());
        DenseState part = full.partial_trace(keep);
        joint = joint ? DenseState::compose(*joint, part) : part;
    }
    std::vector<std::size_t> perm;
    for (RegRef r : slots) {
        perm.push_back(static_cast<std::size_t>(std::find(order.begin(), order.end(), r) - order.begin()));
    }
    return permute(joint->density(), joint->dims(), perm);
}

bool RegisterNet::same_state(RegRef a, RegRef b) const {
    const Slot &sa = slot(a);
    const Slot &sb = slot(b);
    return !sa.empty() && sa.ref == sb.ref;
}

std::vector<std::shared_ptr<StateRef>> RegisterNet::state_refs() const {
    std::vector<std::shared_ptr<StateRef>> out;
    std::set<const StateRef *> seen;
    for (const auto &reg : regs_) {
        for (std::size_t i = 0; i < reg->size(); i++) {
            const auto &ref = (*reg)[i].ref;
            if (ref && seen.insert(ref.get()).second) {
                out.push_back(ref);
            }
        }
    }
    return out;
}

std::size_t RegisterNet::resident_bytes() const {
    std::size_t total = 0;
    for (const auto &ref : state_refs()) {
        total += ref->state->memory_bytes();
    }
    return total;
}

void RegisterNet::check_invariants() const {
    for (const auto &reg : regs_) {
        for (std::size_t i = 0; i < reg->size(); i++) {
            const Slot &sl = (*reg)[i];
            RegRef r{reg->node(), i};
            if (sl.empty()) {
                continue;
            }
            if (sl.pos >= sl.ref->members.size() || sl.ref->members[sl.pos] != r) {
                throw InvariantViolation("slot " + ref_name(r) + " is not at its recorded StateRef position");
            }
            if (sl.clock > engine_->now()) {
                throw InvariantViolation("slot " + ref_name(r) + " clock is ahead of the engine");
            }
        }
    }
    for (const auto &ref : state_refs()) {
        std::set<RegRef> distinct(ref->members.begin(), ref->members.end());
        if (distinct.size() != ref->members.size() || ref->state->size() != ref->members.size()) {
            throw InvariantViolation("StateRef membership does not match its backend state");
        }
        for (std::size_t i = 0; i < ref->members.size(); i++) {
            const Slot &sl = slot(ref->members[i]);
            if (sl.ref != ref || sl.pos != i) {
                throw InvariantViolation("StateRef member " + ref_name(ref->members[i]) + " does not point back");
            }
        }
    }
}

void RegisterNet::record(MetricsRecord r) {
    r.time = engine_->now();
    metrics.push_back(std::move(r));
}

}  // namespace qnet
