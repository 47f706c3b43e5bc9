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


#include "qnet/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include "qnet/messaging.hpp"
#include "qnet/zoo.hpp"

namespace qnet {

SlotFilter slot_range(std::size_t lo, std::size_t hi) {
    return [lo, hi](std::size_t s) { return s >= lo && s <= hi; };
}

SlotFilter only_slot(std::size_t slot) {
    return [slot](std::size_t s) { return s == slot; };
}

NodePredicate node_is(std::size_t node) {
    return [node](std::size_t n) { return n == node; };
}

NodePredicate node_below(std::size_t node) {
    return [node](std::size_t n) { return n < node; };
}

NodePredicate node_above(std::size_t node) {
    return [node](std::size_t n) { return n > node; };
}

namespace {

bool allowed(const SlotFilter &f, std::size_t slot) {
    return !f || f(slot);
}

std::optional<std::size_t> free_slot(RegisterNet &net, std::size_t node, const SlotFilter &f, bool use_locks) {
    Register &reg = net[node];
    for (std::size_t i = 0; i < reg.size(); i++) {
        if (!allowed(f, i)) {
            continue;
        }
        const Slot &s = reg[i];
        if (s.empty() && !(use_locks && s.lock->locked())) {
            return i;
        }
    }
    return std::nullopt;
}

Tag pair_tag(Symbol type, std::size_t node, std::size_t slot) {
    return Tag(type, {node, slot});
}

std::string where(std::size_t node, std::size_t slot) {
    return RegRef{node, slot}.str();
}

}  // namespace

void validate(const RegisterNet &net, const EntanglerConfig &cfg) {
    if (cfg.node_a >= net.size() || cfg.node_b >= net.size() || !net.adjacent(cfg.node_a, cfg.node_b)) {
        throw Error("not-adjacent", std::to_string(cfg.node_a) + " - " + std::to_string(cfg.node_b));
    }
    if (!(cfg.success_prob > 0 && cfg.success_prob <= 1)) {
        throw Error("invalid-probability", std::to_string(cfg.success_prob));
    }
    if (!(cfg.attempt_duration >= 0)) {
        throw Error("invalid-duration", std::to_string(cfg.attempt_duration));
    }
}

Process entangler_prot(RegisterNet &net, EntanglerConfig cfg) {
    validate(net, cfg);
    Engine &eng = net.engine();
    EntanglerResult last;
    for (std::size_t done = 0; !cfg.rounds || done < *cfg.rounds; done++) {
        std::optional<std::size_t> a;
        std::optional<std::size_t> b;
        while (true) {
            a = free_slot(net, cfg.node_a, cfg.choose_a, cfg.use_locks);
            b = free_slot(net, cfg.node_b, cfg.choose_b, cfg.use_locks);
            if (a && b) {
                break;
            }
            co_await (net[cfg.node_a].onchange() | net[cfg.node_b].onchange());
        }
        RegRef ra{cfg.node_a, *a};
        RegRef rb{cfg.node_b, *b};
        if (cfg.use_locks) {
            co_await (Condition::lock(net.slot(ra).lock) & Condition::lock(net.slot(rb).lock));
        }
        std::size_t attempts = 0;
        do {
            co_await timeout(cfg.attempt_duration);
            attempts++;
        } while (!eng.rng().bernoulli(cfg.success_prob));

        net.initialize({ra, rb}, cfg.pairstate);
        if (cfg.tag) {
            net.slot(ra).tags.tag(pair_tag(vocab::Counterpart, cfg.node_b, *b));
            net.slot(rb).tags.tag(pair_tag(vocab::Counterpart, cfg.node_a, *a));
        }
        if (eng.tracing()) {
            eng.trace("entangled", ra.str() + " " + rb.str() + " after " + std::to_string(attempts));
        }
        if (cfg.use_locks) {
            eng.release(*net.slot(ra).lock);
            eng.release(*net.slot(rb).lock);
        }
        last = {*a, *b, attempts};
    }
    co_return last;
}

namespace {

struct Candidate {
    std::size_t slot;
    std::uint64_t id;
    std::size_t remote;
    std::size_t remote_slot;
};

// Oldest counterpart entry (by tag id) on an unlocked, allowed slot whose
// remote node satisfies `side`.
std::optional<Candidate> oldest_pair(RegisterNet &net, std::size_t node, const SlotFilter &f, const NodePredicate &side) {
    Register &reg = net[node];
    std::optional<Candidate> best;
    for (std::size_t i = 0; i < reg.size(); i++) {
        const Slot &s = reg[i];
        if (!allowed(f, i) || s.empty() || s.lock->locked()) {
            continue;
        }
        for (const TagEntry &e : s.tags.queryall(QueryPattern(vocab::Counterpart, {W, W}))) {
            auto remote = static_cast<std::size_t>(e.tag[0]);
            if (side(remote) && (!best || e.id < best->id)) {
                best = Candidate{i, e.id, remote, static_cast<std::size_t>(e.tag[1])};
            }
        }
    }
    return best;
}

}  // namespace

Process swapper_prot(RegisterNet &net, SwapperConfig cfg) {
    if (!cfg.node_l || !cfg.node_h) {
        throw Error("invalid-config", "swapper needs both partner classifiers");
    }
    Engine &eng = net.engine();
    Register &reg = net[cfg.node];
    for (std::size_t done = 0; !cfg.rounds || done < *cfg.rounds;) {
        auto lo = oldest_pair(net, cfg.node, cfg.chooseslots, cfg.node_l);
        auto hi = oldest_pair(net, cfg.node, cfg.chooseslots, cfg.node_h);
        if (!lo || !hi || lo->slot == hi->slot) {
            co_await reg.onchange();
            continue;
        }
        RegRef a{cfg.node, lo->slot};
        RegRef b{cfg.node, hi->slot};
        co_await (Condition::lock(net.slot(a).lock) & Condition::lock(net.slot(b).lock));

        Bits bits = local_entanglement_swap(net, a, b);
        Slot &sa = net.slot(a);
        Slot &sb = net.slot(b);
        sa.tags.untag(lo->id);
        sb.tags.untag(hi->id);
        sa.tags.tag(Tag(vocab::History, {lo->remote, lo->remote_slot, hi->remote, hi->remote_slot, b.slot}));
        sb.tags.tag(Tag(vocab::History, {hi->remote, hi->remote_slot, lo->remote, lo->remote_slot, a.slot}));
        put(net, lo->remote,
            Tag(vocab::UpdateZ, {cfg.node, a.slot, lo->remote_slot, hi->remote, hi->remote_slot, bits.z}), cfg.node);
        put(net, hi->remote,
            Tag(vocab::UpdateX, {cfg.node, b.slot, hi->remote_slot, lo->remote, lo->remote_slot, bits.x}), cfg.node);

        MetricsRecord rec;
        rec.kind = "swap";
        rec.nodes = {cfg.node, lo->remote, hi->remote};
        rec.slots = {a.slot, b.slot};
        rec.detail = "x=" + std::to_string(bits.x) + " z=" + std::to_string(bits.z);
        net.record(rec);

        eng.release(*sa.lock);
        eng.release(*sb.lock);
        done++;
    }
    co_return {};
}

namespace {

enum class Handled { done, deferred };

Handled handle_update(RegisterNet &net, std::size_t node, const Tag &msg) {
    Engine &eng = net.engine();
    auto past = static_cast<std::size_t>(msg[0]);
    auto past_slot = static_cast<std::size_t>(msg[1]);
    auto slot = static_cast<std::size_t>(msg[2]);
    auto remote = static_cast<std::size_t>(msg[3]);
    auto remote_slot = static_cast<std::size_t>(msg[4]);
    std::int64_t bit = msg[5];
    if (slot >= net[node].size()) {
        eng.trace("drop-update", where(node, slot) + " " + msg.str());
        return Handled::done;
    }
    Slot &s = net[node][slot];

    if (auto cp = s.tags.query(QueryPattern(vocab::Counterpart, {past, past_slot}))) {
        if (s.lock->locked()) {
            return Handled::deferred;
        }
        if (bit) {
            net.apply({{node, slot}}, msg.type == vocab::UpdateX ? ops::X() : ops::Z());
        }
        s.tags.untag(cp->id);
        s.tags.tag(pair_tag(vocab::Counterpart, remote, remote_slot));
        return Handled::done;
    }
    // This slot was swapped after pairing with (past, past_slot): pass the
    // update on to the node the swap linked it to.
    if (auto h = s.tags.query(QueryPattern(vocab::History, {past, past_slot, W, W, W}))) {
        auto via = static_cast<std::size_t>(h->tag[2]);
        auto via_slot = h->tag[3];
        auto other_local = h->tag[4];
        s.tags.untag(h->id);
        s.tags.tag(Tag(vocab::History, {remote, remote_slot, via, via_slot, other_local}));
        put(net, via, Tag(msg.type, {past, past_slot, via_slot, remote, remote_slot, bit}), node);
        return Handled::done;
    }
    if (s.empty()) {
        eng.trace("drop-update", where(node, slot) + " " + msg.str());
        return Handled::done;
    }
    return Handled::deferred;
}

Handled handle_delete(RegisterNet &net, std::size_t node, const Tag &msg) {
    Engine &eng = net.engine();
    auto sender = static_cast<std::size_t>(msg[0]);
    auto sender_slot = static_cast<std::size_t>(msg[1]);
    auto slot = static_cast<std::size_t>(msg[3]);
    if (slot >= net[node].size()) {
        eng.trace("drop-delete", where(node, slot) + " " + msg.str());
        return Handled::done;
    }
    Slot &s = net[node][slot];
    if (s.tags.query(QueryPattern(vocab::Counterpart, {sender, sender_slot}))) {
        if (s.lock->locked()) {
            return Handled::deferred;
        }
        net.traceout({node, slot});
        eng.trace("deleted", where(node, slot));
        return Handled::done;
    }
    if (auto h = s.tags.query(QueryPattern(vocab::History, {sender, sender_slot, W, W, W}))) {
        auto via = static_cast<std::size_t>(h->tag[2]);
        s.tags.untag(h->id);
        put(net, via, Tag(vocab::Delete, {sender, sender_slot, via, h->tag[3]}), node);
        return Handled::done;
    }
    if (s.empty()) {
        eng.trace("drop-delete", where(node, slot) + " " + msg.str());
        return Handled::done;
    }
    return Handled::deferred;
}

}  // namespace

Process entanglement_tracker(RegisterNet &net, std::size_t node) {
    Taggable &mb = net.buffer(node);
    Register &reg = net[node];
    while (true) {
        std::vector<TagEntry> pending;
        for (const TagEntry &e : mb.entries()) {
            if (e.tag.type == vocab::UpdateX || e.tag.type == vocab::UpdateZ || e.tag.type == vocab::Delete) {
                pending.push_back(e);
            }
        }
        for (const TagEntry &e : pending) {
            Handled h = e.tag.type == vocab::Delete ? handle_delete(net, node, e.tag) : handle_update(net, node, e.tag);
            if (h == Handled::done) {
                mb.untag(e.id);
            }
        }
        co_await (mb.onchange() | reg.onchange());
    }
}

Process cutoff_prot(RegisterNet &net, CutoffConfig cfg) {
    Engine &eng = net.engine();
    Register &reg = net[cfg.node];
    while (true) {
        co_await timeout(cfg.scan_period);
        for (std::size_t i = 0; i < reg.size(); i++) {
            Slot &s = reg[i];
            if (s.empty() || s.lock->locked() || eng.now() - s.birth <= cfg.retention_time) {
                continue;
            }
            auto cp = s.tags.query(QueryPattern(vocab::Counterpart, {W, W}));
            if (!cp) {
                continue;
            }
            auto remote = static_cast<std::size_t>(cp->tag[0]);
            std::int64_t remote_slot = cp->tag[1];
            net.traceout({cfg.node, i});
            put(net, remote, Tag(vocab::Delete, {cfg.node, i, remote, remote_slot}), cfg.node);
            MetricsRecord rec;
            rec.kind = "cutoff";
            rec.nodes = {cfg.node, remote};
            rec.slots = {i, static_cast<std::size_t>(remote_slot)};
            net.record(rec);
        }
    }
}

std::optional<ProcessId> start_cutoff(RegisterNet &net, const CutoffConfig &cfg) {
    if (!(cfg.retention_time > 0) || !(cfg.scan_period > 0) || std::isinf(cfg.scan_period)) {
        throw Error("invalid-duration", "cutoff retention and scan period must be positive");
    }
    if (cfg.node >= net.size()) {
        throw Error("no-such-node", std::to_string(cfg.node));
    }
    if (std::isinf(cfg.retention_time)) {
        return std::nullopt;
    }
    return net.engine().spawn(cutoff_prot(net, cfg), "cutoff@" + std::to_string(cfg.node));
}

namespace {

struct Reciprocal {
    std::size_t slot_a;
    std::size_t slot_b;
    std::uint64_t id;
};

// Pairs between a and b whose two ends name each other, oldest first.
std::vector<Reciprocal> reciprocal_pairs(RegisterNet &net, const DistillerConfig &cfg) {
    std::vector<Reciprocal> out;
    Register &ra = net[cfg.node_a];
    Register &rb = net[cfg.node_b];
    for (std::size_t i = 0; i < ra.size(); i++) {
        const Slot &s = ra[i];
        if (!allowed(cfg.choose_a, i) || s.empty() || s.lock->locked() ||
            s.tags.query(QueryPattern(cfg.tag, {W, W}))) {
            continue;
        }
        for (const TagEntry &e : s.tags.queryall(QueryPattern(vocab::Counterpart, {cfg.node_b, W}))) {
            auto j = static_cast<std::size_t>(e.tag[1]);
            if (j >= rb.size() || !allowed(cfg.choose_b, j)) {
                continue;
            }
            const Slot &t = rb[j];
            if (t.empty() || t.lock->locked() || t.tags.query(QueryPattern(cfg.tag, {W, W})) ||
                !t.tags.query(QueryPattern(vocab::Counterpart, {cfg.node_a, i}))) {
                continue;
            }
            out.push_back({i, j, e.id});
        }
    }
    std::sort(out.begin(), out.end(), [](const Reciprocal &x, const Reciprocal &y) { return x.id < y.id; });
    return out;
}

}  // namespace

Process distiller_prot(RegisterNet &net, DistillerConfig cfg) {
    Engine &eng = net.engine();
    auto latency = classical_latency(net, cfg.node_a, cfg.node_b);
    if (!latency) {
        throw Error("no-classical-route", std::to_string(cfg.node_a) + " -> " + std::to_string(cfg.node_b));
    }
    for (std::size_t done = 0; !cfg.rounds || done < *cfg.rounds;) {
        auto pairs = reciprocal_pairs(net, cfg);
        if (pairs.size() < 2) {
            co_await (net[cfg.node_a].onchange() | net[cfg.node_b].onchange());
            continue;
        }
        RegRef ka{cfg.node_a, pairs[0].slot_a};
        RegRef kb{cfg.node_b, pairs[0].slot_b};
        RegRef sa{cfg.node_a, pairs[1].slot_a};
        RegRef sb{cfg.node_b, pairs[1].slot_b};
        std::vector<Condition> locks;
        for (RegRef r : {ka, kb, sa, sb}) {
            locks.push_back(Condition::lock(net.slot(r).lock));
        }
        co_await Condition::all_of(std::move(locks));

        bool ok = purify2to1(net, ka, kb, sa, sb);
        net.slot(sa).tags.clear();
        net.slot(sb).tags.clear();
        // Both ends learn the outcome after one classical exchange.
        co_await timeout(*latency);
        MetricsRecord rec;
        rec.kind = "purify";
        rec.nodes = {cfg.node_a, cfg.node_b};
        rec.slots = {ka.slot, kb.slot};
        rec.detail = ok ? "success" : "failure";
        if (ok) {
            net.slot(ka).tags.querydelete(QueryPattern(vocab::Counterpart, {cfg.node_b, kb.slot}));
            net.slot(kb).tags.querydelete(QueryPattern(vocab::Counterpart, {cfg.node_a, ka.slot}));
            net.slot(ka).tags.tag(pair_tag(cfg.tag, cfg.node_b, kb.slot));
            net.slot(kb).tags.tag(pair_tag(cfg.tag, cfg.node_a, ka.slot));
            rec.fidelity = net.pair_fidelity(ka, kb);
        }
        net.record(rec);
        for (RegRef r : {ka, kb, sa, sb}) {
            eng.release(*net.slot(r).lock);
        }
        done++;
    }
    co_return {};
}

namespace {

std::vector<TagEntry> counted(const RegisterNet &net, std::size_t node, const StopRequirement &req,
                              std::vector<std::size_t> &slots) {
    std::vector<TagEntry> out;
    const Register &reg = net[node];
    for (std::size_t i = 0; i < reg.size(); i++) {
        if (!allowed(req.slots, i)) {
            continue;
        }
        QueryPattern p(req.type, {req.remote ? Matcher(*req.remote) : W, W});
        for (const TagEntry &e : reg[i].tags.queryall(p)) {
            out.push_back(e);
            slots.push_back(i);
        }
    }
    return out;
}

}  // namespace

Process stop_when_prot(RegisterNet &net, StopConfig cfg) {
    Engine &eng = net.engine();
    Register &reg = net[cfg.node];
    while (true) {
        bool met = true;
        for (const StopRequirement &req : cfg.requirements) {
            std::vector<std::size_t> slots;
            if (counted(net, cfg.node, req, slots).size() < req.count) {
                met = false;
                break;
            }
        }
        if (met) {
            break;
        }
        co_await reg.onchange();
    }
    if (cfg.record) {
        for (const StopRequirement &req : cfg.requirements) {
            std::vector<std::size_t> slots;
            auto entries = counted(net, cfg.node, req, slots);
            for (std::size_t k = 0; k < entries.size(); k++) {
                RegRef here{cfg.node, slots[k]};
                RegRef there{static_cast<std::size_t>(entries[k].tag[0]), static_cast<std::size_t>(entries[k].tag[1])};
                MetricsRecord rec;
                rec.kind = "pair-delivered";
                rec.nodes = {here.node, there.node};
                rec.slots = {here.slot, there.slot};
                rec.detail = req.type.name();
                if (!net.slot(there).empty() && net.same_state(here, there)) {
                    rec.fidelity = net.pair_fidelity(here, there);
                }
                net.record(rec);
            }
        }
    }
    eng.trace("stop", "requirements met at node " + std::to_string(cfg.node));
    eng.stop();
    co_return {};
}

std::vector<std::pair<std::size_t, std::size_t>> maximum_matching(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    using Vertex = boost::graph_traits<Graph>::vertex_descriptor;
    Graph g(n);
    for (auto [u, v] : edges) {
        if (u >= n || v >= n || u == v) {
            throw Error("invalid-graph", "edge " + std::to_string(u) + " - " + std::to_string(v));
        }
        boost::add_edge(u, v, g);
    }
    std::vector<Vertex> mate(n);
    boost::edmonds_maximum_cardinality_matching(g, mate.data());
    const Vertex none = boost::graph_traits<Graph>::null_vertex();
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::vector<bool> used(n, false);
    // Report matched edges in input order and orientation.
    for (auto [u, v] : edges) {
        if (mate[u] != none && mate[u] == v && !used[u] && !used[v]) {
            used[u] = used[v] = true;
            out.emplace_back(u, v);
        }
    }
    return out;
}

std::vector<std::vector<std::pair<std::size_t, std::size_t>>> graph_rounds(
    std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>> &edges) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto [u, v] : edges) {
        if (!seen.insert({std::min(u, v), std::max(u, v)}).second) {
            throw Error("invalid-graph", "duplicate edge " + std::to_string(u) + " - " + std::to_string(v));
        }
    }
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rounds;
    auto remaining = edges;
    while (!remaining.empty()) {
        auto m = maximum_matching(n, remaining);
        std::erase_if(remaining, [&m](const auto &e) { return std::find(m.begin(), m.end(), e) != m.end(); });
        rounds.push_back(std::move(m));
    }
    return rounds;
}

Process graph_state_constructor(RegisterNet &net, GraphConstructorConfig cfg) {
    Engine &eng = net.engine();
    const GraphSpec &spec = cfg.spec;
    auto rounds = graph_rounds(spec.vertices.size(), spec.edges);

    std::vector<RegRef> slots;
    for (std::size_t n : spec.vertices) {
        slots.push_back({n, spec.comm_slot});
        slots.push_back({n, spec.storage_slot});
    }
    std::vector<Condition> locks;
    for (RegRef r : slots) {
        locks.push_back(Condition::lock(net.slot(r).lock));
    }
    co_await Condition::all_of(std::move(locks));

    for (std::size_t n : spec.vertices) {
        if (net.slot({n, spec.storage_slot}).empty()) {
            net.initialize({{n, spec.storage_slot}}, SymState::basis(Axis::X, 1));
        }
    }
    for (const auto &round : rounds) {
        std::vector<Condition> waits;
        for (auto [i, j] : round) {
            EntanglerConfig ec;
            ec.node_a = spec.vertices[i];
            ec.node_b = spec.vertices[j];
            // Fusion consumes the comm pair as a two-vertex graph state
            // (a Bell pair up to H on one side).
            ec.pairstate = parse_stabilizer("ZX XZ");
            ec.choose_a = only_slot(spec.comm_slot);
            ec.choose_b = only_slot(spec.comm_slot);
            ec.success_prob = cfg.success_prob;
            ec.attempt_duration = cfg.attempt_duration;
            ec.rounds = 1;
            ec.tag = false;
            ec.use_locks = false;
            validate(net, ec);
            ProcessId pid = eng.spawn(entangler_prot(net, ec), "entangler");
            waits.push_back(Condition::done(pid));
        }
        co_await Condition::all_of(std::move(waits));
        std::string edges;
        for (auto [i, j] : round) {
            fusion(net, spec.vertices[i], spec.vertices[j], spec.comm_slot, spec.storage_slot);
            edges += (edges.empty() ? "" : ";") + std::to_string(i) + "-" + std::to_string(j);
        }
        MetricsRecord rec;
        rec.kind = "graph-round";
        rec.nodes = spec.vertices;
        rec.detail = edges;
        net.record(rec);
    }
    for (RegRef r : slots) {
        eng.release(*net.slot(r).lock);
    }
    auto uuid = static_cast<std::int64_t>(eng.rng().next() >> 1);
    for (std::size_t v = 0; v < spec.vertices.size(); v++) {
        net.slot({spec.vertices[v], spec.storage_slot}).tags.tag(Tag(vocab::GraphStateStorage, {uuid, v}));
    }
    co_return rounds;
}

bool graph_state_holds(RegisterNet &net, const GraphSpec &spec, double tol) {
    std::size_t n = spec.vertices.size();
    std::vector<RegRef> slots;
    for (std::size_t node : spec.vertices) {
        if (net.slot({node, spec.storage_slot}).empty()) {
            return false;
        }
        slots.push_back({node, spec.storage_slot});
    }
    for (std::size_t v = 0; v < n; v++) {
        std::string word(n, 'I');
        word[v] = 'X';
        for (auto [a, b] : spec.edges) {
            if (a == v) {
                word[b] = 'Z';
            } else if (b == v) {
                word[a] = 'Z';
            }
        }
        if (std::abs(net.expectation(slots, PauliString::parse(word)) - 1.0) > tol) {
            return false;
        }
    }
    return true;
}

std::vector<std::string> unreciprocated_tags(const RegisterNet &net) {
    std::vector<std::string> out;
    for (Symbol type : {vocab::Counterpart, vocab::Distilled, vocab::PurifiedCounterpart}) {
        for (std::size_t u = 0; u < net.size(); u++) {
            for (std::size_t s = 0; s < net[u].size(); s++) {
                for (const TagEntry &e : net[u][s].tags.queryall(QueryPattern(type, {W, W}))) {
                    auto v = static_cast<std::size_t>(e.tag[0]);
                    auto t = static_cast<std::size_t>(e.tag[1]);
                    bool ok = v < net.size() && t < net[v].size() &&
                              net[v][t].tags.query(QueryPattern(type, {u, W})).has_value();
                    if (!ok) {
                        out.push_back(where(u, s) + " " + e.tag.str());
                    }
                }
            }
        }
    }
    return out;
}

}  // namespace qnet
