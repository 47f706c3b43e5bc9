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


#include "qnet/mbqc.hpp"

#include <algorithm>

#include "qnet/messaging.hpp"
#include "qnet/zoo.hpp"

namespace qnet {

CssCode CssCode::code422() {
    CssCode c;
    c.n = 4;
    c.k = 2;
    c.d = 2;
    c.x_checks = {{1, 1, 1, 1}};
    c.z_checks = {{1, 1, 1, 1}};
    return c;
}

CssCode CssCode::identity(std::size_t n) {
    CssCode c;
    c.n = n;
    c.k = n;
    c.d = 1;
    return c;
}

namespace {

int dot(const gf2::Row &a, const gf2::Row &b) {
    int s = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); i++) {
        s ^= a[i] & b[i];
    }
    return s;
}

}  // namespace

void CssCode::validate() const {
    auto bad = [](const std::string &why) { return Error("not-css", why); };
    if (n == 0 || k > n) {
        throw bad("need 0 < k <= n");
    }
    for (const auto *rows : {&x_checks, &z_checks}) {
        for (const gf2::Row &r : *rows) {
            if (r.size() != n) {
                throw bad("check row width differs from n");
            }
        }
    }
    for (const gf2::Row &x : x_checks) {
        for (const gf2::Row &z : z_checks) {
            if (dot(x, z)) {
                throw bad("X and Z checks do not commute");
            }
        }
    }
    if (n - gf2::rank(x_checks) - gf2::rank(z_checks) != k) {
        throw bad("check ranks do not leave k logical qubits");
    }
}

namespace {

// Picks vectors of `candidates` independent modulo `base` until `count` are found.
std::vector<gf2::Row> extend_basis(std::vector<gf2::Row> base, const std::vector<gf2::Row> &candidates, std::size_t count) {
    std::vector<gf2::Row> out;
    for (const gf2::Row &c : candidates) {
        if (out.size() == count) {
            break;
        }
        if (!gf2::in_rowspace(base, c)) {
            base.push_back(c);
            out.push_back(c);
        }
    }
    if (out.size() != count) {
        throw Error("not-css", "could not find a full set of logical operators");
    }
    return out;
}

void conj_h(PauliString &p, std::size_t q) {
    std::swap(p.xs[q], p.zs[q]);
    if (p.xs[q] && p.zs[q]) {
        p.phase = (p.phase + 2) % 4;
    }
}

void conj_s(PauliString &p, std::size_t q) {
    if (p.xs[q]) {
        if (p.zs[q]) {
            p.phase = (p.phase + 2) % 4;
        }
        p.zs[q] ^= 1;
    }
}

void conj_z(PauliString &p, std::size_t q) {
    if (p.xs[q]) {
        p.phase = (p.phase + 2) % 4;
    }
}

// Gauss-Jordan on the X columns using generator products. Returns the X rank;
// pivot rows come first.
std::size_t reduce_x(std::vector<PauliString> &g) {
    std::size_t r = 0;
    std::size_t cols = g.empty() ? 0 : g[0].size();
    for (std::size_t c = 0; c < cols && r < g.size(); c++) {
        std::size_t i = r;
        while (i < g.size() && !g[i].xs[c]) {
            i++;
        }
        if (i == g.size()) {
            continue;
        }
        std::swap(g[r], g[i]);
        for (std::size_t j = 0; j < g.size(); j++) {
            if (j != r && g[j].xs[c]) {
                g[j] *= g[r];
            }
        }
        r++;
    }
    return r;
}

}  // namespace

void graph_form(const std::vector<PauliString> &generators, std::vector<std::pair<std::size_t, std::size_t>> &edges,
                std::vector<std::vector<Gate>> &fixups) {
    std::vector<PauliString> g = generators;
    std::size_t n = g.size();
    std::vector<bool> had(n, false), phase(n, false), flip(n, false);
    auto all = [&g](void (*fn)(PauliString &, std::size_t), std::size_t q) {
        for (PauliString &p : g) {
            fn(p, q);
        }
    };

    // Hadamards until the X block has full rank.
    for (std::size_t rank = reduce_x(g); rank < n;) {
        const PauliString row = g[rank];
        bool grew = false;
        for (std::size_t q = 0; q < n && !grew; q++) {
            if (!row.zs[q]) {
                continue;
            }
            all(conj_h, q);
            std::size_t next = reduce_x(g);
            if (next > rank) {
                had[q] = !had[q];
                rank = next;
                grew = true;
            } else {
                all(conj_h, q);
                reduce_x(g);
            }
        }
        if (!grew) {
            throw Error("invalid-stabilizer-group", "no local Hadamard raises the X rank");
        }
    }
    // Row q is now +-X_q Z^(Gamma_q). Clear Y on the diagonal, then signs.
    for (std::size_t q = 0; q < n; q++) {
        if (g[q].zs[q]) {
            all(conj_s, q);
            phase[q] = true;
        }
    }
    for (std::size_t q = 0; q < n; q++) {
        if (g[q].phase == 2) {
            all(conj_z, q);
            flip[q] = true;
        }
    }
    edges.clear();
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = i + 1; j < n; j++) {
            if (g[i].zs[j] != g[j].zs[i]) {
                throw Error("invalid-stabilizer-group", "adjacency is not symmetric");
            }
            if (g[i].zs[j]) {
                edges.emplace_back(i, j);
            }
        }
    }
    // The gates above map the target to the graph state; the fixups undo them.
    fixups.assign(n, {});
    for (std::size_t q = 0; q < n; q++) {
        if (flip[q]) {
            fixups[q].push_back(Gate::Z);
        }
        if (phase[q]) {
            fixups[q].push_back(Gate::Sdag);
        }
        if (had[q]) {
            fixups[q].push_back(Gate::H);
        }
    }
}

ResourceSpec resource_state_spec(const CssCode &code) {
    code.validate();
    const std::size_t n = code.n;
    const std::size_t k = code.k;
    ResourceSpec spec;
    spec.vertices = n + k;
    spec.logical_x = extend_basis(code.x_checks, gf2::nullspace(code.z_checks, n), k);
    auto z_candidates = extend_basis(code.z_checks, gf2::nullspace(code.x_checks, n), k);
    // Pair the Z logicals with the X logicals: logical_x[i] . logical_z[j] = delta.
    std::vector<gf2::Row> m(k, gf2::Row(k, 0));
    for (std::size_t i = 0; i < k; i++) {
        for (std::size_t j = 0; j < k; j++) {
            m[i][j] = static_cast<std::uint8_t>(dot(spec.logical_x[i], z_candidates[j]));
        }
    }
    for (std::size_t j = 0; j < k; j++) {
        gf2::Row e(k, 0);
        e[j] = 1;
        auto c = gf2::solve(m, e, k);
        if (!c) {
            throw Error("not-css", "logical operators do not pair up");
        }
        gf2::Row h(n, 0);
        for (std::size_t l = 0; l < k; l++) {
            if ((*c)[l]) {
                for (std::size_t q = 0; q < n; q++) {
                    h[q] ^= z_candidates[l][q];
                }
            }
        }
        spec.logical_z.push_back(h);
    }

    auto word = [&](const gf2::Row &support, char p, std::optional<std::size_t> extra) {
        PauliString s(n + k);
        for (std::size_t q = 0; q < n; q++) {
            if (support[q]) {
                s.set(q, p);
            }
        }
        if (extra) {
            s.set(n + *extra, p);
        }
        return s;
    };
    for (const gf2::Row &r : code.x_checks) {
        if (std::find(r.begin(), r.end(), 1) != r.end()) {
            spec.target.push_back(word(r, 'X', std::nullopt));
        }
    }
    for (const gf2::Row &r : code.z_checks) {
        if (std::find(r.begin(), r.end(), 1) != r.end()) {
            spec.target.push_back(word(r, 'Z', std::nullopt));
        }
    }
    for (std::size_t j = 0; j < k; j++) {
        spec.target.push_back(word(spec.logical_x[j], 'X', j));
        spec.target.push_back(word(spec.logical_z[j], 'Z', j));
    }
    // Dependent check rows would leave fewer than n + k independent generators.
    if (spec.target.size() != n + k) {
        std::vector<gf2::Row> rows;
        for (const PauliString &p : spec.target) {
            gf2::Row r(p.xs);
            r.insert(r.end(), p.zs.begin(), p.zs.end());
            rows.push_back(r);
        }
        std::vector<PauliString> independent;
        std::vector<gf2::Row> kept;
        for (std::size_t i = 0; i < rows.size(); i++) {
            if (!gf2::in_rowspace(kept, rows[i])) {
                kept.push_back(rows[i]);
                independent.push_back(spec.target[i]);
            }
        }
        spec.target = independent;
    }
    graph_form(spec.target, spec.edges, spec.fixups);
    return spec;
}

MbqcConfig mbqc_layout(const CssCode &code) {
    MbqcConfig cfg;
    cfg.code = code;
    std::size_t per_side = code.n + code.k;
    for (std::size_t v = 0; v < per_side; v++) {
        cfg.alice.push_back(v);
        cfg.bob.push_back(per_side + v);
    }
    return cfg;
}

std::unique_ptr<RegisterNet> mbqc_network(Engine &engine, const MbqcConfig &cfg, const ResourceSpec &spec,
                                          BackendId backend, double latency) {
    std::size_t nodes = 0;
    for (const auto *side : {&cfg.alice, &cfg.bob}) {
        if (side->size() != spec.vertices) {
            throw Error("invalid-config", "each side needs n + k nodes");
        }
        nodes = std::max(nodes, *std::max_element(side->begin(), side->end()) + 1);
    }
    RegisterSpec rs;
    rs.slots = std::max(cfg.comm_slot, cfg.storage_slot) + 1;
    auto net = std::make_unique<RegisterNet>(engine, std::vector<RegisterSpec>(nodes, rs), backend);
    for (const auto *side : {&cfg.alice, &cfg.bob}) {
        for (auto [a, b] : spec.edges) {
            net->add_quantum_edge((*side)[a], (*side)[b]);
        }
    }
    for (std::size_t i = 0; i < cfg.code.n; i++) {
        net->add_quantum_edge(cfg.alice[i], cfg.bob[i]);
    }
    net->mirror_classical(latency);
    return net;
}

Process purifier_bell_measurements(RegisterNet &net, MbqcConfig cfg, bool bob_side) {
    const auto &side = bob_side ? cfg.bob : cfg.alice;
    const auto &other = bob_side ? cfg.alice : cfg.bob;
    std::int64_t xx = 0;
    std::int64_t zz = 0;
    for (std::size_t i = 0; i < cfg.code.n; i++) {
        RegRef comm{side[i], cfg.comm_slot};
        RegRef store{side[i], cfg.storage_slot};
        if (net.slot(comm).empty() || net.slot(store).empty()) {
            throw Error("slot-empty", comm.str() + " / " + store.str());
        }
        net.apply({comm, store}, ops::CNOT());
        net.apply({comm}, ops::H());
        xx |= static_cast<std::int64_t>(outcome_bit(net.project_traceout(comm, Axis::Z))) << i;
        zz |= static_cast<std::int64_t>(outcome_bit(net.project_traceout(store, Axis::Z))) << i;
    }
    Tag result(vocab::PurifierResults, {cfg.uuid, side[0], xx, zz});
    net.slot({side[0], cfg.storage_slot}).tags.tag(result);
    put(net, other[0], result, side[0]);
    co_return {};
}

namespace {

gf2::Row bits_of(std::int64_t word, std::size_t n) {
    gf2::Row r(n, 0);
    for (std::size_t i = 0; i < n; i++) {
        r[i] = static_cast<std::uint8_t>((word >> i) & 1);
    }
    return r;
}

bool all_zero(const gf2::Row &r) {
    return std::all_of(r.begin(), r.end(), [](std::uint8_t b) { return b == 0; });
}

}  // namespace

Process purification_tracker(RegisterNet &net, MbqcConfig cfg, ResourceSpec spec, bool bob_side) {
    const auto &side = bob_side ? cfg.bob : cfg.alice;
    const auto &other = bob_side ? cfg.alice : cfg.bob;
    const std::size_t n = cfg.code.n;
    const std::size_t k = cfg.code.k;
    const std::size_t chief = side[0];
    const std::size_t remote_chief = other[0];
    Slot &chief_slot = net.slot({chief, cfg.storage_slot});
    Taggable &mb = net.buffer(chief);

    std::optional<TagEntry> local;
    std::optional<TagEntry> remote;
    while (true) {
        local = chief_slot.tags.query(QueryPattern(vocab::PurifierResults, {cfg.uuid, chief, W, W}));
        if (!local) {
            co_await net[chief].onchange();
            continue;
        }
        remote = mb.query(QueryPattern(vocab::PurifierResults, {cfg.uuid, remote_chief, W, W}));
        if (!remote) {
            co_await mb.onchange();
            continue;
        }
        break;
    }
    mb.untag(remote->id);
    chief_slot.tags.untag(local->id);

    gf2::Row u = bits_of(local->tag[3] ^ remote->tag[3], n);
    gf2::Row v = bits_of(local->tag[2] ^ remote->tag[2], n);
    gf2::Row syndrome = gf2::mul(cfg.code.z_checks, u);
    gf2::Row sx = gf2::mul(cfg.code.x_checks, v);
    syndrome.insert(syndrome.end(), sx.begin(), sx.end());
    bool ok = all_zero(syndrome);

    MetricsRecord rec;
    rec.kind = "purify";
    rec.nodes = {chief, remote_chief};
    rec.uuid = cfg.uuid;
    rec.detail = ok ? "success" : "failure";
    net.record(rec);
    if (ok) {
        for (std::size_t j = 0; j < k; j++) {
            RegRef out{side[n + j], cfg.storage_slot};
            if (bob_side) {
                if (dot(spec.logical_z[j], u)) {
                    net.apply({out}, ops::X());
                }
                if (dot(spec.logical_x[j], v)) {
                    net.apply({out}, ops::Z());
                }
            }
            net.slot(out).tags.tag(Tag(vocab::PurifiedCounterpart, {other[n + j], cfg.storage_slot}));
        }
        if (bob_side) {
            for (std::size_t j = 0; j < k; j++) {
                RegRef mine{side[n + j], cfg.storage_slot};
                RegRef theirs{other[n + j], cfg.storage_slot};
                MetricsRecord pr;
                pr.kind = "pair-delivered";
                pr.nodes = {theirs.node, mine.node};
                pr.slots = {theirs.slot, mine.slot};
                pr.uuid = cfg.uuid;
                pr.detail = vocab::PurifiedCounterpart.name();
                if (!net.slot(theirs).empty() && net.same_state(theirs, mine)) {
                    pr.fidelity = net.pair_fidelity(theirs, mine);
                }
                net.record(pr);
            }
        }
    } else {
        for (std::size_t node : side) {
            net.traceout({node, cfg.storage_slot});
            net.traceout({node, cfg.comm_slot});
        }
    }
    co_return ok;
}

Process mbqc_session(RegisterNet &net, MbqcConfig cfg) {
    Engine &eng = net.engine();
    ResourceSpec spec = resource_state_spec(cfg.code);
    const std::size_t n = cfg.code.n;
    if (!cfg.input_pairs.empty() && cfg.input_pairs.size() != n) {
        throw Error("invalid-config", "need one input pair state per code qubit");
    }

    // 1) Resource state on both sides.
    std::vector<Condition> waits;
    for (const auto *side : {&cfg.alice, &cfg.bob}) {
        GraphConstructorConfig gc;
        gc.spec.vertices = *side;
        gc.spec.edges = spec.edges;
        gc.spec.comm_slot = cfg.comm_slot;
        gc.spec.storage_slot = cfg.storage_slot;
        gc.success_prob = cfg.success_prob;
        gc.attempt_duration = cfg.attempt_duration;
        waits.push_back(Condition::done(eng.spawn(graph_state_constructor(net, gc), "graph-constructor")));
    }
    co_await Condition::all_of(std::move(waits));
    for (const auto *side : {&cfg.alice, &cfg.bob}) {
        for (std::size_t v = 0; v < spec.vertices; v++) {
            for (Gate g : spec.fixups[v]) {
                net.apply({{(*side)[v], cfg.storage_slot}}, SymOperator(g));
            }
        }
    }

    // 2) Input pairs between the comm slots of matching code nodes.
    waits.clear();
    for (std::size_t i = 0; i < n; i++) {
        EntanglerConfig ec;
        ec.node_a = cfg.alice[i];
        ec.node_b = cfg.bob[i];
        ec.pairstate = cfg.input_pairs.empty() ? perfect_pair() : cfg.input_pairs[i];
        ec.choose_a = only_slot(cfg.comm_slot);
        ec.choose_b = only_slot(cfg.comm_slot);
        ec.success_prob = cfg.success_prob;
        ec.attempt_duration = cfg.attempt_duration;
        ec.rounds = 1;
        ec.tag = false;
        waits.push_back(Condition::done(eng.spawn(entangler_prot(net, ec), "input-entangler")));
    }
    co_await Condition::all_of(std::move(waits));

    // 3) Bell measurements, then syndrome exchange.
    ProcessId ta = eng.spawn(purification_tracker(net, cfg, spec, false), "purification-tracker");
    ProcessId tb = eng.spawn(purification_tracker(net, cfg, spec, true), "purification-tracker");
    eng.spawn(purifier_bell_measurements(net, cfg, false), "bell-measurements");
    eng.spawn(purifier_bell_measurements(net, cfg, true), "bell-measurements");
    Wake w = co_await (Condition::done(ta) & Condition::done(tb));
    bool ok = std::any_cast<bool>(w.children.at(0).value) && std::any_cast<bool>(w.children.at(1).value);
    co_return MbqcOutcome{ok};
}

}  // namespace qnet
