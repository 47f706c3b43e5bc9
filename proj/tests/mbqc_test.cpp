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

#include <array>
#include <cmath>

#include "gtest/gtest.h"
#include "qnet/tableau.hpp"

using namespace qnet;

namespace {

// Graph state from the edges, then the fixups, on a fresh tableau.
Tableau realize(const ResourceSpec &spec) {
    Tableau t(spec.vertices);
    for (std::size_t v = 0; v < spec.vertices; v++) {
        t.h(v);
    }
    for (auto [a, b] : spec.edges) {
        t.cz(a, b);
    }
    for (std::size_t v = 0; v < spec.vertices; v++) {
        for (Gate g : spec.fixups[v]) {
            switch (g) {
                case Gate::H: t.h(v); break;
                case Gate::S: t.s(v); break;
                case Gate::Sdag: t.sdag(v); break;
                case Gate::Z: t.z(v); break;
                case Gate::X: t.x(v); break;
                default: ADD_FAILURE() << "unexpected fixup " << gate_name(g);
            }
        }
    }
    return t;
}

struct SessionRun {
    bool success = false;
    std::vector<MetricsRecord> records;
    std::unique_ptr<RegisterNet> net;
    MbqcConfig cfg;
};

SessionRun run_session(Engine &eng, BackendId backend, std::vector<SymState> inputs = {}) {
    SessionRun r;
    r.cfg = mbqc_layout(CssCode::code422());
    r.cfg.input_pairs = std::move(inputs);
    ResourceSpec spec = resource_state_spec(r.cfg.code);
    r.net = mbqc_network(eng, r.cfg, spec, backend);
    ProcessId pid = eng.spawn(mbqc_session(*r.net, r.cfg), "session");
    eng.run();
    r.success = std::any_cast<MbqcOutcome>(*eng.result(pid)).success;
    r.records = r.net->metrics;
    return r;
}

std::vector<double> delivered_fidelities(const std::vector<MetricsRecord> &recs) {
    std::vector<double> out;
    for (const auto &m : recs) {
        if (m.kind == "pair-delivered") {
            out.push_back(m.fidelity.value_or(-1));
        }
    }
    return out;
}

}  // namespace

TEST(CssCode, Code422IsValid) {
    EXPECT_NO_THROW(CssCode::code422().validate());
    EXPECT_NO_THROW(CssCode::identity(3).validate());
}

TEST(CssCode, NonCommutingChecksRejected) {
    CssCode c = CssCode::code422();
    c.z_checks = {{1, 0, 0, 0}};
    c.k = 2;
    try {
        c.validate();
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), "not-css");
    }
    EXPECT_THROW(resource_state_spec(c), Error);
}

TEST(ResourceSpec, Code422GraphMatchesTarget) {
    ResourceSpec spec = resource_state_spec(CssCode::code422());
    ASSERT_EQ(spec.vertices, 6u);
    ASSERT_EQ(spec.target.size(), 6u);
    // Logical operators pair up and commute with the opposite checks.
    for (std::size_t i = 0; i < 2; i++) {
        for (std::size_t j = 0; j < 2; j++) {
            int s = 0;
            for (std::size_t q = 0; q < 4; q++) {
                s ^= spec.logical_x[i][q] & spec.logical_z[j][q];
            }
            EXPECT_EQ(s, i == j ? 1 : 0);
        }
    }
    Tableau want = Tableau::from_stabilizers(spec.target);
    EXPECT_EQ(realize(spec).canonical_stabilizers(), want.canonical_stabilizers());
}

TEST(ResourceSpec, IdentityCodeGivesDisjointPairs) {
    ResourceSpec spec = resource_state_spec(CssCode::identity(3));
    ASSERT_EQ(spec.edges.size(), 3u);
    for (auto [a, b] : spec.edges) {
        EXPECT_EQ(b, a + 3);
    }
    EXPECT_EQ(realize(spec).canonical_stabilizers(), Tableau::from_stabilizers(spec.target).canonical_stabilizers());
}

TEST(ResourceSpec, GraphFormOnRandomStateFamily) {
    // Graph states dressed with local Cliffords must come back to a graph
    // whose realization equals the input group.
    Rng rng(11);
    for (int trial = 0; trial < 40; trial++) {
        std::size_t n = 2 + rng.below(5);
        Tableau t(n);
        for (std::size_t v = 0; v < n; v++) {
            t.h(v);
        }
        for (std::size_t a = 0; a < n; a++) {
            for (std::size_t b = a + 1; b < n; b++) {
                if (rng.bernoulli(0.5)) {
                    t.cz(a, b);
                }
            }
        }
        for (std::size_t v = 0; v < n; v++) {
            switch (rng.below(4)) {
                case 0: t.h(v); break;
                case 1: t.s(v); break;
                case 2: t.z(v); break;
                default: break;
            }
        }
        ResourceSpec spec;
        spec.vertices = n;
        graph_form(t.stabilizers(), spec.edges, spec.fixups);
        EXPECT_EQ(realize(spec).canonical_stabilizers(), t.canonical_stabilizers()) << "trial " << trial;
    }
}

TEST(MbqcSession, NoiselessDeliversTwoPerfectPairs) {
    for (BackendId b : {BackendId::dense, BackendId::stabilizer}) {
        Engine eng(5);
        SessionRun r = run_session(eng, b);
        EXPECT_TRUE(r.success);
        auto f = delivered_fidelities(r.records);
        ASSERT_EQ(f.size(), 2u);
        for (double x : f) {
            EXPECT_NEAR(x, 1.0, 1e-9);
        }
        // Outputs are tagged toward each other; code nodes are empty.
        for (std::size_t j = 0; j < 2; j++) {
            auto ta = r.net->slot({r.cfg.alice[4 + j], 1}).tags.query(QueryPattern(vocab::PurifiedCounterpart, {W, W}));
            ASSERT_TRUE(ta);
            EXPECT_EQ(static_cast<std::size_t>(ta->tag[0]), r.cfg.bob[4 + j]);
        }
        for (std::size_t i = 0; i < 4; i++) {
            EXPECT_TRUE(r.net->slot({r.cfg.alice[i], 1}).empty());
            EXPECT_TRUE(r.net->slot({r.cfg.bob[i], 0}).empty());
        }
    }
}

TEST(MbqcSession, SinglePauliErrorsAreDetected) {
    // Identity, X, Y and Z on the Alice half of each input pair.
    const std::array<const char *, 4> errors = {"XX ZZ", "XX -ZZ", "-XX -ZZ", "-XX ZZ"};
    int detected = 0;
    int cases = 0;
    for (std::size_t q = 0; q < 4; q++) {
        for (const char *e : errors) {
            std::vector<SymState> inputs(4, perfect_pair());
            inputs[q] = parse_stabilizer(e);
            Engine eng(q);
            SessionRun r = run_session(eng, BackendId::dense, inputs);
            cases++;
            if (e == errors[0]) {
                EXPECT_TRUE(r.success);
                for (double f : delivered_fidelities(r.records)) {
                    EXPECT_NEAR(f, 1.0, 1e-10);
                }
                continue;
            }
            EXPECT_FALSE(r.success) << "qubit " << q << " error " << e;
            detected += r.success ? 0 : 1;
            for (std::size_t v : r.cfg.alice) {
                EXPECT_TRUE(r.net->slot({v, 1}).empty());
            }
            for (std::size_t v : r.cfg.bob) {
                EXPECT_TRUE(r.net->slot({v, 1}).empty());
            }
            EXPECT_TRUE(delivered_fidelities(r.records).empty());
        }
    }
    EXPECT_EQ(cases, 16);
    EXPECT_EQ(detected, 12);
}

TEST(MbqcSession, StabilizerErrorPassesUntouched) {
    // X on every pair is the X check: undetected and harmless.
    std::vector<SymState> inputs(4, parse_stabilizer("XX -ZZ"));
    Engine eng(2);
    SessionRun r = run_session(eng, BackendId::dense, inputs);
    EXPECT_TRUE(r.success);
    for (double f : delivered_fidelities(r.records)) {
        EXPECT_NEAR(f, 1.0, 1e-9);
    }
}

TEST(MbqcSession, WernerFailureRateMatchesEnumeration) {
    // Pair 0 is depolarized, the rest are perfect. A depolarized pair with
    // weight w carries I with prob w + (1-w)/4 and X, Y, Z with (1-w)/4 each.
    // The session succeeds iff the X part and the Z part both have even weight.
    const std::array<double, 4> weight = {0.7, 1.0, 1.0, 1.0};
    double p_fail = 0;
    for (int pattern = 0; pattern < 256; pattern++) {
        double p = 1;
        int xw = 0;
        int zw = 0;
        for (int q = 0; q < 4; q++) {
            int e = (pattern >> (2 * q)) & 3;  // 0 I, 1 X, 2 Z, 3 Y
            p *= e == 0 ? weight[q] + (1 - weight[q]) / 4 : (1 - weight[q]) / 4;
            xw += e & 1;
            zw += (e >> 1) & 1;
        }
        if (xw % 2 || zw % 2) {
            p_fail += p;
        }
    }
    const int trials = 10000;
    int failures = 0;
    for (int t = 0; t < trials; t++) {
        std::vector<SymState> inputs;
        for (double w : weight) {
            inputs.push_back(w == 1.0 ? perfect_pair() : depolarized_pair(w));
        }
        Engine eng(1000 + t);
        SessionRun r = run_session(eng, BackendId::stabilizer, inputs);
        failures += r.success ? 0 : 1;
    }
    double rate = static_cast<double>(failures) / trials;
    double sigma = std::sqrt(p_fail * (1 - p_fail) / trials);
    EXPECT_NEAR(rate, p_fail, 3 * sigma) << "expected " << p_fail;
}

TEST(MbqcSession, ConcurrentSessionsStayIsolated) {
    // Two sessions with different uuids on disjoint nodes of one network.
    Engine eng(9);
    CssCode code = CssCode::code422();
    ResourceSpec spec = resource_state_spec(code);
    MbqcConfig a = mbqc_layout(code);
    MbqcConfig b = a;
    b.uuid = 2;
    for (auto &v : b.alice) {
        v += 12;
    }
    for (auto &v : b.bob) {
        v += 12;
    }
    RegisterSpec rs;
    rs.slots = 2;
    RegisterNet net(eng, std::vector<RegisterSpec>(24, rs), BackendId::stabilizer);
    for (const MbqcConfig *c : {&a, &b}) {
        for (const auto *side : {&c->alice, &c->bob}) {
            for (auto [x, y] : spec.edges) {
                net.add_quantum_edge((*side)[x], (*side)[y]);
            }
        }
        for (std::size_t i = 0; i < 4; i++) {
            net.add_quantum_edge(c->alice[i], c->bob[i]);
        }
    }
    // Bridge the two halves so messages could in principle cross.
    net.add_quantum_edge(a.bob[0], b.alice[0]);
    net.mirror_classical(1e-3);
    ProcessId pa = eng.spawn(mbqc_session(net, a));
    ProcessId pb = eng.spawn(mbqc_session(net, b));
    eng.run();
    EXPECT_TRUE(std::any_cast<MbqcOutcome>(*eng.result(pa)).success);
    EXPECT_TRUE(std::any_cast<MbqcOutcome>(*eng.result(pb)).success);
    std::size_t delivered = 0;
    for (const auto &m : net.metrics) {
        if (m.kind == "pair-delivered") {
            delivered++;
            EXPECT_NEAR(m.fidelity.value_or(0), 1.0, 1e-9);
        }
    }
    EXPECT_EQ(delivered, 4u);
    for (std::size_t v = 0; v < 24; v++) {
        EXPECT_TRUE(net.buffer(v).entries().empty()) << "node " << v;
    }
}
