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

#include <cmath>

#include "gtest/gtest.h"
#include "qnet/error.hpp"
#include "qnet/messaging.hpp"
#include "qnet/registers.hpp"

using namespace qnet;

namespace {

std::string error_code(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    return "";
}

std::vector<RegisterSpec> uniform(std::size_t nodes, std::size_t slots, NoiseProcess noise = {}) {
    RegisterSpec spec;
    spec.slots = slots;
    spec.noise = {noise};
    return std::vector<RegisterSpec>(nodes, spec);
}

const SymState z1 = SymState::basis(Axis::Z, 1);
const SymState z2 = SymState::basis(Axis::Z, 2);
const SymState x1 = SymState::basis(Axis::X, 1);

Eigen::MatrixXcd half_identity() {
    return Eigen::MatrixXcd::Identity(2, 2) * 0.5;
}

}  // namespace

TEST(Registers, InitializeSingleAndPair) {
    Engine eng;
    RegisterNet net(eng, uniform(2, 2));
    net.initialize({{0, 1}}, x1);
    EXPECT_LT((net.density({{0, 1}}) - x1.density()).norm(), 1e-12);
    net.initialize({{0, 0}, {1, 0}}, parse_stabilizer("ZX XZ"));
    EXPECT_TRUE(net.same_state({0, 0}, {1, 0}));
    EXPECT_EQ(net.state_refs().size(), 2u);
    EXPECT_EQ(error_code([&] { net.initialize({{0, 1}}, z1); }), "slot-occupied");
    EXPECT_EQ(error_code([&] { net.initialize({{1, 1}}, perfect_pair()); }), "arity-mismatch");
    net.check_invariants();
}

TEST(Registers, ApplyComposesOnlyWhenNeeded) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 2));
    net.initialize({{0, 0}}, z1);
    net.initialize({{0, 1}}, z1);
    net.apply({{0, 0}}, ops::H());
    EXPECT_EQ(net.state_refs().size(), 2u);
    EXPECT_LT((net.density({{0, 0}}) - x1.density()).norm(), 1e-12);
    net.apply({{0, 0}, {0, 1}}, ops::CNOT());
    ASSERT_EQ(net.state_refs().size(), 1u);
    EXPECT_EQ(net.state_refs()[0]->members.size(), 2u);
    EXPECT_NEAR(net.pair_fidelity({0, 0}, {0, 1}), 1.0, 1e-12);
    EXPECT_EQ(error_code([&] { net.apply({{0, 0}}, ops::CNOT()); }), "arity-mismatch");
    net.check_invariants();
}

TEST(Registers, ApplyOnEmptySlot) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1));
    EXPECT_EQ(error_code([&] { net.apply({{0, 0}}, ops::H()); }), "slot-empty");
    EXPECT_EQ(error_code([&] { net.project_traceout({0, 0}, Axis::Z); }), "slot-empty");
}

TEST(Registers, IsolatedQubitsStayFactored) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 30));
    for (std::size_t i = 0; i < 30; i++) {
        net.initialize({{0, i}}, z1);
        net.apply({{0, i}}, ops::H());
        net.apply({{0, i}}, ops::S());
    }
    EXPECT_EQ(net.state_refs().size(), 30u);
    EXPECT_EQ(net.peak_dimension(), 2u);
    EXPECT_LT(net.resident_bytes(), std::size_t{1} << 20);
}

TEST(Registers, T1DecayClosedForm) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1, NoiseProcess::t1_decay(1.0)));
    net.initialize({{0, 0}}, z2);
    eng.run_until(1.0);
    Eigen::MatrixXcd rho = net.density({{0, 0}});
    EXPECT_NEAR(rho(1, 1).real(), std::exp(-1.0), 1e-12);
    EXPECT_NEAR(rho(1, 1).real(), 0.367879, 1e-6);
}

TEST(Registers, ZeroElapsedIsBitwiseNoop) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1, NoiseProcess::depolarization(0.3)));
    net.initialize({{0, 0}}, x1);
    Eigen::MatrixXcd before = net.density({{0, 0}});
    net.uptotime({{0, 0}}, eng.now());
    EXPECT_EQ((net.density({{0, 0}}) - before).norm(), 0.0);
}

TEST(Registers, LazyEvolutionComposesAsSemigroup) {
    for (NoiseProcess noise : {NoiseProcess::t1_decay(0.7), NoiseProcess::t2_dephasing(0.4),
                               NoiseProcess::depolarization(1.3)}) {
        Engine one_step;
        RegisterNet a(one_step, uniform(1, 1, noise));
        a.initialize({{0, 0}}, SymState::basis(Axis::Y, 2));
        one_step.run_until(0.9);
        a.uptotime({{0, 0}}, 0.9);

        Engine two_steps;
        RegisterNet b(two_steps, uniform(1, 1, noise));
        b.initialize({{0, 0}}, SymState::basis(Axis::Y, 2));
        two_steps.run_until(0.45);
        b.uptotime({{0, 0}}, 0.45);
        two_steps.run_until(0.9);
        b.uptotime({{0, 0}}, 0.9);
        EXPECT_LT((a.density({{0, 0}}) - b.density({{0, 0}})).norm(), 1e-10) << noise.str();
    }
}

TEST(Registers, ClockRegression) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1, NoiseProcess::t1_decay(1.0)));
    eng.run_until(2.0);
    net.initialize({{0, 0}}, z2);
    EXPECT_EQ(error_code([&] { net.uptotime({{0, 0}}, 1.0); }), "clock-regression");
}

TEST(Registers, ProjectTraceout) {
    Engine eng(3);
    RegisterNet net(eng, uniform(2, 1));
    net.initialize({{0, 0}}, z1);
    EXPECT_EQ(net.project_traceout({0, 0}, Axis::Z), 1);
    EXPECT_TRUE(net.slot({0, 0}).empty());
    for (int i = 0; i < 20; i++) {
        net.initialize({{0, 0}, {1, 0}}, perfect_pair());
        int a = net.project_traceout({0, 0}, Axis::Z);
        EXPECT_EQ(net.state_refs().size(), 1u);
        int b = net.project_traceout({1, 0}, Axis::Z);
        EXPECT_EQ(a, b);
        EXPECT_TRUE(net.state_refs().empty());
    }
}

TEST(Registers, Traceout) {
    Engine eng;
    RegisterNet net(eng, uniform(2, 1));
    net.traceout({0, 0});
    net.initialize({{0, 0}, {1, 0}}, perfect_pair());
    net.slot({0, 0}).tags.tag(Tag(vocab::Counterpart, {1, 0}));
    net.traceout({0, 0});
    EXPECT_TRUE(net.slot({0, 0}).tags.entries().empty());
    EXPECT_LT((net.density({{1, 0}}) - half_identity()).norm(), 1e-12);
    net.check_invariants();
}

TEST(Registers, StabilizerBackendMatchesDenseOnCliffords) {
    for (BackendId b : {BackendId::dense, BackendId::stabilizer}) {
        Engine eng(1);
        RegisterNet net(eng, uniform(2, 2), b);
        net.initialize({{0, 0}, {1, 0}}, parse_stabilizer("ZX XZ"));
        net.initialize({{0, 1}}, z1);
        net.apply({{0, 1}}, ops::H());
        net.apply({{0, 1}, {0, 0}}, ops::CZ());
        EXPECT_NEAR(net.expectation({{0, 1}, {0, 0}, {1, 0}}, PauliString::parse("XZI")), 1.0, 1e-12);
        EXPECT_NEAR(net.expectation({{0, 0}, {1, 0}}, PauliString::parse("XZ")), 0.0, 1e-12);
        EXPECT_NEAR(net.expectation({{0, 0}, {1, 0}}, PauliString::parse("ZX")), 1.0, 1e-12);
    }
}

TEST(Tags, QueryRoundTrip) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 3));
    Register &reg = net[0];
    auto id1 = reg[1].tags.tag(Tag(vocab::Counterpart, {2, 1}));
    auto id2 = reg[1].tags.tag(Tag(vocab::Counterpart, {2, 1}));
    EXPECT_NE(id1, id2);
    auto hit = reg.query(QueryPattern(vocab::Counterpart, {2, W}));
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->slot, 1u);
    EXPECT_EQ(hit->entry.id, id1);
    EXPECT_FALSE(reg.query(QueryPattern(vocab::Counterpart, {3, W})));
    EXPECT_EQ(reg.queryall(QueryPattern(vocab::Counterpart)).size(), 2u);
}

TEST(Tags, SchemaViolations) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1));
    Taggable &t = net[0][0].tags;
    EXPECT_EQ(error_code([&] { t.tag(Tag(vocab::Counterpart, {1})); }), "tag-schema-violation");
    EXPECT_EQ(error_code([&] { t.tag(Tag(vocab::Counterpart, {1, Symbol("x")})); }), "tag-schema-violation");
    Symbol custom("Custom");
    t.tag(Tag(custom, {Symbol("a"), 3}));
    EXPECT_EQ(error_code([&] { t.tag(Tag(custom, {3, 3})); }), "tag-schema-violation");
    EXPECT_EQ(error_code([&] { t.tag(Tag(Symbol("TooMany"), {1, 2, 3, 4, 5, 6, 7, 8, 9})); }), "tag-schema-violation");
}

TEST(Tags, PredicatesAndFifo) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1));
    Taggable &mb = net.buffer(0);
    EXPECT_FALSE(mb.query(QueryPattern(vocab::QDatagramSuccess)));
    EXPECT_FALSE(mb.querydelete(QueryPattern(vocab::QDatagramSuccess)));
    for (int seq = 0; seq < 5; seq++) {
        mb.tag(Tag(vocab::QDatagramSuccess, {7, seq, 0, 0}));
    }
    mb.tag(Tag(vocab::QDatagramSuccess, {8, 0, 0, 0}));
    EXPECT_EQ(mb.queryall(QueryPattern(vocab::QDatagramSuccess, {ne(7)})).size(), 1u);
    for (int seq = 0; seq < 5; seq++) {
        std::size_t before = mb.queryall(QueryPattern(vocab::QDatagramSuccess)).size();
        auto e = mb.querydelete(QueryPattern(vocab::QDatagramSuccess, {7}));
        ASSERT_TRUE(e);
        EXPECT_EQ(e->tag[1], seq);
        EXPECT_EQ(mb.queryall(QueryPattern(vocab::QDatagramSuccess)).size(), before - 1);
    }
}

namespace {

Process wait_for_swap_request(RegisterNet &net, std::size_t node, SimTime &when) {
    co_await net.buffer(node).querywait(QueryPattern(vocab::SwapRequest));
    when = net.engine().now();
    co_return {};
}

Process onchange_then_requery(RegisterNet &net, int &wakes, bool &found) {
    co_await net.buffer(0).onchange();
    wakes++;
    found = net.buffer(0).query(QueryPattern(vocab::SwapRequest)).has_value();
    co_return {};
}

Process delete_later(RegisterNet &net, SimTime at) {
    co_await timeout(at);
    net.buffer(0).querydelete(QueryPattern(vocab::SwapRequest));
    co_return {};
}

}  // namespace

TEST(Tags, QuerywaitResumesAtDelivery) {
    Engine eng;
    RegisterNet net(eng, uniform(3, 1));
    net.add_quantum_edge(0, 1);
    net.add_quantum_edge(1, 2);
    net.mirror_classical(0.25);
    SimTime when = -1;
    eng.spawn(wait_for_swap_request(net, 2, when));
    eng.run_until(1.0);
    put(net, 2, Tag(vocab::SwapRequest), 0);
    eng.run();
    EXPECT_DOUBLE_EQ(when, 1.5);
}

TEST(Tags, QuerywaitImmediateWhenPresent) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1));
    eng.run_until(3.0);
    net.buffer(0).tag(Tag(vocab::SwapRequest));
    SimTime when = -1;
    eng.spawn(wait_for_swap_request(net, 0, when));
    eng.run();
    EXPECT_DOUBLE_EQ(when, 3.0);
}

TEST(Tags, OnchangeAfterForeignDeleteIsSpurious) {
    Engine eng;
    RegisterNet net(eng, uniform(1, 1));
    net.buffer(0).tag(Tag(vocab::SwapRequest));
    eng.run();
    int wakes = 0;
    bool found = true;
    eng.spawn(onchange_then_requery(net, wakes, found));
    eng.spawn(delete_later(net, 1.0));
    eng.run();
    EXPECT_EQ(wakes, 1);
    EXPECT_FALSE(found);
}

TEST(Messaging, Latencies) {
    Engine eng;
    RegisterNet net(eng, uniform(3, 1));
    net.add_classical_edge(0, 1, 0.5);
    net.add_classical_edge(1, 2, 0.5);
    EXPECT_EQ(classical_latency(net, 0, 0), 0.0);
    EXPECT_EQ(classical_latency(net, 0, 2), 1.0);
    net.add_classical_edge(0, 2, 2.0);
    EXPECT_EQ(classical_latency(net, 0, 2), 1.0);
    net.forwarding = false;
    EXPECT_EQ(classical_latency(net, 0, 2), 2.0);
    EXPECT_EQ(error_code([&] { messagebuffer(net, 7); }), "no-such-node");
}

TEST(Messaging, DeliveryTimesAndFifo) {
    Engine eng;
    RegisterNet net(eng, uniform(4, 1));
    net.add_classical_edge(0, 1, 0.5);
    net.add_classical_edge(1, 2, 0.5);
    put(net, 0, Tag(vocab::LinkReply, {1, 0, 0}), 0);
    for (int seq = 0; seq < 4; seq++) {
        put(net, 2, Tag(vocab::LinkReply, {1, seq, 0}), 0);
    }
    EXPECT_EQ(error_code([&] { put(net, 3, Tag(vocab::SwapRequest), 0); }), "no-classical-route");
    eng.run_until(0.0);
    EXPECT_EQ(net.buffer(0).entries().size(), 1u);
    eng.run_until(0.99);
    EXPECT_TRUE(net.buffer(2).entries().empty());
    eng.run();
    ASSERT_EQ(net.buffer(2).entries().size(), 4u);
    for (int seq = 0; seq < 4; seq++) {
        EXPECT_EQ(net.buffer(2).entries()[seq].tag[1], seq);
        EXPECT_DOUBLE_EQ(net.buffer(2).entries()[seq].time, 1.0);
    }
}

TEST(Messaging, ForwardingOffRejectsMultiHop) {
    Engine eng;
    RegisterNet net(eng, uniform(3, 1));
    net.add_classical_edge(0, 1, 0.5);
    net.add_classical_edge(1, 2, 0.5);
    net.forwarding = false;
    EXPECT_EQ(error_code([&] { put(net, 2, Tag(vocab::SwapRequest), 0); }), "no-classical-route");
    put(net, 1, Tag(vocab::SwapRequest), 0);
}

TEST(Messaging, NextHopPrefersLowestIndex) {
    Engine eng;
    RegisterNet net(eng, uniform(4, 1));
    net.add_quantum_edge(0, 2);
    net.add_quantum_edge(0, 1);
    net.add_quantum_edge(1, 3);
    net.add_quantum_edge(2, 3);
    EXPECT_EQ(next_hop(net, 0, 3), 1u);
    EXPECT_EQ(next_hop(net, 3, 0), 1u);
    EXPECT_EQ(next_hop(net, 1, 3), 3u);
}
