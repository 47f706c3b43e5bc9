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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include "branches.hpp"
#include "nlohmann/json.hpp"
#include "oracle.hpp"
#include "qnet/mbqc.hpp"
#include "qnet/protocols.hpp"
#include "qnet/scenario.hpp"
#include "qnet/zoo.hpp"

using namespace qnet;
using namespace qnet::testing;
using M = Eigen::MatrixXcd;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string &why) {
        if (!cond && ok) {
            ok = false;
            detail << "first failure: " << why << "; ";
        }
    }
};

std::string scenario_path(const std::string &name) {
    return std::string(QNET_SCENARIO_DIR) + "/" + name + ".toml";
}

std::vector<const MetricsRecord *> of_kind(const std::vector<MetricsRecord> &recs, const std::string &kind) {
    std::vector<const MetricsRecord *> out;
    for (const auto &r : recs) {
        if (r.kind == kind) {
            out.push_back(&r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// 1. Backend equivalence

struct CircuitStep {
    enum Kind { h, s, sdag, x, y, z, cnot, cz, depolarize, dephase } kind;
    std::size_t a = 0;
    std::size_t b = 0;
    double p = 0;
};

std::vector<CircuitStep> random_circuit(Rng &rng, std::size_t n, std::size_t len) {
    std::vector<CircuitStep> c;
    for (std::size_t i = 0; i < len; i++) {
        CircuitStep st{};
        st.a = rng.below(n);
        st.b = (st.a + 1 + rng.below(n - 1)) % n;
        if (rng.bernoulli(0.2)) {
            st.kind = rng.bernoulli(0.5) ? CircuitStep::depolarize : CircuitStep::dephase;
            st.p = 0.02 + 0.18 * rng.uniform();
        } else {
            st.kind = static_cast<CircuitStep::Kind>(rng.below(8));
        }
        c.push_back(st);
    }
    return c;
}

// Independent dense evolution from explicit matrices and channel formulas.
M oracle_run(const std::vector<CircuitStep> &c, std::size_t n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    M rho = M::Zero(dim, dim);
    rho(0, 0) = 1;
    for (const auto &st : c) {
        switch (st.kind) {
            case CircuitStep::h: rho = oracle::conj(oracle::embed(oracle::hadamard(), st.a, n), rho); break;
            case CircuitStep::s: rho = oracle::conj(oracle::embed(oracle::phase(), st.a, n), rho); break;
            case CircuitStep::sdag:
                rho = oracle::conj(oracle::embed(oracle::phase().adjoint(), st.a, n), rho);
                break;
            case CircuitStep::x: rho = oracle::conj(oracle::embed(oracle::pauli('X'), st.a, n), rho); break;
            case CircuitStep::y: rho = oracle::conj(oracle::embed(oracle::pauli('Y'), st.a, n), rho); break;
            case CircuitStep::z: rho = oracle::conj(oracle::embed(oracle::pauli('Z'), st.a, n), rho); break;
            case CircuitStep::cnot: rho = oracle::conj(oracle::cnot(st.a, st.b, n), rho); break;
            case CircuitStep::cz: rho = oracle::conj(oracle::cz(st.a, st.b, n), rho); break;
            case CircuitStep::depolarize: {
                // (1-p) rho + p/4 sum_P P rho P
                M acc = (1 - st.p) * rho;
                for (char p : {'I', 'X', 'Y', 'Z'}) {
                    acc += st.p / 4 * oracle::conj(oracle::embed(oracle::pauli(p), st.a, n), rho);
                }
                rho = acc;
                break;
            }
            case CircuitStep::dephase:
                rho = (1 - st.p) * rho + st.p * oracle::conj(oracle::embed(oracle::pauli('Z'), st.a, n), rho);
                break;
        }
    }
    return rho;
}

void library_apply(RegisterNet &net, const CircuitStep &st) {
    RegRef a{0, st.a};
    RegRef b{0, st.b};
    switch (st.kind) {
        case CircuitStep::h: net.apply({a}, ops::H()); break;
        case CircuitStep::s: net.apply({a}, ops::S()); break;
        case CircuitStep::sdag: net.apply({a}, ops::Sdag()); break;
        case CircuitStep::x: net.apply({a}, ops::X()); break;
        case CircuitStep::y: net.apply({a}, ops::Y()); break;
        case CircuitStep::z: net.apply({a}, ops::Z()); break;
        case CircuitStep::cnot: net.apply({a, b}, ops::CNOT()); break;
        case CircuitStep::cz: net.apply({a, b}, ops::CZ()); break;
        case CircuitStep::depolarize: net.apply_channel({a}, SymChannel::depolarize(st.p)); break;
        case CircuitStep::dephase: net.apply_channel({a}, SymChannel::dephase(st.p)); break;
    }
}

std::unique_ptr<RegisterNet> fresh_register(Engine &eng, std::size_t n, BackendId backend) {
    auto net = std::make_unique<RegisterNet>(eng, uniform(1, n), backend);
    for (std::size_t q = 0; q < n; q++) {
        net->initialize({{0, q}}, SymState::basis(Axis::Z, 1));
    }
    return net;
}

void backend_equivalence(Verdict &v) {
    const std::size_t circuits = 25;
    const std::size_t trials = 10000;
    Rng rng(2026);
    double worst_z = 0;
    double slowest_dense = 0;
    std::size_t cells = 0;
    for (std::size_t c = 0; c < circuits; c++) {
        const std::size_t n = 2 + rng.below(7);
        const std::size_t len = 10 + rng.below(31);
        auto circuit = random_circuit(rng, n, len);
        const std::string tag = "circuit " + std::to_string(c) + " (n=" + std::to_string(n) + ")";

        // Dense: the library backend against the explicit-matrix oracle.
        auto t0 = Clock::now();
        Engine eng;
        auto dense = fresh_register(eng, n, BackendId::dense);
        for (const auto &st : circuit) {
            library_apply(*dense, st);
        }
        std::vector<RegRef> all;
        for (std::size_t q = 0; q < n; q++) {
            all.push_back({0, q});
        }
        M rho = dense->density(all);
        double dense_time = since(t0);
        slowest_dense = std::max(slowest_dense, dense_time);
        v.require(dense_time < 5.0, tag + " dense run took " + std::to_string(dense_time) + " s");
        v.require((rho - oracle_run(circuit, n)).norm() < 1e-10, tag + " dense state differs from the oracle");

        // Tableau trajectories.
        std::vector<std::size_t> counts(std::size_t{1} << n, 0);
        for (std::size_t t = 0; t < trials; t++) {
            Engine e(c * trials + t + 1);
            auto tab = fresh_register(e, n, BackendId::stabilizer);
            for (const auto &st : circuit) {
                library_apply(*tab, st);
            }
            std::size_t idx = 0;
            for (std::size_t q = 0; q < n; q++) {
                idx = (idx << 1) | static_cast<std::size_t>(tab->measure({0, q}, Axis::Z) - 1);
            }
            counts[idx]++;
        }
        for (std::size_t i = 0; i < counts.size(); i++) {
            double p = rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
            double freq = static_cast<double>(counts[i]) / trials;
            if (p < 1e-12) {
                v.require(counts[i] == 0, tag + " saw an outcome of probability 0");
                continue;
            }
            cells++;
            double z = std::abs(freq - p) / std::sqrt(p * (1 - p) / trials);
            worst_z = std::max(worst_z, z);
            if (z > 3) {
                std::ostringstream w;
                w << tag << " outcome " << i << ": frequency " << freq << " vs " << p << " (" << z << " sigma)";
                v.require(false, w.str());
            }
        }
    }
    v.detail << circuits << " circuits, " << cells << " outcome cells, worst deviation " << std::setprecision(3)
             << worst_z << " sigma, slowest dense run " << slowest_dense << " s";
}

// ---------------------------------------------------------------------------
// 2. Cluster square

M cluster_state(const std::vector<std::pair<std::size_t, std::size_t>> &edges, std::size_t n) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Constant(Eigen::Index{1} << n, std::pow(2.0, -0.5 * double(n)));
    M u = M::Identity(psi.size(), psi.size());
    for (auto [a, b] : edges) {
        u = oracle::cz(a, b, n) * u;
    }
    psi = u * psi;
    return psi * psi.adjoint();
}

void cluster_square(Verdict &v) {
    ScenarioConfig cfg = load_scenario(scenario_path("cluster-square"));
    const std::vector<std::pair<std::size_t, std::size_t>> cycle = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
    for (BackendId b : {BackendId::dense, BackendId::stabilizer}) {
        cfg.backend = b;
        const std::string tag = backend_name(b);
        auto t0 = Clock::now();
        bool stabilized = false;
        double dist = -1;
        RunResult res = run_scenario(cfg, false, [&](RegisterNet &net) {
            GraphSpec spec{{0, 1, 2, 3}, cycle, 0, 1};
            stabilized = graph_state_holds(net, spec, 1e-10);
            if (b == BackendId::dense) {
                dist = (net.density({{0, 1}, {1, 1}, {2, 1}, {3, 1}}) - cluster_state(cycle, 4)).norm();
            }
        });
        double elapsed = since(t0);
        v.require(stabilized, tag + ": storage state not stabilized by the 4-cycle generators");
        v.require(of_kind(res.metrics, "cluster-ok").size() == 1, tag + ": no cluster-ok record");
        if (b == BackendId::dense) {
            v.require(dist >= 0 && dist < 1e-10, tag + ": density differs from the 4-cycle cluster state");
        }
        v.require(elapsed < 1.0, tag + ": run took " + std::to_string(elapsed) + " s");
        v.detail << tag << " " << std::setprecision(3) << elapsed << " s; ";
    }
}

// ---------------------------------------------------------------------------
// 3. Repeater chain

struct ChainCheck {
    std::size_t counterpart = 0;
    std::size_t distilled = 0;
    std::vector<double> counterpart_fidelity;
    std::vector<double> distilled_fidelity;
};

ChainCheck inspect_chain(RegisterNet &net) {
    ChainCheck c;
    for (std::size_t s = 0; s < net[0].size(); s++) {
        Slot &slot = net.slot({0, s});
        if (auto e = slot.tags.query(QueryPattern(vocab::Counterpart, {std::int64_t{1}, W})); e && s < 10) {
            c.counterpart++;
            c.counterpart_fidelity.push_back(net.pair_fidelity({0, s}, {1, static_cast<std::size_t>(e->tag[1])}));
        }
        if (auto e = slot.tags.query(QueryPattern(vocab::Distilled, {std::int64_t{2}, W}))) {
            c.distilled++;
            c.distilled_fidelity.push_back(net.pair_fidelity({0, s}, {2, static_cast<std::size_t>(e->tag[1])}));
        }
    }
    return c;
}

void repeater_chain(Verdict &v) {
    ScenarioConfig cfg = load_scenario(scenario_path("repeater-chain"));
    struct Case {
        double link_fidelity;
        double want_counterpart;
        double want_distilled;
        double tol;
    };
    const double fl = 0.99;
    const std::vector<Case> cases = {
        {1.0, 1.0, 1.0, 1e-10},
        {fl, oracle::bell_fidelity(oracle::werner(fl)), oracle::purify2to1(oracle::swapped(fl, fl)).fidelity, 1e-9},
    };
    for (const Case &k : cases) {
        cfg.link.fidelity = k.link_fidelity;
        const std::string tag = "link fidelity " + std::to_string(k.link_fidelity);
        auto t0 = Clock::now();
        ChainCheck c;
        RunResult res = run_scenario(cfg, false, [&](RegisterNet &net) { c = inspect_chain(net); });
        double elapsed = since(t0);
        v.require(c.counterpart == 10, tag + ": " + std::to_string(c.counterpart) + " A-B counterpart tags");
        v.require(c.distilled == 10, tag + ": " + std::to_string(c.distilled) + " A-C distilled tags");
        double worst = 0;
        for (double f : c.counterpart_fidelity) {
            worst = std::max(worst, std::abs(f - k.want_counterpart));
        }
        for (double f : c.distilled_fidelity) {
            worst = std::max(worst, std::abs(f - k.want_distilled));
        }
        v.require(worst <= k.tol, tag + ": fidelity off by " + std::to_string(worst));
        std::size_t delivered_at_a = 0;
        for (const MetricsRecord *r : of_kind(res.metrics, "pair-delivered")) {
            delivered_at_a += !r->nodes.empty() && r->nodes[0] == 0;
        }
        v.require(delivered_at_a == 20, tag + ": " + std::to_string(delivered_at_a) + " pair-delivered records at A");
        v.require(elapsed < 30.0, tag + ": run took " + std::to_string(elapsed) + " s");
        v.detail << tag.substr(0, 18) << ": worst |dF| " << std::setprecision(2) << worst << ", " << elapsed
                 << " s; ";
    }
}

// ---------------------------------------------------------------------------
// 4. Purification oracles

void purification(Verdict &v) {
    const std::vector<double> grid = {0.6, 0.7, 0.8, 0.9, 0.95};
    double worst = 0;
    auto compare = [&](const BranchSum &got, const oracle::Heralded &want, double f, const std::string &name) {
        double d = std::max(std::abs(got.probability - want.probability), std::abs(got.fidelity - want.fidelity));
        worst = std::max(worst, d);
        std::ostringstream tag;
        tag << name << " at F=" << f;
        v.require(d <= 1e-10, tag.str() + " differs from the density-matrix oracle");
        v.require(got.fidelity > oracle::bell_fidelity(oracle::werner(f)), tag.str() + " does not raise fidelity");
    };
    for (double f : grid) {
        auto two = enumerate_branches(
            2, 2, 2, {0, 0}, {1, 0},
            [f](RegisterNet &net) {
                net.initialize({{0, 0}, {1, 0}}, depolarized_pair(f));
                net.initialize({{0, 1}, {1, 1}}, depolarized_pair(f));
            },
            [](RegisterNet &net) { return purify2to1(net, {0, 0}, {1, 0}, {0, 1}, {1, 1}); });
        compare(two, oracle::purify2to1(f), f, "purify2to1");
        const std::vector<std::pair<Axis, Axis>> leaveouts = {
            {Axis::Z, Axis::Y}, {Axis::X, Axis::Z}, {Axis::Y, Axis::X}};
        for (auto [lo1, lo2] : leaveouts) {
            auto three = enumerate_branches(
                2, 3, 4, {0, 0}, {1, 0},
                [f](RegisterNet &net) {
                    for (std::size_t s = 0; s < 3; s++) {
                        net.initialize({{0, s}, {1, s}}, depolarized_pair(f));
                    }
                },
                [lo1, lo2](RegisterNet &net) {
                    return purify3to1(net, lo1, lo2, {0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2});
                });
            auto axis = [](Axis a) { return a == Axis::X ? 'X' : a == Axis::Y ? 'Y' : 'Z'; };
            compare(three, oracle::purify3to1(f, axis(lo1), axis(lo2)), f,
                    std::string("purify3to1 ") + axis(lo1) + axis(lo2));
        }
    }
    v.detail << "5 fidelities x 4 circuits, worst deviation " << std::setprecision(2) << worst;
}

// ---------------------------------------------------------------------------
// 5. Lazy noise

struct IdleModel {
    NoiseProcess::Kind kind;
    double time;
};

// Eager idle evolution of qubit q for dt, written from the physical model.
M idle(const M &rho, const IdleModel &m, std::size_t q, std::size_t n, double dt) {
    const double keep = std::exp(-dt / m.time);
    switch (m.kind) {
        case NoiseProcess::Kind::t1: {
            M k0 = M::Zero(2, 2);
            M k1 = M::Zero(2, 2);
            k0(0, 0) = 1;
            k0(1, 1) = std::sqrt(keep);
            k1(0, 1) = std::sqrt(1 - keep);
            return oracle::conj(oracle::embed(k0, q, n), rho) + oracle::conj(oracle::embed(k1, q, n), rho);
        }
        case NoiseProcess::Kind::t2: {
            // Coherences decay by exp(-dt/T2).
            M z = oracle::embed(oracle::pauli('Z'), q, n);
            return (1 + keep) / 2 * rho + (1 - keep) / 2 * oracle::conj(z, rho);
        }
        case NoiseProcess::Kind::depolarization: {
            M acc = keep * rho;
            for (char p : {'I', 'X', 'Y', 'Z'}) {
                acc += (1 - keep) / 4 * oracle::conj(oracle::embed(oracle::pauli(p), q, n), rho);
            }
            return acc;
        }
        case NoiseProcess::Kind::none:
            break;
    }
    return rho;
}

double trace_distance(const M &a, const M &b) {
    Eigen::SelfAdjointEigenSolver<M> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

M t_gate() {
    M t = M::Identity(2, 2);
    t(1, 1) = std::polar(1.0, M_PI / 4);
    return t;
}

void lazy_noise(Verdict &v) {
    Rng rng(99);
    double worst = 0;
    const std::size_t n = 3;
    for (int trial = 0; trial < 100; trial++) {
        std::vector<IdleModel> models;
        std::vector<NoiseProcess> noise;
        for (std::size_t q = 0; q < n; q++) {
            double time = 0.5 + 2.5 * rng.uniform();
            switch (rng.below(3)) {
                case 0:
                    models.push_back({NoiseProcess::Kind::t1, time});
                    noise.push_back(NoiseProcess::t1_decay(time));
                    break;
                case 1:
                    models.push_back({NoiseProcess::Kind::t2, time});
                    noise.push_back(NoiseProcess::t2_dephasing(time));
                    break;
                default:
                    models.push_back({NoiseProcess::Kind::depolarization, time});
                    noise.push_back(NoiseProcess::depolarization(time));
                    break;
            }
        }
        RegisterSpec spec;
        spec.slots = n;
        spec.noise = noise;
        Engine eng;
        RegisterNet net(eng, {spec}, BackendId::dense);

        // Initial product state of axis eigenstates.
        M rho = M::Ones(1, 1);
        for (std::size_t q = 0; q < n; q++) {
            Axis axis = static_cast<Axis>(rng.below(3));
            int index = 1 + static_cast<int>(rng.below(2));
            SymState s = SymState::basis(axis, index);
            net.initialize({{0, q}}, s);
            M p = (M::Identity(2, 2) + (index == 1 ? 1.0 : -1.0) *
                                          oracle::pauli(axis == Axis::X ? 'X' : axis == Axis::Y ? 'Y' : 'Z')) /
                  2.0;
            rho = oracle::kron(rho, p);
        }
        double t = 0;
        const std::size_t steps = 8 + rng.below(8);
        for (std::size_t k = 0; k < steps; k++) {
            double dt = 0.5 * rng.uniform();
            t += dt;
            for (std::size_t q = 0; q < n; q++) {
                rho = idle(rho, models[q], q, n, dt);
            }
            eng.run_until(t);
            std::size_t a = rng.below(n);
            std::size_t b = (a + 1 + rng.below(n - 1)) % n;
            switch (rng.below(5)) {
                case 0:
                    net.apply({{0, a}}, ops::H());
                    rho = oracle::conj(oracle::embed(oracle::hadamard(), a, n), rho);
                    break;
                case 1:
                    net.apply({{0, a}}, ops::T());
                    rho = oracle::conj(oracle::embed(t_gate(), a, n), rho);
                    break;
                case 2:
                    net.apply({{0, a}}, ops::S());
                    rho = oracle::conj(oracle::embed(oracle::phase(), a, n), rho);
                    break;
                case 3:
                    net.apply({{0, a}, {0, b}}, ops::CNOT());
                    rho = oracle::conj(oracle::cnot(a, b, n), rho);
                    break;
                default:
                    // Idle step: nothing touches the register.
                    break;
            }
        }
        double dt = rng.uniform();
        t += dt;
        for (std::size_t q = 0; q < n; q++) {
            rho = idle(rho, models[q], q, n, dt);
        }
        eng.run_until(t);
        M lazy = net.density({{0, 0}, {0, 1}, {0, 2}});
        double d = trace_distance(lazy, rho);
        worst = std::max(worst, d);
        v.require(d < 1e-9, "schedule " + std::to_string(trial) + " trace distance " + std::to_string(d));
    }

    // T1 spot check.
    const double t1 = 1.3;
    const double dt = 0.8;
    RegisterSpec spec;
    spec.slots = 1;
    spec.noise = {NoiseProcess::t1_decay(t1)};
    Engine eng;
    RegisterNet net(eng, {spec}, BackendId::dense);
    net.initialize({{0, 0}}, SymState::basis(Axis::Z, 2));
    eng.run_until(dt);
    double p1 = net.density({{0, 0}})(1, 1).real();
    v.require(std::abs(p1 - std::exp(-dt / t1)) <= 1e-9, "T1 population " + std::to_string(p1));
    v.detail << "100 schedules, worst trace distance " << std::setprecision(2) << worst << "; T1 |dp| "
             << std::abs(p1 - std::exp(-dt / t1));
}

// ---------------------------------------------------------------------------
// 6. qTCP

void qtcp(Verdict &v) {
    ScenarioConfig cfg = load_scenario(scenario_path("qtcp-line"));
    auto t0 = Clock::now();
    RunResult res;
    try {
        res = run_scenario(cfg, true);
    } catch (const InvariantViolation &e) {
        v.require(false, e.what());
        return;
    }
    double elapsed = since(t0);
    std::size_t window = std::get<QtcpSpec>(cfg.protocols.at(0)).window;
    std::istringstream trace(res.trace);
    std::string line;
    std::size_t inflight_events = 0;
    std::size_t max_in_flight = 0;
    const std::regex re("in_flight=([0-9]+) window=([0-9]+)");
    while (std::getline(trace, line)) {
        auto j = nlohmann::json::parse(line);
        if (j["kind"] != "inflight") {
            continue;
        }
        std::smatch m;
        std::string detail = j["detail"];
        if (std::regex_search(detail, m, re)) {
            inflight_events++;
            std::size_t in_flight = std::stoul(m[1]);
            max_in_flight = std::max(max_in_flight, in_flight);
            v.require(in_flight <= std::stoul(m[2]) && in_flight <= window, "window exceeded: " + detail);
        }
    }
    v.require(inflight_events > 0, "no window trace events");
    auto acks = of_kind(res.metrics, "datagram-success");
    v.require(acks.size() == 40, std::to_string(acks.size()) + " QDatagramSuccess records");
    auto delivered = of_kind(res.metrics, "pair-delivered");
    v.require(delivered.size() == 40, std::to_string(delivered.size()) + " delivered pairs");
    for (const MetricsRecord *r : delivered) {
        v.require(r->fidelity && std::abs(*r->fidelity - 1.0) <= 1e-10, "delivered pair fidelity below 1");
    }
    v.require(elapsed < 60.0, "line run took " + std::to_string(elapsed) + " s");

    // Latency: one flow, window 1, so each datagram crosses the line alone.
    // Each hop waits for a geometric number of attempts of duration d, then
    // one classical latency L while the datagram moves on; the acknowledgment
    // returns over the same hops. E[latency] = hops (d/p + L) + hops L with
    // variance hops d^2 (1-p)/p^2.
    const std::size_t hops = 4;
    const std::size_t datagrams = 1000;
    const double p = 0.5;
    const double d = 1e-3;
    const double latency = 1e-3;
    ScenarioConfig lat = cfg;
    lat.backend = BackendId::stabilizer;
    lat.link.success_prob = p;
    lat.link.attempt_duration = d;
    lat.mirror_latency = latency;
    std::get<QtcpSpec>(lat.protocols.at(0)).window = 1;
    lat.flows = {Flow{0, 4, datagrams, 1}};
    RunResult lr = run_scenario(lat);
    double sum = 0;
    auto lacks = of_kind(lr.metrics, "datagram-success");
    for (const MetricsRecord *r : lacks) {
        sum += r->latency.value_or(0);
    }
    double mean = sum / static_cast<double>(lacks.size());
    double expect = hops * (d / p + latency) + hops * latency;
    double sigma = std::sqrt(hops * d * d * (1 - p) / (p * p) / static_cast<double>(datagrams));
    v.require(lacks.size() == datagrams, std::to_string(lacks.size()) + " latency samples");
    v.require(std::abs(mean - expect) <= 3 * sigma, "mean latency " + std::to_string(mean) + " vs " +
                                                        std::to_string(expect) + " (sigma " +
                                                        std::to_string(sigma) + ")");
    v.detail << "max in flight " << max_in_flight << "/" << window << ", " << acks.size() << " acks, "
             << std::setprecision(3) << elapsed << " s; mean latency " << std::setprecision(6) << mean
             << " vs analytic " << expect << " (" << std::setprecision(2) << std::abs(mean - expect) / sigma
             << " sigma)";
}

// ---------------------------------------------------------------------------
// 7. MBQC [4,2,2]

struct MbqcRun {
    bool success = false;
    std::vector<double> fidelities;
};

MbqcRun mbqc_once(std::uint64_t seed, std::vector<SymState> inputs) {
    Engine eng(seed);
    MbqcConfig cfg = mbqc_layout(CssCode::code422());
    cfg.input_pairs = std::move(inputs);
    auto net = mbqc_network(eng, cfg, resource_state_spec(cfg.code), BackendId::dense);
    ProcessId pid = eng.spawn(mbqc_session(*net, cfg));
    eng.run();
    MbqcRun r;
    r.success = std::any_cast<MbqcOutcome>(*eng.result(pid)).success;
    for (const MetricsRecord *m : of_kind(net->metrics, "pair-delivered")) {
        r.fidelities.push_back(m->fidelity.value_or(-1));
    }
    return r;
}

void mbqc(Verdict &v) {
    auto t0 = Clock::now();
    MbqcRun clean = mbqc_once(1, {});
    v.require(clean.success, "noiseless run failed");
    v.require(clean.fidelities.size() == 2, std::to_string(clean.fidelities.size()) + " purified pairs");
    for (double f : clean.fidelities) {
        v.require(std::abs(f - 1) <= 1e-10, "purified pair fidelity " + std::to_string(f));
    }
    // Identity, X, Y, Z on the Alice half of one input pair.
    const char *errors[] = {"XX ZZ", "XX -ZZ", "-XX -ZZ", "-XX ZZ"};
    std::size_t cases = 0;
    std::size_t detected = 0;
    for (std::size_t q = 0; q < 4; q++) {
        for (const char *e : errors) {
            std::vector<SymState> inputs(4, perfect_pair());
            inputs[q] = parse_stabilizer(e);
            MbqcRun r = mbqc_once(10 + cases, inputs);
            cases++;
            bool identity = e == errors[0];
            if (identity) {
                v.require(r.success && r.fidelities.size() == 2, "error-free injection rejected");
                for (double f : r.fidelities) {
                    v.require(std::abs(f - 1) <= 1e-10, "error-free injection fidelity " + std::to_string(f));
                }
            } else if (!r.success) {
                detected++;
                v.require(r.fidelities.empty(), "failed session delivered pairs");
            } else {
                // Accepted: must be the ideal output.
                for (double f : r.fidelities) {
                    v.require(std::abs(f - 1) <= 1e-10, std::string("undetected error ") + e + " corrupted output");
                }
            }
        }
    }
    double elapsed = since(t0);
    v.require(cases == 16, "ran " + std::to_string(cases) + " injections");
    v.require(elapsed < 30.0, "took " + std::to_string(elapsed) + " s");
    v.detail << "noiseless fidelities " << clean.fidelities.size() << " x 1, " << detected << "/12 errors detected, "
             << std::setprecision(3) << elapsed << " s";
}

// ---------------------------------------------------------------------------
// 8. Determinism

void determinism(Verdict &v) {
    std::size_t scenarios = 0;
    std::vector<std::string> files;
    for (const auto &entry : std::filesystem::directory_iterator(QNET_SCENARIO_DIR)) {
        if (entry.path().extension() == ".toml") {
            files.push_back(entry.path().string());
        }
    }
    std::sort(files.begin(), files.end());
    for (const std::string &f : files) {
        ScenarioConfig cfg = load_scenario(f);
        std::string a = run_scenario(cfg, true).trace;
        std::string b = run_scenario(cfg, true).trace;
        v.require(!a.empty(), f + ": empty trace");
        v.require(a == b, f + ": traces differ");
        scenarios++;
    }
    v.require(scenarios >= 5, "found " + std::to_string(scenarios) + " scenarios");
    v.detail << scenarios << " scenarios, byte-identical traces";
}

// ---------------------------------------------------------------------------
// 9. Factored state

void factored(Verdict &v) {
    const std::size_t n = 30;
    RegisterSpec spec;
    spec.slots = 1;
    spec.noise = {NoiseProcess::t2_dephasing(2.0)};
    Engine eng(4);
    RegisterNet net(eng, std::vector<RegisterSpec>(n, spec), BackendId::dense);
    for (std::size_t q = 0; q < n; q++) {
        net.initialize({{q, 0}}, SymState::basis(Axis::X, 1));
    }
    // Local operations only: gates, channels and measurements over time.
    const SymOperator gates[] = {ops::H(), ops::S(), ops::T(), ops::X()};
    for (int step = 1; step <= 200; step++) {
        eng.run_until(0.01 * step);
        std::size_t q = eng.rng().below(n);
        net.apply({{q, 0}}, gates[eng.rng().below(4)]);
        if (step % 7 == 0) {
            net.apply_channel({{q, 0}}, SymChannel::amplitude_damp(0.1));
        }
        if (step % 11 == 0) {
            net.measure({q, 0}, Axis::Z);
        }
    }
    std::size_t refs = net.state_refs().size();
    std::size_t bytes = net.resident_bytes();
    v.require(net.peak_dimension() == 2, "peak StateRef dimension " + std::to_string(net.peak_dimension()));
    v.require(refs == n, std::to_string(refs) + " StateRefs for " + std::to_string(n) + " qubits");
    v.require(bytes < (std::size_t{1} << 20), std::to_string(bytes) + " resident bytes");
    v.detail << n << " qubits, peak dimension " << net.peak_dimension() << ", " << refs << " StateRefs, " << bytes
             << " resident bytes";
}

}  // namespace

int main() {
    struct Criterion {
        const char *name;
        std::function<void(Verdict &)> run;
    };
    const std::vector<Criterion> criteria = {
        {"backend-equivalence", backend_equivalence},
        {"cluster-square", cluster_square},
        {"repeater-chain", repeater_chain},
        {"purification-oracles", purification},
        {"lazy-noise", lazy_noise},
        {"qtcp-line", qtcp},
        {"mbqc-422", mbqc},
        {"determinism", determinism},
        {"factored-state", factored},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); i++) {
        Verdict v;
        auto t0 = Clock::now();
        try {
            criteria[i].run(v);
        } catch (const std::exception &e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        failed += v.ok ? 0 : 1;
        std::cout << (v.ok ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].name << " ["
                  << std::fixed << std::setprecision(2) << since(t0) << " s] " << std::defaultfloat
                  << v.detail.str() << std::endl;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
