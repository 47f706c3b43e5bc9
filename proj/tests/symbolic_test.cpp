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

#include "qnet/symbolic.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "qnet/backend.hpp"
#include "qnet/error.hpp"

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

Eigen::MatrixXcd bell_projector() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
    return m;
}

double trace_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a - b);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

TEST(ParseStabilizer, BellGenerators) {
    SymState s = parse_stabilizer("ZZ XX");
    EXPECT_EQ(s.generators().size(), 2u);
    EXPECT_LT((s.density() - bell_projector()).norm(), 1e-12);
}

TEST(ParseStabilizer, SingleZIsZero) {
    SymState s = parse_stabilizer("Z");
    Eigen::VectorXcd v = s.ket();
    EXPECT_NEAR(std::abs(v(0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(v(1)), 0.0, 1e-12);
}

TEST(ParseStabilizer, Errors) {
    EXPECT_EQ(error_code([] { parse_stabilizer("XZ ZZ"); }), "invalid-stabilizer-group");
    EXPECT_EQ(error_code([] { parse_stabilizer("ZZ ZZ"); }), "invalid-stabilizer-group");
    EXPECT_EQ(error_code([] { parse_stabilizer("ZZ"); }), "rank-mismatch");
    EXPECT_EQ(error_code([] { parse_stabilizer("ZZ XX IZ"); }), "rank-mismatch");
}

TEST(ParseStabilizer, CommutingYYIsPsiPlus) {
    // XX and YY anticommute on each site, so they commute overall.
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    want(1, 1) = want(1, 2) = want(2, 1) = want(2, 2) = 0.5;
    EXPECT_LT((parse_stabilizer("XX YY").density() - want).norm(), 1e-12);
}

TEST(ParseStabilizer, RenderRoundTrip) {
    for (const char *text : {"ZZ XX", "-ZZ XX", "ZX XZ", "XZI ZXZ IZX", "-Y"}) {
        EXPECT_EQ(render_stabilizer(parse_stabilizer(text)), text);
    }
    EXPECT_EQ(render_stabilizer(parse_stabilizer("\xE2\x88\x92Z")), "-Z");
}

TEST(StateZoo, DepolarizedPairFidelity) {
    SymState bell = perfect_pair();
    EXPECT_NEAR(fidelity(depolarized_pair(1.0).density(), bell), 1.0, 1e-12);
    EXPECT_NEAR(fidelity(depolarized_pair(0.99).density(), bell), 0.9925, 1e-12);
    EXPECT_NEAR(fidelity(depolarized_pair(0.0).density(), bell), 0.25, 1e-12);
    EXPECT_EQ(error_code([] { depolarized_pair(1.5); }), "invalid-weight");
    EXPECT_EQ(error_code([] { depolarized_pair(-0.1); }), "invalid-weight");
}

TEST(StateZoo, PerfectPairMatchesStabilizerForm) {
    EXPECT_LT((perfect_pair().density() - bell_projector()).norm(), 1e-12);
    EXPECT_LT((parse_stabilizer("ZZ XX").density() - perfect_pair().density()).norm(), 1e-12);
}

TEST(SymState, BasisKetsFollowNaming) {
    auto amp = [](Axis a, int i) { return SymState::basis(a, i).ket(); };
    const double r = 1 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(amp(Axis::Z, 1)(0)), 1, 1e-12);
    EXPECT_NEAR(std::abs(amp(Axis::Z, 2)(1)), 1, 1e-12);
    EXPECT_NEAR(amp(Axis::X, 1)(1).real(), r, 1e-12);
    EXPECT_NEAR(amp(Axis::X, 2)(1).real(), -r, 1e-12);
    EXPECT_NEAR(amp(Axis::Y, 1)(1).imag(), r, 1e-12);
    EXPECT_NEAR(amp(Axis::Y, 2)(1).imag(), -r, 1e-12);
}

TEST(SymState, UnitTraceAndNorm) {
    SymState z1 = SymState::basis(Axis::Z, 1);
    SymState x1 = SymState::basis(Axis::X, 1);
    SymState unnormalized = tensor(z1, x1) + tensor(x1, z1);
    EXPECT_NEAR(unnormalized.ket().norm(), 1.0, 1e-12);
    SymState mix = 3.0 * SymState::projector(perfect_pair()) + SymState::mixed_qubits(2);
    EXPECT_NEAR(mix.density().trace().real(), 1.0, 1e-12);
    EXPECT_EQ(error_code([&] { (void)(perfect_pair() + SymState::mixed_qubits(2)); }), "invalid-expression");
    EXPECT_EQ(error_code([&] { (void)(z1 + perfect_pair()); }), "dim-mismatch");
}

TEST(SymState, ScalarFolding) {
    SymState z1 = SymState::basis(Axis::Z, 1);
    SymState s = 2.0 * (3.0 * z1);
    ASSERT_EQ(s.kind(), SymState::Kind::sum);
    EXPECT_EQ(s.str(), "(6*Z1)");
}

TEST(SymOperator, GatesAreUnitary) {
    for (Gate g : {Gate::I, Gate::X, Gate::Y, Gate::Z, Gate::H, Gate::S, Gate::Sdag, Gate::T, Gate::CNOT, Gate::CZ}) {
        Eigen::MatrixXcd u = SymOperator(g).matrix();
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(u.rows(), u.cols());
        EXPECT_LT((u.adjoint() * u - id).norm(), 1e-12) << gate_name(g);
    }
    SymOperator composite = tensor(ops::H(), ops::S()) * ops::CNOT();
    EXPECT_EQ(composite.arity(), 2u);
    Eigen::MatrixXcd u = composite.matrix();
    EXPECT_LT((u.adjoint() * u - Eigen::MatrixXcd::Identity(4, 4)).norm(), 1e-12);
}

TEST(SymOperator, CliffordStepsRejectT) {
    EXPECT_EQ(error_code([] { ops::T().clifford_steps(); }), "unsupported-on-backend");
    auto steps = (tensor(ops::H(), ops::X()) * ops::CNOT()).clifford_steps();
    ASSERT_EQ(steps.size(), 3u);
    EXPECT_EQ(steps[0].gate, Gate::CNOT);
    EXPECT_EQ(steps[1].gate, Gate::H);
    EXPECT_EQ(steps[2].gate, Gate::X);
    EXPECT_EQ(steps[2].targets[0], 1u);
}

TEST(SymChannel, KrausIsTracePreserving) {
    std::vector<SymChannel> chans = {SymChannel::depolarize(0.3), SymChannel::dephase(0.2),
                                     SymChannel::amplitude_damp(0.4), SymChannel::depolarize(0.5, 2),
                                     SymChannel::pauli_mixture({{PauliString::parse("X"), 0.25},
                                                                {PauliString::parse("I"), 0.75}})};
    for (const auto &c : chans) {
        auto ks = c.kraus();
        Eigen::Index d = ks[0].rows();
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(d, d);
        for (const auto &k : ks) {
            acc += k.adjoint() * k;
        }
        EXPECT_LT((acc - Eigen::MatrixXcd::Identity(d, d)).norm(), 1e-10) << c.str();
    }
    auto qutrit = SymChannel::depolarize(0.4).kraus(3);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
    for (const auto &k : qutrit) {
        acc += k.adjoint() * k;
    }
    EXPECT_LT((acc - Eigen::MatrixXcd::Identity(3, 3)).norm(), 1e-10);
    EXPECT_EQ(error_code([] { SymChannel::dephase(1.2); }), "invalid-weight");
    EXPECT_EQ(error_code([] { SymChannel::pauli_mixture({{PauliString::parse("X"), 0.5}}); }), "invalid-weight");
}

TEST(SymChannel, AmplitudeDampingTwirl) {
    double g = 0.36;
    auto form = SymChannel::amplitude_damp(g).pauli_form();
    EXPECT_TRUE(form.approximate);
    // Independent: p_P = sum_k |tr(P K_k)/2|^2.
    auto ks = SymChannel::amplitude_damp(g).kraus();
    for (const auto &[p, w] : form.terms) {
        double expect = 0;
        for (const auto &k : ks) {
            expect += std::norm((p.matrix() * k).trace() / 2.0);
        }
        EXPECT_NEAR(w, expect, 1e-12) << p.str();
    }
}

TEST(Express, StabilizerOfDepolarizedPairIsBellTwirl) {
    StabilizerPrep prep = express_stabilizer(depolarized_pair(0.9));
    EXPECT_EQ(prep.base.canonical_stabilizers(), parse_stabilizer("XX ZZ").generators());
    ASSERT_EQ(prep.mixture.size(), 4u);
    double identity_weight = 0;
    for (const auto &[w, p] : prep.mixture) {
        if (p.is_identity()) {
            identity_weight = w;
        } else {
            EXPECT_NEAR(w, 0.025, 1e-12);
        }
    }
    EXPECT_NEAR(identity_weight, 0.925, 1e-12);
}

TEST(Express, TrajectoryAverageMatchesDense) {
    std::vector<SymState> states = {
        depolarized_pair(0.7),
        tensor(SymState::basis(Axis::X, 2), SymState::basis(Axis::Y, 1)),
        tensor(SymState::mixed_qubits(1), parse_stabilizer("ZZ XX")),
        0.5 * SymState::projector(tensor(SymState::basis(Axis::Z, 1), SymState::basis(Axis::Z, 1))) +
            0.5 * SymState::projector(tensor(SymState::basis(Axis::Z, 2), SymState::basis(Axis::Z, 1))),
    };
    Rng rng(11);
    for (const auto &s : states) {
        Eigen::MatrixXcd dense = s.density();
        StabilizerPrep prep = express_stabilizer(s);
        Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(dense.rows(), dense.cols());
        const int samples = 10000;
        for (int i = 0; i < samples; i++) {
            avg += prep.sample(rng).density();
        }
        avg /= samples;
        EXPECT_LT(trace_distance(avg, dense), 0.01) << s.str();
    }
}

TEST(Express, NonStabilizerRejected) {
    SymState z1 = SymState::basis(Axis::Z, 1);
    SymState x1 = SymState::basis(Axis::X, 1);
    EXPECT_EQ(error_code([&] { express_stabilizer(z1 + x1); }), "unsupported-on-backend");
    EXPECT_EQ(error_code([&] { express_stabilizer(SymState::mixed({3})); }), "unsupported-on-backend");
}

TEST(Express, DenseStabilizerIsProjector) {
    SymState s = parse_stabilizer("XZI ZXZ IZX");
    Eigen::MatrixXcd rho = express_dense(s).density();
    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(8, 8);
    for (const auto &g : s.generators()) {
        proj = proj * (Eigen::MatrixXcd::Identity(8, 8) + g.matrix()) * 0.5;
    }
    EXPECT_LT((rho - proj).norm(), 1e-12);
}
