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


#ifndef QNET_TESTS_BRANCHES_HPP
#define QNET_TESTS_BRANCHES_HPP

#include <optional>
#include <vector>

#include "qnet/error.hpp"
#include "qnet/registers.hpp"

namespace qnet::testing {

inline std::vector<RegisterSpec> uniform(std::size_t nodes, std::size_t slots) {
    RegisterSpec spec;
    spec.slots = slots;
    return std::vector<RegisterSpec>(nodes, spec);
}

struct BranchSum {
    double probability = 0;
    double fidelity = 0;
};

// Runs `circuit` once per forced outcome pattern of `nmeas` measurements on the
// dense backend and returns the heralded success probability and fidelity of
// the pair (keep_a, keep_b).
template <typename Setup, typename Circuit>
BranchSum enumerate_branches(std::size_t nodes, std::size_t slots, std::size_t nmeas, RegRef keep_a, RegRef keep_b,
                             Setup setup, Circuit circuit) {
    BranchSum h;
    double weighted = 0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << nmeas); mask++) {
        Engine eng;
        RegisterNet net(eng, uniform(nodes, slots));
        setup(net);
        std::size_t k = 0;
        net.outcome_hook = [&](RegRef, Axis) { return std::optional<int>(int((mask >> k++) & 1) + 1); };
        bool ok = false;
        try {
            ok = circuit(net);
        } catch (const Error &e) {
            if (e.code() != "impossible-outcome") {
                throw;
            }
            continue;
        }
        if (ok) {
            h.probability += net.branch_probability;
            weighted += net.branch_probability * net.pair_fidelity(keep_a, keep_b);
        }
    }
    h.fidelity = weighted / h.probability;
    return h;
}

}  // namespace qnet::testing

#endif
