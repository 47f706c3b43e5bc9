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

#ifndef QNET_MESSAGING_HPP
#define QNET_MESSAGING_HPP

#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qnet/registers.hpp"

namespace qnet {

/// Single-source shortest paths over a weighted undirected graph on `n`
/// vertices. Unreachable vertices get +inf.
std::vector<double> shortest_distances(std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, double> &edges,
                                       std::size_t src);

/// Minimum classical latency from `src` to `dst`, or nothing if unreachable.
/// With forwarding off only direct neighbours (and `src` itself) are reachable.
std::optional<double> classical_latency(const RegisterNet &net, std::size_t src, std::size_t dst);

/// Next node on a fewest-hop quantum path from `u` to `dst`; ties go to the
/// lowest node index. Throws "no-quantum-route".
std::size_t next_hop(const RegisterNet &net, std::size_t u, std::size_t dst);

/// Sends `payload` from `src` to `dst`'s message buffer. Delivery happens
/// after the minimum path latency. Throws "no-classical-route".
void put(RegisterNet &net, std::size_t dst, Tag payload, std::size_t src);

/// The message buffer of `node`. Throws "no-such-node".
Taggable &messagebuffer(RegisterNet &net, std::size_t node);

}  // namespace qnet

#endif
