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

#include "qnet/messaging.hpp"

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/dijkstra_shortest_paths.hpp>

#include "qnet/error.hpp"

namespace qnet {

std::vector<double> shortest_distances(std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, double> &edges,
                                       std::size_t src) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS, boost::no_property,
                                        boost::property<boost::edge_weight_t, double>>;
    Graph g(n);
    for (const auto &[e, w] : edges) {
        boost::add_edge(e.first, e.second, w, g);
    }
    std::vector<double> dist(n);
    boost::dijkstra_shortest_paths(g, boost::vertex(src, g),
                                   boost::distance_map(boost::make_iterator_property_map(
                                       dist.begin(), boost::get(boost::vertex_index, g))));
    for (double &d : dist) {
        if (d == std::numeric_limits<double>::max()) {
            d = std::numeric_limits<double>::infinity();
        }
    }
    return dist;
}

std::optional<double> classical_latency(const RegisterNet &net, std::size_t src, std::size_t dst) {
    net[src];
    net[dst];
    if (src == dst) {
        return 0.0;
    }
    const auto &edges = net.classical_edges();
    if (!net.forwarding) {
        auto it = edges.find({std::min(src, dst), std::max(src, dst)});
        if (it == edges.end()) {
            return std::nullopt;
        }
        return it->second;
    }
    double d = shortest_distances(net.size(), edges, src)[dst];
    if (!std::isfinite(d)) {
        return std::nullopt;
    }
    return d;
}

std::size_t next_hop(const RegisterNet &net, std::size_t u, std::size_t dst) {
    if (u == dst) {
        return u;
    }
    std::vector<double> from_dst = shortest_distances(net.size(), net.quantum_edges(), dst);
    if (!std::isfinite(from_dst[u])) {
        throw Error("no-quantum-route", std::to_string(u) + " -> " + std::to_string(dst));
    }
    for (std::size_t v : net.quantum_neighbors(u)) {
        if (from_dst[v] == from_dst[u] - 1) {
            return v;
        }
    }
    throw Error("no-quantum-route", std::to_string(u) + " -> " + std::to_string(dst));
}

void put(RegisterNet &net, std::size_t dst, Tag payload, std::size_t src) {
    auto latency = classical_latency(net, src, dst);
    if (!latency) {
        throw Error("no-classical-route", std::to_string(src) + " -> " + std::to_string(dst));
    }
    net.tagspace().schemas.check(payload);
    Engine &engine = net.engine();
    if (engine.tracing()) {
        engine.trace("send", std::to_string(src) + " -> " + std::to_string(dst) + " " + payload.str());
    }
    RegisterNet *netp = &net;
    net.messages_in_flight++;
    engine.schedule(*latency, [netp, dst, src, payload = std::move(payload)]() mutable {
        Engine &e = netp->engine();
        if (e.tracing()) {
            e.trace(0, "deliver", std::to_string(src) + " -> " + std::to_string(dst) + " " + payload.str());
        }
        netp->messages_in_flight--;
        netp->buffer(dst).tag(std::move(payload));
    });
}

Taggable &messagebuffer(RegisterNet &net, std::size_t node) {
    return net.buffer(node);
}

}  // namespace qnet
