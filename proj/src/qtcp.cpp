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


#include "qnet/qtcp.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "qnet/messaging.hpp"
#include "qnet/protocols.hpp"
#include "qnet/zoo.hpp"

namespace qnet {

StaticWindow::StaticWindow(std::size_t window) : window_(window) {
    if (window == 0) {
        throw Error("invalid-window", "window must be positive");
    }
}

void submit_flow(RegisterNet &net, const Flow &flow) {
    if (flow.src == flow.dst || flow.npairs == 0 || flow.src >= net.size() || flow.dst >= net.size()) {
        throw Error("invalid-flow", std::to_string(flow.src) + " -> " + std::to_string(flow.dst));
    }
    put(net, flow.src, Tag(vocab::Flow, {flow.src, flow.dst, flow.npairs, flow.uuid}), flow.src);
}

namespace {

std::int64_t to_ns(SimTime t) {
    return std::llround(t * 1e9);
}

using Key = std::pair<std::int64_t, std::int64_t>;

struct FlowState {
    Flow flow;
    std::size_t window = 1;
    std::size_t injected = 0;
    std::size_t in_flight = 0;
    std::size_t delivered = 0;
};

}  // namespace

Process end_node_controller(RegisterNet &net, std::size_t node, std::shared_ptr<const WindowPolicy> policy,
                            std::shared_ptr<QtcpAudit> audit) {
    Engine &eng = net.engine();
    Taggable &mb = net.buffer(node);
    std::map<std::int64_t, FlowState> flows;
    const std::string here = std::to_string(node);

    while (true) {
        // 1) New flows sourced here.
        while (auto f = mb.querydelete(QueryPattern(vocab::Flow, {node, W, W, W}))) {
            Flow flow{node, static_cast<std::size_t>(f->tag[1]), static_cast<std::size_t>(f->tag[2]), f->tag[3]};
            if (flows.count(flow.uuid)) {
                eng.trace("drop-flow", "duplicate uuid " + std::to_string(flow.uuid) + " at " + here);
                continue;
            }
            flows[flow.uuid] = FlowState{flow, policy->initial(flow)};
        }

        // 2) Datagrams that end here, once the last link's slot is known.
        for (const TagEntry &dg : mb.queryall(QueryPattern(vocab::QDatagram, {W, W, node, W, W, W, W}))) {
            std::int64_t uuid = dg.tag[0];
            std::int64_t seq = dg.tag[4];
            auto hop = mb.query(QueryPattern(vocab::LinkReplyAtHop, {uuid, seq, W}));
            if (!hop) {
                continue;
            }
            mb.untag(dg.id);
            mb.untag(hop->id);
            RegRef mine{node, static_cast<std::size_t>(hop->tag[2])};
            RegRef theirs{static_cast<std::size_t>(dg.tag[1]), static_cast<std::size_t>(dg.tag[5])};
            std::int64_t frame = dg.tag[3];
            if (frame & frame_x) {
                net.apply({mine}, ops::X());
            }
            if (frame & frame_z) {
                net.apply({mine}, ops::Z());
            }
            MetricsRecord rec;
            rec.kind = "pair-delivered";
            rec.nodes = {theirs.node, mine.node};
            rec.slots = {theirs.slot, mine.slot};
            rec.uuid = uuid;
            rec.seq = seq;
            if (net.same_state(theirs, mine)) {
                rec.fidelity = net.pair_fidelity(theirs, mine);
            }
            net.record(rec);
            put(net, theirs.node, Tag(vocab::QDatagramSuccess, {uuid, seq, dg.tag[6], theirs.slot}), node);
            mb.tag(Tag(vocab::ConsumeLog, {uuid, seq, mine.slot}));
            net.traceout(mine);
        }

        // 3) Acknowledgments for flows sourced here.
        while (auto ack = mb.querydelete(QueryPattern(vocab::QDatagramSuccess, {W, W, W, W}))) {
            std::int64_t uuid = ack->tag[0];
            auto it = flows.find(uuid);
            if (it == flows.end()) {
                eng.trace("drop-ack", "unknown uuid " + std::to_string(uuid) + " at " + here);
                if (audit) {
                    audit->dropped_acks++;
                }
                continue;
            }
            FlowState &st = it->second;
            double latency = eng.now() - static_cast<double>(ack->tag[2]) * 1e-9;
            st.in_flight--;
            st.delivered++;
            net.traceout({node, static_cast<std::size_t>(ack->tag[3])});
            MetricsRecord rec;
            rec.kind = "datagram-success";
            rec.nodes = {node, st.flow.dst};
            rec.uuid = uuid;
            rec.seq = ack->tag[1];
            rec.latency = latency;
            net.record(rec);
            if (audit) {
                audit->successes++;
            }
            st.window = policy->after_ack(st.flow, st.window, latency);
            if (st.delivered == st.flow.npairs) {
                MetricsRecord done;
                done.kind = "flow-done";
                done.nodes = {node, st.flow.dst};
                done.uuid = uuid;
                net.record(done);
                flows.erase(it);
            }
        }

        // Always: fill every window.
        for (auto &[uuid, st] : flows) {
            while (st.in_flight < st.window && st.injected < st.flow.npairs) {
                std::int64_t seq = static_cast<std::int64_t>(st.injected++);
                st.in_flight++;
                put(net, node, Tag(vocab::QDatagram, {uuid, node, st.flow.dst, 0, seq, -1, to_ns(eng.now())}), node);
            }
            if (st.in_flight > st.window) {
                throw InvariantViolation("flow " + std::to_string(uuid) + " has " + std::to_string(st.in_flight) +
                                         " datagrams in flight over window " + std::to_string(st.window));
            }
            if (eng.tracing()) {
                eng.trace("inflight", "uuid=" + std::to_string(uuid) + " in_flight=" + std::to_string(st.in_flight) +
                                          " window=" + std::to_string(st.window));
            }
        }
        co_await mb.onchange();
    }
}

Process network_node_controller(RegisterNet &net, std::size_t node, std::shared_ptr<QtcpAudit> audit) {
    Engine &eng = net.engine();
    Taggable &mb = net.buffer(node);
    struct Waiting {
        Tag datagram;
        std::optional<std::size_t> in_slot;
        std::size_t next;
    };
    std::map<Key, Waiting> waiting;

    while (true) {
        // 1) Datagrams passing through: ask for a link to the next hop.
        for (const TagEntry &dg : mb.queryall(QueryPattern(vocab::QDatagram, {W, W, ne(Value(node)), W, W, W, W}))) {
            std::int64_t uuid = dg.tag[0];
            auto src = static_cast<std::size_t>(dg.tag[1]);
            auto dst = static_cast<std::size_t>(dg.tag[2]);
            std::int64_t seq = dg.tag[4];
            std::optional<std::size_t> in_slot;
            if (src != node) {
                auto hop = mb.query(QueryPattern(vocab::LinkReplyAtHop, {uuid, seq, W}));
                if (!hop) {
                    continue;
                }
                in_slot = static_cast<std::size_t>(hop->tag[2]);
                mb.untag(hop->id);
            }
            mb.untag(dg.id);
            std::size_t next = next_hop(net, node, dst);
            waiting[{uuid, seq}] = Waiting{dg.tag, in_slot, next};
            if (audit) {
                audit->waiting[node] = waiting.size();
            }
            put(net, node, Tag(vocab::LinkRequest, {uuid, seq, node, next}), node);
        }

        // 2) Link is up: swap unless this is the source, then forward.
        while (auto reply = mb.querydelete(QueryPattern(vocab::LinkReply, {W, W, W}))) {
            Key key{reply->tag[0], reply->tag[1]};
            auto it = waiting.find(key);
            if (it == waiting.end()) {
                eng.trace("orphan-reply", std::to_string(node) + " " + reply->tag.str());
                if (audit) {
                    audit->orphan_replies++;
                }
                continue;
            }
            Waiting w = std::move(it->second);
            waiting.erase(it);
            if (audit) {
                audit->waiting[node] = waiting.size();
            }
            auto slot = static_cast<std::size_t>(reply->tag[2]);
            Tag out = w.datagram;
            if (w.in_slot) {
                Bits b = local_entanglement_swap(net, {node, *w.in_slot}, {node, slot});
                // Both corrections act on the far end of the new pair.
                out.fields[3] = fold_frame(out[3], b.x, b.z);
                MetricsRecord rec;
                rec.kind = "swap";
                rec.nodes = {node};
                rec.slots = {*w.in_slot, slot};
                rec.uuid = key.first;
                rec.seq = key.second;
                net.record(rec);
            } else {
                out.fields[5] = slot;
            }
            put(net, w.next, std::move(out), node);
        }
        co_await mb.onchange();
    }
}

Process link_controller(RegisterNet &net, std::size_t node_a, std::size_t node_b, LinkModel model) {
    Engine &eng = net.engine();
    Taggable &mba = net.buffer(node_a);
    Taggable &mbb = net.buffer(node_b);
    while (true) {
        auto ra = mba.query(QueryPattern(vocab::LinkRequest, {W, W, node_a, node_b}));
        auto rb = mbb.query(QueryPattern(vocab::LinkRequest, {W, W, node_b, node_a}));
        if (!ra && !rb) {
            co_await (mba.onchange() | mbb.onchange());
            continue;
        }
        bool from_a = ra && (!rb || ra->time < rb->time || (ra->time == rb->time && ra->id < rb->id));
        TagEntry req = from_a ? *ra : *rb;
        (from_a ? mba : mbb).untag(req.id);
        std::size_t requester = from_a ? node_a : node_b;
        std::size_t peer = from_a ? node_b : node_a;

        EntanglerConfig ec;
        ec.node_a = requester;
        ec.node_b = peer;
        ec.pairstate = model.pairstate;
        ec.success_prob = model.success_prob;
        ec.attempt_duration = model.attempt_duration;
        ec.rounds = 1;
        ec.tag = false;
        ProcessId pid = eng.spawn(entangler_prot(net, ec), "link-entangler");
        Wake w = co_await Condition::done(pid);
        auto res = std::any_cast<EntanglerResult>(w.value);

        std::int64_t uuid = req.tag[0];
        std::int64_t seq = req.tag[1];
        put(net, requester, Tag(vocab::LinkReply, {uuid, seq, res.slot_a}), requester);
        put(net, peer, Tag(vocab::LinkReplyAtHop, {uuid, seq, res.slot_b}), requester);
    }
}

void start_qtcp(RegisterNet &net, const std::vector<std::size_t> &endnodes, const LinkModel &model,
                std::shared_ptr<const WindowPolicy> policy, std::shared_ptr<QtcpAudit> audit) {
    Engine &eng = net.engine();
    for (std::size_t n : endnodes) {
        eng.spawn(end_node_controller(net, n, policy, audit), "end-controller@" + std::to_string(n));
    }
    for (std::size_t n = 0; n < net.size(); n++) {
        eng.spawn(network_node_controller(net, n, audit), "node-controller@" + std::to_string(n));
    }
    for (const auto &[edge, weight] : net.quantum_edges()) {
        (void)weight;
        eng.spawn(link_controller(net, edge.first, edge.second, model),
                  "link-controller@" + std::to_string(edge.first) + "-" + std::to_string(edge.second));
    }
}

}  // namespace qnet
