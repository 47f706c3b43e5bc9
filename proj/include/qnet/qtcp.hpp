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


#ifndef QNET_QTCP_HPP
#define QNET_QTCP_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "qnet/engine.hpp"
#include "qnet/registers.hpp"
#include "qnet/symbolic.hpp"

namespace qnet {

/// Intent of two end nodes to share `npairs` Bell pairs.
struct Flow {
    std::size_t src = 0;
    std::size_t dst = 1;
    std::size_t npairs = 1;
    std::int64_t uuid = 0;
    bool operator==(const Flow &) const = default;
};

/// Pauli frame word carried by a datagram: bit 0 is X, bit 1 is Z.
enum FrameBits : std::int64_t { frame_x = 1, frame_z = 2 };

/// Folds the outcome of a swap into a frame. Signs are dropped.
inline std::int64_t fold_frame(std::int64_t frame, int x, int z) {
    return frame ^ (x ? std::int64_t{frame_x} : 0) ^ (z ? std::int64_t{frame_z} : 0);
}

/// Decides the congestion window of a flow.
class WindowPolicy {
   public:
    virtual ~WindowPolicy() = default;
    virtual std::size_t initial(const Flow &flow) const = 0;
    /// Called on every acknowledgment; the default keeps the window.
    virtual std::size_t after_ack(const Flow &flow, std::size_t window, double latency) const {
        (void)flow;
        (void)latency;
        return window;
    }
};

class StaticWindow : public WindowPolicy {
   public:
    explicit StaticWindow(std::size_t window);
    std::size_t initial(const Flow &) const override {
        return window_;
    }

   private:
    std::size_t window_;
};

struct LinkModel {
    double success_prob = 1.0;
    double attempt_duration = 1e-3;
    SymState pairstate = perfect_pair();
};

/// Counters shared by the controllers of one network, for audits.
struct QtcpAudit {
    /// Datagrams held by each node's network controller.
    std::map<std::size_t, std::size_t> waiting;
    std::size_t successes = 0;
    std::size_t orphan_replies = 0;
    std::size_t dropped_acks = 0;
    std::size_t max_in_flight_over_window = 0;
};

/// Hands `flow` to the end node controller at its source. Throws
/// "invalid-flow" when src == dst or npairs == 0.
void submit_flow(RegisterNet &net, const Flow &flow);

/// Injects datagrams for flows sourced here within each flow's window,
/// consumes datagrams destined here (applying the frame, logging fidelity and
/// acknowledging), and retires flows once every pair is acknowledged.
Process end_node_controller(RegisterNet &net, std::size_t node, std::shared_ptr<const WindowPolicy> policy,
                            std::shared_ptr<QtcpAudit> audit);

/// Requests a link towards the next hop for every passing datagram, swaps
/// once the link is up and forwards the datagram with the folded frame.
Process network_node_controller(RegisterNet &net, std::size_t node, std::shared_ptr<QtcpAudit> audit);

/// Serves link requests from both ends one at a time, in arrival order, with
/// a one-round untagged entangler.
Process link_controller(RegisterNet &net, std::size_t node_a, std::size_t node_b, LinkModel model);

/// Starts end controllers on `endnodes`, network controllers on every node
/// and link controllers on every quantum edge.
void start_qtcp(RegisterNet &net, const std::vector<std::size_t> &endnodes, const LinkModel &model,
                std::shared_ptr<const WindowPolicy> policy, std::shared_ptr<QtcpAudit> audit);

}  // namespace qnet

#endif
