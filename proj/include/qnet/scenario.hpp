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


#ifndef QNET_SCENARIO_HPP
#define QNET_SCENARIO_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qnet/backend.hpp"
#include "qnet/metrics.hpp"
#include "qnet/qtcp.hpp"
#include "qnet/registers.hpp"
#include "qnet/symbolic.hpp"

namespace qnet {

/// Inclusive slot range.
struct SlotRange {
    std::size_t lo = 0;
    std::size_t hi = 0;
    bool operator==(const SlotRange &) const = default;
};

/// Idle noise on slots lo..hi of a node. kind is t1, t2 or depolarization.
struct NoiseSpec {
    SlotRange slots;
    std::string kind;
    double time = 0;
    bool operator==(const NoiseSpec &) const = default;
};

struct NodeSpec {
    std::size_t slots = 1;
    std::vector<NoiseSpec> noise;
    bool operator==(const NodeSpec &) const = default;
};

struct ClassicalEdgeSpec {
    std::size_t u = 0;
    std::size_t v = 0;
    double latency = 0;
    bool operator==(const ClassicalEdgeSpec &) const = default;
};

/// Heralded link model shared by the link-level protocols.
///
/// pairstate is "bell" or a stabilizer list such as "ZX XZ"; fidelity < 1
/// mixes it with the maximally mixed state (fidelity 0.9 on "bell" is
/// depolarized_pair(0.9)).
struct LinkSpec {
    double success_prob = 1.0;
    double attempt_duration = 1e-3;
    std::string pairstate = "bell";
    double fidelity = 1.0;
    bool operator==(const LinkSpec &) const = default;

    SymState state() const;
};

struct EntanglerSpec {
    std::size_t a = 0;
    std::size_t b = 1;
    std::optional<SlotRange> slots_a;
    std::optional<SlotRange> slots_b;
    std::optional<std::size_t> rounds;
    bool operator==(const EntanglerSpec &) const = default;
};

/// Swapper at `node`; low/high name the partner on each side, absent means
/// any lower (higher) numbered node.
struct SwapperSpec {
    std::size_t node = 0;
    std::optional<std::size_t> low;
    std::optional<std::size_t> high;
    std::optional<SlotRange> slots;
    std::optional<std::size_t> rounds;
    bool operator==(const SwapperSpec &) const = default;
};

/// Trackers on the listed nodes; empty means every node.
struct TrackerSpec {
    std::vector<std::size_t> nodes;
    bool operator==(const TrackerSpec &) const = default;
};

struct CutoffSpec {
    std::size_t node = 0;
    double retention = 1.0;
    double period = 1.0;
    bool operator==(const CutoffSpec &) const = default;
};

struct DistillerSpec {
    std::size_t a = 0;
    std::size_t b = 1;
    std::optional<SlotRange> slots_a;
    std::optional<SlotRange> slots_b;
    std::optional<std::size_t> rounds;
    std::string tag = "DistilledTag";
    bool operator==(const DistillerSpec &) const = default;
};

struct RequirementSpec {
    std::string type = "EntanglementCounterpart";
    std::optional<std::size_t> remote;
    std::optional<SlotRange> slots;
    std::size_t count = 1;
    bool operator==(const RequirementSpec &) const = default;
};

struct StopWhenSpec {
    std::size_t node = 0;
    std::vector<RequirementSpec> requirements;
    bool operator==(const StopWhenSpec &) const = default;
};

/// Graph state over the storage slots of `vertices`; records "cluster-ok"
/// (or "cluster-fail") once built.
struct GraphStateSpec {
    std::vector<std::size_t> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t comm_slot = 0;
    std::size_t storage_slot = 1;
    bool operator==(const GraphStateSpec &) const = default;
};

/// One [4,2,2] distillation session. Alice uses nodes first..first+5 and Bob
/// the next six. input_fidelity lists one weight per input pair (empty means
/// perfect pairs).
struct MbqcSpec {
    std::size_t first = 0;
    std::int64_t uuid = 1;
    std::vector<double> input_fidelity;
    bool operator==(const MbqcSpec &) const = default;
};

struct QtcpSpec {
    std::vector<std::size_t> endnodes;
    std::size_t window = 1;
    bool operator==(const QtcpSpec &) const = default;
};

using ProtocolSpec = std::variant<EntanglerSpec, SwapperSpec, TrackerSpec, CutoffSpec, DistillerSpec, StopWhenSpec,
                                  GraphStateSpec, MbqcSpec, QtcpSpec>;

/// Protocol type name as written in scenario files ("entangler", ...).
std::string protocol_type(const ProtocolSpec &p);

struct OutputSpec {
    std::string metrics;
    std::string trace;
    /// "events" or "off".
    std::string trace_level = "events";
    bool operator==(const OutputSpec &) const = default;
};

struct ScenarioConfig {
    std::string name;
    BackendId backend = BackendId::dense;
    std::uint64_t seed = 0;
    std::vector<NodeSpec> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> quantum_edges;
    std::vector<ClassicalEdgeSpec> classical_edges;
    /// Classical latency given to every quantum edge; explicit classical
    /// edges are added on top.
    std::optional<double> mirror_latency;
    LinkSpec link;
    std::vector<ProtocolSpec> protocols;
    std::vector<Flow> flows;
    /// Absent means run to quiescence (or until a stop-when protocol fires).
    std::optional<double> t_end;
    OutputSpec outputs;
    bool operator==(const ScenarioConfig &) const = default;
};

/// Parses and validates a TOML scenario. Errors carry code "config" and a
/// "source:line:column: field: reason" detail.
ScenarioConfig parse_scenario(std::string_view text, const std::string &source = "scenario");
ScenarioConfig load_scenario(const std::string &path);
/// Canonical TOML form; parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig &cfg);
/// Checks node, slot and edge references. Throws Error("config", ...).
void validate_scenario(const ScenarioConfig &cfg);

/// Replaces the value at a dotted path ("link.fidelity", "protocols.2.rounds")
/// of a TOML document, keeping its type (integers accept only integral
/// values). Throws "no-such-param".
std::string set_scenario_param(std::string_view text, const std::string &path, double value);

struct RunResult {
    std::vector<MetricsRecord> metrics;
    /// NDJSON trace, empty when tracing is off.
    std::string trace;
    double end_time = 0;
    std::size_t events = 0;
    std::size_t peak_dimension = 0;
};

/// Builds the network and protocols and runs to t_end or quiescence. At the
/// end the register invariants are checked and, when no message is in
/// flight, every pair tag must be reciprocated; violations throw
/// InvariantViolation. `inspect` sees the network after the run.
RunResult run_scenario(const ScenarioConfig &cfg, bool trace = false,
                       const std::function<void(RegisterNet &)> &inspect = {});

/// A metric is "kind.field" with field in fidelity, latency, time or count;
/// one run's value is the mean over its records of that kind (count is the
/// number of records). Returns nothing when the run has no such record.
std::optional<double> metric_value(const std::vector<MetricsRecord> &records, const std::string &metric);

struct SweepRow {
    double value = 0;
    double mean = 0;
    double stderr_ = 0;
    std::size_t samples = 0;
};

/// One run per grid value and repeat (seed + repeat index). Throws
/// "no-such-param" and "empty-grid".
std::vector<SweepRow> sweep_scenario(std::string_view text, const std::string &param, const std::vector<double> &grid,
                                     const std::string &metric, std::size_t repeats);

/// Header: param,mean,stderr,samples
void write_sweep_csv(std::ostream &out, const std::string &param, const std::vector<SweepRow> &rows);

}  // namespace qnet

#endif
