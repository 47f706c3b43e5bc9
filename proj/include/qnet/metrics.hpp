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

#ifndef QNET_METRICS_HPP
#define QNET_METRICS_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qnet {

/// One row of the metrics stream.
struct MetricsRecord {
    double time = 0;
    /// pair-delivered, swap, purify, cutoff, flow-done, datagram, cluster-ok, ...
    std::string kind;
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> slots;
    std::int64_t uuid = -1;
    std::int64_t seq = -1;
    std::optional<double> fidelity;
    std::optional<double> latency;
    std::string detail;
};

/// Header: time,kind,nodes,slots,uuid,seq,fidelity,latency,detail
/// Lists are ';'-joined; absent values are empty; reals use 17 significant digits.
void write_metrics_csv(std::ostream &out, const std::vector<MetricsRecord> &records);

std::string metrics_header();

}  // namespace qnet

#endif
