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

#include "qnet/metrics.hpp"

#include <cstdio>
#include <ostream>

namespace qnet {

namespace {

std::string real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string joined(const std::vector<T> &xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); i++) {
        out += (i ? ";" : "") + std::to_string(xs[i]);
    }
    return out;
}

// Details are free text; keep the CSV parseable.
std::string quoted(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

}  // namespace

std::string metrics_header() {
    return "time,kind,nodes,slots,uuid,seq,fidelity,latency,detail";
}

void write_metrics_csv(std::ostream &out, const std::vector<MetricsRecord> &records) {
    out << metrics_header() << '\n';
    for (const auto &r : records) {
        out << real(r.time) << ',' << r.kind << ',' << joined(r.nodes) << ',' << joined(r.slots) << ','
            << (r.uuid >= 0 ? std::to_string(r.uuid) : "") << ',' << (r.seq >= 0 ? std::to_string(r.seq) : "")
            << ',' << (r.fidelity ? real(*r.fidelity) : "") << ',' << (r.latency ? real(*r.latency) : "") << ','
            << quoted(r.detail) << '\n';
    }
}

}  // namespace qnet
