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


#include "qnet/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qnet/error.hpp"
#include "qnet/mbqc.hpp"
#include "qnet/protocols.hpp"
#include "qnet/registers.hpp"
#include "toml.hpp"

namespace qnet {

SymState LinkSpec::state() const {
    SymState base = pairstate == "bell" ? perfect_pair() : parse_stabilizer(pairstate);
    if (fidelity >= 1.0) {
        return base;
    }
    return fidelity * SymState::projector(base) + (1.0 - fidelity) * SymState::mixed_qubits(2);
}

std::string protocol_type(const ProtocolSpec &p) {
    static const char *const names[] = {"entangler", "swapper", "tracker", "cutoff", "distiller",
                                        "stop-when", "graph-state", "mbqc", "qtcp"};
    return names[p.index()];
}

namespace {

[[noreturn]] void config_error(const std::string &detail) {
    throw Error("config", detail);
}

using Positions = std::map<std::string, toml::source_position>;

std::string join(const std::string &path, const std::string &key) {
    return path.empty() ? key : path + "." + key;
}

// Reads the fields of one TOML table. Every key must be consumed; finish()
// rejects the rest as unknown.
class Fields {
   public:
    Fields(const toml::node &node, std::string path, const std::string &source, Positions &pos)
        : path_(std::move(path)), source_(source), pos_(pos) {
        pos_[path_] = node.source().begin;
        table_ = node.as_table();
        if (!table_) {
            fail(node, path_, "expected a table");
        }
    }

    [[noreturn]] void fail(const toml::node &n, const std::string &path, const std::string &why) const {
        std::ostringstream out;
        out << source_ << ":" << n.source().begin.line << ":" << n.source().begin.column << ": " << path << ": "
            << why;
        config_error(out.str());
    }
    std::string at(const std::string &key) const { return join(path_, key); }

    [[noreturn]] void missing(const std::string &key) const {
        fail(*table_, join(path_, key), "required field missing");
    }

    const toml::node *get(const std::string &key) {
        used_.insert(key);
        const toml::node *n = table_->get(key);
        if (n) {
            pos_[join(path_, key)] = n->source().begin;
        }
        return n;
    }
    bool has(const std::string &key) const {
        return table_->contains(key);
    }

    std::size_t index(const toml::node &n, const std::string &path) const {
        auto v = n.value<std::int64_t>();
        if (!n.is_integer() || !v || *v < 0) {
            fail(n, path, "expected a non-negative integer");
        }
        return static_cast<std::size_t>(*v);
    }
    double number(const toml::node &n, const std::string &path) const {
        if (!n.is_number()) {
            fail(n, path, "expected a number");
        }
        return *n.value<double>();
    }

    std::optional<std::size_t> opt_uint(const std::string &key) {
        const toml::node *n = get(key);
        return n ? std::optional(index(*n, join(path_, key))) : std::nullopt;
    }
    std::size_t uint(const std::string &key) {
        auto v = opt_uint(key);
        if (!v) {
            missing(key);
        }
        return *v;
    }
    std::size_t uint_or(const std::string &key, std::size_t dflt) {
        return opt_uint(key).value_or(dflt);
    }
    std::optional<double> opt_num(const std::string &key) {
        const toml::node *n = get(key);
        return n ? std::optional(number(*n, join(path_, key))) : std::nullopt;
    }
    double num(const std::string &key) {
        auto v = opt_num(key);
        if (!v) {
            missing(key);
        }
        return *v;
    }
    double num_or(const std::string &key, double dflt) {
        return opt_num(key).value_or(dflt);
    }
    std::optional<std::string> opt_str(const std::string &key) {
        const toml::node *n = get(key);
        if (!n) {
            return std::nullopt;
        }
        if (!n->is_string()) {
            fail(*n, join(path_, key), "expected a string");
        }
        return *n->value<std::string>();
    }
    std::string str_or(const std::string &key, const std::string &dflt) {
        return opt_str(key).value_or(dflt);
    }
    std::int64_t int_or(const std::string &key, std::int64_t dflt) {
        const toml::node *n = get(key);
        if (!n) {
            return dflt;
        }
        if (!n->is_integer()) {
            fail(*n, join(path_, key), "expected an integer");
        }
        return *n->value<std::int64_t>();
    }
    const toml::array &array(const toml::node &n, const std::string &path) const {
        const toml::array *a = n.as_array();
        if (!a) {
            fail(n, path, "expected an array");
        }
        return *a;
    }
    std::vector<std::size_t> uint_list(const std::string &key) {
        std::vector<std::size_t> out;
        if (const toml::node *n = get(key)) {
            const auto &a = array(*n, join(path_, key));
            for (std::size_t i = 0; i < a.size(); i++) {
                out.push_back(index(*a.get(i), join(join(path_, key), std::to_string(i))));
            }
        }
        return out;
    }
    std::vector<double> num_list(const std::string &key) {
        std::vector<double> out;
        if (const toml::node *n = get(key)) {
            const auto &a = array(*n, join(path_, key));
            for (std::size_t i = 0; i < a.size(); i++) {
                out.push_back(number(*a.get(i), join(join(path_, key), std::to_string(i))));
            }
        }
        return out;
    }
    std::pair<std::size_t, std::size_t> pair_of(const toml::node &n, const std::string &path) const {
        const auto &a = array(n, path);
        if (a.size() != 2) {
            fail(n, path, "expected two entries");
        }
        return {index(*a.get(0), path + ".0"), index(*a.get(1), path + ".1")};
    }
    std::vector<std::pair<std::size_t, std::size_t>> pair_list(const std::string &key) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        if (const toml::node *n = get(key)) {
            const auto &a = array(*n, join(path_, key));
            for (std::size_t i = 0; i < a.size(); i++) {
                out.push_back(pair_of(*a.get(i), join(join(path_, key), std::to_string(i))));
            }
        }
        return out;
    }
    std::optional<SlotRange> opt_range(const std::string &key) {
        const toml::node *n = get(key);
        if (!n) {
            return std::nullopt;
        }
        auto [lo, hi] = pair_of(*n, join(path_, key));
        return SlotRange{lo, hi};
    }
    // Visits the tables of an array of tables.
    template <class Fn>
    void each(const std::string &key, Fn fn) {
        if (const toml::node *n = get(key)) {
            const auto &a = array(*n, join(path_, key));
            for (std::size_t i = 0; i < a.size(); i++) {
                Fields sub(*a.get(i), join(join(path_, key), std::to_string(i)), source_, pos_);
                fn(sub);
                sub.finish();
            }
        }
    }
    template <class Fn>
    void sub(const std::string &key, Fn fn) {
        if (const toml::node *n = get(key)) {
            Fields s(*n, join(path_, key), source_, pos_);
            fn(s);
            s.finish();
        }
    }

    void finish() const {
        for (auto &&[k, v] : *table_) {
            if (!used_.count(std::string(k.str()))) {
                fail(v, join(path_, std::string(k.str())), "unknown field");
            }
        }
    }

   private:
    const toml::table *table_ = nullptr;
    std::string path_;
    const std::string &source_;
    Positions &pos_;
    std::set<std::string> used_;
};

ProtocolSpec read_protocol(Fields &f, const std::string &type) {
    if (type == "entangler") {
        EntanglerSpec s;
        s.a = f.uint("a");
        s.b = f.uint("b");
        s.slots_a = f.opt_range("slots_a");
        s.slots_b = f.opt_range("slots_b");
        s.rounds = f.opt_uint("rounds");
        return s;
    }
    if (type == "swapper") {
        SwapperSpec s;
        s.node = f.uint("node");
        s.low = f.opt_uint("low");
        s.high = f.opt_uint("high");
        s.slots = f.opt_range("slots");
        s.rounds = f.opt_uint("rounds");
        return s;
    }
    if (type == "tracker") {
        TrackerSpec s;
        s.nodes = f.uint_list("nodes");
        return s;
    }
    if (type == "cutoff") {
        CutoffSpec s;
        s.node = f.uint("node");
        s.retention = f.num("retention");
        s.period = f.num_or("period", 1.0);
        return s;
    }
    if (type == "distiller") {
        DistillerSpec s;
        s.a = f.uint("a");
        s.b = f.uint("b");
        s.slots_a = f.opt_range("slots_a");
        s.slots_b = f.opt_range("slots_b");
        s.rounds = f.opt_uint("rounds");
        s.tag = f.str_or("tag", s.tag);
        return s;
    }
    if (type == "stop-when") {
        StopWhenSpec s;
        s.node = f.uint("node");
        f.each("requirements", [&](Fields &r) {
            RequirementSpec q;
            q.type = r.str_or("type", q.type);
            q.remote = r.opt_uint("remote");
            q.slots = r.opt_range("slots");
            q.count = r.uint_or("count", 1);
            s.requirements.push_back(q);
        });
        return s;
    }
    if (type == "graph-state") {
        GraphStateSpec s;
        s.vertices = f.uint_list("vertices");
        s.edges = f.pair_list("edges");
        s.comm_slot = f.uint_or("comm_slot", 0);
        s.storage_slot = f.uint_or("storage_slot", 1);
        return s;
    }
    if (type == "mbqc") {
        MbqcSpec s;
        s.first = f.uint_or("first", 0);
        s.uuid = f.int_or("uuid", 1);
        s.input_fidelity = f.num_list("input_fidelity");
        return s;
    }
    if (type == "qtcp") {
        QtcpSpec s;
        s.endnodes = f.uint_list("endnodes");
        s.window = f.uint_or("window", 1);
        return s;
    }
    throw std::invalid_argument(type);
}

// Validation failures name a field path; the parser maps it back to a line.
struct FieldError {
    std::string path;
    std::string why;
};

[[noreturn]] void bad(const std::string &path, const std::string &why) {
    throw FieldError{path, why};
}

void check_validity(const ScenarioConfig &c) {
    const std::size_t n = c.nodes.size();
    if (n == 0) {
        bad("topology.nodes", "at least one node is required");
    }
    auto node_ok = [&](std::size_t v, const std::string &path) {
        if (v >= n) {
            bad(path, "node " + std::to_string(v) + " does not exist");
        }
    };
    auto range_ok = [&](const std::optional<SlotRange> &r, std::size_t node, const std::string &path) {
        if (r && (r->lo > r->hi || r->hi >= c.nodes[node].slots)) {
            bad(path, "slot range outside the register");
        }
    };
    std::set<std::pair<std::size_t, std::size_t>> qedges;
    for (std::size_t i = 0; i < n; i++) {
        const NodeSpec &ns = c.nodes[i];
        std::string p = "topology.nodes." + std::to_string(i);
        if (ns.slots == 0) {
            bad(p + ".slots", "a register needs at least one slot");
        }
        for (std::size_t j = 0; j < ns.noise.size(); j++) {
            const NoiseSpec &nz = ns.noise[j];
            std::string q = p + ".noise." + std::to_string(j);
            range_ok(nz.slots, i, q + ".slots");
            if (nz.kind != "t1" && nz.kind != "t2" && nz.kind != "depolarization") {
                bad(q + ".kind", "expected t1, t2 or depolarization");
            }
            if (!(nz.time > 0)) {
                bad(q + ".time", "must be positive");
            }
        }
    }
    for (std::size_t i = 0; i < c.quantum_edges.size(); i++) {
        auto [u, v] = c.quantum_edges[i];
        std::string p = "topology.quantum_edges." + std::to_string(i);
        node_ok(u, p);
        node_ok(v, p);
        if (u == v) {
            bad(p, "self loop");
        }
        qedges.insert({std::min(u, v), std::max(u, v)});
    }
    auto adjacent = [&](std::size_t u, std::size_t v) { return qedges.count({std::min(u, v), std::max(u, v)}) > 0; };
    for (std::size_t i = 0; i < c.classical_edges.size(); i++) {
        const auto &e = c.classical_edges[i];
        std::string p = "topology.classical_edges." + std::to_string(i);
        node_ok(e.u, p + ".u");
        node_ok(e.v, p + ".v");
        if (!(e.latency >= 0)) {
            bad(p + ".latency", "must be non-negative");
        }
    }
    if (c.mirror_latency && !(*c.mirror_latency >= 0)) {
        bad("topology.mirror_latency", "must be non-negative");
    }
    if (!(c.link.success_prob > 0 && c.link.success_prob <= 1)) {
        bad("link.success_prob", "must lie in (0, 1]");
    }
    if (!(c.link.attempt_duration > 0)) {
        bad("link.attempt_duration", "must be positive");
    }
    if (!(c.link.fidelity >= 0 && c.link.fidelity <= 1)) {
        bad("link.fidelity", "must lie in [0, 1]");
    }
    try {
        (void)c.link.state();
    } catch (const Error &e) {
        bad("link.pairstate", e.what());
    }

    bool have_qtcp = false;
    std::vector<std::size_t> endnodes;
    for (std::size_t i = 0; i < c.protocols.size(); i++) {
        std::string p = "protocols." + std::to_string(i);
        std::visit(
            [&](const auto &s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, EntanglerSpec> || std::is_same_v<T, DistillerSpec>) {
                    node_ok(s.a, p + ".a");
                    node_ok(s.b, p + ".b");
                    range_ok(s.slots_a, s.a, p + ".slots_a");
                    range_ok(s.slots_b, s.b, p + ".slots_b");
                    if constexpr (std::is_same_v<T, EntanglerSpec>) {
                        if (!adjacent(s.a, s.b)) {
                            bad(p, "nodes are not joined by a quantum edge");
                        }
                    } else if (s.tag.empty()) {
                        bad(p + ".tag", "must not be empty");
                    }
                } else if constexpr (std::is_same_v<T, SwapperSpec>) {
                    node_ok(s.node, p + ".node");
                    if (s.low) {
                        node_ok(*s.low, p + ".low");
                    }
                    if (s.high) {
                        node_ok(*s.high, p + ".high");
                    }
                    range_ok(s.slots, s.node, p + ".slots");
                } else if constexpr (std::is_same_v<T, TrackerSpec>) {
                    for (std::size_t v : s.nodes) {
                        node_ok(v, p + ".nodes");
                    }
                } else if constexpr (std::is_same_v<T, CutoffSpec>) {
                    node_ok(s.node, p + ".node");
                    if (!(s.retention > 0)) {
                        bad(p + ".retention", "must be positive");
                    }
                    if (!(s.period > 0) || std::isinf(s.period)) {
                        bad(p + ".period", "must be positive and finite");
                    }
                } else if constexpr (std::is_same_v<T, StopWhenSpec>) {
                    node_ok(s.node, p + ".node");
                    for (std::size_t j = 0; j < s.requirements.size(); j++) {
                        const auto &r = s.requirements[j];
                        std::string q = p + ".requirements." + std::to_string(j);
                        if (r.remote) {
                            node_ok(*r.remote, q + ".remote");
                        }
                        range_ok(r.slots, s.node, q + ".slots");
                        if (r.count == 0) {
                            bad(q + ".count", "must be at least 1");
                        }
                    }
                } else if constexpr (std::is_same_v<T, GraphStateSpec>) {
                    std::set<std::size_t> seen;
                    for (std::size_t v : s.vertices) {
                        node_ok(v, p + ".vertices");
                        if (!seen.insert(v).second) {
                            bad(p + ".vertices", "duplicate vertex");
                        }
                        if (std::max(s.comm_slot, s.storage_slot) >= c.nodes[v].slots) {
                            bad(p, "node " + std::to_string(v) + " lacks the comm or storage slot");
                        }
                    }
                    if (s.comm_slot == s.storage_slot) {
                        bad(p + ".storage_slot", "must differ from comm_slot");
                    }
                    for (auto [a, b] : s.edges) {
                        if (a >= s.vertices.size() || b >= s.vertices.size()) {
                            bad(p + ".edges", "edge names a missing vertex position");
                        }
                        if (!adjacent(s.vertices[a], s.vertices[b])) {
                            bad(p + ".edges", "graph edge without a quantum edge");
                        }
                    }
                } else if constexpr (std::is_same_v<T, MbqcSpec>) {
                    CssCode code = CssCode::code422();
                    ResourceSpec rs = resource_state_spec(code);
                    std::size_t per_side = code.n + code.k;
                    if (s.first + 2 * per_side > n) {
                        bad(p + ".first", "needs " + std::to_string(2 * per_side) + " nodes");
                    }
                    for (std::size_t v = s.first; v < s.first + 2 * per_side; v++) {
                        if (c.nodes[v].slots < 2) {
                            bad(p, "node " + std::to_string(v) + " needs two slots");
                        }
                    }
                    for (std::size_t side : {s.first, s.first + per_side}) {
                        for (auto [a, b] : rs.edges) {
                            if (!adjacent(side + a, side + b)) {
                                bad(p, "missing quantum edge " + std::to_string(side + a) + "-" +
                                           std::to_string(side + b));
                            }
                        }
                    }
                    for (std::size_t i2 = 0; i2 < code.n; i2++) {
                        if (!adjacent(s.first + i2, s.first + per_side + i2)) {
                            bad(p, "missing quantum edge between code nodes " + std::to_string(s.first + i2) +
                                       " and " + std::to_string(s.first + per_side + i2));
                        }
                    }
                    if (!s.input_fidelity.empty() && s.input_fidelity.size() != code.n) {
                        bad(p + ".input_fidelity", "needs one value per code qubit");
                    }
                    for (double f : s.input_fidelity) {
                        if (!(f >= 0 && f <= 1)) {
                            bad(p + ".input_fidelity", "must lie in [0, 1]");
                        }
                    }
                } else if constexpr (std::is_same_v<T, QtcpSpec>) {
                    if (have_qtcp) {
                        bad(p, "only one qtcp protocol per scenario");
                    }
                    have_qtcp = true;
                    for (std::size_t v : s.endnodes) {
                        node_ok(v, p + ".endnodes");
                    }
                    if (s.window == 0) {
                        bad(p + ".window", "must be at least 1");
                    }
                    endnodes = s.endnodes;
                }
            },
            c.protocols[i]);
    }
    std::set<std::int64_t> uuids;
    for (std::size_t i = 0; i < c.flows.size(); i++) {
        const Flow &f = c.flows[i];
        std::string p = "flows." + std::to_string(i);
        if (!have_qtcp) {
            bad(p, "flows need a qtcp protocol");
        }
        node_ok(f.src, p + ".src");
        node_ok(f.dst, p + ".dst");
        if (f.src == f.dst) {
            bad(p, "src equals dst");
        }
        if (f.npairs == 0) {
            bad(p + ".npairs", "must be at least 1");
        }
        for (std::size_t v : {f.src, f.dst}) {
            if (std::find(endnodes.begin(), endnodes.end(), v) == endnodes.end()) {
                bad(p, "node " + std::to_string(v) + " is not a qtcp end node");
            }
        }
        if (!uuids.insert(f.uuid).second) {
            bad(p + ".uuid", "duplicate flow uuid");
        }
    }
    if (c.t_end && !(*c.t_end > 0)) {
        bad("stop.t_end", "must be positive");
    }
    if (c.outputs.trace_level != "events" && c.outputs.trace_level != "off") {
        bad("outputs.trace_level", "expected events or off");
    }
}

}  // namespace

void validate_scenario(const ScenarioConfig &cfg) {
    try {
        check_validity(cfg);
    } catch (const FieldError &e) {
        config_error(e.path + ": " + e.why);
    }
}

ScenarioConfig parse_scenario(std::string_view text, const std::string &source) {
    toml::table doc;
    try {
        doc = toml::parse(text, source);
    } catch (const toml::parse_error &e) {
        std::ostringstream out;
        out << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
        config_error(out.str());
    }
    Positions pos;
    ScenarioConfig c;
    Fields root(doc, "", source, pos);
    c.name = root.str_or("name", "");
    if (auto b = root.opt_str("backend")) {
        if (*b != "dense" && *b != "stabilizer") {
            root.fail(*root.get("backend"), "backend", "expected dense or stabilizer");
        }
        c.backend = parse_backend(*b);
    }
    c.seed = static_cast<std::uint64_t>(root.int_or("seed", 0));
    if (!root.has("topology")) {
        root.missing("topology");
    }
    root.sub("topology", [&](Fields &t) {
        t.each("nodes", [&](Fields &nf) {
            NodeSpec ns;
            ns.slots = nf.uint("slots");
            nf.each("noise", [&](Fields &zf) {
                NoiseSpec nz;
                auto r = zf.opt_range("slots");
                nz.slots = r.value_or(SlotRange{0, ns.slots - 1});
                nz.kind = zf.str_or("kind", "");
                nz.time = zf.num("time");
                ns.noise.push_back(nz);
            });
            c.nodes.push_back(ns);
        });
        c.quantum_edges = t.pair_list("quantum_edges");
        t.each("classical_edges", [&](Fields &e) {
            c.classical_edges.push_back({e.uint("u"), e.uint("v"), e.num("latency")});
        });
        c.mirror_latency = t.opt_num("mirror_latency");
    });
    root.sub("link", [&](Fields &l) {
        c.link.success_prob = l.num_or("success_prob", c.link.success_prob);
        c.link.attempt_duration = l.num_or("attempt_duration", c.link.attempt_duration);
        c.link.pairstate = l.str_or("pairstate", c.link.pairstate);
        c.link.fidelity = l.num_or("fidelity", c.link.fidelity);
    });
    root.each("protocols", [&](Fields &p) {
        auto type = p.opt_str("type");
        if (!type) {
            p.missing("type");
        }
        try {
            c.protocols.push_back(read_protocol(p, *type));
        } catch (const std::invalid_argument &) {
            p.fail(*p.get("type"), p.at("type"), "unknown protocol type '" + *type + "'");
        }
    });
    root.each("flows", [&](Fields &f) {
        Flow fl;
        fl.src = f.uint("src");
        fl.dst = f.uint("dst");
        fl.npairs = f.uint("npairs");
        fl.uuid = f.int_or("uuid", static_cast<std::int64_t>(c.flows.size() + 1));
        c.flows.push_back(fl);
    });
    root.sub("stop", [&](Fields &s) {
        c.t_end = s.opt_num("t_end");
        auto mode = s.str_or("mode", c.t_end ? "t_end" : "quiescence");
        if ((mode == "quiescence") == c.t_end.has_value() || (mode != "quiescence" && mode != "t_end")) {
            s.fail(*s.get("mode"), "stop.mode", "use mode = \"quiescence\" or give t_end");
        }
    });
    root.sub("outputs", [&](Fields &o) {
        c.outputs.metrics = o.str_or("metrics", "");
        c.outputs.trace = o.str_or("trace", "");
        c.outputs.trace_level = o.str_or("trace_level", c.outputs.trace_level);
    });
    root.finish();

    try {
        check_validity(c);
    } catch (const FieldError &e) {
        // Walk up the path until a recorded position is found.
        std::string p = e.path;
        while (!p.empty() && !pos.count(p)) {
            auto dot = p.rfind('.');
            p = dot == std::string::npos ? "" : p.substr(0, dot);
        }
        toml::source_position at = pos.count(p) ? pos[p] : toml::source_position{1, 1};
        std::ostringstream out;
        out << source << ":" << at.line << ":" << at.column << ": " << e.path << ": " << e.why;
        config_error(out.str());
    }
    return c;
}

ScenarioConfig load_scenario(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        config_error(path + ": cannot open");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

namespace {

toml::array pair_array(std::size_t a, std::size_t b) {
    return toml::array{static_cast<std::int64_t>(a), static_cast<std::int64_t>(b)};
}

toml::array index_array(const std::vector<std::size_t> &v) {
    toml::array a;
    for (std::size_t x : v) {
        a.push_back(static_cast<std::int64_t>(x));
    }
    return a;
}

void put_index(toml::table &t, const char *key, std::size_t v) {
    t.insert(key, static_cast<std::int64_t>(v));
}

void put_opt(toml::table &t, const char *key, const std::optional<std::size_t> &v) {
    if (v) {
        put_index(t, key, *v);
    }
}

void put_range(toml::table &t, const char *key, const std::optional<SlotRange> &r) {
    if (r) {
        t.insert(key, pair_array(r->lo, r->hi));
    }
}

toml::table protocol_table(const ProtocolSpec &p) {
    toml::table t;
    t.insert("type", protocol_type(p));
    std::visit(
        [&](const auto &s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, EntanglerSpec> || std::is_same_v<T, DistillerSpec>) {
                put_index(t, "a", s.a);
                put_index(t, "b", s.b);
                put_range(t, "slots_a", s.slots_a);
                put_range(t, "slots_b", s.slots_b);
                put_opt(t, "rounds", s.rounds);
                if constexpr (std::is_same_v<T, DistillerSpec>) {
                    t.insert("tag", s.tag);
                }
            } else if constexpr (std::is_same_v<T, SwapperSpec>) {
                put_index(t, "node", s.node);
                put_opt(t, "low", s.low);
                put_opt(t, "high", s.high);
                put_range(t, "slots", s.slots);
                put_opt(t, "rounds", s.rounds);
            } else if constexpr (std::is_same_v<T, TrackerSpec>) {
                t.insert("nodes", index_array(s.nodes));
            } else if constexpr (std::is_same_v<T, CutoffSpec>) {
                put_index(t, "node", s.node);
                t.insert("retention", s.retention);
                t.insert("period", s.period);
            } else if constexpr (std::is_same_v<T, StopWhenSpec>) {
                put_index(t, "node", s.node);
                toml::array reqs;
                for (const auto &r : s.requirements) {
                    toml::table q;
                    q.insert("type", r.type);
                    put_opt(q, "remote", r.remote);
                    put_range(q, "slots", r.slots);
                    put_index(q, "count", r.count);
                    reqs.push_back(std::move(q));
                }
                t.insert("requirements", std::move(reqs));
            } else if constexpr (std::is_same_v<T, GraphStateSpec>) {
                t.insert("vertices", index_array(s.vertices));
                toml::array edges;
                for (auto [a, b] : s.edges) {
                    edges.push_back(pair_array(a, b));
                }
                t.insert("edges", std::move(edges));
                put_index(t, "comm_slot", s.comm_slot);
                put_index(t, "storage_slot", s.storage_slot);
            } else if constexpr (std::is_same_v<T, MbqcSpec>) {
                put_index(t, "first", s.first);
                t.insert("uuid", s.uuid);
                toml::array f;
                for (double x : s.input_fidelity) {
                    f.push_back(x);
                }
                t.insert("input_fidelity", std::move(f));
            } else if constexpr (std::is_same_v<T, QtcpSpec>) {
                t.insert("endnodes", index_array(s.endnodes));
                put_index(t, "window", s.window);
            }
        },
        p);
    return t;
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig &c) {
    toml::table doc;
    doc.insert("name", c.name);
    doc.insert("backend", backend_name(c.backend));
    doc.insert("seed", static_cast<std::int64_t>(c.seed));

    toml::table topo;
    toml::array nodes;
    for (const NodeSpec &ns : c.nodes) {
        toml::table n;
        put_index(n, "slots", ns.slots);
        if (!ns.noise.empty()) {
            toml::array noise;
            for (const NoiseSpec &nz : ns.noise) {
                toml::table z;
                z.insert("slots", pair_array(nz.slots.lo, nz.slots.hi));
                z.insert("kind", nz.kind);
                z.insert("time", nz.time);
                noise.push_back(std::move(z));
            }
            n.insert("noise", std::move(noise));
        }
        nodes.push_back(std::move(n));
    }
    topo.insert("nodes", std::move(nodes));
    toml::array qe;
    for (auto [u, v] : c.quantum_edges) {
        qe.push_back(pair_array(u, v));
    }
    topo.insert("quantum_edges", std::move(qe));
    toml::array ce;
    for (const auto &e : c.classical_edges) {
        toml::table t;
        put_index(t, "u", e.u);
        put_index(t, "v", e.v);
        t.insert("latency", e.latency);
        ce.push_back(std::move(t));
    }
    topo.insert("classical_edges", std::move(ce));
    if (c.mirror_latency) {
        topo.insert("mirror_latency", *c.mirror_latency);
    }
    doc.insert("topology", std::move(topo));

    toml::table link;
    link.insert("success_prob", c.link.success_prob);
    link.insert("attempt_duration", c.link.attempt_duration);
    link.insert("pairstate", c.link.pairstate);
    link.insert("fidelity", c.link.fidelity);
    doc.insert("link", std::move(link));

    toml::array protos;
    for (const ProtocolSpec &p : c.protocols) {
        protos.push_back(protocol_table(p));
    }
    doc.insert("protocols", std::move(protos));

    toml::array flows;
    for (const Flow &f : c.flows) {
        toml::table t;
        put_index(t, "src", f.src);
        put_index(t, "dst", f.dst);
        put_index(t, "npairs", f.npairs);
        t.insert("uuid", f.uuid);
        flows.push_back(std::move(t));
    }
    doc.insert("flows", std::move(flows));

    toml::table stop;
    if (c.t_end) {
        stop.insert("mode", "t_end");
        stop.insert("t_end", *c.t_end);
    } else {
        stop.insert("mode", "quiescence");
    }
    doc.insert("stop", std::move(stop));

    toml::table out;
    out.insert("metrics", c.outputs.metrics);
    out.insert("trace", c.outputs.trace);
    out.insert("trace_level", c.outputs.trace_level);
    doc.insert("outputs", std::move(out));

    std::ostringstream s;
    s << doc << "\n";
    return s.str();
}

std::string set_scenario_param(std::string_view text, const std::string &path, double value) {
    toml::table doc;
    try {
        doc = toml::parse(text);
    } catch (const toml::parse_error &e) {
        config_error(std::string("cannot parse scenario: ") + std::string(e.description()));
    }
    toml::node *node = &doc;
    std::stringstream parts(path);
    std::string seg;
    while (node && std::getline(parts, seg, '.')) {
        if (auto *t = node->as_table()) {
            node = t->get(seg);
        } else if (auto *a = node->as_array()) {
            char *end = nullptr;
            unsigned long i = std::strtoul(seg.c_str(), &end, 10);
            node = (!seg.empty() && *end == '\0') ? a->get(i) : nullptr;
        } else {
            node = nullptr;
        }
    }
    if (!node || path.empty()) {
        throw Error("no-such-param", path);
    }
    if (auto *i = node->as_integer()) {
        if (value != std::floor(value)) {
            throw Error("no-such-param", path + " is an integer parameter");
        }
        *i = static_cast<std::int64_t>(value);
    } else if (auto *f = node->as_floating_point()) {
        *f = value;
    } else {
        throw Error("no-such-param", path + " is not numeric");
    }
    std::ostringstream s;
    s << doc << "\n";
    return s.str();
}

namespace {

NoiseProcess noise_of(const NoiseSpec &nz) {
    if (nz.kind == "t1") {
        return NoiseProcess::t1_decay(nz.time);
    }
    if (nz.kind == "t2") {
        return NoiseProcess::t2_dephasing(nz.time);
    }
    return NoiseProcess::depolarization(nz.time);
}

SlotFilter filter_of(const std::optional<SlotRange> &r) {
    return r ? slot_range(r->lo, r->hi) : SlotFilter{};
}

Process graph_and_check(RegisterNet &net, GraphConstructorConfig gc) {
    ProcessId pid = net.engine().spawn(graph_state_constructor(net, gc), "graph-constructor");
    co_await Condition::done(pid);
    bool ok = graph_state_holds(net, gc.spec);
    MetricsRecord rec;
    rec.kind = ok ? "cluster-ok" : "cluster-fail";
    rec.nodes = gc.spec.vertices;
    net.record(rec);
    co_return ok;
}

Process mbqc_and_record(RegisterNet &net, MbqcConfig cfg) {
    ProcessId pid = net.engine().spawn(mbqc_session(net, cfg), "mbqc-session");
    Wake w = co_await Condition::done(pid);
    bool ok = std::any_cast<MbqcOutcome>(w.value).success;
    MetricsRecord rec;
    rec.kind = "mbqc";
    rec.nodes = {cfg.alice[0], cfg.bob[0]};
    rec.uuid = cfg.uuid;
    rec.detail = ok ? "success" : "failure";
    net.record(rec);
    co_return ok;
}

// Pair-update messages delivered but not yet handled by a tracker.
bool pending_updates(RegisterNet &net) {
    for (std::size_t v = 0; v < net.size(); v++) {
        for (const TagEntry &e : net.buffer(v).entries()) {
            if (e.tag.type == vocab::UpdateX || e.tag.type == vocab::UpdateZ || e.tag.type == vocab::Delete) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig &cfg, bool trace, const std::function<void(RegisterNet &)> &inspect) {
    validate_scenario(cfg);
    Engine eng(cfg.seed);
    eng.set_tracing(trace && cfg.outputs.trace_level != "off");

    std::vector<RegisterSpec> regs;
    for (const NodeSpec &ns : cfg.nodes) {
        RegisterSpec rs;
        rs.slots = ns.slots;
        rs.noise.assign(ns.slots, NoiseProcess::none());
        for (const NoiseSpec &nz : ns.noise) {
            for (std::size_t s = nz.slots.lo; s <= nz.slots.hi; s++) {
                rs.noise[s] = noise_of(nz);
            }
        }
        regs.push_back(rs);
    }
    RegisterNet net(eng, regs, cfg.backend);
    for (auto [u, v] : cfg.quantum_edges) {
        net.add_quantum_edge(u, v);
    }
    if (cfg.mirror_latency) {
        net.mirror_classical(*cfg.mirror_latency);
    }
    for (const auto &e : cfg.classical_edges) {
        net.add_classical_edge(e.u, e.v, e.latency);
    }

    const SymState pair = cfg.link.state();
    for (const ProtocolSpec &p : cfg.protocols) {
        std::visit(
            [&](const auto &s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, EntanglerSpec>) {
                    EntanglerConfig ec;
                    ec.node_a = s.a;
                    ec.node_b = s.b;
                    ec.pairstate = pair;
                    ec.choose_a = filter_of(s.slots_a);
                    ec.choose_b = filter_of(s.slots_b);
                    ec.success_prob = cfg.link.success_prob;
                    ec.attempt_duration = cfg.link.attempt_duration;
                    ec.rounds = s.rounds;
                    eng.spawn(entangler_prot(net, ec), "entangler");
                } else if constexpr (std::is_same_v<T, SwapperSpec>) {
                    SwapperConfig sc;
                    sc.node = s.node;
                    sc.node_l = s.low ? node_is(*s.low) : node_below(s.node);
                    sc.node_h = s.high ? node_is(*s.high) : node_above(s.node);
                    sc.chooseslots = filter_of(s.slots);
                    sc.rounds = s.rounds;
                    eng.spawn(swapper_prot(net, sc), "swapper");
                } else if constexpr (std::is_same_v<T, TrackerSpec>) {
                    std::vector<std::size_t> nodes = s.nodes;
                    if (nodes.empty()) {
                        for (std::size_t v = 0; v < net.size(); v++) {
                            nodes.push_back(v);
                        }
                    }
                    for (std::size_t v : nodes) {
                        eng.spawn(entanglement_tracker(net, v), "tracker");
                    }
                } else if constexpr (std::is_same_v<T, CutoffSpec>) {
                    start_cutoff(net, CutoffConfig{s.node, s.retention, s.period});
                } else if constexpr (std::is_same_v<T, DistillerSpec>) {
                    DistillerConfig dc;
                    dc.node_a = s.a;
                    dc.node_b = s.b;
                    dc.tag = Symbol(s.tag);
                    dc.choose_a = filter_of(s.slots_a);
                    dc.choose_b = filter_of(s.slots_b);
                    dc.rounds = s.rounds;
                    eng.spawn(distiller_prot(net, dc), "distiller");
                } else if constexpr (std::is_same_v<T, StopWhenSpec>) {
                    StopConfig sc;
                    sc.node = s.node;
                    for (const auto &r : s.requirements) {
                        sc.requirements.push_back({Symbol(r.type), r.remote, filter_of(r.slots), r.count});
                    }
                    eng.spawn(stop_when_prot(net, sc), "stop-when");
                } else if constexpr (std::is_same_v<T, GraphStateSpec>) {
                    GraphConstructorConfig gc;
                    gc.spec.vertices = s.vertices;
                    gc.spec.edges = s.edges;
                    gc.spec.comm_slot = s.comm_slot;
                    gc.spec.storage_slot = s.storage_slot;
                    gc.success_prob = cfg.link.success_prob;
                    gc.attempt_duration = cfg.link.attempt_duration;
                    eng.spawn(graph_and_check(net, gc), "graph-state");
                } else if constexpr (std::is_same_v<T, MbqcSpec>) {
                    MbqcConfig mc = mbqc_layout(CssCode::code422());
                    for (auto &v : mc.alice) {
                        v += s.first;
                    }
                    for (auto &v : mc.bob) {
                        v += s.first;
                    }
                    mc.uuid = s.uuid;
                    mc.success_prob = cfg.link.success_prob;
                    mc.attempt_duration = cfg.link.attempt_duration;
                    for (double f : s.input_fidelity) {
                        mc.input_pairs.push_back(f >= 1.0 ? perfect_pair() : depolarized_pair(f));
                    }
                    eng.spawn(mbqc_and_record(net, mc), "mbqc");
                } else if constexpr (std::is_same_v<T, QtcpSpec>) {
                    LinkModel lm{cfg.link.success_prob, cfg.link.attempt_duration, pair};
                    start_qtcp(net, s.endnodes, lm, std::make_shared<StaticWindow>(s.window),
                               std::make_shared<QtcpAudit>());
                }
            },
            p);
    }
    for (const Flow &f : cfg.flows) {
        submit_flow(net, f);
    }

    RunResult res;
    res.end_time = cfg.t_end ? eng.run_until(*cfg.t_end) : eng.run();
    res.events = eng.events_processed();
    res.peak_dimension = net.peak_dimension();

    net.check_invariants();
    if (net.messages_in_flight == 0 && !pending_updates(net)) {
        auto orphans = unreciprocated_tags(net);
        if (!orphans.empty()) {
            std::string all;
            for (const auto &o : orphans) {
                all += (all.empty() ? "" : "; ") + o;
            }
            throw InvariantViolation("unreciprocated pair tags: " + all);
        }
    }
    if (inspect) {
        inspect(net);
    }
    res.metrics = net.metrics;
    if (eng.tracing()) {
        std::ostringstream t;
        eng.write_trace(t);
        res.trace = t.str();
    }
    return res;
}

std::optional<double> metric_value(const std::vector<MetricsRecord> &records, const std::string &metric) {
    auto dot = metric.rfind('.');
    if (dot == std::string::npos) {
        throw Error("invalid-metric", metric + " (expected kind.field)");
    }
    std::string kind = metric.substr(0, dot);
    std::string field = metric.substr(dot + 1);
    if (field != "fidelity" && field != "latency" && field != "time" && field != "count") {
        throw Error("invalid-metric", "field must be fidelity, latency, time or count");
    }
    double sum = 0;
    std::size_t n = 0;
    std::size_t count = 0;
    for (const MetricsRecord &r : records) {
        if (r.kind != kind) {
            continue;
        }
        count++;
        std::optional<double> v;
        if (field == "fidelity") {
            v = r.fidelity;
        } else if (field == "latency") {
            v = r.latency;
        } else if (field == "time") {
            v = r.time;
        }
        if (v) {
            sum += *v;
            n++;
        }
    }
    if (field == "count") {
        return static_cast<double>(count);
    }
    return n ? std::optional(sum / static_cast<double>(n)) : std::nullopt;
}

std::vector<SweepRow> sweep_scenario(std::string_view text, const std::string &param, const std::vector<double> &grid,
                                     const std::string &metric, std::size_t repeats) {
    if (grid.empty()) {
        throw Error("empty-grid", "sweep needs at least one grid value");
    }
    if (repeats == 0) {
        throw Error("invalid-repeats", "need at least one repeat");
    }
    const std::string canonical = serialize_scenario(parse_scenario(text));
    // Fail on a bad parameter before running anything.
    (void)set_scenario_param(canonical, param, grid.front());
    std::vector<SweepRow> rows;
    for (double value : grid) {
        ScenarioConfig cfg = parse_scenario(set_scenario_param(canonical, param, value), "sweep");
        const std::uint64_t base = cfg.seed;
        std::vector<double> samples;
        for (std::size_t r = 0; r < repeats; r++) {
            cfg.seed = base + r;
            if (auto v = metric_value(run_scenario(cfg).metrics, metric)) {
                samples.push_back(*v);
            }
        }
        SweepRow row;
        row.value = value;
        row.samples = samples.size();
        if (!samples.empty()) {
            double mean = 0;
            for (double s : samples) {
                mean += s;
            }
            mean /= static_cast<double>(samples.size());
            double var = 0;
            for (double s : samples) {
                var += (s - mean) * (s - mean);
            }
            row.mean = mean;
            if (samples.size() > 1) {
                var /= static_cast<double>(samples.size() - 1);
                row.stderr_ = std::sqrt(var / static_cast<double>(samples.size()));
            }
        } else {
            row.mean = std::nan("");
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string shortest(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

void write_sweep_csv(std::ostream &out, const std::string &param, const std::vector<SweepRow> &rows) {
    out << param << ",mean,stderr,samples\n";
    for (const SweepRow &r : rows) {
        out << shortest(r.value) << "," << shortest(r.mean) << "," << shortest(r.stderr_) << "," << r.samples << "\n";
    }
}

}  // namespace qnet
