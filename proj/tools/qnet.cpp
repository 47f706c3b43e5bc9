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


// Scenario runner.
//
//   qnet run <scenario> [--seed N] [--backend stabilizer|dense] [--until T]
//            [--metrics PATH] [--trace PATH]
//   qnet sweep <scenario> --param NAME --grid a,b,c --metric NAME
//              [--repeats K] [--out PATH]
//
// Exit status: 0 ok, 1 configuration error, 2 invariant violation.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qnet/error.hpp"
#include "qnet/metrics.hpp"
#include "qnet/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfig = 1;
constexpr int kInvariant = 2;

std::string read_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw qnet::Error("config", path + ": cannot open");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) {
        throw qnet::Error("config", path + ": cannot write");
    }
}

struct RunArgs {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> backend;
    std::optional<double> until;
    std::optional<std::string> metrics;
    std::optional<std::string> trace;
};

int run(const RunArgs &a) {
    qnet::ScenarioConfig cfg = qnet::parse_scenario(read_file(a.scenario), a.scenario);
    if (a.seed) {
        cfg.seed = *a.seed;
    }
    if (a.backend) {
        cfg.backend = qnet::parse_backend(*a.backend);
    }
    if (a.until) {
        cfg.t_end = *a.until;
    }
    if (a.metrics) {
        cfg.outputs.metrics = *a.metrics;
    }
    if (a.trace) {
        cfg.outputs.trace = *a.trace;
    }
    qnet::validate_scenario(cfg);

    qnet::RunResult res = qnet::run_scenario(cfg, !cfg.outputs.trace.empty());
    std::ostringstream csv;
    qnet::write_metrics_csv(csv, res.metrics);
    if (!cfg.outputs.metrics.empty()) {
        write_file(cfg.outputs.metrics, csv.str());
    }
    if (!cfg.outputs.trace.empty() && cfg.outputs.trace_level != "off") {
        write_file(cfg.outputs.trace, res.trace);
    }
    std::cerr << cfg.name << ": " << res.metrics.size() << " metrics records, " << res.events << " events, t = "
              << res.end_time << "\n";
    return kOk;
}

struct SweepArgs {
    std::string scenario;
    std::string param;
    std::vector<std::string> grid;
    std::string metric;
    std::size_t repeats = 1;
    std::string out = "-";
};

// Empty items are dropped so that --grid "" reaches the empty-grid check.
std::vector<double> parse_grid(const std::vector<std::string> &items) {
    std::vector<double> grid;
    for (const std::string &item : items) {
        if (item.empty()) {
            continue;
        }
        double v = 0;
        auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || end != item.data() + item.size()) {
            throw qnet::Error("config", "--grid: not a number: " + item);
        }
        grid.push_back(v);
    }
    return grid;
}

int sweep(const SweepArgs &a) {
    auto rows = qnet::sweep_scenario(read_file(a.scenario), a.param, parse_grid(a.grid), a.metric, a.repeats);
    std::ostringstream csv;
    qnet::write_sweep_csv(csv, a.param, rows);
    if (a.out == "-") {
        std::cout << csv.str();
    } else {
        write_file(a.out, csv.str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Discrete-event quantum network simulator"};
    app.require_subcommand(1);

    RunArgs ra;
    CLI::App *run_cmd = app.add_subcommand("run", "Run one scenario");
    run_cmd->add_option("scenario", ra.scenario, "Scenario TOML file")->required();
    run_cmd->add_option("--seed", ra.seed, "Override the seed");
    run_cmd->add_option("--backend", ra.backend, "Override the backend")
        ->check(CLI::IsMember({"stabilizer", "dense"}));
    run_cmd->add_option("--until", ra.until, "Stop at this simulated time");
    run_cmd->add_option("--metrics", ra.metrics, "Metrics CSV output path");
    run_cmd->add_option("--trace", ra.trace, "NDJSON event trace output path");

    SweepArgs sa;
    CLI::App *sweep_cmd = app.add_subcommand("sweep", "Run a scenario over a parameter grid");
    sweep_cmd->add_option("scenario", sa.scenario, "Scenario TOML file")->required();
    sweep_cmd->add_option("--param", sa.param, "Dotted parameter path, e.g. link.fidelity")->required();
    sweep_cmd->add_option("--grid", sa.grid, "Comma separated values")->required()->delimiter(',');
    sweep_cmd->add_option("--metric", sa.metric, "kind.field, e.g. pair-delivered.fidelity")->required();
    sweep_cmd->add_option("--repeats", sa.repeats, "Runs per grid value (seed, seed+1, ...)");
    sweep_cmd->add_option("--out", sa.out, "Output CSV path, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (run_cmd->parsed()) {
            return run(ra);
        }
        return sweep(sa);
    } catch (const qnet::InvariantViolation &e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kInvariant;
    } catch (const qnet::Error &e) {
        const std::string &c = e.code();
        if (c == "config" || c == "no-such-param" || c == "empty-grid" || c == "invalid-metric" ||
            c == "invalid-repeats" || c == "unknown-backend") {
            std::cerr << "configuration error: " << e.what() << "\n";
            return kConfig;
        }
        std::cerr << "runtime failure: " << e.what() << "\n";
        return kInvariant;
    }
}
