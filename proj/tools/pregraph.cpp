// Copyright 2026 The pregraph Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// pregraph: run scenarios, check traces, run campaigns, report metrics.
//
// Exit codes: 0 success, 1 check failure, 2 usage error, 3 scenario error.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "pregraph/campaign.hpp"
#include "pregraph/checker.hpp"
#include "pregraph/simulator.hpp"

namespace {

constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kScenarioError = 3;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("pregraph");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("PREGRAPH_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

struct Options {
    std::string scenario_path;
    std::string trace_path;
    std::string trace_out;
    std::string report_out;
    std::string template_path;
    std::uint64_t count = 1000;
    std::uint64_t seed = 0;
    pregraph::SimTime max_delay = 0;
    std::string leader_strategy;
    bool colocate = false;
    std::size_t cycle_cap = 0;
    int ops = 1;
    int degree = 1;
};

pregraph::ScenarioOverrides overrides_from(const CLI::App& cmd, const Options& o) {
    pregraph::ScenarioOverrides ov;
    if (cmd.count("--seed")) ov.seed = o.seed;
    if (cmd.count("--max-delay")) ov.max_delay = o.max_delay;
    if (cmd.count("--leader-strategy")) ov.leader_strategy = o.leader_strategy;
    if (cmd.count("--colocate-leaders")) ov.colocate_leaders = o.colocate;
    if (cmd.count("--cycle-cap")) ov.cycle_cap = o.cycle_cap;
    return ov;
}

void add_scenario_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--max-delay", o.max_delay, "Upper bound of the per-hop delay")->check(CLI::PositiveNumber);
    cmd->add_option("--leader-strategy", o.leader_strategy, "Weak leader strategy")
        ->check(CLI::IsMember({"self", "min-alive"}));
    cmd->add_flag("--colocate-leaders", o.colocate, "Sequence at the weak leader (one hop less)");
    cmd->add_option("--cycle-cap", o.cycle_cap, "Cycle budget for the feedback vertex set heuristic")
        ->check(CLI::PositiveNumber);
}

int cmd_run(const CLI::App& cmd, const Options& o) {
    pregraph::Scenario s = pregraph::load_scenario(o.scenario_path);
    pregraph::apply_overrides(s, overrides_from(cmd, o));
    spdlog::info("running {} with seed {}", s.name, s.seed);
    pregraph::RunResult run = pregraph::run_scenario(s);
    spdlog::info("quiescent at t={} after {} events", run.end_time, run.steps);
    if (o.trace_out.empty()) {
        pregraph::write_trace(std::cout, run.trace);
    } else {
        pregraph::save_trace(o.trace_out, run.trace);
    }
    return 0;
}

int cmd_check(const Options& o) {
    pregraph::Trace trace;
    try {
        trace = pregraph::load_trace(o.trace_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return kCheckFailed;
    }
    pregraph::CheckReport report = pregraph::check_trace(trace);
    std::cout << report.text();
    if (!o.report_out.empty()) write_text(o.report_out, report.to_json().dump(2) + "\n");
    return report.ok() ? 0 : kCheckFailed;
}

int cmd_campaign(const CLI::App& cmd, const Options& o) {
    pregraph::CampaignTemplate tmpl;
    if (!o.template_path.empty()) {
        std::ifstream in(o.template_path);
        if (!in) throw pregraph::InvalidScenario("cannot open template " + o.template_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw pregraph::InvalidScenario(o.template_path + ": " + e.what());
        }
        tmpl = pregraph::campaign_template_from_json(j);
    }
    pregraph::ScenarioOverrides ov = overrides_from(cmd, o);
    auto summary = pregraph::run_campaign(tmpl, o.seed, o.count, ov, [](std::uint64_t i, bool ok) {
        if (!ok) spdlog::warn("scenario {} failed", i);
        if ((i + 1) % 100 == 0) spdlog::info("{} scenarios done", i + 1);
    });
    std::cout << summary.text();
    if (!o.report_out.empty()) write_text(o.report_out, summary.to_json().dump(2) + "\n");
    return summary.ok() ? 0 : kCheckFailed;
}

int cmd_metrics(const Options& o) {
    pregraph::Trace trace = pregraph::load_trace(o.trace_path);
    pregraph::MetricsReport m = pregraph::account_messages(trace);
    std::cout << m.table(o.ops, o.degree);
    if (!o.report_out.empty()) write_text(o.report_out, m.to_json().dump(2) + "\n");
    return m.within_bounds(o.ops, o.degree) ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Partial-replication certification simulator and trace checker"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Simulate a scenario and write its trace");
    run->add_option("scenario", o.scenario_path, "Scenario file")->required();
    run->add_option("--seed", o.seed, "Replace the scenario seed");
    run->add_option("--trace-out", o.trace_out, "Trace destination (default stdout)");
    add_scenario_flags(run, o);

    auto* check = app.add_subcommand("check", "Check a trace");
    check->add_option("trace", o.trace_path, "Trace file")->required();
    check->add_option("--report-out", o.report_out, "Write the verdict as JSON");

    auto* campaign = app.add_subcommand("campaign", "Run seeded random scenarios through run and check");
    campaign->add_option("count", o.count, "Number of scenarios")->check(CLI::PositiveNumber);
    campaign->add_option("--seed", o.seed, "Campaign seed");
    campaign->add_option("--template", o.template_path, "JSON file with parameter ranges");
    campaign->add_option("--report-out", o.report_out, "Write the summary as JSON");
    add_scenario_flags(campaign, o);

    auto* metrics = app.add_subcommand("metrics", "Per-transaction message and delay accounting");
    metrics->add_option("trace", o.trace_path, "Trace file")->required();
    metrics->add_option("--ops,-o", o.ops, "Operations per transaction")->check(CLI::PositiveNumber);
    metrics->add_option("--degree,-d", o.degree, "Replication degree")->check(CLI::PositiveNumber);
    metrics->add_option("--report-out", o.report_out, "Write the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*run) return cmd_run(*run, o);
        if (*check) return cmd_check(o);
        if (*campaign) return cmd_campaign(*campaign, o);
        if (*metrics) return cmd_metrics(o);
    } catch (const pregraph::InvalidScenario& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return kScenarioError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kUsage;
}
