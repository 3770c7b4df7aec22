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

#include "pregraph/campaign.hpp"

#include <sstream>

#include <fmt/format.h>

#include "pregraph/simulator.hpp"

namespace pregraph {

void apply_overrides(Scenario& s, const ScenarioOverrides& o) {
    if (o.seed) s.seed = *o.seed;
    if (o.max_delay) s.max_delay = *o.max_delay;
    if (o.leader_strategy) s.leader_strategy = *o.leader_strategy;
    if (o.colocate_leaders) s.colocate_leaders = *o.colocate_leaders;
    if (o.cycle_cap) s.cycle_cap = *o.cycle_cap;
    validate(s);
}

CampaignSummary run_campaign(const CampaignTemplate& tmpl, std::uint64_t seed, std::uint64_t count,
                             const ScenarioOverrides& overrides,
                             const std::function<void(std::uint64_t, bool)>& progress) {
    CampaignSummary sum;
    sum.seed = seed;
    sum.count = count;
    for (std::uint64_t i = 0; i < count; ++i) {
        Scenario s = generate_scenario(tmpl, seed, i);
        ScenarioOverrides o = overrides;
        o.seed.reset();  // every generated scenario keeps its own seed
        apply_overrides(s, o);

        if (!s.faults.empty()) ++sum.crash_runs;
        bool leader_crash = false;
        for (const auto& f : s.faults) {
            for (const auto& [_, reps] : s.map.placement()) leader_crash = leader_crash || *reps.begin() == f.site;
        }
        if (leader_crash) ++sum.leader_crash_runs;

        CampaignFailure failure{i, s.name, {}};
        try {
            RunResult run = run_scenario(s);
            CheckReport report = check_trace(run.trace);
            failure.violations = report.verdict.violations;
            sum.transactions += report.transactions;
            sum.committed += report.committed;
            sum.aborted += report.aborted;
            TraceView view = index_trace(run.trace);
            std::map<TransactionId, SiteSet> deciders;
            for (const auto& [t, sites] : view.commits) deciders[t].insert(sites.begin(), sites.end());
            for (const auto& [t, sites] : view.aborts) deciders[t].insert(sites.begin(), sites.end());
            for (const auto& [_, sites] : deciders) sum.multi_site_decisions += sites.size() >= 2;
        } catch (const std::exception& e) {
            failure.violations.push_back({"run_error", e.what()});
        }
        const bool ok = failure.violations.empty();
        if (ok) {
            ++sum.passed;
        } else {
            sum.failures.push_back(std::move(failure));
        }
        if (progress) progress(i, ok);
    }
    return sum;
}

nlohmann::ordered_json CampaignSummary::to_json() const {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["count"] = count;
    j["passed"] = passed;
    j["failed"] = failures.size();
    j["transactions"] = transactions;
    j["committed"] = committed;
    j["aborted"] = aborted;
    j["multi_site_decisions"] = multi_site_decisions;
    j["crash_runs"] = crash_runs;
    j["leader_crash_runs"] = leader_crash_runs;
    auto& arr = j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : failures) {
        nlohmann::ordered_json fj;
        fj["index"] = f.index;
        fj["name"] = f.name;
        auto& vs = fj["violations"] = nlohmann::ordered_json::array();
        for (const auto& v : f.violations) vs.push_back({{"kind", v.kind}, {"detail", v.detail}});
        arr.push_back(std::move(fj));
    }
    return j;
}

std::string CampaignSummary::text() const {
    std::ostringstream out;
    out << fmt::format("campaign seed {}: {} scenarios, {} passed, {} failed\n", seed, count, passed, failures.size());
    out << fmt::format("transactions {}  committed {}  aborted {}  decided at 2+ sites {}\n", transactions, committed,
                       aborted, multi_site_decisions);
    out << fmt::format("runs with crashes {}  runs crashing an initial leader {}\n", crash_runs, leader_crash_runs);
    for (const auto& f : failures) {
        out << fmt::format("FAIL #{} {}\n", f.index, f.name);
        for (const auto& v : f.violations) out << "  [" << v.kind << "] " << v.detail << '\n';
    }
    return out.str();
}

}  // namespace pregraph
