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

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pregraph/checker.hpp"
#include "pregraph/scenario.hpp"

namespace pregraph {

/// Command-line settings that replace scenario fields when present.
struct ScenarioOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<SimTime> max_delay;
    std::optional<std::string> leader_strategy;
    std::optional<bool> colocate_leaders;
    std::optional<std::size_t> cycle_cap;
};

/// Applies the overrides and re-validates.
void apply_overrides(Scenario& scenario, const ScenarioOverrides& overrides);

struct CampaignFailure {
    std::uint64_t index = 0;
    std::string name;
    std::vector<Violation> violations;
};

struct CampaignSummary {
    std::uint64_t seed = 0;
    std::uint64_t count = 0;
    std::uint64_t passed = 0;
    std::uint64_t transactions = 0;
    std::uint64_t committed = 0;
    std::uint64_t aborted = 0;
    std::uint64_t multi_site_decisions = 0;  // transactions decided at two or more sites
    std::uint64_t crash_runs = 0;
    std::uint64_t leader_crash_runs = 0;  // runs crashing some group's initial leader
    std::vector<CampaignFailure> failures;

    bool ok() const { return failures.empty(); }
    nlohmann::ordered_json to_json() const;
    std::string text() const;
};

/// Runs scenarios 0..count-1 of the campaign through the simulator and the
/// checker. `progress` (optional) is called after each scenario.
CampaignSummary run_campaign(const CampaignTemplate& tmpl, std::uint64_t seed, std::uint64_t count,
                             const ScenarioOverrides& overrides = {},
                             const std::function<void(std::uint64_t, bool)>& progress = {});

}  // namespace pregraph
