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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pregraph/model.hpp"
#include "pregraph/precedence_graph.hpp"
#include "pregraph/replica.hpp"

namespace pregraph {

struct InvalidScenario : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FaultSpec {
    SiteId site;
    SimTime time = 0;
};

struct Scenario {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    ReplicationMap map;
    SimTime max_delay = 1;
    SimTime suspicion_delay = 5;
    std::string leader_strategy = "min-alive";
    bool colocate_leaders = false;
    std::size_t cycle_cap = kDefaultCycleCap;
    std::uint64_t step_cap = 5'000'000;
    std::vector<FaultSpec> faults;
    std::vector<TxnSpec> transactions;
};

/// Random workload over an existing placement, expanded at load time.
struct WorkloadSpec {
    int transactions = 10;
    int ops_min = 1;
    int ops_max = 3;
    double read_ratio = 0.5;
    SimTime arrival_span = 20;
};

/// Fills `scenario.transactions` from `spec` using `seed`. Reads are only
/// placed on items the origin replicates.
void expand_workload(Scenario& scenario, const WorkloadSpec& spec, std::uint64_t seed);

/// Throws InvalidScenario on unknown sites or items, duplicate ids, reads
/// at non-replicas, bad parameters, or faults that leave an item with no
/// correct replica.
void validate(const Scenario& scenario);

/// Scenario files are JSON. Throws InvalidScenario on any parse or shape error.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);

/// Ranges for randomized campaigns. Each pair is an inclusive range.
struct CampaignTemplate {
    std::pair<int, int> sites{3, 9};
    std::pair<int, int> items{2, 6};
    std::pair<int, int> degree{1, 3};
    std::pair<int, int> transactions{5, 40};
    std::pair<int, int> ops{1, 4};
    std::pair<int, int> crashes{0, 2};
    std::pair<SimTime, SimTime> max_delay{1, 4};
    double read_ratio = 0.5;
    double leader_crash_ratio = 0.25;  // share of crashing runs that hit an initial leader
    SimTime arrival_span = 40;
};

CampaignTemplate campaign_template_from_json(const nlohmann::json& j);
/// Deterministic scenario number `index` of the campaign seeded with `seed`.
Scenario generate_scenario(const CampaignTemplate& tmpl, std::uint64_t seed, std::uint64_t index);

}  // namespace pregraph
