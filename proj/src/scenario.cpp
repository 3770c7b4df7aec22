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

#include "pregraph/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace pregraph {

namespace {

std::string padded(const char* prefix, std::uint64_t i, int width) {
    std::string n = std::to_string(i);
    if (static_cast<int>(n.size()) < width) n.insert(0, static_cast<std::size_t>(width) - n.size(), '0');
    return prefix + n;
}

template <class T>
T pick(std::mt19937_64& rng, const std::vector<T>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int in_range(std::mt19937_64& rng, std::pair<int, int> r) { return std::uniform_int_distribution<int>(r.first, r.second)(rng); }

/// One random transaction at `origin` with `n_ops` operations.
TxnSpec random_txn(std::mt19937_64& rng, const ReplicationMap& map, const TransactionId& id, const SiteId& origin,
                   int n_ops, double read_ratio, SimTime start) {
    std::vector<DataItemId> local, all;
    for (const auto& item : map.items()) {
        all.push_back(item);
        if (map.replicates(origin, item)) local.push_back(item);
    }
    std::bernoulli_distribution read(read_ratio);
    TxnSpec t{id, origin, start, {}};
    for (int k = 0; k < n_ops; ++k) {
        if (!local.empty() && read(rng)) {
            t.ops.push_back(OpSpec{OpKind::Read, pick(rng, local), std::nullopt});
        } else {
            // Writes mostly stay local, but blind remote writes are allowed.
            bool remote = local.empty() || std::bernoulli_distribution(0.3)(rng);
            t.ops.push_back(OpSpec{OpKind::Write, remote ? pick(rng, all) : pick(rng, local), std::nullopt});
        }
    }
    return t;
}

}  // namespace

void expand_workload(Scenario& scenario, const WorkloadSpec& spec, std::uint64_t seed) {
    if (spec.transactions < 0 || spec.ops_min < 1 || spec.ops_max < spec.ops_min || spec.arrival_span < 0 ||
        spec.read_ratio < 0.0 || spec.read_ratio > 1.0) {
        throw InvalidScenario("bad workload parameters");
    }
    std::mt19937_64 rng(seed);
    std::vector<SiteId> sites(scenario.map.sites().begin(), scenario.map.sites().end());
    for (int i = 0; i < spec.transactions; ++i) {
        SiteId origin = pick(rng, sites);
        int n = in_range(rng, {spec.ops_min, spec.ops_max});
        SimTime start = std::uniform_int_distribution<SimTime>(0, spec.arrival_span)(rng);
        scenario.transactions.push_back(random_txn(rng, scenario.map, TransactionId(padded("T", i + 1, 4)), origin, n,
                                                   spec.read_ratio, start));
    }
}

void validate(const Scenario& s) {
    if (s.map.sites().empty()) throw InvalidScenario("no sites");
    if (s.max_delay < 1) throw InvalidScenario("max_delay must be at least 1");
    if (s.suspicion_delay < 1) throw InvalidScenario("suspicion_delay must be at least 1");
    if (s.leader_strategy != "self" && s.leader_strategy != "min-alive") {
        throw InvalidScenario("unknown leader strategy '" + s.leader_strategy + "'");
    }
    if (s.cycle_cap < 1) throw InvalidScenario("cycle_cap must be positive");
    if (s.step_cap < 1) throw InvalidScenario("step_cap must be positive");

    std::set<TransactionId> ids;
    for (const auto& t : s.transactions) {
        if (t.id.empty() || t.id == kInitialWriter) throw InvalidScenario("invalid transaction id '" + t.id.str() + "'");
        if (!ids.insert(t.id).second) throw InvalidScenario("duplicate transaction " + t.id.str());
        if (!s.map.sites().contains(t.origin)) throw InvalidScenario(t.id.str() + ": unknown origin " + t.origin.str());
        if (t.start < 0) throw InvalidScenario(t.id.str() + ": negative start");
        if (t.ops.empty()) throw InvalidScenario(t.id.str() + ": no operations");
        for (const auto& op : t.ops) {
            if (!s.map.placement().contains(op.item)) {
                throw InvalidScenario(t.id.str() + ": unknown item " + op.item.str());
            }
            if (op.kind == OpKind::Read && op.value) throw InvalidScenario(t.id.str() + ": read with a value");
            if (op.kind == OpKind::Read && !s.map.replicates(t.origin, op.item)) {
                throw InvalidScenario(t.id.str() + ": reads " + op.item.str() + " which " + t.origin.str() +
                                      " does not replicate");
            }
        }
    }
    SiteSet faulty;
    for (const auto& f : s.faults) {
        if (!s.map.sites().contains(f.site)) throw InvalidScenario("fault at unknown site " + f.site.str());
        if (f.time < 0) throw InvalidScenario("fault at negative time");
        if (!faulty.insert(f.site).second) throw InvalidScenario("site " + f.site.str() + " crashes twice");
    }
    for (const auto& [item, replicas] : s.map.placement()) {
        if (std::all_of(replicas.begin(), replicas.end(), [&](const SiteId& r) { return faulty.contains(r); })) {
            throw InvalidScenario("every replica of " + item.str() + " crashes");
        }
    }
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    try {
        if (!j.is_object()) throw InvalidScenario("scenario must be a JSON object");
        s.name = j.value("name", s.name);
        s.seed = j.value("seed", s.seed);
        SiteSet sites;
        for (const auto& site : j.at("sites")) sites.insert(SiteId(site.get<std::string>()));
        std::map<DataItemId, SiteSet> placement;
        for (const auto& [item, reps] : j.at("placement").items()) {
            SiteSet r;
            for (const auto& site : reps) r.insert(SiteId(site.get<std::string>()));
            placement[DataItemId(item)] = std::move(r);
        }
        s.map = ReplicationMap(std::move(sites), std::move(placement));
        if (j.contains("delays")) {
            const auto& d = j.at("delays");
            s.max_delay = d.value("max_delay", s.max_delay);
            s.suspicion_delay = d.value("suspicion_delay", s.suspicion_delay);
        }
        s.leader_strategy = j.value("leader_strategy", s.leader_strategy);
        s.colocate_leaders = j.value("colocate_leaders", s.colocate_leaders);
        s.cycle_cap = j.value("cycle_cap", s.cycle_cap);
        s.step_cap = j.value("step_cap", s.step_cap);
        for (const auto& f : j.value("faults", nlohmann::json::array())) {
            s.faults.push_back(FaultSpec{SiteId(f.at("site").get<std::string>()), f.at("time").get<SimTime>()});
        }
        for (const auto& t : j.value("transactions", nlohmann::json::array())) {
            TxnSpec spec{TransactionId(t.at("id").get<std::string>()), SiteId(t.at("origin").get<std::string>()),
                         t.value("start", SimTime{0}), {}};
            for (const auto& op : t.at("ops")) {
                if (op.contains("read")) {
                    spec.ops.push_back(OpSpec{OpKind::Read, DataItemId(op.at("read").get<std::string>()), std::nullopt});
                } else if (op.contains("write")) {
                    std::optional<std::string> value;
                    if (op.contains("value")) value = op.at("value").get<std::string>();
                    spec.ops.push_back(OpSpec{OpKind::Write, DataItemId(op.at("write").get<std::string>()), value});
                } else {
                    throw InvalidScenario("operation needs 'read' or 'write': " + op.dump());
                }
            }
            s.transactions.push_back(std::move(spec));
        }
        if (j.contains("workload")) {
            if (!s.transactions.empty()) throw InvalidScenario("give either transactions or workload, not both");
            const auto& w = j.at("workload");
            WorkloadSpec spec;
            spec.transactions = w.value("transactions", spec.transactions);
            spec.ops_min = w.value("ops_min", spec.ops_min);
            spec.ops_max = w.value("ops_max", spec.ops_max);
            spec.read_ratio = w.value("read_ratio", spec.read_ratio);
            spec.arrival_span = w.value("arrival_span", spec.arrival_span);
            expand_workload(s, spec, s.seed);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidScenario(std::string("scenario: ") + e.what());
    } catch (const ModelError& e) {
        throw InvalidScenario(std::string("scenario: ") + e.what());
    }
    validate(s);
    return s;
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["seed"] = s.seed;
    auto& sites = j["sites"] = nlohmann::ordered_json::array();
    for (const auto& site : s.map.sites()) sites.push_back(site.str());
    auto& placement = j["placement"] = nlohmann::ordered_json::object();
    for (const auto& [item, reps] : s.map.placement()) {
        auto& arr = placement[item.str()] = nlohmann::ordered_json::array();
        for (const auto& r : reps) arr.push_back(r.str());
    }
    j["delays"] = {{"max_delay", s.max_delay}, {"suspicion_delay", s.suspicion_delay}};
    j["leader_strategy"] = s.leader_strategy;
    j["colocate_leaders"] = s.colocate_leaders;
    j["cycle_cap"] = s.cycle_cap;
    j["step_cap"] = s.step_cap;
    auto& faults = j["faults"] = nlohmann::ordered_json::array();
    for (const auto& f : s.faults) {
        nlohmann::ordered_json fj;
        fj["site"] = f.site.str();
        fj["time"] = f.time;
        faults.push_back(std::move(fj));
    }
    auto& txns = j["transactions"] = nlohmann::ordered_json::array();
    for (const auto& t : s.transactions) {
        nlohmann::ordered_json tj;
        tj["id"] = t.id.str();
        tj["origin"] = t.origin.str();
        tj["start"] = t.start;
        auto& ops = tj["ops"] = nlohmann::ordered_json::array();
        for (const auto& op : t.ops) {
            nlohmann::ordered_json oj;
            if (op.kind == OpKind::Read) {
                oj["read"] = op.item.str();
            } else {
                oj["write"] = op.item.str();
                if (op.value) oj["value"] = *op.value;
            }
            ops.push_back(std::move(oj));
        }
        txns.push_back(std::move(tj));
    }
    return j;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidScenario("cannot open scenario " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidScenario(path + ": " + e.what());
    }
    return scenario_from_json(j);
}

CampaignTemplate campaign_template_from_json(const nlohmann::json& j) {
    CampaignTemplate t;
    auto range = [&](const char* key, auto& field) {
        if (!j.contains(key)) return;
        const auto& r = j.at(key);
        if (!r.is_array() || r.size() != 2) throw InvalidScenario(std::string("template: ") + key + " must be [lo, hi]");
        field.first = r[0].get<std::remove_reference_t<decltype(field.first)>>();
        field.second = r[1].get<std::remove_reference_t<decltype(field.second)>>();
        if (field.first > field.second) throw InvalidScenario(std::string("template: empty range for ") + key);
    };
    try {
        range("sites", t.sites);
        range("items", t.items);
        range("degree", t.degree);
        range("transactions", t.transactions);
        range("ops", t.ops);
        range("crashes", t.crashes);
        range("max_delay", t.max_delay);
        t.read_ratio = j.value("read_ratio", t.read_ratio);
        t.leader_crash_ratio = j.value("leader_crash_ratio", t.leader_crash_ratio);
        t.arrival_span = j.value("arrival_span", t.arrival_span);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidScenario(std::string("template: ") + e.what());
    }
    if (t.sites.first < 1 || t.items.first < 1 || t.degree.first < 1 || t.ops.first < 1 || t.max_delay.first < 1) {
        throw InvalidScenario("template: ranges must start at 1 or more");
    }
    return t;
}

Scenario generate_scenario(const CampaignTemplate& tmpl, std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::mt19937_64 rng(seq);

    Scenario s;
    s.name = "campaign-" + std::to_string(seed) + "-" + padded("", index, 4);
    s.seed = rng();
    const int n_sites = in_range(rng, tmpl.sites);
    const int n_items = in_range(rng, tmpl.items);
    const int degree = std::min(in_range(rng, tmpl.degree), n_sites);

    SiteSet sites;
    std::vector<SiteId> site_list;
    for (int i = 1; i <= n_sites; ++i) {
        site_list.emplace_back(padded("s", i, 2));
        sites.insert(site_list.back());
    }
    std::map<DataItemId, SiteSet> placement;
    for (int i = 1; i <= n_items; ++i) {
        std::vector<SiteId> shuffled = site_list;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        placement[DataItemId(padded("x", i, 2))] = SiteSet(shuffled.begin(), shuffled.begin() + degree);
    }
    s.map = ReplicationMap(sites, placement);
    s.max_delay = std::uniform_int_distribution<SimTime>(tmpl.max_delay.first, tmpl.max_delay.second)(rng);
    s.suspicion_delay = std::uniform_int_distribution<SimTime>(1, 10)(rng);
    s.leader_strategy = std::bernoulli_distribution(0.75)(rng) ? "min-alive" : "self";
    s.colocate_leaders = std::bernoulli_distribution(0.5)(rng);

    const int n_txns = in_range(rng, tmpl.transactions);
    const int ops_hi = tmpl.ops.second;
    for (int i = 0; i < n_txns; ++i) {
        SiteId origin = pick(rng, site_list);
        int n = in_range(rng, {tmpl.ops.first, ops_hi});
        SimTime start = std::uniform_int_distribution<SimTime>(0, tmpl.arrival_span)(rng);
        s.transactions.push_back(
            random_txn(rng, s.map, TransactionId(padded("T", i + 1, 4)), origin, n, tmpl.read_ratio, start));
    }

    // Crashes must leave every item with a correct replica.
    const int n_crashes = in_range(rng, tmpl.crashes);
    SiteSet faulty;
    auto keeps_a1 = [&](const SiteId& extra) {
        for (const auto& [item, reps] : placement) {
            bool ok = false;
            for (const auto& r : reps) ok = ok || (!faulty.contains(r) && r != extra);
            if (!ok) return false;
        }
        return true;
    };
    for (int c = 0; c < n_crashes; ++c) {
        SiteId target;
        if (std::bernoulli_distribution(tmpl.leader_crash_ratio)(rng)) {
            auto it = placement.begin();
            std::advance(it, std::uniform_int_distribution<int>(0, n_items - 1)(rng));
            target = *it->second.begin();  // initial min-alive leader of that group
        } else {
            target = pick(rng, site_list);
        }
        if (faulty.contains(target) || !keeps_a1(target)) continue;
        faulty.insert(target);
        s.faults.push_back(
            FaultSpec{target, std::uniform_int_distribution<SimTime>(0, tmpl.arrival_span + 20)(rng)});
    }
    validate(s);
    return s;
}

}  // namespace pregraph
