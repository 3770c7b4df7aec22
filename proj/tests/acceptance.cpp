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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Details follow each verdict line, indented.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "mutations.hpp"
#include "oracles.hpp"
#include "pregraph/campaign.hpp"
#include "pregraph/checker.hpp"
#include "pregraph/lock_table.hpp"
#include "pregraph/replica.hpp"
#include "pregraph/simulator.hpp"

namespace pregraph {
namespace {

std::string source_path(const std::string& rel) { return std::string(PREGRAPH_SOURCE_DIR) + "/" + rel; }

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(std::string s) { notes.push_back(std::move(s)); }
};

// ---------------------------------------------------------------------------
// 1-3: randomized campaign

struct CampaignStats {
    std::uint64_t runs = 0, run_errors = 0, serializability = 0, agreement = 0, liveness = 0, other = 0;
    std::uint64_t multi_site = 0, crash_runs = 0, leader_crash_runs = 0, committed = 0, aborted = 0;
    std::map<std::string, std::uint64_t> other_kinds;
    double seconds = 0;
};

void tally(CampaignStats& st, const CampaignSummary& sum) {
    st.runs += sum.count;
    st.multi_site += sum.multi_site_decisions;
    st.crash_runs += sum.crash_runs;
    st.leader_crash_runs += sum.leader_crash_runs;
    st.committed += sum.committed;
    st.aborted += sum.aborted;
    for (const auto& f : sum.failures) {
        std::set<std::string> kinds;
        for (const auto& v : f.violations) kinds.insert(v.kind);
        for (const auto& k : kinds) {
            if (k == "run_error") {
                ++st.run_errors;
            } else if (k == violation::kSerializability || k == violation::kOrderDisagreement ||
                       k == violation::kDanglingRead) {
                ++st.serializability;
            } else if (k == violation::kAgreement) {
                ++st.agreement;
            } else if (k == violation::kLiveness || k == violation::kDelivery || k == violation::kClosure) {
                ++st.liveness;
            } else {
                ++st.other;
                ++st.other_kinds[k];
            }
        }
    }
}

CampaignStats run_campaigns() {
    CampaignStats st;
    auto start = std::chrono::steady_clock::now();
    tally(st, run_campaign(CampaignTemplate{}, 2026, 1000));
    // Longer and more uneven delays, and a cycle budget small enough to
    // push the feedback vertex set heuristic onto its fallback.
    ScenarioOverrides stress;
    stress.max_delay = 8;
    stress.cycle_cap = 2;
    tally(st, run_campaign(CampaignTemplate{}, 4242, 300, stress));
    st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return st;
}

Outcome criterion_1(const CampaignStats& st) {
    Outcome o;
    o.note(fmt::format("{} scenarios in {:.1f}s, {} commits, {} aborts", st.runs, st.seconds, st.committed, st.aborted));
    o.note(fmt::format("runs with an MVSG cycle, version-order split or dangling read: {}", st.serializability));
    o.require(st.runs >= 1000, "at least 1000 scenarios");
    o.require(st.run_errors == 0, fmt::format("{} runs raised an error", st.run_errors));
    o.require(st.serializability == 0, "every MVSG acyclic");
    for (const auto& [k, n] : st.other_kinds) o.require(false, fmt::format("{} runs with {} violations", n, k));
    return o;
}

Outcome criterion_2(const CampaignStats& st) {
    Outcome o;
    o.note(fmt::format("transactions decided at two or more sites: {}", st.multi_site));
    o.note(fmt::format("runs with disagreeing outcomes: {}", st.agreement));
    o.require(st.multi_site > 0, "some transaction decided at several sites");
    o.require(st.agreement == 0, "identical outcomes everywhere");
    return o;
}

Outcome criterion_3(const CampaignStats& st) {
    Outcome o;
    o.note(fmt::format("runs with crashes: {}, crashing an initial weak leader: {}", st.crash_runs,
                       st.leader_crash_runs));
    o.note(fmt::format("runs with an undecided, undelivered or unclosed transaction: {}", st.liveness));
    o.require(st.leader_crash_runs > 0, "leader crashes exercised");
    o.require(st.liveness == 0, "every submitted transaction decided at every correct write replica");
    return o;
}

// ---------------------------------------------------------------------------
// 4-5: delay and message counts

SimTime hops(bool colocate) {
    Scenario s = load_scenario(source_path("scenarios/hop_count.scn"));
    s.colocate_leaders = colocate;
    MetricsReport m = account_messages(run_scenario(s).trace);
    auto cp = m.txns.at(TransactionId("T")).critical_path();
    return cp ? *cp : -1;
}

Outcome criterion_4() {
    Outcome o;
    const SimTime plain = hops(false), coloc = hops(true);
    o.note(fmt::format("remote origin, one write, degree 3, unit delay: {} hops; colocated sequencer: {} hops", plain,
                       coloc));
    o.require(plain == 5, "exactly 5 hops");
    o.require(coloc == 4, "exactly 4 hops with colocated leaders");
    return o;
}

/// One transaction of `o` writes on distinct items, each on its own group of
/// `d` sites, issued from a site outside every group.
Scenario counting_scenario(int o, int d) {
    nlohmann::json j;
    j["name"] = fmt::format("count-{}-{}", o, d);
    auto sites = nlohmann::json::array({"origin"});
    nlohmann::json placement = nlohmann::json::object();
    auto ops = nlohmann::json::array();
    for (int i = 0; i < o; ++i) {
        std::string item = fmt::format("x{}", i);
        auto& group = placement[item] = nlohmann::json::array();
        for (int k = 0; k < d; ++k) {
            std::string s = fmt::format("g{}s{}", i, k);
            sites.push_back(s);
            group.push_back(s);
        }
        ops.push_back({{"write", item}});
    }
    j["sites"] = sites;
    j["placement"] = placement;
    j["transactions"] = nlohmann::json::array({{{"id", "T"}, {"origin", "origin"}, {"ops", ops}}});
    return scenario_from_json(j);
}

Outcome criterion_5() {
    Outcome o;
    for (auto [ops, d] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 2}}) {
        Trace t = run_scenario(counting_scenario(ops, d)).trace;
        MetricsReport m = account_messages(t);
        const TxnMetrics& x = m.txns.at(TransactionId("T"));
        const std::uint64_t od = static_cast<std::uint64_t>(ops * d);
        auto get = [&](const char* c) { return x.by_class.contains(c) ? x.by_class.at(c) : 0; };
        std::string per_op;
        for (const auto& [op, n] : x.tom_per_op) per_op += fmt::format(" {}", n);
        o.note(fmt::format("(o,d)=({},{}): urm {} (2od={}), tom per op{} (2d={}), forward {}, graph {}, total {} <= {}",
                           ops, d, get("urm"), 2 * od, per_op, 2 * d, get("tom_forward"), get("graph"),
                           x.protocol_messages(), 5 * od + od * od));
        o.require(x.last_commit.has_value(), "transaction committed");
        o.require(m.within_bounds(ops, d), fmt::format("bounds for ({},{})", ops, d));
        o.require(check_trace(t).ok(), "run passes the checker");
    }
    return o;
}

// ---------------------------------------------------------------------------
// 6: lock matrix

Outcome criterion_6() {
    Outcome o;
    const LockMode modes[] = {LockMode::R, LockMode::W, LockMode::IW};
    int cells = 0, wrong = 0;
    for (int req = 0; req < 3; ++req) {
        for (int held = 0; held < 3; ++held) {
            LockTable t;
            t.request(DataItemId("x"), OperationId("h"), TransactionId("H"), modes[held]);
            auto got = t.request(DataItemId("x"), OperationId("r"), TransactionId("Q"), modes[req]);
            ++cells;
            if ((got == LockOutcome::Granted) != oracle::table_grants(req, held)) ++wrong;
        }
    }
    oracle::LockReplay r = oracle::replay_lock_sequences(7, 100000);
    o.note(fmt::format("matrix cells checked: {}, wrong: {}", cells, wrong));
    o.note(fmt::format("replay: {} steps, {} immediate grants, {} queued, {} later grants, {} mismatches", r.steps,
                       r.grants, r.queued, r.handoffs, r.mismatches));
    o.require(cells == 9 && wrong == 0, "3x3 matrix");
    o.require(r.steps >= 100000 && r.mismatches == 0, "replay without mismatches");
    return o;
}

// ---------------------------------------------------------------------------
// 7: graph algebra

Outcome criterion_7() {
    Outcome o;
    using testing::random_graph;
    long law_failures = 0, pred_failures = 0, fvs_invalid = 0, nondeterministic = 0, over_twice = 0;
    long graphs = 0, exact = 0;
    std::size_t worst_num = 0, worst_den = 1;
    for (std::uint64_t seed = 1; seed <= 400; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> n(1, 12);
        std::uniform_real_distribution<double> p(0.05, 0.4);
        PrecedenceGraph a = random_graph(rng, n(rng), p(rng), 0.2, 0.1);
        PrecedenceGraph b = random_graph(rng, n(rng), p(rng), 0.2, 0.1);
        PrecedenceGraph c = random_graph(rng, n(rng), p(rng), 0.2, 0.1);
        ++graphs;

        const PrecedenceGraph ab = graph_union(a, b);
        law_failures += ab != graph_union(b, a);
        law_failures += graph_union(ab, c) != graph_union(a, graph_union(b, c));
        law_failures += graph_union(a, a) != a;
        law_failures += !is_subset(a, a);
        law_failures += !is_subset(a, ab) || !is_subset(b, ab);
        law_failures += is_subset(a, b) && is_subset(b, a) && a != b;
        law_failures += is_subset(a, b) && is_subset(b, ab) && !is_subset(a, ab);

        for (const auto& [v, _] : a.vertices()) {
            const PrecedenceGraph preds = a.predecessors(v);
            VertexSet got;
            for (const auto& [u, __] : preds.vertices()) got.insert(u);
            pred_failures += oracle::reverse_bfs(a, v) != got;
        }

        const VertexSet fvs = break_cycles(a);
        fvs_invalid += !oracle::acyclic_without(a, fvs);
        nondeterministic += break_cycles(a) != fvs;
        if (a.size() <= 8) {
            ++exact;
            const std::size_t best = oracle::min_fvs_size(a);
            if (fvs.size() > 2 * best) ++over_twice;
            if (best > 0 && fvs.size() * worst_den > worst_num * best) {
                worst_num = fvs.size();
                worst_den = best;
            }
        }
    }
    o.note(fmt::format("{} random graph triples of 1-12 vertices; {} exact FVS comparisons on <= 8 vertices", graphs,
                       exact));
    o.note(fmt::format("law failures {}, predecessor mismatches {}, invalid FVS {}, nondeterministic FVS {}",
                       law_failures, pred_failures, fvs_invalid, nondeterministic));
    o.note(fmt::format("heuristic over 2x optimum: {}; worst ratio {}/{}", over_twice, worst_num, worst_den));
    o.require(law_failures == 0, "union and subset laws");
    o.require(pred_failures == 0, "predecessors match reverse BFS");
    o.require(fvs_invalid == 0 && nondeterministic == 0, "break_cycles valid and deterministic");
    o.require(over_twice == 0, "heuristic within 2x of optimum");
    return o;
}

// ---------------------------------------------------------------------------
// 8-9: directed fixtures

std::vector<const TraceRecord*> find(const Trace& t, const std::string& ev) {
    std::vector<const TraceRecord*> out;
    for (const auto& r : t) {
        if (r["ev"] == ev) out.push_back(&r);
    }
    return out;
}

Outcome criterion_8() {
    Outcome o;
    Trace t = run_scenario(load_scenario(source_path("scenarios/outdated_read.scn"))).trace;
    SimTime u_commit = -1, t_abort = -1;
    std::set<std::string> t_deciders;
    bool t_committed = false;
    for (const auto* r : find(t, "txn_commit")) {
        if ((*r)["txn"] == "U" && u_commit < 0) u_commit = (*r)["t"].get<SimTime>();
        if ((*r)["txn"] == "T") t_committed = true;
    }
    for (const auto* r : find(t, "txn_abort")) {
        if ((*r)["txn"] != "T") continue;
        t_deciders.insert((*r)["site"].get<std::string>());
        o.require((*r)["reason"] == "outdated_read", "abort reason outdated_read");
        t_abort = (*r)["t"].get<SimTime>();
    }
    std::ifstream in(source_path("tests/golden/outdated_read.jsonl"));
    std::stringstream golden;
    if (in) golden << in.rdbuf();
    o.note(fmt::format("U commits at t={}, T aborted at {} site(s) at t={}", u_commit, t_deciders.size(), t_abort));
    o.require(!t_committed, "T never commits");
    o.require(t_deciders == std::set<std::string>{"B"}, "T aborted at B, its only deciding site");
    o.require(u_commit >= 0 && u_commit < t_abort, "U commits first");
    o.require(!golden.str().empty(), "golden trace present");
    o.require(trace_to_string(t) == golden.str(), "trace identical to tests/golden/outdated_read.jsonl");
    o.require(check_trace(t).ok(), "checker passes");
    return o;
}

Outcome criterion_9() {
    Outcome o;
    Scenario s = load_scenario(source_path("scenarios/cycle_break.scn"));
    Trace t = run_scenario(s).trace;
    TraceView v = index_trace(t);

    // The heuristic's choice on the 2-cycle both deciding sites build.
    PrecedenceGraph g;
    for (const auto& spec : s.transactions) {
        std::vector<Operation> ops;
        for (std::size_t i = 0; i < spec.ops.size(); ++i) {
            const auto& os = spec.ops[i];
            ops.emplace_back(op_id_for(spec.id, i), spec.id, os.item, os.kind,
                             os.kind == OpKind::Write ? std::optional<std::string>(os.value.value_or("")) : std::nullopt);
        }
        auto meta = std::make_shared<const Transaction>(spec.id, std::move(ops), spec.origin,
                                                        ExecInterval{Stamp{0, 0}, Stamp{1, 0}});
        testing::add_full(g, meta);
    }
    g.add_edge(TransactionId("T1"), TransactionId("T2"));
    g.add_edge(TransactionId("T2"), TransactionId("T1"));
    const VertexSet loser = break_cycles(g);

    o.note(fmt::format("heuristic loser: {}; committed: {}; aborted: {}", loser.empty() ? "-" : loser.begin()->str(),
                       v.commits.size(), v.aborts.size()));
    o.require(loser.size() == 1, "heuristic picks one loser");
    o.require(v.commits.size() == 1 && v.aborts.size() == 1, "exactly one of the two commits");
    if (loser.size() == 1 && v.aborts.size() == 1) {
        const auto& [aborted, sites] = *v.aborts.begin();
        o.require(aborted == *loser.begin(), "loser matches break_cycles");
        o.require(sites.size() == 2, "loser aborted at both of its deciding sites");
        o.note(fmt::format("{} aborted at {} sites, {} committed at {} sites", aborted.str(), sites.size(),
                           v.commits.begin()->first.str(), v.commits.begin()->second.size()));
    }
    for (const auto* r : find(t, "txn_abort")) o.require((*r)["reason"] == "cycle", "abort reason cycle");
    o.require(check_trace(t).ok(), "checker passes");
    return o;
}

// ---------------------------------------------------------------------------
// 10: negative controls

Outcome criterion_10() {
    Outcome o;
    struct Control {
        const char* name;
        const char* scenario;
        std::function<Trace(Trace)> mutate;
        const char* expect;
    };
    const Control controls[] = {
        {"flipped decision", "cycle_break", mutate::flip_decision, violation::kAgreement},
        {"reordered TO-delivery", "basic", mutate::swap_deliveries, violation::kOrderDisagreement},
        {"phantom read version", "basic", mutate::phantom_read, violation::kDanglingRead},
    };
    for (const auto& c : controls) {
        Trace good = run_scenario(load_scenario(source_path(std::string("scenarios/") + c.scenario + ".scn"))).trace;
        o.require(check_trace(good).ok(), std::string(c.scenario) + " passes before mutation");
        CheckReport r = check_trace(c.mutate(good));
        std::string kinds;
        for (const auto& v : r.verdict.violations) kinds += " " + v.kind;
        o.note(fmt::format("{}: flagged{}", c.name, kinds.empty() ? " nothing" : kinds));
        o.require(r.verdict.has(c.expect), std::string(c.name) + " flagged as " + c.expect);
    }
    return o;
}

}  // namespace
}  // namespace pregraph

int main() {
    using namespace pregraph;
    std::cout << "running campaigns..." << std::endl;
    const CampaignStats st = run_campaigns();

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"serializability over the randomized campaign", [&] { return criterion_1(st); }},
        {"decision agreement", [&] { return criterion_2(st); }},
        {"liveness under crashes", [&] { return criterion_3(st); }},
        {"commit delay in hops", criterion_4},
        {"message complexity", criterion_5},
        {"lock matrix conformance", criterion_6},
        {"graph algebra", criterion_7},
        {"outdated-read abort", criterion_8},
        {"cycle-break abort", criterion_9},
        {"checker negative controls", criterion_10},
    };
    int failed = 0;
    int n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.notes.push_back(std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::cout << fmt::format("{} criterion {}: {}\n", o.pass ? "PASS" : "FAIL", n, name);
        for (const auto& note : o.notes) std::cout << "    " << note << '\n';
    }
    std::cout << fmt::format("{} of {} criteria passed\n", n - failed, n);
    return failed == 0 ? 0 : 1;
}
