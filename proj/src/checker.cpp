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

#include "pregraph/checker.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include <fmt/format.h>

namespace pregraph {

namespace {

const TransactionId kInit{"INIT"};

template <class T>
T field(const TraceRecord& r, const char* key) {
    auto it = r.find(key);
    if (it == r.end()) throw MalformedTrace(fmt::format("record '{}' lacks field '{}'", r.value("ev", "?"), key));
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw MalformedTrace(fmt::format("record '{}' has a bad '{}' field", r.value("ev", "?"), key));
    }
}

SiteId site_of(const TraceRecord& r) { return SiteId(field<std::string>(r, "site")); }
TransactionId txn_of(const TraceRecord& r) { return TransactionId(field<std::string>(r, "txn")); }

std::string join(const std::vector<TransactionId>& v) {
    std::string out;
    for (const auto& t : v) {
        if (!out.empty()) out += " -> ";
        out += t.str();
    }
    return out;
}

}  // namespace

bool Verdict::has(const std::string& kind) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.kind == kind; });
}

void Verdict::merge(const Verdict& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
}

std::map<DataItemId, std::map<SiteId, std::vector<OperationId>>> TraceView::first_deliveries() const {
    std::map<DataItemId, std::map<SiteId, std::vector<OperationId>>> out;
    for (const auto& [item, by_site] : tom_deliveries) {
        for (const auto& [site, msgs] : by_site) {
            std::set<OperationId> seen;
            auto& seq = out[item][site];
            for (auto m : msgs) {
                const OperationId& op = tom_msg_op.at(m);
                if (seen.insert(op).second) seq.push_back(op);
            }
        }
    }
    return out;
}

TraceView index_trace(const Trace& trace) {
    TraceView v;
    bool have_header = false;
    for (const auto& r : trace) {
        const std::string ev = field<std::string>(r, "ev");
        if (ev == "scenario") {
            have_header = true;
            const auto& s = r.at("scenario");
            SiteSet sites;
            std::map<DataItemId, SiteSet> placement;
            try {
                for (const auto& site : s.at("sites")) sites.insert(SiteId(site.get<std::string>()));
                for (const auto& [item, reps] : s.at("placement").items()) {
                    for (const auto& site : reps) placement[DataItemId(item)].insert(SiteId(site.get<std::string>()));
                }
                v.map = ReplicationMap(sites, placement);
                for (const auto& t : s.at("transactions")) {
                    TransactionId id(t.at("id").get<std::string>());
                    TraceView::TxnInfo info{SiteId(t.at("origin").get<std::string>()), {}};
                    std::size_t i = 0;
                    for (const auto& op : t.at("ops")) {
                        const bool read = op.contains("read");
                        TraceView::OpInfo oi{OperationId(id.str() + "." + std::to_string(i++)), id,
                                             DataItemId(op.at(read ? "read" : "write").get<std::string>()),
                                             read ? OpKind::Read : OpKind::Write};
                        info.ops.push_back(oi);
                        v.ops.emplace(oi.id, oi);
                    }
                    v.txns.emplace(id, std::move(info));
                }
            } catch (const nlohmann::json::exception& e) {
                throw MalformedTrace(std::string("scenario header: ") + e.what());
            } catch (const ModelError& e) {
                throw MalformedTrace(std::string("scenario header: ") + e.what());
            }
        } else if (ev == "crash") {
            v.crashed.insert(site_of(r));
        } else if (ev == "txn_commit") {
            v.commits[txn_of(r)].push_back(site_of(r));
        } else if (ev == "txn_abort") {
            v.aborts[txn_of(r)].push_back(site_of(r));
        } else if (ev == "txn_ro_commit") {
            v.ro_commits.insert(txn_of(r));
        } else if (ev == "read") {
            v.reads.push_back({txn_of(r), OperationId(field<std::string>(r, "op")),
                               DataItemId(field<std::string>(r, "item")),
                               TransactionId(field<std::string>(r, "writer"))});
        } else if (ev == "r_mcast") {
            SiteSet group;
            for (const auto& g : field<std::vector<std::string>>(r, "group")) group.insert(SiteId(g));
            v.urm_sends[field<std::uint64_t>(r, "msg")] = {site_of(r), group, txn_of(r)};
            v.submitted.insert(txn_of(r));
        } else if (ev == "r_deliver") {
            v.urm_deliveries[field<std::uint64_t>(r, "msg")].push_back(site_of(r));
        } else if (ev == "to_mcast") {
            v.tom_sends[field<std::uint64_t>(r, "msg")] = {site_of(r), DataItemId(field<std::string>(r, "item")),
                                                           OperationId(field<std::string>(r, "op"))};
        } else if (ev == "to_deliver") {
            auto msg = field<std::uint64_t>(r, "msg");
            v.tom_deliveries[DataItemId(field<std::string>(r, "item"))][site_of(r)].push_back(msg);
            v.tom_msg_op[msg] = OperationId(field<std::string>(r, "op"));
        } else if (ev == "leader") {
            v.last_leader_view[{site_of(r), DataItemId(field<std::string>(r, "item"))}] =
                SiteId(field<std::string>(r, "leader"));
        } else if (ev == "site_final") {
            v.finals[site_of(r)] = r;
        }
    }
    if (!have_header) throw MalformedTrace("trace has no scenario header");
    for (const auto& s : v.map.sites()) {
        if (!v.crashed.contains(s)) v.correct.insert(s);
    }
    return v;
}

VersionOrder build_version_order(const TraceView& view) {
    VersionOrder vo;
    const auto firsts = view.first_deliveries();
    std::map<DataItemId, std::set<OperationId>> committed_writes;
    for (const auto& [id, op] : view.ops) {
        if (op.kind == OpKind::Write && view.committed_anywhere(op.txn)) committed_writes[op.item].insert(id);
    }
    for (const auto& [item, writes] : committed_writes) {
        std::map<OperationId, std::set<OperationId>> succ;
        std::map<OperationId, int> indeg;
        for (const auto& w : writes) indeg[w];
        auto it = firsts.find(item);
        if (it != firsts.end()) {
            for (const auto& [site, seq] : it->second) {
                std::optional<OperationId> prev;
                for (const auto& op : seq) {
                    if (!writes.contains(op)) continue;
                    if (prev && succ[*prev].insert(op).second) ++indeg[op];
                    prev = op;
                }
            }
        }
        std::set<OperationId> ready;
        for (const auto& [w, d] : indeg) {
            if (d == 0) ready.insert(w);
        }
        auto& out = vo.order[item];
        while (!ready.empty()) {
            OperationId w = *ready.begin();
            ready.erase(ready.begin());
            out.push_back(w);
            for (const auto& n : succ[w]) {
                if (--indeg[n] == 0) ready.insert(n);
            }
        }
        if (out.size() != writes.size()) {
            throw OrderDisagreement("replicas deliver the committed writes on " + item.str() + " in different orders");
        }
    }
    return vo;
}

Mvsg build_mvsg(const TraceView& view, const VersionOrder& vo) {
    Mvsg g;
    g.vertices.insert(kInit);
    for (const auto& [t, _] : view.commits) g.vertices.insert(t);
    for (const auto& t : view.ro_commits) g.vertices.insert(t);
    auto edge = [&](const TransactionId& a, const TransactionId& b, MvsgEdge kind) {
        if (a != b) g.edges[{a, b}].insert(kind);
    };

    // Per item: chain of writer transactions, INIT first, consecutive repeats merged.
    std::map<DataItemId, std::vector<TransactionId>> chain;
    for (const auto& item : view.map.items()) chain[item] = {kInit};
    for (const auto& [item, ops] : vo.order) {
        auto& c = chain[item];
        for (const auto& op : ops) {
            const TransactionId& t = view.ops.at(op).txn;
            if (c.back() != t) c.push_back(t);
        }
        for (std::size_t i = 0; i + 1 < c.size(); ++i) edge(c[i], c[i + 1], MvsgEdge::VersionOrder);
    }

    for (const auto& r : view.reads) {
        if (!g.vertices.contains(r.txn) || r.writer == r.txn) continue;
        auto cit = chain.find(r.item);
        if (cit == chain.end()) throw DanglingRead(r.op.str() + " reads unknown item " + r.item.str());
        const auto& c = cit->second;
        auto pos = std::find(c.rbegin(), c.rend(), r.writer);
        if (pos == c.rend()) {
            throw DanglingRead(r.op.str() + " of " + r.txn.str() + " read a version of " + r.item.str() +
                               " written by " + r.writer.str() + ", which no committed write produced");
        }
        std::size_t idx = static_cast<std::size_t>(c.rend() - pos) - 1;
        edge(r.writer, r.txn, MvsgEdge::ReadFrom);
        for (std::size_t k = idx + 1; k < c.size(); ++k) {
            if (c[k] == r.txn) continue;
            edge(r.txn, c[k], MvsgEdge::VersionOrder);
            break;
        }
    }
    return g;
}

std::optional<std::vector<TransactionId>> find_cycle(const Mvsg& g) {
    std::map<TransactionId, std::vector<TransactionId>> adj;
    for (const auto& [e, _] : g.edges) adj[e.first].push_back(e.second);
    std::map<TransactionId, int> color;  // 0 new, 1 on stack, 2 done
    std::vector<TransactionId> stack;
    std::optional<std::vector<TransactionId>> found;
    auto dfs = [&](auto&& self, const TransactionId& v) -> bool {
        color[v] = 1;
        stack.push_back(v);
        for (const auto& w : adj[v]) {
            if (color[w] == 1) {
                auto it = std::find(stack.begin(), stack.end(), w);
                found = std::vector<TransactionId>(it, stack.end());
                return true;
            }
            if (color[w] == 0 && self(self, w)) return true;
        }
        stack.pop_back();
        color[v] = 2;
        return false;
    };
    for (const auto& v : g.vertices) {
        if (color[v] == 0 && dfs(dfs, v)) return found;
    }
    return std::nullopt;
}

Verdict assert_serializable(const Mvsg& g) {
    Verdict v;
    if (auto cycle = find_cycle(g)) {
        auto c = *cycle;
        c.push_back(c.front());
        v.add(violation::kSerializability, "MVSG cycle: " + join(c));
    }
    return v;
}

Verdict assert_liveness_and_agreement(const TraceView& view) {
    Verdict v;
    std::set<TransactionId> decided;
    for (const auto& [t, _] : view.commits) decided.insert(t);
    for (const auto& [t, _] : view.aborts) decided.insert(t);
    for (const auto& t : decided) {
        std::map<SiteId, int> count;
        auto c = view.commits.find(t);
        auto a = view.aborts.find(t);
        if (c != view.commits.end()) {
            for (const auto& s : c->second) ++count[s];
        }
        if (a != view.aborts.end()) {
            for (const auto& s : a->second) ++count[s];
        }
        if (c != view.commits.end() && a != view.aborts.end()) {
            v.add(violation::kAgreement, fmt::format("{} committed at {} but aborted at {}", t.str(),
                                                     c->second.front().str(), a->second.front().str()));
        }
        for (const auto& [s, n] : count) {
            if (n > 1) v.add(violation::kAgreement, fmt::format("{} decided {} times at {}", t.str(), n, s.str()));
        }
    }

    for (const auto& t : view.submitted) {
        auto it = view.txns.find(t);
        if (it == view.txns.end()) {
            v.add(violation::kLiveness, "submitted transaction " + t.str() + " is not in the scenario");
            continue;
        }
        SiteSet writers;
        for (const auto& op : it->second.ops) {
            if (op.kind == OpKind::Write) {
                const auto& r = view.map.replicas(op.item);
                writers.insert(r.begin(), r.end());
            }
        }
        for (const auto& s : writers) {
            if (!view.correct.contains(s)) continue;
            auto has = [&](const auto& m) {
                auto f = m.find(t);
                return f != m.end() && std::find(f->second.begin(), f->second.end(), s) != f->second.end();
            };
            if (!has(view.commits) && !has(view.aborts)) {
                v.add(violation::kLiveness, t.str() + " never decided at correct site " + s.str());
            }
        }
    }

    const auto firsts = view.first_deliveries();
    for (const auto& t : view.submitted) {
        auto it = view.txns.find(t);
        if (it == view.txns.end()) continue;
        for (const auto& op : it->second.ops) {
            for (const auto& s : view.map.replicas(op.item)) {
                if (!view.correct.contains(s)) continue;
                bool got = false;
                auto fi = firsts.find(op.item);
                if (fi != firsts.end()) {
                    auto si = fi->second.find(s);
                    if (si != fi->second.end()) {
                        got = std::find(si->second.begin(), si->second.end(), op.id) != si->second.end();
                    }
                }
                if (!got) v.add(violation::kDelivery, op.id.str() + " never TO-delivered at correct replica " + s.str());
            }
        }
    }

    for (const auto& s : view.correct) {
        auto f = view.finals.find(s);
        if (f == view.finals.end()) {
            v.add(violation::kLiveness, "no final state recorded for correct site " + s.str());
            continue;
        }
        for (const auto& u : f->second.value("unclosed", nlohmann::ordered_json::array())) {
            v.add(violation::kClosure, u.get<std::string>() + " never closed at " + s.str());
        }
    }
    return v;
}

Verdict check_primitives(const TraceView& view) {
    Verdict v;

    // Uniform reliable multicast.
    for (const auto& [msg, sites] : view.urm_deliveries) {
        auto send = view.urm_sends.find(msg);
        if (send == view.urm_sends.end()) {
            v.add(violation::kUrm, fmt::format("message {} delivered but never multicast", msg));
            continue;
        }
        std::set<SiteId> seen;
        for (const auto& s : sites) {
            if (!send->second.group.contains(s)) v.add(violation::kUrm, fmt::format("{} delivered {} outside its group", s.str(), msg));
            if (!seen.insert(s).second) v.add(violation::kUrm, fmt::format("{} delivered {} twice", s.str(), msg));
        }
    }
    for (const auto& [msg, send] : view.urm_sends) {
        auto d = view.urm_deliveries.find(msg);
        const bool someone = d != view.urm_deliveries.end() && !d->second.empty();
        if (!someone && !view.correct.contains(send.sender)) continue;
        for (const auto& m : send.group) {
            if (!view.correct.contains(m)) continue;
            if (!someone || std::find(d->second.begin(), d->second.end(), m) == d->second.end()) {
                v.add(violation::kUrm, fmt::format("correct member {} never delivered message {}", m.str(), msg));
            }
        }
    }

    // Total order multicast.
    std::map<std::uint64_t, std::set<SiteId>> tom_seen;
    for (const auto& [item, by_site] : view.tom_deliveries) {
        for (const auto& [site, msgs] : by_site) {
            for (auto m : msgs) {
                auto send = view.tom_sends.find(m);
                if (send == view.tom_sends.end()) {
                    v.add(violation::kTom, fmt::format("message {} delivered at {} but never multicast", m, site.str()));
                    continue;
                }
                if (send->second.item != item) v.add(violation::kTom, fmt::format("message {} delivered in the wrong group", m));
                if (!view.map.replicas(item).contains(site)) {
                    v.add(violation::kTom, fmt::format("{} delivered {} outside replicas({})", site.str(), m, item.str()));
                }
                if (!tom_seen[m].insert(site).second) v.add(violation::kTom, fmt::format("{} delivered {} twice", site.str(), m));
            }
        }
        // Pairwise order consistency.
        for (auto a = by_site.begin(); a != by_site.end(); ++a) {
            std::map<std::uint64_t, std::size_t> pos;
            for (std::size_t i = 0; i < a->second.size(); ++i) pos.emplace(a->second[i], i);
            for (auto b = std::next(a); b != by_site.end(); ++b) {
                std::optional<std::size_t> last;
                for (auto m : b->second) {
                    auto p = pos.find(m);
                    if (p == pos.end()) continue;
                    if (last && p->second < *last) {
                        v.add(violation::kTomOrder, fmt::format("{} and {} deliver messages on {} in different orders",
                                                                a->first.str(), b->first.str(), item.str()));
                        break;
                    }
                    last = p->second;
                }
            }
        }
    }
    for (const auto& [msg, send] : view.tom_sends) {
        const bool someone = tom_seen.contains(msg);
        if (!someone && !view.correct.contains(send.sender)) continue;
        for (const auto& m : view.map.replicas(send.item)) {
            if (view.correct.contains(m) && (!someone || !tom_seen[msg].contains(m))) {
                v.add(violation::kTom, fmt::format("correct member {} never delivered message {}", m.str(), msg));
            }
        }
    }

    // Eventual weak leader: some correct member ends up naming itself.
    for (const auto& [item, reps] : view.map.placement()) {
        bool any_correct = false, stable = false;
        for (const auto& m : reps) {
            if (!view.correct.contains(m)) continue;
            any_correct = true;
            auto it = view.last_leader_view.find({m, item});
            if (it != view.last_leader_view.end() && it->second == m) stable = true;
        }
        if (any_correct && !stable) v.add(violation::kLeader, "no correct member of replicas(" + item.str() + ") leads itself");
    }
    return v;
}

Verdict check_final_state(const TraceView& view, const VersionOrder& vo) {
    Verdict v;
    for (const auto& s : view.correct) {
        auto f = view.finals.find(s);
        if (f == view.finals.end()) continue;
        const auto& db = f->second.value("db", nlohmann::ordered_json::object());
        for (const auto& item : view.map.items()) {
            if (!view.map.replicates(s, item)) continue;
            std::string expected = kInit.str();
            auto it = vo.order.find(item);
            if (it != vo.order.end() && !it->second.empty()) expected = view.ops.at(it->second.back()).txn.str();
            std::string got = db.contains(item.str()) ? db.at(item.str()).get<std::string>() : "<missing>";
            if (got != expected) {
                v.add(violation::kFinalState,
                      fmt::format("{} holds {}'s version of {}, expected {}", s.str(), got, item.str(), expected));
            }
        }
    }
    return v;
}

CheckReport check_trace(const Trace& trace) {
    CheckReport report;
    TraceView view;
    try {
        view = index_trace(trace);
    } catch (const MalformedTrace& e) {
        report.verdict.add(violation::kMalformed, e.what());
        return report;
    }
    report.transactions = view.txns.size();
    report.committed = view.commits.size();
    report.read_only = view.ro_commits.size();
    for (const auto& [t, _] : view.aborts) {
        if (!view.commits.contains(t)) ++report.aborted;
    }

    report.verdict.merge(assert_liveness_and_agreement(view));
    report.verdict.merge(check_primitives(view));
    try {
        VersionOrder vo = build_version_order(view);
        report.verdict.merge(check_final_state(view, vo));
        try {
            Mvsg g = build_mvsg(view, vo);
            report.mvsg_edges = g.edges.size();
            report.verdict.merge(assert_serializable(g));
        } catch (const DanglingRead& e) {
            report.verdict.add(violation::kDanglingRead, e.what());
        }
    } catch (const OrderDisagreement& e) {
        report.verdict.add(violation::kOrderDisagreement, e.what());
    }
    return report;
}

nlohmann::ordered_json CheckReport::to_json() const {
    nlohmann::ordered_json j;
    j["ok"] = ok();
    j["transactions"] = transactions;
    j["committed"] = committed;
    j["aborted"] = aborted;
    j["read_only"] = read_only;
    j["mvsg_edges"] = mvsg_edges;
    auto& arr = j["violations"] = nlohmann::ordered_json::array();
    for (const auto& v : verdict.violations) arr.push_back({{"kind", v.kind}, {"detail", v.detail}});
    return j;
}

std::string CheckReport::text() const {
    std::ostringstream out;
    static const char* kChecks[][2] = {
        {"serializability", violation::kSerializability}, {"version order", violation::kOrderDisagreement},
        {"reads-from", violation::kDanglingRead},           {"agreement", violation::kAgreement},
        {"liveness", violation::kLiveness},                 {"delivery", violation::kDelivery},
        {"closure", violation::kClosure},                   {"urm", violation::kUrm},
        {"tom", violation::kTom},                           {"tom order", violation::kTomOrder},
        {"weak leader", violation::kLeader},                {"final state", violation::kFinalState},
        {"trace format", violation::kMalformed},
    };
    for (const auto& c : kChecks) out << fmt::format("{:<16} {}\n", c[0], verdict.has(c[1]) ? "FAIL" : "pass");
    out << fmt::format("transactions {}  committed {}  aborted {}  read-only {}\n", transactions, committed, aborted,
                       read_only);
    for (const auto& v : verdict.violations) out << "  [" << v.kind << "] " << v.detail << '\n';
    out << (ok() ? "verdict: PASS\n" : "verdict: FAIL\n");
    return out.str();
}

// ---------------------------------------------------------------------------
// Message accounting

std::uint64_t TxnMetrics::protocol_messages() const {
    std::uint64_t n = 0;
    for (const char* c : {"urm", "tom_forward", "tom", "graph"}) {
        auto it = by_class.find(c);
        if (it != by_class.end()) n += it->second;
    }
    return n;
}

MetricsReport account_messages(const Trace& trace) {
    MetricsReport m;
    std::map<TransactionId, std::size_t> op_counts;
    for (const auto& r : trace) {
        const std::string ev = r.value("ev", "");
        if (ev == "scenario") {
            for (const auto& t : r.at("scenario").at("transactions")) {
                op_counts[TransactionId(t.at("id").get<std::string>())] = t.at("ops").size();
            }
        } else if (ev == "r_mcast") {
            TransactionId t = txn_of(r);
            if (!m.txns.contains(t)) {
                auto& x = m.txns[t];
                x.origin = site_of(r);
                x.submitted = field<SimTime>(r, "t");
                x.ops = op_counts[t];
            }
        } else if (ev == "send") {
            TransactionId t = txn_of(r);
            const std::string cls = field<std::string>(r, "class");
            auto& x = m.txns[t];
            ++x.by_class[cls];
            ++m.totals[cls];
            if (cls == "tom" && r.contains("op")) ++x.tom_per_op[OperationId(r.at("op").get<std::string>())];
        } else if (ev == "txn_commit") {
            auto& x = m.txns[txn_of(r)];
            SimTime t = field<SimTime>(r, "t");
            if (!x.first_commit || t < *x.first_commit) x.first_commit = t;
            if (!x.last_commit || t > *x.last_commit) x.last_commit = t;
        }
    }
    return m;
}

nlohmann::ordered_json MetricsReport::to_json() const {
    nlohmann::ordered_json j;
    auto& txs = j["transactions"] = nlohmann::ordered_json::object();
    for (const auto& [t, x] : txns) {
        nlohmann::ordered_json e;
        e["origin"] = x.origin.str();
        e["submitted"] = x.submitted;
        e["ops"] = x.ops;
        e["messages"] = x.by_class;
        e["protocol_messages"] = x.protocol_messages();
        if (auto cp = x.critical_path()) e["critical_path"] = *cp;
        txs[t.str()] = std::move(e);
    }
    j["totals"] = totals;
    return j;
}

bool MetricsReport::within_bounds(int o, int d) const {
    const std::uint64_t od = static_cast<std::uint64_t>(o) * static_cast<std::uint64_t>(d);
    for (const auto& [t, x] : txns) {
        if (!x.last_commit) continue;
        auto urm = x.by_class.contains("urm") ? x.by_class.at("urm") : 0;
        if (urm != 2 * od) return false;
        if (x.tom_per_op.size() != static_cast<std::size_t>(o)) return false;
        for (const auto& [_, n] : x.tom_per_op) {
            if (n != 2 * static_cast<std::uint64_t>(d)) return false;
        }
        if (x.protocol_messages() > 5 * od + od * od) return false;
    }
    return true;
}

std::string MetricsReport::table(int o, int d) const {
    const std::uint64_t od = static_cast<std::uint64_t>(o) * static_cast<std::uint64_t>(d);
    std::ostringstream out;
    out << fmt::format("{:<10} {:>5} {:>6} {:>6} {:>6} {:>6} {:>6} {:>7} {:>6}\n", "txn", "urm", "fwd", "tom", "dup",
                       "graph", "total", "bound", "hops");
    auto get = [](const TxnMetrics& x, const char* c) {
        auto it = x.by_class.find(c);
        return it == x.by_class.end() ? std::uint64_t{0} : it->second;
    };
    for (const auto& [t, x] : txns) {
        auto cp = x.critical_path();
        out << fmt::format("{:<10} {:>5} {:>6} {:>6} {:>6} {:>6} {:>6} {:>7} {:>6}\n", t.str(), get(x, "urm"),
                           get(x, "tom_forward"), get(x, "tom"), get(x, "tom_dup"), get(x, "graph"),
                           x.protocol_messages(), 5 * od + od * od, cp ? std::to_string(*cp) : "-");
    }
    out << fmt::format("expected urm = 2od = {}, tom per op = 2d = {}, total <= 5od+(od)^2 = {}\n", 2 * od, 2 * d,
                       5 * od + od * od);
    out << (within_bounds(o, d) ? "bounds: PASS\n" : "bounds: FAIL\n");
    return out.str();
}

}  // namespace pregraph
