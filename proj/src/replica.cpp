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

#include "pregraph/replica.hpp"

#include <algorithm>
#include <deque>

namespace pregraph {

OperationId op_id_for(const TransactionId& txn, std::size_t index) {
    return OperationId(txn.str() + "." + std::to_string(index));
}

namespace {

nlohmann::ordered_json names(const auto& ids) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& id : ids) arr.push_back(id.str());
    return arr;
}

}  // namespace

Replica::Replica(SiteId id, const ReplicationMap& map, ReplicaEnv& env, std::size_t cycle_cap)
    : id_(std::move(id)), map_(map), env_(env), cycle_cap_(cycle_cap) {
    for (const auto& item : map_.items()) {
        if (map_.replicates(id_, item)) db_[item] = DbEntry{"", kInitialWriter};
    }
}

TraceRecord Replica::rec(const char* ev) const { return trace_record(ev, env_.stamp().time, id_); }

void Replica::start() { refresh_leaders(); }

void Replica::refresh_leaders() {
    for (const auto& [item, _] : db_) {
        SiteId leader = env_.weak_leader(id_, item);
        auto it = leader_view_.find(item);
        if (it != leader_view_.end() && it->second == leader) continue;
        leader_view_[item] = leader;
        auto r = rec("leader");
        r["item"] = item.str();
        r["leader"] = leader.str();
        env_.emit(std::move(r));
    }
}

std::vector<OperationId> Replica::pending() const {
    std::vector<OperationId> out;
    for (const auto& [id, _] : pending_) out.push_back(id);
    return out;
}

// ---------------------------------------------------------------------------
// Initial execution

Operation Replica::make_op(const TxnSpec& spec, std::size_t index) const {
    const OpSpec& s = spec.ops.at(index);
    if (s.kind == OpKind::Read) return Operation(op_id_for(spec.id, index), spec.id, s.item, OpKind::Read);
    return Operation(op_id_for(spec.id, index), spec.id, s.item, OpKind::Write, s.value.value_or(spec.id.str()));
}

void Replica::begin(const TxnSpec& spec) {
    if (exec_.contains(spec.id)) throw std::logic_error("transaction " + spec.id.str() + " already running");
    if (spec.ops.empty()) throw ModelError("transaction " + spec.id.str() + " has no operations");
    auto r = rec("txn_start");
    r["txn"] = spec.id.str();
    r["ops"] = spec.ops.size();
    env_.emit(std::move(r));
    auto [it, _] = exec_.emplace(spec.id, Exec{spec, env_.stamp(), 0, false, {}});
    perform(it->second);
}

void Replica::exec_step(const TransactionId& txn) {
    auto it = exec_.find(txn);
    if (it == exec_.end() || it->second.waiting) return;
    perform(it->second);
}

void Replica::perform(Exec& ex) {
    if (ex.pc == ex.spec.ops.size()) {
        finish_execution(ex);
        return;
    }
    const OpSpec& s = ex.spec.ops[ex.pc];
    const OperationId op = op_id_for(ex.spec.id, ex.pc);
    const bool local = map_.replicates(id_, s.item);
    if (s.kind == OpKind::Read && !local) {
        throw UnreplicatedItem("site " + id_.str() + " reads " + s.item.str() + " which it does not replicate");
    }
    if (local) {
        LockMode mode = s.kind == OpKind::Read ? LockMode::R : LockMode::W;
        if (locks_.request(s.item, op, ex.spec.id, mode) == LockOutcome::Enqueued) {
            ex.waiting = true;
            auto r = rec("lock_queue");
            r["txn"] = ex.spec.id.str();
            r["op"] = op.str();
            r["item"] = s.item.str();
            r["mode"] = to_string(mode);
            env_.emit(std::move(r));
            if (deadlocked(ex.spec.id)) local_abort(ex.spec.id, "deadlock");
            return;
        }
        wake({LockEntry{op, ex.spec.id, mode}});
        return;
    }
    // Blind write to an item stored elsewhere: nothing to lock here.
    ex.buffered[s.item] = make_op(ex.spec, ex.pc).update_value().value();
    ++ex.pc;
    env_.schedule_step(id_, ex.spec.id);
}

void Replica::wake(const std::vector<LockEntry>& granted) {
    for (const auto& entry : granted) {
        auto it = exec_.find(entry.txn);
        if (it == exec_.end()) continue;
        Exec& ex = it->second;
        if (ex.pc >= ex.spec.ops.size() || op_id_for(ex.spec.id, ex.pc) != entry.op) continue;
        const OpSpec& s = ex.spec.ops[ex.pc];
        auto g = rec("lock_grant");
        g["txn"] = entry.txn.str();
        g["op"] = entry.op.str();
        g["item"] = s.item.str();
        g["mode"] = to_string(entry.mode);
        env_.emit(std::move(g));
        if (s.kind == OpKind::Read) {
            auto r = rec("read");
            r["txn"] = entry.txn.str();
            r["op"] = entry.op.str();
            r["item"] = s.item.str();
            auto own = ex.buffered.find(s.item);
            r["writer"] = own != ex.buffered.end() ? entry.txn.str() : db_.at(s.item).writer.str();
            env_.emit(std::move(r));
        } else {
            ex.buffered[s.item] = make_op(ex.spec, ex.pc).update_value().value();
        }
        ex.waiting = false;
        ++ex.pc;
        env_.schedule_step(id_, entry.txn);
    }
}

void Replica::finish_execution(Exec& ex) {
    const TransactionId txn = ex.spec.id;
    std::vector<Operation> ops;
    for (std::size_t i = 0; i < ex.spec.ops.size(); ++i) ops.push_back(make_op(ex.spec, i));
    const bool read_only = std::none_of(ops.begin(), ops.end(), [](const Operation& o) { return o.is_write(); });

    if (read_only) {
        exec_.erase(txn);
        auto granted = locks_.release_transaction(txn);
        auto r = rec("txn_ro_commit");
        r["txn"] = txn.str();
        env_.emit(std::move(r));
        env_.decided(id_, txn, true);
        std::vector<LockEntry> entries;
        for (auto& [_, e] : granted) entries.push_back(e);
        wake(entries);
        return;
    }

    std::vector<LockEntry> granted;
    for (const auto& o : ops) {
        if (!map_.replicates(id_, o.item())) continue;
        std::vector<LockEntry> g = o.is_read() ? locks_.release(o.item(), o.id()) : locks_.convert_w_to_iw(o.item(), o.id());
        granted.insert(granted.end(), g.begin(), g.end());
    }
    auto meta = std::make_shared<const Transaction>(txn, std::move(ops), id_, ExecInterval{ex.start, env_.stamp()});
    exec_.erase(txn);
    env_.r_multicast(id_, meta);
    wake(granted);
}

// Takes the id by value: callers often pass a reference into the erased Exec.
void Replica::local_abort(TransactionId txn, const std::string& reason) {
    if (!exec_.erase(txn)) return;
    auto r = rec("txn_local_abort");
    r["txn"] = txn.str();
    r["reason"] = reason;
    env_.emit(std::move(r));
    std::vector<LockEntry> entries;
    for (auto& [_, e] : locks_.release_transaction(txn)) entries.push_back(e);
    wake(entries);
}

std::set<TransactionId> Replica::blockers(const TransactionId& txn) const {
    std::set<TransactionId> out;
    auto it = exec_.find(txn);
    if (it == exec_.end() || !it->second.waiting) return out;
    const Exec& ex = it->second;
    const DataItemId& item = ex.spec.ops[ex.pc].item;
    const OperationId op = op_id_for(txn, ex.pc);
    const LockMode mode = ex.spec.ops[ex.pc].kind == OpKind::Read ? LockMode::R : LockMode::W;
    for (const auto& h : locks_.holders(item)) {
        if (h.txn != txn && !compatible(mode, h.mode)) out.insert(h.txn);
    }
    for (const auto& q : locks_.queue(item)) {
        if (q.op == op) break;
        if (q.txn != txn) out.insert(q.txn);
    }
    return out;
}

bool Replica::deadlocked(const TransactionId& txn) const {
    std::set<TransactionId> seen;
    std::deque<TransactionId> work{txn};
    while (!work.empty()) {
        auto t = work.front();
        work.pop_front();
        for (const auto& b : blockers(t)) {
            if (b == txn) return true;
            if (exec_.contains(b) && seen.insert(b).second) work.push_back(b);
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Submission and certification

void Replica::on_r_deliver(const TransactionPtr& txn) {
    if (decided_here(txn->id())) return;
    for (const auto& op : txn->ops()) {
        if (!map_.replicates(id_, op.item()) || delivered_.contains(op.id())) continue;
        pending_.emplace(op.id(), Pending{op, txn});
    }
    leader_pump();
}

void Replica::on_leader_change() {
    refresh_leaders();
    leader_pump();
}

void Replica::leader_pump() {
    for (const auto& [id, p] : pending_) {
        if (multicast_.contains(id)) continue;
        if (env_.weak_leader(id_, p.op.item()) != id_) continue;
        multicast_.insert(id);
        env_.to_multicast(id_, p.op, p.txn);
    }
}

void Replica::on_to_deliver(const Operation& op, const TransactionPtr& txn) {
    if (!delivered_.insert(op.id()).second) return;
    pending_.erase(op.id());
    auto& log = to_log_[op.item()];
    log.push_back(op.id());
    const TransactionId& t = op.txn();
    graph_.add_vertex(txn);
    graph_.add_op(t, op.id());

    owner_.emplace(op.id(), t);
    auto prior_op = [&](const OperationId& id) -> std::pair<TransactionId, const Operation*> {
        const TransactionId& owner = owner_.at(id);
        return {owner, graph_.meta(owner).find(id)};
    };

    if (op.is_read()) {
        for (std::size_t i = 0; i + 1 < log.size(); ++i) {
            auto [owner, other] = prior_op(log[i]);
            if (owner == t || !other->is_write()) continue;
            if (!env_.concurrent(graph_.meta(owner), *txn)) continue;
            if (!graph_.is_aborted(t)) {
                graph_.set_aborted(t);
                auto r = rec("outdated_read");
                r["txn"] = t.str();
                r["op"] = op.id().str();
                r["writer"] = owner.str();
                env_.emit(std::move(r));
            }
            break;
        }
    } else {
        auto force = locks_.force_write_lock(op.item(), op.id(), t,
                                             [this](const TransactionId& x) { return exec_.contains(x); });
        for (const auto& victim : force.victims) {
            auto r = rec("force_lock_abort");
            r["txn"] = victim.str();
            r["by"] = op.id().str();
            r["item"] = op.item().str();
            env_.emit(std::move(r));
            local_abort(victim, "force_write_lock");
        }
        std::vector<LockEntry> entries;
        for (auto& [_, e] : force.granted) entries.push_back(e);
        wake(entries);
        for (std::size_t i = 0; i + 1 < log.size(); ++i) {
            auto [owner, other] = prior_op(log[i]);
            if (owner != t) graph_.add_edge(owner, t);
        }
    }

    send_predecessors(t, replicas_of(graph_.out_neighbors(t)));
    try_commit();
}

// ---------------------------------------------------------------------------
// Closure

SiteSet Replica::replicas_of(const VertexSet& txns) const {
    SiteSet out;
    for (const auto& t : txns) {
        auto r = map_.replicas(graph_.meta(t));
        out.insert(r.begin(), r.end());
    }
    return out;
}

void Replica::send_predecessors(const TransactionId& txn, const SiteSet& to) {
    if (to.empty()) return;
    auto g = std::make_shared<const PrecedenceGraph>(graph_.predecessors(txn));
    auto r = rec("graph_send");
    r["about"] = txn.str();
    r["to"] = names(to);
    r["vertices"] = g->size();
    env_.emit(std::move(r));
    env_.send_graph(id_, txn, to, std::move(g));
}

void Replica::on_receive_graph(const SiteId& from, const TransactionId& about, const PrecedenceGraph& graph) {
    try {
        graph.validate();
    } catch (const MalformedGraph& e) {
        auto r = rec("protocol_error");
        r["from"] = from.str();
        r["error"] = e.what();
        env_.emit(std::move(r));
        return;
    }
    auto r = rec("graph_recv");
    r["from"] = from.str();
    r["about"] = about.str();
    r["vertices"] = graph.size();
    env_.emit(std::move(r));
    if (is_subset(graph, graph_)) return;

    // Seeds: what the incoming graph adds. The predecessors of T grow exactly
    // when T is reachable from a seed.
    VertexSet seeds, fresh, edge_targets;
    for (const auto& [v, vert] : graph.vertices()) {
        if (!graph_.contains(v)) {
            seeds.insert(v);
            fresh.insert(v);
            continue;
        }
        const auto& mine = graph_.vertex(v);
        bool grew = vert.aborted && !mine.aborted;
        grew = grew || !std::includes(mine.ops.begin(), mine.ops.end(), vert.ops.begin(), vert.ops.end());
        if (grew) seeds.insert(v);
    }
    for (const auto& e : graph.edges()) {
        if (!graph_.edges().contains(e)) {
            seeds.insert(e.second);
            edge_targets.insert(e.second);
        }
    }
    merge_into(graph_, graph);

    VertexSet strict;
    std::deque<TransactionId> work;
    for (const auto& s : seeds) {
        for (const auto& n : graph_.successors(s)) {
            if (strict.insert(n).second) work.push_back(n);
        }
    }
    while (!work.empty()) {
        auto v = work.front();
        work.pop_front();
        for (const auto& n : graph_.successors(v)) {
            if (strict.insert(n).second) work.push_back(n);
        }
    }
    VertexSet affected = seeds;
    affected.insert(strict.begin(), strict.end());

    for (const auto& t : affected) {
        if (fresh.contains(t)) continue;
        const bool own_only = !strict.contains(t) && !edge_targets.contains(t);
        if (own_only) {
            // The site that changed T already told replicas(T); only
            // successors it may not know about are left.
            VertexSet succ = graph_.successors(t);
            succ.erase(t);
            send_predecessors(t, replicas_of(succ));
        } else {
            send_predecessors(t, replicas_of(graph_.out_neighbors(t)));
        }
    }
    try_commit();
}

// ---------------------------------------------------------------------------
// Commitment

bool Replica::local_writer(const TransactionId& txn) const {
    for (const auto& op : graph_.meta(txn).ops()) {
        if (op.is_write() && map_.replicates(id_, op.item())) return true;
    }
    return false;
}

bool Replica::decided_here(const TransactionId& txn) const {
    return committed_.contains(txn) || aborted_.contains(txn);
}

bool Replica::ready_locally(const TransactionId& txn) const {
    for (const auto& op : graph_.meta(txn).ops()) {
        if (!op.is_write() || !map_.replicates(id_, op.item())) continue;
        if (!delivered_.contains(op.id()) || !locks_.holds(op.item(), op.id(), LockMode::IW)) return false;
    }
    return true;
}

void Replica::try_commit() {
    if (in_try_commit_) return;
    in_try_commit_ = true;
    bool progress = true;
    while (progress) {
        progress = false;
        const VertexSet closed = closed_vertices(graph_);
        std::map<TransactionId, std::size_t> comp_of;
        auto comps = cyclic_components(graph_);
        for (std::size_t i = 0; i < comps.size(); ++i) {
            for (const auto& v : comps[i]) comp_of[v] = i;
        }
        std::set<std::size_t> tried;
        for (const auto& [t, _] : graph_.vertices()) {
            if (decided_here(t) || !local_writer(t)) continue;
            auto it = comp_of.find(t);
            if (it != comp_of.end()) {
                if (!tried.insert(it->second).second) continue;
                progress = try_decide_component(comps[it->second], closed) || progress;
            } else {
                progress = try_decide_component(VertexSet{t}, closed) || progress;
            }
        }
    }
    in_try_commit_ = false;
}

bool Replica::try_decide_component(const VertexSet& component, const VertexSet& closed) {
    std::vector<TransactionId> members;
    for (const auto& m : component) {
        if (local_writer(m) && !decided_here(m)) members.push_back(m);
    }
    if (members.empty()) return false;
    for (const auto& m : members) {
        if (!closed.contains(m) || !ready_locally(m)) return false;
    }
    // Everything ordered before the component that this site applies must
    // already be settled, so versions are installed in precedence order.
    for (const auto& p : graph_.ancestor_set(members.front())) {
        if (component.contains(p)) continue;
        if (local_writer(p) && !decided_here(p)) return false;
    }

    const PrecedenceGraph preds = graph_.predecessors(members.front());
    const PrecedenceGraph live = live_cycle_union(preds);
    const VertexSet losers = live.empty() ? VertexSet{} : break_cycles(live, cycle_cap_);

    std::set<TransactionId> winners;
    for (const auto& m : members) {
        if (graph_.is_aborted(m) || losers.contains(m)) {
            abort_local(m);
        } else {
            winners.insert(m);
        }
    }
    // Kahn order over the winners, smallest id first.
    std::map<TransactionId, int> indeg;
    for (const auto& w : winners) indeg[w];
    for (const auto& w : winners) {
        for (const auto& s : graph_.successors(w)) {
            if (s != w && winners.contains(s)) ++indeg[s];
        }
    }
    std::set<TransactionId> ready;
    for (const auto& [w, d] : indeg) {
        if (d == 0) ready.insert(w);
    }
    while (!ready.empty()) {
        TransactionId w = *ready.begin();
        ready.erase(ready.begin());
        commit_local(w);
        for (const auto& s : graph_.successors(w)) {
            if (s != w && winners.contains(s) && --indeg[s] == 0) ready.insert(s);
        }
    }
    for (const auto& w : winners) {
        if (!decided_here(w)) throw std::logic_error("cycle left among committing transactions at " + id_.str());
    }
    return true;
}

void Replica::commit_local(const TransactionId& txn) {
    const Transaction& meta = graph_.meta(txn);
    std::vector<const Operation*> writes;
    for (const auto& op : meta.ops()) {
        if (op.is_write() && map_.replicates(id_, op.item())) writes.push_back(&op);
    }
    auto position = [this](const Operation* o) {
        const auto& log = to_log_.at(o->item());
        return std::find(log.begin(), log.end(), o->id()) - log.begin();
    };
    std::stable_sort(writes.begin(), writes.end(), [&](const Operation* a, const Operation* b) {
        return a->item() != b->item() ? a->item() < b->item() : position(a) < position(b);
    });
    for (const Operation* o : writes) {
        std::optional<TransactionId> later;
        for (const auto& s : graph_.successors(txn)) {
            if (s == txn || !committed_.contains(s)) continue;
            const auto items = graph_.meta(s).items();
            if (items.contains(o->item())) {
                later = s;
                break;
            }
        }
        if (later) {
            auto r = rec("value_skipped");
            r["txn"] = txn.str();
            r["op"] = o->id().str();
            r["item"] = o->item().str();
            r["by"] = later->str();
            env_.emit(std::move(r));
            continue;
        }
        db_[o->item()] = DbEntry{o->update_value().value_or(""), txn};
        auto r = rec("value_applied");
        r["txn"] = txn.str();
        r["op"] = o->id().str();
        r["item"] = o->item().str();
        env_.emit(std::move(r));
    }
    committed_.insert(txn);
    auto r = rec("txn_commit");
    r["txn"] = txn.str();
    env_.emit(std::move(r));
    env_.decided(id_, txn, true);
    for (auto it = pending_.begin(); it != pending_.end();) {
        it = it->second.op.txn() == txn ? pending_.erase(it) : std::next(it);
    }
    std::vector<LockEntry> entries;
    for (auto& [_, e] : locks_.release_transaction(txn)) entries.push_back(e);
    wake(entries);
}

void Replica::abort_local(const TransactionId& txn) {
    aborted_.insert(txn);
    auto r = rec("txn_abort");
    r["txn"] = txn.str();
    r["reason"] = graph_.is_aborted(txn) ? "outdated_read" : "cycle";
    env_.emit(std::move(r));
    env_.decided(id_, txn, false);
    for (auto it = pending_.begin(); it != pending_.end();) {
        it = it->second.op.txn() == txn ? pending_.erase(it) : std::next(it);
    }
    std::vector<LockEntry> entries;
    for (auto& [_, e] : locks_.release_transaction(txn)) entries.push_back(e);
    wake(entries);
}

TraceRecord Replica::final_state(SimTime t) const {
    auto r = trace_record("site_final", t, id_);
    const VertexSet closed = closed_vertices(graph_);
    auto unclosed = nlohmann::ordered_json::array();
    for (const auto& [v, _] : graph_.vertices()) {
        if (!closed.contains(v)) unclosed.push_back(v.str());
    }
    r["unclosed"] = std::move(unclosed);
    auto db = nlohmann::ordered_json::object();
    for (const auto& [item, entry] : db_) db[item.str()] = entry.writer.str();
    r["db"] = std::move(db);
    r["committed"] = committed_.size();
    r["aborted"] = aborted_.size();
    r["pending"] = pending_.size();
    return r;
}

}  // namespace pregraph
