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

#include "pregraph/precedence_graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace pregraph {

namespace {

const VertexSet kNoVertices;

}  // namespace

// ---------------------------------------------------------------------------
// Value type

void PrecedenceGraph::add_vertex(TransactionPtr meta) {
    if (!meta) throw MalformedGraph("vertex without transaction metadata");
    auto id = meta->id();
    vertices_.try_emplace(id, Vertex{std::move(meta), false, {}});
}

PrecedenceGraph::Vertex& PrecedenceGraph::mutable_vertex(const TransactionId& txn) {
    auto it = vertices_.find(txn);
    if (it == vertices_.end()) throw VertexAbsent("no vertex " + txn.str());
    return it->second;
}

const PrecedenceGraph::Vertex& PrecedenceGraph::vertex(const TransactionId& txn) const {
    auto it = vertices_.find(txn);
    if (it == vertices_.end()) throw VertexAbsent("no vertex " + txn.str());
    return it->second;
}

void PrecedenceGraph::add_op(const TransactionId& txn, const OperationId& op) {
    auto& v = mutable_vertex(txn);
    if (!v.meta->find(op)) throw MalformedGraph(op.str() + " is not an operation of " + txn.str());
    v.ops.insert(op);
}

void PrecedenceGraph::set_aborted(const TransactionId& txn) {
    mutable_vertex(txn).aborted = true;
}

void PrecedenceGraph::add_edge(const TransactionId& from, const TransactionId& to) {
    if (!contains(from) || !contains(to)) {
        throw VertexAbsent("edge " + from.str() + "->" + to.str() + " needs both endpoints");
    }
    if (edges_.emplace(from, to).second) {
        out_[from].insert(to);
        in_[to].insert(from);
    }
}

bool PrecedenceGraph::ops_complete(const TransactionId& txn) const {
    const auto& v = vertex(txn);
    return v.ops.size() == v.meta->ops().size();
}

const VertexSet& PrecedenceGraph::successors(const TransactionId& txn) const {
    auto it = out_.find(txn);
    return it == out_.end() ? kNoVertices : it->second;
}

const VertexSet& PrecedenceGraph::predecessors_direct(const TransactionId& txn) const {
    auto it = in_.find(txn);
    return it == in_.end() ? kNoVertices : it->second;
}

VertexSet PrecedenceGraph::in_neighbors(const TransactionId& txn) const {
    vertex(txn);
    VertexSet out = predecessors_direct(txn);
    out.insert(txn);
    return out;
}

VertexSet PrecedenceGraph::out_neighbors(const TransactionId& txn) const {
    vertex(txn);
    VertexSet out = successors(txn);
    out.insert(txn);
    return out;
}

VertexSet PrecedenceGraph::ancestor_set(const TransactionId& txn) const {
    vertex(txn);
    VertexSet seen{txn};
    std::deque<TransactionId> work{txn};
    while (!work.empty()) {
        auto cur = work.front();
        work.pop_front();
        for (const auto& p : predecessors_direct(cur)) {
            if (seen.insert(p).second) work.push_back(p);
        }
    }
    return seen;
}

PrecedenceGraph PrecedenceGraph::induced(const VertexSet& keep) const {
    PrecedenceGraph g;
    for (const auto& id : keep) {
        auto it = vertices_.find(id);
        if (it != vertices_.end()) g.vertices_.emplace(id, it->second);
    }
    for (const auto& [from, to] : edges_) {
        if (g.contains(from) && g.contains(to)) g.add_edge(from, to);
    }
    return g;
}

PrecedenceGraph PrecedenceGraph::predecessors(const TransactionId& txn) const {
    return induced(ancestor_set(txn));
}

void PrecedenceGraph::validate() const {
    for (const auto& [id, v] : vertices_) {
        if (!v.meta || v.meta->id() != id) throw MalformedGraph("vertex " + id.str() + " has wrong metadata");
        for (const auto& op : v.ops) {
            if (!v.meta->find(op)) throw MalformedGraph(op.str() + " is not an operation of " + id.str());
        }
    }
    for (const auto& [from, to] : edges_) {
        if (!contains(from) || !contains(to)) throw MalformedGraph("dangling edge " + from.str() + "->" + to.str());
    }
}

bool operator==(const PrecedenceGraph& a, const PrecedenceGraph& b) {
    if (a.edges_ != b.edges_ || a.vertices_.size() != b.vertices_.size()) return false;
    auto ia = a.vertices_.begin();
    auto ib = b.vertices_.begin();
    for (; ia != a.vertices_.end(); ++ia, ++ib) {
        if (ia->first != ib->first || ia->second.aborted != ib->second.aborted || ia->second.ops != ib->second.ops) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::ordered_json transaction_to_json(const Transaction& txn) {
    nlohmann::ordered_json ops = nlohmann::ordered_json::array();
    for (const auto& op : txn.ops()) {
        nlohmann::ordered_json o;
        o["id"] = op.id().str();
        o["item"] = op.item().str();
        o["kind"] = to_string(op.kind());
        if (op.update_value()) o["value"] = *op.update_value();
        ops.push_back(std::move(o));
    }
    nlohmann::ordered_json j;
    j["id"] = txn.id().str();
    j["origin"] = txn.origin().str();
    j["start"] = {txn.interval().start.time, txn.interval().start.seq};
    j["end"] = {txn.interval().end.time, txn.interval().end.seq};
    j["ops"] = std::move(ops);
    return j;
}

Transaction transaction_from_json(const nlohmann::json& j) {
    TransactionId id(j.at("id").get<std::string>());
    std::vector<Operation> ops;
    for (const auto& o : j.at("ops")) {
        auto kind = o.at("kind").get<std::string>() == "write" ? OpKind::Write : OpKind::Read;
        std::optional<std::string> value;
        if (o.contains("value")) value = o.at("value").get<std::string>();
        ops.emplace_back(OperationId(o.at("id").get<std::string>()), id, DataItemId(o.at("item").get<std::string>()),
                         kind, std::move(value));
    }
    auto stamp = [&](const char* key) {
        const auto& s = j.at(key);
        return Stamp{s.at(0).get<SimTime>(), s.at(1).get<std::uint64_t>()};
    };
    return Transaction(id, std::move(ops), SiteId(j.at("origin").get<std::string>()),
                       ExecInterval{stamp("start"), stamp("end")});
}

nlohmann::ordered_json PrecedenceGraph::to_json() const {
    nlohmann::ordered_json vertices = nlohmann::ordered_json::array();
    for (const auto& [id, v] : vertices_) {
        nlohmann::ordered_json jv;
        jv["txn"] = id.str();
        jv["aborted"] = v.aborted;
        nlohmann::ordered_json ops = nlohmann::ordered_json::array();
        for (const auto& op : v.ops) ops.push_back(op.str());
        jv["ops"] = std::move(ops);
        jv["meta"] = transaction_to_json(*v.meta);
        vertices.push_back(std::move(jv));
    }
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& [from, to] : edges_) edges.push_back({from.str(), to.str()});
    nlohmann::ordered_json j;
    j["vertices"] = std::move(vertices);
    j["edges"] = std::move(edges);
    return j;
}

PrecedenceGraph PrecedenceGraph::from_json(const nlohmann::json& j) {
    PrecedenceGraph g;
    try {
        for (const auto& jv : j.at("vertices")) {
            auto meta = std::make_shared<const Transaction>(transaction_from_json(jv.at("meta")));
            TransactionId id(jv.at("txn").get<std::string>());
            if (meta->id() != id) throw MalformedGraph("vertex " + id.str() + " carries metadata of " + meta->id().str());
            g.add_vertex(meta);
            if (jv.at("aborted").get<bool>()) g.set_aborted(id);
            for (const auto& op : jv.at("ops")) g.add_op(id, OperationId(op.get<std::string>()));
        }
        for (const auto& e : j.at("edges")) {
            g.add_edge(TransactionId(e.at(0).get<std::string>()), TransactionId(e.at(1).get<std::string>()));
        }
    } catch (const nlohmann::json::exception& e) {
        throw MalformedGraph(e.what());
    } catch (const VertexAbsent& e) {
        throw MalformedGraph(e.what());
    } catch (const ModelError& e) {
        throw MalformedGraph(e.what());
    }
    return g;
}

std::string PrecedenceGraph::canonical() const {
    return to_json().dump();
}

// ---------------------------------------------------------------------------
// Union / subset

bool merge_into(PrecedenceGraph& into, const PrecedenceGraph& other) {
    bool changed = false;
    for (const auto& [id, v] : other.vertices()) {
        if (!into.contains(id)) {
            into.add_vertex(v.meta);
            changed = true;
        }
        const auto& mine = into.vertex(id);
        if (v.aborted && !mine.aborted) {
            into.set_aborted(id);
            changed = true;
        }
        for (const auto& op : v.ops) {
            if (!mine.ops.contains(op)) {
                into.add_op(id, op);
                changed = true;
            }
        }
    }
    for (const auto& [from, to] : other.edges()) {
        if (!into.edges().contains({from, to})) {
            into.add_edge(from, to);
            changed = true;
        }
    }
    return changed;
}

PrecedenceGraph graph_union(const PrecedenceGraph& a, const PrecedenceGraph& b) {
    PrecedenceGraph out = a;
    merge_into(out, b);
    return out;
}

bool is_subset(const PrecedenceGraph& a, const PrecedenceGraph& b) {
    for (const auto& [id, v] : a.vertices()) {
        if (!b.contains(id)) return false;
        const auto& w = b.vertex(id);
        if (v.aborted && !w.aborted) return false;
        if (!std::includes(w.ops.begin(), w.ops.end(), v.ops.begin(), v.ops.end())) return false;
    }
    return std::includes(b.edges().begin(), b.edges().end(), a.edges().begin(), a.edges().end());
}

// ---------------------------------------------------------------------------
// Cycles

namespace {

/// Dense index view of a graph: vertices numbered in id order.
struct Indexed {
    std::vector<TransactionId> ids;
    std::vector<std::vector<int>> adj;

    explicit Indexed(const PrecedenceGraph& g) {
        std::map<TransactionId, int> index;
        for (const auto& [id, _] : g.vertices()) {
            index.emplace(id, static_cast<int>(ids.size()));
            ids.push_back(id);
        }
        adj.resize(ids.size());
        for (const auto& [from, to] : g.edges()) adj[index.at(from)].push_back(index.at(to));
    }
};

/// Tarjan SCC over vertices flagged in `alive`. Returns component id per
/// vertex (-1 for dead vertices).
std::vector<int> strongly_connected(const std::vector<std::vector<int>>& adj, const std::vector<bool>& alive,
                                    int& count) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next = 0;
    count = 0;
    // Iterative Tarjan to stay clear of deep recursion on long chains.
    for (int root = 0; root < n; ++root) {
        if (!alive[root] || index[root] != -1) continue;
        std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, pos] = frames.back();
            if (pos < adj[v].size()) {
                int w = adj[v][pos++];
                if (!alive[w]) continue;
                if (index[w] == -1) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != v);
                ++count;
            }
            int finished = v;
            frames.pop_back();
            if (!frames.empty()) {
                int parent = frames.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }
    return comp;
}

/// Marks vertices whose component contains a cycle.
std::vector<bool> on_some_cycle(const std::vector<std::vector<int>>& adj, const std::vector<bool>& alive) {
    int count = 0;
    auto comp = strongly_connected(adj, alive, count);
    std::vector<int> size(count, 0);
    for (int v = 0; v < static_cast<int>(adj.size()); ++v) {
        if (comp[v] >= 0) ++size[comp[v]];
    }
    std::vector<bool> cyclic(adj.size(), false);
    for (int v = 0; v < static_cast<int>(adj.size()); ++v) {
        if (comp[v] < 0) continue;
        if (size[comp[v]] > 1) {
            cyclic[v] = true;
        } else {
            cyclic[v] = std::find(adj[v].begin(), adj[v].end(), v) != adj[v].end();
        }
    }
    return cyclic;
}

/// Johnson's elementary circuit enumeration restricted to `alive` vertices.
/// Calls `emit` per cycle; returns false as soon as more than `cap` cycles
/// have been seen.
class CircuitFinder {
public:
    CircuitFinder(const std::vector<std::vector<int>>& adj, const std::vector<bool>& alive, std::size_t cap,
                  std::function<void(const std::vector<int>&)> emit)
        : adj_(adj), alive_(alive), cap_(cap), emit_(std::move(emit)) {}

    bool run() {
        const int n = static_cast<int>(adj_.size());
        for (start_ = 0; start_ < n; ++start_) {
            if (!alive_[start_]) continue;
            // Restrict to the component of `start_` among alive vertices >= start_.
            std::vector<bool> sub(n, false);
            for (int v = start_; v < n; ++v) sub[v] = alive_[v];
            int count = 0;
            auto comp = strongly_connected(adj_, sub, count);
            in_comp_.assign(n, false);
            int members = 0;
            for (int v = start_; v < n; ++v) {
                if (sub[v] && comp[v] == comp[start_]) {
                    in_comp_[v] = true;
                    ++members;
                }
            }
            bool self_loop = std::find(adj_[start_].begin(), adj_[start_].end(), start_) != adj_[start_].end();
            if (members < 2 && !self_loop) continue;
            blocked_.assign(n, false);
            blocked_by_.assign(n, {});
            if (!circuit(start_)) {
                if (exceeded_) return false;
            }
            if (exceeded_) return false;
        }
        return true;
    }

private:
    bool circuit(int v) {
        bool found = false;
        path_.push_back(v);
        blocked_[v] = true;
        for (int w : adj_[v]) {
            if (exceeded_) break;
            if (!in_comp_[w]) continue;
            if (w == start_) {
                if (++found_count_ > cap_) {
                    exceeded_ = true;
                    break;
                }
                emit_(path_);
                found = true;
            } else if (!blocked_[w] && circuit(w)) {
                found = true;
            }
        }
        if (found) {
            unblock(v);
        } else {
            for (int w : adj_[v]) {
                if (in_comp_[w]) blocked_by_[w].insert(v);
            }
        }
        path_.pop_back();
        return found;
    }

    void unblock(int u) {
        blocked_[u] = false;
        auto waiting = std::move(blocked_by_[u]);
        blocked_by_[u].clear();
        for (int w : waiting) {
            if (blocked_[w]) unblock(w);
        }
    }

    const std::vector<std::vector<int>>& adj_;
    const std::vector<bool>& alive_;
    std::size_t cap_;
    std::function<void(const std::vector<int>&)> emit_;
    int start_ = 0;
    std::vector<bool> in_comp_;
    std::vector<bool> blocked_;
    std::vector<std::set<int>> blocked_by_;
    std::vector<int> path_;
    std::size_t found_count_ = 0;
    bool exceeded_ = false;
};

}  // namespace

std::vector<Cycle> elementary_cycles(const PrecedenceGraph& g, std::size_t cap) {
    Indexed ix(g);
    std::vector<bool> alive(ix.ids.size(), true);
    std::vector<Cycle> cycles;
    CircuitFinder finder(ix.adj, alive, cap, [&](const std::vector<int>& path) {
        Cycle c;
        c.reserve(path.size());
        for (int v : path) c.push_back(ix.ids[v]);
        cycles.push_back(std::move(c));
    });
    if (!finder.run()) {
        throw CycleBudgetExceeded("more than " + std::to_string(cap) + " elementary cycles");
    }
    return cycles;
}

std::vector<VertexSet> cyclic_components(const PrecedenceGraph& g) {
    Indexed ix(g);
    std::vector<bool> alive(ix.ids.size(), true);
    auto cyclic = on_some_cycle(ix.adj, alive);
    int count = 0;
    auto comp = strongly_connected(ix.adj, alive, count);
    std::map<int, VertexSet> by_comp;
    for (std::size_t v = 0; v < ix.ids.size(); ++v) {
        if (cyclic[v]) by_comp[comp[v]].insert(ix.ids[v]);
    }
    std::vector<VertexSet> out;
    for (auto& [_, members] : by_comp) out.push_back(std::move(members));
    std::sort(out.begin(), out.end());
    return out;
}

VertexSet break_cycles(const PrecedenceGraph& g, std::size_t cap) {
    Indexed ix(g);
    const int n = static_cast<int>(ix.ids.size());
    std::vector<bool> alive(n, true);
    VertexSet chosen;
    while (true) {
        auto cyclic = on_some_cycle(ix.adj, alive);
        if (std::none_of(cyclic.begin(), cyclic.end(), [](bool b) { return b; })) break;

        std::vector<long long> score(n, 0);
        CircuitFinder finder(ix.adj, alive, cap, [&](const std::vector<int>& path) {
            for (int v : path) ++score[v];
        });
        if (!finder.run()) {
            int count = 0;
            auto comp = strongly_connected(ix.adj, alive, count);
            std::vector<long long> in(n, 0), out(n, 0);
            for (int v = 0; v < n; ++v) {
                if (!cyclic[v]) continue;
                for (int w : ix.adj[v]) {
                    if (cyclic[w] && comp[w] == comp[v]) {
                        ++out[v];
                        ++in[w];
                    }
                }
            }
            for (int v = 0; v < n; ++v) score[v] = in[v] * out[v];
        }
        int best = -1;
        for (int v = 0; v < n; ++v) {
            if (!cyclic[v]) continue;
            if (best == -1 || score[v] > score[best]) best = v;
        }
        alive[best] = false;
        chosen.insert(ix.ids[best]);
    }
    return chosen;
}

PrecedenceGraph live_cycle_union(const PrecedenceGraph& g) {
    VertexSet live;
    for (const auto& [id, v] : g.vertices()) {
        if (!v.aborted) live.insert(id);
    }
    PrecedenceGraph h = g.induced(live);
    Indexed ix(h);
    std::vector<bool> alive(ix.ids.size(), true);
    auto cyclic = on_some_cycle(ix.adj, alive);
    int count = 0;
    auto comp = strongly_connected(ix.adj, alive, count);

    PrecedenceGraph out;
    for (std::size_t v = 0; v < ix.ids.size(); ++v) {
        if (cyclic[v]) out.add_vertex(h.vertex(ix.ids[v]).meta);
    }
    for (std::size_t v = 0; v < ix.ids.size(); ++v) {
        if (!cyclic[v]) continue;
        for (int w : ix.adj[v]) {
            if (comp[w] == comp[v]) out.add_edge(ix.ids[v], ix.ids[w]);
        }
    }
    return out;
}

bool decide(const TransactionId& txn, const PrecedenceGraph& g, std::size_t cap) {
    auto cycles = live_cycle_union(g);
    if (!cycles.contains(txn)) return true;
    return !break_cycles(cycles, cap).contains(txn);
}

VertexSet closed_vertices(const PrecedenceGraph& g) {
    VertexSet open;
    std::deque<TransactionId> work;
    for (const auto& [id, _] : g.vertices()) {
        if (!g.ops_complete(id)) {
            open.insert(id);
            work.push_back(id);
        }
    }
    while (!work.empty()) {
        auto cur = work.front();
        work.pop_front();
        for (const auto& succ : g.successors(cur)) {
            if (open.insert(succ).second) work.push_back(succ);
        }
    }
    VertexSet closed;
    for (const auto& [id, _] : g.vertices()) {
        if (!open.contains(id)) closed.insert(id);
    }
    return closed;
}

bool is_closed(const TransactionId& txn, const PrecedenceGraph& g) {
    g.vertex(txn);
    // Closed iff no ancestor is missing operations.
    for (const auto& a : g.ancestor_set(txn)) {
        if (!g.ops_complete(a)) return false;
    }
    return true;
}

}  // namespace pregraph
