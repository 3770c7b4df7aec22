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

#include <cstddef>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pregraph/model.hpp"

namespace pregraph {

inline constexpr std::size_t kDefaultCycleCap = 10000;

struct VertexAbsent : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct CycleBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedGraph : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using Edge = std::pair<TransactionId, TransactionId>;
using VertexSet = std::set<TransactionId>;
using Cycle = std::vector<TransactionId>;

/// Directed graph of transactions where an edge (A, B) says A must be
/// serialized before B. Each vertex carries the transaction's full
/// definition, an aborted flag and the subset of its operations this graph
/// has accounted for.
class PrecedenceGraph {
public:
    struct Vertex {
        TransactionPtr meta;
        bool aborted = false;
        std::set<OperationId> ops;
    };

    bool empty() const { return vertices_.empty(); }
    std::size_t size() const { return vertices_.size(); }
    bool contains(const TransactionId& txn) const { return vertices_.contains(txn); }

    /// Adds the vertex if missing; never replaces existing metadata.
    void add_vertex(TransactionPtr meta);
    void add_op(const TransactionId& txn, const OperationId& op);
    void set_aborted(const TransactionId& txn);
    void add_edge(const TransactionId& from, const TransactionId& to);

    const std::map<TransactionId, Vertex>& vertices() const { return vertices_; }
    const std::set<Edge>& edges() const { return edges_; }
    const Vertex& vertex(const TransactionId& txn) const;
    bool is_aborted(const TransactionId& txn) const { return vertex(txn).aborted; }
    const std::set<OperationId>& op_subset(const TransactionId& txn) const { return vertex(txn).ops; }
    const Transaction& meta(const TransactionId& txn) const { return *vertex(txn).meta; }
    /// op_subset covers every operation of the transaction.
    bool ops_complete(const TransactionId& txn) const;

    const VertexSet& successors(const TransactionId& txn) const;
    const VertexSet& predecessors_direct(const TransactionId& txn) const;

    /// {T} plus its direct predecessors / successors.
    VertexSet in_neighbors(const TransactionId& txn) const;
    VertexSet out_neighbors(const TransactionId& txn) const;

    /// Vertices that reach `txn` (including itself).
    VertexSet ancestor_set(const TransactionId& txn) const;
    /// Sub-graph induced by ancestor_set(txn).
    PrecedenceGraph predecessors(const TransactionId& txn) const;
    PrecedenceGraph induced(const VertexSet& keep) const;

    /// Throws MalformedGraph if an edge dangles or an op subset is not part
    /// of its transaction.
    void validate() const;

    nlohmann::ordered_json to_json() const;
    static PrecedenceGraph from_json(const nlohmann::json& j);
    /// Deterministic byte form: equal graphs produce identical strings.
    std::string canonical() const;

    /// Metadata is compared by transaction id only.
    friend bool operator==(const PrecedenceGraph& a, const PrecedenceGraph& b);

private:
    Vertex& mutable_vertex(const TransactionId& txn);

    std::map<TransactionId, Vertex> vertices_;
    std::set<Edge> edges_;
    std::map<TransactionId, VertexSet> out_;
    std::map<TransactionId, VertexSet> in_;
};

PrecedenceGraph graph_union(const PrecedenceGraph& a, const PrecedenceGraph& b);
/// In-place union; returns true if `into` changed.
bool merge_into(PrecedenceGraph& into, const PrecedenceGraph& other);
bool is_subset(const PrecedenceGraph& a, const PrecedenceGraph& b);

/// Every elementary cycle, each listed from its smallest vertex. Throws
/// CycleBudgetExceeded when more than `cap` cycles exist.
std::vector<Cycle> elementary_cycles(const PrecedenceGraph& g, std::size_t cap = kDefaultCycleCap);

/// Strongly connected components with at least one cycle inside them.
std::vector<VertexSet> cyclic_components(const PrecedenceGraph& g);

/// Deterministic feedback vertex set. Greedily removes the vertex lying on
/// the most remaining cycles (smallest id on ties). If counting cycles would
/// exceed `cap`, the score falls back to in-degree times out-degree inside
/// the vertex's component.
VertexSet break_cycles(const PrecedenceGraph& g, std::size_t cap = kDefaultCycleCap);

/// Union of the cycles of `g` made only of non-aborted transactions. Built
/// from components rather than by enumeration; the result is the same.
PrecedenceGraph live_cycle_union(const PrecedenceGraph& g);

/// Commit rule: false iff `txn` is chosen by break_cycles over the live
/// cycles of `g` (normally the predecessors of `txn`).
bool decide(const TransactionId& txn, const PrecedenceGraph& g, std::size_t cap = kDefaultCycleCap);

/// Greatest fixed point of: all ops known and every in-neighbor closed.
VertexSet closed_vertices(const PrecedenceGraph& g);
bool is_closed(const TransactionId& txn, const PrecedenceGraph& g);

nlohmann::ordered_json transaction_to_json(const Transaction& txn);
Transaction transaction_from_json(const nlohmann::json& j);

}  // namespace pregraph
