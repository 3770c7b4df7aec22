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

// Small builders shared by the unit tests.

#pragma once

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pregraph/model.hpp"
#include "pregraph/precedence_graph.hpp"

namespace pregraph::testing {

inline TransactionId tid(const std::string& s) { return TransactionId(s); }
inline OperationId oid(const std::string& s) { return OperationId(s); }
inline DataItemId iid(const std::string& s) { return DataItemId(s); }
inline SiteId sid(const std::string& s) { return SiteId(s); }

inline Operation read_op(const std::string& txn, int idx, const std::string& item) {
    return Operation(oid(txn + "." + std::to_string(idx)), tid(txn), iid(item), OpKind::Read);
}

inline Operation write_op(const std::string& txn, int idx, const std::string& item) {
    return Operation(oid(txn + "." + std::to_string(idx)), tid(txn), iid(item), OpKind::Write,
                     txn + ":" + item);
}

/// Transaction `name` with the given (kind, item) operations, numbered in order.
inline TransactionPtr make_txn(const std::string& name, const std::vector<std::pair<OpKind, std::string>>& ops,
                               const std::string& origin = "s1", SimTime start = 0, SimTime end = 1) {
    std::vector<Operation> out;
    int idx = 0;
    for (const auto& [kind, item] : ops) {
        out.push_back(kind == OpKind::Read ? read_op(name, idx, item) : write_op(name, idx, item));
        ++idx;
    }
    return std::make_shared<const Transaction>(tid(name), std::move(out), sid(origin),
                                               ExecInterval{Stamp{start, 0}, Stamp{end, 0}});
}

/// Single-write transaction, handy for graph tests.
inline TransactionPtr w_txn(const std::string& name, const std::string& item = "x") {
    return make_txn(name, {{OpKind::Write, item}});
}

/// Adds a vertex whose op subset is complete.
inline void add_full(PrecedenceGraph& g, const TransactionPtr& t) {
    g.add_vertex(t);
    for (const auto& op : t->ops()) g.add_op(t->id(), op.id());
}

inline std::string vname(int i) {
    return std::string("T") + (i < 10 ? "0" : "") + std::to_string(i);
}

/// Random graph on `n` vertices named T00..; each ordered pair becomes an
/// edge with probability `p`. Vertices get two ops; some are incomplete or
/// aborted when the respective probabilities are non-zero.
inline PrecedenceGraph random_graph(std::mt19937_64& rng, int n, double p, double p_incomplete = 0.0,
                                    double p_aborted = 0.0, bool self_loops = false) {
    std::bernoulli_distribution edge(p), incomplete(p_incomplete), aborted(p_aborted);
    PrecedenceGraph g;
    for (int i = 0; i < n; ++i) {
        auto t = make_txn(vname(i), {{OpKind::Read, "x"}, {OpKind::Write, "y"}});
        g.add_vertex(t);
        g.add_op(t->id(), t->ops()[0].id());
        if (!incomplete(rng)) g.add_op(t->id(), t->ops()[1].id());
        if (aborted(rng)) g.set_aborted(t->id());
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j && !self_loops) continue;
            if (edge(rng)) g.add_edge(tid(vname(i)), tid(vname(j)));
        }
    }
    return g;
}

}  // namespace pregraph::testing
