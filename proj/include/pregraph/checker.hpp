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

// Post-hoc trace oracle. Everything here is computed from trace records
// alone; no protocol-internal state is consulted.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pregraph/model.hpp"
#include "pregraph/trace.hpp"

namespace pregraph {

struct MalformedTrace : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OrderDisagreement : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DanglingRead : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Violation classes reported by the checker.
namespace violation {
inline constexpr const char* kAgreement = "agreement";
inline constexpr const char* kOrderDisagreement = "order_disagreement";
inline constexpr const char* kDanglingRead = "dangling_read";
inline constexpr const char* kSerializability = "serializability";
inline constexpr const char* kLiveness = "liveness";
inline constexpr const char* kDelivery = "delivery";
inline constexpr const char* kClosure = "closure";
inline constexpr const char* kUrm = "urm";
inline constexpr const char* kTom = "tom";
inline constexpr const char* kTomOrder = "tom_order";
inline constexpr const char* kLeader = "leader";
inline constexpr const char* kFinalState = "final_state";
inline constexpr const char* kMalformed = "malformed";
}  // namespace violation

struct Violation {
    std::string kind;
    std::string detail;
};

struct Verdict {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    bool has(const std::string& kind) const;
    void add(std::string kind, std::string detail) { violations.push_back({std::move(kind), std::move(detail)}); }
    void merge(const Verdict& other);
};

/// Indexed view of a trace.
struct TraceView {
    struct OpInfo {
        OperationId id;
        TransactionId txn;
        DataItemId item;
        OpKind kind;
    };
    struct TxnInfo {
        SiteId origin;
        std::vector<OpInfo> ops;
    };
    struct Read {
        TransactionId txn;
        OperationId op;
        DataItemId item;
        TransactionId writer;
    };
    struct UrmSend {
        SiteId sender;
        SiteSet group;
        TransactionId txn;
    };
    struct TomSend {
        SiteId sender;
        DataItemId item;
        OperationId op;
    };

    ReplicationMap map;
    std::map<TransactionId, TxnInfo> txns;
    std::map<OperationId, OpInfo> ops;
    SiteSet crashed;
    SiteSet correct;

    std::map<TransactionId, std::vector<SiteId>> commits;  // one entry per record
    std::map<TransactionId, std::vector<SiteId>> aborts;
    std::set<TransactionId> ro_commits;
    std::vector<Read> reads;

    std::map<std::uint64_t, UrmSend> urm_sends;
    std::map<std::uint64_t, std::vector<SiteId>> urm_deliveries;
    std::set<TransactionId> submitted;

    std::map<std::uint64_t, TomSend> tom_sends;
    /// Per item, per site: delivered message ids in delivery order.
    std::map<DataItemId, std::map<SiteId, std::vector<std::uint64_t>>> tom_deliveries;
    std::map<std::uint64_t, OperationId> tom_msg_op;

    std::map<std::pair<SiteId, DataItemId>, SiteId> last_leader_view;
    std::map<SiteId, TraceRecord> finals;

    /// Operations in first-delivery order at each site, per item.
    std::map<DataItemId, std::map<SiteId, std::vector<OperationId>>> first_deliveries() const;
    bool committed_anywhere(const TransactionId& txn) const { return commits.contains(txn); }
};

/// Throws MalformedTrace when required records or fields are missing.
TraceView index_trace(const Trace& trace);

/// Per item, the committed writes in version order.
struct VersionOrder {
    std::map<DataItemId, std::vector<OperationId>> order;
};

/// Orders committed writes by first TO-delivery position; throws
/// OrderDisagreement if two replicas order them differently.
VersionOrder build_version_order(const TraceView& view);

enum class MvsgEdge { ReadFrom, VersionOrder };

/// Multiversion serialization graph over INIT, committed update
/// transactions and committed read-only transactions.
struct Mvsg {
    std::set<TransactionId> vertices;
    std::map<std::pair<TransactionId, TransactionId>, std::set<MvsgEdge>> edges;

    bool has_edge(const std::string& a, const std::string& b) const {
        return edges.contains({TransactionId(a), TransactionId(b)});
    }
};

/// Throws DanglingRead if a committed reader observed a version that no
/// committed write produced.
Mvsg build_mvsg(const TraceView& view, const VersionOrder& vo);

std::optional<std::vector<TransactionId>> find_cycle(const Mvsg& g);

Verdict assert_serializable(const Mvsg& g);
Verdict assert_liveness_and_agreement(const TraceView& view);
/// URM integrity and agreement, TOM agreement and total order, weak
/// leader stabilization.
Verdict check_primitives(const TraceView& view);
/// The last writer of each item at each correct site is the last version.
Verdict check_final_state(const TraceView& view, const VersionOrder& vo);

struct CheckReport {
    Verdict verdict;
    std::size_t transactions = 0;
    std::size_t committed = 0;
    std::size_t aborted = 0;
    std::size_t read_only = 0;
    std::size_t mvsg_edges = 0;

    bool ok() const { return verdict.ok(); }
    nlohmann::ordered_json to_json() const;
    std::string text() const;
};

/// Runs every check; never throws for protocol violations.
CheckReport check_trace(const Trace& trace);

/// Message accounting per submitted transaction.
struct TxnMetrics {
    SiteId origin;
    SimTime submitted = 0;
    std::optional<SimTime> first_commit;
    std::optional<SimTime> last_commit;
    std::map<std::string, std::uint64_t> by_class;
    std::map<OperationId, std::uint64_t> tom_per_op;
    std::size_t ops = 0;

    std::uint64_t protocol_messages() const;
    std::optional<SimTime> critical_path() const {
        if (!last_commit) return std::nullopt;
        return *last_commit - submitted;
    }
};

struct MetricsReport {
    std::map<TransactionId, TxnMetrics> txns;
    std::map<std::string, std::uint64_t> totals;

    nlohmann::ordered_json to_json() const;
    /// Table with the bounds for `o` operations replicated `d` times.
    std::string table(int o, int d) const;
    /// True when every committed transaction meets the bounds for (o, d):
    /// URM = 2od, TOM = 2d per op, total <= 5od + (od)^2.
    bool within_bounds(int o, int d) const;
};

MetricsReport account_messages(const Trace& trace);

}  // namespace pregraph
