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

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pregraph/lock_table.hpp"
#include "pregraph/model.hpp"
#include "pregraph/precedence_graph.hpp"
#include "pregraph/trace.hpp"

namespace pregraph {

/// Writer recorded for values nobody has written yet.
inline const TransactionId kInitialWriter{"INIT"};

struct UnreplicatedItem : std::logic_error {
    using std::logic_error::logic_error;
};

/// One operation of a client transaction before it runs.
struct OpSpec {
    OpKind kind = OpKind::Read;
    DataItemId item;
    std::optional<std::string> value;  // writes only; defaults to the transaction id
};

/// Client transaction as submitted to its origin site.
struct TxnSpec {
    TransactionId id;
    SiteId origin;
    SimTime start = 0;
    std::vector<OpSpec> ops;
};

/// Operation ids are "<txn>.<index>".
OperationId op_id_for(const TransactionId& txn, std::size_t index);

/// Services a replica calls back into. Implemented by the simulator.
class ReplicaEnv {
public:
    virtual ~ReplicaEnv() = default;
    virtual Stamp stamp() const = 0;
    virtual void emit(TraceRecord record) = 0;
    virtual void r_multicast(const SiteId& from, TransactionPtr txn) = 0;
    virtual void to_multicast(const SiteId& from, const Operation& op, TransactionPtr txn) = 0;
    virtual void send_graph(const SiteId& from, const TransactionId& about, const SiteSet& to,
                            std::shared_ptr<const PrecedenceGraph> graph) = 0;
    virtual SiteId weak_leader(const SiteId& at, const DataItemId& item) const = 0;
    virtual bool concurrent(const Transaction& a, const Transaction& b) const = 0;
    /// Runs the next initial-execution step of `txn` one time unit from now.
    virtual void schedule_step(const SiteId& site, const TransactionId& txn) = 0;
    virtual void decided(const SiteId& site, const TransactionId& txn, bool committed) = 0;
};

struct DbEntry {
    std::string value;
    TransactionId writer = kInitialWriter;
};

/// Protocol state of one site.
class Replica {
public:
    Replica(SiteId id, const ReplicationMap& map, ReplicaEnv& env, std::size_t cycle_cap = kDefaultCycleCap);

    const SiteId& id() const { return id_; }

    /// Traces this site's initial leader view of every local item group.
    void start();

    // Initial execution.
    void begin(const TxnSpec& spec);
    void exec_step(const TransactionId& txn);

    // Message handlers.
    void on_r_deliver(const TransactionPtr& txn);
    void on_to_deliver(const Operation& op, const TransactionPtr& txn);
    void on_receive_graph(const SiteId& from, const TransactionId& about, const PrecedenceGraph& graph);
    /// Re-reads leader views after a suspicion change and pumps pending ops.
    void on_leader_change();

    void leader_pump();
    void try_commit();

    const PrecedenceGraph& graph() const { return graph_; }
    const std::map<DataItemId, DbEntry>& db() const { return db_; }
    const LockTable& locks() const { return locks_; }
    const std::set<TransactionId>& committed() const { return committed_; }
    const std::set<TransactionId>& aborted() const { return aborted_; }
    const std::map<DataItemId, std::vector<OperationId>>& delivery_log() const { return to_log_; }
    std::vector<OperationId> pending() const;
    bool executing(const TransactionId& txn) const { return exec_.contains(txn); }

    /// End-of-run summary: unclosed vertices and the writer of every local item.
    TraceRecord final_state(SimTime t) const;

private:
    struct Exec {
        TxnSpec spec;
        Stamp start;
        std::size_t pc = 0;  // next op to run; ops.size() means the commit statement
        bool waiting = false;
        std::map<DataItemId, std::string> buffered;
    };
    struct Pending {
        Operation op;
        TransactionPtr txn;
    };

    TraceRecord rec(const char* ev) const;
    Operation make_op(const TxnSpec& spec, std::size_t index) const;
    void perform(Exec& ex);
    void finish_execution(Exec& ex);
    void local_abort(TransactionId txn, const std::string& reason);
    void wake(const std::vector<LockEntry>& granted);
    bool deadlocked(const TransactionId& txn) const;
    std::set<TransactionId> blockers(const TransactionId& txn) const;

    void send_predecessors(const TransactionId& txn, const SiteSet& to);
    SiteSet replicas_of(const VertexSet& txns) const;
    bool local_writer(const TransactionId& txn) const;
    bool decided_here(const TransactionId& txn) const;
    bool ready_locally(const TransactionId& txn) const;
    bool try_decide_component(const VertexSet& component, const VertexSet& closed);
    void commit_local(const TransactionId& txn);
    void abort_local(const TransactionId& txn);
    void refresh_leaders();

    SiteId id_;
    const ReplicationMap& map_;
    ReplicaEnv& env_;
    std::size_t cycle_cap_;

    std::map<DataItemId, DbEntry> db_;
    LockTable locks_;
    PrecedenceGraph graph_;
    std::map<OperationId, Pending> pending_;
    std::set<OperationId> multicast_;
    std::set<OperationId> delivered_;
    std::map<DataItemId, std::vector<OperationId>> to_log_;
    std::map<OperationId, TransactionId> owner_;
    std::set<TransactionId> committed_;
    std::set<TransactionId> aborted_;
    std::map<TransactionId, Exec> exec_;
    std::map<DataItemId, SiteId> leader_view_;
    bool in_try_commit_ = false;
};

}  // namespace pregraph
