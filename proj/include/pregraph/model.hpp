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

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pregraph {

/// Opaque identifier ordered lexicographically on its name. The tag keeps
/// sites, items, transactions and operations from being mixed up.
template <class Tag>
class Id {
public:
    Id() = default;
    explicit Id(std::string name) : name_(std::move(name)) {}

    const std::string& str() const { return name_; }
    bool empty() const { return name_.empty(); }

    friend auto operator<=>(const Id&, const Id&) = default;
    friend bool operator==(const Id&, const Id&) = default;
    friend std::ostream& operator<<(std::ostream& os, const Id& id) { return os << id.name_; }

private:
    std::string name_;
};

struct SiteTag {};
struct ItemTag {};
struct TxnTag {};
struct OpTag {};

using SiteId = Id<SiteTag>;
using DataItemId = Id<ItemTag>;
using TransactionId = Id<TxnTag>;
using OperationId = Id<OpTag>;

using SiteSet = std::set<SiteId>;
using SimTime = std::int64_t;

/// A point in the simulator's global event order. Two events at the same
/// simulated time are ordered by the sequence number of the event that
/// produced them.
struct Stamp {
    SimTime time = 0;
    std::uint64_t seq = 0;

    friend auto operator<=>(const Stamp&, const Stamp&) = default;
};

class ModelError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class OpKind { Read, Write };

const char* to_string(OpKind kind);

class Operation {
public:
    /// Throws ModelError unless `update_value` is present exactly for writes.
    Operation(OperationId id, TransactionId txn, DataItemId item, OpKind kind,
              std::optional<std::string> update_value = std::nullopt);

    const OperationId& id() const { return id_; }
    const TransactionId& txn() const { return txn_; }
    const DataItemId& item() const { return item_; }
    OpKind kind() const { return kind_; }
    bool is_read() const { return kind_ == OpKind::Read; }
    bool is_write() const { return kind_ == OpKind::Write; }
    const std::optional<std::string>& update_value() const { return update_value_; }

    friend bool operator==(const Operation&, const Operation&) = default;

private:
    OperationId id_;
    TransactionId txn_;
    DataItemId item_;
    OpKind kind_;
    std::optional<std::string> update_value_;
};

/// Two operations conflict when they touch the same item and one writes it.
bool conflict(const Operation& a, const Operation& b);

struct ExecInterval {
    Stamp start;
    Stamp end;
};

/// A transaction as submitted after its initial execution: the full
/// operation set plus where and when it executed.
class Transaction {
public:
    Transaction(TransactionId id, std::vector<Operation> ops, SiteId origin, ExecInterval interval);

    const TransactionId& id() const { return id_; }
    const std::vector<Operation>& ops() const { return ops_; }
    const SiteId& origin() const { return origin_; }
    const ExecInterval& interval() const { return interval_; }

    std::vector<Operation> read_ops() const;
    std::vector<Operation> write_ops() const;
    bool is_read_only() const;
    std::set<DataItemId> items() const;
    std::set<DataItemId> written_items() const;
    const Operation* find(const OperationId& op) const;

private:
    TransactionId id_;
    std::vector<Operation> ops_;  // sorted by op id
    SiteId origin_;
    ExecInterval interval_;
};

using TransactionPtr = std::shared_ptr<const Transaction>;

class ReplicationMap {
public:
    ReplicationMap() = default;
    /// Throws ModelError if an item has no replica or names an unknown site.
    ReplicationMap(SiteSet sites, std::map<DataItemId, SiteSet> placement);

    const SiteSet& sites() const { return sites_; }
    const std::map<DataItemId, SiteSet>& placement() const { return placement_; }
    std::set<DataItemId> items() const;

    const SiteSet& replicas(const DataItemId& item) const;
    const SiteSet& replicas(const Operation& op) const { return replicas(op.item()); }
    SiteSet replicas(const Transaction& txn) const;
    SiteSet replicas_of_writes(const Transaction& txn) const;
    bool replicates(const SiteId& site, const DataItemId& item) const;

private:
    SiteSet sites_;
    std::map<DataItemId, SiteSet> placement_;
};

/// Where and when transactions committed, as seen by the global event order.
class CommitHistory {
public:
    virtual ~CommitHistory() = default;
    virtual std::optional<Stamp> committed_at(const TransactionId& txn, const SiteId& site) const = 0;
};

/// T cc T2: neither committed at the other's origin before the other began
/// executing. Irreflexive and symmetric.
bool concurrent(const Transaction& a, const Transaction& b, const CommitHistory& history);

}  // namespace pregraph

template <class Tag>
struct std::hash<pregraph::Id<Tag>> {
    std::size_t operator()(const pregraph::Id<Tag>& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
