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

#include "pregraph/model.hpp"

#include <algorithm>

namespace pregraph {

const char* to_string(OpKind kind) {
    return kind == OpKind::Read ? "read" : "write";
}

Operation::Operation(OperationId id, TransactionId txn, DataItemId item, OpKind kind,
                     std::optional<std::string> update_value)
    : id_(std::move(id)),
      txn_(std::move(txn)),
      item_(std::move(item)),
      kind_(kind),
      update_value_(std::move(update_value)) {
    if (id_.empty() || txn_.empty() || item_.empty()) {
        throw ModelError("operation needs an id, a transaction and an item");
    }
    if ((kind_ == OpKind::Write) != update_value_.has_value()) {
        throw ModelError("operation " + id_.str() + ": update value must be present iff it is a write");
    }
}

bool conflict(const Operation& a, const Operation& b) {
    return a.item() == b.item() && (a.is_write() || b.is_write());
}

Transaction::Transaction(TransactionId id, std::vector<Operation> ops, SiteId origin, ExecInterval interval)
    : id_(std::move(id)), ops_(std::move(ops)), origin_(std::move(origin)), interval_(interval) {
    if (ops_.empty()) {
        throw ModelError("transaction " + id_.str() + " has no operations");
    }
    std::sort(ops_.begin(), ops_.end(), [](const Operation& a, const Operation& b) { return a.id() < b.id(); });
    for (std::size_t i = 0; i < ops_.size(); ++i) {
        if (ops_[i].txn() != id_) {
            throw ModelError("operation " + ops_[i].id().str() + " does not belong to " + id_.str());
        }
        if (i > 0 && ops_[i - 1].id() == ops_[i].id()) {
            throw ModelError("duplicate operation " + ops_[i].id().str());
        }
    }
    if (!(interval_.start < interval_.end)) {
        throw ModelError("transaction " + id_.str() + ": execution interval must be non-empty");
    }
}

std::vector<Operation> Transaction::read_ops() const {
    std::vector<Operation> out;
    std::copy_if(ops_.begin(), ops_.end(), std::back_inserter(out), [](const Operation& o) { return o.is_read(); });
    return out;
}

std::vector<Operation> Transaction::write_ops() const {
    std::vector<Operation> out;
    std::copy_if(ops_.begin(), ops_.end(), std::back_inserter(out), [](const Operation& o) { return o.is_write(); });
    return out;
}

bool Transaction::is_read_only() const {
    return std::none_of(ops_.begin(), ops_.end(), [](const Operation& o) { return o.is_write(); });
}

std::set<DataItemId> Transaction::items() const {
    std::set<DataItemId> out;
    for (const auto& op : ops_) out.insert(op.item());
    return out;
}

std::set<DataItemId> Transaction::written_items() const {
    std::set<DataItemId> out;
    for (const auto& op : ops_) {
        if (op.is_write()) out.insert(op.item());
    }
    return out;
}

const Operation* Transaction::find(const OperationId& op) const {
    auto it = std::lower_bound(ops_.begin(), ops_.end(), op,
                               [](const Operation& a, const OperationId& id) { return a.id() < id; });
    return it != ops_.end() && it->id() == op ? &*it : nullptr;
}

ReplicationMap::ReplicationMap(SiteSet sites, std::map<DataItemId, SiteSet> placement)
    : sites_(std::move(sites)), placement_(std::move(placement)) {
    for (const auto& [item, replicas] : placement_) {
        if (replicas.empty()) {
            throw ModelError("item " + item.str() + " has no replica");
        }
        for (const auto& site : replicas) {
            if (!sites_.contains(site)) {
                throw ModelError("item " + item.str() + " placed on unknown site " + site.str());
            }
        }
    }
}

std::set<DataItemId> ReplicationMap::items() const {
    std::set<DataItemId> out;
    for (const auto& [item, _] : placement_) out.insert(item);
    return out;
}

const SiteSet& ReplicationMap::replicas(const DataItemId& item) const {
    auto it = placement_.find(item);
    if (it == placement_.end()) {
        throw ModelError("unknown data item " + item.str());
    }
    return it->second;
}

SiteSet ReplicationMap::replicas(const Transaction& txn) const {
    SiteSet out;
    for (const auto& op : txn.ops()) {
        const auto& r = replicas(op.item());
        out.insert(r.begin(), r.end());
    }
    return out;
}

SiteSet ReplicationMap::replicas_of_writes(const Transaction& txn) const {
    SiteSet out;
    for (const auto& op : txn.ops()) {
        if (!op.is_write()) continue;
        const auto& r = replicas(op.item());
        out.insert(r.begin(), r.end());
    }
    return out;
}

bool ReplicationMap::replicates(const SiteId& site, const DataItemId& item) const {
    auto it = placement_.find(item);
    return it != placement_.end() && it->second.contains(site);
}

namespace {

bool committed_before_start(const Transaction& committer, const Transaction& other, const CommitHistory& history) {
    auto at = history.committed_at(committer.id(), other.origin());
    return at && *at < other.interval().start;
}

}  // namespace

bool concurrent(const Transaction& a, const Transaction& b, const CommitHistory& history) {
    if (a.id() == b.id()) return false;
    return !committed_before_start(a, b, history) && !committed_before_start(b, a, history);
}

}  // namespace pregraph
