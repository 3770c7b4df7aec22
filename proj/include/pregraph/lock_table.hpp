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

#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "pregraph/model.hpp"

namespace pregraph {

enum class LockMode { R, W, IW };

const char* to_string(LockMode mode);

/// Lock conflict table: true when `requested` may share the item with a
/// holder of `held`. Only R/R and IW/IW share.
constexpr bool compatible(LockMode requested, LockMode held) {
    return (requested == LockMode::R && held == LockMode::R) ||
           (requested == LockMode::IW && held == LockMode::IW);
}

class LockError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct DuplicateRequest : LockError {
    using LockError::LockError;
};
struct NotHolding : LockError {
    using LockError::LockError;
};
struct NotHoldingW : LockError {
    using LockError::LockError;
};

enum class LockOutcome { Granted, Enqueued };

/// Locks are held by operations and owned by transactions. Entries of the
/// same transaction never block each other.
struct LockEntry {
    OperationId op;
    TransactionId txn;
    LockMode mode;

    friend bool operator==(const LockEntry&, const LockEntry&) = default;
};

struct ForceResult {
    std::set<TransactionId> victims;
    std::vector<std::pair<DataItemId, LockEntry>> granted;  // waiters woken by victim releases
};

/// Per-site lock table with strict FIFO wait queues (no barging).
class LockTable {
public:
    LockOutcome request(const DataItemId& item, const OperationId& op, const TransactionId& txn, LockMode mode);

    /// Drops `op`'s lock on `item`; returns the waiters granted as a result.
    std::vector<LockEntry> release(const DataItemId& item, const OperationId& op);

    /// Downgrades a held W to IW and re-scans the queue.
    std::vector<LockEntry> convert_w_to_iw(const DataItemId& item, const OperationId& op);

    /// Gives `op` an IW lock without queueing. Conflicting R/W holders and
    /// conflicting queued requests belonging to transactions for which
    /// `executing` returns true lose every lock they have at this site.
    ForceResult force_write_lock(const DataItemId& item, const OperationId& op, const TransactionId& txn,
                                 const std::function<bool(const TransactionId&)>& executing);

    /// Releases every lock and queued request of `txn`, in op-id order per item.
    std::vector<std::pair<DataItemId, LockEntry>> release_transaction(const TransactionId& txn);

    bool holds(const DataItemId& item, const OperationId& op, LockMode mode) const;
    bool is_queued(const DataItemId& item, const OperationId& op) const;
    std::vector<LockEntry> holders(const DataItemId& item) const;
    std::vector<LockEntry> queue(const DataItemId& item) const;
    std::set<DataItemId> items() const;

private:
    struct ItemLocks {
        std::vector<LockEntry> holders;
        std::deque<LockEntry> waiting;
    };

    static bool admissible(const ItemLocks& locks, const LockEntry& entry);
    static std::vector<LockEntry> grant_waiters(ItemLocks& locks);
    void drop_if_empty(const DataItemId& item);

    std::map<DataItemId, ItemLocks> table_;
};

}  // namespace pregraph
