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

#include "pregraph/lock_table.hpp"

#include <algorithm>

namespace pregraph {

const char* to_string(LockMode mode) {
    switch (mode) {
    case LockMode::R:
        return "R";
    case LockMode::W:
        return "W";
    case LockMode::IW:
        return "IW";
    }
    return "?";
}

bool LockTable::admissible(const ItemLocks& locks, const LockEntry& entry) {
    return std::all_of(locks.holders.begin(), locks.holders.end(), [&](const LockEntry& h) {
        return h.txn == entry.txn || compatible(entry.mode, h.mode);
    });
}

std::vector<LockEntry> LockTable::grant_waiters(ItemLocks& locks) {
    std::vector<LockEntry> granted;
    while (!locks.waiting.empty() && admissible(locks, locks.waiting.front())) {
        locks.holders.push_back(locks.waiting.front());
        granted.push_back(locks.waiting.front());
        locks.waiting.pop_front();
    }
    return granted;
}

void LockTable::drop_if_empty(const DataItemId& item) {
    auto it = table_.find(item);
    if (it != table_.end() && it->second.holders.empty() && it->second.waiting.empty()) {
        table_.erase(it);
    }
}

LockOutcome LockTable::request(const DataItemId& item, const OperationId& op, const TransactionId& txn,
                               LockMode mode) {
    auto& locks = table_[item];
    auto same_op = [&](const LockEntry& e) { return e.op == op; };
    if (std::any_of(locks.holders.begin(), locks.holders.end(), same_op) ||
        std::any_of(locks.waiting.begin(), locks.waiting.end(), same_op)) {
        throw DuplicateRequest("operation " + op.str() + " already has a lock entry on " + item.str());
    }
    LockEntry entry{op, txn, mode};
    // A waiter of the same transaction ahead in the queue does not stop us,
    // otherwise an R followed by a W of one transaction could wait on itself.
    bool others_waiting = std::any_of(locks.waiting.begin(), locks.waiting.end(),
                                      [&](const LockEntry& w) { return w.txn != txn; });
    if (!others_waiting && admissible(locks, entry)) {
        locks.holders.push_back(entry);
        return LockOutcome::Granted;
    }
    locks.waiting.push_back(entry);
    return LockOutcome::Enqueued;
}

std::vector<LockEntry> LockTable::release(const DataItemId& item, const OperationId& op) {
    auto it = table_.find(item);
    if (it == table_.end()) {
        throw NotHolding("operation " + op.str() + " holds nothing on " + item.str());
    }
    auto& holders = it->second.holders;
    auto pos = std::find_if(holders.begin(), holders.end(), [&](const LockEntry& e) { return e.op == op; });
    if (pos == holders.end()) {
        throw NotHolding("operation " + op.str() + " holds nothing on " + item.str());
    }
    holders.erase(pos);
    auto granted = grant_waiters(it->second);
    drop_if_empty(item);
    return granted;
}

std::vector<LockEntry> LockTable::convert_w_to_iw(const DataItemId& item, const OperationId& op) {
    auto it = table_.find(item);
    if (it != table_.end()) {
        for (auto& h : it->second.holders) {
            if (h.op == op && h.mode == LockMode::W) {
                h.mode = LockMode::IW;
                return grant_waiters(it->second);
            }
        }
    }
    throw NotHoldingW("operation " + op.str() + " holds no W lock on " + item.str());
}

ForceResult LockTable::force_write_lock(const DataItemId& item, const OperationId& op, const TransactionId& txn,
                                        const std::function<bool(const TransactionId&)>& executing) {
    ForceResult result;
    if (holds(item, op, LockMode::IW)) return result;

    {
        auto& locks = table_[item];
        for (const auto& h : locks.holders) {
            if (h.txn != txn && !compatible(LockMode::IW, h.mode)) {
                if (!executing(h.txn)) {
                    throw LockError("forced IW on " + item.str() + " meets a " + to_string(h.mode) +
                                    " lock of non-executing " + h.txn.str());
                }
                result.victims.insert(h.txn);
            }
        }
        for (const auto& w : locks.waiting) {
            if (w.txn != txn && !compatible(LockMode::IW, w.mode) && executing(w.txn)) {
                result.victims.insert(w.txn);
            }
        }
    }
    for (const auto& victim : result.victims) {
        auto woken = release_transaction(victim);
        result.granted.insert(result.granted.end(), woken.begin(), woken.end());
    }

    auto& locks = table_[item];
    std::erase_if(locks.waiting, [&](const LockEntry& w) { return w.op == op; });
    locks.holders.push_back(LockEntry{op, txn, LockMode::IW});
    // Removing the victims may have left compatible waiters at the head.
    for (auto& e : grant_waiters(locks)) result.granted.emplace_back(item, e);
    return result;
}

std::vector<std::pair<DataItemId, LockEntry>> LockTable::release_transaction(const TransactionId& txn) {
    std::vector<std::pair<DataItemId, LockEntry>> granted;
    std::vector<DataItemId> touched;
    for (auto& [item, locks] : table_) {
        auto owned = [&](const LockEntry& e) { return e.txn == txn; };
        std::vector<LockEntry> mine;
        std::copy_if(locks.holders.begin(), locks.holders.end(), std::back_inserter(mine), owned);
        std::sort(mine.begin(), mine.end(), [](const LockEntry& a, const LockEntry& b) { return a.op < b.op; });
        std::size_t queued_before = locks.waiting.size();
        std::erase_if(locks.waiting, owned);
        if (mine.empty() && queued_before == locks.waiting.size()) continue;
        for (const auto& e : mine) {
            std::erase_if(locks.holders, [&](const LockEntry& h) { return h.op == e.op; });
        }
        for (auto& e : grant_waiters(locks)) granted.emplace_back(item, e);
        touched.push_back(item);
    }
    for (const auto& item : touched) drop_if_empty(item);
    return granted;
}

bool LockTable::holds(const DataItemId& item, const OperationId& op, LockMode mode) const {
    auto it = table_.find(item);
    if (it == table_.end()) return false;
    return std::any_of(it->second.holders.begin(), it->second.holders.end(),
                       [&](const LockEntry& e) { return e.op == op && e.mode == mode; });
}

bool LockTable::is_queued(const DataItemId& item, const OperationId& op) const {
    auto it = table_.find(item);
    if (it == table_.end()) return false;
    return std::any_of(it->second.waiting.begin(), it->second.waiting.end(),
                       [&](const LockEntry& e) { return e.op == op; });
}

std::vector<LockEntry> LockTable::holders(const DataItemId& item) const {
    auto it = table_.find(item);
    return it == table_.end() ? std::vector<LockEntry>{} : it->second.holders;
}

std::vector<LockEntry> LockTable::queue(const DataItemId& item) const {
    auto it = table_.find(item);
    if (it == table_.end()) return {};
    return {it->second.waiting.begin(), it->second.waiting.end()};
}

std::set<DataItemId> LockTable::items() const {
    std::set<DataItemId> out;
    for (const auto& [item, _] : table_) out.insert(item);
    return out;
}

}  // namespace pregraph
