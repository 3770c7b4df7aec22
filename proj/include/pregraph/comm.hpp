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

// Simulated group communication: uniform reliable multicast, per-item
// uniform total order multicast and the eventual weak leader oracle.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>

#include "pregraph/model.hpp"
#include "pregraph/trace.hpp"

namespace pregraph {

enum class MessageClass { Urm, TomForward, Tom, TomDup, Graph };

const char* to_string(MessageClass cls);
std::optional<MessageClass> message_class_from_string(const std::string& s);

/// What the primitives need from the simulator. Endpoints are site names,
/// or "@<item>" for the ordering service of an item's group.
class Transport {
public:
    virtual ~Transport() = default;
    virtual SimTime now() const = 0;
    virtual bool alive(const SiteId& site) const = 0;
    /// Counts and traces one message, then runs `on_arrival` after the hop
    /// delay (zero when `from == to`). `op` may be empty.
    virtual void send(MessageClass cls, const std::string& from, const std::string& to, const TransactionId& txn,
                      const std::string& op, std::function<void()> on_arrival) = 0;
    virtual void emit(TraceRecord record) = 0;
};

/// Next member after `self` in id order, wrapping around.
SiteId ring_successor(const SiteSet& group, const SiteId& self);

/// Sender ships the message to every member; a member delivers once its
/// echo to the next member has landed, so delivery costs two hops and
/// 2|g| messages. Sends are atomic, so any correct member always delivers.
class ReliableMulticast {
public:
    using DeliverFn = std::function<void(const SiteId& at, const TransactionPtr& txn)>;

    ReliableMulticast(Transport& net, DeliverFn deliver) : net_(net), deliver_(std::move(deliver)) {}

    std::uint64_t multicast(const SiteId& sender, const SiteSet& group, TransactionPtr txn);

private:
    Transport& net_;
    DeliverFn deliver_;
    std::uint64_t next_id_ = 1;
};

struct TomMessage {
    std::uint64_t msg_id = 0;
    std::uint64_t seq = 0;
    SiteId sender;
    Operation op;
    TransactionPtr txn;
};

/// One sequencer per item group. Unless colocated with the sender, the
/// operation first travels to the sequencer (one hop); the sequencer sends
/// an accept to each member, and a member delivers once its learn message
/// to the next member lands. Members hold back out-of-sequence messages.
class TotalOrderMulticast {
public:
    using DeliverFn = std::function<void(const SiteId& at, const TomMessage& msg)>;

    TotalOrderMulticast(Transport& net, const ReplicationMap& map, bool colocate, DeliverFn deliver)
        : net_(net), map_(map), colocate_(colocate), deliver_(std::move(deliver)) {}

    std::uint64_t multicast(const SiteId& sender, const Operation& op, TransactionPtr txn);

private:
    struct Holdback {
        std::uint64_t next = 0;
        std::map<std::uint64_t, std::shared_ptr<const TomMessage>> waiting;
    };

    void sequence(std::shared_ptr<TomMessage> msg, const std::string& from, MessageClass cls);
    void on_learn(const SiteId& at, const std::shared_ptr<const TomMessage>& msg);

    Transport& net_;
    const ReplicationMap& map_;
    bool colocate_;
    DeliverFn deliver_;
    std::uint64_t next_id_ = 1;
    std::map<DataItemId, std::uint64_t> next_seq_;
    std::map<std::pair<DataItemId, SiteId>, Holdback> holdback_;
    std::set<OperationId> seen_;
};

/// Eventual weak leader oracle queried by a member of the group.
class WeakLeader {
public:
    virtual ~WeakLeader() = default;
    virtual const char* name() const = 0;
    virtual SiteId leader(const SiteId& at, const SiteSet& group) const = 0;
    /// `at` starts suspecting `crashed`.
    virtual void suspect(const SiteId& at, const SiteId& crashed) {
        (void)at;
        (void)crashed;
    }
};

/// Every member leads itself.
class SelfLeader : public WeakLeader {
public:
    const char* name() const override { return "self"; }
    SiteId leader(const SiteId& at, const SiteSet& group) const override;
};

/// Smallest member the caller does not suspect.
class MinAliveLeader : public WeakLeader {
public:
    const char* name() const override { return "min-alive"; }
    SiteId leader(const SiteId& at, const SiteSet& group) const override;
    void suspect(const SiteId& at, const SiteId& crashed) override { suspected_[at].insert(crashed); }

private:
    std::map<SiteId, SiteSet> suspected_;
};

/// Throws std::invalid_argument for unknown names.
std::unique_ptr<WeakLeader> make_weak_leader(const std::string& strategy);

}  // namespace pregraph
