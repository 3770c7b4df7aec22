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

#include "pregraph/comm.hpp"

#include <stdexcept>

namespace pregraph {

const char* to_string(MessageClass cls) {
    switch (cls) {
        case MessageClass::Urm:
            return "urm";
        case MessageClass::TomForward:
            return "tom_forward";
        case MessageClass::Tom:
            return "tom";
        case MessageClass::TomDup:
            return "tom_dup";
        case MessageClass::Graph:
            return "graph";
    }
    return "?";
}

std::optional<MessageClass> message_class_from_string(const std::string& s) {
    for (auto c : {MessageClass::Urm, MessageClass::TomForward, MessageClass::Tom, MessageClass::TomDup,
                   MessageClass::Graph}) {
        if (s == to_string(c)) return c;
    }
    return std::nullopt;
}

SiteId ring_successor(const SiteSet& group, const SiteId& self) {
    auto it = group.upper_bound(self);
    return it == group.end() ? *group.begin() : *it;
}

std::uint64_t ReliableMulticast::multicast(const SiteId& sender, const SiteSet& group, TransactionPtr txn) {
    const std::uint64_t id = next_id_++;
    auto rec = trace_record("r_mcast", net_.now(), sender);
    rec["msg"] = id;
    rec["txn"] = txn->id().str();
    auto& members = rec["group"] = nlohmann::ordered_json::array();
    for (const auto& m : group) members.push_back(m.str());
    net_.emit(std::move(rec));

    for (const auto& member : group) {
        net_.send(MessageClass::Urm, sender.str(), member.str(), txn->id(), "", [this, id, group, member, txn] {
            if (!net_.alive(member)) return;
            const SiteId next = ring_successor(group, member);
            net_.send(MessageClass::Urm, member.str(), next.str(), txn->id(), "", [this, id, member, txn] {
                if (!net_.alive(member)) return;
                auto r = trace_record("r_deliver", net_.now(), member);
                r["msg"] = id;
                r["txn"] = txn->id().str();
                net_.emit(std::move(r));
                deliver_(member, txn);
            });
        });
    }
    return id;
}

std::uint64_t TotalOrderMulticast::multicast(const SiteId& sender, const Operation& op, TransactionPtr txn) {
    const bool dup = !seen_.insert(op.id()).second;
    auto msg = std::make_shared<TomMessage>(TomMessage{next_id_++, 0, sender, op, std::move(txn)});

    auto rec = trace_record("to_mcast", net_.now(), sender);
    rec["msg"] = msg->msg_id;
    rec["item"] = op.item().str();
    rec["op"] = op.id().str();
    rec["txn"] = op.txn().str();
    rec["dup"] = dup;
    net_.emit(std::move(rec));

    if (colocate_) {
        sequence(msg, sender.str(), dup ? MessageClass::TomDup : MessageClass::Tom);
    } else {
        const std::string sequencer = "@" + op.item().str();
        net_.send(dup ? MessageClass::TomDup : MessageClass::TomForward, sender.str(), sequencer, op.txn(),
                  op.id().str(), [this, msg, sequencer, dup] {
                      sequence(msg, sequencer, dup ? MessageClass::TomDup : MessageClass::Tom);
                  });
    }
    return msg->msg_id;
}

void TotalOrderMulticast::sequence(std::shared_ptr<TomMessage> msg, const std::string& from, MessageClass cls) {
    const DataItemId& item = msg->op.item();
    msg->seq = next_seq_[item]++;
    std::shared_ptr<const TomMessage> frozen = msg;
    const SiteSet& group = map_.replicas(item);
    for (const auto& member : group) {
        net_.send(cls, from, member.str(), msg->op.txn(), msg->op.id().str(), [this, frozen, member, cls, &group] {
            if (!net_.alive(member)) return;
            const SiteId next = ring_successor(group, member);
            net_.send(cls, member.str(), next.str(), frozen->op.txn(), frozen->op.id().str(),
                      [this, frozen, member] { on_learn(member, frozen); });
        });
    }
}

void TotalOrderMulticast::on_learn(const SiteId& at, const std::shared_ptr<const TomMessage>& msg) {
    if (!net_.alive(at)) return;
    auto& hb = holdback_[{msg->op.item(), at}];
    hb.waiting.emplace(msg->seq, msg);
    while (!hb.waiting.empty() && hb.waiting.begin()->first == hb.next) {
        auto ready = hb.waiting.begin()->second;
        hb.waiting.erase(hb.waiting.begin());
        ++hb.next;
        auto r = trace_record("to_deliver", net_.now(), at);
        r["msg"] = ready->msg_id;
        r["item"] = ready->op.item().str();
        r["seq"] = ready->seq;
        r["op"] = ready->op.id().str();
        r["txn"] = ready->op.txn().str();
        net_.emit(std::move(r));
        deliver_(at, *ready);
        if (!net_.alive(at)) return;
    }
}

SiteId SelfLeader::leader(const SiteId& at, const SiteSet& group) const {
    (void)group;
    return at;
}

SiteId MinAliveLeader::leader(const SiteId& at, const SiteSet& group) const {
    auto it = suspected_.find(at);
    for (const auto& m : group) {
        if (m == at) return m;
        if (it == suspected_.end() || !it->second.contains(m)) return m;
    }
    return at;
}

std::unique_ptr<WeakLeader> make_weak_leader(const std::string& strategy) {
    if (strategy == "self") return std::make_unique<SelfLeader>();
    if (strategy == "min-alive") return std::make_unique<MinAliveLeader>();
    throw std::invalid_argument("unknown leader strategy '" + strategy + "'");
}

}  // namespace pregraph
