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

#include "pregraph/simulator.hpp"

namespace pregraph {

Simulator::Simulator(Scenario scenario)
    : scenario_(std::move(scenario)),
      rng_(scenario_.seed),
      leader_(make_weak_leader(scenario_.leader_strategy)),
      urm_(*this, [this](const SiteId& site, const TransactionPtr& txn) { at(site).on_r_deliver(txn); }),
      tom_(*this, scenario_.map, scenario_.colocate_leaders,
           [this](const SiteId& site, const TomMessage& msg) { at(site).on_to_deliver(msg.op, msg.txn); }) {
    validate(scenario_);
    for (const auto& site : scenario_.map.sites()) {
        ReplicaEnv& env = *this;
        replicas_.emplace(site, std::make_unique<Replica>(site, scenario_.map, env, scenario_.cycle_cap));
    }
}

RunResult Simulator::run() {
    if (ran_) throw std::logic_error("simulator already ran");
    ran_ = true;

    TraceRecord header;
    header["t"] = 0;
    header["ev"] = "scenario";
    header["scenario"] = scenario_to_json(scenario_);
    emit(std::move(header));

    loop_.at(0, [this] {
        for (auto& [_, r] : replicas_) r->start();
    });
    for (const auto& f : scenario_.faults) {
        loop_.at(f.time, [this, site = f.site] { crash(site); });
    }
    for (const auto& spec : scenario_.transactions) {
        loop_.at(spec.start, [this, spec] {
            if (alive(spec.origin)) at(spec.origin).begin(spec);
        });
    }

    while (loop_.run_one()) {
        if (loop_.steps() > scenario_.step_cap) {
            throw StepCapExceeded("scenario '" + scenario_.name + "' exceeded " +
                                  std::to_string(scenario_.step_cap) + " events at t=" +
                                  std::to_string(loop_.now()) + " with " + std::to_string(trace_.size()) +
                                  " trace records");
        }
    }

    for (const auto& [site, r] : replicas_) {
        if (alive(site)) emit(r->final_state(loop_.now()));
    }
    TraceRecord end;
    end["t"] = loop_.now();
    end["ev"] = "run_end";
    end["steps"] = loop_.steps();
    emit(std::move(end));

    RunResult result;
    result.trace = std::move(trace_);
    result.end_time = loop_.now();
    result.steps = loop_.steps();
    result.messages = messages_;
    return result;
}

void Simulator::crash(const SiteId& site) {
    if (!crashed_.insert(site).second) return;
    emit(trace_record("crash", loop_.now(), site));
    for (const auto& other : scenario_.map.sites()) {
        if (other == site) continue;
        loop_.after(scenario_.suspicion_delay, [this, other, site] {
            if (!alive(other)) return;
            leader_->suspect(other, site);
            auto r = trace_record("suspect", loop_.now(), other);
            r["crashed"] = site.str();
            emit(std::move(r));
            at(other).on_leader_change();
        });
    }
}

void Simulator::r_multicast(const SiteId& from, TransactionPtr txn) {
    const SiteSet group = scenario_.map.replicas(*txn);
    urm_.multicast(from, group, std::move(txn));
}

void Simulator::to_multicast(const SiteId& from, const Operation& op, TransactionPtr txn) {
    tom_.multicast(from, op, std::move(txn));
}

void Simulator::send_graph(const SiteId& from, const TransactionId& about, const SiteSet& to,
                           std::shared_ptr<const PrecedenceGraph> graph) {
    for (const auto& dest : to) {
        send(MessageClass::Graph, from.str(), dest.str(), about, "", [this, from, about, dest, graph] {
            if (alive(dest)) at(dest).on_receive_graph(from, about, *graph);
        });
    }
}

SiteId Simulator::weak_leader(const SiteId& at, const DataItemId& item) const {
    return leader_->leader(at, scenario_.map.replicas(item));
}

bool Simulator::concurrent(const Transaction& a, const Transaction& b) const {
    return pregraph::concurrent(a, b, *this);
}

void Simulator::schedule_step(const SiteId& site, const TransactionId& txn) {
    loop_.after(1, [this, site, txn] {
        if (alive(site)) at(site).exec_step(txn);
    });
}

void Simulator::decided(const SiteId& site, const TransactionId& txn, bool committed) {
    if (committed) commits_.emplace(std::make_pair(txn, site), loop_.stamp());
}

std::optional<Stamp> Simulator::committed_at(const TransactionId& txn, const SiteId& site) const {
    auto it = commits_.find({txn, site});
    if (it == commits_.end()) return std::nullopt;
    return it->second;
}

void Simulator::send(MessageClass cls, const std::string& from, const std::string& to, const TransactionId& txn,
                     const std::string& op, std::function<void()> on_arrival) {
    const SimTime d = from == to ? 0 : std::uniform_int_distribution<SimTime>(1, scenario_.max_delay)(rng_);
    ++messages_[cls];
    TraceRecord r;
    r["t"] = loop_.now();
    r["ev"] = "send";
    r["site"] = from;
    r["class"] = to_string(cls);
    r["to"] = to;
    r["txn"] = txn.str();
    if (!op.empty()) r["op"] = op;
    r["arrive"] = loop_.now() + d;
    emit(std::move(r));
    loop_.at(loop_.now() + d, std::move(on_arrival));
}

RunResult run_scenario(const Scenario& scenario) {
    Simulator sim(scenario);
    return sim.run();
}

}  // namespace pregraph
