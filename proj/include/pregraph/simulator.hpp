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
#include <random>
#include <stdexcept>

#include "pregraph/comm.hpp"
#include "pregraph/event_loop.hpp"
#include "pregraph/replica.hpp"
#include "pregraph/scenario.hpp"
#include "pregraph/trace.hpp"

namespace pregraph {

struct StepCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunResult {
    Trace trace;
    SimTime end_time = 0;
    std::uint64_t steps = 0;
    std::map<MessageClass, std::uint64_t> messages;
};

/// Runs one scenario to quiescence. Every source of nondeterminism is the
/// scenario seed, so equal scenarios give byte-identical traces.
class Simulator final : private ReplicaEnv, private Transport, private CommitHistory {
public:
    explicit Simulator(Scenario scenario);
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Throws StepCapExceeded if the event budget runs out.
    RunResult run();

    const Scenario& scenario() const { return scenario_; }
    const Replica& replica(const SiteId& site) const { return *replicas_.at(site); }
    bool crashed(const SiteId& site) const { return crashed_.contains(site); }

private:
    // ReplicaEnv
    Stamp stamp() const override { return loop_.stamp(); }
    void emit(TraceRecord record) override { trace_.push_back(std::move(record)); }
    void r_multicast(const SiteId& from, TransactionPtr txn) override;
    void to_multicast(const SiteId& from, const Operation& op, TransactionPtr txn) override;
    void send_graph(const SiteId& from, const TransactionId& about, const SiteSet& to,
                    std::shared_ptr<const PrecedenceGraph> graph) override;
    SiteId weak_leader(const SiteId& at, const DataItemId& item) const override;
    bool concurrent(const Transaction& a, const Transaction& b) const override;
    void schedule_step(const SiteId& site, const TransactionId& txn) override;
    void decided(const SiteId& site, const TransactionId& txn, bool committed) override;

    // Transport
    SimTime now() const override { return loop_.now(); }
    bool alive(const SiteId& site) const override { return !crashed_.contains(site); }
    void send(MessageClass cls, const std::string& from, const std::string& to, const TransactionId& txn,
              const std::string& op, std::function<void()> on_arrival) override;

    // CommitHistory
    std::optional<Stamp> committed_at(const TransactionId& txn, const SiteId& site) const override;

    void crash(const SiteId& site);
    Replica& at(const SiteId& site) { return *replicas_.at(site); }

    Scenario scenario_;
    EventLoop loop_;
    std::mt19937_64 rng_;
    Trace trace_;
    std::unique_ptr<WeakLeader> leader_;
    ReliableMulticast urm_;
    TotalOrderMulticast tom_;
    std::map<SiteId, std::unique_ptr<Replica>> replicas_;
    SiteSet crashed_;
    std::map<std::pair<TransactionId, SiteId>, Stamp> commits_;
    std::map<MessageClass, std::uint64_t> messages_;
    bool ran_ = false;
};

RunResult run_scenario(const Scenario& scenario);

}  // namespace pregraph
