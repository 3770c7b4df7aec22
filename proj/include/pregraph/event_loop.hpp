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

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "pregraph/model.hpp"

namespace pregraph {

/// Discrete event queue. Events run in (time, insertion sequence) order.
class EventLoop {
public:
    using Action = std::function<void()>;

    SimTime now() const { return now_; }
    /// Stamp of the event currently running.
    Stamp stamp() const { return Stamp{now_, current_}; }
    std::uint64_t steps() const { return steps_; }
    bool empty() const { return queue_.empty(); }

    void at(SimTime when, Action action) {
        if (when < now_) throw std::logic_error("event scheduled in the past");
        queue_.push(Entry{when, next_seq_++, std::move(action)});
    }
    void after(SimTime delay, Action action) { at(now_ + delay, std::move(action)); }

    /// Runs the next event; false when the queue is empty.
    bool run_one() {
        if (queue_.empty()) return false;
        Entry e = queue_.top();
        queue_.pop();
        now_ = e.time;
        current_ = e.seq;
        ++steps_;
        e.action();
        return true;
    }

private:
    struct Entry {
        SimTime time;
        std::uint64_t seq;
        Action action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    SimTime now_ = 0;
    std::uint64_t current_ = 0;
    std::uint64_t next_seq_ = 1;
    std::uint64_t steps_ = 0;
};

}  // namespace pregraph
