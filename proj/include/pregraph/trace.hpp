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

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pregraph/model.hpp"

namespace pregraph {

using TraceRecord = nlohmann::ordered_json;
using Trace = std::vector<TraceRecord>;

/// Starts a record with the fields every event shares, in fixed order.
inline TraceRecord trace_record(const char* ev, SimTime t, const SiteId& site) {
    TraceRecord r;
    r["t"] = t;
    r["ev"] = ev;
    r["site"] = site.str();
    return r;
}

/// One JSON object per line.
void write_trace(std::ostream& out, const Trace& trace);
std::string trace_to_string(const Trace& trace);
/// Throws std::runtime_error naming the line on malformed input.
Trace read_trace(std::istream& in);
Trace load_trace(const std::string& path);
void save_trace(const std::string& path, const Trace& trace);

}  // namespace pregraph
