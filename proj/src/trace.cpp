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

#include "pregraph/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pregraph {

void write_trace(std::ostream& out, const Trace& trace) {
    for (const auto& r : trace) out << r.dump() << '\n';
}

std::string trace_to_string(const Trace& trace) {
    std::ostringstream out;
    write_trace(out, trace);
    return out.str();
}

Trace read_trace(std::istream& in) {
    Trace trace;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            trace.push_back(TraceRecord::parse(line));
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!trace.back().is_object() || !trace.back().contains("ev")) {
            throw std::runtime_error("trace line " + std::to_string(lineno) + ": not an event record");
        }
    }
    return trace;
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace " + path);
    return read_trace(in);
}

void save_trace(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write trace " + path);
    write_trace(out, trace);
}

}  // namespace pregraph
