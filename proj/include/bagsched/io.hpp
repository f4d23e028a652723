// Copyright 2026 The bagsched Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "bagsched/analysis_duals.hpp"
#include "bagsched/instance.hpp"
#include "bagsched/lp_bridge.hpp"
#include "bagsched/simulator.hpp"

namespace bagsched {

/// Raised for unreadable files and malformed documents.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Instance document:
///   {"classes": [{"sigma": 64, "count": 1}, ...],
///    "jobs": [{"weight": 1, "release": 0, "sizes": [64, {"size": 1, "count": 128}]}, ...],
///    "speedup": 1}
/// "speeds": [raw speeds] may replace "classes"; equal speeds are then grouped into classes.
nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

/// Raw speeds listed under "speeds", or the machines of "classes" expanded one per machine.
std::vector<double> raw_speeds_from_json(const nlohmann::json& doc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);
nlohmann::json read_json_file(const std::string& path);
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& instance);

/// Trace as JSON lines: a header record embedding the instance, one record per interval and a
/// closing summary with completion times, events and the objective.
void write_trace(std::ostream& out, const Trace& trace, const Instance& instance);

struct LoadedTrace {
    Instance instance;
    Trace trace;
};

LoadedTrace read_trace(std::istream& in);
LoadedTrace load_trace(const std::string& path);

/// Summary of a certificate; `with_values` adds every α, β and δ.
nlohmann::json certificate_to_json(const DualCertificate& certificate, bool with_values = false);
nlohmann::json report_to_json(const ConstraintReport& report);
nlohmann::json primal_to_json(const PrimalSolution& primal);

}  // namespace bagsched
