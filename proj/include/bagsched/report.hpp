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

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace bagsched {

/// Where a checked inequality binds. Fields that do not apply stay at -1.
struct Witness {
    std::string constraint;
    int job = -1;
    int segment = -1;
    int machine_class = -1;
    int interval = -1;    // t'
    int interval_beta = -1;  // t <= t' at which β attains the binding minimum
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Outcome of scanning one family of inequalities. Slack is (rhs - lhs) / max(|lhs|, |rhs|).
struct ConstraintReport {
    ConstraintReport() = default;
    explicit ConstraintReport(std::string n) : name(std::move(n)) {}

    std::string name;
    std::int64_t checked = 0;
    std::int64_t violated = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    Witness tightest;
    /// Counts of relative slack in bins: <0, [0,1e-9), [1e-9,1e-6), [1e-6,1e-3), [1e-3,1e-1), >=1e-1.
    std::array<std::int64_t, 6> histogram{};

    bool ok() const { return violated == 0; }
    /// Records lhs <= rhs; violated when lhs exceeds rhs by more than rel_tol * max(|lhs|, |rhs|) + abs_tol.
    void record(double lhs, double rhs, const Witness& w, double rel_tol = 1e-9, double abs_tol = 0.0);
};

const ConstraintReport* find_report(const std::vector<ConstraintReport>& reports, const std::string& name);
bool all_ok(const std::vector<ConstraintReport>& reports);

}  // namespace bagsched
