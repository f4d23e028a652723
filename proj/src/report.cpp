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

#include "bagsched/report.hpp"

#include <algorithm>
#include <cmath>

namespace bagsched {

void ConstraintReport::record(double lhs, double rhs, const Witness& w, double rel_tol, double abs_tol) {
    ++checked;
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    const double slack = scale > 0.0 ? (rhs - lhs) / scale : 0.0;
    const bool bad = rhs - lhs < -(rel_tol * scale + abs_tol);
    if (bad) ++violated;
    std::size_t bin = 5;
    if (bad) bin = 0;
    else if (slack < 0.0) bin = 1;
    else if (slack < 1e-9) bin = 1;
    else if (slack < 1e-6) bin = 2;
    else if (slack < 1e-3) bin = 3;
    else if (slack < 1e-1) bin = 4;
    ++histogram[bin];
    if (slack < min_slack) {
        min_slack = slack;
        tightest = w;
        tightest.constraint = name;
        tightest.lhs = lhs;
        tightest.rhs = rhs;
    }
}

const ConstraintReport* find_report(const std::vector<ConstraintReport>& reports, const std::string& name) {
    for (const auto& r : reports)
        if (r.name == name) return &r;
    return nullptr;
}

bool all_ok(const std::vector<ConstraintReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const ConstraintReport& r) { return r.ok(); });
}

}  // namespace bagsched
