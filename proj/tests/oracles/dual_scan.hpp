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

// Re-checks a certificate's variables against every dual constraint, pairing each interval t'
// with every t <= t' explicitly instead of keeping a running minimum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bagsched/analysis_duals.hpp"
#include "bagsched/simulator.hpp"

namespace oracle {

struct ScanResult {
    int violations = 0;
    double objective = 0.0;  // Σ_t |t| (Σ α - Σ β), per-task and per-machine values scaled by counts
};

inline bool segment_alive(const bagsched::TraceInterval& iv, const bagsched::TaskSegment& seg) {
    if (seg.cohort < 0) return false;
    return std::binary_search(iv.alive_cohorts.begin(), iv.alive_cohorts.end(),
                              bagsched::CohortRef{seg.job, seg.cohort});
}

inline bool leq(double lhs, double rhs, double tol) {
    return lhs <= rhs + tol * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

inline ScanResult scan_duals(const bagsched::DualCertificate& c, const bagsched::Trace& trace,
                             const bagsched::Instance& inst, const std::vector<std::vector<double>>& alpha,
                             const std::vector<double>& delta, const std::vector<std::vector<double>>& beta,
                             double beta_factor = 1.0, double bound = 1.0, double tol = 1e-9) {
    ScanResult res;
    const auto& jobs = inst.jobs();
    const auto& classes = inst.classes();
    const std::size_t T = trace.intervals.size();
    auto rate = [&](std::size_t t, int job) {
        const auto* jr = trace.intervals[t].profile.find(job);
        return jr ? jr->rate : 0.0;
    };
    for (std::size_t s = 0; s < c.segments.size(); ++s) {
        if (delta[s] < 0) ++res.violations;
        for (std::size_t t = 0; t < T; ++t)
            if (alpha[t][s] < 0) ++res.violations;
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        double d = 0.0;
        for (std::size_t s = 0; s < c.segments.size(); ++s)
            if (c.segments[s].job == static_cast<int>(j)) d += static_cast<double>(c.segments[s].count) * delta[s];
        if (!leq(d, bound * jobs[j].weight, tol)) ++res.violations;
        for (std::size_t t = 0; t < T; ++t) {
            double a = 0.0;
            for (std::size_t s = 0; s < c.segments.size(); ++s)
                if (c.segments[s].job == static_cast<int>(j)) a += static_cast<double>(c.segments[s].count) * alpha[t][s];
            if (!leq(a, bound * jobs[j].weight, tol)) ++res.violations;
        }
    }
    for (std::size_t s = 0; s < c.segments.size(); ++s) {
        const auto& seg = c.segments[s];
        for (std::size_t tp = 0; tp < T; ++tp) {
            const double L = segment_alive(trace.intervals[tp], seg) ? rate(tp, seg.job) : 0.0;
            for (std::size_t t = 0; t <= tp; ++t) {
                if (trace.intervals[t].end <= jobs[static_cast<std::size_t>(seg.job)].release) continue;
                for (std::size_t l = 0; l < classes.size(); ++l) {
                    const double rhs = (beta_factor * beta[t][l] + delta[s]) * L / classes[l].sigma;
                    if (!leq(alpha[tp][s], rhs, tol)) ++res.violations;
                }
            }
        }
    }
    for (std::size_t t = 0; t < T; ++t) {
        double a = 0.0, b = 0.0;
        for (std::size_t s = 0; s < c.segments.size(); ++s) a += static_cast<double>(c.segments[s].count) * alpha[t][s];
        for (std::size_t l = 0; l < classes.size(); ++l) b += static_cast<double>(classes[l].count) * beta[t][l];
        res.objective += trace.intervals[t].length() * (a - b);
    }
    return res;
}

inline ScanResult scan_duals(const bagsched::DualCertificate& c, const bagsched::Trace& trace,
                             const bagsched::Instance& inst) {
    return scan_duals(c, trace, inst, c.alpha, c.delta, c.beta);
}

}  // namespace oracle
