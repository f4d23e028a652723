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

#include <cstdint>
#include <string>
#include <vector>

#include "bagsched/instance.hpp"
#include "bagsched/rate_engine.hpp"

namespace bagsched {

class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class EventKind { task_completion, job_completion, job_release };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::task_completion;
    int job = 0;
    int cohort = -1;  // -1 for job-level events
};

struct CohortRef {
    int job = 0;
    int cohort = 0;

    auto operator<=>(const CohortRef&) const = default;
};

/// A maximal stretch of time during which the alive set, and hence every rate, stays constant.
struct TraceInterval {
    double start = 0.0;
    double end = 0.0;
    RateProfile profile;                  // alive jobs with counts, rates and blocks
    std::vector<CohortRef> alive_cohorts;  // sorted

    double length() const { return end - start; }
    double alive_weight() const;  // w(A^t)
    std::int64_t alive_tasks() const { return profile.num_tasks(); }
};

struct Trace {
    double gamma = 1.0;
    bool has_release_dates = false;
    std::vector<TraceInterval> intervals;
    std::vector<double> job_completion;                  // C_j
    std::vector<std::vector<double>> cohort_completion;  // per job, per cohort
    std::vector<Event> events;

    /// Σ_j w_j C_j.
    double objective(const Instance& instance) const;
    double makespan() const;
    /// ∫ w(A^t) dt over the recorded intervals.
    double weighted_alive_integral() const;
};

/// Runs the water-filling policy in continuous time until every job completes. Rates are
/// recomputed at each completion or release; tasks finishing at the same instant are processed as
/// one batch.
Trace simulate(const Instance& instance);

// --- realization ---------------------------------------------------------------------------

struct SliceMember {
    int job = 0;
    std::int64_t count = 0;
};

/// Tasks with equal remaining quota sharing a contiguous run of machines equally.
struct SliceAssignment {
    std::int64_t machine_begin = 0;
    std::int64_t machine_end = 0;
    std::int64_t num_tasks = 0;
    double per_task_speed = 0.0;
    std::vector<SliceMember> members;
};

struct SubSlice {
    double start = 0.0;
    double end = 0.0;
    std::vector<SliceAssignment> assignments;
};

struct JobWork {
    int job = 0;
    double quota = 0.0;      // L_v * length, per task
    double processed = 0.0;  // per task
};

struct ScheduleSlice {
    double start = 0.0;
    double end = 0.0;
    std::vector<SubSlice> pieces;
    std::vector<JobWork> work;
    bool success = false;
    /// Unfinished groups that had a strictly smaller remaining quota than some finished group.
    int exchange_violations = 0;
};

/// Turns one interval's rates into a machine schedule: at every instant tasks are ordered by
/// remaining quota and the i-th task runs on the i-th fastest machine, tied tasks sharing their
/// machines equally.
ScheduleSlice realize_slice(const RateProfile& profile, const MachineProfile& machines, double start, double end);

/// One concrete stretch of a machine working on a task. Task index counts the alive tasks of the
/// job (0-based).
struct MachineRun {
    std::int64_t machine = 0;
    double start = 0.0;
    double end = 0.0;
    int job = 0;
    std::int64_t task = 0;
};

/// Expands shared groups into explicit machine-task runs by rotating the group's tasks across its
/// machines in equal sub-pieces. Only sensible for small slices.
std::vector<MachineRun> expand_slice(const ScheduleSlice& slice);

struct SliceAudit {
    bool machine_exclusive = true;
    bool task_exclusive = true;
    double max_work_error = 0.0;  // relative, against quota
};

SliceAudit audit_expanded(const std::vector<MachineRun>& runs, const ScheduleSlice& slice,
                          const MachineProfile& machines, double gamma);

/// Realisability via the subset condition: every set of k tasks gets at most gamma * S_k. Small
/// profiles enumerate every subset; larger ones scan prefixes at run ends and class boundaries.
bool hall_feasibility(const RateProfile& profile, const MachineProfile& machines, double rel_tol = 1e-9);
bool hall_feasibility(const std::vector<double>& rates, const MachineProfile& machines, double gamma,
                      double rel_tol = 1e-9);

}  // namespace bagsched
