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
#include <map>
#include <string>
#include <vector>

#include "bagsched/instance.hpp"
#include "bagsched/report.hpp"
#include "bagsched/simulator.hpp"

namespace bagsched {

/// Flat numbering of tasks: jobs in order, cohorts in order, copies in order.
struct TaskInfo {
    int job = 0;
    int cohort = 0;
    std::int64_t copy = 0;
    double size = 0.0;
};

std::vector<TaskInfo> enumerate_tasks(const Instance& instance);

// --- LP text -------------------------------------------------------------------------------

struct EmittedLp {
    std::string text;
    std::vector<std::string> warnings;
    std::int64_t num_variables = 0;
    std::int64_t num_constraints = 0;
};

/// Largest LP emit_lp agrees to write, in x-variables.
inline constexpr std::int64_t kMaxLpVariables = 2'000'000;

/// Writes the completion-time relaxation over unit slots 0..horizon-1 in CPLEX LP syntax.
/// Variables: x_i_v_t (work of machine i on task v in slot t), U_j_t and C_j, all non-negative,
/// U_j_t <= 1. Rows: deltat_j_v_t, delta_j_v, alpha_j_v (zero-size tasks get no deltat/alpha
/// rows) and beta_i_t. Machine speeds are the instance speeds without the speed-up.
EmittedLp emit_lp(const Instance& instance, std::int64_t horizon);

/// Parses whitespace-separated "name value" pairs; lines starting with '#' are skipped. A lone
/// "objective <v>" pair is kept like any other name.
std::map<std::string, double> parse_lp_solution(const std::string& text);

struct LpEvaluation {
    double objective = 0.0;
    std::vector<ConstraintReport> constraints;
    bool feasible = false;
};

/// Objective and row feasibility of a named assignment for the LP emit_lp(instance, horizon)
/// writes. Missing variables count as zero.
LpEvaluation evaluate_lp_solution(const Instance& instance, std::int64_t horizon,
                                  const std::map<std::string, double>& values, double rel_tol = 1e-6);

// --- primal from a schedule ----------------------------------------------------------------

/// Machine `machine` spends `share` of its time on task `task` throughout [start, end).
struct WorkPiece {
    std::int64_t machine = 0;
    std::int64_t task = 0;
    double start = 0.0;
    double end = 0.0;
    double share = 1.0;
};

struct PrimalEntry {
    std::int64_t machine = 0;
    std::int64_t task = 0;
    std::int64_t slot = 0;
    double value = 0.0;
};

/// The relaxation with slots of length 1/q on machines running speed_scale times the instance
/// speeds: beta rows read Σ_v x/s_i <= 1/q and the U-term of the objective is weighted by 1/q.
struct PrimalSolution {
    double slot_length = 1.0;
    double speed_scale = 1.0;
    std::int64_t num_slots = 0;
    std::vector<PrimalEntry> x;
    std::vector<std::vector<double>> U;  // [job][slot]
    std::vector<double> C;
    double objective = 0.0;
    double schedule_cost = 0.0;  // Σ w_j C_j of the schedule the solution came from
    std::vector<ConstraintReport> constraints;
    bool feasible = false;
};

/// Builds x by integrating the pieces over slots, sets C_j to the given completion times and U_j_t
/// to the largest remaining fraction among j's tasks at the start of slot t, then checks every row.
PrimalSolution primal_from_pieces(const Instance& instance, const std::vector<WorkPiece>& pieces,
                                  const std::vector<double>& completion, double speed_scale, int slots_per_unit);

/// Primal of the algorithm's own run (machines at γ times the instance speeds). Each interval is
/// realized with the level schedule; tasks of a job share their group's machines evenly.
PrimalSolution schedule_to_primal(const Trace& trace, const Instance& instance, int slots_per_unit = 1);

/// Limits for schedule_to_primal: explicit x needs every task and machine spelled out.
inline constexpr std::int64_t kMaxPrimalTasks = 4096;
inline constexpr std::int64_t kMaxPrimalMachines = 4096;

/// The offline schedule of the lower-bound family: task k on machine k for [0, 1).
std::vector<WorkPiece> lower_bound_offline_pieces(const Instance& instance);

// --- exact optimum for tiny instances ------------------------------------------------------

struct BruteForceLimits {
    std::int64_t max_machines = 3;
    std::int64_t max_tasks = 5;
    double max_size = 4.0;
    int max_grid = 4;
};

/// Minimum Σ w_j C_j over schedules that fix a machine-to-task assignment per slot of length
/// 1/grid; a task finishing inside a slot completes at its exact finishing instant. Rejects
/// instances beyond the limits, non-integer sizes and non-zero releases with InvalidInput.
double brute_force_opt(const Instance& instance, int grid, const BruteForceLimits& limits = {});

}  // namespace bagsched
