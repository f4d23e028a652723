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

#include "bagsched/instance.hpp"
#include "bagsched/report.hpp"
#include "bagsched/simulator.hpp"

namespace bagsched {

enum class DualFamily { weaker, single_job, general };

std::string to_string(DualFamily f);
DualFamily parse_family(const std::string& s);

/// The constants used by the general certificate and its side claims. Defaults are the values the
/// analysis proves; experiments may tighten them.
struct GeneralConstants {
    double simple_job_window = 64.0;     // job simple iff rate in [γσ/64, 64γσ]
    double simple_block_window = 2.0;    // block simple iff average speed in [γσ/2, 2γσ]
    double delta_simple_den = 2.0;       // δ' = w / (2K n)
    double alpha_simple_den = 4.0;       // α' = w / (4K n)
    double delta_long_den = 96.0;        // δ'' = max w(B) / (96 K log K m̃)
    double alpha_long_den = 12.0;        // α'' = L w(B) / (12 K log K s(B))
    double beta_c = 1.0;                 // β = w(A) / (c K² log K m_ℓ)
    double gamma_factor = 1024.0;        // γ >= 1024 K log K
    double cheap_den = 10.0;             // cheap iff w(B) < w(A) / (10K)
    double final_factor = 90.0;          // w(A) <= 90 (w_simple + w_long)
    double alpha_claim_den = 1800.0;     // Σα >= C / (1800 K log K)
    double simpleb_factor = 5.0;         // w(B) <= 5 w(B')
    double counting_factor = 8.0;        // w(B2) <= 8 w(between)
    double rootd_factor = 6.0;           // w(B)/m̃ <= 6 w_j / n
    double simple_lemma_factor = 1024.0;
    double dang_factor = 32.0;
};

/// log K as used in every threshold: log2 K, floored at 1 so K = 1 stays well defined.
double log_k(int K);

/// Tasks of one job that the certificate treats identically (same cohort, same dual values).
/// `cohort` is -1 for the zero-size padding tasks of the weaker family, which are never alive.
struct TaskSegment {
    int job = 0;
    int cohort = 0;
    std::int64_t first = 0;  // first copy within the cohort
    std::int64_t count = 0;
};

struct DualCertificate {
    DualFamily family = DualFamily::weaker;
    double gamma = 1.0;
    double gamma_required = 0.0;
    bool gamma_sufficient = false;

    std::vector<TaskSegment> segments;
    std::vector<double> delta;                // per task of each segment
    std::vector<double> delta_simple;         // general family: δ'
    std::vector<double> delta_long;           // general family: δ''
    std::vector<std::vector<double>> alpha;   // [interval][segment], per task per unit time
    std::vector<std::vector<double>> alpha_simple;
    std::vector<std::vector<double>> alpha_long;
    std::vector<std::vector<double>> beta;    // [interval][class], per machine per unit time

    double alpha_total = 0.0;
    double beta_total = 0.0;
    double dual_objective = 0.0;
    double weighted_completion = 0.0;  // C^A of the certified run

    std::vector<ConstraintReport> constraints;
    std::vector<ConstraintReport> claims;  // side inequalities of the analysis (diagnostic)
    std::vector<Witness> violations;        // capped list of violated dual constraints
    std::vector<std::string> notes;
    bool feasible = false;

    const ConstraintReport* claim(const std::string& name) const;
    const ConstraintReport* constraint(const std::string& name) const;
};

// --- block taxonomy ------------------------------------------------------------------------

enum class BlockKind { simple, long_block, cheap, short_block };
std::string to_string(BlockKind k);

struct BlockLabel {
    BlockKind kind = BlockKind::short_block;
    int cls = -1;  // class for simple / long labels
    double average_speed = 0.0;
    double weight = 0.0;
    std::vector<std::int64_t> class_machines;  // machines of each class inside m(B)
};

struct BlockClassification {
    std::vector<std::vector<BlockLabel>> intervals;  // parallel to trace.intervals[..].profile.blocks
    std::vector<ConstraintReport> claims;

    const ConstraintReport* claim(const std::string& name) const;
};

BlockClassification classify_blocks(const Trace& trace, const Instance& instance,
                                    const GeneralConstants& constants = {});

// --- certificates --------------------------------------------------------------------------

/// Duals spreading each job's weight over its alive tasks, with δ from size-ranked groups of
/// doubling cardinality. Needs γ >= 2 max{K, log2 n}; below that it is still built and checked.
DualCertificate build_weaker_duals(const Trace& trace, const Instance& instance);

/// Duals for a single job whose epochs are cut where M_ℓ and M̃_ℓ tasks remain. Requires one job,
/// zero release and ICA; γ >= 2K is checked but not enforced.
DualCertificate build_single_job_duals(const Trace& trace, const Instance& instance);

/// Simple/long split certificate for arbitrary job sets. Requires ICA and zero releases.
DualCertificate build_general_duals(const Trace& trace, const Instance& instance,
                                    const GeneralConstants& constants = {});

DualCertificate build_duals(DualFamily family, const Trace& trace, const Instance& instance);

/// C^A * γ * (preprocessing loss) / dual objective. Throws PreconditionError for an infeasible
/// certificate or a non-positive dual objective.
double certified_ratio(const DualCertificate& certificate, const Trace& trace, const Instance& instance);

}  // namespace bagsched
