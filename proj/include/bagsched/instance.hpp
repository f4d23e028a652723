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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bagsched {

/// Raised for malformed instances or inputs that violate an operation's precondition.
class InvalidInput : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an operation requires the Increasing Capacity Assumption and it does not hold,
/// or when some other analysis precondition (single job, zero releases, ...) is unmet.
class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kRoundingBase = 64.0;

struct SpeedClass {
    double sigma = 1.0;
    std::int64_t count = 1;
};

/// One physical machine. Machine ids are 0-based and sorted by non-increasing speed;
/// `class_index` is 0-based as well.
struct Machine {
    std::int64_t id = 0;
    double speed = 0.0;
    int class_index = 0;
};

/// A run of `count` identical tasks of one job. Identical tasks of a job always receive the same
/// rate and finish together, so they are kept as a single cohort.
struct TaskCohort {
    double size = 0.0;
    std::int64_t count = 1;
};

struct Job {
    double weight = 1.0;
    double release = 0.0;
    std::vector<TaskCohort> tasks;

    std::int64_t task_count() const;
};

/// Addresses one task: job, cohort within the job, copy within the cohort.
struct TaskRef {
    int job = 0;
    int cohort = 0;
    std::int64_t copy = 0;

    auto operator<=>(const TaskRef&) const = default;
};

/// Machines seen through their speed classes. All capacity queries work at class granularity,
/// so profiles with billions of machines cost O(K).
class MachineProfile {
  public:
    MachineProfile() = default;
    explicit MachineProfile(std::vector<SpeedClass> classes);

    const std::vector<SpeedClass>& classes() const { return classes_; }
    int num_classes() const { return static_cast<int>(classes_.size()); }
    std::int64_t num_machines() const { return total_; }

    /// S_k = s_1 + ... + s_k; flat for k > m.
    double prefix_speed(std::int64_t k) const;
    /// s_k for 1-based k; 0 beyond the last machine.
    double speed_at(std::int64_t k) const;
    /// Class containing 1-based machine position k (k in 1..m).
    int class_of_position(std::int64_t k) const;
    /// M_ℓ = m_1 + ... + m_ℓ for 0-based ℓ (i.e. machines in classes 0..ℓ).
    std::int64_t machines_through(int cls) const { return prefix_count_[cls + 1]; }
    std::int64_t first_machine_of(int cls) const { return prefix_count_[cls]; }
    double capacity(int cls) const { return classes_[cls].sigma * static_cast<double>(classes_[cls].count); }
    /// σ_1 m_1 + ... + σ_ℓ m_ℓ for 0-based ℓ.
    double capacity_through(int cls) const { return prefix_capacity_[cls + 1]; }
    Machine machine(std::int64_t id) const;

  private:
    std::vector<SpeedClass> classes_;
    std::vector<std::int64_t> prefix_count_{0};
    std::vector<double> prefix_capacity_{0.0};
    std::int64_t total_ = 0;
};

struct IcaBoundary {
    int cls = 0;  // boundary between class cls and cls+1 (0-based)
    bool falling_speeds = true;
    bool increasing_capacity = true;
};

struct IcaReport {
    std::vector<IcaBoundary> boundaries;
    bool satisfied = true;

    std::string describe() const;
};

/// Machines (as speed classes), jobs and the algorithm's speed-up factor. Immutable once built.
class Instance {
  public:
    Instance() = default;
    Instance(std::vector<SpeedClass> classes, std::vector<Job> jobs, double speedup = 1.0,
             double preprocessing_loss = 1.0);

    const MachineProfile& machines() const { return machines_; }
    const std::vector<SpeedClass>& classes() const { return machines_.classes(); }
    const std::vector<Job>& jobs() const { return jobs_; }
    int num_classes() const { return machines_.num_classes(); }
    int num_jobs() const { return static_cast<int>(jobs_.size()); }
    std::int64_t num_tasks() const;
    double speedup() const { return speedup_; }
    /// Multiplicative loss incurred when this instance came out of preprocessing (1 otherwise).
    double preprocessing_loss() const { return preprocessing_loss_; }
    bool ica_satisfied() const { return ica_.satisfied; }
    const IcaReport& ica_report() const { return ica_; }
    bool all_released_at_zero() const;

    Instance with_speedup(double gamma) const;

  private:
    MachineProfile machines_;
    std::vector<Job> jobs_;
    double speedup_ = 1.0;
    double preprocessing_loss_ = 1.0;
    IcaReport ica_;
};

// --- preprocessing -------------------------------------------------------------------------

/// Rounds each speed down to a power of `base` and merges equal results into classes sorted by
/// decreasing speed. Only base 64 is covered by the analysis.
std::vector<SpeedClass> round_speeds(const std::vector<double>& raw_speeds, double base = kRoundingBase);

struct CapacitySelection {
    std::vector<int> kept;                     // 0-based indices into the input classes
    std::vector<std::int64_t> inflated_counts;  // K * m_ℓ for each kept class
    std::vector<SpeedClass> classes;           // the transformed machine profile
};

/// Greedy subset of speed classes whose capacities grow by at least 2*kappa from one kept class to
/// the next, with machine counts of kept classes inflated K-fold.
CapacitySelection select_capacity_classes(const std::vector<SpeedClass>& classes, double kappa = kRoundingBase);

IcaReport validate_ica(const std::vector<SpeedClass>& classes);
inline IcaReport validate_ica(const Instance& instance) { return validate_ica(instance.classes()); }

/// Where an original machine ended up after preprocessing.
struct MachineProvenance {
    std::int64_t original_id = 0;
    double original_speed = 0.0;
    int rounded_class = 0;           // class after rounding
    std::optional<int> kept_class;   // class in the transformed instance, if its class was kept
};

struct PreprocessResult {
    std::vector<SpeedClass> rounded;
    CapacitySelection selection;
    std::vector<MachineProvenance> provenance;
    /// 64 for the rounding times 2*64*K for the class selection.
    double loss_factor = 1.0;
};

PreprocessResult preprocess_speeds(const std::vector<double>& raw_speeds);

// --- thresholds ----------------------------------------------------------------------------

struct Threshold {
    double m_tilde = 0.0;     // (σ_1 m_1 + ... + σ_ℓ m_ℓ) / σ_{ℓ+1}
    std::int64_t M = 0;       // m_1 + ... + m_ℓ
    double M_tilde = 0.0;     // M + m_tilde
};

/// Thresholds for every class boundary ℓ = 1..K-1 (returned 0-based). Requires ICA and checks the
/// four threshold inequalities; throws PreconditionError if any fails.
std::vector<Threshold> thresholds(const Instance& instance);
std::vector<Threshold> thresholds(const std::vector<SpeedClass>& classes);

}  // namespace bagsched
