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

#include "bagsched/instance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace bagsched {

std::int64_t Job::task_count() const {
    std::int64_t n = 0;
    for (const auto& c : tasks) n += c.count;
    return n;
}

MachineProfile::MachineProfile(std::vector<SpeedClass> classes) : classes_(std::move(classes)) {
    for (const auto& c : classes_) {
        total_ += c.count;
        prefix_count_.push_back(total_);
        prefix_capacity_.push_back(prefix_capacity_.back() + c.sigma * static_cast<double>(c.count));
    }
}

double MachineProfile::prefix_speed(std::int64_t k) const {
    if (k <= 0) return 0.0;
    if (k >= total_) return prefix_capacity_.back();
    const int cls = class_of_position(k);
    return prefix_capacity_[cls] + classes_[cls].sigma * static_cast<double>(k - prefix_count_[cls]);
}

double MachineProfile::speed_at(std::int64_t k) const {
    if (k <= 0 || k > total_) return 0.0;
    return classes_[class_of_position(k)].sigma;
}

int MachineProfile::class_of_position(std::int64_t k) const {
    // first class whose cumulative count reaches k
    auto it = std::lower_bound(prefix_count_.begin() + 1, prefix_count_.end(), k);
    if (it == prefix_count_.end()) return num_classes() - 1;
    return static_cast<int>(it - prefix_count_.begin()) - 1;
}

Machine MachineProfile::machine(std::int64_t id) const {
    if (id < 0 || id >= total_) throw InvalidInput("machine id out of range");
    const int cls = class_of_position(id + 1);
    return Machine{id, classes_[cls].sigma, cls};
}

std::string IcaReport::describe() const {
    std::ostringstream os;
    os << (satisfied ? "ICA satisfied" : "ICA violated");
    for (const auto& b : boundaries) {
        if (b.falling_speeds && b.increasing_capacity) continue;
        os << "; boundary " << b.cls + 1 << "/" << b.cls + 2 << ":";
        if (!b.falling_speeds) os << " speed ratio < 64";
        if (!b.increasing_capacity) os << " capacity of class " << b.cls + 2 << " < 2x faster classes";
    }
    return os.str();
}

namespace {

void check_classes(const std::vector<SpeedClass>& classes) {
    if (classes.empty()) throw InvalidInput("instance has no machines");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& c = classes[i];
        if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw InvalidInput("speed class with non-positive speed");
        if (c.count < 1) throw InvalidInput("speed class with no machines");
        if (i > 0 && !(classes[i - 1].sigma > c.sigma))
            throw InvalidInput("speed classes must be strictly decreasing");
    }
}

void check_jobs(const std::vector<Job>& jobs) {
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto& job = jobs[j];
        const std::string tag = "job " + std::to_string(j) + ": ";
        if (!(job.weight > 0.0) || !std::isfinite(job.weight)) throw InvalidInput(tag + "weight must be positive");
        if (!(job.release >= 0.0) || !std::isfinite(job.release)) throw InvalidInput(tag + "release must be >= 0");
        if (job.tasks.empty()) throw InvalidInput(tag + "needs at least one task");
        for (const auto& c : job.tasks) {
            if (!(c.size >= 0.0) || !std::isfinite(c.size)) throw InvalidInput(tag + "task size must be >= 0");
            if (c.count < 1) throw InvalidInput(tag + "task cohort count must be >= 1");
        }
    }
}

}  // namespace

Instance::Instance(std::vector<SpeedClass> classes, std::vector<Job> jobs, double speedup, double preprocessing_loss)
    : jobs_(std::move(jobs)), speedup_(speedup), preprocessing_loss_(preprocessing_loss) {
    check_classes(classes);
    check_jobs(jobs_);
    if (!(speedup > 0.0) || !std::isfinite(speedup)) throw InvalidInput("speedup must be positive");
    if (!(preprocessing_loss >= 1.0)) throw InvalidInput("preprocessing loss must be >= 1");
    ica_ = validate_ica(classes);
    machines_ = MachineProfile(std::move(classes));
}

std::int64_t Instance::num_tasks() const {
    std::int64_t n = 0;
    for (const auto& j : jobs_) n += j.task_count();
    return n;
}

bool Instance::all_released_at_zero() const {
    return std::all_of(jobs_.begin(), jobs_.end(), [](const Job& j) { return j.release == 0.0; });
}

Instance Instance::with_speedup(double gamma) const {
    return Instance(classes(), jobs_, gamma, preprocessing_loss_);
}

// --- preprocessing -------------------------------------------------------------------------

namespace {

double round_down_to_power(double s, double base) {
    int e = static_cast<int>(std::floor(std::log(s) / std::log(base)));
    // log() may be off by one ulp near exact powers
    while (std::pow(base, e + 1) <= s) ++e;
    while (std::pow(base, e) > s) --e;
    return std::pow(base, e);
}

}  // namespace

std::vector<SpeedClass> round_speeds(const std::vector<double>& raw_speeds, double base) {
    if (raw_speeds.empty()) throw InvalidInput("round_speeds: empty speed list");
    if (!(base > 1.0)) throw InvalidInput("round_speeds: base must exceed 1");
    std::map<double, std::int64_t, std::greater<>> merged;
    for (double s : raw_speeds) {
        if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("round_speeds: speeds must be positive and finite");
        ++merged[round_down_to_power(s, base)];
    }
    std::vector<SpeedClass> out;
    for (auto [sigma, count] : merged) out.push_back({sigma, count});
    return out;
}

CapacitySelection select_capacity_classes(const std::vector<SpeedClass>& classes, double kappa) {
    check_classes(classes);
    CapacitySelection sel;
    const auto K = static_cast<std::int64_t>(classes.size());
    auto cap = [&](std::size_t i) { return classes[i].sigma * static_cast<double>(classes[i].count); };
    sel.kept.push_back(0);
    for (std::size_t i = 1; i < classes.size(); ++i) {
        if (cap(i) >= 2.0 * kappa * cap(static_cast<std::size_t>(sel.kept.back()))) sel.kept.push_back(static_cast<int>(i));
    }
    for (int k : sel.kept) {
        sel.inflated_counts.push_back(K * classes[k].count);
        sel.classes.push_back({classes[k].sigma, K * classes[k].count});
    }
    return sel;
}

IcaReport validate_ica(const std::vector<SpeedClass>& classes) {
    IcaReport rep;
    double faster_capacity = 0.0;
    for (std::size_t i = 0; i + 1 < classes.size(); ++i) {
        faster_capacity += classes[i].sigma * static_cast<double>(classes[i].count);
        IcaBoundary b;
        b.cls = static_cast<int>(i);
        b.falling_speeds = classes[i].sigma >= kRoundingBase * classes[i + 1].sigma;
        b.increasing_capacity = classes[i + 1].sigma * static_cast<double>(classes[i + 1].count) >= 2.0 * faster_capacity;
        rep.satisfied = rep.satisfied && b.falling_speeds && b.increasing_capacity;
        rep.boundaries.push_back(b);
    }
    return rep;
}

PreprocessResult preprocess_speeds(const std::vector<double>& raw_speeds) {
    PreprocessResult res;
    res.rounded = round_speeds(raw_speeds);
    res.selection = select_capacity_classes(res.rounded);
    const auto K = static_cast<double>(res.rounded.size());
    res.loss_factor = kRoundingBase * 2.0 * kRoundingBase * K;

    std::vector<std::size_t> order(raw_speeds.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return raw_speeds[a] > raw_speeds[b]; });
    for (std::size_t id : order) {
        MachineProvenance p;
        p.original_id = static_cast<std::int64_t>(id);
        p.original_speed = raw_speeds[id];
        const double r = round_down_to_power(raw_speeds[id], kRoundingBase);
        for (std::size_t c = 0; c < res.rounded.size(); ++c)
            if (res.rounded[c].sigma == r) p.rounded_class = static_cast<int>(c);
        for (std::size_t k = 0; k < res.selection.kept.size(); ++k)
            if (res.selection.kept[k] == p.rounded_class) p.kept_class = static_cast<int>(k);
        res.provenance.push_back(p);
    }
    return res;
}

// --- thresholds ----------------------------------------------------------------------------

std::vector<Threshold> thresholds(const std::vector<SpeedClass>& classes) {
    if (!validate_ica(classes).satisfied)
        throw PreconditionError("thresholds require the increasing capacity assumption");
    std::vector<Threshold> out;
    double cap = 0.0;
    std::int64_t M = 0;
    for (std::size_t l = 0; l + 1 < classes.size(); ++l) {
        cap += classes[l].sigma * static_cast<double>(classes[l].count);
        M += classes[l].count;
        Threshold t;
        t.m_tilde = cap / classes[l + 1].sigma;
        t.M = M;
        t.M_tilde = static_cast<double>(M) + t.m_tilde;
        out.push_back(t);
    }
    for (std::size_t l = 0; l < out.size(); ++l) {
        const auto& t = out[l];
        const double m_l = static_cast<double>(classes[l].count);
        const double m_next = static_cast<double>(classes[l + 1].count);
        const bool a = 2.0 * t.m_tilde <= m_next;
        const bool b = t.M_tilde >= 2.0 * static_cast<double>(t.M);
        const bool c = m_l * classes[l].sigma >= 0.5 * t.m_tilde * classes[l + 1].sigma;
        const bool d = t.m_tilde >= 2.0 * m_l;
        // f_ℓ = m̃_ℓ <= f̃_ℓ = m_{ℓ+1} - m̃_ℓ <= f_{ℓ+1} = m̃_{ℓ+1}
        const double f_tilde = m_next - t.m_tilde;
        const bool fl = t.m_tilde <= f_tilde && (l + 1 >= out.size() || f_tilde <= out[l + 1].m_tilde);
        if (!(a && b && c && d && fl))
            throw PreconditionError("threshold inequalities fail at class boundary " + std::to_string(l + 1));
    }
    return out;
}

std::vector<Threshold> thresholds(const Instance& instance) {
    if (!instance.ica_satisfied()) throw PreconditionError("thresholds require the increasing capacity assumption");
    return thresholds(instance.classes());
}

}  // namespace bagsched
