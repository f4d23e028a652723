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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "bagsched/instance.hpp"

namespace bagsched {

/// Comparison policy per scalar type: doubles use a relative tolerance of 1e-12, exact types
/// compare exactly.
template <class Scalar>
struct ScalarTraits {
    static bool tied(const Scalar& a, const Scalar& b) { return a == b; }
    static double to_double(const Scalar& x) { return static_cast<double>(x); }
};

template <>
struct ScalarTraits<double> {
    static bool tied(double a, double b) {
        return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
    }
    static double to_double(double x) { return x; }
};

/// Speed classes carried in an arbitrary scalar type, with the prefix-capacity query S_k.
template <class Scalar>
class SpeedLadder {
  public:
    SpeedLadder() = default;
    explicit SpeedLadder(const std::vector<SpeedClass>& classes) {
        counts_.push_back(0);
        caps_.push_back(Scalar(0));
        for (const auto& c : classes) {
            sigmas_.push_back(Scalar(c.sigma));
            counts_.push_back(counts_.back() + c.count);
            caps_.push_back(caps_.back() + Scalar(c.sigma) * Scalar(c.count));
        }
    }

    std::int64_t size() const { return counts_.back(); }

    Scalar prefix(std::int64_t k) const {
        if (k <= 0) return Scalar(0);
        if (k >= size()) return caps_.back();
        auto it = std::lower_bound(counts_.begin() + 1, counts_.end(), k);
        const auto cls = static_cast<std::size_t>(it - counts_.begin()) - 1;
        return caps_[cls] + sigmas_[cls] * Scalar(k - counts_[cls]);
    }

    Scalar at(std::int64_t k) const {
        if (k <= 0 || k > size()) return Scalar(0);
        auto it = std::lower_bound(counts_.begin() + 1, counts_.end(), k);
        return sigmas_[static_cast<std::size_t>(it - counts_.begin()) - 1];
    }

  private:
    std::vector<Scalar> sigmas_;
    std::vector<std::int64_t> counts_;
    std::vector<Scalar> caps_;
};

/// One alive job at an instant: its weight and how many of its tasks are unfinished. Every
/// alive task of the job has share weight / alive.
template <class Scalar>
struct AliveJobT {
    int job = 0;
    Scalar weight{1};
    std::int64_t alive = 1;

    Scalar share() const { return weight / Scalar(alive); }
};

/// Tasks frozen at the same water-filling moment. Positions are counted in tasks; the machine
/// range is the same range clipped to the machines that exist.
template <class Scalar>
struct BlockT {
    std::vector<int> jobs;
    std::int64_t task_begin = 0;
    std::int64_t task_end = 0;
    std::int64_t machine_begin = 0;
    std::int64_t machine_end = 0;
    Scalar tau{0};
    Scalar weight{0};  // w(B)
    Scalar speed{0};   // s(B), already scaled by the speed-up

    std::int64_t num_tasks() const { return task_end - task_begin; }
};

template <class Scalar>
struct JobRateT {
    int job = 0;
    std::int64_t alive = 0;
    Scalar weight{0};
    Scalar share{0};
    Scalar rate{0};  // L_v for every alive task v of the job
    int block = 0;
};

/// Rates at one instant. By the uniform-rates property a rate is attached to a job and applies to
/// each of its alive tasks.
template <class Scalar>
struct RateProfileT {
    Scalar gamma{1};
    std::vector<JobRateT<Scalar>> jobs;  // same order as the alive set given to assign_rates
    std::vector<BlockT<Scalar>> blocks;

    const JobRateT<Scalar>* find(int job) const {
        for (const auto& j : jobs)
            if (j.job == job) return &j;
        return nullptr;
    }
    std::int64_t num_tasks() const {
        std::int64_t n = 0;
        for (const auto& j : jobs) n += j.alive;
        return n;
    }
};

/// Water-filling in closed form. Unfrozen tasks are scanned by share, largest first; for each
/// prefix ending at a share boundary the moment it turns tight is
///   tau = gamma * (S_{b+N} - S_b) / (sum of shares in the prefix),
/// where b tasks are frozen already. The smallest such moment wins and the longest prefix tight
/// at that moment is frozen as one block.
template <class Scalar>
RateProfileT<Scalar> assign_rates_t(const std::vector<AliveJobT<Scalar>>& alive, const SpeedLadder<Scalar>& ladder,
                                    const Scalar& gamma) {
    using Tr = ScalarTraits<Scalar>;
    RateProfileT<Scalar> out;
    out.gamma = gamma;
    if (alive.empty()) return out;

    std::vector<std::size_t> order(alive.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<Scalar> shares;
    shares.reserve(alive.size());
    for (const auto& a : alive) {
        if (a.alive < 1) throw InvalidInput("alive job with no alive tasks");
        if (!(a.weight > Scalar(0))) throw InvalidInput("alive job with non-positive weight");
        shares.push_back(a.share());
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (shares[x] != shares[y]) return shares[x] > shares[y];
        return alive[x].job < alive[y].job;
    });

    struct Group {
        std::vector<std::size_t> members;
        std::int64_t count = 0;
        Scalar mass{0};
    };
    std::vector<Group> groups;
    for (std::size_t idx : order) {
        if (groups.empty() || !Tr::tied(shares[groups.back().members.front()], shares[idx])) groups.emplace_back();
        auto& g = groups.back();
        g.members.push_back(idx);
        g.count += alive[idx].alive;
        g.mass += shares[idx] * Scalar(alive[idx].alive);
    }

    out.jobs.resize(alive.size());
    for (std::size_t i = 0; i < alive.size(); ++i)
        out.jobs[i] = {alive[i].job, alive[i].alive, alive[i].weight, shares[i], Scalar(0), 0};

    const std::int64_t m = ladder.size();
    std::int64_t frozen = 0;
    Scalar last_tau{0};
    std::size_t start = 0;
    while (start < groups.size()) {
        const Scalar base = gamma * ladder.prefix(frozen);
        const Scalar room = gamma * ladder.prefix(m) - base;
        std::size_t end = groups.size() - 1;
        Scalar tau = last_tau;
        bool zero_block = !(room > Scalar(0));
        if (!zero_block) {
            std::vector<Scalar> taus;
            std::int64_t n = 0;
            Scalar mass{0};
            for (std::size_t g = start; g < groups.size(); ++g) {
                n += groups[g].count;
                mass += groups[g].mass;
                taus.push_back((gamma * ladder.prefix(frozen + n) - base) / mass);
            }
            Scalar best = taus.front();
            for (const auto& t : taus)
                if (t < best) best = t;
            end = start;
            for (std::size_t g = 0; g < taus.size(); ++g)
                if (Tr::tied(taus[g], best)) end = start + g;
            tau = taus[end - start];
        }

        BlockT<Scalar> block;
        block.task_begin = frozen;
        block.tau = tau;
        for (std::size_t g = start; g <= end; ++g) {
            for (std::size_t idx : groups[g].members) {
                auto& jr = out.jobs[idx];
                jr.rate = zero_block ? Scalar(0) : jr.share * tau;
                jr.block = static_cast<int>(out.blocks.size());
                block.jobs.push_back(alive[idx].job);
                block.weight += alive[idx].weight;
            }
            frozen += groups[g].count;
        }
        block.task_end = frozen;
        block.machine_begin = std::min(block.task_begin, m);
        block.machine_end = std::min(block.task_end, m);
        block.speed = gamma * (ladder.prefix(block.task_end) - ladder.prefix(block.task_begin));
        out.blocks.push_back(std::move(block));
        last_tau = tau;
        start = end + 1;
    }
    return out;
}

using AliveJob = AliveJobT<double>;
using Block = BlockT<double>;
using JobRate = JobRateT<double>;
using RateProfile = RateProfileT<double>;

RateProfile assign_rates(const std::vector<AliveJob>& alive, const Instance& instance);
RateProfile assign_rates(const std::vector<AliveJob>& alive, const MachineProfile& machines, double gamma);

/// Prefix condition: for every k the k largest rates sum to at most gamma * S_k (relative
/// tolerance `rel_tol`). Only run endpoints of the sorted rates need checking: along a run of equal
/// rates the slack is concave in k.
bool verify_star(const RateProfile& profile, const MachineProfile& machines, double rel_tol = 1e-9);

/// Plain per-task rate list variant, used for hand-built rate vectors.
bool verify_star(std::vector<double> rates, const MachineProfile& machines, double gamma, double rel_tol = 1e-9);

/// A number of tasks taken from one alive job.
struct TaskPick {
    int job = 0;
    std::int64_t count = 1;
};

struct CorollaryCheck {
    bool first = false;   // share(v)/s_|V| >= share(V')/S_|V|
    bool second = false;  // share(v)/L_v <= share(V'')/L(V'')
    bool holds() const { return first && second; }
};

/// Checks both share/rate averaging inequalities for a task of job `v_job`. V is the set of tasks in
/// blocks 0..through_block (default: the block of v). V' must freeze no earlier than v, V'' no
/// later; anything else is rejected with InvalidInput.
CorollaryCheck corollary_rate1_check(const RateProfile& profile, const MachineProfile& machines, int v_job,
                                     const std::vector<TaskPick>& v_prime, const std::vector<TaskPick>& v_second,
                                     int through_block = -1, double rel_tol = 1e-9);

}  // namespace bagsched
