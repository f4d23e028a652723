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

#include "bagsched/rate_engine.hpp"

#include <map>

namespace bagsched {

RateProfile assign_rates(const std::vector<AliveJob>& alive, const MachineProfile& machines, double gamma) {
    return assign_rates_t<double>(alive, SpeedLadder<double>(machines.classes()), gamma);
}

RateProfile assign_rates(const std::vector<AliveJob>& alive, const Instance& instance) {
    return assign_rates(alive, instance.machines(), instance.speedup());
}

namespace {

bool within(double lhs, double rhs, double rel_tol) { return lhs <= rhs + rel_tol * std::max(1.0, std::abs(rhs)); }

}  // namespace

bool verify_star(const RateProfile& profile, const MachineProfile& machines, double rel_tol) {
    std::vector<const JobRate*> sorted;
    for (const auto& j : profile.jobs) sorted.push_back(&j);
    std::stable_sort(sorted.begin(), sorted.end(), [](const JobRate* a, const JobRate* b) { return a->rate > b->rate; });
    std::int64_t k = 0;
    double sum = 0.0;
    for (const JobRate* j : sorted) {
        if (j->rate < 0.0) return false;
        k += j->alive;
        sum += j->rate * static_cast<double>(j->alive);
        if (j->alive > 0) {
            // the first task of the run
            const std::int64_t k0 = k - j->alive + 1;
            const double s0 = sum - j->rate * static_cast<double>(j->alive - 1);
            if (!within(s0, profile.gamma * machines.prefix_speed(k0), rel_tol)) return false;
        }
        if (!within(sum, profile.gamma * machines.prefix_speed(k), rel_tol)) return false;
    }
    return true;
}

bool verify_star(std::vector<double> rates, const MachineProfile& machines, double gamma, double rel_tol) {
    std::sort(rates.begin(), rates.end(), std::greater<>());
    double sum = 0.0;
    std::int64_t k = 0;
    for (double r : rates) {
        if (r < 0.0) return false;
        sum += r;
        ++k;
        if (!within(sum, gamma * machines.prefix_speed(k), rel_tol)) return false;
    }
    return true;
}

CorollaryCheck corollary_rate1_check(const RateProfile& profile, const MachineProfile& machines, int v_job,
                                     const std::vector<TaskPick>& v_prime, const std::vector<TaskPick>& v_second,
                                     int through_block, double rel_tol) {
    const JobRate* v = profile.find(v_job);
    if (!v) throw InvalidInput("corollary check: task's job is not alive");
    if (through_block < 0) through_block = v->block;
    if (through_block < v->block || through_block >= static_cast<int>(profile.blocks.size()))
        throw InvalidInput("corollary check: V must contain the block of v");
    const std::int64_t V = profile.blocks[static_cast<std::size_t>(through_block)].task_end;

    auto validate = [&](const std::vector<TaskPick>& picks, bool later) {
        std::map<int, std::int64_t> used;
        for (const auto& p : picks) {
            const JobRate* jr = profile.find(p.job);
            if (!jr) throw InvalidInput("corollary check: subset contains a task that is not alive");
            used[p.job] += p.count;
            if (p.count < 1 || used[p.job] > jr->alive) throw InvalidInput("corollary check: subset over-counts a job");
            if (jr->block > through_block) throw InvalidInput("corollary check: subset is not inside V");
            if (later ? jr->block < v->block : jr->block > v->block)
                throw InvalidInput("corollary check: subset violates the freeze-order relation");
        }
    };
    validate(v_prime, true);
    validate(v_second, false);

    CorollaryCheck res;
    double share_prime = 0.0;
    for (const auto& p : v_prime) share_prime += profile.find(p.job)->share * static_cast<double>(p.count);
    const double s_V = machines.speed_at(V);
    if (s_V == 0.0) {
        res.first = true;
    } else {
        const double lhs = v->share / s_V;
        const double rhs = share_prime / machines.prefix_speed(V);
        res.first = lhs >= rhs - rel_tol * std::max(1.0, rhs);
    }

    double share_second = 0.0;
    double rate_second = 0.0;
    for (const auto& p : v_second) {
        const JobRate* jr = profile.find(p.job);
        share_second += jr->share * static_cast<double>(p.count);
        rate_second += jr->rate * static_cast<double>(p.count);
    }
    if (v->rate == 0.0 || rate_second == 0.0) {
        res.second = true;
    } else {
        // cross-multiplied to avoid dividing tiny rates
        const double lhs = v->share * rate_second;
        const double rhs = share_second * v->rate;
        res.second = lhs <= rhs + rel_tol * std::max(1.0, std::abs(rhs));
    }
    return res;
}

}  // namespace bagsched
