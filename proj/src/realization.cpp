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

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "bagsched/simulator.hpp"

namespace bagsched {

namespace {

struct Group {
    double quota = 0.0;  // remaining, per task
    std::int64_t count = 0;
    std::vector<SliceMember> members;
};

}  // namespace

ScheduleSlice realize_slice(const RateProfile& profile, const MachineProfile& machines, double start, double end) {
    ScheduleSlice slice;
    slice.start = start;
    slice.end = end;
    const double length = end - start;
    const double gamma = profile.gamma;

    double max_quota = 0.0;
    std::vector<Group> groups;
    for (const auto& jr : profile.jobs) {
        const double q = jr.rate * length;
        slice.work.push_back({jr.job, q, 0.0});
        max_quota = std::max(max_quota, q);
        if (q > 0.0) groups.push_back({q, jr.alive, {{jr.job, jr.alive}}});
    }
    const double tol = 1e-12 * std::max(max_quota, 1e-300);
    std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return a.quota > b.quota; });

    auto merge_ties = [&] {
        std::vector<Group> merged;
        for (auto& g : groups) {
            if (g.quota <= tol) continue;
            if (!merged.empty() && std::abs(merged.back().quota - g.quota) <= tol) {
                auto& m = merged.back();
                // keep the count-weighted level so the total remaining work is preserved
                m.quota = (m.quota * static_cast<double>(m.count) + g.quota * static_cast<double>(g.count)) /
                          static_cast<double>(m.count + g.count);
                m.count += g.count;
                m.members.insert(m.members.end(), g.members.begin(), g.members.end());
            } else {
                merged.push_back(std::move(g));
            }
        }
        groups = std::move(merged);
    };
    merge_ties();

    std::map<int, std::size_t> work_index;
    for (std::size_t i = 0; i < slice.work.size(); ++i) work_index[slice.work[i].job] = i;

    double now = 0.0;
    const std::size_t max_steps = 4 * groups.size() + 16;
    for (std::size_t step = 0; step < max_steps && !groups.empty() && now < length; ++step) {
        std::vector<double> rate(groups.size());
        std::int64_t pos = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            const double cap = gamma * (machines.prefix_speed(pos + groups[g].count) - machines.prefix_speed(pos));
            rate[g] = cap / static_cast<double>(groups[g].count);
            pos += groups[g].count;
        }
        double dt = length - now;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (rate[g] > 0.0) dt = std::min(dt, groups[g].quota / rate[g]);
            if (g + 1 < groups.size() && rate[g] > rate[g + 1])
                dt = std::min(dt, (groups[g].quota - groups[g + 1].quota) / (rate[g] - rate[g + 1]));
        }
        dt = std::max(dt, 0.0);

        SubSlice piece{start + now, start + now + dt, {}};
        pos = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            SliceAssignment a;
            a.machine_begin = std::min(pos, machines.num_machines());
            a.machine_end = std::min(pos + groups[g].count, machines.num_machines());
            a.num_tasks = groups[g].count;
            a.per_task_speed = rate[g];
            a.members = groups[g].members;
            pos += groups[g].count;
            const double done = std::min(groups[g].quota, rate[g] * dt);
            groups[g].quota -= done;
            for (const auto& m : a.members) slice.work[work_index[m.job]].processed += done;
            if (a.machine_end > a.machine_begin) piece.assignments.push_back(std::move(a));
        }
        if (dt > 0.0) slice.pieces.push_back(std::move(piece));
        now += dt;
        merge_ties();
    }

    slice.success = true;
    bool seen_finished = false;
    // groups are sorted by quota; any still unfinished must be the preferred (largest) ones
    std::vector<std::pair<double, bool>> status;
    for (const auto& w : slice.work) {
        const bool finished = std::abs(w.processed - w.quota) <= 1e-9 * std::max(1.0, w.quota);
        if (!finished) slice.success = false;
        status.push_back({w.quota - w.processed, finished});
    }
    std::sort(status.begin(), status.end(), [](auto& a, auto& b) { return a.first > b.first; });
    for (auto it = status.rbegin(); it != status.rend(); ++it) {
        if (it->second) seen_finished = true;
        else if (seen_finished) ++slice.exchange_violations;
    }
    return slice;
}

std::vector<MachineRun> expand_slice(const ScheduleSlice& slice) {
    std::vector<MachineRun> runs;
    for (const auto& piece : slice.pieces) {
        for (const auto& a : piece.assignments) {
            const std::int64_t g = a.num_tasks;
            const double len = (piece.end - piece.start) / static_cast<double>(g);
            std::vector<std::pair<int, std::int64_t>> tasks;
            for (const auto& m : a.members)
                for (std::int64_t k = 0; k < m.count; ++k) tasks.push_back({m.job, k});
            for (std::int64_t r = 0; r < g; ++r) {
                for (std::int64_t k = 0; k < g; ++k) {
                    const std::int64_t machine = a.machine_begin + (k + r) % g;
                    if (machine >= a.machine_end) continue;
                    runs.push_back({machine, piece.start + static_cast<double>(r) * len,
                                    piece.start + static_cast<double>(r + 1) * len, tasks[static_cast<std::size_t>(k)].first,
                                    tasks[static_cast<std::size_t>(k)].second});
                }
            }
        }
    }
    return runs;
}

SliceAudit audit_expanded(const std::vector<MachineRun>& runs, const ScheduleSlice& slice,
                          const MachineProfile& machines, double gamma) {
    SliceAudit audit;
    const double eps = 1e-12 * std::max(1.0, std::abs(slice.end));
    auto overlapping = [&](std::vector<std::pair<double, double>>& spans) {
        std::sort(spans.begin(), spans.end());
        for (std::size_t i = 1; i < spans.size(); ++i)
            if (spans[i].first < spans[i - 1].second - eps) return true;
        return false;
    };
    std::map<std::int64_t, std::vector<std::pair<double, double>>> per_machine;
    std::map<std::pair<int, std::int64_t>, std::vector<std::pair<double, double>>> per_task;
    std::map<std::pair<int, std::int64_t>, double> work;
    for (const auto& r : runs) {
        per_machine[r.machine].push_back({r.start, r.end});
        per_task[{r.job, r.task}].push_back({r.start, r.end});
        work[{r.job, r.task}] += gamma * machines.machine(r.machine).speed * (r.end - r.start);
    }
    for (auto& [m, spans] : per_machine)
        if (overlapping(spans)) audit.machine_exclusive = false;
    for (auto& [t, spans] : per_task)
        if (overlapping(spans)) audit.task_exclusive = false;
    std::map<int, double> quota;
    for (const auto& w : slice.work) quota[w.job] = w.quota;
    for (const auto& [key, done] : work)
        audit.max_work_error = std::max(audit.max_work_error, std::abs(done - quota[key.first]) / std::max(1.0, quota[key.first]));
    return audit;
}

namespace {

bool within(double lhs, double rhs, double rel_tol) { return lhs <= rhs + rel_tol * std::max(1.0, std::abs(rhs)); }

}  // namespace

bool hall_feasibility(const std::vector<double>& rates, const MachineProfile& machines, double gamma, double rel_tol) {
    const std::size_t n = rates.size();
    if (n <= 16) {
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            double sum = 0.0;
            std::int64_t k = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) {
                    sum += rates[i];
                    ++k;
                }
            if (!within(sum, gamma * machines.prefix_speed(k), rel_tol)) return false;
        }
        return true;
    }
    std::vector<double> sorted = rates;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        sum += sorted[k - 1];
        if (!within(sum, gamma * machines.prefix_speed(static_cast<std::int64_t>(k)), rel_tol)) return false;
    }
    return true;
}

bool hall_feasibility(const RateProfile& profile, const MachineProfile& machines, double rel_tol) {
    const std::int64_t n = profile.num_tasks();
    if (n <= 16) {
        std::vector<double> rates;
        for (const auto& j : profile.jobs)
            for (std::int64_t k = 0; k < j.alive; ++k) rates.push_back(j.rate);
        return hall_feasibility(rates, machines, profile.gamma, rel_tol);
    }
    // Slack along a run of equal rates is piecewise linear in k with kinks only at class
    // boundaries, so checking run ends and class boundaries inside runs is exhaustive.
    std::vector<const JobRate*> sorted;
    for (const auto& j : profile.jobs) sorted.push_back(&j);
    std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->rate > b->rate; });
    std::vector<std::int64_t> class_ends;
    for (int c = 0; c < machines.num_classes(); ++c) class_ends.push_back(machines.machines_through(c));
    std::int64_t k = 0;
    double sum = 0.0;
    for (const JobRate* j : sorted) {
        if (j->rate < 0.0) return false;
        const std::int64_t lo = k;
        const std::int64_t hi = k + j->alive;
        std::vector<std::int64_t> probes{lo + 1, hi};
        for (std::int64_t e : class_ends)
            if (e > lo && e < hi) probes.push_back(e);
        for (std::int64_t p : probes) {
            const double s = sum + j->rate * static_cast<double>(p - lo);
            if (!within(s, profile.gamma * machines.prefix_speed(p), rel_tol)) return false;
        }
        k = hi;
        sum += j->rate * static_cast<double>(j->alive);
    }
    return true;
}

}  // namespace bagsched
