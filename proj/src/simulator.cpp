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

#include "bagsched/simulator.hpp"

#include <algorithm>
#include <limits>

namespace bagsched {

double TraceInterval::alive_weight() const {
    double w = 0.0;
    for (const auto& j : profile.jobs) w += j.weight;
    return w;
}

double Trace::objective(const Instance& instance) const {
    double total = 0.0;
    for (std::size_t j = 0; j < job_completion.size(); ++j) total += instance.jobs()[j].weight * job_completion[j];
    return total;
}

double Trace::makespan() const {
    double m = 0.0;
    for (double c : job_completion) m = std::max(m, c);
    return m;
}

double Trace::weighted_alive_integral() const {
    double total = 0.0;
    for (const auto& iv : intervals) total += iv.alive_weight() * iv.length();
    return total;
}

namespace {

constexpr double kFinishTol = 1e-12;

struct JobState {
    bool released = false;
    bool done = false;
    std::vector<double> remaining;  // per task of each cohort
    std::vector<char> cohort_done;
    std::int64_t alive = 0;
};

}  // namespace

Trace simulate(const Instance& instance) {
    const auto& jobs = instance.jobs();
    const double gamma = instance.speedup();
    const SpeedLadder<double> ladder(instance.classes());

    Trace trace;
    trace.gamma = gamma;
    trace.has_release_dates = !instance.all_released_at_zero();
    trace.job_completion.assign(jobs.size(), 0.0);
    trace.cohort_completion.resize(jobs.size());

    std::vector<JobState> state(jobs.size());
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        state[j].remaining.resize(jobs[j].tasks.size());
        state[j].cohort_done.assign(jobs[j].tasks.size(), 0);
        trace.cohort_completion[j].assign(jobs[j].tasks.size(), 0.0);
        for (std::size_t c = 0; c < jobs[j].tasks.size(); ++c) state[j].remaining[c] = jobs[j].tasks[c].size;
    }

    std::vector<int> by_release(jobs.size());
    for (std::size_t j = 0; j < jobs.size(); ++j) by_release[j] = static_cast<int>(j);
    std::stable_sort(by_release.begin(), by_release.end(),
                     [&](int a, int b) { return jobs[a].release < jobs[b].release; });
    std::size_t next_release = 0;
    std::size_t completed_jobs = 0;

    auto finish_cohort = [&](int j, int c, double t) {
        state[j].cohort_done[c] = 1;
        state[j].remaining[c] = 0.0;
        state[j].alive -= jobs[j].tasks[c].count;
        trace.cohort_completion[j][c] = t;
        trace.events.push_back({t, EventKind::task_completion, j, c});
        if (state[j].alive == 0) {
            state[j].done = true;
            trace.job_completion[j] = t;
            trace.events.push_back({t, EventKind::job_completion, j, -1});
            ++completed_jobs;
        }
    };

    auto release_due = [&](double t) {
        while (next_release < by_release.size() && jobs[by_release[next_release]].release <= t) {
            const int j = by_release[next_release++];
            auto& s = state[j];
            s.released = true;
            s.alive = jobs[j].task_count();
            trace.events.push_back({jobs[j].release, EventKind::job_release, j, -1});
            for (std::size_t c = 0; c < jobs[j].tasks.size(); ++c)
                if (jobs[j].tasks[c].size == 0.0) finish_cohort(j, static_cast<int>(c), jobs[j].release);
        }
    };

    double t = 0.0;
    release_due(t);
    while (completed_jobs < jobs.size()) {
        std::vector<AliveJob> alive;
        for (std::size_t j = 0; j < jobs.size(); ++j)
            if (state[j].released && !state[j].done) alive.push_back({static_cast<int>(j), jobs[j].weight, state[j].alive});

        const double release_at = next_release < by_release.size() ? jobs[by_release[next_release]].release
                                                                    : std::numeric_limits<double>::infinity();
        if (alive.empty()) {
            if (!std::isfinite(release_at)) break;
            t = release_at;
            release_due(t);
            continue;
        }

        TraceInterval iv;
        iv.start = t;
        iv.profile = assign_rates_t<double>(alive, ladder, gamma);

        double dt = release_at - t;
        for (const auto& jr : iv.profile.jobs) {
            const auto& s = state[jr.job];
            for (std::size_t c = 0; c < s.remaining.size(); ++c) {
                if (s.cohort_done[c]) continue;
                iv.alive_cohorts.push_back({jr.job, static_cast<int>(c)});
                if (jr.rate > 0.0) dt = std::min(dt, s.remaining[c] / jr.rate);
            }
        }
        std::sort(iv.alive_cohorts.begin(), iv.alive_cohorts.end());
        if (!std::isfinite(dt)) throw SimulationError("no alive task receives a positive rate and no release is pending");

        const double t_next = t + dt;
        iv.end = t_next;
        std::vector<CohortRef> finishing;
        for (const auto& jr : iv.profile.jobs) {
            auto& s = state[jr.job];
            for (std::size_t c = 0; c < s.remaining.size(); ++c) {
                if (s.cohort_done[c] || jr.rate <= 0.0) continue;
                const double needed = s.remaining[c] / jr.rate;
                if (needed <= dt * (1.0 + kFinishTol)) {
                    finishing.push_back({jr.job, static_cast<int>(c)});
                } else {
                    s.remaining[c] -= jr.rate * dt;
                }
            }
        }
        if (dt > 0.0) trace.intervals.push_back(std::move(iv));
        t = t_next;
        for (const auto& f : finishing) finish_cohort(f.job, f.cohort, t);
        release_due(t);
    }
    std::stable_sort(trace.events.begin(), trace.events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    return trace;
}

}  // namespace bagsched
